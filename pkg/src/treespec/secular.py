"""Eigenvalues of the Kirchhoff Laplacian from the bond scattering matrix.

Each edge gives two directed bonds.  With S the vertex scattering matrix
(entry 2/deg(v) - [b' reverses b] for b ending and b' starting at v) and
D(k) = diag(exp(i k L_b)), k^2 > 0 is an eigenvalue exactly when
U(k) = D(k) S has eigenvalue 1, with multiplicity dim ker(I - U(k)).

Root bracketing uses the eigenphases of U(k).  They rotate strictly
counterclockwise (d theta/dk = <v, L v> > 0) and their sum grows like
2 k L(G), so the number of eigenvalues in (0, k] is

    N(k) = (2 k L(G) + sum arg0 eig S - sum arg0 eig U(k)) / (2 pi)

with arg0 taking values in [0, 2 pi).  N is evaluated on a scan grid,
jumps are split by bisection on N, and simple roots are polished with
Brent's method on a real-valued normalization of det(I - U(k)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .closed_form import dirichlet_spectrum
from .graph import MetricGraph, Spectrum, check_valid, total_length

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
DEFAULT_SCAN_DIV = 16
# phases closer than this to 0 (mod 2 pi) make a grid point ambiguous
_PHASE_GUARD = 1e-7
_KERNEL_RTOL = 1e-8
_CLUSTER_RTOL = 1e-14
_GRID_OFFSET = (3.0 - math.sqrt(5.0)) / 2.0


class SolverError(RuntimeError):
    """Numerical failure of the root scan (non-convergence, missed roots)."""


class RootCountMismatch(SolverError):
    pass


class StructuralFailure(RuntimeError):
    """A transcendental equation did not have the expected number of roots."""


@dataclass(frozen=True)
class Bond:
    edge: int
    forward: bool
    origin: str
    terminus: str


@dataclass(frozen=True, eq=False)
class BondSystem:
    bonds: tuple[Bond, ...]
    lengths: np.ndarray
    scattering: np.ndarray
    total_length: float
    reference_phase_sum: float
    det_sign: float

    @property
    def size(self) -> int:
        return len(self.bonds)

    def unitary(self, k):
        """D(k) S for scalar k, or a stack of them for an array of k."""
        k = np.asarray(k, dtype=float)
        phases = np.exp(1j * k[..., None] * self.lengths)
        return phases[..., :, None] * self.scattering


def reverse(b: int) -> int:
    return b ^ 1


def build_bond_system(graph: MetricGraph) -> BondSystem:
    """Bonds in edge order, forward orientation first, then the reverse."""
    check_valid(graph)
    if not graph.edges:
        raise ValueError("graph has no edges")
    bonds = []
    for i, e in enumerate(graph.edges):
        bonds.append(Bond(i, True, e.origin, e.terminus))
        bonds.append(Bond(i, False, e.terminus, e.origin))
    n = len(bonds)
    deg = graph.degrees()
    outgoing: dict[str, list[int]] = {}
    for j, b in enumerate(bonds):
        outgoing.setdefault(b.origin, []).append(j)
    S = np.zeros((n, n))
    for j, b in enumerate(bonds):
        v = b.terminus
        for jp in outgoing[v]:
            S[jp, j] = 2.0 / deg[v] - (jp == reverse(j))
    lengths = np.repeat(graph.float_lengths(), 2)

    ev = np.linalg.eigvals(S)
    args = np.mod(np.angle(ev), TWO_PI)
    args[np.abs(ev - 1.0) < 1e-9] = 0.0
    return BondSystem(
        bonds=tuple(bonds),
        lengths=lengths,
        scattering=S,
        total_length=float(total_length(graph)),
        reference_phase_sum=float(args.sum()),
        det_sign=float(np.sign(np.linalg.det(S))),
    )


def secular_value(system: BondSystem, k: float) -> complex:
    """det(I - D(k) S)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return complex(np.linalg.det(np.eye(system.size) - system.unitary(k)))


def real_secular(system: BondSystem, k: float) -> float:
    """det(I - D(k) S) times a unimodular factor that makes it real.

    Zeros coincide with those of the secular function; simple eigenvalues
    are sign changes.
    """
    z = secular_value(system, k) * np.exp(-1j * k * system.total_length)
    if system.det_sign < 0:
        z *= -1j
    return z.real


def _phase_data(system: BondSystem, ks):
    ev = np.linalg.eigvals(system.unitary(ks))
    args = np.mod(np.angle(ev), TWO_PI)
    gap = np.minimum(args, TWO_PI - args).min(axis=-1)
    raw = (2.0 * np.asarray(ks) * system.total_length + system.reference_phase_sum
           - args.sum(axis=-1)) / TWO_PI
    return raw, gap


def _to_counts(raw) -> np.ndarray:
    counts = np.rint(raw)
    if np.any(np.abs(raw - counts) > 1e-6):
        raise SolverError("eigenphase count is not an integer; phase tracking failed")
    return counts.astype(int)


def eigencount(system: BondSystem, k: float) -> int:
    """Number of eigenvalues lambda = q^2 with 0 < q <= k."""
    if k <= 0:
        return 0
    raw, _ = _phase_data(system, np.array([k]))
    return int(_to_counts(raw)[0])


def kernel_dimension(system: BondSystem, k: float, rtol: float = _KERNEL_RTOL) -> int:
    """Singular values of I - D(k) S below rtol * max(norm, 1).

    The floor matters when S = I (a lone loop), where every singular value
    vanishes together at an eigenvalue.
    """
    sv = np.linalg.svd(np.eye(system.size) - system.unitary(k), compute_uv=False)
    return int(np.sum(sv <= rtol * max(sv[0], 1.0)))


def _scan_grid(system: BondSystem, kmax: float, scan_div: int):
    step = math.pi / (scan_div * system.total_length)
    n = int(math.ceil(kmax / step)) + 1
    ks = step * (np.arange(n) + _GRID_OFFSET)
    raw, gap = _phase_data(system, ks)
    for _ in range(20):
        bad = gap < _PHASE_GUARD
        if not bad.any():
            break
        ks[bad] += 1e-3 * step
        raw[bad], gap[bad] = _phase_data(system, ks[bad])
    else:
        raise SolverError("could not place scan grid away from eigenvalues")
    counts = _to_counts(raw)
    if np.any(np.diff(counts) < 0) or counts[0] < 0:
        raise SolverError("eigenphase count decreased along the scan grid")
    return ks, counts


def _locate(system: BondSystem, a: float, b: float, na: int, nb: int, rtol: float, out: list):
    """Append (k, multiplicity) for every eigenvalue in (a, b]."""
    stack = [(a, b, na, nb)]
    while stack:
        a, b, na, nb = stack.pop()
        jump = nb - na
        if jump == 0:
            continue
        xtol = 0.25 * rtol * b
        if jump == 1:
            ra, rb = real_secular(system, a), real_secular(system, b)
            if ra * rb < 0:
                k = optimize.brentq(lambda q: real_secular(system, q), a, b,
                                    xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
                out.append((k, 1))
                continue
        # clusters are bisected to near machine precision, since Brent's
        # method cannot polish an even-order zero
        if b - a <= _CLUSTER_RTOL * b:
            out.append((0.5 * (a + b), jump))
            continue
        mid = 0.5 * (a + b)
        # a phase within rounding of 0 can tip the count either way
        nm = min(max(eigencount(system, mid), na), nb)
        stack.append((mid, b, nm, nb))
        stack.append((a, mid, na, nm))


def positive_roots(system: BondSystem, kmax: float, tolerance: float = DEFAULT_TOL,
                   scan_div: int = DEFAULT_SCAN_DIV) -> list[tuple[float, int]]:
    """All wavenumbers 0 < k <= kmax (approximately) with multiplicities."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    ks, counts = _scan_grid(system, kmax, scan_div)
    roots: list[tuple[float, int]] = []
    _locate(system, 0.0, ks[0], 0, counts[0], tolerance, roots)
    for i in np.nonzero(np.diff(counts))[0]:
        _locate(system, ks[i], ks[i + 1], counts[i], counts[i + 1], tolerance, roots)
    roots.sort()
    return roots


def eigenvalues(graph: MetricGraph, count: int, tolerance: float = DEFAULT_TOL,
                scan_div: int = DEFAULT_SCAN_DIV, audit: bool = False) -> Spectrum:
    """The first ``count`` eigenvalues of the standard Laplacian."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    system = build_bond_system(graph)
    if count <= 1:
        return Spectrum((0.0,) * count, "secular")
    # lambda_count <= lambda_count^D on any graph, so this window is enough
    kmax = math.sqrt(dirichlet_spectrum(graph, count).values[-1]) * (1 + 1e-6)
    roots = positive_roots(system, kmax, tolerance, scan_div)

    kernel = []
    values = [0.0]
    for k, mult in roots:
        dim = kernel_dimension(system, k)
        kernel.append(dim)
        if dim < mult:
            raise SolverError(f"root k={k!r}: count jump {mult} exceeds kernel dimension {dim}")
        values.extend([k * k] * mult)
    if len(values) < count:
        raise SolverError(f"found {len(values)} eigenvalues, expected at least {count}")
    diagnostics = {"roots": roots, "kernel_dimensions": kernel, "kmax": kmax}
    spectrum = Spectrum(tuple(values[:count]), "secular", diagnostics=diagnostics)
    if audit:
        diagnostics["audit"] = audit_against_oracle(graph, values, count)
    return spectrum


def audit_against_oracle(graph: MetricGraph, values, count: int, separation: float = 1e-3):
    """Compare secular eigenvalue counts with certified variational counts.

    Probe points sit midway inside every relative gap wider than
    ``separation`` among the first ``count`` + 1 computed eigenvalues.
    """
    from .oracle import count_oracle

    records = []
    vals = list(values[:count + 1])
    for j in range(1, len(vals)):
        lo, hi = vals[j - 1], vals[j]
        if hi - lo <= separation * hi:
            continue
        mu = 0.5 * (lo + hi)
        oc = count_oracle(graph, mu)
        records.append({"mu": mu, "secular": j, "oracle": oc.count, "certified": oc.certified})
        if oc.certified and oc.count != j:
            raise RootCountMismatch(f"mu={mu!r}: secular count {j} != oracle count {oc.count}")
    return records


@dataclass(frozen=True)
class CountResult:
    count: int
    ambiguous: bool

    def __int__(self):
        return self.count


def count_up_to(graph: MetricGraph, mu: float, tolerance: float = DEFAULT_TOL) -> CountResult:
    """N([0, mu]) with multiplicity.

    An eigenvalue within relative ``tolerance`` of mu is counted and the
    result flagged ambiguous.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    system = build_bond_system(graph)
    if mu == 0:
        return CountResult(1, False)
    q = math.sqrt(mu)
    hi = eigencount(system, q * (1 + tolerance))
    lo = eigencount(system, q * (1 - tolerance))
    return CountResult(1 + hi, hi != lo)


# the three-edge star {pi/n, pi/n, pi} ----------------------------------------

def interessant(n: int, s):
    """cos(s pi/n) sin(s pi) + 2 sin(s pi/n) cos(s pi), with s = sqrt(lambda)."""
    s = np.asarray(s, dtype=float)
    return (np.cos(s * np.pi / n) * np.sin(s * np.pi)
            + 2.0 * np.sin(s * np.pi / n) * np.cos(s * np.pi))


def solve_interessant(n: int, tolerance: float = 1e-14, grid: int = 10_000) -> float:
    """The unique lambda in (0, 1) solving the star secular condition.

    Sign changes are bracketed on ``grid`` equispaced points of sqrt(lambda)
    in (0, 1]; exactly one is required.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be an even integer >= 2")
    s = np.arange(1, grid + 1) / grid
    h = interessant(n, s)
    sgn = np.sign(h)
    brackets = np.nonzero(sgn[:-1] * sgn[1:] <= 0)[0]
    if len(brackets) != 1:
        raise StructuralFailure(f"n={n}: found {len(brackets)} sign changes in (0, 1), expected 1")
    i = brackets[0]
    a, b = s[i], s[i + 1]
    if h[i] == 0:
        return float(a * a)
    root = optimize.bisect(lambda x: float(interessant(n, x)), a, b,
                           xtol=tolerance / 4, rtol=4 * np.finfo(float).eps, maxiter=200)
    lam = root * root
    if not 0.0 < lam < 1.0:
        raise StructuralFailure(f"n={n}: root {lam} outside (0, 1)")
    return float(lam)
