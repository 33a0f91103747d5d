"""Central-limit (Gaussian) families from a covariance matrix.

A covariance over n left and m right coordinates determines a family whose
mixed moments are sums over bi-non-crossing pair partitions.  The same
moments fall out of a truncated Fock-space matrix model, which serves as an
independent oracle.  Closed forms: polynomial conjugate variables solve
A b = e_k, Fisher information is Tr(A^-1), entropy is
(n+m)/2 log(2 pi e) + 1/2 log det A, and the entropy dimension is rank(A).
The entropy is also recovered numerically by integrating the Fisher
information of the family perturbed along A + tI.

Infinity and minus infinity are returned as ``math.inf`` / ``-math.inf``,
never as sentinel floats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .bnclattice import is_bnc

Pattern = Sequence[tuple[str, int]]

LOG_2PIE = math.log(2 * math.pi * math.e)

#: Relative eigenvalue threshold below which a covariance counts as singular.
SINGULAR_TOL = 1e-12
#: Relative singular-value threshold for the numerical rank.
RANK_TOL = 1e-8


class SingularCovarianceError(ValueError):
    """The covariance is singular: no polynomial conjugate variables exist."""


class NonConvergenceError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class RankAmbiguityWarning(UserWarning):
    """A singular value sits too close to the rank threshold to classify."""


@dataclass(frozen=True)
class Covariance:
    """Symmetric positive semidefinite covariance over n lefts and m rights."""

    n: int
    m: int
    A: np.ndarray

    def __post_init__(self) -> None:
        k = self.n + self.m
        A = np.asarray(self.A, dtype=float)
        if A.shape != (k, k):
            raise ValueError(f"covariance must be {k}x{k}, got {A.shape}")
        scale = max(1.0, float(np.abs(A).max(initial=0.0)))
        if np.abs(A - A.T).max(initial=0.0) > 1e-10 * scale:
            raise ValueError("covariance must be symmetric")
        A = 0.5 * (A + A.T)
        if k and np.linalg.eigvalsh(A).min() < -1e-10 * scale:
            raise ValueError("covariance must be positive semidefinite")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def size(self) -> int:
        return self.n + self.m

    def flat_index(self, side: str, index: int) -> int:
        if side == "l":
            if not 1 <= index <= self.n:
                raise ValueError(f"left index {index} out of range 1..{self.n}")
            return index - 1
        if side == "r":
            if not 1 <= index <= self.m:
                raise ValueError(f"right index {index} out of range 1..{self.m}")
            return self.n + index - 1
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")

    def to_json_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "matrix": self.A.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Covariance":
        return cls(int(data["n"]), int(data["m"]), np.asarray(data["matrix"], dtype=float))


def _pair_partitions(k: int):
    """All perfect matchings of range(k) as tuples of index pairs."""
    if k % 2:
        return
    if k == 0:
        yield ()
        return
    items = list(range(k))

    def rec(free: list[int]):
        if not free:
            yield ()
            return
        head = free[0]
        for pos in range(1, len(free)):
            mate = free[pos]
            rest = free[1:pos] + free[pos + 1:]
            for tail in rec(rest):
                yield ((head, mate),) + tail

    yield from rec(items)


def gaussian_moment(cov: Covariance, pattern: Pattern, degree_cap: int = 16) -> float:
    """Mixed moment by the combinatorial formula: sum over bi-non-crossing
    pair partitions of products of covariance entries; zero for odd length."""
    pattern = [(side, index) for side, index in pattern]
    flats = [cov.flat_index(side, index) for side, index in pattern]
    k = len(pattern)
    if k > degree_cap:
        raise ValueError(f"pattern length {k} exceeds cap {degree_cap}")
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0
    chi = tuple(side for side, _ in pattern)
    total = 0.0
    for matching in _pair_partitions(k):
        blocks = [(a + 1, b + 1) for a, b in matching]
        if not is_bnc(blocks, chi):
            continue
        product = 1.0
        for a, b in matching:
            product *= cov.A[flats[a], flats[b]]
        total += product
    return total


# -- Fock matrix model ---------------------------------------------------------


@dataclass(frozen=True)
class FockModel:
    """Truncated Fock-space representation whose vacuum moments realize the family.

    The basis is all words of length <= depth over the n+m coordinates, with
    Gram inner products from the covariance; coordinate k acts by creation
    plus annihilation, on the head for lefts and on the tail for rights.
    Moments of total degree <= depth are unaffected by the truncation.
    """

    cov: Covariance
    depth: int
    ops: tuple[csr_matrix, ...]
    dim: int


def build_fock_model(cov: Covariance, depth: int) -> FockModel:
    k = cov.size
    if k == 0:
        raise ValueError("empty covariance")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    words: list[tuple[int, ...]] = []
    for length in range(depth + 1):
        words.extend(tuple(w) for w in iproduct(range(k), repeat=length))
    index = {w: i for i, w in enumerate(words)}
    dim = len(words)
    A = cov.A
    ops = []
    for coord in range(k):
        is_left = coord < cov.n
        rows: list[int] = []
        cols: list[int] = []
        data: list[float] = []
        for w, col in index.items():
            if len(w) < depth:  # creation
                target = (coord,) + w if is_left else w + (coord,)
                rows.append(index[target])
                cols.append(col)
                data.append(1.0)
            if w:  # annihilation against the Gram form
                if is_left:
                    factor = A[w[0], coord]
                    target = w[1:]
                else:
                    factor = A[w[-1], coord]
                    target = w[:-1]
                if factor:
                    rows.append(index[target])
                    cols.append(col)
                    data.append(float(factor))
        ops.append(csr_matrix((data, (rows, cols)), shape=(dim, dim)))
    return FockModel(cov, depth, tuple(ops), dim)


def fock_moment(model: FockModel, pattern: Pattern) -> float:
    """Vacuum expectation of the product of field operators for ``pattern``."""
    pattern = [(side, index) for side, index in pattern]
    if len(pattern) > model.depth:
        raise ValueError(
            f"pattern length {len(pattern)} exceeds truncation depth {model.depth}"
        )
    vec = np.zeros(model.dim)
    vec[0] = 1.0
    for side, index in reversed(pattern):
        vec = model.ops[model.cov.flat_index(side, index)] @ vec
    return float(vec[0])


# -- closed forms ----------------------------------------------------------------


def _min_max_eigs(A: np.ndarray) -> tuple[float, float]:
    eigs = np.linalg.eigvalsh(A)
    return float(eigs.min()), float(eigs.max())


def _is_singular(A: np.ndarray) -> bool:
    if A.size == 0:
        return False
    lo, hi = _min_max_eigs(A)
    return lo <= SINGULAR_TOL * max(hi, 1.0)


def conjugate_coeffs(cov: Covariance, k: int) -> np.ndarray:
    """Coefficients of the k-th polynomial conjugate variable (1-based k):
    the solution of A b = e_k, i.e. column k of the inverse covariance."""
    if not 1 <= k <= cov.size:
        raise ValueError(f"k must be in 1..{cov.size}")
    if _is_singular(cov.A):
        raise SingularCovarianceError(
            "singular covariance: no polynomial conjugate variable (Fisher information is infinite)"
        )
    e = np.zeros(cov.size)
    e[k - 1] = 1.0
    return np.linalg.solve(cov.A, e)


def fisher(cov: Covariance) -> float:
    """Fisher information Tr(A^-1); infinity when A is singular."""
    if _is_singular(cov.A):
        return math.inf
    return float(np.trace(np.linalg.inv(cov.A)))


def fisher_perturbed(cov: Covariance, t: float) -> float:
    """Fisher information along the perturbation A + tI."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    A = cov.A + t * np.eye(cov.size)
    if _is_singular(A):
        return math.inf
    return float(np.trace(np.linalg.inv(A)))


def entropy_closed(cov: Covariance) -> float:
    """(n+m)/2 log(2 pi e) + 1/2 log det A; minus infinity when A is singular."""
    if _is_singular(cov.A):
        return -math.inf
    eigs = np.linalg.eigvalsh(cov.A)
    return 0.5 * cov.size * LOG_2PIE + 0.5 * float(np.log(eigs).sum())


# -- entropy by quadrature --------------------------------------------------------


@dataclass(frozen=True)
class QuadConfig:
    """Controls for the substituted adaptive Simpson rule."""

    tol: float = 1e-9
    max_depth: int = 48
    delta: float | None = None
    tail_bound: float = 1e-9


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_bound: float
    evaluations: int


def _adaptive_simpson(
    f: Callable[[float], float], a: float, b: float, tol: float, max_depth: int
) -> tuple[float, float, int]:
    evals = [0]
    length = b - a

    def eval_f(x: float) -> float:
        evals[0] += 1
        return f(x)

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, m, fm, b, fb, whole, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = eval_f(lm)
        frm = eval_f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        err = (left + right - whole) / 15.0
        # error budget proportional to panel length keeps the total below tol
        if abs(err) <= tol * (b - a) / length or (b - a) < 1e-14:
            return left + right + err, abs(err)
        if depth >= max_depth:
            raise NonConvergenceError(
                f"adaptive quadrature stalled on [{a}, {b}] at depth {depth}"
            )
        lv, le = rec(a, fa, lm, flm, m, fm, left, depth + 1)
        rv, re = rec(m, fm, rm, frm, b, fb, right, depth + 1)
        return lv + rv, le + re

    fa, fb = eval_f(a), eval_f(b)
    m = 0.5 * (a + b)
    fm = eval_f(m)
    whole = simpson(fa, fm, fb, b - a)
    value, err = rec(a, fa, m, fm, b, fb, whole, 0)
    return value, err, evals[0]


def entropy_quadrature(
    fisher_fn: Callable[[float], float],
    n_plus_m: int,
    cfg: QuadConfig | None = None,
) -> QuadResult:
    """Entropy from a Fisher profile t -> Phi(t) of the perturbed family:

        (n+m)/2 log(2 pi e) + 1/2 ∫_0^∞ ( (n+m)/(1+t) - Phi(t) ) dt.

    The integral is mapped by t = u/(1-u) onto [0, 1-delta] and integrated
    adaptively; past the cut the profile is replaced by its (n+m)/t asymptote,
    whose tail integrates in closed form.  The cut is placed so the neglected
    remainder stays below ``cfg.tail_bound``.  Returns the estimate together
    with an error bound.  A profile diverging like nu/t at 0 (degenerate
    covariance) yields minus infinity.
    """
    cfg = cfg or QuadConfig()
    k = n_plus_m

    # Degenerate families: t * Phi(t) tends to the nullity, not to 0.
    probe_small = 1e-12
    if probe_small * fisher_fn(probe_small) > 0.5:
        return QuadResult(-math.inf, math.inf, 1)

    # Tail expansion coefficients: Phi(t) = k/t - c2/t^2 + O(1/t^3).
    t2 = 1e8
    c2 = max(0.0, t2 * (k - t2 * fisher_fn(t2)))
    t3 = 1e5
    c3 = abs(t3 ** 3 * (fisher_fn(t3) - k / t3 + c2 / t3 ** 2))
    if cfg.delta is not None:
        delta = cfg.delta
        t_cut = (1.0 - delta) / delta
    else:
        # Cut where the neglected 1/t^3 remainder drops below the tail bound;
        # past ~1e7 the integrand is rounding noise, so stop there.
        t_cut = max(1e4, math.sqrt(max(c3, 1.0) / cfg.tail_bound))
        t_cut = min(t_cut, 1e7)
        delta = 1.0 / (1.0 + t_cut)

    def integrand(u: float) -> float:
        om = 1.0 - u
        t = u / om
        return (k / (1.0 + t) - fisher_fn(t)) / (om * om)

    integral, err, evals = _adaptive_simpson(
        integrand, 0.0, 1.0 - delta, cfg.tol, cfg.max_depth
    )
    tail = -k * math.log1p(1.0 / t_cut) + c2 / t_cut
    tail_residual = c3 / (t_cut * t_cut)
    value = 0.5 * k * LOG_2PIE + 0.5 * (integral + tail)
    return QuadResult(value, 0.5 * (err + tail_residual), evals + 1)


# -- entropy dimension -------------------------------------------------------------


def entropy_dimension(cov: Covariance, rank_tol: float = RANK_TOL) -> int:
    """Closed form: the numerical rank of the covariance.

    Singular values within a factor of 10 of the threshold are reported via
    ``RankAmbiguityWarning`` rather than silently classified.
    """
    if cov.size == 0:
        return 0
    svals = np.linalg.svd(cov.A, compute_uv=False)
    top = float(svals.max(initial=0.0))
    if top == 0.0:
        return 0
    cut = rank_tol * top
    ambiguous = [s for s in svals if cut / 10.0 < s < cut * 10.0]
    if ambiguous:
        warnings.warn(
            f"singular values {ambiguous} lie within a factor of 10 of the rank "
            f"threshold {cut:.3e}; rank decision is ambiguous",
            RankAmbiguityWarning,
            stacklevel=2,
        )
    return int((svals > cut).sum())


def _extrapolate_to_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    # Neville tableau evaluated at 0.
    xs = list(xs)
    p = list(ys)
    n = len(p)
    for j in range(1, n):
        for i in range(n - j):
            p[i] = (xs[i + j] * p[i] - xs[i] * p[i + 1]) / (xs[i + j] - xs[i])
    return p[0]


def entropy_dimension_limit(
    fisher_fn: Callable[[float], float],
    n_plus_m: int,
    eps_seq: Sequence[float] | None = None,
) -> float:
    """Limit form of the dimension: (n+m) - lim eps * Phi(eps) as eps -> 0+,
    evaluated on a decreasing epsilon sequence with Richardson extrapolation."""
    if eps_seq is None:
        eps_seq = [0.25 * 0.5 ** i for i in range(10)]
    eps_seq = list(eps_seq)
    if len(eps_seq) < 2:
        raise ValueError("need at least two epsilon values")
    if any(b >= a for a, b in zip(eps_seq, eps_seq[1:])):
        raise ValueError("eps_seq must be strictly decreasing")
    values = [eps * fisher_fn(eps) for eps in eps_seq]
    limit = _extrapolate_to_zero(eps_seq, values)
    return n_plus_m - limit
