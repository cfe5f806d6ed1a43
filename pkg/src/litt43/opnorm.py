"""Exact and certified operator norms for finite bilinear forms.

The sup norm ||A|| maximizes |A(x, y)| over arguments with entries of
modulus at most 1.  The x argument is eliminated exactly: for fixed y the
supremum over the unit cube (real) or polydisc (complex) in x equals
sum_k |sum_j A_kj y_j|, taking x_k to be the sign (or conjugate phase) of
the k-th row sum.  What remains is

* real case: a convex objective in y, so the maximum is attained at a
  vertex of the cube.  ``real_sup_norm`` enumerates all 2^(N-1) sign
  vectors (y and -y tie, so the first sign is pinned to +1) and is exact.
* complex case: the continuum of phases is discretized to the M-th roots
  of unity.  ``complex_norm_discrete`` is the exact maximum over that
  grid, and the factor R_M = sqrt(1/2 + cos(2*pi/M)/2) certifies the
  two-sided bound  ||A||_M <= ||A|| <= ||A||_M / R_M.

Sign enumeration walks the pattern space in Gray-code order: the low bits
are tabulated as a matrix block (one BLAS product evaluates a whole
block), and the remaining high bits advance one sign flip at a time,
updating the K row accumulators in O(K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .forms import BilinearForm

__all__ = [
    "SignPattern",
    "RootsOfUnityGrid",
    "TorusNormBounds",
    "real_sup_norm",
    "complex_norm_discrete",
    "r_m",
    "complex_norm_bounds",
    "REAL_ENUM_CAP",
    "DEFAULT_EVAL_BUDGET",
]

REAL_ENUM_CAP = 24
DEFAULT_EVAL_BUDGET = 10**8

# Tabulated block size: 2^14 sign patterns / <= 2^17 root patterns.
_SIGN_BLOCK_BITS = 14
_ROOT_BLOCK_CAP = 1 << 17


@dataclass(frozen=True)
class SignPattern:
    """A vector in {-1, +1}^N, an extreme point of the real argument cube."""

    signs: tuple

    def __post_init__(self):
        if not self.signs or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be a non-empty tuple over {-1, +1}")

    def as_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=np.float64)


@dataclass(frozen=True)
class RootsOfUnityGrid:
    """The M-th roots of unity exp(2*pi*i*j/M) and their angles 2*pi*j/M."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"grid order must be >= 2, got {self.m}")

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.m) / self.m)

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m) / self.m


@dataclass(frozen=True)
class TorusNormBounds:
    """Certified interval [lower, upper] for a complex sup norm.

    discrete_norm is the exact grid maximum ||A||_M; lower improves on it
    only through feasible points (phase ascent), so
    discrete_norm <= lower <= ||A|| <= upper = discrete_norm / R_M.
    """

    lower: float
    upper: float
    m: int
    r_m: float
    discrete_norm: float

    def __post_init__(self):
        slack = 1e-12 * max(1.0, self.discrete_norm)
        if not (self.discrete_norm - slack <= self.lower <= self.upper + slack):
            raise ValueError(
                f"inconsistent bounds: discrete={self.discrete_norm!r} "
                f"lower={self.lower!r} upper={self.upper!r}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _gray_flip_index(i: int) -> int:
    """Index of the bit that changes between Gray codes i-1 and i."""
    return (i & -i).bit_length() - 1


def _sign_table(cols: np.ndarray) -> np.ndarray:
    """Row sums cols @ s for every s in {-1,+1}^L, L = cols.shape[1]."""
    k, L = cols.shape
    codes = np.arange(1 << L, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(L, dtype=np.uint32)[None, :]) & 1
    signs = 1.0 - 2.0 * bits  # bit 0 -> +1, bit 1 -> -1
    return cols @ signs.T  # (K, 2^L)


def real_sup_norm(A: BilinearForm, cap: int = REAL_ENUM_CAP) -> float:
    """Exact ||A|| for a real form, maximized over all sign vectors y.

    Refuses (rather than approximates) when N exceeds ``cap``; the
    stochastic lower bounds in ``litt43.search`` cover larger shapes.
    """
    if A.is_complex:
        raise ValueError("real_sup_norm requires a real-tagged form")
    n = A.cols
    if n > cap:
        raise CapacityError(
            f"sign enumeration needs 2^{n - 1} patterns but the cap is N = {cap} "
            f"(2^{cap - 1}); raise `cap` explicitly to proceed"
        )
    entries = A.entries
    free = n - 1  # y[0] pinned to +1 (y and -y give equal values)
    low = min(free, _SIGN_BLOCK_BITS)
    high = free - low
    table = _sign_table(entries[:, 1:1 + low])  # (K, 2^low)
    high_cols = entries[:, 1 + low:]
    # start at the all-(+1) high pattern, matching Gray code 0
    base = entries[:, 0] + high_cols.sum(axis=1)
    best = float(np.abs(base[:, None] + table).sum(axis=0).max())
    if high == 0:
        return best
    signs = np.ones(high)
    for i in range(1, 1 << high):
        j = _gray_flip_index(i)
        signs[j] = -signs[j]
        base += 2.0 * signs[j] * high_cols[:, j]
        value = float(np.abs(base[:, None] + table).sum(axis=0).max())
        if value > best:
            best = value
    return best


def _root_table(cols: np.ndarray, first: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Partial row sums first + sum_j cols[:,j]*roots[d_j] over all digit tuples."""
    table = first[:, None].astype(np.complex128)
    for j in range(cols.shape[1]):
        contrib = cols[:, j][:, None] * roots[None, :]  # (K, M)
        table = (table[:, :, None] + contrib[:, None, :]).reshape(table.shape[0], -1)
    return table


def _digits_of(index: int, count: int, m: int) -> list:
    digits = []
    for _ in range(count):
        index, d = divmod(index, m)
        digits.append(d)
    return digits


def _discrete_norm_argmax(A: BilinearForm, m: int, budget: int):
    """Exact grid norm and one maximizing y in T_M^N (first coordinate 1)."""
    if m < 3:
        raise ValueError(f"root-of-unity norm needs M >= 3, got {m}")
    entries = A.entries.astype(np.complex128)
    k, n = entries.shape
    evals = m ** (n - 1)
    if evals > budget:
        raise CapacityError(
            f"T_{m}^{n} enumeration needs {evals} objective evaluations "
            f"(after fixing the global phase) but the budget is {budget}"
        )
    roots = RootsOfUnityGrid(m).points
    # choose the largest low-digit block that stays within the table cap
    low = 0
    while low < n - 1 and m ** (low + 1) <= _ROOT_BLOCK_CAP:
        low += 1
    table = _root_table(entries[:, 1:1 + low], entries[:, 0], roots)
    high_cols = entries[:, 1 + low:]
    high_count = n - 1 - low
    best = -1.0
    best_low = 0
    best_high = 0
    for h in range(m ** high_count):
        if high_count:
            hdig = _digits_of(h, high_count, m)
            offset = high_cols @ roots[hdig]
            block = np.abs((table + offset[:, None])).sum(axis=0)
        else:
            block = np.abs(table).sum(axis=0)
        idx = int(np.argmax(block))
        value = float(block[idx])
        if value > best:
            best, best_low, best_high = value, idx, h
    # the table packs its first column as the most significant digit
    digits = list(reversed(_digits_of(best_low, low, m))) + _digits_of(best_high, high_count, m)
    y = np.concatenate(([1.0 + 0.0j], roots[digits])) if digits else np.array([1.0 + 0.0j])
    return best, y


def complex_norm_discrete(A: BilinearForm, m: int,
                          budget: int = DEFAULT_EVAL_BUDGET) -> float:
    """Exact maximum of sum_k |sum_j A_kj y_j| over y in T_M^N.

    The first coordinate is pinned to 1 (global phase invariance), so the
    enumeration costs M^(N-1) objective evaluations, which is what the
    budget counts.  Real-tagged forms are accepted and treated as complex.
    """
    value, _ = _discrete_norm_argmax(A, m, budget)
    return value


def r_m(m) -> float:
    """Sandwich factor sqrt(1/2 + cos(2*pi/M)/2), increasing in M, -> 1.

    M = math.inf is accepted symbolically and gives exactly 1.
    """
    if m == math.inf:
        return 1.0
    m = int(m)
    if m < 3:
        raise ValueError(f"R_M requires M >= 3, got {m}")
    return math.sqrt(0.5 + 0.5 * math.cos(2.0 * math.pi / m))


def _coordinate_phase_ascent(entries: np.ndarray, y: np.ndarray,
                             max_sweeps: int = 200, rel_tol: float = 1e-12,
                             angle_tol: float = 1e-12) -> float:
    """Sweep coordinates, moving each phase to a 1-D maximizer; monotone.

    Each candidate phase comes from a dense angle grid followed by
    golden-section refinement of the bracket around the grid maximizer
    (closed form when the form has a single row); ties break toward the
    smaller angle via first-argmax.  Moves are accepted only on strict
    improvement, so the returned value is a valid lower bound on ||A||.
    """
    k, n = entries.shape
    y = y.astype(np.complex128).copy()
    s = entries @ y
    value = float(np.abs(s).sum())
    grid = 2.0 * np.pi * np.arange(64) / 64.0
    phases = np.exp(1j * grid)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(max_sweeps):
        previous = value
        for j in range(n):
            aj = entries[:, j]
            c = s - aj * y[j]

            def objective(theta):
                return float(np.abs(c + aj * np.exp(1j * theta)).sum())

            if k == 1:
                # single row: |c + a e^(i t)| peaks where the two terms align
                if abs(aj[0]) == 0.0:
                    continue
                theta = math.atan2((c[0] * np.conj(aj[0])).imag,
                                   (c[0] * np.conj(aj[0])).real)
                theta = theta % (2.0 * math.pi)
            else:
                samples = np.abs(c[:, None] + aj[:, None] * phases[None, :]).sum(axis=0)
                at = int(np.argmax(samples))
                lo = grid[at] - 2.0 * np.pi / 64.0
                hi = grid[at] + 2.0 * np.pi / 64.0
                x1 = hi - invphi * (hi - lo)
                x2 = lo + invphi * (hi - lo)
                f1, f2 = objective(x1), objective(x2)
                while hi - lo > angle_tol:
                    if f1 < f2:
                        lo, x1, f1 = x1, x2, f2
                        x2 = lo + invphi * (hi - lo)
                        f2 = objective(x2)
                    else:
                        hi, x2, f2 = x2, x1, f1
                        x1 = hi - invphi * (hi - lo)
                        f1 = objective(x1)
                theta = 0.5 * (lo + hi)
            candidate = objective(theta)
            if candidate > value:
                y[j] = np.exp(1j * theta)
                s = c + aj * y[j]
                value = candidate
        if value - previous <= rel_tol * max(value, 1.0):
            break
    return value


def complex_norm_bounds(A: BilinearForm, m: int, refine: bool = False,
                        budget: int = DEFAULT_EVAL_BUDGET) -> TorusNormBounds:
    """Certified interval for ||A||: [||A||_M (optionally refined), ||A||_M / R_M].

    Refinement runs coordinate-wise phase ascent from the grid maximizer;
    it can only raise the lower endpoint through feasible evaluations, so
    the interval stays valid.  The upper endpoint always uses the
    unrefined grid norm, whose R_M guarantee is what certification needs.
    """
    factor = r_m(m)
    discrete, y = _discrete_norm_argmax(A, m, budget)
    lower = discrete
    if refine and discrete > 0.0:
        lower = max(lower, _coordinate_phase_ascent(A.entries.astype(np.complex128), y))
    upper = discrete / factor
    # feasible ascent cannot mathematically exceed ||A|| <= upper; guard
    # against rounding at the scale of the last digit only
    lower = min(lower, upper)
    return TorusNormBounds(lower=lower, upper=upper, m=int(m), r_m=factor,
                           discrete_norm=discrete)
