"""Khinchin-type averages of scalar coefficient vectors.

Three averages of |sum_n a_n s_n| are computed for a coefficient vector
(a_n), differing in where the multipliers s_n live:

* Rademacher: s_n independent uniform on {-1, +1} (the classical dyadic
  model sign(sin(2^n pi t)) on [0, 1]).  Computed exactly by enumerating
  sign patterns.
* roots of unity: s_n uniform on T_M = {exp(2*pi*i*j/M)}; the average is
  the exact mean over Omega_M^N.  M = 2 reproduces the Rademacher average
  through the identical enumeration.
* Steinhaus: s_n uniform on the whole unit circle, i.e. the N-fold torus
  integral of |sum a_n e^(i t_n)|.  Evaluated either by the product
  trapezoid rule (which on this periodic integrand coincides with the
  root-of-unity mean at M = Q nodes) or as a root-of-unity limit along an
  increasing schedule of M.

Every enumeration pins one multiplier (rotation invariance makes this
exact) and accumulates block sums through ``math.fsum``, so equal input
multisets produce bit-equal averages.

The sharp comparison constants: the l_r norm of the coefficients never
exceeds 2^(1/r) times the Rademacher average (attained by (1, 1)), and
for the T_M average the certified ceiling is (4/pi)^(1/r) / R_M for
M >= 3; ``blei_bound_check`` probes these ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, UndefinedRatioError
from .exponents import Exponent
from .opnorm import RootsOfUnityGrid, r_m

__all__ = [
    "CoefficientVector",
    "AverageResult",
    "BleiBoundReport",
    "lr_norm",
    "rademacher_average",
    "khinchin_ratio",
    "e_m_average",
    "rotation_invariance_check",
    "steinhaus_expectation",
    "blei_bound_check",
    "RADEMACHER_CAP",
    "QUADRATURE_DIM_CAP",
]

RADEMACHER_CAP = 30
QUADRATURE_DIM_CAP = 8
DEFAULT_TERM_BUDGET = 10**8

_SIGN_BLOCK_BITS = 20
_ROOT_BLOCK_CAP = 1 << 20


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Immutable scalar sequence (a_n), tagged real or complex."""

    field: str
    values: np.ndarray

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        dtype = np.float64 if self.field == "real" else np.complex128
        arr = np.array(self.values, dtype=dtype).reshape(-1)
        if arr.size < 1:
            raise ValueError("coefficient vector must have N >= 1 entries")
        if not np.all(np.isfinite(arr.view(np.float64) if self.field == "complex" else arr)):
            raise ValueError("coefficients must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size


Coefficients = Union[CoefficientVector, Sequence, np.ndarray]


def _values(c: Coefficients) -> np.ndarray:
    if isinstance(c, CoefficientVector):
        return c.values
    arr = np.asarray(c)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("coefficients must form a non-empty 1-D sequence")
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    return arr.astype(np.float64)


@dataclass(frozen=True)
class AverageResult:
    value: float
    kind: str            # "rademacher" | "e_m" | "steinhaus"
    method: str          # "enumeration" | "quadrature" | "e_m-limit"
    error_bound: Optional[float] = None
    m: Optional[int] = None

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class BleiBoundReport:
    m: int
    r: Exponent
    ratio: float
    ceiling: float
    witness: tuple
    violation: bool


def lr_norm(c: Coefficients, r) -> float:
    """(sum |a_n|^r)^(1/r), supremum for r = oo."""
    r = r if isinstance(r, Exponent) else Exponent(float(r))
    mags = np.abs(_values(c))
    top = float(mags.max())
    if top == 0.0 or r.is_inf:
        return top
    return top * float(np.power(np.power(mags / top, r.value).sum(), 1.0 / r.value))


def _mean_abs_signs(a: np.ndarray) -> float:
    """Exact mean of |sum_n eta_n a_n| over eta in {-1,+1}^N.

    The last sign is pinned to +1 (eta and -eta tie); the remaining bits
    split into a tabulated low block and a Gray-code walk over high bits.
    """
    n = a.size
    if n == 1:
        return float(abs(a[0]))
    free = a[:-1]
    low = min(free.size, _SIGN_BLOCK_BITS)
    table = np.array([a[-1]])
    for j in range(low):
        table = np.concatenate([table + free[j], table - free[j]])
    high_cols = free[low:]
    high = high_cols.size
    base = high_cols.sum() if high else 0.0
    signs = np.ones(high)
    sums = [float(np.abs(table + base).sum())]
    for i in range(1, 1 << high):
        j = (i & -i).bit_length() - 1
        signs[j] = -signs[j]
        base += 2.0 * signs[j] * high_cols[j]
        sums.append(float(np.abs(table + base).sum()))
    return math.fsum(sums) / float(1 << (n - 1))


def rademacher_average(c: Coefficients, cap: int = RADEMACHER_CAP) -> AverageResult:
    """Exact average of |sum eta_n a_n| over all 2^N sign patterns."""
    a = _values(c)
    if a.size > cap:
        raise CapacityError(
            f"Rademacher enumeration needs 2^{a.size - 1} patterns but the cap is "
            f"N = {cap}; raise `cap` explicitly to proceed"
        )
    return AverageResult(value=_mean_abs_signs(a), kind="rademacher",
                         method="enumeration", error_bound=0.0)


def khinchin_ratio(c: Coefficients, r) -> float:
    """l_r norm over Rademacher average; at most 2^(1/r) for any scalars.

    r must lie in [2, oo]; the ceiling is attained by (1, 1).
    """
    r = r if isinstance(r, Exponent) else Exponent(float(r))
    if not r.is_inf and r.value < 2.0:
        raise ValueError(f"khinchin_ratio requires r >= 2, got {r}")
    numerator = lr_norm(c, r)
    if numerator == 0.0:
        raise UndefinedRatioError("ratio undefined for the zero vector")
    return numerator / rademacher_average(c).value


def _mean_abs_roots(a: np.ndarray, m: int, budget: int) -> float:
    """Exact mean of |sum_n a_n e^(i beta_n)| over beta in Omega_M^N.

    The last angle is pinned to 0 (exact by rotation invariance), digits
    of the remaining coordinates run in mixed-radix order against a
    precomputed table of unit-root partial sums.
    """
    n = a.size
    if n == 1:
        return float(abs(a[0]))
    terms = m ** (n - 1)
    if terms > budget:
        raise CapacityError(
            f"Omega_{m}^{n} averaging needs {terms} terms (after fixing the "
            f"global phase) but the budget is {budget}"
        )
    roots = RootsOfUnityGrid(m).points
    free = a[:-1].astype(np.complex128)
    low = 1
    while low < free.size and m ** (low + 1) <= _ROOT_BLOCK_CAP:
        low += 1
    table = np.array([complex(a[-1])])
    for j in range(low):
        table = (table[:, None] + free[j] * roots[None, :]).ravel()
    high = free[low:]
    sums = []
    for h in range(m ** high.size):
        if high.size:
            idx, digits = h, []
            for _ in range(high.size):
                idx, d = divmod(idx, m)
                digits.append(d)
            offset = complex(high @ roots[digits])
        else:
            offset = 0.0
        sums.append(float(np.abs(table + offset).sum()))
    return math.fsum(sums) / float(terms)


def e_m_average(c: Coefficients, m: int,
                budget: int = DEFAULT_TERM_BUDGET) -> AverageResult:
    """Exact root-of-unity average; M = 2 is the Rademacher enumeration."""
    a = _values(c)
    if m < 2:
        raise ValueError(f"root-of-unity average needs M >= 2, got {m}")
    if m == 2:
        if (1 << (a.size - 1)) > budget:
            raise CapacityError(
                f"Omega_2^{a.size} averaging needs 2^{a.size - 1} terms, over budget {budget}"
            )
        value = _mean_abs_signs(a)
    else:
        value = _mean_abs_roots(a, m, budget)
    return AverageResult(value=value, kind="e_m", method="enumeration",
                         error_bound=0.0, m=int(m))


def rotation_invariance_check(c: Coefficients, m: int, shifts: Sequence[float],
                              budget: int = DEFAULT_TERM_BUDGET) -> bool:
    """Whether the T_M average is unchanged by per-coordinate Omega_M rotations.

    Shifts must themselves lie on Omega_M (within 1e-12 in angle); the two
    averages are compared to 1e-12 relative.
    """
    a = _values(c)
    shifts = np.asarray(shifts, dtype=np.float64)
    if shifts.shape != (a.size,):
        raise ValueError(f"expected {a.size} shifts, got shape {shifts.shape}")
    step = 2.0 * math.pi / m
    nearest = np.round(shifts / step) * step
    if np.max(np.abs(shifts - nearest)) > 1e-12:
        raise ValueError("shifts must be multiples of 2*pi/M (tolerance 1e-12)")
    before = e_m_average(a, m, budget=budget).value
    rotated = a.astype(np.complex128) * np.exp(1j * shifts)
    after = e_m_average(rotated, m, budget=budget).value
    return abs(after - before) <= 1e-12 * max(before, 1e-300)


def steinhaus_expectation(c: Coefficients, method: str = "quadrature",
                          q: int = 256, schedule: Optional[Sequence[int]] = None,
                          budget: int = DEFAULT_TERM_BUDGET) -> AverageResult:
    """Torus expectation of |sum a_n e^(i t_n)|.

    quadrature: product trapezoid rule with q nodes per angle (q even);
    the reported value is the Richardson extrapolation of the q and q/2
    levels, which restores fast convergence on the kinked integrand, and
    the error bound is the two-level difference |T(q) - T(q/2)|.

    e_m_limit: exact T_M averages along an increasing ``schedule`` of at
    least two M values; the value is taken at the largest M with error
    bound |E_last - E_prev|.
    """
    a = _values(c)
    if method == "quadrature":
        if a.size > QUADRATURE_DIM_CAP:
            raise CapacityError(
                f"quadrature supports N <= {QUADRATURE_DIM_CAP}, got N = {a.size}"
            )
        if q < 4 or q % 2:
            raise ValueError(f"quadrature needs an even node count >= 4, got {q}")
        coarse = _mean_abs_roots(a, q // 2, budget) if a.size > 1 else float(abs(a[0]))
        fine = _mean_abs_roots(a, q, budget) if a.size > 1 else float(abs(a[0]))
        value = (4.0 * fine - coarse) / 3.0
        return AverageResult(value=value, kind="steinhaus", method="quadrature",
                             error_bound=abs(fine - coarse))
    if method in ("e_m_limit", "e_m-limit"):
        if schedule is None or len(schedule) < 2:
            raise ValueError("e_m_limit needs an increasing schedule of >= 2 values of M")
        ms = [int(m) for m in schedule]
        if any(m2 <= m1 for m1, m2 in zip(ms, ms[1:])) or ms[0] < 2:
            raise ValueError(f"schedule must be strictly increasing with M >= 2, got {ms}")
        values = [e_m_average(a, m, budget=budget).value for m in ms]
        return AverageResult(value=values[-1], kind="steinhaus", method="e_m-limit",
                             error_bound=abs(values[-1] - values[-2]), m=ms[-1])
    raise ValueError(f"unknown method {method!r}; use 'quadrature' or 'e_m_limit'")


def blei_bound_check(c: Coefficients, m: int, r,
                     budget: int = DEFAULT_TERM_BUDGET) -> BleiBoundReport:
    """Probe the l_r-vs-T_M-average ratio against its certified ceiling.

    ceiling = 2^(1/r) at M = 2 (the Rademacher case, where it is sharp)
    and (4/pi)^(1/r) / R_M for M >= 3 (where sharpness is open and the
    gap to the best known lower bound is the interesting datum).
    """
    r = r if isinstance(r, Exponent) else Exponent(float(r))
    if not r.is_inf and r.value < 2.0:
        raise ValueError(f"blei_bound_check requires r >= 2, got {r}")
    a = _values(c)
    numerator = lr_norm(a, r)
    if numerator == 0.0:
        raise UndefinedRatioError("ratio undefined for the zero vector")
    average = e_m_average(a, m, budget=budget).value
    ratio = numerator / average
    if m == 2:
        ceiling = 2.0 ** r.reciprocal
    else:
        ceiling = (4.0 / math.pi) ** r.reciprocal / r_m(m)
    return BleiBoundReport(m=int(m), r=r, ratio=ratio, ceiling=ceiling,
                           witness=tuple(complex(z) for z in a),
                           violation=ratio > ceiling + 1e-9)
