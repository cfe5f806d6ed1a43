"""Finite bilinear forms as matrices, and mixed l_b(l_a) norms.

A form on c0 x c0 is truncated to its K x N coefficient matrix
``entries[k, j] = A(e_k, e_j)``; rows index the *first* argument
everywhere in this package.  The mixed norm takes the l_a norm along
each row (over j) and then the l_b norm of the row values (over k),
with an infinite exponent meaning the supremum at that level.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SerializationError
from .exponents import Exponent, ExponentPair
from .jsonio import canonical_dumps, loads, require_field

__all__ = [
    "BilinearForm",
    "MixedNormValue",
    "mixed_norm",
    "transpose",
    "witness_a0",
    "random_form",
    "form_to_json",
    "form_from_json",
    "save_form",
    "load_form",
]

# Above this entry count, power sums accumulate in extended precision
# (x87 long double on the platforms we target).
_COMPENSATED_SUM_THRESHOLD = 10_000


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Immutable K x N matrix of a bilinear form, tagged with its scalar field."""

    field: str  # "real" | "complex"
    entries: np.ndarray

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        dtype = np.float64 if self.field == "real" else np.complex128
        arr = np.array(self.entries, dtype=dtype)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"entries must be a K x N matrix with K, N >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64) if self.field == "complex" else arr)):
            raise ValueError("entries must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def is_complex(self) -> bool:
        return self.field == "complex"


@dataclass(frozen=True)
class MixedNormValue:
    value: float
    pair: ExponentPair

    def __float__(self) -> float:
        return self.value


def _lp_rows(mags: np.ndarray, a: Exponent) -> np.ndarray:
    """l_a norm of each row of a nonnegative matrix (sup for a = oo)."""
    if a.is_inf:
        return mags.max(axis=1)
    if a.value == 1.0:
        return mags.sum(axis=1)
    return np.power(np.power(mags, a.value).sum(axis=1), 1.0 / a.value)


def _lp_vec(vals: np.ndarray, b: Exponent) -> float:
    if b.is_inf:
        return float(vals.max())
    if b.value == 1.0:
        return float(vals.sum())
    return float(np.power(np.power(vals, b.value).sum(), 1.0 / b.value))


def mixed_norm(A: BilinearForm, pair: ExponentPair) -> MixedNormValue:
    """(sum_k (sum_j |A_kj|^a)^(b/a))^(1/b), with sup at any infinite level.

    Entries are scaled by the largest magnitude before powering, which keeps
    intermediate powers in range for any exponent and makes the norm exactly
    homogeneous up to rounding.
    """
    mags = np.abs(A.entries)
    top = float(mags.max())
    if top == 0.0:
        return MixedNormValue(0.0, pair)
    scaled = mags / top
    if scaled.size > _COMPENSATED_SUM_THRESHOLD:
        scaled = scaled.astype(np.longdouble)
    value = top * float(_lp_vec(_lp_rows(scaled, pair.a), pair.b))
    return MixedNormValue(value, pair)


def transpose(A: BilinearForm) -> BilinearForm:
    """Swap the two arguments: entry'[j][k] = entry[k][j]."""
    return BilinearForm(A.field, A.entries.T)


def witness_a0(field: str = "real") -> BilinearForm:
    """The extremal 2x2 form [[1, 1], [1, -1]] attaining the sharp real constant."""
    return BilinearForm(field, [[1.0, 1.0], [1.0, -1.0]])


_T4 = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def random_form(field: str, rows: int, cols: int, distribution: str = "gaussian",
                seed: int = 0) -> BilinearForm:
    """Seeded random K x N form.

    distributions:
      * ``gaussian``    - standard normal entries (independent re/im parts
                          in the complex case);
      * ``sign``        - entries in {-1, +1}, or in T_4 = {1, i, -1, -i};
      * ``sparse-sign`` - sign entries zeroed independently with probability
                          2/3 (at least one entry is forced nonzero).
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got {rows} x {cols}")
    if field not in ("real", "complex"):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    rng = np.random.default_rng(seed)
    shape = (rows, cols)
    if distribution == "gaussian":
        entries = rng.standard_normal(shape)
        if field == "complex":
            entries = entries + 1j * rng.standard_normal(shape)
    elif distribution in ("sign", "sparse-sign"):
        if field == "real":
            entries = rng.choice([-1.0, 1.0], size=shape)
        else:
            entries = rng.choice(_T4, size=shape)
        if distribution == "sparse-sign":
            mask = rng.random(shape) < 2.0 / 3.0
            if mask.all():
                mask.flat[int(rng.integers(mask.size))] = False
            entries = np.where(mask, 0.0, entries)
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    return BilinearForm(field, entries)


# ---------------------------------------------------------------------------
# JSON interchange
#
# {"field": "real"|"complex", "rows": K, "cols": N, "entries": [...]} with
# entries row-major: plain numbers in real mode, [re, im] pairs in complex
# mode (imaginary parts mandatory there, forbidden for real forms).
# ---------------------------------------------------------------------------

def form_to_json(A: BilinearForm) -> dict:
    if A.is_complex:
        entries = [[float(z.real), float(z.imag)] for z in A.entries.ravel()]
    else:
        entries = [float(x) for x in A.entries.ravel()]
    return {"field": A.field, "rows": A.rows, "cols": A.cols, "entries": entries}


def form_from_json(doc: dict) -> BilinearForm:
    if not isinstance(doc, dict):
        raise SerializationError("matrix document must be a JSON object")
    field = require_field(doc, "field", str)
    if field not in ("real", "complex"):
        raise SerializationError(f"field 'field' must be 'real' or 'complex', got {field!r}")
    rows = require_field(doc, "rows", int)
    cols = require_field(doc, "cols", int)
    entries = require_field(doc, "entries", list)
    if rows < 1 or cols < 1:
        raise SerializationError(f"fields 'rows'/'cols' must be >= 1, got {rows} x {cols}")
    if len(entries) != rows * cols:
        raise SerializationError(
            f"field 'entries' has {len(entries)} items, expected rows*cols = {rows * cols}"
        )
    if field == "real":
        flat = []
        for i, item in enumerate(entries):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise SerializationError(
                    f"field 'entries'[{i}] must be a plain number in real mode"
                )
            flat.append(float(item))
        arr = np.array(flat, dtype=np.float64).reshape(rows, cols)
    else:
        flat = []
        for i, item in enumerate(entries):
            if (not isinstance(item, list) or len(item) != 2
                    or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in item)):
                raise SerializationError(
                    f"field 'entries'[{i}] must be an [re, im] pair in complex mode"
                )
            flat.append(complex(item[0], item[1]))
        arr = np.array(flat, dtype=np.complex128).reshape(rows, cols)
    if not np.all(np.isfinite(arr.view(np.float64) if field == "complex" else arr)):
        raise SerializationError("field 'entries' contains non-finite values")
    return BilinearForm(field, arr)


def save_form(A: BilinearForm, path) -> None:
    Path(path).write_text(canonical_dumps(form_to_json(A)) + "\n", encoding="ascii")


def load_form(path) -> BilinearForm:
    return form_from_json(loads(Path(path).read_text(encoding="ascii")))
