"""Stochastic lower-bound search for the sharp-constant ratios.

Two families of objectives are climbed:

* mixed-norm over operator-norm ratios of K x N bilinear forms, probing
  the sharp constants 2^max(0, 1/a+1/b-1) (real) and their complex
  ceilings;
* l_r-norm over average ratios of coefficient vectors, probing the
  Khinchin-type ceilings (Rademacher, T_M, Steinhaus).

The climber is plain hill climbing: entry-wise Gaussian perturbations,
strict-improvement acceptance, a geometric scale decay of 0.95 per
rejected step with a bounded re-expansion on acceptance, and independent
restarts seeded ``seed + restart_index``.  Everything is deterministic
for a fixed config (unless a wall-clock budget cuts restarts short).

Complex form searches cannot evaluate the true operator norm, only the
certified interval from ``opnorm.complex_norm_bounds``.  The reported
``best_ratio`` divides by the interval's *upper* endpoint (pessimistic:
a valid lower bound on the constant, safe against the ceiling), while
``optimistic_ratio`` divides by the refined lower endpoint and may
exceed the ceiling by up to the interval width.

A completed run whose best_ratio exceeds its ceiling by more than 1e-9
would falsify the implementation (or the ceiling); the result is flagged
and serialized rather than raised.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import SerializationError
from .exponents import (Exponent, ExponentPair, TWO_OVER_SQRT_PI,
                        complex_constant_bounds, real_constant)
from .forms import BilinearForm, form_from_json, form_to_json, mixed_norm
from .jsonio import canonical_dumps, loads, require_field
from .khinchin import (CoefficientVector, e_m_average, lr_norm,
                       rademacher_average, steinhaus_expectation)
from .opnorm import complex_norm_bounds, r_m, real_sup_norm

__all__ = [
    "SearchConfig",
    "SearchResult",
    "maximize_ratio",
    "maximize_khinchin_ratio",
    "evaluate_witness",
    "checkpoint_save",
    "checkpoint_load",
]

CEILING_SLACK = 1e-9

_SCALE_DECAY = 0.95
_SCALE_REGROWTH_STEPS = 20  # bounded re-expansion on improvement


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 50
    steps: int = 2000
    scale: float = 0.5
    seed: int = 0
    dims: tuple = (2, 2)
    budget_seconds: Optional[float] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if not (self.scale > 0.0):
            raise ValueError("perturbation scale must be positive")
        k, n = self.dims
        if k < 1 or n < 1:
            raise ValueError(f"dims must be positive, got {self.dims}")
        object.__setattr__(self, "dims", (int(k), int(n)))


@dataclass(frozen=True)
class SearchResult:
    kind: str                    # "form_ratio" | "khinchin_ratio"
    params: dict                 # objective parameters (field/exponents/model/...)
    config: SearchConfig
    best_ratio: float
    witness: Union[BilinearForm, CoefficientVector]
    ceiling: float
    ceiling_provenance: str
    restarts_run: int
    improved_at: tuple           # ((restart, step), ...)
    optimistic_ratio: Optional[float] = None

    @property
    def falsification(self) -> bool:
        return self.best_ratio > self.ceiling + CEILING_SLACK


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------

def _exp_to_json(e: Exponent):
    return "inf" if e.is_inf else e.value


def _exp_from_json(v) -> Exponent:
    return Exponent.parse(v) if isinstance(v, str) else Exponent(float(v))


class _FormObjective:
    """mixed_norm / operator-norm ratio over K x N forms of one field."""

    def __init__(self, params: dict):
        self.field = params["field"]
        self.pair = ExponentPair(_exp_from_json(params["a"]), _exp_from_json(params["b"]))
        self.m = int(params.get("m") or 0)
        self.norm_budget = int(params.get("norm_budget", 10**8))

    def draw(self, rng: np.random.Generator, dims):
        k, n = dims
        x = rng.standard_normal((k, n))
        if self.field == "complex":
            x = x + 1j * rng.standard_normal((k, n))
        return x

    def perturb(self, rng, x, scale):
        d = rng.standard_normal(x.shape)
        if self.field == "complex":
            d = d + 1j * rng.standard_normal(x.shape)
        return x + scale * d

    def normalize(self, x):
        return x

    def ratio(self, x) -> Optional[float]:
        form = BilinearForm(self.field, x)
        numerator = mixed_norm(form, self.pair).value
        if self.field == "real":
            denominator = real_sup_norm(form)
        else:
            # pessimistic ratio: divide by the certified upper bound
            denominator = complex_norm_bounds(form, self.m, refine=False,
                                              budget=self.norm_budget).upper
        if denominator < 1e-12:
            return None
        return numerator / denominator

    def final_ratios(self, x):
        """(best_ratio, optimistic_ratio) at the climbed point."""
        form = BilinearForm(self.field, x)
        numerator = mixed_norm(form, self.pair).value
        if self.field == "real":
            return numerator / real_sup_norm(form), None
        bounds = complex_norm_bounds(form, self.m, refine=True, budget=self.norm_budget)
        return numerator / bounds.upper, numerator / bounds.lower

    def witness(self, x):
        return BilinearForm(self.field, x)

    def ceiling(self):
        if self.field == "real":
            report = real_constant(self.pair)
            return report.exact, f"sharp real ceiling: {report.provenance}"
        report = complex_constant_bounds(self.pair)
        text = (f"complex ceiling: {report.provenance}; best_ratio divides by the "
                f"certified norm upper bound (valid lower bound on the constant), "
                f"optimistic_ratio by the refined lower bound (may exceed the "
                f"ceiling by up to a factor 1/R_M = {1.0 / r_m(self.m)!r})")
        return report.upper, text


class _KhinchinObjective:
    """l_r norm / average ratio over coefficient vectors."""

    def __init__(self, params: dict):
        self.model = params["model"]
        self.r = _exp_from_json(params["r"])
        self.n = int(params["n"])
        self.m = int(params.get("m") or 0)
        self.q = int(params.get("q") or 0)
        self.budget = int(params.get("term_budget", 10**8))
        if self.model not in ("rademacher", "e_m", "steinhaus"):
            raise ValueError(f"unknown model {self.model!r}")
        self.field = "real" if self.model == "rademacher" else "complex"

    def draw(self, rng, dims):
        x = rng.standard_normal(self.n)
        if self.field == "complex":
            x = x + 1j * rng.standard_normal(self.n)
        return x

    def perturb(self, rng, x, scale):
        d = rng.standard_normal(self.n)
        if self.field == "complex":
            d = d + 1j * rng.standard_normal(self.n)
        return x + scale * d

    def normalize(self, x):
        norm = lr_norm(x, self.r)
        return x if norm == 0.0 else x / norm

    def _average(self, x) -> float:
        if self.model == "rademacher":
            return rademacher_average(x).value
        if self.model == "e_m":
            return e_m_average(x, self.m, budget=self.budget).value
        return steinhaus_expectation(x, method="quadrature", q=self.q,
                                     budget=self.budget).value

    def ratio(self, x) -> Optional[float]:
        numerator = lr_norm(x, self.r)
        if numerator == 0.0:
            return None
        average = self._average(x)
        if average < 1e-12 * numerator:
            return None
        return numerator / average

    def final_ratios(self, x):
        return self.ratio(x), None

    def witness(self, x):
        return CoefficientVector(self.field, x)

    def ceiling(self):
        inv_r = self.r.reciprocal
        if self.model == "rademacher":
            return 2.0 ** inv_r, "sharp Rademacher ceiling 2^(1/r)"
        if self.model == "e_m":
            if self.m == 2:
                return 2.0 ** inv_r, "sharp ceiling 2^(1/r) (M = 2 is the Rademacher case)"
            return ((4.0 / math.pi) ** inv_r / r_m(self.m),
                    "certified ceiling (4/pi)^(1/r) / R_M; sharpness open for M >= 3")
        if self.r.value == 2.0:
            return TWO_OVER_SQRT_PI, "sharp Steinhaus ceiling 2/sqrt(pi) at r = 2"
        if self.r.is_inf:
            return 1.0, "sharp Steinhaus ceiling 1 at r = oo"
        return ((4.0 / math.pi) ** inv_r,
                "exploratory: certified ceiling (4/pi)^(1/r); sharp value open on (2, oo)")


def _make_objective(kind: str, params: dict):
    if kind == "form_ratio":
        return _FormObjective(params)
    if kind == "khinchin_ratio":
        return _KhinchinObjective(params)
    raise ValueError(f"unknown search kind {kind!r}")


# ---------------------------------------------------------------------------
# the climber
# ---------------------------------------------------------------------------

def _run_restart(args):
    kind, params, cfg_dict, restart = args
    objective = _make_objective(kind, params)
    cfg = SearchConfig(**cfg_dict)
    rng = np.random.default_rng(cfg.seed + restart)
    x = objective.normalize(objective.draw(rng, cfg.dims))
    current = objective.ratio(x)
    redraws = 0
    while current is None and redraws < 100:
        x = objective.normalize(objective.draw(rng, cfg.dims))
        current = objective.ratio(x)
        redraws += 1
    if current is None:
        raise RuntimeError("could not draw a starting point with a nonzero denominator")
    scale = cfg.scale
    events = [(0, current)]
    for step in range(1, cfg.steps + 1):
        candidate = objective.normalize(objective.perturb(rng, x, scale))
        value = objective.ratio(candidate)
        if value is not None and value > current:
            x, current = candidate, value
            scale = min(cfg.scale, scale / _SCALE_DECAY ** _SCALE_REGROWTH_STEPS)
            events.append((step, current))
        else:
            scale *= _SCALE_DECAY
    # scale invariance spot check: the objective must not depend on |x|
    doubled = objective.ratio(2.0 * x)
    if doubled is not None and abs(doubled - current) > 1e-12 * max(current, 1.0):
        raise RuntimeError(
            f"objective is not scale invariant: ratio(x)={current!r} ratio(2x)={doubled!r}"
        )
    return x, events


def _search(kind: str, params: dict, cfg: SearchConfig, workers: int = 1,
            falsification_path=None) -> SearchResult:
    objective = _make_objective(kind, params)
    ceiling, provenance = objective.ceiling()
    cfg_dict = {"restarts": cfg.restarts, "steps": cfg.steps, "scale": cfg.scale,
                "seed": cfg.seed, "dims": cfg.dims, "budget_seconds": cfg.budget_seconds}
    jobs = [(kind, params, cfg_dict, i) for i in range(cfg.restarts)]
    if workers > 1:
        # wall-clock budgets are honored only by the serial path
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_restart, jobs))
    else:
        outcomes = []
        deadline = (time.monotonic() + cfg.budget_seconds
                    if cfg.budget_seconds is not None else None)
        for job in jobs:
            outcomes.append(_run_restart(job))
            if deadline is not None and time.monotonic() > deadline:
                break
    # deterministic merge in restart order; within a restart values are
    # monotone, so a restart that ever improves the global best ends holding it
    best_x = None
    best_value = -math.inf
    improved_at = []
    for restart, (x, events) in enumerate(outcomes):
        improved_here = False
        for step, value in events:
            if value > best_value:
                best_value = value
                improved_at.append((restart, step))
                improved_here = True
        if improved_here:
            best_x = x
    best_ratio, optimistic = objective.final_ratios(best_x)
    result = SearchResult(
        kind=kind, params=dict(params), config=cfg,
        best_ratio=best_ratio, witness=objective.witness(best_x),
        ceiling=ceiling, ceiling_provenance=provenance,
        restarts_run=len(outcomes), improved_at=tuple(improved_at),
        optimistic_ratio=optimistic,
    )
    if result.falsification:
        path = falsification_path or Path.cwd() / (
            f"litt43-falsification-{kind}-seed{cfg.seed}.json")
        checkpoint_save(result, path)
    return result


def maximize_ratio(field: str, pair: ExponentPair, cfg: SearchConfig,
                   m: int = 16, workers: int = 1,
                   falsification_path=None) -> SearchResult:
    """Climb the mixed-norm/operator-norm ratio over forms of cfg.dims.

    ``m`` selects the root-of-unity grid for complex norm certification
    and is ignored for real searches.
    """
    if field not in ("real", "complex"):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    params = {"field": field, "a": _exp_to_json(pair.a), "b": _exp_to_json(pair.b)}
    if field == "complex":
        params["m"] = int(m)
    return _search("form_ratio", params, cfg, workers=workers,
                   falsification_path=falsification_path)


def maximize_khinchin_ratio(model: str, r, n: int, cfg: SearchConfig,
                            m: Optional[int] = None, q: int = 64,
                            workers: int = 1,
                            falsification_path=None) -> SearchResult:
    """Climb the l_r/average ratio over N-coefficient vectors.

    model: "rademacher" (real vectors), "e_m" (complex, needs ``m``), or
    "steinhaus" (complex, quadrature with ``q`` nodes per angle).
    Vectors are renormalized to unit l_r between steps.
    """
    r = r if isinstance(r, Exponent) else Exponent(float(r))
    params = {"model": model, "r": _exp_to_json(r), "n": int(n)}
    if model == "e_m":
        if not m:
            raise ValueError("model 'e_m' requires m")
        params["m"] = int(m)
    elif model == "steinhaus":
        params["q"] = int(q)
    return _search("khinchin_ratio", params, cfg, workers=workers,
                   falsification_path=falsification_path)


def evaluate_witness(result: SearchResult) -> float:
    """Recompute best_ratio from the serialized witness through the public API."""
    objective = _make_objective(result.kind, result.params)
    if isinstance(result.witness, BilinearForm):
        x = result.witness.entries
    else:
        x = result.witness.values
    value, _ = objective.final_ratios(x)
    return value


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

_CHECKPOINT_VERSION = 1


def _witness_to_json(witness):
    if isinstance(witness, BilinearForm):
        return "form", form_to_json(witness)
    doc = form_to_json(BilinearForm(witness.field, witness.values[None, :]))
    return "coefficients", doc


def _witness_from_json(kind: str, doc: dict):
    form = form_from_json(doc)
    if kind == "form":
        return form
    if kind == "coefficients":
        if form.rows != 1:
            raise SerializationError("field 'witness' of a coefficient vector must have rows = 1")
        return CoefficientVector(form.field, form.entries[0])
    raise SerializationError(f"field 'witness_kind' must be 'form' or 'coefficients', got {kind!r}")


def checkpoint_save(result: SearchResult, path) -> None:
    """Serialize a SearchResult as canonical JSON, atomically (write + rename)."""
    witness_kind, witness_doc = _witness_to_json(result.witness)
    cfg = result.config
    doc = {
        "version": _CHECKPOINT_VERSION,
        "kind": result.kind,
        "params": result.params,
        "config": {
            "restarts": cfg.restarts, "steps": cfg.steps, "scale": cfg.scale,
            "seed": cfg.seed, "dims": list(cfg.dims),
            "budget_seconds": cfg.budget_seconds,
        },
        "best_ratio": result.best_ratio,
        "optimistic_ratio": result.optimistic_ratio,
        "ceiling": result.ceiling,
        "ceiling_provenance": result.ceiling_provenance,
        "restarts_run": result.restarts_run,
        "improved_at": [list(ev) for ev in result.improved_at],
        "witness_kind": witness_kind,
        "witness": witness_doc,
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(canonical_dumps(doc) + "\n", encoding="ascii")
    os.replace(tmp, path)


def checkpoint_load(path) -> SearchResult:
    doc = loads(Path(path).read_text(encoding="ascii"))
    if not isinstance(doc, dict):
        raise SerializationError("checkpoint must be a JSON object")
    version = require_field(doc, "version", int)
    if version != _CHECKPOINT_VERSION:
        raise SerializationError(f"field 'version' must be {_CHECKPOINT_VERSION}, got {version}")
    cfg_doc = require_field(doc, "config", dict)
    dims = require_field(cfg_doc, "dims", list)
    if len(dims) != 2:
        raise SerializationError("field 'config.dims' must have two entries")
    budget = cfg_doc.get("budget_seconds")
    if budget is not None and (isinstance(budget, bool) or not isinstance(budget, (int, float))):
        raise SerializationError("field 'config.budget_seconds' must be a number or null")
    cfg = SearchConfig(
        restarts=require_field(cfg_doc, "restarts", int),
        steps=require_field(cfg_doc, "steps", int),
        scale=require_field(cfg_doc, "scale", float),
        seed=require_field(cfg_doc, "seed", int),
        dims=(int(dims[0]), int(dims[1])),
        budget_seconds=None if budget is None else float(budget),
    )
    witness = _witness_from_json(require_field(doc, "witness_kind", str),
                                 require_field(doc, "witness", dict))
    improved = require_field(doc, "improved_at", list)
    events = []
    for i, ev in enumerate(improved):
        if not isinstance(ev, list) or len(ev) != 2:
            raise SerializationError(f"field 'improved_at'[{i}] must be a [restart, step] pair")
        events.append((int(ev[0]), int(ev[1])))
    optimistic = doc.get("optimistic_ratio")
    if optimistic is not None and (isinstance(optimistic, bool)
                                   or not isinstance(optimistic, (int, float))):
        raise SerializationError("field 'optimistic_ratio' must be a number or null")
    return SearchResult(
        kind=require_field(doc, "kind", str),
        params=require_field(doc, "params", dict),
        config=cfg,
        best_ratio=require_field(doc, "best_ratio", float),
        witness=witness,
        ceiling=require_field(doc, "ceiling", float),
        ceiling_provenance=require_field(doc, "ceiling_provenance", str),
        restarts_run=require_field(doc, "restarts_run", int),
        improved_at=tuple(events),
        optimistic_ratio=None if optimistic is None else float(optimistic),
    )
