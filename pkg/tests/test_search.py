import math

import numpy as np
import pytest

from litt43.errors import SerializationError
from litt43.exponents import ExponentPair
from litt43.forms import BilinearForm, mixed_norm
from litt43.khinchin import CoefficientVector
from litt43.opnorm import real_sup_norm
from litt43.search import (SearchConfig, SearchResult, checkpoint_load,
                           checkpoint_save, evaluate_witness,
                           maximize_khinchin_ratio, maximize_ratio)

SQRT2 = math.sqrt(2.0)


def small_cfg(seed=1, restarts=6, steps=400):
    return SearchConfig(restarts=restarts, steps=steps, scale=0.5, seed=seed,
                        dims=(2, 2))


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)
        with pytest.raises(ValueError):
            SearchConfig(steps=-1)
        with pytest.raises(ValueError):
            SearchConfig(scale=0.0)
        with pytest.raises(ValueError):
            SearchConfig(dims=(0, 2))


class TestRealFormSearch:
    def test_recovers_sharp_ratio_at_littlewood(self):
        cfg = SearchConfig(restarts=50, steps=2000, scale=0.5, seed=1, dims=(2, 2))
        result = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg)
        assert result.best_ratio >= SQRT2 - 1e-9
        assert result.best_ratio <= result.ceiling + 1e-9
        assert not result.falsification

    def test_witness_is_signed_permutation_of_a0(self):
        cfg = SearchConfig(restarts=50, steps=2000, scale=0.5, seed=1, dims=(2, 2))
        result = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg)
        w = result.witness.entries
        scaled = np.abs(w) / np.abs(w).max()
        # all four magnitudes equal, and the sign pattern is A0-like:
        # normalized |det| = 2 characterizes [[1,1],[1,-1]] up to signed permutation
        assert np.allclose(scaled, 1.0, atol=1e-4)
        assert abs(np.linalg.det(w / np.abs(w).max())) == pytest.approx(2.0, abs=1e-3)

    def test_rii_ceiling_is_one_and_attained_by_single_entry(self):
        cfg = SearchConfig(restarts=8, steps=400, scale=0.5, seed=3, dims=(4, 4))
        result = maximize_ratio("real", ExponentPair.of(3, 3), cfg)
        assert result.ceiling == 1.0
        assert result.best_ratio <= 1.0 + 1e-9
        single = BilinearForm("real", [[1.0]])
        attained = mixed_norm(single, ExponentPair.of(3, 3)).value / real_sup_norm(single)
        assert attained == 1.0

    def test_determinism(self):
        cfg = small_cfg(seed=11)
        r1 = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg)
        r2 = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg)
        assert r1.best_ratio == r2.best_ratio
        assert r1.improved_at == r2.improved_at
        assert np.array_equal(r1.witness.entries, r2.witness.entries)

    def test_seed_changes_trajectory(self):
        # restart seeds are seed + index, so use disjoint seed ranges
        r1 = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), small_cfg(seed=1))
        r2 = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), small_cfg(seed=1000))
        assert not np.array_equal(r1.witness.entries, r2.witness.entries)

    def test_witness_validity(self):
        result = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), small_cfg())
        replay = evaluate_witness(result)
        assert replay == pytest.approx(result.best_ratio, rel=1e-12)

    def test_inadmissible_pair_rejected(self):
        from litt43.errors import InadmissibleExponentsError
        with pytest.raises(InadmissibleExponentsError):
            maximize_ratio("real", ExponentPair.of(1, 1), small_cfg())

    def test_parallel_restarts_match_serial(self):
        cfg = small_cfg(seed=5, restarts=4, steps=150)
        serial = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg, workers=1)
        parallel = maximize_ratio("real", ExponentPair.of("4/3", "4/3"), cfg, workers=2)
        assert serial.best_ratio == parallel.best_ratio
        assert serial.improved_at == parallel.improved_at
        assert np.array_equal(serial.witness.entries, parallel.witness.entries)


class TestComplexFormSearch:
    def test_sharp_point_one_two(self):
        cfg = SearchConfig(restarts=6, steps=250, scale=0.5, seed=7, dims=(3, 3))
        result = maximize_ratio("complex", ExponentPair.of(1, 2), cfg, m=16)
        assert result.ceiling == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-15)
        assert result.best_ratio <= result.ceiling + 1e-6
        assert result.optimistic_ratio is not None
        assert result.best_ratio <= result.optimistic_ratio + 1e-15
        assert "upper bound" in result.ceiling_provenance

    def test_witness_validity_complex(self):
        cfg = SearchConfig(restarts=3, steps=120, scale=0.5, seed=9, dims=(2, 2))
        result = maximize_ratio("complex", ExponentPair.of(1, 2), cfg, m=8)
        assert evaluate_witness(result) == pytest.approx(result.best_ratio, rel=1e-12)


class TestKhinchinSearch:
    def test_rademacher_sharp_r2(self):
        cfg = SearchConfig(restarts=10, steps=5000, scale=0.5, seed=1, dims=(1, 8))
        result = maximize_khinchin_ratio("rademacher", 2.0, 8, cfg)
        assert result.best_ratio == pytest.approx(SQRT2, abs=1e-9)
        assert result.best_ratio <= SQRT2 + 1e-12
        w = np.abs(result.witness.values)
        top2 = np.sort(w)[::-1][:2]
        assert top2[1] == pytest.approx(top2[0], rel=1e-3)

    def test_rademacher_r_inf_is_one(self):
        cfg = SearchConfig(restarts=6, steps=400, scale=0.5, seed=2, dims=(1, 8))
        result = maximize_khinchin_ratio("rademacher", math.inf, 8, cfg)
        assert result.best_ratio == pytest.approx(1.0, abs=1e-12)
        assert result.ceiling == 1.0

    def test_e_m_search_ceiling_safe(self):
        cfg = SearchConfig(restarts=4, steps=200, scale=0.5, seed=3, dims=(1, 4))
        result = maximize_khinchin_ratio("e_m", 2.0, 4, cfg, m=8)
        assert result.best_ratio <= result.ceiling + 1e-9
        assert not result.falsification

    def test_steinhaus_search_small(self):
        cfg = SearchConfig(restarts=4, steps=300, scale=0.5, seed=4, dims=(1, 2))
        result = maximize_khinchin_ratio("steinhaus", 2.0, 2, cfg, q=64)
        assert result.best_ratio <= 2.0 / math.sqrt(math.pi) + 1e-6
        assert result.best_ratio >= math.pi * SQRT2 / 4.0 - 1e-3
        assert isinstance(result.witness, CoefficientVector)

    def test_exploratory_provenance_for_open_r(self):
        cfg = SearchConfig(restarts=2, steps=100, scale=0.5, seed=5, dims=(1, 3))
        result = maximize_khinchin_ratio("steinhaus", 3.0, 3, cfg, q=32)
        assert "exploratory" in result.ceiling_provenance
        assert result.best_ratio <= result.ceiling + 1e-6

    def test_em_requires_m(self):
        with pytest.raises(ValueError):
            maximize_khinchin_ratio("e_m", 2.0, 4, small_cfg())


class TestCheckpoints:
    def _result(self, seed=13):
        return maximize_ratio("real", ExponentPair.of("4/3", "4/3"),
                              small_cfg(seed=seed, restarts=3, steps=150))

    def test_roundtrip_identity(self, tmp_path):
        result = self._result()
        path = tmp_path / "c.json"
        checkpoint_save(result, path)
        loaded = checkpoint_load(path)
        assert loaded.kind == result.kind
        assert loaded.params == result.params
        assert loaded.config == result.config
        assert loaded.best_ratio == result.best_ratio
        assert loaded.ceiling == result.ceiling
        assert loaded.ceiling_provenance == result.ceiling_provenance
        assert loaded.restarts_run == result.restarts_run
        assert loaded.improved_at == result.improved_at
        assert np.array_equal(loaded.witness.entries, result.witness.entries)

    def test_coefficient_witness_roundtrip(self, tmp_path):
        cfg = SearchConfig(restarts=2, steps=100, scale=0.5, seed=2, dims=(1, 3))
        result = maximize_khinchin_ratio("steinhaus", 2.0, 3, cfg, q=32)
        path = tmp_path / "c.json"
        checkpoint_save(result, path)
        loaded = checkpoint_load(path)
        assert isinstance(loaded.witness, CoefficientVector)
        assert np.array_equal(loaded.witness.values, result.witness.values)
        assert evaluate_witness(loaded) == pytest.approx(loaded.best_ratio, rel=1e-12)

    def test_two_saves_byte_identical(self, tmp_path):
        result = self._result()
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        checkpoint_save(result, p1)
        checkpoint_save(result, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_file_is_a_parse_error(self, tmp_path):
        result = self._result()
        path = tmp_path / "c.json"
        checkpoint_save(result, path)
        path.write_text(path.read_text()[: len(path.read_text()) // 2])
        with pytest.raises(SerializationError):
            checkpoint_load(path)

    def test_missing_field_named(self, tmp_path):
        result = self._result()
        path = tmp_path / "c.json"
        checkpoint_save(result, path)
        import json
        doc = json.loads(path.read_text())
        del doc["best_ratio"]
        path.write_text(json.dumps(doc))
        with pytest.raises(SerializationError, match="best_ratio"):
            checkpoint_load(path)

    def test_wrong_version_rejected(self, tmp_path):
        result = self._result()
        path = tmp_path / "c.json"
        checkpoint_save(result, path)
        import json
        doc = json.loads(path.read_text())
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(SerializationError, match="version"):
            checkpoint_load(path)

    def test_falsification_flag_is_a_property(self):
        result = self._result()
        assert not result.falsification
        tampered = SearchResult(
            kind=result.kind, params=result.params, config=result.config,
            best_ratio=result.ceiling + 1.0, witness=result.witness,
            ceiling=result.ceiling, ceiling_provenance=result.ceiling_provenance,
            restarts_run=result.restarts_run, improved_at=result.improved_at)
        assert tampered.falsification
