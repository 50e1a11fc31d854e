import pytest
from allennlp.common import Params
from allennlp.common.checks import ConfigurationError
from allennlp.common.testing import AllenNlpTestCase
from numpy.testing import assert_allclose

from src.hermqv.checks import DomainError
from src.hermqv.specs import (DEPENDENT, INDEPENDENT, INDEPENDENT_DRIVERS, KERNEL_GRID, SUBORDINATED,
                              FixedSchedule, PairSpec, PowerSchedule, ScaleSchedule,
                              TabulatedSchedule, constraint_line, default_coupling, load_json,
                              save_json)


class TestPairSpec:
    def test_default_couplings(self):
        assert PairSpec(1, 0.8, 0.8).coupling == KERNEL_GRID
        assert PairSpec(1, 0.8, 0.8, INDEPENDENT).coupling == INDEPENDENT_DRIVERS
        assert PairSpec(2, 0.9, constraint_line(2, 0.9)).coupling == SUBORDINATED
        assert PairSpec(2, 0.9, 0.6).coupling is None
        assert default_coupling(3, 0.8, 0.7, INDEPENDENT) == INDEPENDENT_DRIVERS

    def test_constraint_line(self):
        assert_allclose(constraint_line(1, 0.85), 0.7)
        assert_allclose(constraint_line(2, 0.9), 0.85)

    def test_invalid_combinations(self):
        with pytest.raises(ConfigurationError):
            PairSpec(1, 0.85, 0.6, coupling=SUBORDINATED)
        with pytest.raises(ConfigurationError):
            PairSpec(1, 0.85, 0.7, INDEPENDENT, coupling=SUBORDINATED)
        with pytest.raises(ConfigurationError):
            PairSpec(2, 0.9, 0.85, coupling=KERNEL_GRID)
        with pytest.raises(ConfigurationError):
            PairSpec(1, 0.8, 0.8, DEPENDENT, coupling=INDEPENDENT_DRIVERS)
        with pytest.raises(ConfigurationError):
            PairSpec(1, 0.8, 0.8, "correlated")
        with pytest.raises(ConfigurationError):
            PairSpec(1, 0.8, 0.8, coupling="telepathic")

    def test_domain(self):
        with pytest.raises(DomainError):
            PairSpec(1, 1.2, 0.7)
        with pytest.raises(DomainError):
            PairSpec(0, 0.8, 0.7)

    def test_from_params(self):
        spec = PairSpec.from_params(Params({"q": 1, "H1": 0.85, "H2": 0.7, "coupling": "subordinated"}))
        assert spec == PairSpec(1, 0.85, 0.7, DEPENDENT, SUBORDINATED)
        assert spec.dependent
        assert hash(spec) == hash(PairSpec(1, 0.85, 0.7, coupling=SUBORDINATED))
        with pytest.raises(ConfigurationError):
            PairSpec.from_params(Params({"q": 1, "H1": 0.85, "H2": 0.7, "extra": 1}))

    def test_with_indices(self):
        spec = PairSpec(1, 0.85, 0.7, coupling=SUBORDINATED)
        moved = spec.with_indices(0.8, 0.8)
        assert moved.coupling == KERNEL_GRID
        assert (moved.H1, moved.H2) == (0.8, 0.8)


class TestSchedules:
    def test_fixed(self):
        schedule = FixedSchedule(c=0.5)
        assert schedule.gamma(100) == 0.5
        assert schedule.exponent == 0.0

    def test_power(self):
        schedule = PowerSchedule(rho=-1.0, c=2.0)
        assert_allclose(schedule.gamma(8), 0.25)
        assert schedule.exponent == -1.0

    def test_tabulated(self):
        schedule = TabulatedSchedule({"4": 0.1, "8": 0.2})
        assert schedule.gamma(8) == 0.2
        assert schedule.exponent is None
        with pytest.raises(ConfigurationError):
            schedule.gamma(16)

    def test_registry(self):
        assert isinstance(ScaleSchedule.from_params(Params({})), FixedSchedule)
        schedule = ScaleSchedule.from_params(Params({"type": "power", "rho": 2.0}))
        assert schedule.to_dict() == {"type": "power", "c": 1.0, "rho": 2.0}
        rebuilt = ScaleSchedule.from_params(Params(schedule.to_dict()))
        assert rebuilt.gamma(3) == schedule.gamma(3)

    def test_domain(self):
        with pytest.raises(DomainError):
            FixedSchedule(c=0.0)
        with pytest.raises(DomainError):
            PowerSchedule(rho=float("inf"))
        with pytest.raises(DomainError):
            FixedSchedule().gamma(0)


class TestJsonFiles(AllenNlpTestCase):
    def test_save_then_load_is_sorted_and_indented(self):
        path = self.TEST_DIR / "payload.json"
        save_json({"b": 1, "a": [1, 2]}, str(path))
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert '\n  "a"' in text
        assert load_json(str(path)) == {"a": [1, 2], "b": 1}
