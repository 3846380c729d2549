import numpy as np
import pytest

from activegear import BeesConfig, SearchSpace, default_search_space, three_point, tune_controller
from activegear.scenarios import tuned_configuration
from activegear.tuning import (DECISION_VARIABLES, baseline_vector, decode, evaluate_configuration,
                               make_fitness)

TINY = BeesConfig(n_scouts=6, n_selected=2, n_elite=1, recruits_elite=2, recruits_other=1,
                  max_iterations=3, rng_seed=4)


def _short():
    return three_point(duration=0.3)


def test_default_space_contains_references(a320):
    space = default_search_space(a320)
    assert space.names == DECISION_VARIABLES
    lo, hi = space.bounds()
    base = baseline_vector(a320)
    assert np.all(lo <= base) and np.all(base <= hi)
    assert np.all(lo > 0)


def test_decode_roundtrip_of_reference_configuration(a320):
    ref = tuned_configuration(1)
    c = ref.controller
    x = [c.nose_gains.kp, c.nose_gains.ki, c.nose_gains.kd, c.main_gains.kp, c.main_gains.ki,
         c.main_gains.kd, c.nose_hydraulic.p_high, c.nose_hydraulic.p_low, ref.suspension.nose_cs,
         ref.suspension.nose_ks, c.main_hydraulic.p_high, c.main_hydraulic.p_low,
         ref.suspension.main_cs, ref.suspension.main_ks]
    assert decode(x, label="ba1") == ref
    with pytest.raises(ValueError):
        decode(x[:5])


def test_fitness_inf_on_invalid_vector(a320):
    f = make_fitness(_short(), 1, a320)
    x = baseline_vector(a320)
    x[7] = x[6] + 1  # p_low above p_high
    assert f(x) == float("inf")


def test_collapsed_space_returns_the_point(a320):
    x = baseline_vector(a320)
    space = SearchSpace(DECISION_VARIABLES, tuple(x), tuple(x))
    res = tune_controller(_short(), 1, space=space, cfg=TINY, params=a320)
    np.testing.assert_array_equal(res.optimization.best.position, x)
    assert res.fitness == res.baseline_fitness


def test_tuning_never_worse_than_baseline(a320):
    res = tune_controller(_short(), 2, cfg=TINY, params=a320)
    assert res.fitness <= res.baseline_fitness
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    again = evaluate_configuration(res.configuration, _short(), 2, a320)
    assert again == pytest.approx(res.fitness, rel=1e-12)


def test_rejects_bad_objective(a320):
    with pytest.raises(ValueError):
        tune_controller(_short(), 3, cfg=TINY, params=a320)
