import numpy as np
import pytest

from medoe.boosts import BoostConfig, compute_boosts, constant_boosts

CHAINBALL = BoostConfig(
    temperature_base=1.0,
    entropy_base=1.6e-6,
    clip_base=2.5e-4,
    kl_base=1.3e-4,
    temperature_boost=3.0,
    entropy_boost=40.0,
    clip_boost=400.0,
    kl_boost=40.0,
)


def test_non_expert_relaxes_to_exact_values():
    c = compute_boosts(np.array([0.0]), CHAINBALL)
    assert c.clip[0] == 0.1
    assert c.entropy[0] == 6.4e-5
    assert c.temperature[0] == 3.0
    assert c.kl[0] == 1.3e-4


def test_expert_pins_to_exact_values():
    c = compute_boosts(np.array([1.0]), CHAINBALL)
    assert c.temperature[0] == 1.0
    assert c.entropy[0] == 1.6e-6
    assert c.clip[0] == 2.5e-4
    assert c.kl[0] == 5.2e-3


def test_monotone_in_expertise(g):
    d = np.sort(g.random(1000))
    c = compute_boosts(d, CHAINBALL)
    # exploration knobs shrink as expertise rises; the prior weight grows
    assert np.all(np.diff(c.temperature) <= 0)
    assert np.all(np.diff(c.entropy) <= 0)
    assert np.all(np.diff(c.clip) <= 0)
    assert np.all(np.diff(c.kl) >= 0)


def test_boosts_of_one_are_constant(g):
    cfg = constant_boosts(1.0, 1e-5, 0.1, 8e-3)
    d = g.random(64)
    c = compute_boosts(d, cfg)
    assert np.all(c.temperature == 1.0)
    assert np.all(c.entropy == 1e-5)
    assert np.all(c.clip == 0.1)
    assert np.all(c.kl == 8e-3)


def test_expertise_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        compute_boosts(np.array([-0.01]), CHAINBALL)
    with pytest.raises(ValueError):
        compute_boosts(np.array([1.01]), CHAINBALL)


def test_config_validation():
    with pytest.raises(ValueError):
        BoostConfig(temperature_base=0.0)
    with pytest.raises(ValueError):
        BoostConfig(clip_boost=0.0)
    with pytest.raises(ValueError):
        BoostConfig(entropy_base=-1e-9)
    # sub-unity multipliers are legal; the sensitivity sweep samples them
    BoostConfig(temperature_boost=0.5)


def test_scalar_and_array_expertise_agree():
    a = compute_boosts(0.25, CHAINBALL)
    b = compute_boosts(np.array([0.25]), CHAINBALL)
    assert a.temperature == b.temperature[0]
    assert a.kl == b.kl[0]
