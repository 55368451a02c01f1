import json

import pytest

from mlmagma import Params3, Vector3, identity, make_modulus, mul
from mlmagma.power import pow_iter
from mlmagma.prng import (PrngConfig, byte_stream, composite_period,
                          iter_outputs, prng_cycle_length, prng_init,
                          prng_step, seed_search, single_orbit_stream,
                          uniformity_stats)
from conftest import random_instance


def make_config(p=5, coefs=(1, 1, 1, 1, 2), seeds=((0, 1, 0), (0, 0, 1)),
                pattern=(0, 1), initial=(1, 2, 3), side="right"):
    m = make_modulus(p)
    ps = Params3(*coefs, m)
    return PrngConfig(ps, tuple(Vector3(*s, m) for s in seeds),
                      tuple(pattern), Vector3(*initial, m), side)


def test_init_and_step():
    cfg = make_config()
    state = prng_init(cfg)
    assert state.current == cfg.initial and state.pos == 0
    state2, out = prng_step(state, cfg)
    assert out == state2.current
    assert state2.pos == 1
    assert out == mul(cfg.initial, cfg.seeds[0], cfg.params)


def test_validation():
    m = make_modulus(5)
    ps = Params3(1, 1, 1, 1, 2, m)
    v = Vector3(1, 0, 0, m)
    with pytest.raises(ValueError):
        PrngConfig(ps, (v,), (0, 5), v)       # pattern index out of range
    with pytest.raises(ValueError):
        PrngConfig(ps, (), (0,), v)           # no seeds
    with pytest.raises(ValueError):
        PrngConfig(ps, (v,), (), v)           # empty pattern
    with pytest.raises(ValueError):
        PrngConfig(ps, (v,), (0,), v, side="up")
    other = Vector3(1, 0, 0, make_modulus(7))
    with pytest.raises(ValueError):
        PrngConfig(ps, (other,), (0,), v)


def test_json_round_trip():
    cfg = make_config(p=37, coefs=(19, 18, 1, 1, 2),
                      seeds=((0, 1, 5), (0, 2, 7)), initial=(3, 1, 4))
    text = cfg.to_json()
    back = PrngConfig.from_json(text)
    assert back == cfg
    assert back.to_json() == text
    doc = json.loads(text)
    assert set(doc) == {"p", "params", "seeds", "pattern", "initial"}


def test_json_strict_keys():
    doc = make_config().to_dict()
    doc["bogus"] = 1
    with pytest.raises(ValueError, match="unknown config keys"):
        PrngConfig.from_dict(doc)
    doc = make_config().to_dict()
    del doc["seeds"]
    with pytest.raises(ValueError, match="missing config keys"):
        PrngConfig.from_dict(doc)


def test_identity_seed_degenerate_cases():
    m = make_modulus(5)
    ps = Params3(1, 1, 1, 1, 2, m)
    e = identity(3, m)
    v = Vector3(1, 2, 3, m)
    res = prng_cycle_length(PrngConfig(ps, (e,), (0,), v))
    assert (res.tail, res.period, res.exceeded_cap) == (0, 1, False)
    res = prng_cycle_length(PrngConfig(ps, (e,), (0, 0, 0), v))
    assert res.period == 3
    # vector component never changes
    outs = list(iter_outputs(PrngConfig(ps, (e,), (0,), v), 10))
    assert all(o == v.components for o in outs)


def test_scalar_seed_stream():
    m = make_modulus(7)
    ps = Params3(1, 1, 1, 1, 1, m)
    s = Vector3(1, 0, 0, m)
    cfg = PrngConfig(ps, (s,), (0,), s)
    outs = [o[0] for o in iter_outputs(cfg, 6)]
    assert outs == [3, 0, 1, 3, 0, 1]  # 2^n - 1 mod 7 from n = 2


def test_cycle_length_frozen_example():
    # p=5, seeds (0,1,0)/(0,0,1), params (1,1,1,1,2), pattern [0,1]:
    # frozen against the exhaustive hash-set walk below
    cfg = make_config()
    seen = {}
    state = (cfg.initial.components, 0)
    idx = 0
    from mlmagma.magma import right_mul_stepper
    while state not in seen:
        seen[state] = idx
        vec, pos = state
        st = right_mul_stepper(cfg.seeds[cfg.pattern[pos]], cfg.params)
        state = (st(vec), (pos + 1) % len(cfg.pattern))
        idx += 1
    tail, period = seen[state], idx - seen[state]
    res = prng_cycle_length(cfg)
    assert (res.tail, res.period) == (tail, period)


def test_cycle_length_matches_exhaustive(rng):
    for _ in range(25):
        p = 5
        m = make_modulus(p)
        ps = Params3(*(rng.randrange(p) for _ in range(5)), m)
        seeds = tuple(Vector3(*(rng.randrange(p) for _ in range(3)), m)
                      for _ in range(2))
        cfg = PrngConfig(ps, seeds, (0, 1), Vector3(*(rng.randrange(p)
                                                      for _ in range(3)), m))
        # exhaustive composite-state walk with a hash map
        seen = {}
        state = (cfg.initial.components, 0)
        steppers = [None, None]
        idx = 0
        walk = []
        while state not in seen:
            seen[state] = idx
            walk.append(state)
            vec, pos = state
            from mlmagma.magma import right_mul_stepper
            st = right_mul_stepper(cfg.seeds[cfg.pattern[pos]], ps)
            state = (st(vec), (pos + 1) % len(cfg.pattern))
            idx += 1
        tail = seen[state]
        period = idx - tail
        res = prng_cycle_length(cfg)
        assert (res.tail, res.period) == (tail, period)
        assert composite_period(cfg) == period


def test_cycle_cap_reported():
    cfg = make_config(p=37, coefs=(19, 18, 1, 1, 2),
                      seeds=((0, 1, 5), (0, 2, 7)))
    res = prng_cycle_length(cfg, cap=10)
    assert res.exceeded_cap and res.tail is None and res.period is None


def test_period_bounded_by_state_space(rng):
    for _ in range(10):
        p = 5
        m = make_modulus(p)
        ps = Params3(*(rng.randrange(p) for _ in range(5)), m)
        seeds = tuple(Vector3(*(rng.randrange(p) for _ in range(3)), m)
                      for _ in range(3))
        pattern = tuple(rng.randrange(3) for _ in range(rng.randrange(1, 5)))
        cfg = PrngConfig(ps, seeds, pattern, Vector3(1, 1, 1, m))
        res = prng_cycle_length(cfg)
        assert res.period <= cfg.state_space
        assert res.period % len(pattern) == 0 or res.period == len(pattern)


def test_streams_deterministic():
    cfg = make_config(p=37, coefs=(19, 18, 1, 1, 2),
                      seeds=((0, 1, 5), (0, 2, 7)), initial=(3, 1, 4))
    a = list(iter_outputs(cfg, 500))
    b = list(iter_outputs(cfg, 500))
    assert a == b


def test_left_side_flag():
    cfg_r = make_config()
    cfg_l = make_config(side="left")
    st = prng_init(cfg_l)
    st, out = prng_step(st, cfg_l)
    assert out == mul(cfg_l.seeds[0], cfg_l.initial, cfg_l.params)
    assert list(iter_outputs(cfg_r, 20)) != list(iter_outputs(cfg_l, 20))
    assert PrngConfig.from_dict(cfg_l.to_dict()) == cfg_l


def test_uniformity_stats_degenerate_and_conservation():
    cfg = make_config(seeds=((0, 0, 0),), pattern=(0,))
    rep = uniformity_stats(cfg, 1000)
    assert rep.max_relative_deviation == pytest.approx(4.0)  # all mass on one value
    for comp in rep.counts:
        assert sum(comp) == 1000


def test_single_orbit_stream(rng):
    a, ps = random_instance(rng, primes=(23,))
    stream = single_orbit_stream(a, ps, 10)
    assert stream[0] == a
    for i, v in enumerate(stream, start=1):
        assert v == pow_iter(a, i, ps)
    assert single_orbit_stream(a, ps, 0) == []


def test_single_orbit_short_cycles_dominate(rng):
    # at p=23 with (6,1,1,1,2) most random starts sit on period-22 cycles,
    # the short-cycle weakness the pattern PRNG exists to fix
    from mlmagma.orbit import orbit_length
    m = make_modulus(23)
    ps = Params3(6, 1, 1, 1, 2, m)
    hits = 0
    for _ in range(20):
        a = Vector3(*(rng.randrange(23) for _ in range(3)), m)
        if orbit_length(a, ps).period == 22:
            hits += 1
    assert hits >= 8  # element-weighted share is ~70%


def test_seed_search_leaderboard():
    ps = Params3(19, 18, 1, 1, 2, make_modulus(37))
    hits = seed_search(ps, (0, 1), trials=40, rng_seed=5)
    assert len(hits) <= 10
    periods = [h.period for h in hits]
    assert periods == sorted(periods, reverse=True)
    # deterministic given the seed
    again = seed_search(ps, (0, 1), trials=40, rng_seed=5)
    assert [(h.period, h.config) for h in hits] == \
           [(h.period, h.config) for h in again]
    assert seed_search(ps, (0, 1), trials=0, rng_seed=5) == []
    # reported period matches the composite-state measurement
    best = hits[0]
    assert prng_cycle_length(best.config).period == best.period


def test_byte_stream_degenerate_stream_fails_loudly():
    # constant output above the acceptance threshold yields no bits
    m = make_modulus(5)
    ps = Params3(0, 0, 0, 0, 0, m)
    e = identity(3, m)
    cfg = PrngConfig(ps, (e,), (0,), Vector3(4, 4, 4, m))
    with pytest.raises(RuntimeError, match="degenerate"):
        byte_stream(cfg, 16)


def test_byte_stream_unbiased_shape():
    ps = Params3(19, 18, 1, 1, 2, make_modulus(37))
    hits = seed_search(ps, (0, 1), trials=60, rng_seed=1)
    data = byte_stream(hits[0].config, 4096)
    assert len(data) == 4096
    counts = [0] * 256
    for b in data:
        counts[b] += 1
    # crude sanity: no byte value wildly over-represented
    assert max(counts) < 16 * (4096 / 256)
