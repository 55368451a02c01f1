"""Multi-seed multiplication-pattern PRNG over Z_p^3.

Each step multiplies the current vector by a seed chosen by a fixed
cyclic index pattern; the generator state is the pair (vector, pattern
position), giving an effective state space of p^3 * pattern_length.
The single-orbit power stream is kept as the short-cycle baseline.

Period measurement exploits that one full pattern pass is an affine map
M of the vector (each fixed-factor multiplication is affine): the
composite-state period equals pattern_length times the period of the
initial vector under M, because the position-0 subsequence is exactly
the M iteration.  Tails are measured on the true composite state.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

from .cycles import find_cycle
from .field import PrimeModulus
from .magma import Params3, Vector3, left_mul_stepper, right_mul_stepper
from .power import powers_upto

SIDES = ("right", "left")


@dataclass(frozen=True)
class PrngConfig:
    params: Params3
    seeds: tuple[Vector3, ...]
    pattern: tuple[int, ...]
    initial: Vector3
    side: str = "right"   # "right": current * seed, "left": seed * current

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed vector is required")
        if not self.pattern:
            raise ValueError("pattern must be non-empty")
        for i in self.pattern:
            if not (0 <= i < len(self.seeds)):
                raise ValueError(f"pattern index {i} out of range for "
                                 f"{len(self.seeds)} seeds")
        m = self.params.modulus
        for v in (*self.seeds, self.initial):
            if v.modulus != m:
                raise ValueError("seeds and initial must share the params modulus")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")

    @property
    def modulus(self) -> PrimeModulus:
        return self.params.modulus

    @property
    def state_space(self) -> int:
        return self.modulus.p ** 3 * len(self.pattern)

    def to_dict(self) -> dict:
        d = {
            "p": self.modulus.p,
            "params": list(self.params.coefficients),
            "seeds": [list(s.components) for s in self.seeds],
            "pattern": list(self.pattern),
            "initial": list(self.initial.components),
        }
        if self.side != "right":
            d["side"] = self.side
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PrngConfig":
        required = {"p", "params", "seeds", "pattern", "initial"}
        allowed = required | {"side"}
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = required - set(d)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        m = PrimeModulus(d["p"])
        coefs = list(d["params"])
        if len(coefs) != 5:
            raise ValueError("params must hold exactly 5 coefficients")
        ps = Params3(*coefs, m)
        seeds = tuple(Vector3(*s, m) for s in d["seeds"])
        initial = Vector3(*d["initial"], m)
        return cls(ps, seeds, tuple(d["pattern"]), initial,
                   d.get("side", "right"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PrngConfig":
        return cls.from_dict(json.loads(text))


class PrngState(NamedTuple):
    current: Vector3
    pos: int


class CycleResult(NamedTuple):
    tail: int | None
    period: int | None
    exceeded_cap: bool


@lru_cache(maxsize=64)
def _slot_steppers(config: PrngConfig):
    make = right_mul_stepper if config.side == "right" else left_mul_stepper
    return [make(config.seeds[i], config.params) for i in config.pattern]


def prng_init(config: PrngConfig) -> PrngState:
    return PrngState(config.initial, 0)


def prng_step(state: PrngState, config: PrngConfig) -> tuple[PrngState, Vector3]:
    steppers = _slot_steppers(config)
    nxt = steppers[state.pos](state.current.components)
    out = Vector3(*nxt, config.modulus)
    return PrngState(out, (state.pos + 1) % len(config.pattern)), out


def iter_outputs(config: PrngConfig, count: int) -> Iterator[tuple[int, int, int]]:
    """Raw component tuples of the first `count` outputs."""
    steppers = _slot_steppers(config)
    length = len(steppers)
    cur = config.initial.components
    pos = 0
    for _ in range(count):
        cur = steppers[pos](cur)
        pos += 1
        if pos == length:
            pos = 0
        yield cur


def affine_pass(config: PrngConfig) -> tuple[list[list[int]], list[int]]:
    """Matrix and shift of one full pattern pass acting on the vector.

    Built by probing the slot steppers at the origin and unit vectors,
    so it works for either multiplication side.
    """
    p = config.modulus.p
    basis = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    images = []
    for b in basis:
        cur = b
        for st in _slot_steppers(config):
            cur = st(cur)
        images.append(cur)
    t = list(images[0])
    cols = [[(images[j + 1][i] - t[i]) % p for i in range(3)] for j in range(3)]
    matrix = [[cols[j][i] for j in range(3)] for i in range(3)]
    return matrix, t


def composite_period(config: PrngConfig, cap: int | None = None) -> int | None:
    """Exact composite-state period via the one-pass affine map."""
    p = config.modulus.p
    matrix, t = affine_pass(config)
    (m00, m01, m02), (m10, m11, m12), (m20, m21, m22) = matrix
    t0, t1, t2 = t

    def mstep(z):
        z0, z1, z2 = z
        return ((m00 * z0 + m01 * z1 + m02 * z2 + t0) % p,
                (m10 * z0 + m11 * z1 + m12 * z2 + t1) % p,
                (m20 * z0 + m21 * z1 + m22 * z2 + t2) % p)

    mcap = None if cap is None else cap // len(config.pattern) + 2
    _, period = find_cycle(mstep, config.initial.components, cap=mcap)
    if period is None:
        return None
    return period * len(config.pattern)


def prng_cycle_length(config: PrngConfig, cap: int | None = None) -> CycleResult:
    """Tail and period of the composite state (vector, position)."""
    if cap is None:
        cap = 4 * config.state_space + 64
    steppers = _slot_steppers(config)
    length = len(steppers)

    def step(state):
        vec, pos = state
        return steppers[pos](vec), (pos + 1) % length

    tail, period = find_cycle(step, (config.initial.components, 0), cap=cap)
    if tail is None:
        return CycleResult(None, None, True)
    return CycleResult(tail, period, False)


# ---------------------------------------------------------------------------
# measurement and search

@dataclass
class UniformityReport:
    p: int
    samples: int
    counts: list[list[int]]          # per component, counts over Z_p
    max_relative_deviation: float
    chi_square: list[float]          # per component, df = p - 1

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "samples": self.samples,
            "max_relative_deviation": self.max_relative_deviation,
            "chi_square": self.chi_square,
            "counts": self.counts,
        }


def uniformity_stats(config: PrngConfig, samples: int) -> UniformityReport:
    p = config.modulus.p
    counts = [[0] * p for _ in range(3)]
    c0, c1, c2 = counts
    for x0, x1, x2 in iter_outputs(config, samples):
        c0[x0] += 1
        c1[x1] += 1
        c2[x2] += 1
    expected = samples / p
    max_rel = max(abs(c - expected) for comp in counts for c in comp) / expected
    chi = [sum((c - expected) ** 2 for c in comp) / expected for comp in counts]
    return UniformityReport(p, samples, counts, max_rel, chi)


class SearchHit(NamedTuple):
    period: int
    config: PrngConfig


def _sort_key(hit: SearchHit):
    return (-hit.period,
            tuple(s.components for s in hit.config.seeds),
            hit.config.initial.components)


def seed_search(ps: Params3, pattern, trials: int, *, rng_seed: int = 0,
                side: str = "right", keep: int = 10) -> list[SearchHit]:
    """Sample seed tuples and rank them by composite period.

    Alternates structured candidates (first component 0, small second
    component, scanning third) with uniform random ones; deterministic
    for a given rng_seed.  Returns the `keep` best hits, longest period
    first, ties broken by seed then initial components.
    """
    p = ps.modulus.p
    m = ps.modulus
    pattern = tuple(pattern)
    nseeds = max(pattern) + 1 if pattern else 0
    if not pattern:
        raise ValueError("pattern must be non-empty")
    rng = random.Random(rng_seed)

    def random_vec():
        return Vector3(rng.randrange(p), rng.randrange(p), rng.randrange(p), m)

    def structured_vec(k):
        return Vector3(0, 1 + (k % 2), rng.randrange(p), m)

    hits: list[SearchHit] = []
    for trial in range(trials):
        if trial % 2 == 0:
            seeds = tuple(structured_vec(k) for k in range(nseeds))
        else:
            seeds = tuple(random_vec() for _ in range(nseeds))
        initial = random_vec()
        config = PrngConfig(ps, seeds, pattern, initial, side)
        period = composite_period(config)
        hits.append(SearchHit(period, config))
    hits.sort(key=_sort_key)
    return hits[:keep]


def single_orbit_stream(a: Vector3, ps: Params3, count: int) -> list[Vector3]:
    """The baseline stream a, a^2, ..., a^count from one start vector."""
    if count < 1:
        return []
    return powers_upto(a, count, ps)


# ---------------------------------------------------------------------------
# unbiased byte extraction

def byte_stream(config: PrngConfig, nbytes: int) -> bytes:
    """Extract `nbytes` unbiased bytes from the output stream.

    Per component, values below 2^k (k = bit_length(p) - 1) are accepted
    and contribute k bits; larger values are rejected.  Power-of-two
    rejection avoids modulo bias for any p.
    """
    p = config.modulus.p
    k = p.bit_length() - 1
    threshold = 1 << k
    out = bytearray()
    acc = 0
    nbits = 0
    for comps in iter_outputs(config, 64 * nbytes + 1024):
        for v in comps:
            if v < threshold:
                acc = (acc << k) | v
                nbits += k
                while nbits >= 8:
                    nbits -= 8
                    out.append((acc >> nbits) & 0xFF)
                    if len(out) == nbytes:
                        return bytes(out)
                acc &= (1 << nbits) - 1
    raise RuntimeError("stream too degenerate to extract the requested bytes")
