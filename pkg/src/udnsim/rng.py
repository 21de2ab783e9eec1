"""Counter-based random streams.

Every random quantity in a simulation trial is a pure function of
(stream key, purpose, counter...) rather than of a sequential generator
state.  This buys three things at once:

* trials and pixels can run in any order, on any number of workers, and
  still produce bit-identical results;
* expensive draws can be evaluated lazily (e.g. only for candidate
  base stations during association) without changing any value;
* an independently written reimplementation can reproduce the exact
  draws from the documented addressing scheme alone.

The mixer is the SplitMix64 finalizer applied once per absorbed word.
Uniforms are mapped to the open interval (0, 1) so that logs and
Bernoulli comparisons never hit the endpoints.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# absorption multiplier and chain seed (arbitrary odd 64-bit constants)
ABSORB_MULT = 0xD1B54A32D192ED03
CHAIN_INIT = 0x9E3779B97F4A7C15

# Draw purposes.  Counters in parentheses; all indices are 0-based.
# UE indices are global: 0 is the probe, background UEs are 1..m.
P_BS_X = 1          # (bs,)      deployment x, key = deployment key
P_BS_Y = 2          # (bs,)
P_UE_X = 3          # (bg_ue,)   background UE x, bg index = global index - 1
P_UE_Y = 4          # (bg_ue,)
P_LOS_UE_BS = 5     # (ue, bs)   LoS uniform for a UE<->BS link
P_LOS_BS_BS = 6     # (bs,)      LoS uniform, BS -> trial's uplink receiver
P_FADE_BS = 7       # (bs,)      fading, interfering BS -> trial receiver
P_FADE_UE = 8       # (ue,)      fading, interfering UE -> trial receiver
P_FADE_SIGNAL = 9   # (k,)       probe serving-link fading draws, k < K
P_SCHED_RR = 10     # (bs,)      round-robin pick within a cell
P_SCHED_PF = 11     # (ue,)      PF selection metric (argmin of the uniform)
P_DIR = 12          # (ue,)      TDD direction request
P_COUNT = 13        # (i,)       Poisson UE-count arrivals
P_SEQ = 14          # (i,)       sequential draws of a stateful Stream

TAG_DEPLOY = 0xDEB0
TAG_TRIAL = 0x7B1A


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fold(h: int, w: int) -> int:
    """Absorb one word into a chain key."""
    return mix64(h ^ ((w * ABSORB_MULT) & MASK64))


def stream_key(*words: int) -> int:
    h = CHAIN_INIT
    for w in words:
        h = fold(h, w)
    return h


def deployment_key(master_seed: int) -> int:
    return stream_key(master_seed, TAG_DEPLOY)


def trial_key(master_seed: int, pixel_index: int, trial_index: int) -> int:
    return stream_key(master_seed, TAG_TRIAL, pixel_index, trial_index)


def u01(key: int, purpose: int, c1: int = 0, c2: int = 0) -> float:
    """Uniform draw in the open interval (0, 1)."""
    h = fold(fold(fold(key, purpose), c1), c2)
    return ((h >> 11) + 0.5) * 2.0**-53


def exp1(key: int, purpose: int, c1: int = 0, c2: int = 0) -> float:
    """Unit-mean exponential draw (squared Rayleigh envelope)."""
    return -np.log(u01(key, purpose, c1, c2))


# -- vectorized forms (uint64 arithmetic wraps like the scalar chain) --

_U64 = np.uint64


def _fold_arr(h, w):
    return _mix64_arr(h ^ (w * _U64(ABSORB_MULT)))


def _mix64_arr(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def u01_array(key: int, purpose: int, c1, c2=None) -> np.ndarray:
    """Vectorized u01 over counter arrays (broadcast together)."""
    base = fold(key, purpose)
    h = _fold_arr(_U64(base), np.asarray(c1, dtype=np.uint64))
    c2 = np.zeros(1, dtype=np.uint64) if c2 is None else np.asarray(c2, dtype=np.uint64)
    h = _fold_arr(h, c2)
    return ((h >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53


def exp1_array(key: int, purpose: int, c1, c2=None) -> np.ndarray:
    return -np.log(u01_array(key, purpose, c1, c2))


class Stream:
    """A keyed random stream.

    Explicitly addressed draws (`u01`, `exp1`, array forms) are pure
    functions of the key; `next_u01`/`next_exp1` provide a conventional
    sequential interface on top of the P_SEQ purpose for callers that
    just need "some independent draws".
    """

    __slots__ = ("key", "_seq")

    def __init__(self, key: int):
        self.key = key & MASK64
        self._seq = 0

    @classmethod
    def from_words(cls, *words: int) -> "Stream":
        return cls(stream_key(*words))

    def fork(self, word: int) -> "Stream":
        return Stream(fold(self.key, word))

    def u01(self, purpose: int, c1: int = 0, c2: int = 0) -> float:
        return u01(self.key, purpose, c1, c2)

    def exp1(self, purpose: int, c1: int = 0, c2: int = 0) -> float:
        return exp1(self.key, purpose, c1, c2)

    def u01_array(self, purpose: int, c1, c2=None) -> np.ndarray:
        return u01_array(self.key, purpose, c1, c2)

    def exp1_array(self, purpose: int, c1, c2=None) -> np.ndarray:
        return exp1_array(self.key, purpose, c1, c2)

    def next_u01(self) -> float:
        v = u01(self.key, P_SEQ, self._seq)
        self._seq += 1
        return v

    def next_exp1(self) -> float:
        return -float(np.log(self.next_u01()))

    def poisson(self, mean: float) -> int:
        """Poisson count via exponential inter-arrival accumulation.

        Consumes P_COUNT draws with consecutive counters; deterministic
        for a given key.
        """
        if mean <= 0.0:
            return 0
        total = 0.0
        k = 0
        while True:
            total += -float(np.log(u01(self.key, P_COUNT, k)))
            if total > mean:
                return k
            k += 1
