"""Deterministic, counter-based random streams.

Every randomized routine in this package derives its stream from a
``(seed, index)`` pair, where ``index`` is the zero-based sample number.
The stream is the Philox-4x64 counter-based generator keyed with the two
64-bit words ``[seed, index]`` and counter starting at zero, consumed
through numpy's ``Generator``:

* a uniform double in [0, 1) is ``(x >> 11) * 2**-53`` of the next raw
  64-bit output ``x`` (this is ``Generator.random()``);
* a child pick in {0, 1, 2} is ``floor(3 * u)`` of the next uniform.

Because the stream for sample ``index`` never depends on any other
sample, results are independent of worker count and scheduling, and a
reimplementation only needs a standard Philox-4x64 plus the two
conversions above to reproduce them bit for bit.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int) -> np.random.Generator:
    """Return the generator for sample ``index`` of run ``seed``."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def pick_child(gen: np.random.Generator) -> int:
    """Draw one of the three children uniformly: floor(3 * u), u in [0, 1)."""
    return min(int(3.0 * gen.random()), 2)


def uniform_in(gen: np.random.Generator, lo: float, hi: float) -> float:
    """Draw one uniform double in [lo, hi)."""
    return lo + (hi - lo) * gen.random()
