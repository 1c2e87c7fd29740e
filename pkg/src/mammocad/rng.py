"""Counter-based splitmix64 generator for portable phantom fixtures.

The raw stream is fully specified so other implementations can reproduce it:

    state(i) = (seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z = state(i)
    z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z = (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    out(i) = z XOR (z >> 31)

``i`` counts draws from 0.  Uniforms map the top 53 bits into [0, 1):
u = (out >> 11) * 2^-53.  Gaussian draws use Box-Muller on consecutive
uniform blocks (see ``normals``).
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = float(2.0 ** -53)


class SplitMix64:
    """Deterministic vectorized stream; instances track their draw counter."""

    def __init__(self, seed):
        self._seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
        self._counter = 0

    def raw(self, n):
        """Next n 64-bit outputs as uint64."""
        idx = np.arange(self._counter + 1, self._counter + int(n) + 1,
                        dtype=np.uint64)
        self._counter += int(n)
        z = self._seed + idx * GOLDEN
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        return z ^ (z >> np.uint64(31))

    def uniforms(self, n):
        """n doubles uniform in [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _U53

    def uniform(self, lo=0.0, hi=1.0, n=None):
        """Uniform in [lo, hi); scalar when n is None."""
        u = self.uniforms(1 if n is None else n)
        out = lo + u * (hi - lo)
        return float(out[0]) if n is None else out

    def normals(self, n):
        """n standard Gaussian doubles via Box-Muller.

        Draws 2*ceil(n/2) uniforms as one block [u1..., u2...]; pair j uses
        r = sqrt(-2 ln(1 - u1_j)) and angle 2*pi*u2_j, yielding r*cos and
        r*sin; the trailing draw is dropped when n is odd.
        """
        pairs = (int(n) + 1) // 2
        u = self.uniforms(2 * pairs)
        u1 = u[:pairs]
        u2 = u[pairs:]
        radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 in (0, 1], log finite
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:int(n)]
