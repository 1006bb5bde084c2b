"""
Zadoff-Chu preambles: root sequence, cyclic shifts, CP + ZC + guard frame
"""
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RootSequence:
    """Unit-modulus root ZC sequence s[t]"""
    samples: np.ndarray
    root: int

    @property
    def n_zc(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class PreambleFrame:
    """Transmitted RA frame x_q[t]: G-sample CP, the shifted sequence, G zeros"""
    samples: np.ndarray
    shift: int
    guard: int

    @property
    def sequence(self) -> np.ndarray:
        return self.samples[self.guard:self.samples.size - self.guard]


def root_zc(n_zc: int, u: int) -> RootSequence:
    """
    Root Zadoff-Chu sequence.

    Even length uses exp(-j*pi*u*t^2/N), odd length exp(-j*pi*u*t*(t+1)/N).

    Raises:
        ValueError: If u is not coprime with n_zc
    """
    if n_zc < 1:
        raise ValueError("n_zc must be positive")
    if math.gcd(u, n_zc) != 1:
        raise ValueError(f"ZC root u={u} is not coprime with N_ZC={n_zc}")
    t = np.arange(n_zc, dtype=np.int64)
    # exact integer phase reduced mod 2N keeps the argument small
    if n_zc % 2 == 0:
        phase = (u * t * t) % (2 * n_zc)
    else:
        phase = (u * t * (t + 1)) % (2 * n_zc)
    samples = np.exp(-1j * np.pi * phase / n_zc)
    samples.setflags(write=False)
    return RootSequence(samples=samples, root=u)


def shifted(root: RootSequence, c: int) -> np.ndarray:
    """s_q[t] = s[(t - c) mod N_ZC]"""
    if not 0 <= c < root.n_zc:
        raise ValueError(f"cyclic shift {c} outside 0..{root.n_zc - 1}")
    return np.roll(root.samples, c)


def build_frame(root: RootSequence, c: int, G: int) -> PreambleFrame:
    """Prefix the last G samples, append G zeros"""
    if not 0 < G <= root.n_zc:
        raise ValueError(f"guard G={G} outside 1..{root.n_zc}")
    seq = shifted(root, c)
    samples = np.concatenate([seq[root.n_zc - G:], seq, np.zeros(G, dtype=complex)])
    samples.setflags(write=False)
    return PreambleFrame(samples=samples, shift=c, guard=G)


def frame_bank(root: RootSequence, shifts, G: int) -> dict:
    """Frames for every permissible shift, keyed by shift"""
    return {c: build_frame(root, c, G) for c in shifts}
