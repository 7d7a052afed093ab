"""Seed plumbing: every random decision flows from one experiment seed
through named sub-streams, so stages stay independently reproducible."""

from __future__ import annotations

import zlib

import numpy as np


def subseed(seed: int, name: str) -> int:
    """A stable derived integer seed for the named sub-stream."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode("utf-8"))])
    return int(ss.generate_state(1)[0])


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(subseed(seed, name))
