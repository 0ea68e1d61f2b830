"""
Shared utilities for the BREA simulator.

This module contains helpers used across the package for logging setup and
for deriving the reproducible random streams every user and round draws from.
"""

import logging

import numpy as np

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbose=False):
    """Configure the root logger for command-line runs."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        force=True,
    )


def derive_rng(seed, *keys):
    """
    Derive an independent counter-mode generator from a master seed.

    Args:
        seed (int): Master experiment seed
        *keys: Non-negative integers identifying the stream, for example
            (round, user, purpose)

    Returns:
        np.random.Generator: Philox-backed generator unique to the key path
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


# Stream purposes, used as the last key of derive_rng.
STREAM_QUANTIZE = 1
STREAM_SHARES = 2
STREAM_BYZANTINE = 3
STREAM_GRADIENT = 4
STREAM_FOLD = 5
STREAM_DECODE = 6
STREAM_FEDAVG = 7
STREAM_DROPOUT = 8
