"""Seeded, counter-based random streams.

All randomness comes from numpy's Philox4x64-10 generator keyed by
``(seed, stream_id)``. Philox is counter based: item ``i`` of a stream owns
the counter block starting at ``i * width / 4``, so any slice of items can be
generated independently (and in parallel) and still match a serial run.
"""
import numpy as np

SEED_MAX = 2**64 - 1

# stream identifiers
PAIR = 1
PERMUTATION = 2
SAMPLE = 3
QUBIT = 4


def check_seed(seed):
    seed = int(seed)
    if not (0 <= seed <= SEED_MAX):
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _pad(width):
    return -(-width // 4) * 4


def generator(seed, stream):
    return np.random.Generator(np.random.Philox(key=[check_seed(seed), int(stream)]))


def item_uniforms(seed, stream, start, stop, width):
    """Uniforms for items ``start..stop-1`` of a stream, shape ``(stop - start, width)``.

    Each item gets ``width`` doubles, padded up to whole Philox blocks.
    """
    padded = _pad(width)
    g = generator(seed, stream)
    if start:
        g.bit_generator.advance(start * padded // 4)
    return g.random((stop - start, padded))[:, :width]


def flat_uniforms(seed, stream, count):
    return generator(seed, stream).random(count)
