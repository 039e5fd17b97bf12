"""Deterministic epoch shuffling."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyDataset


def minibatches(
    ids: list[str], batch_size: int, seed: int, epoch: int
) -> list[list[str]]:
    """Chunk `ids` into batches after a permutation keyed by (seed, epoch).

    The final short batch is kept, so consumers must not assume a fixed
    batch size. Identical (ids, batch_size, seed, epoch) always yields
    the same batches.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    if not ids:
        raise EmptyDataset("cannot batch an empty id list")
    order = np.random.default_rng([seed & 0xFFFFFFFF, epoch]).permutation(len(ids))
    shuffled = [ids[int(i)] for i in order]
    return [shuffled[i : i + batch_size] for i in range(0, len(shuffled), batch_size)]
