"""Stream discipline for reproducible parallel runs.

Every random consumer asks for ``generator(seed, purpose, *indices)``.  The
pair (run seed, key path) feeds a ``SeedSequence`` spawn key, so streams for
different particle blocks, grid rows or replicas are independent and do not
depend on how work is scheduled.  Bit generator: PCG64DXSM.
"""
import zlib

import numpy as np


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def seed_sequence(seed, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(p) for p in path))


def generator(seed, *path) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(seed_sequence(seed, *path)))


def replica_seed(seed, replica: int) -> int:
    """Derived 63-bit seed for replica ``replica`` of a run."""
    return int(seed_sequence(seed, "replica", replica).generate_state(2, np.uint64)[0] >> 1)
