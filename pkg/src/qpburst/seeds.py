"""Deterministic per-dataset seed derivation.

Per-dataset seeds are splitmix64(master XOR index): the master seed is
xored with a stream index and pushed through the splitmix64 finalizer,
giving well-separated 64-bit seeds that are reproducible across runs and
platforms.
"""

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def derive_seed(master: int, index: int) -> int:
    """Seed for stream `index` of a run keyed by `master`."""
    return splitmix64((master & _MASK) ^ (index & _MASK))


def dataset_seeds(master: int, dataset_index: int) -> tuple[int, int]:
    """(event-sampling seed, bit-sampling seed) for one dataset."""
    return derive_seed(master, 2 * dataset_index), derive_seed(master, 2 * dataset_index + 1)
