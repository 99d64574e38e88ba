import numpy as np

GENERATOR = "numpy Philox4x64 (counter-based), seeded with the integer --seed"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))
