import numpy as np

from wtdecode.probsource import random_tabular_model


def make_random_models(seed, count, max_b=3, max_i=3, max_order=2):
    """Stream of (rng, model) pairs: random strictly-positive tabular models,
    deterministically seeded."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng, random_tabular_model(
            rng,
            n_b=int(rng.integers(1, max_b + 1)),
            n_i=int(rng.integers(1, max_i + 1)),
            order=int(rng.integers(1, max_order + 1)),
        )
