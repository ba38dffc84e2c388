"""
Seeded random number generation utilities.

Every stochastic routine takes its randomness from a RandomGenerator built on
numpy's counter-based Philox bit generator. Monte-Carlo runs derive their
seeds as ``base ^ run_index`` and protocols split one seed into independent
streams, so parallel and serial execution draw identical numbers.
"""
from typing import Optional, Sequence
import numpy as np

# 64-bit seed range
SEED_MASK = (1 << 64) - 1

# Named sub-streams used inside a single run
STREAM_DATA = 1
STREAM_RESAMPLE = 2
STREAM_PRIOR = 3
STREAM_RESTARTS = 4


class RandomGenerator:
    """
    Seeded random number generator for reproducible results.
    """

    def __init__(self, seed: int = 0, stream: int = 0):
        """
        Initialize a random generator.

        Args:
            seed: 64-bit random seed
            stream: Sub-stream index; distinct streams never overlap
        """
        if seed < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")
        self.seed = int(seed) & SEED_MASK
        self.stream = int(stream)
        sequence = np.random.SeedSequence([self.seed, self.stream])
        self.np_rng = np.random.Generator(np.random.Philox(sequence))

    def get_seed(self) -> int:
        """
        Get the seed of this generator.

        Returns:
            Current seed
        """
        return self.seed

    def derive(self, run_index: int) -> "RandomGenerator":
        """
        Get the generator of a Monte-Carlo run (seed = base XOR run_index).

        Args:
            run_index: Index of the run

        Returns:
            Fresh generator for that run
        """
        return RandomGenerator(derive_seed(self.seed, run_index), self.stream)

    def spawn(self, stream: int) -> "RandomGenerator":
        """
        Get an independent sub-stream with the same seed.

        Args:
            stream: Sub-stream index

        Returns:
            Fresh generator for that stream
        """
        return RandomGenerator(self.seed, stream)

    def binomial(self, n: np.ndarray, p: np.ndarray) -> np.ndarray:
        """
        Draw binomial counts; numpy switches between inversion and BTPE internally.

        Args:
            n: Trial counts
            p: Success probabilities

        Returns:
            Integer counts with the broadcast shape of n and p
        """
        return self.np_rng.binomial(np.asarray(n, dtype=np.int64), np.asarray(p, dtype=float))

    def uniform_box(self, low: Sequence[float], high: Sequence[float], size: int) -> np.ndarray:
        """
        Draw points uniformly inside an axis-aligned box.

        Args:
            low: Lower corner
            high: Upper corner
            size: Number of points

        Returns:
            Array of shape (size, dimension)
        """
        low = np.asarray(low, dtype=float)
        high = np.asarray(high, dtype=float)
        return self.np_rng.uniform(low, high, size=(size, low.size))

    def multivariate_normal(self, cov: np.ndarray, size: int) -> np.ndarray:
        """
        Draw zero-mean Gaussian vectors; eigen-decomposition tolerates singular covariances.

        Args:
            cov: Covariance matrix
            size: Number of vectors

        Returns:
            Array of shape (size, dimension)
        """
        cov = np.atleast_2d(cov)
        return self.np_rng.multivariate_normal(np.zeros(cov.shape[0]), cov, size=size, method="eigh")

    def choice(self, count: int, size: int, p: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Draw indices in [0, count) with optional probabilities.

        Args:
            count: Number of categories
            size: Number of draws
            p: Optional category probabilities

        Returns:
            Integer index array
        """
        return self.np_rng.choice(count, size=size, p=p)


def derive_seed(base_seed: int, run_index: int) -> int:
    """
    Derive the seed of a Monte-Carlo run.

    Args:
        base_seed: Seed of the whole experiment
        run_index: Index of the run

    Returns:
        base_seed XOR run_index, as a 64-bit integer
    """
    return (int(base_seed) ^ int(run_index)) & SEED_MASK
