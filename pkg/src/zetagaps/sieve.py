"""Linear sieve: smallest prime factors and the von Mangoldt function."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np

N_MAX_DEFAULT = 1_000_000


@nb.njit(cache=True)
def _linear_sieve(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    primes = np.empty(n // 2 + 16, dtype=np.int64)
    count = 0
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        for j in range(count):
            p = primes[j]
            if p > spf[i] or p * i > n:
                break
            spf[p * i] = p
    return spf, primes[:count]


@nb.njit(cache=True)
def _mangoldt_from_spf(spf):
    n = spf.shape[0] - 1
    lam = np.zeros(n + 1)
    pure = np.zeros(n + 1, dtype=np.bool_)
    for i in range(2, n + 1):
        p = spf[i]
        m = i // p
        if m == 1 or (spf[m] == p and pure[m]):
            pure[i] = True
            lam[i] = np.log(p)
    return lam


@lru_cache(maxsize=4)
def smallest_prime_factors(n: int) -> np.ndarray:
    """spf[k] for 0 <= k <= n (spf[0] = spf[1] = 0). Read-only."""
    spf, _ = _linear_sieve(int(n))
    spf.setflags(write=False)
    return spf


@lru_cache(maxsize=4)
def primes_upto(n: int) -> np.ndarray:
    _, primes = _linear_sieve(int(n))
    primes.setflags(write=False)
    return primes


@dataclass(frozen=True)
class VonMangoldtTable:
    """Lambda(n) for 0 <= n <= n_max, stored as a read-only array indexed by n."""

    n_max: int
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[n]

    def chebyshev_psi(self, x: float) -> float:
        """psi(x) = sum_{n <= x} Lambda(n)."""
        k = min(int(np.floor(x)), self.n_max)
        return float(self.values[: k + 1].sum())

    def prime_powers(self, upto: int) -> tuple[np.ndarray, np.ndarray]:
        """(n, Lambda(n)) for the prime powers 2 <= n <= upto."""
        if upto > self.n_max:
            raise ValueError(f"table covers n <= {self.n_max}, asked for {upto}")
        idx = np.flatnonzero(self.values[: upto + 1])
        return idx, self.values[idx]


@lru_cache(maxsize=4)
def von_mangoldt_table(n_max: int = N_MAX_DEFAULT) -> VonMangoldtTable:
    """Build (once per n_max) the table of Lambda(n)."""
    lam = _mangoldt_from_spf(smallest_prime_factors(n_max))
    lam.setflags(write=False)
    return VonMangoldtTable(n_max=int(n_max), values=lam)
