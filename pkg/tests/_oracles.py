"""Independent reference constructions used by the tests.

Nothing here goes through the package's tree or ladder code: the
Bravyi-Kitaev operators come from the recursive encoding matrix and the
update/parity/flip sets derived from it, and Pauli words are built with plain
Kronecker products.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
_MAT = {"I": I2, "X": X, "Y": Y, "Z": Z}


def word(m: int, sites: dict[int, str]) -> np.ndarray:
    """Kronecker product with the given letters at 0-based positions."""
    return reduce(np.kron, [_MAT[sites.get(k, "I")] for k in range(m)])


def lowering(m: int, j: int, prefix: dict[int, str] | None = None) -> np.ndarray:
    """``prefix * (X_j + i Y_j) / 2``."""
    p = dict(prefix or {})
    return 0.5 * (word(m, {**p, j: "X"}) + 1j * word(m, {**p, j: "Y"}))


def bk_beta(m: int) -> np.ndarray:
    """Encoding matrix ``b = beta n (mod 2)`` of the Bravyi-Kitaev transform."""
    beta = np.ones((1, 1), dtype=np.uint8)
    while beta.shape[0] < m:
        k = beta.shape[0]
        low = np.zeros((k, k), dtype=np.uint8)
        low[-1, :] = 1
        beta = np.block([[beta, np.zeros((k, k), dtype=np.uint8)], [low, beta]])
    return beta


def gf2_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a.copy() % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r, col])
        aug[[col, piv]] = aug[[piv, col]]
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] ^= aug[col]
    return aug[:, n:]


def bk_sets(m: int):
    """Update, parity, flip and remainder sets for every mode."""
    beta = bk_beta(m)
    inv = gf2_inverse(beta)
    strict = np.tril(np.ones((m, m), dtype=np.uint8), -1)
    parity = (strict @ inv) % 2
    out = []
    for j in range(m):
        upd = [i for i in range(m) if i != j and beta[i, j]]
        par = [i for i in range(m) if parity[j, i]]
        flip = [i for i in range(m) if i != j and inv[j, i]]
        rem = sorted(set(par) - set(flip))
        out.append((upd, par, flip, rem))
    return out


def bk_lowering(m: int, j: int) -> np.ndarray:
    """``a_j = X_U (X_j Z_P + i Y_j Z_R) / 2``."""
    upd, par, _, rem = bk_sets(m)[j]
    xs = {i: "X" for i in upd}
    t1 = word(m, {**xs, **{i: "Z" for i in par}, j: "X"})
    t2 = word(m, {**xs, **{i: "Z" for i in rem}, j: "Y"})
    return 0.5 * (t1 + 1j * t2)


def jw_generator_strings(m: int) -> list[str]:
    """``i Z..Z X_k``, ``i Z..Z Y_k`` for k = 1..m, then ``i Z..Z``."""
    out = []
    for k in range(m):
        pre, post = "Z" * k, "I" * (m - k - 1)
        out += ["+i" + pre + "X" + post, "+i" + pre + "Y" + post]
    out.append("+i" + "Z" * m)
    return out


def dense_evolution(h: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-i h tau)`` by scaling and squaring of a Taylor series (no eigh)."""
    a = -1j * tau * np.asarray(h, dtype=complex)
    s = max(0, int(np.ceil(np.log2(max(np.abs(a).sum(axis=1).max(), 1e-300)))) + 1)
    a = a / 2**s
    term = np.eye(a.shape[0], dtype=complex)
    out = term.copy()
    for k in range(1, 30):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def random_unit(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
