"""Dense exponential-cost reference: statevectors and operators for small m.

Basis index convention: qubit position 0 is the most significant bit, the
same ordering ``np.kron`` produces for a left-to-right tensor product.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .pauli import MAX_DENSE_WIDTH, OracleSizeError, PauliTerm, index_masks, to_dense

MAX_STATE_WIDTH = 14


def _check_state(m: int):
    if m > MAX_STATE_WIDTH:
        raise OracleSizeError(f"{m} qubits exceeds statevector cap {MAX_STATE_WIDTH}")


def _check_operator(dim: int):
    if dim > 2**MAX_DENSE_WIDTH:
        raise OracleSizeError(f"dimension {dim} exceeds dense operator cap 2**{MAX_DENSE_WIDTH}")


def basis_state(bits: Sequence[int]) -> np.ndarray:
    m = len(bits)
    _check_state(m)
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    psi = np.zeros(2**m, dtype=complex)
    psi[idx] = 1.0
    return psi


def vacuum(m: int) -> np.ndarray:
    return basis_state([0] * m)


def random_state(m: int, rng: np.random.Generator) -> np.ndarray:
    _check_state(m)
    psi = rng.normal(size=2**m) + 1j * rng.normal(size=2**m)
    return psi / np.linalg.norm(psi)


def bits_of(index: int, m: int) -> list[int]:
    return [(index >> (m - 1 - k)) & 1 for k in range(m)]


def apply_pauli(term: PauliTerm, psi: np.ndarray) -> np.ndarray:
    """``term @ psi`` without forming the matrix."""
    m = term.width
    _check_state(m)
    if psi.shape != (2**m,):
        raise ValueError(f"state of length {psi.shape} does not match width {m}")
    xm, zm = index_masks(term)
    idx = np.arange(2**m, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(idx & zm).astype(np.int64) & 1)
    # sigma(x, z) = i^(x.z) X^x Z^z
    coeff = term.coefficient * 1j ** (bin(term.x & term.z).count("1"))
    out = np.empty_like(psi)
    out[idx ^ xm] = coeff * signs * psi
    return out


def exp_hamiltonian(h: np.ndarray, tau: float, atol: float = 1e-10) -> np.ndarray:
    """``exp(-i h tau)`` for Hermitian ``h`` via eigendecomposition."""
    h = np.asarray(h)
    _check_operator(h.shape[0])
    if np.abs(h - h.conj().T).max(initial=0.0) > atol:
        raise ValueError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


def expectation(psi: np.ndarray, op) -> complex:
    """``<psi|op|psi>`` for a PauliTerm or a dense matrix."""
    if isinstance(op, PauliTerm):
        return complex(np.vdot(psi, apply_pauli(op, psi)))
    op = np.asarray(op)
    if op.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"operator shape {op.shape} does not match state length {psi.shape[0]}")
    return complex(np.vdot(psi, op @ psi))


def dense_sum(terms) -> np.ndarray:
    """Dense matrix of ``sum(c * word)`` over ``(c, PauliTerm)`` pairs."""
    return sum(c * to_dense(t) for c, t in terms)


def car_deviation(ladders) -> float:
    """Largest entry of the residuals of all canonical anticommutation relations."""
    mats = [a.to_dense() for a in ladders]
    dim = mats[0].shape[0]
    eye = np.eye(dim)
    worst = 0.0
    for j, aj in enumerate(mats):
        for k, ak in enumerate(mats):
            if k < j:
                continue
            akd = ak.conj().T
            r1 = aj @ akd + akd @ aj - (eye if j == k else 0)
            r2 = aj @ ak + ak @ aj
            worst = max(worst, np.abs(r1).max(), np.abs(r2).max())
    return float(worst)


def total_number(ladders) -> np.ndarray:
    """Dense ``sum_k a_k^+ a_k``."""
    mats = [a.to_dense() for a in ladders]
    return sum(a.conj().T @ a for a in mats)


def generator_expectations(psi: np.ndarray, gens: Sequence[PauliTerm]) -> np.ndarray:
    """Real vector ``<-i g_k>`` over a list of anti-Hermitian generators."""
    return np.array([expectation(psi, g.scale(-1)).real for g in gens])


def generator_covariance(psi: np.ndarray, gens: Sequence[PauliTerm]) -> np.ndarray:
    """Real antisymmetric ``M[j, k] = <i g_j g_k>`` (zero diagonal)."""
    n = len(gens)
    out = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            val = expectation(psi, (gens[j] * gens[k]).scale(1)).real
            out[j, k] = val
            out[k, j] = -val
    return out
