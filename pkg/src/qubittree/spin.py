"""Polynomial-cost simulation of circuits generated by quadratic Hamiltonians.

Spin form: a Hamiltonian ``sum_{j<k} h[j, k] g_j g_k`` over anticommuting
generators acts on them by an orthogonal rotation,
``U g_j U^+ = sum_k R[k, j] g_k`` with ``U = exp(tau * sum h g g)``.
Expectation vectors ``v_k = <-i g_k>`` and covariances ``M[j, k] = <i g_j g_k>``
then propagate as ``v -> R v`` and ``M -> R M R^T``.

Ladder form: ``H = sum_{jk} hm[j, k] a_j^+ a_k`` maps the span of the path
states ``a_k^+ |0>`` to itself through the ``m x m`` matrix ``exp(-i hm tau)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .pauli import PauliTerm, basis_expectation, multiply, to_dense
from .tree import GeneratorSet, QubitTree, TreeError, cf_binary_levels, generators

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``sum_{j<k} coeffs[j, k] g_j g_k`` applied for time ``tau``."""

    generators: tuple[PauliTerm, ...]
    coeffs: np.ndarray
    tau: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.coeffs, dtype=float)
        n = len(self.generators)
        if h.shape != (n, n):
            raise ValueError(f"coefficient array {h.shape} does not match {n} generators")
        if np.abs(h + h.T).max(initial=0.0) > 1e-12:
            raise ValueError("coefficient array must be antisymmetric with zero diagonal")
        object.__setattr__(self, "coeffs", h)
        object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def from_terms(cls, gens: Sequence[PauliTerm], terms: Iterable[tuple[int, int, float]], tau: float = 1.0):
        """Build from ``(j, k, value)`` triples with 0-based indices; ``k, j`` gets ``-value``."""
        n = len(gens)
        h = np.zeros((n, n))
        for j, k, val in terms:
            if j == k:
                raise ValueError(f"diagonal coefficient ({j}, {k}) is not allowed")
            h[j, k] += val
            h[k, j] -= val
        return cls(tuple(gens), h, tau)

    @property
    def n(self) -> int:
        return len(self.generators)

    def nonzero_pairs(self) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(np.triu(self.coeffs, 1))
        return [(int(a), int(b), float(self.coeffs[a, b])) for a, b in zip(rows, cols)]

    def spin_element_dense(self) -> np.ndarray:
        """Dense anti-Hermitian ``sum_{j<k} h_jk g_j g_k``."""
        width = self.generators[0].width
        out = np.zeros((2**width, 2**width), dtype=complex)
        for a, b, val in self.nonzero_pairs():
            out += val * to_dense(self.generators[a] * self.generators[b])
        return out

    def unitary_dense(self) -> np.ndarray:
        return scipy.linalg.expm(self.tau * self.spin_element_dense())


def structure_constants(ham: QuadraticHamiltonian) -> scipy.sparse.csr_matrix:
    """Sparse ``A`` with ``[sum h g g, g_j] = sum_k A[k, j] g_k``.

    Each pair term contributes ``[g_a g_b, g_a] = 2 g_a g_b g_a`` and
    ``[g_a g_b, g_b] = 2 g_a g_b g_b``; the products are reduced symbolically
    and matched back to the generator they are proportional to.
    """
    gens = ham.generators
    lookup = {(g.x, g.z): k for k, g in enumerate(gens)}
    rows, cols, vals = [], [], []
    for a, b, h in ham.nonzero_pairs():
        pair = multiply(gens[a], gens[b])
        for j in (a, b):
            t = multiply(pair, gens[j])
            k = lookup.get((t.x, t.z))
            if k is None:
                raise ValueError(f"commutator with g_{j} leaves the generator span")
            ratio = (t.phase - gens[k].phase) % 4
            if ratio not in (0, 2):
                raise ValueError(f"commutator with g_{j} is not a real multiple of g_{k}")
            rows.append(k)
            cols.append(j)
            vals.append(2.0 * h * (1 if ratio == 0 else -1))
    n = ham.n
    return scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


@dataclass(frozen=True)
class RotationMatrix:
    """Orthogonal ``n x n`` matrix stored as blocks on disjoint index sets.

    Indices outside every block are left fixed.
    """

    n: int
    blocks: tuple[tuple[np.ndarray, np.ndarray], ...] = ()

    @classmethod
    def identity(cls, n: int) -> RotationMatrix:
        return cls(n, ())

    @classmethod
    def from_dense(cls, r: np.ndarray) -> RotationMatrix:
        r = np.asarray(r, dtype=float)
        return cls(r.shape[0], ((np.arange(r.shape[0]), r),))

    @property
    def matrix(self) -> np.ndarray:
        out = np.eye(self.n)
        for idx, blk in self.blocks:
            out[np.ix_(idx, idx)] = blk
        return out

    def __matmul__(self, other: RotationMatrix) -> RotationMatrix:
        if self.n != other.n:
            raise ValueError("rotation sizes differ")
        return RotationMatrix.from_dense(self.matrix @ other.matrix)

    def orthogonality_error(self) -> float:
        err = 0.0
        for _, blk in self.blocks:
            err = max(err, np.abs(blk.T @ blk - np.eye(blk.shape[0])).max())
        return float(err)

    def det(self) -> float:
        return float(np.prod([np.linalg.det(blk) for _, blk in self.blocks]))

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.array(v, dtype=float, copy=True)
        for idx, blk in self.blocks:
            out[idx] = blk @ v[idx]
        return out


def adjoint_rotation(ham: QuadraticHamiltonian) -> RotationMatrix:
    """Rotation ``R`` with ``U g_j U^+ = sum_k R[k, j] g_k``.

    ``R = exp(tau A)`` is exponentiated separately on every connected
    component of the coupling graph of ``A``.
    """
    a = structure_constants(ham)
    if a.nnz == 0:
        return RotationMatrix.identity(ham.n)
    pattern = (abs(a) + abs(a.T)).tocsr()
    ncomp, label = connected_components(pattern, directed=False)
    touched = np.unique(np.concatenate([pattern.nonzero()[0], pattern.nonzero()[1]]))
    blocks = []
    for comp in np.unique(label[touched]):
        idx = np.flatnonzero(label == comp)
        sub = a[idx][:, idx].toarray()
        blocks.append((idx, scipy.linalg.expm(ham.tau * sub)))
    return RotationMatrix(ham.n, tuple(blocks))


def propagate_expectations(r: RotationMatrix, v: np.ndarray) -> np.ndarray:
    """``v'_j = sum_k R[j, k] v_k``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (r.n,):
        raise ValueError(f"vector of length {v.shape} does not match rotation size {r.n}")
    return r.apply(v)


def propagate_covariance(r: RotationMatrix, m: np.ndarray) -> np.ndarray:
    """``M' = R M R^T`` with the diagonal kept at zero."""
    m = np.asarray(m, dtype=float)
    if m.shape != (r.n, r.n):
        raise ValueError(f"covariance {m.shape} does not match rotation size {r.n}")
    out = m.copy()
    for idx, blk in r.blocks:
        out[idx, :] = blk @ out[idx, :]
    for idx, blk in r.blocks:
        out[:, idx] = out[:, idx] @ blk.T
    np.fill_diagonal(out, 0.0)
    return out


def basis_expectations(gens: Sequence[PauliTerm], bits: Sequence[int]) -> np.ndarray:
    """``<n|-i g_k|n>``: +-1 for z-only generators, 0 otherwise."""
    return np.array([basis_expectation(g.scale(-1), bits).real for g in gens])


def basis_covariance(gens: Sequence[PauliTerm], bits: Sequence[int]) -> np.ndarray:
    """``<n|i g_j g_k|n>``; only pairs with equal x-masks can be nonzero."""
    n = len(gens)
    out = np.zeros((n, n))
    groups: dict[int, list[int]] = {}
    for k, g in enumerate(gens):
        groups.setdefault(g.x, []).append(k)
    for members in groups.values():
        for j, k in itertools.combinations(members, 2):
            val = basis_expectation(multiply(gens[j], gens[k]).scale(1), bits).real
            out[j, k] = val
            out[k, j] = -val
    return out


def occupation_from_covariance(m: np.ndarray, first: int, second: int) -> float:
    """``<a^+ a> = (1 - M[e1, e2]) / 2`` for the mode built on generators ``first, second``."""
    return 0.5 * (1.0 - m[first, second])


def spin_basis(tree: QubitTree, include_first: bool = True) -> tuple[GeneratorSet, list[int]]:
    """Generator set and the index subset used by the spin form.

    Dropping the first generator gives the even-dimensional rotation group.
    """
    gs = generators(tree)
    idx = list(range(len(gs))) if include_first else list(range(1, len(gs)))
    return gs, idx


# ladder form ---------------------------------------------------------------------

@dataclass(frozen=True)
class ModeUnitary:
    u: np.ndarray

    @property
    def m(self) -> int:
        return self.u.shape[0]

    def unitarity_error(self) -> float:
        return float(np.abs(self.u.conj().T @ self.u - np.eye(self.m)).max())


def mode_unitary(hm: np.ndarray, tau: float) -> ModeUnitary:
    """``U = exp(-i hm tau)`` for a Hermitian single-mode coefficient matrix.

    For ``H = sum_{jk} hm[j, k] a_j^+ a_k`` and ``W = exp(-i H tau)`` this
    satisfies ``W a_k^+ W^+ = sum_j U[j, k] a_j^+``.
    """
    hm = np.asarray(hm, dtype=complex)
    if hm.ndim != 2 or hm.shape[0] != hm.shape[1]:
        raise ValueError("coefficient matrix must be square")
    if np.abs(hm - hm.conj().T).max(initial=0.0) > 1e-12:
        raise ValueError("coefficient matrix must be Hermitian")
    w, v = np.linalg.eigh(hm)
    return ModeUnitary((v * np.exp(-1j * w * tau)) @ v.conj().T)


def hm_from_quadratics(m: int, sigma=(), lam=()) -> np.ndarray:
    """Coefficient matrix of ``sum c Sigma_{j,k} + sum d Lambda_{j,k}``.

    ``sigma`` and ``lam`` hold ``(j, k, value)`` with 0-based mode indices;
    ``Sigma_{j,k} = (a_j^+ a_k + a_k^+ a_j)/2`` and
    ``Lambda_{j,k} = (a_j^+ a_k - a_k^+ a_j)/2i``.
    """
    hm = np.zeros((m, m), dtype=complex)
    for j, k, c in sigma:
        hm[j, k] += c / 2
        hm[k, j] += c / 2
    for j, k, d in lam:
        hm[j, k] += d / 2j
        hm[k, j] -= d / 2j
    return hm


def ladder_hamiltonian_dense(ladders, hm: np.ndarray) -> np.ndarray:
    mats = [a.to_dense() for a in ladders]
    out = np.zeros_like(mats[0])
    for j, aj in enumerate(mats):
        for k, ak in enumerate(mats):
            if hm[j, k] != 0:
                out += hm[j, k] * (aj.conj().T @ ak)
    return out


def propagate_path_state(u: ModeUnitary, chi: np.ndarray) -> np.ndarray:
    """Amplitudes over path states after the circuit: ``chi' = U chi``."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (u.m,):
        raise ValueError(f"amplitude vector {chi.shape} does not match m={u.m}")
    return u.u @ chi


def path_state_dense(ladders, chi: np.ndarray) -> np.ndarray:
    """Dense ``sum_k chi_k a_k^+ |0...0>``."""
    width = ladders[0].width
    vac = np.zeros(2**width, dtype=complex)
    vac[0] = 1.0
    return sum(c * (a.to_dense(dagger=True) @ vac) for c, a in zip(chi, ladders))


@dataclass(frozen=True)
class TransferCheck:
    ok: bool
    magnitudes: tuple[float, float, float]


def perfect_transfer_check(u: ModeUnitary, j: int, k: int, tol: float = 1e-8) -> TransferCheck:
    """Check ``|U[j,k]| = |U[2j,2k]| = |U[2j+1,2k+1]| = 1`` (1-based mode ids)."""
    m = u.m
    pairs = [(j, k), (2 * j, 2 * k), (2 * j + 1, 2 * k + 1)]
    for a, b in pairs:
        if not (1 <= a <= m and 1 <= b <= m):
            raise IndexError(f"mode pair ({a}, {b}) out of range 1..{m}")
    mags = tuple(float(abs(u.u[a - 1, b - 1])) for a, b in pairs)
    return TransferCheck(all(abs(x - 1) <= tol for x in mags), mags)


# two terminal qubits under a common parent -------------------------------------

def terminal_triple_generators(tree: QubitTree, parent: int) -> dict[int, PauliTerm]:
    """The seven generators ``g_j, g_2j, g_2j+1, g_4j .. g_4j+3`` around ``parent``."""
    levels = cf_binary_levels(tree)
    if levels is None or levels < 2:
        raise TreeError("needs a complete binary x-y tree with at least two levels")
    if not (2 ** (levels - 2) <= parent < 2 ** (levels - 1)):
        raise TreeError(f"node {parent} is not the parent of two terminal nodes")
    gs = generators(tree)
    j = parent
    return {
        j: gs.by_origin(j, "z"),
        2 * j: gs.by_origin(2 * j, "z"),
        2 * j + 1: gs.by_origin(2 * j + 1, "z"),
        4 * j: gs.by_origin(2 * j, "x"),
        4 * j + 1: gs.by_origin(2 * j, "y"),
        4 * j + 2: gs.by_origin(2 * j + 1, "x"),
        4 * j + 3: gs.by_origin(2 * j + 1, "y"),
    }


def terminal_pair_su4_set(tree: QubitTree, parent: int) -> list[PauliTerm]:
    """The 15 pair products that leave a parent qubit in ``|0>`` untouched.

    Returned as Hermitian words ordered ``sigma_2j^mu``, ``sigma_2j+1^nu``,
    ``Z_j sigma_2j^mu sigma_2j+1^nu`` with ``mu, nu`` in x, y, z.
    """
    gens = list(terminal_triple_generators(tree, parent).values())
    pj = tree.position(parent)
    keep = {}
    for a, b in itertools.combinations(gens, 2):
        w = multiply(a, b).word()
        if w.letter(pj) in "IZ":
            keep[(w.x, w.z)] = w
    p1, p2 = tree.position(2 * parent), tree.position(2 * parent + 1)

    def key(w: PauliTerm):
        order = "IXYZ"
        return (w.letter(pj) == "Z", w.letter(p1) == "I", order.index(w.letter(p1)), order.index(w.letter(p2)))

    return sorted(keep.values(), key=key)


def lie_closure_dimension(mats: Sequence[np.ndarray], tol: float = 1e-9, max_dim: int = 4096) -> int:
    """Real dimension of the Lie algebra generated by anti-Hermitian ``mats``."""

    def vec(a):
        return np.concatenate([a.real.ravel(), a.imag.ravel()])

    basis_vecs: list[np.ndarray] = []
    basis_mats: list[np.ndarray] = []

    def add(a) -> bool:
        v = vec(a)
        for b in basis_vecs:
            v = v - (b @ v) * b
        nrm = np.linalg.norm(v)
        if nrm <= tol * max(1.0, np.linalg.norm(vec(a))):
            return False
        basis_vecs.append(v / nrm)
        basis_mats.append(a)
        return True

    frontier = [a for a in mats if add(a)]
    while frontier and len(basis_mats) < max_dim:
        new = []
        for a in frontier:
            for b in list(basis_mats):
                c = a @ b - b @ a
                if add(c):
                    new.append(c)
        frontier = new
    return len(basis_mats)


# circuits -----------------------------------------------------------------------

@dataclass
class SpinRun:
    """Per-step generator expectations (and optionally covariances)."""

    vectors: list[np.ndarray] = field(default_factory=list)
    covariances: list[np.ndarray] = field(default_factory=list)
    rotations: list[RotationMatrix] = field(default_factory=list)


def run_spin_circuit(
    gens: Sequence[PauliTerm],
    steps: Sequence[QuadraticHamiltonian],
    v0: np.ndarray,
    m0: np.ndarray | None = None,
) -> SpinRun:
    run = SpinRun()
    v, cov = np.asarray(v0, dtype=float), m0
    for ham in steps:
        if tuple(ham.generators) != tuple(gens):
            raise ValueError("step Hamiltonian uses a different generator list")
        r = adjoint_rotation(ham)
        v = propagate_expectations(r, v)
        run.vectors.append(v)
        run.rotations.append(r)
        if cov is not None:
            cov = propagate_covariance(r, cov)
            run.covariances.append(cov)
    return run


def brickwork_step(gens: Sequence[PauliTerm], levels: int, parity: int, rng: np.random.Generator, tau: float = 1.0) -> QuadraticHamiltonian:
    """Random couplings inside every triple ``(j, 2j, 2j+1)`` with ``floor(log2 j)`` of the given parity.

    Indices are in the consecutive binary-tree generator numbering (1-based),
    so triples on levels of equal parity never overlap.
    """
    n = len(gens)
    terms = []
    for j in range(1, 2 ** (levels - 1)):
        if (j.bit_length() - 1) % 2 != parity % 2:
            continue
        a, b, c = j - 1, 2 * j - 1, 2 * j
        for p, q in ((a, b), (a, c), (b, c)):
            terms.append((p, q, float(rng.normal())))
    if n != 2 ** (levels + 1) - 1:
        raise ValueError(f"{n} generators do not match a {levels}-level binary tree")
    return QuadraticHamiltonian.from_terms(gens, terms, tau)
