"""Bipartite unitaries W: A⊗E -> B⊗F and the channels they induce.

A :class:`BipartiteUnitary` stores a ``(dB*dF, dA*dE)`` matrix; input index
order is (A, E), output index order is (B, F), first factor slowest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .linalg import (check_density, dagger, isometry_check, ket, kron,
                     matrix_from_json, max_entangled, partial_trace,
                     permute_systems, proj)

TP_TOL = 1e-9
CQ_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BipartiteUnitary:
    matrix: np.ndarray
    dim_a: int
    dim_e: int
    dim_b: int
    dim_f: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if self.dim_a * self.dim_e != self.dim_b * self.dim_f:
            raise ValueError("need dim_a*dim_e == dim_b*dim_f")
        if m.shape != (self.dim_b * self.dim_f, self.dim_a * self.dim_e):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims}")
        if not isometry_check(m, 1e-10):
            raise ValueError("matrix is not unitary to 1e-10")

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.dim_a, self.dim_e, self.dim_b, self.dim_f)

    @property
    def tensor(self) -> np.ndarray:
        """Four-index view ``W[b, f, a, e]``."""
        return self.matrix.reshape(self.dim_b, self.dim_f, self.dim_a, self.dim_e)

    def conj(self) -> "BipartiteUnitary":
        return BipartiteUnitary(self.matrix.conj(), *self.dims)

    def __matmul__(self, vec):
        return self.matrix @ vec


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map stored as Kraus operators of shape ``(dim_out, dim_in)``."""

    kraus: tuple
    dim_in: int
    dim_out: int

    def __post_init__(self):
        ks = np.asarray([np.asarray(k, dtype=complex) for k in self.kraus])
        if ks.ndim != 3 or ks.shape[1:] != (self.dim_out, self.dim_in):
            raise ValueError("Kraus operators must all be dim_out x dim_in")
        object.__setattr__(self, "kraus", ks)
        tp = np.einsum("kji,kjl->il", ks.conj(), ks)
        if np.max(np.abs(tp - np.eye(self.dim_in))) > TP_TOL:
            raise ValueError("Kraus operators are not trace preserving")

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_channel(self, rho)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray]) -> "QuantumChannel":
        ks = [np.atleast_2d(np.asarray(k, dtype=complex)) for k in kraus]
        return cls(tuple(ks), ks[0].shape[1], ks[0].shape[0])


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ValueError("probabilities must be non-negative and sum to 1")
        states = tuple(np.asarray(s, dtype=complex) for s in self.states)
        if len(states) != len(p):
            raise ValueError("one state per probability")
        if len({s.shape for s in states}) != 1:
            raise ValueError("states must share a dimension")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)


# -- channels from a bipartite unitary ---------------------------------------

def _env_decomposition(eta: np.ndarray, dim: int):
    """Pure components (weight, vector) of a state vector or density matrix."""
    eta = np.asarray(eta, dtype=complex)
    if eta.ndim == 1:
        if eta.shape[0] != dim:
            raise ValueError(f"environment state has dimension {eta.shape[0]}, expected {dim}")
        return [(1.0, eta / np.linalg.norm(eta))]
    if eta.shape != (dim, dim):
        raise ValueError(f"environment state has shape {eta.shape}, expected {(dim, dim)}")
    w, v = np.linalg.eigh(check_density(eta))
    return [(w[i], v[:, i]) for i in range(dim) if w[i] > 1e-14]


def effective_channel(w: BipartiteUnitary, eta: np.ndarray) -> QuantumChannel:
    """The channel A -> B with the environment prepared in ``eta``.

    Kraus operators are ``(I_B ⊗ <f|) W (· ⊗ |eta>)``; a mixed ``eta`` is
    purified, which multiplies the Kraus set by its eigen-decomposition.
    """
    kraus = []
    for weight, vec in _env_decomposition(eta, w.dim_e):
        ks = np.einsum("bfae,e->fba", w.tensor, vec) * np.sqrt(weight)
        kraus.extend(ks)
    return QuantumChannel(tuple(kraus), w.dim_a, w.dim_b)


def apply_channel(n: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = proj(rho)
    if rho.shape != (n.dim_in, n.dim_in):
        raise ValueError(f"input has shape {rho.shape}, channel expects dimension {n.dim_in}")
    return np.einsum("kij,jl,kml->im", n.kraus, rho, n.kraus.conj())


def entanglement_assisted_channel(w: BipartiteUnitary, kappa: np.ndarray, dim_k: int) -> QuantumChannel:
    """rho -> (N ⊗ id_K)(rho ⊗ kappa) for a state ``kappa`` on E⊗K; output order (B, K)."""
    kraus = []
    for weight, vec in _env_decomposition(kappa, w.dim_e * dim_k):
        ks = np.einsum("bfae,ek->fbka", w.tensor, vec.reshape(w.dim_e, dim_k))
        kraus.extend(ks.reshape(w.dim_f, w.dim_b * dim_k, w.dim_a) * np.sqrt(weight))
    return QuantumChannel(tuple(kraus), w.dim_a, w.dim_b * dim_k)


def conferencing_output(w: BipartiteUnitary, alpha: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Tr_F W (alpha ⊗ eta) W^dagger for states on A and E (vectors or matrices)."""
    alpha = np.asarray(alpha, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    a = proj(alpha) if alpha.ndim == 1 else alpha
    e = proj(eta) if eta.ndim == 1 else eta
    if a.shape != (w.dim_a, w.dim_a) or e.shape != (w.dim_e, w.dim_e):
        raise ValueError("input states do not match the unitary's A and E dimensions")
    out = w.matrix @ np.kron(a, e) @ dagger(w.matrix)
    return partial_trace(out, (w.dim_b, w.dim_f), [0])


def output_state(w: BipartiteUnitary, alpha_vec: np.ndarray, eta_vec: np.ndarray) -> np.ndarray:
    """Output on B for pure product input, via the output vector on B⊗F."""
    v = (w.matrix @ np.kron(alpha_vec, eta_vec)).reshape(w.dim_b, w.dim_f)
    return v @ dagger(v)


# -- constructions -------------------------------------------------------------

def shift(d: int, x: int) -> np.ndarray:
    """X(x)|j> = |j + x mod d>."""
    return np.roll(np.eye(d, dtype=complex), x % d, axis=0)


def phase(d: int, z: int) -> np.ndarray:
    """Z(z)|j> = omega^(z j)|j> with omega = exp(2 pi i / d)."""
    return np.diag(np.exp(2j * np.pi * z * np.arange(d) / d))


def weyl(d: int, x: int, z: int) -> np.ndarray:
    if not (0 <= x < d and 0 <= z < d):
        raise ValueError(f"Weyl indices must lie in [0, {d})")
    return shift(d, x) @ phase(d, z)


def swap_operator(dim_a: int, dim_e: int) -> BipartiteUnitary:
    """|a>_A|e>_E -> |e>_B|a>_F."""
    m = np.zeros((dim_e * dim_a, dim_a * dim_e), dtype=complex)
    for a in range(dim_a):
        for e in range(dim_e):
            m[e * dim_a + a, a * dim_e + e] = 1.0
    return BipartiteUnitary(m, dim_a, dim_e, dim_e, dim_a)


def controlled_unitary(blocks: Sequence[np.ndarray]) -> BipartiteUnitary:
    """sum_i |i>_F <i|_A ⊗ U_i (E -> B)."""
    blocks = [np.asarray(u, dtype=complex) for u in blocks]
    if not blocks:
        raise ValueError("need at least one block")
    k = blocks[0].shape[0]
    for u in blocks:
        if u.shape != (k, k):
            raise ValueError("blocks must be square and of equal size")
        if np.max(np.abs(dagger(u) @ u - np.eye(k))) > 1e-10:
            raise ValueError("controlled_unitary blocks must be unitary")
    n = len(blocks)
    t = np.zeros((k, n, n, k), dtype=complex)
    for i, u in enumerate(blocks):
        t[:, i, i, :] = u
    return BipartiteUnitary(t.reshape(k * n, n * k), n, k, k, n)


def tensor_product(w1: BipartiteUnitary, w2: BipartiteUnitary) -> BipartiteUnitary:
    """W1 ⊗ W2 regrouped as (A1 A2)⊗(E1 E2) -> (B1 B2)⊗(F1 F2)."""
    m = np.kron(w1.matrix, w2.matrix)
    m = permute_systems(m, (w1.dim_b, w1.dim_f, w2.dim_b, w2.dim_f), (0, 2, 1, 3),
                        col_dims=(w1.dim_a, w1.dim_e, w2.dim_a, w2.dim_e), col_perm=(0, 2, 1, 3))
    return BipartiteUnitary(m, w1.dim_a * w2.dim_a, w1.dim_e * w2.dim_e,
                            w1.dim_b * w2.dim_b, w1.dim_f * w2.dim_f)


def extend_environment(w: BipartiteUnitary, dim_k: int) -> BipartiteUnitary:
    """W ⊗ id_K as a unitary A⊗(E K) -> (B K)⊗F: helper shares K with the receiver."""
    m = np.kron(w.matrix, np.eye(dim_k))
    m = permute_systems(m, (w.dim_b, w.dim_f, dim_k), (0, 2, 1),
                        col_dims=(w.dim_a, w.dim_e, dim_k), col_perm=(0, 1, 2))
    return BipartiteUnitary(m, w.dim_a, w.dim_e * dim_k, w.dim_b * dim_k, w.dim_f)


def swap_roles(w: BipartiteUnitary) -> BipartiteUnitary:
    """The same interaction with sender and helper inputs exchanged (E⊗A -> B⊗F)."""
    m = permute_systems(w.matrix, (w.dim_b * w.dim_f,), (0,),
                        col_dims=(w.dim_a, w.dim_e), col_perm=(1, 0))
    return BipartiteUnitary(m, w.dim_e, w.dim_a, w.dim_b, w.dim_f)


def shor_augment(w: BipartiteUnitary) -> BipartiteUnitary:
    """Augmented unitary (L⊗A)⊗E -> B⊗(F⊗L) with |L| = d^2.

    After ``w``, the Weyl operator W(x, z) = X(x) Z(z) acts on B controlled by
    the register state |xz> (x slow, z fast); the register ends up in F.
    """
    d = w.dim_a
    if not (w.dim_b == w.dim_e == w.dim_f == d):
        raise ValueError("shor_augment needs |A| = |E| = |B| = |F|")
    L = d * d
    ops = np.array([weyl(d, x, z) for x in range(d) for z in range(d)])
    r = np.einsum("lcb,bfae->lcfae", ops, w.tensor)
    t = np.zeros((d, d, L, L, d, d), dtype=complex)
    for l in range(L):
        t[:, :, l, l, :, :] = r[l]
    return BipartiteUnitary(t.reshape(d * d * L, L * d * d), L * d, d, d, d * L)


# -- structure tests -------------------------------------------------------------

def is_classical_quantum(n: QuantumChannel, basis: np.ndarray | None = None, tol: float = CQ_TOL) -> bool:
    """True iff N(|i><j|) = 0 for all i != j in the given orthonormal basis (columns)."""
    basis = np.eye(n.dim_in, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if basis.shape != (n.dim_in, n.dim_in) or np.max(np.abs(dagger(basis) @ basis - np.eye(n.dim_in))) > 1e-10:
        raise ValueError("basis must be an orthonormal basis of the input space")
    kb = n.kraus @ basis
    t = np.einsum("kbi,kcj->ijbc", kb, kb.conj())
    off = ~np.eye(n.dim_in, dtype=bool)
    return bool(np.max(np.abs(t[off]), initial=0.0) <= tol)


def is_constant_channel(n: QuantumChannel, tol: float = CQ_TOL) -> bool:
    """Output independent of input: N(|i><j|) = delta_ij N(|0><0|)."""
    t = np.einsum("kbi,kcj->ijbc", n.kraus, n.kraus.conj())
    ref = t[0, 0]
    target = np.einsum("ij,bc->ijbc", np.eye(n.dim_in), ref)
    return bool(np.max(np.abs(t - target)) <= tol)


def is_universally_constant(w: BipartiteUnitary, tol: float = CQ_TOL) -> bool:
    """True iff every effective channel N_eta is constant (capacity zero for all helpers).

    Checks Tr_F W(|i><j| ⊗ Y)W^dagger = delta_ij Tr_F W(|0><0| ⊗ Y)W^dagger on
    an operator basis of E.
    """
    t = np.einsum("bfak,cfjl->ajklbc", w.tensor, w.tensor.conj())
    ref = t[0, 0]
    target = np.einsum("aj,klbc->ajklbc", np.eye(w.dim_a), ref)
    return bool(np.max(np.abs(t - target)) <= tol)


def choi(n: QuantumChannel) -> np.ndarray:
    """(id ⊗ N)(Phi) with Phi the normalized maximally entangled state; order (reference, output)."""
    d = n.dim_in
    phi = max_entangled(d)
    vecs = np.einsum("kbi,ij->kjb", n.kraus, phi.reshape(d, d)).reshape(len(n.kraus), -1)
    return vecs.T @ vecs.conj()


def kraus_from_choi(j: np.ndarray, dim_in: int, dim_out: int, tol: float = 1e-12) -> QuantumChannel:
    w, v = np.linalg.eigh(dim_in * np.asarray(j, dtype=complex))
    kraus = [np.sqrt(w[i]) * v[:, i].reshape(dim_in, dim_out).T for i in range(len(w)) if w[i] > tol]
    return QuantumChannel(tuple(kraus), dim_in, dim_out)


def partial_transpose(m: np.ndarray, dims: Sequence[int], sys: int = 0) -> np.ndarray:
    dims = tuple(dims)
    n = len(dims)
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return t.transpose(axes).reshape(m.shape)


def is_entanglement_breaking(n: QuantumChannel, tol: float = 1e-12):
    """PPT test on the Choi state.

    Returns ``False`` when the partial transpose has a negative eigenvalue,
    ``True`` when it is positive and ``dim_in*dim_out <= 6`` (PPT is then
    equivalent to separability) or the channel is classical-quantum or
    constant, and ``None`` (inconclusive) otherwise.
    """
    j = choi(n)
    ppt = np.linalg.eigvalsh(partial_transpose(j, (n.dim_in, n.dim_out), 0))[0] >= -tol
    if not ppt:
        return False
    if n.dim_in * n.dim_out <= 6 or is_constant_channel(n) or is_classical_quantum(n):
        return True
    return None


# -- gate registry -----------------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

QUTRIT_BLOCKS = (
    np.eye(3, dtype=complex),
    np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex),
    np.diag([1, -1, 1]).astype(complex),
)


def cnot() -> BipartiteUnitary:
    """Standard CNOT, control on A, target on E; B carries the control wire."""
    m = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    return BipartiteUnitary(m, 2, 2, 2, 2)


def dcnot() -> BipartiteUnitary:
    """CNOT(A -> E) followed by CNOT(E -> A)."""
    c12 = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    c21 = np.eye(4, dtype=complex)[[0, 3, 2, 1]]
    return BipartiteUnitary(c21 @ c12, 2, 2, 2, 2)


def qutrit_vc() -> BipartiteUnitary:
    return controlled_unitary(QUTRIT_BLOCKS)


def weyl_vc(d: int) -> BipartiteUnitary:
    """sum_{x,z} |xz>_F <xz|_A ⊗ W(x, z): |A| = |F| = d^2, |E| = |B| = d."""
    return controlled_unitary([weyl(d, x, z) for x in range(d) for z in range(d)])


def uc2_blocks(u: float):
    """A pair of qubit blocks whose controlled unitary sits at edge parameter ``u``."""
    theta = np.pi - 2 * u
    rz = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    return [np.eye(2, dtype=complex), rz]


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def load_blocks(path: str):
    obj = _load_json(path)
    items = obj["blocks"] if isinstance(obj, dict) else obj
    return [matrix_from_json(b) for b in items]


def load_unitary(path: str) -> BipartiteUnitary:
    obj = _load_json(path)
    m = matrix_from_json(obj)
    if "dims" in obj:
        dims = [int(x) for x in obj["dims"]]
    else:
        k = int(round(np.sqrt(m.shape[1])))
        if k * k != m.shape[1] or m.shape[0] != m.shape[1]:
            raise ValueError("matrix file without 'dims' must be square of square dimension")
        dims = [k, k, k, k]
    return BipartiteUnitary(m, *dims)


def resolve_gate(name: str) -> BipartiteUnitary:
    """Look up a gate by registry name.

    Names: identity, swap, cnot, dcnot, qutrit-vc, weyl-vc:<d>, uc2:<u>,
    controlled:<json file of blocks>, file:<json matrix file>.
    """
    fixed = {
        "identity": lambda: BipartiteUnitary(np.eye(4), 2, 2, 2, 2),
        "swap": lambda: swap_operator(2, 2),
        "cnot": cnot,
        "dcnot": dcnot,
        "qutrit-vc": qutrit_vc,
    }
    if name in fixed:
        return fixed[name]()
    kind, _, arg = name.partition(":")
    if kind == "weyl-vc" and arg:
        return weyl_vc(int(arg))
    if kind == "uc2" and arg:
        return controlled_unitary(uc2_blocks(float(arg)))
    if kind == "controlled" and arg:
        return controlled_unitary(load_blocks(arg))
    if kind == "file" and arg:
        return load_unitary(arg)
    raise ValueError(f"unknown gate {name!r}")


__all__ = [
    "BipartiteUnitary", "QuantumChannel", "Ensemble", "effective_channel", "apply_channel",
    "entanglement_assisted_channel", "conferencing_output", "output_state", "weyl", "shift",
    "phase", "swap_operator", "controlled_unitary", "tensor_product", "extend_environment",
    "swap_roles", "shor_augment", "is_classical_quantum", "is_constant_channel",
    "is_universally_constant", "choi", "kraus_from_choi", "is_entanglement_breaking",
    "partial_transpose", "resolve_gate", "cnot", "dcnot", "qutrit_vc", "weyl_vc", "uc2_blocks",
    "QUTRIT_BLOCKS", "PAULI_X", "PAULI_Y", "PAULI_Z", "ket", "kron",
]
