"""Entropies, divergences, norms and channel-distance estimates (all logs base 2)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import check_density, dagger, partial_trace
from .optimize import OptimizerConfig, maximize, multistart, pack, random_state, sphere_grad, unpack

SUPPORT_TOL = 1e-12


def _eigvals(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.clip(np.linalg.eigvalsh((rho + dagger(rho)) / 2), 0.0, None)


def entropy_of_spectrum(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def von_neumann_entropy(rho: np.ndarray, validate: bool = True) -> float:
    """S(rho) = -sum lambda log2 lambda."""
    if validate:
        rho = check_density(rho)
    return entropy_of_spectrum(_eigvals(rho))


def relative_entropy(alpha: np.ndarray, beta: np.ndarray) -> float:
    """D(alpha || beta) in bits; ``inf`` if supp(alpha) is not inside supp(beta)."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    if alpha.shape != beta.shape:
        raise ValueError(f"dimension mismatch: {alpha.shape} vs {beta.shape}")
    wa, va = np.linalg.eigh((alpha + dagger(alpha)) / 2)
    wb, vb = np.linalg.eigh((beta + dagger(beta)) / 2)
    ker = vb[:, wb <= SUPPORT_TOL]
    if ker.shape[1] and np.real(np.trace(dagger(ker) @ alpha @ ker)) > SUPPORT_TOL:
        return float("inf")
    wa = np.clip(wa, 0.0, None)
    keep_a = wa > 0
    term_a = float(np.sum(wa[keep_a] * np.log2(wa[keep_a])))
    sup = wb > SUPPORT_TOL
    # Tr alpha log beta restricted to supp(beta)
    overlap = np.abs(dagger(vb[:, sup]) @ va[:, keep_a]) ** 2
    term_b = float(np.sum(overlap * np.log2(wb[sup])[:, None] * wa[keep_a][None, :]))
    return max(0.0, term_a - term_b)


def mutual_information(rho: np.ndarray, dims: Sequence[int], part: Sequence[int]) -> float:
    """I(X:Y) = S(X) + S(Y) - S(XY), where X is the set of subsystems ``part``."""
    rho = check_density(rho)
    n = len(dims)
    part = sorted(set(int(i) for i in part))
    if not part or len(part) == n or any(i < 0 or i >= n for i in part):
        raise ValueError(f"bad cut {part} for {n} subsystems")
    rest = [i for i in range(n) if i not in part]
    sx = von_neumann_entropy(partial_trace(rho, dims, part), validate=False)
    sy = von_neumann_entropy(partial_trace(rho, dims, rest), validate=False)
    return sx + sy - von_neumann_entropy(rho, validate=False)


def holevo_quantity(probs: Sequence[float], states: Sequence[np.ndarray]) -> float:
    """S(sum p rho) - sum p S(rho)."""
    p = np.asarray(probs, dtype=float)
    states = np.asarray(states, dtype=complex)
    avg = np.tensordot(p, states, axes=1)
    return von_neumann_entropy(avg, validate=False) - sum(
        pi * von_neumann_entropy(s, validate=False) for pi, s in zip(p, states) if pi > 0)


def binary_entropy(p: float) -> float:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability {p} outside [0, 1]")
    return entropy_of_spectrum([p, 1.0 - p])


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)))


# -- channel distances -------------------------------------------------------------

@dataclass
class ChannelDistanceEstimate:
    value: float
    kind: str  # "diamond-lower-bound" or "induced-trace-norm"
    witness: np.ndarray

    def to_json(self) -> dict:
        return {"value": self.value, "kind": self.kind,
                "witness": {"re": self.witness.real.tolist(), "im": self.witness.imag.tolist()}}


def _lifted_kraus(kraus: np.ndarray, ref: int) -> np.ndarray:
    return np.array([np.kron(np.eye(ref), k) for k in kraus])


def _difference_norm(ka: np.ndarray, kb: np.ndarray, psi: np.ndarray):
    """||sum A psi psi^† A^† - sum B psi psi^† B^†||_1 and its gradient w.r.t. psi."""
    va = ka @ psi
    vb = kb @ psi
    y = va.T @ va.conj() - vb.T @ vb.conj()
    w, u = np.linalg.eigh(y)
    s = (u * np.sign(w)) @ dagger(u)
    g = 2 * (np.einsum("kji,jl,kl->i", ka.conj(), s, va) - np.einsum("kji,jl,kl->i", kb.conj(), s, vb))
    return float(np.sum(np.abs(w))), g


def _distance_search(ka, kb, dim, cfg):
    def local(rng, _r):
        def fun(x):
            psi, nrm = unpack(x, dim)
            v, g = _difference_norm(ka, kb, psi)
            return v, sphere_grad(psi, nrm, g)
        res = maximize(fun, pack(random_state(rng, dim)), cfg)
        psi, _ = unpack(res.x, dim)
        res.payload["witness"] = psi
        res.value = _difference_norm(ka, kb, psi)[0]
        return res
    return multistart(local, cfg)


def _check_pair(n1, n2):
    if (n1.dim_in, n1.dim_out) != (n2.dim_in, n2.dim_out):
        raise ValueError("channels must have equal input and output dimensions")


def induced_trace_norm_lower_bound(n1, n2, restarts: int = 32, seed: int = 0) -> ChannelDistanceEstimate:
    """max over pure inputs (no reference system) of ||N1(psi) - N2(psi)||_1."""
    _check_pair(n1, n2)
    cfg = OptimizerConfig(restarts=restarts, seed=seed)
    best = _distance_search(n1.kraus, n2.kraus, n1.dim_in, cfg).best
    return ChannelDistanceEstimate(best.value, "induced-trace-norm", best.payload["witness"])


def diamond_distance_lower_bound(n1, n2, restarts: int = 32, seed: int = 0) -> ChannelDistanceEstimate:
    """Lower bound on ||N1 - N2||_diamond from a pure-state search on R⊗A, |R| = |A|.

    The induced-trace-norm optimum, lifted to |0>_R ⊗ psi, is included as a
    candidate so the diamond estimate is never below the induced one.
    """
    _check_pair(n1, n2)
    d = n1.dim_in
    ka, kb = _lifted_kraus(n1.kraus, d), _lifted_kraus(n2.kraus, d)
    cfg = OptimizerConfig(restarts=restarts, seed=seed)
    best = _distance_search(ka, kb, d * d, cfg).best
    value, witness = best.value, best.payload["witness"]
    plain = _distance_search(n1.kraus, n2.kraus, d, cfg).best
    if plain.value > value:
        witness = np.kron(np.eye(d)[0], plain.payload["witness"]).astype(complex)
        value = _difference_norm(ka, kb, witness)[0]
    return ChannelDistanceEstimate(min(value, 2.0), "diamond-lower-bound", witness)


def evaluate_distance(n1, n2, est: ChannelDistanceEstimate) -> float:
    """Re-evaluate an estimate at its witness."""
    d = n1.dim_in
    if est.kind == "diamond-lower-bound":
        return _difference_norm(_lifted_kraus(n1.kraus, d), _lifted_kraus(n2.kraus, d), est.witness)[0]
    return _difference_norm(n1.kraus, n2.kraus, est.witness)[0]


__all__ = [
    "von_neumann_entropy", "relative_entropy", "mutual_information", "holevo_quantity",
    "binary_entropy", "trace_norm", "ChannelDistanceEstimate", "diamond_distance_lower_bound",
    "induced_trace_norm_lower_bound", "evaluate_distance", "entropy_of_spectrum",
]
