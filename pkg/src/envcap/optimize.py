"""Multi-start local optimization over products of unit spheres.

Pure states are parametrized by unnormalized real vectors ``[Re z, Im z]``; the
state is ``z / |z|``.  Objectives supply exact gradients, so local refinement
is done by L-BFGS from uniformly random (Haar) starting points.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg import dagger

LN2 = np.log(2.0)
EIG_FLOOR = 1e-16


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs shared by every non-convex search.

    ``ensemble_size=None`` lets each routine pick its own default.
    """

    restarts: int = 32
    max_iterations: int = 10_000
    tolerance: float = 1e-10
    seed: int = 0
    ensemble_size: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def replace(self, **kw) -> "OptimizerConfig":
        data = dict(self.__dict__)
        data.update(kw)
        return OptimizerConfig(**data)


@dataclass
class LocalResult:
    value: float
    x: np.ndarray
    iterations: int
    payload: dict = field(default_factory=dict)


@dataclass
class MultiStartResult:
    best: LocalResult
    best_index: int
    values: list[float]
    iterations: int

    def trace(self) -> dict:
        return {
            "restarts": len(self.values),
            "best_start": self.best_index,
            "iterations": self.iterations,
        }


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def unpack(u: np.ndarray, dim: int):
    z = u[:dim] + 1j * u[dim:2 * dim]
    nrm = np.linalg.norm(z)
    if nrm == 0:
        z = np.zeros(dim, dtype=complex)
        z[0] = 1.0
        nrm = 1.0
    return z / nrm, nrm


def pack(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.concatenate([psi.real, psi.imag])


def sphere_grad(a: np.ndarray, nrm: float, g: np.ndarray) -> np.ndarray:
    """Real gradient of J w.r.t. ``u`` given dJ = Re<da, g> at ``a = z/|z|``."""
    g = g - np.real(np.vdot(a, g)) * a
    g = g / nrm
    return np.concatenate([g.real, g.imag])


def maximize(fun: Callable, x0: np.ndarray, cfg: OptimizerConfig) -> LocalResult:
    """Local maximization of ``fun(x) -> (value, grad)``."""

    def neg(x):
        v, g = fun(x)
        return -v, -g

    res = minimize(neg, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": cfg.max_iterations, "ftol": cfg.tolerance,
                            "gtol": 1e-10, "maxcor": 20})
    return LocalResult(value=float(-res.fun), x=res.x, iterations=int(res.nit))


def multistart(local: Callable[[np.random.Generator, int], LocalResult],
               cfg: OptimizerConfig) -> MultiStartResult:
    """Run ``local`` once per restart and keep the maximum.

    Restart ``r`` draws from ``default_rng(seed + r)``; ties go to the lowest
    restart index, so the result does not depend on ``cfg.threads``.
    """

    def run(r):
        return local(np.random.default_rng(cfg.seed + r), r)

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(run, range(cfg.restarts)))
    else:
        results = [run(r) for r in range(cfg.restarts)]
    values = [res.value for res in results]
    best_index = int(np.argmax(values))
    return MultiStartResult(best=results[best_index], best_index=best_index,
                            values=values,
                            iterations=sum(res.iterations for res in results))


def _entropy_and_log(sig: np.ndarray):
    """Batched entropy (bits) and matrix log2 of Hermitian PSD matrices."""
    w, u = np.linalg.eigh(sig)
    w = np.clip(w, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0), axis=-1)
    logw = np.log2(np.maximum(w, EIG_FLOOR))
    logm = (u * logw[..., None, :]) @ dagger(u)
    return ent, logm


class EnsembleObjective:
    """Holevo quantity (or output entropy) of product inputs through an isometry.

    Member ``x`` feeds ``a_x ⊗ e_x`` into ``w`` (shape ``(dB*dF, dA*dE)``) and
    receives ``Tr_F`` of the output.  Inputs and environment states are each
    ``"free"`` (one per member), ``"shared"`` (one for all members) or a fixed
    array.  A shared environment may be restricted to a product over
    ``env_factors``.  ``mode="holevo"`` maximizes S(avg) - sum p S(out_x);
    ``mode="neg_entropy"`` maximizes -S(out_0) for a single member.
    """

    def __init__(self, w, dims, members, inputs="free", env="shared",
                 env_factors=None, probs=None, mode="holevo"):
        self.w = np.asarray(w, dtype=complex)
        self.dA, self.dE, self.dB, self.dF = (int(x) for x in dims)
        if self.w.shape != (self.dB * self.dF, self.dA * self.dE):
            raise ValueError(f"isometry shape {self.w.shape} inconsistent with dims {dims}")
        self.m = int(members)
        self.mode = mode
        if mode == "neg_entropy" and self.m != 1:
            raise ValueError("entropy mode takes a single member")
        self.inputs = inputs if isinstance(inputs, str) else np.asarray(inputs, dtype=complex).reshape(self.m, self.dA)
        if isinstance(env, str):
            self.env = env
        else:
            env = np.asarray(env, dtype=complex)
            self.env = np.broadcast_to(env.reshape(-1, self.dE), (self.m, self.dE)).copy()
        if env_factors is not None and not (isinstance(env, str) and env == "shared"):
            raise ValueError("env_factors only apply to a shared environment")
        self.env_factors = tuple(env_factors) if env_factors is not None else (self.dE,)
        if int(np.prod(self.env_factors)) != self.dE:
            raise ValueError("env_factors must multiply to dim E")
        self.fixed_probs = None if probs is None else np.asarray(probs, dtype=float)
        self.learn_probs = mode == "holevo" and self.fixed_probs is None and self.m > 1

        blocks = []
        if isinstance(self.inputs, str):
            blocks += [("a", i, self.dA) for i in range(self.m if self.inputs == "free" else 1)]
        if isinstance(self.env, str):
            if self.env == "free":
                blocks += [("e", i, self.dE) for i in range(self.m)]
            else:
                blocks += [("f", k, d) for k, d in enumerate(self.env_factors)]
        self.blocks = blocks
        self.size = sum(2 * d for _, _, d in blocks) + (self.m if self.learn_probs else 0)

    # -- parameter handling -------------------------------------------------
    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        parts = [pack(random_state(rng, d)) for _, _, d in self.blocks]
        if self.learn_probs:
            parts.append(0.1 * rng.standard_normal(self.m))
        return np.concatenate(parts) if parts else np.zeros(0)

    def decode(self, theta: np.ndarray):
        pos = 0
        A = None if isinstance(self.inputs, str) else self.inputs
        E = None if isinstance(self.env, str) else self.env
        a_list, e_list, f_list, norms = [], [], [], []
        for kind, _, d in self.blocks:
            vec, nrm = unpack(theta[pos:pos + 2 * d], d)
            pos += 2 * d
            norms.append(nrm)
            {"a": a_list, "e": e_list, "f": f_list}[kind].append(vec)
        if A is None:
            A = np.array(a_list) if self.inputs == "free" else np.repeat(np.array(a_list), self.m, axis=0)
        if E is None:
            if self.env == "free":
                E = np.array(e_list)
            else:
                e = f_list[0]
                for f in f_list[1:]:
                    e = np.kron(e, f)
                E = np.repeat(e[None, :], self.m, axis=0)
        if self.learn_probs:
            t = theta[pos:pos + self.m]
            t = t - t.max()
            p = np.exp(t)
            p /= p.sum()
        elif self.fixed_probs is not None:
            p = self.fixed_probs
        else:
            p = np.ones(self.m) / self.m
        return A, E, p, f_list, norms

    def outputs(self, A: np.ndarray, E: np.ndarray) -> np.ndarray:
        """Output factors M_x with out_x = M_x M_x^dagger, shape (m, dB, dF)."""
        X = (A[:, :, None] * E[:, None, :]).reshape(self.m, self.dA * self.dE)
        return (X @ self.w.T).reshape(self.m, self.dB, self.dF)

    # -- objective ----------------------------------------------------------
    def __call__(self, theta: np.ndarray):
        A, E, p, f_list, norms = self.decode(theta)
        M = self.outputs(A, E)
        sig = M @ dagger(M)
        ent, logs = _entropy_and_log(sig)
        if self.mode == "neg_entropy":
            value = -ent[0]
            G = logs
            dp = None
        else:
            avg = np.tensordot(p, sig, axes=1)
            ent_avg, log_avg = _entropy_and_log(avg[None])
            value = ent_avg[0] - p @ ent
            G = p[:, None, None] * (logs - log_avg)
            # dJ/dp_x = D(out_x || avg)
            dp = -ent - np.real(np.einsum("xij,ji->x", sig, log_avg[0]))
        H = 2 * (G @ M)
        hin = (H.reshape(self.m, -1) @ np.conj(self.w)).reshape(self.m, self.dA, self.dE)
        grad_parts = []
        bi = 0
        need_a = isinstance(self.inputs, str)
        need_e = isinstance(self.env, str)
        if need_a:
            gA = np.einsum("mae,me->ma", hin, E.conj())
            if self.inputs == "shared":
                gA = gA.sum(axis=0, keepdims=True)
        if need_e:
            gE = np.einsum("ma,mae->me", A.conj(), hin)
            if self.env == "shared":
                gE = gE.sum(axis=0)
        ai = ei = 0
        for kind, k, d in self.blocks:
            nrm = norms[bi]
            bi += 1
            if kind == "a":
                grad_parts.append(sphere_grad(A[ai], nrm, gA[ai]))
                ai += 1
            elif kind == "e":
                grad_parts.append(sphere_grad(E[ei], nrm, gE[ei]))
                ei += 1
            else:
                grad_parts.append(sphere_grad(f_list[k], nrm, _factor_grad(gE, f_list, k, self.env_factors)))
        if self.learn_probs:
            grad_parts.append(p * (dp - p @ dp))
        grad = np.concatenate(grad_parts) if grad_parts else np.zeros(0)
        return float(value), grad


def _factor_grad(g: np.ndarray, factors: Sequence[np.ndarray], k: int, dims: Sequence[int]) -> np.ndarray:
    """Contract a gradient on a product vector with all factors except ``k``."""
    if len(factors) == 1:
        return g
    t = g.reshape(dims)
    for j in reversed(range(len(factors))):
        if j != k:
            t = np.tensordot(t, factors[j].conj(), axes=([j], [0]))
    return t.ravel()
