"""Two-qubit interactions: canonical angles, the controlled-unitary edge, product codes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import BipartiteUnitary, output_state
from .errors import NumericalError
from .linalg import dagger, matrix_to_json
from .qinfo import binary_entropy, trace_norm

SCHMIDT_TOL = 1e-9


@dataclass(frozen=True)
class KrausCiracParams:
    alpha_x: float
    alpha_y: float
    alpha_z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha_x, self.alpha_y, self.alpha_z)

    def in_tetrahedron(self, tol: float = 1e-12) -> bool:
        ax, ay, az = self.as_tuple()
        return np.pi / 2 + tol >= ax >= ay - tol and ay >= az - tol and az >= -tol

    def phases(self) -> np.ndarray:
        """lambda_1..lambda_4, the magic-basis eigenphases are exp(-i lambda_k)."""
        ax, ay, az = self.as_tuple()
        return 0.5 * np.array([ax - ay + az, -ax + ay + az, -ax - ay - az, ax + ay - az])

    def to_json(self) -> dict:
        return {"alpha_x": self.alpha_x, "alpha_y": self.alpha_y, "alpha_z": self.alpha_z}


def magic_basis() -> list[np.ndarray]:
    s = 1 / np.sqrt(2)
    return [
        s * np.array([1, 0, 0, 1], dtype=complex),
        -1j * s * np.array([1, 0, 0, -1], dtype=complex),
        s * np.array([0, 1, -1, 0], dtype=complex),
        -1j * s * np.array([0, 1, 1, 0], dtype=complex),
    ]


def _magic_matrix() -> np.ndarray:
    return np.column_stack(magic_basis())


def canonical_unitary(p: KrausCiracParams) -> BipartiteUnitary:
    """exp(-i/2 (ax XX + ay YY + az ZZ)), built from its magic-basis spectrum."""
    m = _magic_matrix()
    u = m @ np.diag(np.exp(-1j * p.phases())) @ dagger(m)
    return BipartiteUnitary(u, 2, 2, 2, 2)


def _as_matrix(u) -> np.ndarray:
    m = u.matrix if isinstance(u, BipartiteUnitary) else np.asarray(u, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit unitary")
    return m


def _fold(angle: float) -> float:
    r = np.mod(angle, np.pi)
    return float(min(r, np.pi - r))


def kraus_cirac_angles(u) -> KrausCiracParams:
    """Canonical angles of a two-qubit unitary, reduced to pi/2 >= ax >= ay >= az >= 0.

    The spectrum of U^T U in the magic basis is exp(-2i lambda_k).  Each
    lambda_k is known modulo pi; the resulting angle triple is then reduced by
    per-coordinate pi shifts and sign flips (local equivalence together with
    complex conjugation) and sorted.
    """
    m = _as_matrix(u)
    if np.max(np.abs(dagger(m) @ m - np.eye(4))) > 1e-9:
        raise ValueError("matrix is not unitary")
    m = m / np.linalg.det(m) ** 0.25
    mb = _magic_matrix()
    um = dagger(mb) @ m @ mb
    ev = np.linalg.eigvals(um.T @ um)
    if np.max(np.abs(np.abs(ev) - 1)) > 1e-8:
        raise NumericalError("magic-basis spectrum is not unimodular")
    lam = -np.angle(ev) / 2
    lam[3] -= np.pi * np.round(lam.sum() / np.pi)
    alpha = [lam[0] + lam[3], lam[1] + lam[3], lam[0] + lam[1]]
    ax, ay, az = sorted((_fold(a) for a in alpha), reverse=True)
    return KrausCiracParams(ax, ay, az)


def special_unitarize(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    return u / np.sqrt(np.linalg.det(u))


def controlled_edge_parameter(u0: np.ndarray, u1: np.ndarray) -> tuple[float, float]:
    """(d, u) for the controlled unitary with qubit blocks ``u0``, ``u1``.

    With V = U0^dagger U1 rescaled to SU(2), 2 cos t = Tr V; the sign of V is a
    convention, and d = min(t, pi - t) does not depend on it.  u = pi/2 - d.
    """
    u0 = np.asarray(u0, dtype=complex)
    u1 = np.asarray(u1, dtype=complex)
    for b in (u0, u1):
        if b.shape != (2, 2) or np.max(np.abs(dagger(b) @ b - np.eye(2))) > 1e-10:
            raise ValueError("blocks must be 2x2 unitaries")
    v = special_unitarize(dagger(u0) @ u1)
    t = float(np.arccos(np.clip(np.real(np.trace(v)) / 2, -1.0, 1.0)))
    d = min(t, np.pi - t)
    return d, np.pi / 2 - d


def cq_capacity_closed_form(u: float) -> float:
    """H2((1 + sin u) / 2) for 0 <= u <= pi/2."""
    if not (-1e-12 <= u <= np.pi / 2 + 1e-12):
        raise ValueError(f"u = {u} outside [0, pi/2]")
    return binary_entropy(float(np.clip((1 + np.sin(u)) / 2, 0.0, 1.0)))


def controlled_blocks(w: BipartiteUnitary, tol: float = 1e-12):
    """Blocks U_i if ``w`` has the form sum_i |i>_F<i|_A ⊗ U_i, else None."""
    if w.dim_a != w.dim_f or w.dim_b != w.dim_e:
        return None
    t = w.tensor
    mask = ~np.eye(w.dim_a, dtype=bool)
    if np.max(np.abs(t[:, mask, :]), initial=0.0) > tol:
        return None
    return [t[:, i, i, :] for i in range(w.dim_a)]


# -- product states and the qubit conferencing code ------------------------------------

def _schmidt_ratio(v: np.ndarray) -> float:
    s = np.linalg.svd(v.reshape(2, 2), compute_uv=False)
    return float(s[1] / s[0]) if s[0] > 0 else float("inf")


def product_state_in_span(phi0: np.ndarray, phi1: np.ndarray) -> tuple[complex, complex]:
    """Coefficients (c0, c1), |c0|^2 + |c1|^2 = 1, c0 >= 0, with c0 phi0 + c1 phi1 a product state.

    det(c0 M0 + c1 M1) = c0^2 det M0 + c0 c1 Tr(adj(M0) M1) + c1^2 det M1 is a
    homogeneous quadratic; any root gives Schmidt rank one.
    """
    phi0 = np.asarray(phi0, dtype=complex).ravel()
    phi1 = np.asarray(phi1, dtype=complex).ravel()
    if phi0.shape != (4,) or phi1.shape != (4,):
        raise ValueError("inputs must be two-qubit vectors")
    if np.linalg.svd(np.column_stack([phi0, phi1]), compute_uv=False)[1] <= 1e-12 * max(
            np.linalg.norm(phi0), np.linalg.norm(phi1)):
        raise ValueError("inputs are linearly dependent")
    m0, m1 = phi0.reshape(2, 2), phi1.reshape(2, 2)
    adj0 = np.array([[m0[1, 1], -m0[0, 1]], [-m0[1, 0], m0[0, 0]]])
    a, b, c = np.linalg.det(m0), np.trace(adj0 @ m1), np.linalg.det(m1)
    candidates = [(1.0 + 0j, 0j), (0j, 1.0 + 0j)]
    if abs(a) >= abs(c):
        # roots in c1/c0
        candidates += [(1.0 + 0j, r) for r in np.roots([c, b, a])]
    else:
        candidates += [(r, 1.0 + 0j) for r in np.roots([a, b, c])]

    def score(cc):
        v = cc[0] * phi0 + cc[1] * phi1
        return _schmidt_ratio(v) if np.linalg.norm(v) > 1e-12 else float("inf")

    c0, c1 = min(candidates, key=score)
    if not score((c0, c1)) <= SCHMIDT_TOL:
        raise NumericalError("no product state found in the span")
    nrm = np.hypot(abs(c0), abs(c1))
    c0, c1 = c0 / nrm, c1 / nrm
    ph = c0 / abs(c0) if abs(c0) > 1e-15 else c1 / abs(c1)
    return complex(c0 / ph), complex(c1 / ph)


@dataclass
class ConferencingCode2Q:
    alphas: tuple
    etas: tuple
    outputs: tuple
    coefficients: tuple
    schmidt_ratios: tuple
    trace_distance: float

    def valid(self, tol: float = SCHMIDT_TOL) -> bool:
        return max(self.schmidt_ratios) <= tol and abs(self.trace_distance - 2) <= tol

    def to_json(self) -> dict:
        vec = lambda v: {"re": np.real(v).tolist(), "im": np.imag(v).tolist()}
        return {
            "alphas": [vec(a) for a in self.alphas],
            "etas": [vec(e) for e in self.etas],
            "outputs": [matrix_to_json(o) for o in self.outputs],
            "coefficients": [vec(np.array(c)) for c in self.coefficients],
            "schmidt_ratios": list(self.schmidt_ratios),
            "trace_distance": self.trace_distance,
        }


def conferencing_code_two_qubit(u) -> ConferencingCode2Q:
    """Two product inputs alpha_b ⊗ eta_b whose outputs on B are |0><0| and |1><1|.

    For each b, the span of U^dagger(|b> ⊗ |0>), U^dagger(|b> ⊗ |1>) contains a
    product vector; it is the preimage of |b> ⊗ |psi_b> for some psi_b on F.
    """
    w = u if isinstance(u, BipartiteUnitary) else BipartiteUnitary(_as_matrix(u), 2, 2, 2, 2)
    if w.dims != (2, 2, 2, 2):
        raise ValueError("expected a two-qubit unitary")
    ud = dagger(w.matrix)
    alphas, etas, outs, coefs, ratios = [], [], [], [], []
    for b in range(2):
        phis = [ud[:, 2 * b + f] for f in range(2)]
        c0, c1 = product_state_in_span(*phis)
        v = c0 * phis[0] + c1 * phis[1]
        v = v / np.linalg.norm(v)
        ratios.append(_schmidt_ratio(v))
        left, s, right = np.linalg.svd(v.reshape(2, 2))
        alpha, eta = left[:, 0], right[0]
        alphas.append(alpha)
        etas.append(eta)
        outs.append(output_state(w, alpha, eta))
        coefs.append((c0, c1))
    dist = trace_norm(outs[0] - outs[1])
    return ConferencingCode2Q(tuple(alphas), tuple(etas), tuple(outs), tuple(coefs), tuple(ratios), dist)


__all__ = [
    "KrausCiracParams", "ConferencingCode2Q", "magic_basis", "canonical_unitary",
    "kraus_cirac_angles", "controlled_edge_parameter", "cq_capacity_closed_form",
    "product_state_in_span", "conferencing_code_two_qubit", "controlled_blocks",
    "special_unitarize",
]
