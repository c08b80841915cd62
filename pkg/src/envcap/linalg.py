"""Dense complex linear algebra and subsystem bookkeeping.

Index convention (used everywhere in the package): operators on a composite
space ``X1 ⊗ X2 ⊗ ... ⊗ Xn`` are stored as ordinary 2-D numpy arrays in
row-major order with the *first* factor as the slowest index, i.e. exactly
the layout produced by ``np.kron(x1, np.kron(x2, ...))``.  A basis vector
``|i1 i2 ... in>`` sits at flat index ``np.ravel_multi_index((i1, ..., in), dims)``.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-12
UNITARY_TOL = 1e-9


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(*ops) -> np.ndarray:
    """Tensor product of any number of matrices or vectors, first factor slowest."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


def ket(index, dims=None) -> np.ndarray:
    """Computational basis vector.

    ``ket(1, 4)`` is ``|1>`` in dimension 4; ``ket((0, 1), (2, 2))`` is ``|01>``.
    """
    if dims is None:
        raise ValueError("dimension required")
    if np.isscalar(dims):
        dims = (int(dims),)
        index = (int(index),)
    elif np.isscalar(index):
        index = (int(index),)
    dims = tuple(int(d) for d in dims)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(tuple(index), dims)] = 1.0
    return v


def proj(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def max_entangled(d: int) -> np.ndarray:
    """The vector sum_i |ii> / sqrt(d)."""
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def _check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise ValueError(f"dims {dims} do not multiply to {size}")
    return dims


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original relative order.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("partial_trace expects a square matrix")
    dims = _check_dims(dims, m.shape[0])
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    rows = list(range(n))
    cols = list(range(n, 2 * n))
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    res = np.einsum(t, rows + cols, out)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return np.asarray(res).reshape(d, d)


def permute_systems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int],
                    col_dims: Sequence[int] | None = None,
                    col_perm: Sequence[int] | None = None) -> np.ndarray:
    """Reorder tensor factors of a vector or matrix.

    New factor ``j`` is old factor ``perm[j]``.  For matrices the column
    factors use ``col_dims``/``col_perm`` (defaulting to the row ones).
    """
    m = np.asarray(m)
    dims = tuple(int(d) for d in dims)
    perm = tuple(perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"{perm} is not a permutation of {len(dims)} systems")
    if m.ndim == 1:
        _check_dims(dims, m.shape[0])
        return m.reshape(dims).transpose(perm).ravel()
    col_dims = dims if col_dims is None else tuple(int(d) for d in col_dims)
    col_perm = perm if col_perm is None else tuple(col_perm)
    _check_dims(dims, m.shape[0])
    _check_dims(col_dims, m.shape[1])
    k = len(dims)
    t = m.reshape(dims + col_dims)
    axes = list(perm) + [k + p for p in col_perm]
    return t.transpose(axes).reshape(m.shape)


def hermitian_eigen(m: np.ndarray, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Eigenvectors are phase-fixed (largest-modulus component real positive) and,
    inside groups of numerically equal eigenvalues, ordered lexicographically
    on rounded components so repeated runs give identical output.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("hermitian_eigen expects a square matrix")
    if np.max(np.abs(m - dagger(m)), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    w, v = w[::-1], v[:, ::-1]
    piv = np.argmax(np.abs(v) > np.abs(v).max(axis=0) - 1e-12, axis=0)
    ph = v[piv, np.arange(v.shape[1])]
    v = v * (np.abs(ph) / ph)
    order = []
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and abs(w[j] - w[i]) < 1e-9:
            j += 1
        group = list(range(i, j))
        if len(group) > 1:
            keys = [tuple(np.round(np.concatenate([-v[:, g].real, -v[:, g].imag]), 9)) for g in group]
            group = [g for _, g in sorted(zip(keys, group))]
        order.extend(group)
        i = j
    return w[order], v[:, order]


def unitary_check(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("unitary_check expects a square matrix")
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol)


def isometry_check(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[1]))) <= tol)


def is_density(rho: np.ndarray, tol: float = PSD_TOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not np.all(np.isfinite(rho)):
        return False
    if np.max(np.abs(rho - dagger(rho))) > HERMITIAN_TOL:
        return False
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        return False
    return bool(np.linalg.eigvalsh((rho + dagger(rho)) / 2)[0] >= -tol)


def check_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if not is_density(rho):
        raise ValueError("not a valid density operator (Hermitian, unit trace, PSD)")
    return rho


def check_pure(psi: np.ndarray, dim: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, expected {dim}")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL * max(1, psi.shape[0]):
        raise ValueError("pure state is not normalized")
    return psi


def as_density(state: np.ndarray) -> np.ndarray:
    """Accept a state vector or a density matrix and return a density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return proj(state)
    return state


def schmidt_coefficients(psi: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    d0, d1 = _check_dims(dims, psi.shape[0])
    return np.linalg.svd(psi.reshape(d0, d1), compute_uv=False)


def matrix_to_json(m: np.ndarray) -> dict:
    """Interchange format: {"rows", "cols", "re", "im"}, row-major."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {re.size}/{im.size}")
    m = (re + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m
