"""Matrix model of su(3) and the homogeneous sectional-curvature formula.

This module is an independent check on the closed-form curvature tables: it
builds the Weyl basis of su(3) as explicit 3x3 skew-Hermitian matrices,
computes brackets as commutators, splits su(3) = k + m with k the diagonal
torus, and evaluates

    K(X, Y) = -3/4 |[X,Y]_m|^2 - 1/2 g([X,[X,Y]]_m, Y) - 1/2 g([Y,[Y,X]]_m, X)
              + |U(X,Y)|^2 - g(U(X,X), U(Y,Y)),
    2 g(U(X,Y), Z) = g([Z,X]_m, Y) + g(X, [Z,Y]_m)

for a g-orthonormal basis X_1..X_6 of m.

Normalization: the background form is ``B0(a, b) = -2 Re tr(ab)``, for which
the unscaled elements A_jk/2, S_jk/2 are orthonormal, so the invariant metric
(x, y, z) satisfies g(A_12/2, A_12/2) = x etc.  The negative Killing form of
su(3) is 3*B0, so Ricci eigenvalues computed here are three times those of
the Killing-normalized closed forms in :mod:`flagricci.curvature`.

Basis indices are 1-based (X_1..X_6) throughout the public functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spaces import Metric3

# summand (0, 1, 2) of each basis vector X_1..X_6
SUMMAND = (0, 0, 1, 1, 2, 2)
KILLING_SCALE = 3


def _unit(i, j):
    m = np.zeros((3, 3), dtype=complex)
    m[i - 1, j - 1] = 1
    return m


def A(j: int, k: int) -> np.ndarray:
    """Real antisymmetric matrix with +1 at (k, j) and -1 at (j, k)."""
    return _unit(k, j) - _unit(j, k)


def S(j: int, k: int) -> np.ndarray:
    """Imaginary symmetric matrix with i at (j, k) and (k, j)."""
    return 1j * (_unit(j, k) + _unit(k, j))


@lru_cache(maxsize=None)
def _m_basis() -> tuple[np.ndarray, ...]:
    return tuple(0.5 * M for M in (A(1, 2), S(1, 2), A(1, 3), S(1, 3), A(2, 3), S(2, 3)))


def m_basis() -> list[np.ndarray]:
    """Unscaled basis A_12/2, S_12/2, A_13/2, S_13/2, A_23/2, S_23/2 of m."""
    return [M.copy() for M in _m_basis()]


def torus_basis() -> list[np.ndarray]:
    """B0-orthonormal basis of the Cartan subalgebra k (diagonal, traceless)."""
    h1 = np.diag([1j, -1j, 0]) / 2
    h2 = np.diag([1j, 1j, -2j]) / (2 * np.sqrt(3))
    return [h1, h2]


def is_su3(M: np.ndarray, tol: float = 1e-14) -> bool:
    M = np.asarray(M)
    return M.shape == (3, 3) and np.allclose(M.conj().T, -M, atol=tol) and abs(np.trace(M)) < tol


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def trace_form(a: np.ndarray, b: np.ndarray) -> float:
    """Background inner product B0(a, b) = -2 Re tr(ab)."""
    return float(-2 * np.trace(a @ b).real)


def m_coords(v: np.ndarray) -> np.ndarray:
    """Coordinates of the m-component of ``v`` in the unscaled basis."""
    return np.array([trace_form(v, e) for e in _m_basis()])


def project_m(v: np.ndarray) -> np.ndarray:
    return sum(c * e for c, e in zip(m_coords(v), _m_basis()))


def project_k(v: np.ndarray) -> np.ndarray:
    return v - project_m(v)


@dataclass(frozen=True)
class ReductiveSplit:
    """su(3) = k + m with the metric-adapted orthonormal frame of m."""

    metric: Metric3

    @property
    def torus(self) -> list[np.ndarray]:
        return torus_basis()

    @property
    def m_basis(self) -> list[np.ndarray]:
        return m_basis()

    @property
    def weights(self) -> np.ndarray:
        x, y, z = (float(c) for c in self.metric)
        return np.array([x, x, y, y, z, z])

    @property
    def frame(self) -> list[np.ndarray]:
        """X_1..X_6: each unscaled element divided by sqrt of its summand's weight."""
        return [e / np.sqrt(w) for e, w in zip(_m_basis(), self.weights)]

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """The invariant inner product g on m (k-components are ignored)."""
        return float(np.sum(self.weights * m_coords(a) * m_coords(b)))

    def norm2(self, a: np.ndarray) -> float:
        return self.inner(a, a)


def _split(g) -> ReductiveSplit:
    return g if isinstance(g, ReductiveSplit) else ReductiveSplit(g if isinstance(g, Metric3) else Metric3(*g))


def u_tensor(X: np.ndarray, Y: np.ndarray, g) -> np.ndarray:
    """The symmetric tensor U(X, Y) in m, solved against the orthonormal frame."""
    sp = _split(g)
    out = np.zeros((3, 3), dtype=complex)
    for Z in sp.frame:
        coeff = 0.5 * (sp.inner(project_m(bracket(Z, X)), Y) + sp.inner(X, project_m(bracket(Z, Y))))
        out = out + coeff * Z
    return out


def structure_constant(i: int, j: int, k: int, g) -> float:
    """C_ij^k = g([X_i, X_j], X_k) for k an index of m."""
    sp = _split(g)
    X = sp.frame
    return sp.inner(bracket(X[i - 1], X[j - 1]), X[k - 1])


def torus_component(i: int, j: int, g) -> float:
    """Length of the k-component of [X_i, X_j] measured with B0."""
    sp = _split(g)
    X = sp.frame
    v = project_k(bracket(X[i - 1], X[j - 1]))
    return float(np.sqrt(max(trace_form(v, v), 0.0)))


def sectional_oracle(i: int, j: int, g) -> float:
    """Sectional curvature K(X_i, X_j) from the matrix model."""
    if i == j:
        raise ValueError("sectional curvature needs two distinct basis vectors")
    sp = _split(g)
    X, Y = sp.frame[i - 1], sp.frame[j - 1]
    XY = bracket(X, Y)
    val = -0.75 * sp.norm2(project_m(XY))
    val -= 0.5 * sp.inner(project_m(bracket(X, XY)), Y)
    val -= 0.5 * sp.inner(project_m(bracket(Y, bracket(Y, X))), X)
    Uxy = u_tensor(X, Y, sp)
    val += sp.norm2(Uxy) - sp.inner(u_tensor(X, X, sp), u_tensor(Y, Y, sp))
    return val


@lru_cache(maxsize=None)
def structure_tensor() -> np.ndarray:
    """f[a, b, c] = B0([E_a, E_b], E_c) over E = (m basis, torus basis), by commutators."""
    E = _m_basis() + tuple(torus_basis())
    f = np.array([[[trace_form(bracket(a, b), c) for c in E] for b in E] for a in E])
    f.setflags(write=False)
    return f


def sectional_matrix(g) -> np.ndarray:
    """Symmetric 6x6 array of sectional curvatures K(X_i, X_j) (zero diagonal).

    Same formula as :func:`sectional_oracle`, evaluated on the structure
    tensor instead of explicit matrices; the two agree to round-off.
    """
    w = _split(g).weights
    s = 1 / np.sqrt(w)
    f = structure_tensor()
    fm = f[:6, :6, :]
    XY = fm * np.outer(s, s)[:, :, None]                            # [X_i, X_j] in E-coords
    t1 = -0.75 * np.einsum("ijk,k->ij", XY[:, :, :6] ** 2, w)
    A = np.einsum("ijb,ibc->ijc", XY, f[:6]) * s[:, None, None]     # [X_i, [X_i, X_j]]
    t2 = -0.5 * np.einsum("ijj->ij", A[:, :, :6]) * (w * s)[None, :]
    t3 = t2.T.copy()                                                 # [X_j, [X_j, X_i]] paired with X_i
    # U(X_a, X_b) along X_k: half of g([X_k,X_a]_m, X_b) + g(X_a, [X_k,X_b]_m)
    fk = fm[:, :, :6]                                                # f[k, a, b]
    U = 0.5 * (np.einsum("kab,b->abk", fk, w) + np.einsum("kba,a->abk", fk, w))
    U = U * (s[:, None, None] * s[None, :, None] * s[None, None, :])
    t4 = np.einsum("ijk,ijk->ij", U, U) - np.einsum("iik,jjk->ij", U, U)
    K = t1 + t2 + t3 + t4
    np.fill_diagonal(K, 0.0)
    return K


def ricci_oracle(g) -> np.ndarray:
    """Ric(X_i) = sum_j K(X_i, X_j) in the B0 normalization, i = 1..6."""
    return sectional_matrix(g).sum(axis=1)
