"""Compact matrix groups, their Lie algebras, and invariant bilinear forms.

Every group carries an orthonormal basis of its Lie algebra with respect to
the reference inner product <X,Y> = Re tr(X^H Y) (= -tr(XY) on anti-Hermitian
matrices).  Algebra elements are passed around as real coordinate vectors in
that basis, so the adjoint action becomes a real orthogonal matrix and the
coadjoint action on dual coordinates is its inverse transpose -- numerically
the same matrix.  All pairing code downstream relies on this identification.

Degenerate or indefinite invariant forms never reach the pairing code as raw
Gram matrices: they are first decomposed into definite components plus a null
component (FormSplit), and every consumer works per component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm, logm


class InvarianceError(ValueError):
    """A bilinear form failed its coadjoint-invariance check."""


def _unitize(q: np.ndarray) -> np.ndarray:
    """Nearest unitary via polar decomposition."""
    u, _, vh = np.linalg.svd(q)
    return u @ vh


class MatrixGroup:
    """A compact matrix group with a fixed orthonormal Lie-algebra basis."""

    def __init__(self, name: str, size: int, basis: Sequence[np.ndarray],
                 real_entries: bool = False):
        self.name = name
        self.size = size
        self.basis = [np.asarray(b, dtype=complex) for b in basis]
        self.dim = len(self.basis)
        self.real_entries = real_entries
        # orthonormality of the supplied basis is assumed downstream
        for i, bi in enumerate(self.basis):
            for j, bj in enumerate(self.basis):
                ip = self.inner(bi, bj)
                expect = 1.0 if i == j else 0.0
                if abs(ip - expect) > 1e-12:
                    raise ValueError(f"{name}: basis not orthonormal at ({i},{j})")

    # -- algebra <-> coordinates --------------------------------------------

    @staticmethod
    def inner(X: np.ndarray, Y: np.ndarray) -> float:
        return float(np.real(np.trace(X.conj().T @ Y)))

    def alg_to_vec(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.inner(b, X) for b in self.basis])

    def vec_to_alg(self, v: np.ndarray) -> np.ndarray:
        X = np.zeros((self.size, self.size), dtype=complex)
        for c, b in zip(v, self.basis):
            X = X + c * b
        return X

    def project_algebra(self, X: np.ndarray) -> np.ndarray:
        """Orthogonal projection of an arbitrary matrix onto the algebra."""
        return self.vec_to_alg(self.alg_to_vec(X))

    # -- group operations ----------------------------------------------------

    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=complex)

    def exp(self, X: np.ndarray) -> np.ndarray:
        g = expm(X)
        return np.real(g).astype(complex) if self.real_entries else g

    def log(self, g: np.ndarray) -> np.ndarray:
        return self.project_algebra(logm(np.asarray(g, dtype=complex)))

    def project_group(self, g: np.ndarray) -> np.ndarray:
        u = _unitize(np.asarray(g, dtype=complex))
        return self._normalize(u)

    def _normalize(self, u: np.ndarray) -> np.ndarray:
        """Push a unitary matrix into the group (determinant conditions etc.)."""
        return u

    def contains(self, g: np.ndarray, tol: float = 1e-10) -> bool:
        g = np.asarray(g, dtype=complex)
        if g.shape != (self.size, self.size):
            return False
        return np.linalg.norm(g @ g.conj().T - np.eye(self.size)) <= tol \
            and np.linalg.norm(g - self._normalize(_unitize(g))) <= 1e-6

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.normal(size=(self.size, self.size)) \
            + (0 if self.real_entries else 1j * rng.normal(size=(self.size, self.size)))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        q = q @ np.diag(d / np.abs(d))
        return self._normalize(q.astype(complex))

    # -- adjoint / coadjoint -------------------------------------------------

    def adjoint_matrix(self, g: np.ndarray) -> np.ndarray:
        """Matrix of X -> g X g^-1 in the orthonormal basis (real orthogonal)."""
        gi = np.linalg.inv(g)
        M = np.empty((self.dim, self.dim))
        for k, bk in enumerate(self.basis):
            col = g @ bk @ gi
            for j, bj in enumerate(self.basis):
                M[j, k] = self.inner(bj, col)
        return M

    def coadjoint_matrix(self, g: np.ndarray) -> np.ndarray:
        """Matrix of u -> u o Ad(g^-1) on dual coordinates.

        With an orthonormal basis this equals adjoint_matrix(g); computed as
        the inverse transpose so the definition stays visible.
        """
        A = self.adjoint_matrix(g)
        return np.linalg.inv(A).T

    def ad_matrix(self, v: np.ndarray) -> np.ndarray:
        """Matrix of ad(X) = [X, .] for X given in coordinates."""
        X = self.vec_to_alg(v)
        M = np.empty((self.dim, self.dim))
        for k, bk in enumerate(self.basis):
            col = X @ bk - bk @ X
            for j, bj in enumerate(self.basis):
                M[j, k] = self.inner(bj, col)
        return M

    def structure_constants(self) -> np.ndarray:
        """c[i,j,k] with [E_i, E_j] = sum_k c[i,j,k] E_k."""
        c = np.zeros((self.dim, self.dim, self.dim))
        for i, bi in enumerate(self.basis):
            for j, bj in enumerate(self.basis):
                c[i, j] = self.alg_to_vec(bi @ bj - bj @ bi)
        return c

    def bracket_vec(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        X, Y = self.vec_to_alg(u), self.vec_to_alg(v)
        return self.alg_to_vec(X @ Y - Y @ X)

    # -- central elements ----------------------------------------------------

    def central_element(self, spec: str) -> np.ndarray:
        """Resolve a central-element name; raises ValueError when not admissible.

        Admissibility means both centrality and membership in the closure of
        products of commutators (det = 1 for the unitary groups), since only
        such elements can be hit by the relator word map.
        """
        if spec == "I":
            return self.identity()
        if spec == "-I":
            c = -self.identity()
            if self.is_central(c) and abs(np.linalg.det(c) - 1) < 1e-12:
                return c
        raise ValueError(f"central element {spec!r} not admissible for {self.name}")

    def is_central(self, c: np.ndarray, tol: float = 1e-10) -> bool:
        return self.contains(c, tol) and \
            np.linalg.norm(self.adjoint_matrix(c) - np.eye(self.dim)) <= tol

    def spec(self):
        """JSON-serializable group descriptor understood by group_by_name."""
        return self.name


class _SpecialUnitary(MatrixGroup):
    def _normalize(self, u: np.ndarray) -> np.ndarray:
        det = np.linalg.det(u)
        return u / det ** (1.0 / self.size)


class _SpecialOrthogonal(MatrixGroup):
    def _normalize(self, u: np.ndarray) -> np.ndarray:
        u = np.real(u)
        if np.linalg.det(u) < 0:
            u = u.copy()
            u[:, 0] = -u[:, 0]
        return u.astype(complex)


_PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def su2() -> MatrixGroup:
    basis = [1j * s / np.sqrt(2.0) for s in _PAULI]
    return _SpecialUnitary("SU2", 2, basis)


def u1() -> MatrixGroup:
    return MatrixGroup("U1", 1, [np.array([[1j]])])


def u2() -> MatrixGroup:
    basis = [1j * s / np.sqrt(2.0) for s in _PAULI]
    basis.append(1j * np.eye(2, dtype=complex) / np.sqrt(2.0))
    return MatrixGroup("U2", 2, basis)


def so3() -> MatrixGroup:
    L = [np.zeros((3, 3)) for _ in range(3)]
    L[0][1, 2], L[0][2, 1] = -1.0, 1.0
    L[1][0, 2], L[1][2, 0] = 1.0, -1.0
    L[2][0, 1], L[2][1, 0] = -1.0, 1.0
    basis = [l / np.sqrt(2.0) for l in L]
    return _SpecialOrthogonal("SO3", 3, basis)


class ProductGroup(MatrixGroup):
    """Block-diagonal product of matrix groups."""

    def __init__(self, factors: Sequence[MatrixGroup]):
        self.factors = list(factors)
        size = sum(f.size for f in factors)
        basis = []
        off = 0
        for f in self.factors:
            for b in f.basis:
                big = np.zeros((size, size), dtype=complex)
                big[off:off + f.size, off:off + f.size] = b
                basis.append(big)
            off += f.size
        name = "x".join(f.name for f in factors)
        super().__init__(name, size, basis,
                         real_entries=all(f.real_entries for f in factors))

    def _blocks(self, g: np.ndarray) -> list[np.ndarray]:
        out, off = [], 0
        for f in self.factors:
            out.append(g[off:off + f.size, off:off + f.size])
            off += f.size
        return out

    def _assemble(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        g = np.zeros((self.size, self.size), dtype=complex)
        off = 0
        for f, b in zip(self.factors, blocks):
            g[off:off + f.size, off:off + f.size] = b
            off += f.size
        return g

    def _normalize(self, u: np.ndarray) -> np.ndarray:
        return self._assemble([f._normalize(_unitize(b))
                               for f, b in zip(self.factors, self._blocks(u))])

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return self._assemble([f.random_element(rng) for f in self.factors])

    def central_element(self, spec) -> np.ndarray:
        if isinstance(spec, (list, tuple)):
            if len(spec) != len(self.factors):
                raise ValueError("central spec length must match product factors")
            return self._assemble([f.central_element(s)
                                   for f, s in zip(self.factors, spec)])
        return self._assemble([f.central_element(spec) for f in self.factors])

    def spec(self):
        return {"product": [f.spec() for f in self.factors]}


def product_group(factors: Sequence[MatrixGroup]) -> ProductGroup:
    return ProductGroup(factors)


_BUILDERS = {"SU2": su2, "U1": u1, "U2": u2, "SO3": so3}


def group_by_name(name) -> MatrixGroup:
    if isinstance(name, dict) and "product" in name:
        return product_group([group_by_name(n) for n in name["product"]])
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown group {name!r}; known: {sorted(_BUILDERS)}")


# -- invariant forms ---------------------------------------------------------

_NULL_CUTOFF = 1e-8


@dataclass(frozen=True)
class InvariantForm:
    """Coadjoint-invariant symmetric bilinear form on dual coordinates."""

    group: MatrixGroup
    gram: np.ndarray
    signature: tuple[int, int, int] = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.gram, dtype=float)
        if q.shape != (self.group.dim, self.group.dim):
            raise ValueError("gram shape does not match the algebra dimension")
        if np.linalg.norm(q - q.T) > 1e-12:
            raise ValueError("gram matrix must be symmetric")
        object.__setattr__(self, "gram", q)
        evals = np.linalg.eigvalsh(q)
        scale = max(np.max(np.abs(evals)), 1e-300)
        npos = int(np.sum(evals > _NULL_CUTOFF * scale))
        nneg = int(np.sum(evals < -_NULL_CUTOFF * scale))
        object.__setattr__(self, "signature",
                           (npos, nneg, self.group.dim - npos - nneg))

    def invariance_residual(self, samples: int = 20, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            A = self.group.adjoint_matrix(self.group.random_element(rng))
            worst = max(worst, float(np.linalg.norm(A.T @ self.gram @ A - self.gram)))
        return worst

    def apply(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.gram @ v)


def identity_form(group: MatrixGroup, scale: float = 1.0) -> InvariantForm:
    return InvariantForm(group, scale * np.eye(group.dim))


def diagonal_form(group: MatrixGroup, entries: Sequence[float]) -> InvariantForm:
    return InvariantForm(group, np.diag(np.asarray(entries, dtype=float)))


@dataclass(frozen=True)
class FormComponent:
    """One definite component of a split form.

    `projector` maps dual coordinates onto the component; `dual_gram` is the
    (sign-corrected, positive-definite) restriction of the form there, and
    `primal_gram` its inverse -- the coefficient matrix the cup pairing uses
    on the tangent-side complex for this component.
    """

    sign: float
    projector: np.ndarray
    dual_gram: np.ndarray
    primal_gram: np.ndarray
    dimension: int


@dataclass(frozen=True)
class FormSplit:
    """Decomposition of an invariant form into +/-/null invariant components."""

    form: InvariantForm
    plus: FormComponent | None
    minus: FormComponent | None
    null_projector: np.ndarray

    @property
    def components(self) -> list[FormComponent]:
        return [c for c in (self.plus, self.minus) if c is not None]

    def projector(self, which: str) -> np.ndarray:
        if which == "+":
            return self.plus.projector if self.plus else np.zeros_like(self.null_projector)
        if which == "-":
            return self.minus.projector if self.minus else np.zeros_like(self.null_projector)
        if which == "0":
            return self.null_projector
        raise KeyError(which)


def split_form(form: InvariantForm, invariance_tol: float = 1e-8) -> FormSplit:
    """Eigen-split of the Gram operator relative to the reference metric.

    Raises InvarianceError when the form is not coadjoint-invariant, since the
    eigenprojectors only commute with the group action for invariant forms.
    """
    resid = form.invariance_residual()
    if resid > invariance_tol:
        raise InvarianceError(
            f"form invariance residual {resid:.3e} exceeds {invariance_tol:.1e}")
    evals, evecs = np.linalg.eigh(form.gram)
    scale = max(np.max(np.abs(evals)), 1e-300)
    d = form.group.dim

    def component(mask: np.ndarray, sign: float) -> FormComponent | None:
        if not np.any(mask):
            return None
        V = evecs[:, mask]
        lam = np.abs(evals[mask])
        return FormComponent(
            sign=sign,
            projector=V @ V.T,
            dual_gram=V @ np.diag(lam) @ V.T,
            primal_gram=V @ np.diag(1.0 / lam) @ V.T,
            dimension=int(mask.sum()),
        )

    pos = evals > _NULL_CUTOFF * scale
    neg = evals < -_NULL_CUTOFF * scale
    nul = ~(pos | neg)
    Vn = evecs[:, nul]
    return FormSplit(
        form=form,
        plus=component(pos, +1.0),
        minus=component(neg, -1.0),
        null_projector=(Vn @ Vn.T) if Vn.shape[1] else np.zeros((d, d)),
    )


def coadjoint(group: MatrixGroup, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Coadjoint action on a dual coordinate vector."""
    return group.coadjoint_matrix(x) @ u
