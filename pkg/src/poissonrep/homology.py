"""Twisted chain/cochain complexes of the presentation at a representation.

Everything is expressed in left-translated coordinates and the orthonormal
algebra basis, so dual coordinates are identified with primal ones and all
four boundary maps are real matrices on stacked blocks (one block of size
dim g per free generator, in generator order):

    boundary_1  : blocks  I - Ad(phi(z_i))              (1-chains -> 0-chains)
    boundary_2  : transpose of the relator differential (2-chains -> 1-chains)
    cobound_0   : boundary_1^T                           (conjugation directions)
    cobound_1   : the relator differential itself        (cocycle condition)

boundary_2 is deliberately NOT the raw coadjoint evaluation of the left Fox
Jacobian: the duality with the word-map differential (and with it the
evaluation pairing between cocycles and cycles) holds for the transpose
assembly and fails for the raw stack.  The complex identities hold exactly
when the relator value is central and degrade to O(1) defects otherwise,
which is itself a tested property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluate import word_eval
from .fox import GroupRingElement, Word, fox_derivative, relator
from .repspace import Representation

RANK_CUTOFF = 1e-8
CYCLE_TOL = 1e-7


class NonCycleError(ValueError):
    """Input expected to be a cycle/cocycle is not one."""


def _rank(svals: np.ndarray, cutoff: float = RANK_CUTOFF) -> int:
    if svals.size == 0 or svals[0] <= 0:
        return 0
    return int(np.sum(svals > cutoff * svals[0]))


@dataclass
class CohomologyData:
    """All complex data at one representation, plus evaluation caches."""

    rep: Representation
    boundary_1: np.ndarray
    boundary_2: np.ndarray
    cobound_0: np.ndarray
    cobound_1: np.ndarray
    harmonic: np.ndarray          # orthonormal columns spanning ker b1 ∩ ker c1
    dims: tuple[int, int, int]    # (h0, h1, h2)
    svals_1: np.ndarray
    svals_2: np.ndarray

    def __post_init__(self):
        self._word_mat: dict[Word, np.ndarray] = {}
        self._word_ad: dict[Word, np.ndarray] = {}
        self._gen_ad: list[np.ndarray] = [
            self.rep.group.adjoint_matrix(m) for m in self.rep.entries]
        self._sigma_cache: dict[bytes, np.ndarray] = {}
        self._component_cache: dict[bytes, np.ndarray] = {}

    # -- cached evaluation helpers (shared by the pairing layer) ------------

    @property
    def group(self):
        return self.rep.group

    @property
    def n_blocks(self) -> int:
        return 2 * self.rep.genus

    def word_matrix(self, w: Word) -> np.ndarray:
        if w not in self._word_mat:
            self._word_mat[w] = word_eval(w, self.rep)
        return self._word_mat[w]

    def word_ad(self, w: Word) -> np.ndarray:
        if w not in self._word_ad:
            self._word_ad[w] = self.group.adjoint_matrix(self.word_matrix(w))
        return self._word_ad[w]

    def generator_ad(self, i: int) -> np.ndarray:
        return self._gen_ad[i]

    def ring_ad(self, e: GroupRingElement) -> np.ndarray:
        M = np.zeros((self.group.dim, self.group.dim))
        for w, c in e.terms.items():
            M += c * self.word_ad(w)
        return M

    # -- class machinery ------------------------------------------------------

    def harmonic_projection(self, a: np.ndarray) -> np.ndarray:
        return self.harmonic @ (self.harmonic.T @ a)

    def complex_defect(self) -> float:
        """||boundary_1 @ boundary_2||; zero exactly on the constraint set."""
        return float(np.linalg.norm(self.boundary_1 @ self.boundary_2))


def build_complex(rep: Representation) -> CohomologyData:
    group, n, d = rep.group, 2 * rep.genus, rep.group.dim
    gen_ad = [group.adjoint_matrix(m) for m in rep.entries]
    b1 = np.hstack([np.eye(d) - A for A in gen_ad])

    rel = relator(rep.genus)
    word_ad_cache: dict[Word, np.ndarray] = {}

    def wad(w: Word) -> np.ndarray:
        if w not in word_ad_cache:
            word_ad_cache[w] = group.adjoint_matrix(word_eval(w, rep))
        return word_ad_cache[w]

    def ring_ad(e: GroupRingElement) -> np.ndarray:
        M = np.zeros((d, d))
        for w, c in e.terms.items():
            M += c * wad(w)
        return M

    ad_r_inv = wad(rel.word).T
    c1 = np.empty((d, n * d))
    for i in range(n):
        c1[:, i * d:(i + 1) * d] = \
            ad_r_inv @ ring_ad(fox_derivative(rel.word, i, n)) @ gen_ad[i]
    b2 = c1.T

    s1 = np.linalg.svd(b1, compute_uv=False)
    s2 = np.linalg.svd(b2, compute_uv=False)
    r1, r2 = _rank(s1), _rank(s2)
    h0, h2 = d - r1, d - r2
    h1 = n * d - r1 - r2

    stack = np.vstack([b1, c1])
    _, s, vt = np.linalg.svd(stack)
    harmonic = vt[_rank(s):].T

    data = CohomologyData(
        rep=rep, boundary_1=b1, boundary_2=b2, cobound_0=b1.T, cobound_1=c1,
        harmonic=harmonic, dims=(h0, h1, h2), svals_1=s1, svals_2=s2)
    data._word_ad.update(word_ad_cache)
    data._gen_ad = gen_ad
    return data


def homology_class(a: np.ndarray, data: CohomologyData,
                   tol: float = CYCLE_TOL) -> np.ndarray:
    """Harmonic representative: orthogonal projection onto ker b1 minus im b2."""
    defect = np.linalg.norm(data.boundary_1 @ a)
    if defect > tol * max(1.0, np.linalg.norm(a)):
        raise NonCycleError(f"input is not a cycle (defect {defect:.2e})")
    return data.harmonic_projection(a)


def cap_pairing(w: np.ndarray, a: np.ndarray, data: CohomologyData,
                tol: float = CYCLE_TOL) -> float:
    """Evaluation pairing of a 1-cocycle against a 1-cycle (componentwise dot).

    Descends to classes because the cocycle condition is the transpose of the
    boundary that produces 1-boundaries, and vice versa.
    """
    wd = np.linalg.norm(data.cobound_1 @ w)
    if wd > tol * max(1.0, np.linalg.norm(w)):
        raise NonCycleError(f"first argument is not a cocycle (defect {wd:.2e})")
    ad = np.linalg.norm(data.boundary_1 @ a)
    if ad > tol * max(1.0, np.linalg.norm(a)):
        raise NonCycleError(f"second argument is not a cycle (defect {ad:.2e})")
    return float(w @ a)
