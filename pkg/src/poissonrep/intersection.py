"""Cup and intersection pairings over an explicit surface 2-chain.

The relator spelling r = s_1 ... s_4g yields a 2-chain in the bar resolution
(one signed term per letter) whose boundary telescopes away exactly because
every generator has zero total exponent in r; it represents the fundamental
class.  Evaluating the two-variable cup formula

    (u cup v)(g, h) = < U(g), Ad(phi(g)) V(h) >

on this chain gives the cup pairing of twisted 1-cocycles; U and V are the
cocycle extensions of the generator values, computed with the Fox expansion.
Inputs are in left-translated coordinates and are converted to cocycle values
(one Ad factor per block) inside the assembly.

The pairing of 1-cycles with values in the dual module is realized through
duality transport: the cup form on harmonic cocycle classes is inverted
against the evaluation pairing.  This is the route that kills boundaries on
both sides; evaluating the cup formula directly on cycle data does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fox import GroupRingElement, Word, fox_derivative, relator
from .homology import CohomologyData, NonCycleError, CYCLE_TOL, _rank, build_complex
from .liegroups import FormSplit, InvariantForm, split_form
from .repspace import Representation, conjugate_representation


class SigmaSingularError(RuntimeError):
    """The cup-form Gram on a definite component is numerically singular."""


RANK_PINV = 1e-8


@dataclass(frozen=True)
class ChainTerm:
    sign: float
    prefix: Word
    letter: int
    prefix_fox: tuple[GroupRingElement, ...]  # left Fox derivatives of prefix


@lru_cache(maxsize=None)
def fundamental_chain(genus: int) -> tuple[ChainTerm, ...]:
    """Signed bar terms (sign, prefix, letter) from the relator spelling.

    A letter z contributes (+1, p, z) and an inverse letter z^-1 contributes
    (-1, p*z^-1, z), where p is the prefix before the letter; prefixes are
    freely reduced.
    """
    rel = relator(genus)
    n = 2 * genus
    terms = []
    p = Word.identity()
    for (j, s) in rel.word.letters:
        if s == 1:
            q = p
        else:
            q = p * Word.generator(j, -1)
        fox = tuple(fox_derivative(q, i, n) for i in range(n))
        terms.append(ChainTerm(float(s), q, j, fox))
        p = p * Word.generator(j, s)
    return tuple(terms)


def _sigma_matrix(data: CohomologyData, coeff: np.ndarray) -> np.ndarray:
    """Matrix S with  sigma(u, v) = u^T S v  on left-translated inputs."""
    key = coeff.tobytes()
    if key in data._sigma_cache:
        return data._sigma_cache[key]
    d, n = data.group.dim, data.n_blocks
    S = np.zeros((n * d, n * d))
    for term in fundamental_chain(data.rep.genus):
        U = np.zeros((d, n * d))
        for i in range(n):
            if term.prefix_fox[i].terms:
                U[:, i * d:(i + 1) * d] = \
                    data.ring_ad(term.prefix_fox[i]) @ data.generator_ad(i)
        j = term.letter
        right = data.word_ad(term.prefix) @ data.generator_ad(j)
        S[:, j * d:(j + 1) * d] += term.sign * (U.T @ coeff @ right)
    data._sigma_cache[key] = S
    return S


def cocycle_extension(data: CohomologyData, u: np.ndarray, w: Word) -> np.ndarray:
    """Value on w of the cocycle extending the left-translated components u."""
    d, n = data.group.dim, data.n_blocks
    out = np.zeros(d)
    for i in range(n):
        e = fox_derivative(w, i, n)
        if e.terms:
            out += data.ring_ad(e) @ (data.generator_ad(i) @ u[i * d:(i + 1) * d])
    return out


def sigma(u: np.ndarray, v: np.ndarray, data: CohomologyData,
          coeff_gram: np.ndarray | None = None, check: bool = True) -> float:
    """Cup pairing of twisted 1-cocycles (left-translated components).

    coeff_gram is the coefficient inner product on the algebra (reference
    metric when omitted).  Antisymmetric and coboundary-insensitive on
    cocycles; on non-cocycles neither is guaranteed.
    """
    if check:
        for name, z in (("first", u), ("second", v)):
            defect = np.linalg.norm(data.cobound_1 @ z)
            if defect > CYCLE_TOL * max(1.0, np.linalg.norm(z)):
                raise NonCycleError(f"{name} sigma argument is not a cocycle "
                                    f"(defect {defect:.2e})")
    M = np.eye(data.group.dim) if coeff_gram is None else coeff_gram
    return float(u @ _sigma_matrix(data, M) @ v)


def cup_bracket(u: np.ndarray, v: np.ndarray, data: CohomologyData,
                check: bool = True) -> np.ndarray:
    """Graded bracket of 1-cocycle classes, as a vector in coker(cobound_1).

    Same chain pipeline as sigma with the coefficient pairing replaced by the
    Lie bracket; the raw value is projected onto the orthocomplement of the
    image of the degree-one coboundary.
    """
    if check:
        for name, z in (("first", u), ("second", v)):
            defect = np.linalg.norm(data.cobound_1 @ z)
            if defect > CYCLE_TOL * max(1.0, np.linalg.norm(z)):
                raise NonCycleError(f"{name} cup_bracket argument is not a cocycle "
                                    f"(defect {defect:.2e})")
    group, d = data.group, data.group.dim
    out = np.zeros(d)
    for term in fundamental_chain(data.rep.genus):
        uval = cocycle_extension(data, u, term.prefix)
        j = term.letter
        vval = data.word_ad(term.prefix) @ (
            data.generator_ad(j) @ v[j * d:(j + 1) * d])
        out += term.sign * group.bracket_vec(uval, vval)
    # class in H^2: remove the image of the coboundary
    U, s, _ = np.linalg.svd(data.cobound_1)
    W = U[:, _rank(s):]
    return W @ (W.T @ out)


def component_harmonic(data: CohomologyData, projector: np.ndarray) -> np.ndarray:
    """Harmonic basis of the subcomplex with coefficients in one component."""
    key = projector.tobytes()
    if key in data._component_cache:
        return data._component_cache[key]
    d, n = data.group.dim, data.n_blocks
    if np.allclose(projector, np.eye(d)):
        H = data.harmonic
    else:
        big = np.kron(np.eye(n), np.eye(d) - projector)
        stack = np.vstack([data.boundary_1, data.cobound_1, big])
        _, s, vt = np.linalg.svd(stack)
        H = vt[_rank(s):].T
    data._component_cache[key] = H
    return H


def chains_pairing_gram(data: CohomologyData, chains: np.ndarray, split: FormSplit,
                        on_singular: str = "raise") -> np.ndarray:
    """Antisymmetric Gram of the intersection pairing over chain columns.

    Transports each column through cap duality component by component:
    within a definite component the cup Gram on harmonic classes is solved
    against the evaluation pairing, and the null component contributes
    nothing.  `on_singular` selects between raising SigmaSingularError and a
    pseudo-inverse with the standard rank cutoff.
    """
    cols = np.atleast_2d(chains.T).T
    total = np.zeros((cols.shape[1], cols.shape[1]))
    for comp in split.components:
        H = component_harmonic(data, comp.projector)
        if H.shape[1] == 0:
            continue
        S = _sigma_matrix(data, comp.primal_gram)
        SH = H.T @ S @ H
        B = H.T @ cols
        svals = np.linalg.svd(SH, compute_uv=False)
        if svals[0] <= 0 or svals[-1] <= 1e-12 * svals[0]:
            if on_singular == "raise":
                raise SigmaSingularError(
                    "cup Gram singular on a definite component; "
                    "the point is too close to a lower stratum")
            X = np.linalg.pinv(SH, rcond=RANK_PINV) @ B
        else:
            X = np.linalg.solve(SH, B)
        total += comp.sign * (B.T @ X)
    return 0.5 * (total - total.T)  # exact antisymmetrization of rounding noise


def intersection_pairing(a: np.ndarray, b: np.ndarray, data: CohomologyData,
                         form: InvariantForm | FormSplit,
                         check: bool = True, on_singular: str = "raise") -> float:
    """Intersection pairing of 1-cycles for an arbitrary invariant form.

    The form enters only through its definite/null split.  Descends to
    homology classes, is antisymmetric, and is equivariant under simultaneous
    conjugation of the representation and coadjoint action on the inputs.
    """
    split = form if isinstance(form, FormSplit) else split_form(form)
    if check:
        for name, z in (("first", a), ("second", b)):
            defect = np.linalg.norm(data.boundary_1 @ z)
            if defect > CYCLE_TOL * max(1.0, np.linalg.norm(z)):
                raise NonCycleError(f"{name} intersection argument is not a cycle "
                                    f"(defect {defect:.2e})")
    G = chains_pairing_gram(data, np.column_stack([a, b]), split, on_singular)
    return float(G[0, 1])


def equivariance_check(rep: Representation, x: np.ndarray, a: np.ndarray,
                       b: np.ndarray, form: InvariantForm | FormSplit,
                       data: CohomologyData | None = None) -> float:
    """|<a,b>_phi - <x.a, x.b>_(x phi x^-1)| for the coadjoint block action."""
    split = form if isinstance(form, FormSplit) else split_form(form)
    if data is None:
        data = build_complex(rep)
    base = intersection_pairing(a, b, data, split)
    Ax = rep.group.coadjoint_matrix(x)
    big = np.kron(np.eye(data.n_blocks), Ax)
    conj_data = build_complex(conjugate_representation(rep, x))
    moved = intersection_pairing(big @ a, big @ b, conj_data, split)
    return abs(base - moved)
