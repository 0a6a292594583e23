"""The Poisson bracket of invariant functions and its diagnostics.

Two routes are provided and tested against each other:

  * poisson_bracket: class-level route on the constraint set -- project both
    differentials to harmonic representatives, then apply the intersection
    pairing.  Demands constraint membership.
  * ambient_bracket: chain-level route defined at every tuple -- the same
    pairing applied to the raw differentials with a pseudo-inverse fallback.
    Smooth in the base point, which is what makes finite-difference outer
    differentiation (Jacobi residuals) meaningful.

On the constraint set the two agree because differentials of invariant
functions are cycles there and the pairing only sees harmonic parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homology import CohomologyData, build_complex, homology_class
from .intersection import chains_pairing_gram
from .liegroups import FormSplit, InvariantForm, split_form
from .repspace import CONSTRAINT_TOL, Representation


class NotOnConstraintError(ValueError):
    """The representation does not satisfy the relator constraint."""


def as_split(form) -> FormSplit:
    return form if isinstance(form, FormSplit) else split_form(form)


def _as_data(rep_or_data) -> CohomologyData:
    if isinstance(rep_or_data, CohomologyData):
        return rep_or_data
    return build_complex(rep_or_data)


def differential(f, rep_or_data) -> np.ndarray:
    """Left-translated differential of an invariant function (stacked blocks)."""
    return f.differential(_as_data(rep_or_data))


@dataclass(frozen=True)
class BracketValue:
    value: float
    cycle_defect_f: float
    cycle_defect_h: float
    class_norm_f: float
    class_norm_h: float


def poisson_bracket(f, h, rep_or_data, form, membership_tol: float = CONSTRAINT_TOL,
                    on_singular: str = "pinv") -> BracketValue:
    """{f, h} at a constrained representation, with cycle diagnostics."""
    data = _as_data(rep_or_data)
    resid = data.rep.relator_residual()
    if resid > membership_tol:
        raise NotOnConstraintError(
            f"relator residual {resid:.3e} exceeds {membership_tol:.1e}")
    split = as_split(form)
    df = f.differential(data)
    dh = h.differential(data)
    pf = homology_class(df, data)
    ph = homology_class(dh, data)
    G = chains_pairing_gram(data, np.column_stack([pf, ph]), split, on_singular)
    return BracketValue(
        value=float(G[0, 1]),
        cycle_defect_f=float(np.linalg.norm(data.boundary_1 @ df)),
        cycle_defect_h=float(np.linalg.norm(data.boundary_1 @ dh)),
        class_norm_f=float(np.linalg.norm(pf)),
        class_norm_h=float(np.linalg.norm(ph)),
    )


def ambient_bracket(f, h, rep_or_data, form) -> float:
    """Chain-level bracket, defined at every tuple (no membership demanded)."""
    data = _as_data(rep_or_data)
    split = as_split(form)
    cols = np.column_stack([f.differential(data), h.differential(data)])
    G = chains_pairing_gram(data, cols, split, on_singular="pinv")
    return float(G[0, 1])


def bracket_gram(data: CohomologyData, funcs, form, project: bool = False,
                 on_singular: str = "pinv") -> np.ndarray:
    """Antisymmetric matrix {f_i, f_j} over a family, in one pairing solve."""
    split = as_split(form)
    cols = np.column_stack([fn.differential(data) for fn in funcs])
    if project:
        cols = data.harmonic @ (data.harmonic.T @ cols)
    return chains_pairing_gram(data, cols, split, on_singular)


def casimir_residual(f, rep_or_data, form, family) -> float:
    """max_j |{f, h_j}| over the probe family; ~0 flags a numerical Casimir."""
    data = _as_data(rep_or_data)
    G = bracket_gram(data, [f, *family], form, project=True)
    return float(np.max(np.abs(G[0, 1:]))) if len(family) else 0.0


def _perturbed(rep: Representation, i: int, direction: np.ndarray, t: float) -> Representation:
    g = rep.group
    step = g.exp(g.vec_to_alg(t * direction))
    entries = list(rep.entries)
    entries[i] = entries[i] @ step
    return rep.replace_entries(entries)


def jacobi_residual(f, h, k, rep: Representation, form, step: float = 1e-4) -> float:
    """|{{f,h},k} + {{h,k},f} + {{k,f},h}| with FD outer differentiation.

    The inner brackets are the ambient (chain-level) values, smooth on the
    whole tuple space; their differentials are formed by 5-point central
    differences along every left-translated coordinate direction (fourth
    order, the two-step Richardson of plain central differences).
    """
    split = as_split(form)
    base = build_complex(rep)
    funcs = (f, h, k)
    base_cols = np.column_stack([fn.differential(base) for fn in funcs])
    d, n = base.group.dim, base.n_blocks
    nd = n * d
    pairs = [(0, 1), (1, 2), (2, 0)]

    def pair_values(r: Representation) -> dict:
        data = build_complex(r)
        cols = np.column_stack([fn.differential(data) for fn in funcs])
        G = chains_pairing_gram(data, cols, split, on_singular="pinv")
        return {p: G[p] for p in pairs}

    grads = {p: np.zeros(nd) for p in pairs}
    eye = np.eye(d)
    for i in range(n):
        for t in range(d):
            e = eye[t]
            v1 = pair_values(_perturbed(rep, i, e, step))
            v2 = pair_values(_perturbed(rep, i, e, -step))
            v3 = pair_values(_perturbed(rep, i, e, 2 * step))
            v4 = pair_values(_perturbed(rep, i, e, -2 * step))
            for p in pairs:
                grads[p][i * d + t] = \
                    (8.0 * (v1[p] - v2[p]) - (v3[p] - v4[p])) / (12.0 * step)

    total = 0.0
    for (a, b), c in zip(pairs, (2, 0, 1)):
        cols = np.column_stack([
            base.harmonic_projection(grads[(a, b)]),
            base.harmonic_projection(base_cols[:, c]),
        ])
        G = chains_pairing_gram(base, cols, split, on_singular="pinv")
        total += G[0, 1]
    return abs(float(total))


class ConstraintResidualSquared:
    """|| r(.) - c ||_F^2: invariant, vanishes identically on the constraint set.

    Its differential at a constrained point is exactly zero (the function is
    quadratic in the residual), so adding it to either bracket slot must not
    move the value; used by the well-definedness tests.
    """

    def value(self, rep_or_data) -> float:
        data = _as_data(rep_or_data)
        return float(np.linalg.norm(data.rep.relator_value() - data.rep.central) ** 2)

    def differential(self, rep_or_data) -> np.ndarray:
        data = _as_data(rep_or_data)
        rep = data.rep
        rv = rep.relator_value()
        K = rv.conj().T @ (rv - rep.central)
        # d||r-c||^2 along left-translated direction e is 2<K, alg(D e)>_F
        return 2.0 * data.cobound_1.T @ rep.group.alg_to_vec(K)

    def add_to(self, other) -> "_ShiftedFunction":
        """The function other + self (works for any differentiable function)."""
        return _ShiftedFunction(other, self)


class _ShiftedFunction:
    """h + v for a non-expression-tree summand v (keeps both differentials)."""

    def __init__(self, f, v):
        self.f, self.v = f, v

    def value(self, rep_or_data):
        return self.f.value(rep_or_data) + self.v.value(rep_or_data)

    def differential(self, rep_or_data):
        data = _as_data(rep_or_data)
        return self.f.differential(data) + self.v.differential(data)
