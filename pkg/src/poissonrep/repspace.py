"""Points of the representation space: relator-constrained tuples in G^(2g).

A representation assigns a group element to each free generator; it lies in
the constrained set when the relator word evaluates to the prescribed central
element.  Sampling draws Haar-like random tuples and Newton-projects onto the
constraint using the pseudo-inverse of the relator differential.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .evaluate import relator_differential, word_eval
from .fox import Word, relator
from .liegroups import MatrixGroup

CONSTRAINT_TOL = 1e-8


class SamplingError(RuntimeError):
    """Newton projection onto the constraint set failed to converge."""


@dataclass(frozen=True)
class Representation:
    """Tuple of group elements indexed by the free generators x1,y1,...

    Entries are stored as read-only arrays; treat instances as immutable
    values.  `central` is the prescribed central value of the relator.
    """

    group: MatrixGroup
    genus: int
    entries: tuple[np.ndarray, ...]
    central: np.ndarray

    def __post_init__(self):
        if len(self.entries) != 2 * self.genus:
            raise ValueError("entry count must be 2*genus")
        frozen = []
        for m in self.entries:
            a = np.array(m, dtype=complex)
            if np.linalg.norm(a @ a.conj().T - np.eye(self.group.size)) > 1e-8:
                raise ValueError("representation entry is not unitary/orthogonal")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "entries", tuple(frozen))
        c = np.array(self.central, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "central", c)

    def relator_value(self) -> np.ndarray:
        return word_eval(relator(self.genus).word, self)

    def relator_residual(self) -> float:
        return float(np.linalg.norm(self.relator_value() - self.central))

    def satisfies_constraint(self, tol: float = CONSTRAINT_TOL) -> bool:
        return self.relator_residual() <= tol

    def replace_entries(self, entries) -> "Representation":
        return Representation(self.group, self.genus, tuple(entries), self.central)


@dataclass(frozen=True)
class OrbitType:
    """Stabilizer dimension plus a discrete label (SU(2) gets named strata)."""

    h0: int
    label: str


def conjugate_representation(rep: Representation, x: np.ndarray) -> Representation:
    xi = np.linalg.inv(x)
    return rep.replace_entries(x @ m @ xi for m in rep.entries)


def stabilizer_dimension(rep: Representation, cutoff: float = 1e-8) -> int:
    """dim of the common fixed space of Ad(phi(z_i)) = kernel of d^0."""
    group = rep.group
    blocks = [np.eye(group.dim) - group.adjoint_matrix(m) for m in rep.entries]
    K = np.vstack(blocks)
    s = np.linalg.svd(K, compute_uv=False)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > cutoff * scale))
    return group.dim - rank

def orbit_type(rep: Representation) -> OrbitType:
    h0 = stabilizer_dimension(rep)
    if rep.group.name == "SU2":
        label = {0: "irreducible", 1: "abelian-noncentral", 3: "central"}.get(h0, f"h0={h0}")
    else:
        label = f"h0={h0}"
    return OrbitType(h0, label)


def newton_project(rep: Representation, tol: float = 1e-12, max_iter: int = 100,
                   damping: float = 0.5) -> tuple[Representation, list[float]]:
    """Project onto {relator = central} along the left-translated directions.

    Solves the linearized constraint with the pseudo-inverse of the relator
    differential; the step is halved while the residual does not decrease.
    Raises SamplingError when max_iter is exhausted.
    """
    group, n = rep.group, 2 * rep.genus
    c = rep.central
    history: list[float] = []
    current = rep
    for _ in range(max_iter):
        rv = current.relator_value()
        res = float(np.linalg.norm(rv - c))
        history.append(res)
        if res <= tol:
            return current, history
        target = group.alg_to_vec(group.log(np.linalg.inv(rv) @ c))
        D = relator_differential(current)
        X = np.linalg.pinv(D, rcond=1e-10) @ target
        step = 1.0
        for _ in range(40):
            cand = current.replace_entries(
                current.entries[i] @ group.exp(group.vec_to_alg(step * X[i * group.dim:(i + 1) * group.dim]))
                for i in range(n))
            if np.linalg.norm(cand.relator_value() - c) < res:
                current = cand
                break
            step *= damping
        else:
            break  # no descent direction left; trigger failure below
    raise SamplingError(f"Newton projection stalled at residual {history[-1]:.3e}")


def central_tuples(group: MatrixGroup, genus: int):
    """All tuples with entries in the admissible finite center {I, -I}."""
    cands = [group.identity()]
    try:
        cands.append(group.central_element("-I"))
    except ValueError:
        pass
    for combo in itertools.product(range(len(cands)), repeat=2 * genus):
        yield tuple(cands[k] for k in combo)


def sample_representation(group: MatrixGroup, genus: int, central, seed: int,
                          tol: float = 1e-12, max_restarts: int = 20,
                          central_tuple: bool = False) -> Representation:
    """Seeded sampling of a constrained representation.

    Draws a Haar-like random tuple and Newton-projects; up to `max_restarts`
    fresh draws are attempted before failing.  With central_tuple=True a
    random all-central tuple is returned instead (requires central = I).
    """
    c = group.central_element(central) if isinstance(central, (str, list, tuple)) \
        else np.asarray(central, dtype=complex)
    rng = np.random.default_rng(seed)
    if central_tuple:
        if np.linalg.norm(c - group.identity()) > 1e-12:
            raise ValueError("central tuples satisfy the constraint only for central = I")
        tuples = list(central_tuples(group, genus))
        pick = tuples[int(rng.integers(0, len(tuples)))]
        return Representation(group, genus, pick, c)
    last: SamplingError | None = None
    for _ in range(max_restarts):
        raw = Representation(group, genus,
                             tuple(group.random_element(rng) for _ in range(2 * genus)), c)
        try:
            projected, _ = newton_project(raw, tol=tol)
            return projected
        except SamplingError as err:
            last = err
    raise SamplingError(f"sampling failed after {max_restarts} restarts: {last}")


def sample_irreducible(group: MatrixGroup, genus: int, central, seed: int,
                       tol: float = 1e-12) -> Representation:
    """Sample until the stabilizer is central (h0 = 0); seeded and deterministic."""
    for k in range(50):
        rep = sample_representation(group, genus, central, seed + 1000003 * k, tol=tol)
        if stabilizer_dimension(rep) == 0:
            return rep
    raise SamplingError("no irreducible sample found")


def sample_abelian_su2(group: MatrixGroup, genus: int, seed: int) -> Representation:
    """SU(2) tuple inside one (conjugated) maximal torus, not all +-I."""
    if group.name != "SU2":
        raise ValueError("torus sampling implemented for SU2")
    rng = np.random.default_rng(seed)
    x = group.random_element(rng)
    xi = x.conj().T
    while True:
        angles = rng.uniform(0.15, np.pi - 0.15, size=2 * genus)
        signs = rng.choice([-1.0, 1.0], size=2 * genus)
        entries = [x @ np.diag([np.exp(1j * s * t), np.exp(-1j * s * t)]) @ xi
                   for s, t in zip(signs, angles)]
        rep = Representation(group, genus, tuple(entries), group.identity())
        if stabilizer_dimension(rep) == 1:
            return rep


def solve_conjugator(a_entries, b_entries, group: MatrixGroup) -> tuple[np.ndarray, float]:
    """Best x with a_i ~ x b_i x^-1, by the null vector of the linear system.

    Returns (x, sv) where sv is the smallest singular value of the stacked
    intertwining equations; sv ~ 0 certifies the tuples are conjugate.
    """
    m = group.size
    rows = [np.kron(a, np.eye(m)) - np.kron(np.eye(m), b.T)
            for a, b in zip(a_entries, b_entries)]
    M = np.vstack(rows)
    _, s, vt = np.linalg.svd(M)
    x = vt[-1].conj().reshape(m, m)
    return group.project_group(x), float(s[-1])


def representation_distance(a: Representation, b: Representation,
                            up_to_conjugation: bool = False) -> float:
    """max_i ||a_i - b_i||, optionally after best conjugation of b."""
    if up_to_conjugation:
        x, _ = solve_conjugator(a.entries, b.entries, a.group)
        xi = np.linalg.inv(x)
        return max(float(np.linalg.norm(p - x @ q @ xi))
                   for p, q in zip(a.entries, b.entries))
    return max(float(np.linalg.norm(p - q)) for p, q in zip(a.entries, b.entries))
