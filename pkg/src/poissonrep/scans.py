"""Poisson-rank scans, orbit-type censuses, and mapping-class checks.

The rank of the Poisson structure at a point is probed through the
antisymmetric Gram matrix of brackets over a finite family of invariant
functions: generator traces, pair-product traces, and a seeded batch of
random short words.  The rank cutoff is looser than the linear-algebra
cutoffs used elsewhere (1e-6 relative) because bracket entries carry the
noise of the whole pairing pipeline; the observed spectra separate the
strata by many orders of magnitude, which the records report as `sv_gap`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracket import as_split, bracket_gram, poisson_bracket
from .fox import Word, relator, word_str
from .functions import InvariantFunction, TraceWord
from .homology import build_complex
from .liegroups import MatrixGroup
from .repspace import (Representation, central_tuples, orbit_type,
                       sample_abelian_su2, sample_irreducible,
                       sample_representation, solve_conjugator)

RANK_CUTOFF = 1e-6


def random_word(rng: np.random.Generator, n_gens: int, max_len: int) -> Word:
    """Non-backtracking random walk in the free group, freely reduced."""
    length = int(rng.integers(2, max_len + 1))
    letters = []
    prev = None
    for _ in range(length):
        while True:
            g = int(rng.integers(0, n_gens))
            s = int(rng.choice([-1, 1]))
            if prev is None or (g, s) != (prev[0], -prev[1]):
                break
        letters.append((g, s))
        prev = (g, s)
    w = Word.from_letters(letters)
    return w if w else Word.generator(0)


def probe_family(group: MatrixGroup, genus: int, seed: int,
                 n_random: int | None = None, max_len: int = 6) -> list[InvariantFunction]:
    """Trace functions probing the bracket rank; deterministic per seed.

    Generator traces, all ordered-pair product traces, plus n_random
    (default 2*genus) random reduced words of bounded length.
    """
    n = 2 * genus
    fam: list[InvariantFunction] = [TraceWord(Word.generator(i)) for i in range(n)]
    fam += [TraceWord(Word.generator(i) * Word.generator(j))
            for i in range(n) for j in range(i + 1, n)]
    rng = np.random.default_rng(seed)
    count = 2 * genus if n_random is None else n_random
    seen = {f.word for f in fam}
    while count > 0:
        w = random_word(rng, n, max_len)
        if w in seen:
            continue
        seen.add(w)
        fam.append(TraceWord(w))
        count -= 1
    return fam


@dataclass(frozen=True)
class ScanRecord:
    seed: int
    orbit_label: str
    h0: int
    h1: int
    rank: int
    sv_gap: float
    spectrum: tuple[float, ...]
    relator_residual: float


def poisson_rank(rep: Representation, form, family,
                 cutoff: float = RANK_CUTOFF, seed: int = -1) -> ScanRecord:
    """Numerical rank of the bracket Gram over the family at one point."""
    data = build_complex(rep)
    G = bracket_gram(data, family, form, project=True)
    svals = np.linalg.svd(G, compute_uv=False)
    top = svals[0] if svals.size else 0.0
    if top <= 1e-14 * max(1.0, float(np.max(np.abs(G))) if G.size else 1.0) or top == 0.0:
        rank, gap = 0, float("inf")
    else:
        rank = int(np.sum(svals > cutoff * top))
        gap = float(svals[rank - 1] / svals[rank]) if rank < len(svals) and svals[rank] > 0 \
            else float("inf")
    ot = orbit_type(rep)
    return ScanRecord(seed=seed, orbit_label=ot.label, h0=ot.h0, h1=data.dims[1],
                      rank=rank, sv_gap=gap, spectrum=tuple(float(s) for s in svals),
                      relator_residual=rep.relator_residual())


@dataclass
class CensusReport:
    central: list[ScanRecord] = field(default_factory=list)
    abelian: list[ScanRecord] = field(default_factory=list)
    irreducible: list[ScanRecord] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    def rank_pattern(self) -> dict:
        return {
            "central": sorted({r.rank for r in self.central}),
            "abelian": sorted({r.rank for r in self.abelian}),
            "irreducible": sorted({r.rank for r in self.irreducible}),
        }


def kummer_census(group: MatrixGroup, seed: int, n_abelian: int = 50,
                  n_irreducible: int = 50, form=None, genus: int = 2) -> CensusReport:
    """Genus-2 SU(2) rank census over the three orbit-type strata.

    Enumerates all 2^(2*genus) central tuples (expected rank 0), samples the
    torus stratum (expected rank 4) and the irreducible stratum (expected
    rank 6).  Unexpected ranks are recorded as violations, not raised.
    """
    if group.name != "SU2":
        raise ValueError("the census is an SU(2) experiment")
    from .liegroups import identity_form
    form = form if form is not None else identity_form(group)
    split = as_split(form)
    family = probe_family(group, genus, seed)
    report = CensusReport()

    for k, entries in enumerate(central_tuples(group, genus)):
        rep = Representation(group, genus, entries, group.identity())
        rec = poisson_rank(rep, split, family, seed=seed + k)
        report.central.append(rec)
        if rec.rank != 0:
            report.violations.append(f"central tuple {k}: rank {rec.rank} != 0")

    for k in range(n_abelian):
        rep = sample_abelian_su2(group, genus, seed + 10_000 + k)
        rec = poisson_rank(rep, split, family, seed=seed + 10_000 + k)
        report.abelian.append(rec)
        if rec.rank != 4:
            report.violations.append(f"abelian sample {k}: rank {rec.rank} != 4")

    for k in range(n_irreducible):
        rep = sample_irreducible(group, genus, "I", seed + 20_000 + k)
        rec = poisson_rank(rep, split, family, seed=seed + 20_000 + k)
        report.irreducible.append(rec)
        if rec.rank != 6:
            report.violations.append(f"irreducible sample {k}: rank {rec.rank} != 6")

    return report


# -- mapping classes -----------------------------------------------------------


@dataclass(frozen=True)
class MappingClass:
    """Free-group automorphism given by generator images.

    `images[i]` is the image word of generator i.  The constructor does not
    verify relator preservation; call relator_defect / preserves_relator.
    """

    name: str
    images: tuple[Word, ...]

    def apply_word(self, w: Word) -> Word:
        out = Word.identity()
        for (i, s) in w.letters:
            img = self.images[i]
            out = out * (img if s == 1 else img.inverse())
        return out

    def pull_back(self, f: InvariantFunction) -> InvariantFunction:
        return f.substitute_words(self.apply_word)

    def push_representation(self, rep: Representation) -> Representation:
        from .evaluate import word_eval
        return rep.replace_entries(word_eval(img, rep) for img in self.images)

    def preserves_relator_exactly(self, genus: int) -> bool:
        return self.apply_word(relator(genus).word) == relator(genus).word

    def relator_conjugation_residual(self, rep: Representation) -> float:
        """Residual of beta(r) ~ r at one representation, after conjugator solve."""
        from .evaluate import word_eval
        a = word_eval(self.apply_word(relator(rep.genus).word), rep)
        b = word_eval(relator(rep.genus).word, rep)
        x, _ = solve_conjugator([a], [b], rep.group)
        return float(np.linalg.norm(a - x @ b @ np.linalg.inv(x)))


class RelatorNotPreservedError(ValueError):
    pass


def dehn_twist(genus: int, pair: int = 0, inverse: bool = False,
               on: str = "y") -> MappingClass:
    """The twist y_i -> y_i x_i^(+-1) (or x_i -> x_i y_i^(+-1)); fixes r exactly."""
    n = 2 * genus
    images = [Word.generator(i) for i in range(n)]
    x, y = 2 * pair, 2 * pair + 1
    s = -1 if inverse else 1
    if on == "y":
        images[y] = Word.generator(y) * Word.generator(x, s)
        name = f"y{pair+1}->y{pair+1}x{pair+1}" + ("^-1" if inverse else "")
    else:
        images[x] = Word.generator(x) * Word.generator(y, s)
        name = f"x{pair+1}->x{pair+1}y{pair+1}" + ("^-1" if inverse else "")
    return MappingClass(name, tuple(images))


def mcg_pullback_check(beta: MappingClass, f, h, rep: Representation, form,
                       conj_tol: float = 1e-9) -> float:
    """| {f o beta, h o beta}(phi) - {f, h}(phi o beta) |.

    Requires beta to preserve the relator (exactly, or up to conjugation at
    this representation); the pushed representation then still satisfies the
    constraint because the central target is conjugation invariant.
    """
    genus = rep.genus
    if not beta.preserves_relator_exactly(genus):
        resid = beta.relator_conjugation_residual(rep)
        if resid > conj_tol:
            raise RelatorNotPreservedError(
                f"{beta.name} moves the relator class (residual {resid:.2e})")
    split = as_split(form)
    lhs = poisson_bracket(beta.pull_back(f), beta.pull_back(h), rep, split).value
    pushed = beta.push_representation(rep)
    rhs = poisson_bracket(f, h, pushed, split).value
    return abs(lhs - rhs)


def scan_csv_rows(records) -> list[dict]:
    return [
        {"seed": r.seed, "orbit_type": r.orbit_label, "h0": r.h0, "h1": r.h1,
         "rank": r.rank, "sv_gap": r.sv_gap,
         "relator_residual": r.relator_residual}
        for r in records
    ]


def family_words(family) -> list[str]:
    return [word_str(f.word) if isinstance(f, TraceWord) else str(f) for f in family]
