"""Evaluation of words, group-ring elements, and word-map differentials.

Tangent conventions used across the library: a tangent vector at a tuple
(g_1, ..., g_n) has components X_i in the Lie algebra, attached through the
curves g_i exp(t X_i) (left translation).  The differential of the relator
word map in these coordinates is

    X |-> Ad(r(phi))^-1 * sum_i evalAd(dr/dz_i) Ad(phi(z_i)) X_i

with left Fox derivatives; the Ad(phi(z_i)) factors convert left-translated
components into cocycle values and the outer factor pulls the derivative back
to the identity.  This assembly is pinned by the finite-difference tests, not
by any written convention.
"""

from __future__ import annotations

import numpy as np

from .fox import GroupRingElement, Word, fox_derivative, relator


class AlphabetError(ValueError):
    """A word uses generators the representation does not provide."""


def _check_alphabet(max_gen: int, n: int):
    if max_gen >= n:
        raise AlphabetError(
            f"word uses generator index {max_gen} but representation has {n} entries")


def word_eval(w: Word, rep) -> np.ndarray:
    """Evaluate the word map at a representation (matrix product)."""
    _check_alphabet(w.max_generator(), len(rep.entries))
    g = np.eye(rep.group.size, dtype=complex)
    for (i, s) in w.letters:
        m = rep.entries[i]
        # entries are unitary, so the inverse is the conjugate transpose
        g = g @ (m if s == 1 else m.conj().T)
    return g


def eval_group_ring(e: GroupRingElement, rep, action: str = "adjoint") -> np.ndarray:
    """Linear operator sum_w c_w * Act(word_eval(w)) on algebra coordinates.

    action is "adjoint" (operator on g) or "coadjoint" (operator on dual
    coordinates); with the orthonormal bases used here the two matrices
    coincide, but both entry points are kept so intent stays explicit.
    """
    group = rep.group
    if action == "adjoint":
        act = group.adjoint_matrix
    elif action == "coadjoint":
        act = group.coadjoint_matrix
    else:
        raise ValueError(f"unknown action {action!r}")
    M = np.zeros((group.dim, group.dim))
    for w, c in e.terms.items():
        M += c * act(word_eval(w, rep))
    return M


def relator_differential(rep, word_ad=None) -> np.ndarray:
    """Left-translated differential of the relator word map, as a matrix.

    Returns the (dim g) x (2*genus*dim g) matrix of the map described in the
    module docstring.  `word_ad`, when given, is a word -> adjoint-matrix
    cache (the cohomology layer passes its own).
    """
    group = rep.group
    n = 2 * rep.genus
    d = group.dim
    rel = relator(rep.genus)

    if word_ad is None:
        cache: dict[Word, np.ndarray] = {}

        def word_ad(w: Word) -> np.ndarray:
            if w not in cache:
                cache[w] = group.adjoint_matrix(word_eval(w, rep))
            return cache[w]

    def ring_ad(e: GroupRingElement) -> np.ndarray:
        M = np.zeros((d, d))
        for w, c in e.terms.items():
            M += c * word_ad(w)
        return M

    ad_r_inv = word_ad(rel.word).T  # adjoint matrices are orthogonal
    out = np.empty((d, n * d))
    for i in range(n):
        block = ad_r_inv @ ring_ad(fox_derivative(rel.word, i, n)) @ word_ad(Word.generator(i))
        out[:, i * d:(i + 1) * d] = block
    return out
