"""Invariant functions on the representation space.

Expression trees over trace-of-word atoms, constants, sums, products, integer
powers, and post-composition with sin/cos/exp.  Values are conjugation
invariant because traces are.  Differentials are computed analytically in
left-translated coordinates: each occurrence of a generator in a trace word
contributes one cyclically rotated trace term, and the chain rule handles the
rest of the tree.

The expression grammar (parse_function / to_string round-trip):

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' integer)?
    atom   := number | 'tr' '(' word ')' | ('sin'|'cos'|'exp') '(' expr ')'
            | '(' expr ')' | '-' atom

where word uses the x1*y1^-1 token syntax.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .fox import Word, parse_word, word_str
from .homology import CohomologyData, build_complex
from .repspace import Representation


class InvariantFunction:
    """Base class; nodes implement value_and_diff against a complex build."""

    def value(self, rep_or_data) -> float:
        data = _as_data(rep_or_data)
        return self.value_and_diff(data)[0]

    def differential(self, rep_or_data) -> np.ndarray:
        data = _as_data(rep_or_data)
        return self.value_and_diff(data)[1]

    def value_and_diff(self, data: CohomologyData) -> tuple[float, np.ndarray]:
        raise NotImplementedError

    def substitute_words(self, mapping) -> "InvariantFunction":
        """Rebuild the tree with every trace word passed through `mapping`."""
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, _coerce(other)))

    def __radd__(self, other):
        return Sum((_coerce(other), self))

    def __mul__(self, other):
        return Product((self, _coerce(other)))

    def __rmul__(self, other):
        return Product((_coerce(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(-1.0), _coerce(other)))))

    def __pow__(self, k: int):
        return Power(self, k)

    def __str__(self):
        return to_string(self)


def _coerce(x) -> InvariantFunction:
    if isinstance(x, InvariantFunction):
        return x
    return Const(float(x))


def _as_data(rep_or_data) -> CohomologyData:
    if isinstance(rep_or_data, CohomologyData):
        return rep_or_data
    if isinstance(rep_or_data, Representation):
        return build_complex(rep_or_data)
    raise TypeError("expected a Representation or CohomologyData")


@dataclass(frozen=True)
class Const(InvariantFunction):
    c: float

    def value_and_diff(self, data):
        return self.c, np.zeros(data.n_blocks * data.group.dim)

    def substitute_words(self, mapping):
        return self


@dataclass(frozen=True)
class TraceWord(InvariantFunction):
    """Real part of the trace of the word map in the defining representation."""

    word: Word

    def value_and_diff(self, data):
        d, n = data.group.dim, data.n_blocks
        val = float(np.real(np.trace(data.word_matrix(self.word))))
        grad = np.zeros(n * d)
        letters = self.word.letters
        basis = data.group.basis
        for k, (j, s) in enumerate(letters):
            pre = data.word_matrix(Word(letters[:k]))
            post = data.word_matrix(Word(letters[k + 1:]))
            if s == 1:
                M = post @ pre @ data.rep.entries[j]
                sign = 1.0
            else:
                M = data.rep.entries[j].conj().T @ post @ pre
                sign = -1.0
            for t in range(d):
                grad[j * d + t] += sign * float(np.real(np.trace(M @ basis[t])))
        return val, grad

    def substitute_words(self, mapping):
        return TraceWord(mapping(self.word))


@dataclass(frozen=True)
class Sum(InvariantFunction):
    children: tuple

    def value_and_diff(self, data):
        val, grad = 0.0, np.zeros(data.n_blocks * data.group.dim)
        for c in self.children:
            v, g = c.value_and_diff(data)
            val += v
            grad = grad + g
        return val, grad

    def substitute_words(self, mapping):
        return Sum(tuple(c.substitute_words(mapping) for c in self.children))


@dataclass(frozen=True)
class Product(InvariantFunction):
    children: tuple

    def value_and_diff(self, data):
        vals, grads = [], []
        for c in self.children:
            v, g = c.value_and_diff(data)
            vals.append(v)
            grads.append(g)
        total = math.prod(vals)
        grad = np.zeros(data.n_blocks * data.group.dim)
        for i, g in enumerate(grads):
            rest = math.prod(vals[:i] + vals[i + 1:])
            grad = grad + rest * g
        return total, grad

    def substitute_words(self, mapping):
        return Product(tuple(c.substitute_words(mapping) for c in self.children))


@dataclass(frozen=True)
class Power(InvariantFunction):
    base: InvariantFunction
    exponent: int

    def value_and_diff(self, data):
        v, g = self.base.value_and_diff(data)
        k = self.exponent
        return v ** k, (k * v ** (k - 1)) * g

    def substitute_words(self, mapping):
        return Power(self.base.substitute_words(mapping), self.exponent)


_SMOOTH = {
    "sin": (math.sin, math.cos),
    "cos": (math.cos, lambda x: -math.sin(x)),
    "exp": (math.exp, math.exp),
}


@dataclass(frozen=True)
class Compose(InvariantFunction):
    name: str
    child: InvariantFunction

    def value_and_diff(self, data):
        f, fprime = _SMOOTH[self.name]
        v, g = self.child.value_and_diff(data)
        return f(v), fprime(v) * g

    def substitute_words(self, mapping):
        return Compose(self.name, self.child.substitute_words(mapping))


def trace_of(word_or_text) -> TraceWord:
    w = word_or_text if isinstance(word_or_text, Word) else parse_word(word_or_text)
    return TraceWord(w)


# -- serialization ------------------------------------------------------------

def to_string(f: InvariantFunction) -> str:
    if isinstance(f, Const):
        return repr(f.c)
    if isinstance(f, TraceWord):
        return f"tr({word_str(f.word)})"
    if isinstance(f, Sum):
        return " + ".join(_paren(c, Sum) for c in f.children)
    if isinstance(f, Product):
        return "*".join(_paren(c, Product) for c in f.children)
    if isinstance(f, Power):
        return f"{_paren(f.base, Power)}^{f.exponent}"
    if isinstance(f, Compose):
        return f"{f.name}({to_string(f.child)})"
    raise TypeError(type(f))


def _paren(c: InvariantFunction, context) -> str:
    s = to_string(c)
    needs = isinstance(c, Sum) and context in (Product, Power) \
        or isinstance(c, Product) and context is Power \
        or isinstance(c, Const) and c.c < 0 and context in (Product, Power)
    return f"({s})" if needs else s


class _Parser:
    _NUM = re.compile(r"[0-9]+(\.[0-9]*)?([eE][+-]?[0-9]+)?")
    _NAME = re.compile(r"[a-z]+")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"parse error at {self.pos} in {self.text!r}: {msg}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> InvariantFunction:
        e = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")
        return e

    def expr(self) -> InvariantFunction:
        terms = [self.term()]
        while self.peek() in "+-":
            op = self.peek()
            self.pos += 1
            t = self.term()
            terms.append(t if op == "+" else Product((Const(-1.0), t)))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> InvariantFunction:
        factors = [self.factor()]
        while self.peek() == "*":
            self.pos += 1
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> InvariantFunction:
        a = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            m = re.match(r"-?[0-9]+", self.text[self.pos:])
            if m is None:
                self.error("expected integer exponent")
            self.pos += len(m.group(0))
            k = int(m.group(0))
            if k < 0:
                self.error("negative powers are not smooth on the whole space")
            return Power(a, k)
        return a

    def atom(self) -> InvariantFunction:
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return Product((Const(-1.0), self.atom()))
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit():
            self.skip()
            m = self._NUM.match(self.text[self.pos:])
            self.pos += len(m.group(0))
            return Const(float(m.group(0)))
        self.skip()
        m = self._NAME.match(self.text[self.pos:])
        if m is None:
            self.error("expected atom")
        name = m.group(0)
        self.pos += len(name)
        self.expect("(")
        if name == "tr":
            depth, start = 1, self.pos
            while depth:
                if self.pos >= len(self.text):
                    self.error("unbalanced tr(")
                c = self.text[self.pos]
                depth += c == "("
                depth -= c == ")"
                self.pos += 1
            return TraceWord(parse_word(self.text[start:self.pos - 1]))
        if name in _SMOOTH:
            e = self.expr()
            self.expect(")")
            return Compose(name, e)
        self.error(f"unknown function {name!r}")


def parse_function(text: str) -> InvariantFunction:
    return _Parser(text).parse()
