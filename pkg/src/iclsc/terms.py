"""Terms, substitutions and unification.

A term is a :class:`Var`, an :class:`Fn` (constants are zero-arity ``Fn``) or a
``fractions.Fraction``. Numbers are always exact rationals.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Optional, Union

from .errors import NotGround, UnboundArithmetic


class Var:
    __slots__ = ("name", "id")

    def __init__(self, name: str, id: int = 0):
        self.name = name
        self.id = id

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name and self.id == other.id

    def __hash__(self):
        return hash((Var, self.name, self.id))

    def __repr__(self):
        return self.name if self.id == 0 else f"{self.name}_{self.id}"


class Fn:
    __slots__ = ("name", "args", "_hash")

    def __init__(self, name: str, args: tuple = ()):
        self.name = name
        self.args = tuple(args)
        self._hash = hash((self.name, self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Fn)
            and self._hash == other._hash
            and self.name == other.name
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self):
        return (self.name, len(self.args))

    def __repr__(self):
        return format_term(self)


Term = Union[Var, Fn, Fraction]
Subst = Dict[Var, Term]

S0 = Fn("s0")
ARITH_OPS = frozenset({"+", "-", "*", "/"})


def const(name: str) -> Fn:
    return Fn(name)


def num(value) -> Fraction:
    return Fraction(value)


def do(action: Term, situation: Term) -> Fn:
    return Fn("do", (action, situation))


def is_arith(t: Term) -> bool:
    return isinstance(t, Fn) and t.name in ARITH_OPS and len(t.args) in (1, 2)


def walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def subst(t: Term, s: Subst) -> Term:
    if isinstance(t, Var):
        v = walk(t, s)
        return v if isinstance(v, Var) else subst(v, s)
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(subst(a, s) for a in t.args))
    return t


def unify(a: Term, b: Term, s: Optional[Subst] = None) -> Optional[Subst]:
    """Unify ``a`` and ``b`` extending ``s``; the input mapping is never mutated."""
    if s is None:
        s = {}
    stack = [(a, b)]
    out = s
    copied = False
    while stack:
        x, y = stack.pop()
        x = walk(x, out)
        y = walk(y, out)
        if x is y or x == y:
            continue
        if isinstance(x, Var) or isinstance(y, Var):
            if not copied:
                out = dict(out)
                copied = True
            if isinstance(x, Var):
                if occurs(x, y, out):
                    return None
                out[x] = y
            else:
                if occurs(y, x, out):
                    return None
                out[y] = x
            continue
        if isinstance(x, Fn) and isinstance(y, Fn):
            if x.name != y.name or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
            continue
        return None
    return out


def occurs(v: Var, t: Term, s: Subst) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Fn):
        return any(occurs(v, a, s) for a in t.args)
    return False


def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Fn):
        for a in t.args:
            yield from term_vars(a)


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Fn):
        return all(is_ground(a) for a in t.args)
    return True


def rename(t: Term, mapping: Dict[Var, Var], fresh: int) -> Term:
    if isinstance(t, Var):
        v = mapping.get(t)
        if v is None:
            v = mapping[t] = Var(t.name, fresh)
        return v
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(rename(a, mapping, fresh) for a in t.args))
    return t


def variant_key(t: Term, mapping: Optional[Dict[Var, int]] = None):
    """Hashable key equal for terms that are variants of each other."""
    if mapping is None:
        mapping = {}
    if isinstance(t, Var):
        return ("$v", mapping.setdefault(t, len(mapping)))
    if isinstance(t, Fn):
        if not t.args:
            return t
        return (t.name,) + tuple(variant_key(a, mapping) for a in t.args)
    return t


def evaluate(t: Term) -> Fraction:
    if isinstance(t, Fraction):
        return t
    if isinstance(t, Var):
        raise UnboundArithmetic(f"unbound operand {t}")
    if is_arith(t):
        vals = [evaluate(a) for a in t.args]
        if len(vals) == 1:
            if t.name == "-":
                return -vals[0]
            if t.name == "+":
                return vals[0]
        else:
            x, y = vals
            if t.name == "+":
                return x + y
            if t.name == "-":
                return x - y
            if t.name == "*":
                return x * y
            if y == 0:
                raise UnboundArithmetic(f"division by zero in {t}")
            return x / y
    raise UnboundArithmetic(f"not a number: {t}")


def is_situation(t: Term) -> bool:
    while isinstance(t, Fn) and t.name == "do" and len(t.args) == 2:
        t = t.args[1]
    return t == S0


def situation_depth(t: Term) -> int:
    d = 0
    while isinstance(t, Fn) and t.name == "do" and len(t.args) == 2:
        d += 1
        t = t.args[1]
    if t != S0:
        raise NotGround(t, "not a situation")
    return d


def max_situation_depth(t: Term) -> int:
    """Largest do-depth of any ground situation occurring inside ``t`` (-1 if none)."""
    if isinstance(t, Fn):
        if t == S0:
            return 0
        if t.name == "do" and len(t.args) == 2 and is_situation(t):
            return situation_depth(t)
        return max((max_situation_depth(a) for a in t.args), default=-1)
    return -1


def fraction_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    k2 = k5 = 0
    while d % 2 == 0:
        d //= 2
        k2 += 1
    while d % 5 == 0:
        d //= 5
        k5 += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    k = max(k2, k5)
    scaled = abs(q.numerator) * 10**k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_term(t: Term, prec: int = 0) -> str:
    if isinstance(t, Var):
        return repr(t)
    if isinstance(t, Fraction):
        s = fraction_str(t)
        if "/" in s or (prec > 0 and t < 0):
            return f"({s})"
        return s
    if is_arith(t):
        if len(t.args) == 1:
            return f"{t.name}{format_term(t.args[0], 3)}"
        p = _PREC[t.name]
        inner = f"{format_term(t.args[0], p)} {t.name} {format_term(t.args[1], p + 1)}"
        return f"({inner})" if p < prec else inner
    if not t.args:
        return t.name
    return f"{t.name}({', '.join(format_term(a) for a in t.args)})"
