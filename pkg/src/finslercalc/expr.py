"""Exact symbolic expressions over base/fiber coordinates.

An expression is kept permanently in canonical form: a quotient N/D of
polynomials over the coordinate symbols plus *radical atoms*.  A radical
atom stands for ``radicand**(1/q)``; its q-th power rewrites back to the
radicand, perfect q-th-power factors are pulled out of radicands at
creation, and denominators are always cleared of atoms.  Numerator and
denominator are coprime, the denominator has coprime integer coefficients
and positive leading coefficient under graded lex order with base
coordinates before fiber coordinates.

Two expressions that are equal as functions (within the supported
fragment of rational functions extended by radicals of rational
functions) therefore compare equal structurally, and the difference of
equal expressions canonicalizes to the zero constant.
"""

from __future__ import annotations

import enum
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .poly import (
    Poly,
    div_exact,
    int_power_extract,
    make_primitive,
    poly_gcd,
    power_free_extract,
)


class ExprError(Exception):
    """Base class for expression-layer failures."""


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unknown identifier: {name!r}")
        self.name = name


class DomainError(ExprError):
    """Numeric evaluation hit a zero denominator or an invalid radicand."""


class ZeroStatus(enum.Enum):
    ZERO = "zero"
    NON_ZERO = "nonzero"
    NUMERICALLY_ZERO = "numerically-zero"


@dataclass(frozen=True)
class Var:
    """A declared coordinate: base ('x') or fiber ('y'), 1-based index."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("x", "y"):
            raise ValueError("Var kind must be 'x' or 'y'")
        if self.index < 1:
            raise ValueError("Var index is 1-based")


@dataclass(frozen=True)
class NumericPoint:
    """A sample point on the slit tangent bundle."""

    x: tuple[float, ...]
    y: tuple[float, ...]


@dataclass
class _Atom:
    sym: int
    q: int
    radicand: "Expr"  # canonical, involves only symbols below ``sym``


class Context:
    """Symbol table for one (dimension, coordinate names) universe.

    Expressions are tied to the context that created them.  The context
    also memoizes derivatives; the caches are guarded by a lock so
    expressions can be shared freely between threads.
    """

    def __init__(self, dim: int, coord_names: Sequence[str], fiber_names: Sequence[str]):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if len(coord_names) != dim or len(fiber_names) != dim:
            raise ValueError("need exactly dim coordinate and fiber names")
        names = list(coord_names) + list(fiber_names)
        if len(set(names)) != len(names):
            raise ValueError("coordinate and fiber names must be distinct")
        self.dim = dim
        self.coord_names = tuple(coord_names)
        self.fiber_names = tuple(fiber_names)
        self._name_to_var = {n: Var("x", i + 1) for i, n in enumerate(coord_names)}
        self._name_to_var.update({n: Var("y", i + 1) for i, n in enumerate(fiber_names)})
        self._atoms: list[_Atom] = []
        self._atoms_by_key: dict[tuple, int] = {}
        self._lock = threading.RLock()
        self._diff_cache: dict[tuple["Expr", int], "Expr"] = {}
        self._atom_diff_cache: dict[tuple[int, int], "Expr"] = {}
        self.zero = Expr(self, Poly.zero(), Poly.one())
        self.one = Expr(self, Poly.one(), Poly.one())

    # -- symbols ---------------------------------------------------------

    def sym_of(self, v: Var) -> int:
        if v.index > self.dim:
            raise UnknownIdentifierError(f"{v.kind}{v.index}")
        return (v.index - 1) if v.kind == "x" else (self.dim + v.index - 1)

    def var_named(self, name: str) -> Var:
        try:
            return self._name_to_var[name]
        except KeyError:
            raise UnknownIdentifierError(name) from None

    def sym_name(self, sym: int) -> str:
        if sym < self.dim:
            return self.coord_names[sym]
        if sym < 2 * self.dim:
            return self.fiber_names[sym - self.dim]
        raise ValueError("atom symbols have no coordinate name")

    def is_atom_sym(self, sym: int) -> bool:
        return sym >= 2 * self.dim

    def atom_at(self, sym: int) -> _Atom:
        return self._atoms[sym - 2 * self.dim]

    # -- constructors ------------------------------------------------------

    def number(self, value) -> "Expr":
        return Expr(self, Poly.const(Fraction(value)), Poly.one())

    def var(self, v: Var) -> "Expr":
        return Expr(self, Poly.variable(self.sym_of(v)), Poly.one())

    def base(self, index: int) -> "Expr":
        return self.var(Var("x", index))

    def fiber(self, index: int) -> "Expr":
        return self.var(Var("y", index))

    def vars(self) -> list[Var]:
        return [Var("x", i) for i in range(1, self.dim + 1)] + [
            Var("y", i) for i in range(1, self.dim + 1)
        ]

    def parse(self, text: str) -> "Expr":
        from .parsing import parse

        return parse(text, self)

    # -- radical atoms ------------------------------------------------------

    def root(self, e: "Expr", q: int) -> "Expr":
        """The real q-th root of ``e`` as a canonical expression.

        Perfect q-th-power factors are extracted (valid on the positive
        sampling domain), the radicand is cleared of denominators via
        root(n/d) = root(n*d**(q-1))/d and normalized to a primitive
        polynomial times a q-th-power-free integer, and structurally
        equal radicands share one atom.
        """
        if q < 2:
            if q == 1:
                return e
            raise ValueError("root index must be >= 1")
        if e.ctx is not self:
            raise ValueError("expression belongs to a different context")
        if e.num.is_zero():
            return self.zero
        radicand = e.num * e.den ** (q - 1)
        prefactor = Expr(self, Poly.one(), e.den)
        # pull q-th powers out of the monomial part (valid for atoms too)
        mono_out: list[tuple[int, int]] = []
        mins: dict[int, int] = {}
        first = True
        for exps in radicand.terms:
            if first:
                mins = {i: x for i, x in enumerate(exps) if x}
                first = False
            else:
                for i in list(mins):
                    got = exps[i] if i < len(exps) else 0
                    if got < mins[i]:
                        if got:
                            mins[i] = got
                        else:
                            del mins[i]
        shift: dict[int, int] = {}
        for i, m in mins.items():
            if m >= q:
                mono_out.append((i, m // q))
                shift[i] = (m // q) * q
        if shift:
            stripped = {}
            for exps, c in radicand.terms.items():
                lst = list(exps)
                for i, s in shift.items():
                    lst[i] -= s
                while lst and lst[-1] == 0:
                    lst.pop()
                stripped[tuple(lst)] = c
            radicand = Poly(stripped)
        if any(self.is_atom_sym(s) for s in radicand.symbols()):
            # tower case: polynomial factor extraction would need atom-aware
            # derivatives, so normalize the constant only
            content, a_poly = make_primitive(radicand)
        else:
            content, a_poly, b_poly = power_free_extract(radicand, q)
            if not b_poly.is_const():
                prefactor = prefactor * Expr(self, b_poly, Poly.one())
        # content = sign * s/t; root(content*a) = (b2/t)*root(sign*a2*a)
        # with s*t**(q-1) = a2*b2**q and a2 q-th-power free
        sign = -1 if content < 0 else 1
        s, t = abs(content).numerator, abs(content).denominator
        a2, b2 = int_power_extract(s * t ** (q - 1), q)
        const_mult = Fraction(b2, t)
        if sign < 0 and q % 2 == 1:
            const_mult = -const_mult
            sign = 1
        result = prefactor.scale(const_mult)
        for sym, power in mono_out:
            result = result * Expr(self, Poly.monomial((0,) * sym + (power,)), Poly.one())
        rad_final = a_poly.scale(sign * a2)
        if rad_final.is_const() and rad_final.const_value() == 1:
            return result
        atom_sym = self._intern_atom(rad_final, q)
        return result * Expr(self, Poly.variable(atom_sym), Poly.one())

    def sqrt(self, e: "Expr") -> "Expr":
        return self.root(e, 2)

    def _intern_atom(self, rad_poly: Poly, q: int) -> int:
        with self._lock:
            key = (q, rad_poly)
            got = self._atoms_by_key.get(key)
            if got is not None:
                return got
            sym = 2 * self.dim + len(self._atoms)
            self._atoms.append(_Atom(sym, q, Expr(self, rad_poly, Poly.one())))
            self._atoms_by_key[key] = sym
            return sym

    def _atom_derivative(self, sym: int, wrt: int) -> "Expr":
        with self._lock:
            got = self._atom_diff_cache.get((sym, wrt))
        if got is not None:
            return got
        atom = self.atom_at(sym)
        drad = atom.radicand._diff_sym(wrt)
        if drad.num.is_zero():
            result = self.zero
        else:
            root_expr = Expr(self, Poly.variable(sym), Poly.one())
            result = drad * root_expr / atom.radicand
            result = result.scale(Fraction(1, atom.q))
        with self._lock:
            self._atom_diff_cache[(sym, wrt)] = result
        return result


class Expr:
    """Canonical immutable expression; see module docstring."""

    __slots__ = ("ctx", "num", "den", "_hash")

    def __init__(self, ctx: Context, num: Poly, den: Poly, _normalized: bool = False):
        self.ctx = ctx
        if _normalized:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(ctx, num, den)
        self._hash: int | None = None

    # -- identity ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"Expr({self})"

    def __str__(self) -> str:
        from .parsing import to_text

        return to_text(self)

    # -- predicates ------------------------------------------------------

    def is_zero_expr(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ExprError("not a constant expression")
        return self.num.const_value() / self.den.const_value()

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "Expr | None":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.number(other)
        return None

    def __add__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        if self.num.is_zero():
            return o
        if o.num.is_zero():
            return self
        # cross-cancellation keeps every gcd call small (Knuth 4.5.1);
        # sums never grow atom exponents, so no re-reduction is needed
        if self.den == o.den:
            num = self.num + o.num
            if num.is_zero():
                return ctx.zero
            if _is_one(self.den):
                return Expr(ctx, num, self.den, _normalized=True)
            g = poly_gcd(num, self.den)
            if _is_one(g):
                return Expr(ctx, num, self.den, _normalized=True)
            return Expr(ctx, div_exact(num, g), div_exact(self.den, g), _normalized=True)
        g = poly_gcd(self.den, o.den)
        if _is_one(g):
            num = self.num * o.den + o.num * self.den
            if num.is_zero():
                return ctx.zero
            return Expr(ctx, num, self.den * o.den, _normalized=True)
        bq = div_exact(self.den, g)
        dq = div_exact(o.den, g)
        t = self.num * dq + o.num * bq
        if t.is_zero():
            return ctx.zero
        g2 = poly_gcd(t, g)
        if _is_one(g2):
            return Expr(ctx, t, bq * o.den, _normalized=True)
        return Expr(
            ctx, div_exact(t, g2), div_exact(self.den, g2) * dq, _normalized=True
        )

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(self.ctx, -self.num, self.den, _normalized=True)

    def __sub__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        if self.num.is_zero() or o.num.is_zero():
            return ctx.zero
        a_num, a_den = self.num, self.den
        b_num, b_den = o.num, o.den
        if not _is_one(b_den):
            g = poly_gcd(a_num, b_den)
            if not _is_one(g):
                a_num = div_exact(a_num, g)
                b_den = div_exact(b_den, g)
        if not _is_one(a_den):
            g = poly_gcd(b_num, a_den)
            if not _is_one(g):
                b_num = div_exact(b_num, g)
                a_den = div_exact(a_den, g)
        num = a_num * b_num
        den = a_den * b_den
        reduced, extra = _reduce_atoms(ctx, num)
        if reduced is not num or not _is_one(extra):
            return Expr(ctx, reduced, den * extra)
        return Expr(ctx, num, den, _normalized=True)

    __rmul__ = __mul__

    def scale(self, c) -> "Expr":
        c = Fraction(c)
        if not c:
            return self.ctx.zero
        return Expr(self.ctx, self.num.scale(c), self.den, _normalized=True)

    def __truediv__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._inverse()

    def __rtruediv__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._inverse()

    def __pow__(self, n) -> "Expr":
        if not isinstance(n, (int, Fraction)):
            return NotImplemented
        if isinstance(n, Fraction):
            if n.denominator != 1:
                base = self.ctx.root(self, n.denominator)
                return base ** n.numerator
            n = n.numerator
        if n == 0:
            return self.ctx.one
        if n < 0:
            return self._inverse() ** (-n)
        num = self.num**n
        if any(self.ctx.is_atom_sym(s) for s in num.symbols()):
            return Expr(self.ctx, num, self.den**n)
        return Expr(self.ctx, num, self.den**n, _normalized=True)

    def _inverse(self) -> "Expr":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero expression")
        if not any(self.ctx.is_atom_sym(s) for s in self.num.symbols()):
            c, prim = make_primitive(self.num)
            return Expr(self.ctx, self.den.scale(Fraction(1) / c), prim, _normalized=True)
        inv_num = _invert_atom_poly(self.ctx, self.num)
        return inv_num * Expr(self.ctx, self.den, Poly.one())

    # -- calculus ------------------------------------------------------------

    def diff(self, v: Var) -> "Expr":
        return self._diff_sym(self.ctx.sym_of(v))

    def _diff_sym(self, sym: int) -> "Expr":
        ctx = self.ctx
        with ctx._lock:
            got = ctx._diff_cache.get((self, sym))
        if got is not None:
            return got
        dnum = _poly_total_diff(ctx, self.num, sym)
        dden = _poly_total_diff(ctx, self.den, sym)
        den_e = Expr(ctx, self.den, Poly.one(), _normalized=True)
        if dden.is_zero_expr():
            result = dnum / den_e
        else:
            num_e = Expr(ctx, self.num, Poly.one())
            result = (dnum * den_e - num_e * dden) / (den_e * den_e)
        with ctx._lock:
            ctx._diff_cache[(self, sym)] = result
        return result

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, bindings: Mapping[Var, "Expr"]) -> "Expr":
        ctx = self.ctx
        values: dict[int, Expr] = {}
        for v, rep in bindings.items():
            if not isinstance(v, Var):
                v = ctx.var_named(str(v))
            values[ctx.sym_of(v)] = rep if isinstance(rep, Expr) else ctx.number(rep)
        atom_values: dict[int, Expr] = {}

        def sym_value(sym: int) -> Expr:
            if ctx.is_atom_sym(sym):
                got = atom_values.get(sym)
                if got is None:
                    atom = ctx.atom_at(sym)
                    got = ctx.root(atom.radicand.substitute(bindings), atom.q)
                    atom_values[sym] = got
                return got
            return values.get(sym, Expr(ctx, Poly.variable(sym), Poly.one()))

        num_v = _poly_apply(ctx, self.num, sym_value)
        den_v = _poly_apply(ctx, self.den, sym_value)
        return num_v / den_v

    def eval_at(self, point: "NumericPoint | Mapping[str, object]") -> float:
        ctx = self.ctx
        coords = _point_coord_values(ctx, point)
        den_val = self.den.eval(coords)
        if den_val == 0:
            raise DomainError("zero denominator at evaluation point")
        num_val, _ = _eval_poly_with_atoms(ctx, self.num, coords)
        if isinstance(num_val, Fraction) and isinstance(den_val, Fraction):
            return float(num_val / den_val)
        return float(num_val) / float(den_val)

    def is_zero(
        self,
        *,
        constraints: Iterable = (),
        box: tuple[float, float] = (1.0, 2.0),
        points: int = 8,
        seed: int = 0,
        tol: float = 1e-9,
        retry_cap: int = 100,
    ) -> ZeroStatus:
        """Decide zero-ness: canonical zero is authoritative, numeric
        sampling is advisory only and always reported with a warning."""
        if self.num.is_zero():
            return ZeroStatus.ZERO
        import random

        rng = random.Random(seed)
        checked = 0
        attempts = 0
        all_small = True
        while checked < points:
            attempts += 1
            if attempts > retry_cap * points:
                warnings.warn(
                    "is_zero: sampling retry cap exhausted; reporting NonZero",
                    stacklevel=2,
                )
                return ZeroStatus.NON_ZERO
            p = NumericPoint(
                x=tuple(rng.uniform(*box) for _ in range(self.ctx.dim)),
                y=tuple(rng.uniform(*box) for _ in range(self.ctx.dim)),
            )
            if not _point_ok(p, constraints):
                continue
            checked += 1
            try:
                coords = _point_coord_values(self.ctx, p)
                den_val = self.den.eval(coords)
                if den_val == 0:
                    raise DomainError("zero denominator")
                num_val, max_term = _eval_poly_with_atoms(self.ctx, self.num, coords)
                value = float(num_val) / float(den_val)
                scale = max(1.0, max_term / abs(float(den_val)))
            except DomainError:
                checked -= 1
                continue
            if abs(value) > tol * scale:
                all_small = False
                break
        if all_small:
            warnings.warn(
                "is_zero: expression is numerically zero at all sampled points "
                "but not canonically zero",
                stacklevel=2,
            )
            return ZeroStatus.NUMERICALLY_ZERO
        return ZeroStatus.NON_ZERO

    # -- reporting -------------------------------------------------------------

    def node_count(self) -> int:
        """Size of the canonical form (used to compare display routes)."""
        total = _poly_nodes(self.num)
        if not (self.den.is_const() and self.den.const_value() == 1):
            total += 1 + _poly_nodes(self.den)
        return total

    def atoms_present(self) -> list[int]:
        return sorted(
            s for s in (self.num.symbols() | self.den.symbols()) if self.ctx.is_atom_sym(s)
        )


# -- public operation-style API ------------------------------------------------


def differentiate(e: Expr, v: Var) -> Expr:
    return e.diff(v)


def canonicalize(e: Expr) -> Expr:
    """Expressions are canonical by construction; exposed for contract
    parity and as the hook used when re-checking invariants."""
    return e


def substitute(e: Expr, bindings: Mapping[Var, Expr]) -> Expr:
    return e.substitute(bindings)


def eval_at(e: Expr, point) -> float:
    return e.eval_at(point)


def is_zero(e: Expr, **kwargs) -> ZeroStatus:
    return e.is_zero(**kwargs)


# -- internals -------------------------------------------------------------------


def _is_one(p: Poly) -> bool:
    return len(p.terms) == 1 and p.terms.get(()) == 1


def _normalize(ctx: Context, num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator in expression")
    if any(ctx.is_atom_sym(s) for s in den.symbols()):
        raise ExprError("internal: denominator carries radical atoms")
    num, extra = _reduce_atoms(ctx, num)
    if not (extra.is_const() and extra.const_value() == 1):
        den = den * extra
    if num.is_zero():
        return Poly.zero(), Poly.one()
    g = poly_gcd(num, den)
    if not (g.is_const() and g.const_value() == 1):
        num = div_exact(num, g)
        den = div_exact(den, g)
        assert num is not None and den is not None
    c, den_prim = make_primitive(den)
    if c != 1:
        num = num.scale(1 / c)
    return num, den_prim


def _reduce_atoms(ctx: Context, p: Poly) -> tuple[Poly, Poly]:
    """Rewrite atom powers >= q via atom**q -> radicand; returns the reduced
    polynomial together with an atom-free extra denominator."""
    den = Poly.one()
    while True:
        target = -1
        for s in p.symbols():
            if ctx.is_atom_sym(s) and p.degree_in(s) >= ctx.atom_at(s).q and s > target:
                target = s
        if target < 0:
            return p, den
        atom = ctx.atom_at(target)
        q = atom.q
        rad_num, rad_den = atom.radicand.num, atom.radicand.den
        parts = p.split_by_symbol(target)
        m = max(e // q for e in parts)
        acc = Poly.zero()
        for e, coeff in parts.items():
            t, rem = divmod(e, q)
            piece = coeff * rad_num**t * rad_den ** (m - t)
            if rem:
                piece = piece.mul_monomial((0,) * target + (rem,))
            acc = acc + piece
        p = acc
        if m:
            den = den * rad_den**m


def _poly_total_diff(ctx: Context, p: Poly, sym: int) -> Expr:
    """d/d(sym) of a polynomial, with chain rule through radical atoms."""
    result = Expr(ctx, p.diff(sym), Poly.one())
    for s in p.symbols():
        if ctx.is_atom_sym(s):
            datom = ctx._atom_derivative(s, sym)
            if not datom.is_zero_expr():
                result = result + Expr(ctx, p.diff(s), Poly.one()) * datom
    return result


def _invert_atom_poly(ctx: Context, p: Poly) -> Expr:
    """Inverse of a polynomial containing radical atoms, as an expression
    with atom-free denominator (extended Euclid modulo t**q - radicand)."""
    atom_syms = [s for s in p.symbols() if ctx.is_atom_sym(s)]
    if not atom_syms:
        return Expr(ctx, Poly.one(), p)
    s = max(atom_syms)
    atom = ctx.atom_at(s)
    parts = p.split_by_symbol(s)
    deg = max(parts)
    u = [Expr(ctx, parts.get(i, Poly.zero()), Poly.one()) for i in range(deg + 1)]
    inv_coeffs = _ext_inverse(ctx, u, atom.q, atom.radicand)
    result = ctx.zero
    for i, c in enumerate(inv_coeffs):
        if not c.is_zero_expr():
            result = result + c * Expr(ctx, Poly.monomial((0,) * s + (i,)), Poly.one())
    return result


def _ext_inverse(ctx: Context, u: list[Expr], q: int, radicand: Expr) -> list[Expr]:
    """Coefficients of u(t)^-1 modulo t**q - radicand over the expression
    field (whose elements involve only lower atoms)."""

    def trim(c: list[Expr]) -> list[Expr]:
        while c and c[-1].is_zero_expr():
            c.pop()
        return c

    def polymul(a: list[Expr], b: list[Expr]) -> list[Expr]:
        out = [ctx.zero] * (len(a) + len(b) - 1) if a and b else []
        for i, ca in enumerate(a):
            if ca.is_zero_expr():
                continue
            for j, cb in enumerate(b):
                if not cb.is_zero_expr():
                    out[i + j] = out[i + j] + ca * cb
        return trim(out)

    def polysub(a: list[Expr], b: list[Expr]) -> list[Expr]:
        out = list(a) + [ctx.zero] * (len(b) - len(a))
        for i, cb in enumerate(b):
            out[i] = out[i] - cb
        return trim(out)

    def polydivmod(a: list[Expr], b: list[Expr]) -> tuple[list[Expr], list[Expr]]:
        quo = [ctx.zero] * max(0, len(a) - len(b) + 1)
        rem = trim(list(a))
        while len(rem) >= len(b):
            k = len(rem) - len(b)
            c = rem[-1] / b[-1]
            quo[k] = quo[k] + c
            for i, cb in enumerate(b):
                rem[k + i] = rem[k + i] - c * cb
            rem.pop()
            rem = trim(rem)
        return trim(quo), rem

    m = [-radicand] + [ctx.zero] * (q - 1) + [ctx.one]
    r0, r1 = m, trim(list(u))
    y0, y1 = [ctx.zero], [ctx.one]
    while len(r1) > 1:
        quo, rem = polydivmod(r0, r1)
        r0, r1 = r1, rem
        y0, y1 = y1, polysub(y0, polymul(quo, y1))
    if not r1:
        raise ExprError("radical expression is a zero divisor; cannot invert")
    c = r1[0]
    return [yi / c for yi in y1]


def _poly_apply(ctx: Context, p: Poly, sym_value) -> Expr:
    total = ctx.zero
    for exps, coeff in p.terms.items():
        term = ctx.number(coeff)
        for i, e in enumerate(exps):
            if e:
                term = term * sym_value(i) ** e
        total = total + term
    return total


def _point_coord_values(ctx: Context, point) -> list:
    if isinstance(point, NumericPoint):
        if len(point.x) != ctx.dim or len(point.y) != ctx.dim:
            raise ValueError("point dimension mismatch")
        raw = list(point.x) + list(point.y)
    elif isinstance(point, Mapping):
        raw = []
        for v in ctx.vars():
            name = (
                ctx.coord_names[v.index - 1] if v.kind == "x" else ctx.fiber_names[v.index - 1]
            )
            if name not in point:
                raise ValueError(f"point is missing a value for {name}")
            raw.append(point[name])
    else:
        raise TypeError("expected NumericPoint or mapping of names to values")
    # floats convert exactly (binary expansion), keeping evaluation exact
    # up to the radical atoms
    return [Fraction(v) if isinstance(v, (int, float, Fraction)) else v for v in raw]


def _atom_value(ctx: Context, sym: int, coords: list) -> float:
    atom = ctx.atom_at(sym)
    rad_num, _ = _eval_poly_with_atoms(ctx, atom.radicand.num, coords)
    rad_den = atom.radicand.den.eval(coords)
    if rad_den == 0:
        raise DomainError("zero denominator inside radicand")
    value = float(rad_num) / float(rad_den)
    if value < 0:
        if atom.q % 2 == 0:
            raise DomainError("negative radicand under an even root")
        return -((-value) ** (1.0 / atom.q))
    return value ** (1.0 / atom.q)


def _eval_poly_with_atoms(ctx: Context, p: Poly, coords: list):
    """Evaluate keeping rational arithmetic exact until radicals force
    floats; returns (value, max |term| as float)."""
    atom_cache: dict[int, float] = {}
    exact = Fraction(0)
    approx = 0.0
    has_float = False
    max_term = 0.0
    for exps, coeff in p.terms.items():
        frac_part = Fraction(coeff)
        float_part = 1.0
        term_has_float = False
        for i, e in enumerate(exps):
            if not e:
                continue
            if ctx.is_atom_sym(i):
                val = atom_cache.get(i)
                if val is None:
                    val = _atom_value(ctx, i, coords)
                    atom_cache[i] = val
                float_part *= val**e
                term_has_float = True
            else:
                v = coords[i]
                if isinstance(v, Fraction):
                    frac_part *= v**e
                else:
                    float_part *= float(v) ** e
                    term_has_float = True
        if term_has_float:
            term_val = float(frac_part) * float_part
            approx += term_val
            has_float = True
            max_term = max(max_term, abs(term_val))
        else:
            exact += frac_part
            max_term = max(max_term, abs(float(frac_part)))
    if has_float:
        return float(exact) + approx, max_term
    return exact, max_term


def _point_ok(p: NumericPoint, constraints: Iterable) -> bool:
    for c in constraints:
        if not c.holds_at(p):
            return False
    return True


def _poly_nodes(p: Poly) -> int:
    if p.is_zero():
        return 1
    total = len(p.terms) - 1
    for exps, coeff in p.terms.items():
        factors = sum(1 + (e > 1) for e in exps if e)
        if factors == 0 or abs(coeff) != 1:
            factors += 1
        total += factors
    return total
