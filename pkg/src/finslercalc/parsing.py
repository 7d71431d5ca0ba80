"""Expression text format: parser and printers.

Grammar (no implicit multiplication; decimals become exact rationals)::

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' exponent)?
    base     := number | ident | '(' expr ')' | 'sqrt' '(' expr ')' | '-' factor
    exponent := signed integer | '(' integer '/' integer ')'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import Context, Expr, ExprError
from .poly import Poly, grlex_key


class ParseError(ExprError):
    def __init__(self, message: str, position: int, expected: str = ""):
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.position = position
        self.expected = expected


@dataclass
class _Token:
    kind: str  # number | ident | op | end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(_Token("number", text[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
        elif c in "+-*/^()":
            tokens.append(_Token("op", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], ctx: Context):
        self.tokens = tokens
        self.pos = 0
        self.ctx = ctx

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            return self.next()
        raise ParseError(f"found {tok.text or 'end of input'!r}", tok.pos, repr(text))

    def parse_expr(self) -> Expr:
        value = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.next()
                rhs = self.parse_term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def parse_term(self) -> Expr:
        value = self.parse_factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.next()
                rhs = self.parse_factor()
                if tok.text == "*":
                    value = value * rhs
                else:
                    if rhs.is_zero_expr():
                        raise ParseError("division by zero", tok.pos)
                    value = value / rhs
            else:
                return value

    def parse_factor(self) -> Expr:
        base = self.parse_base()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.next()
            exponent = self.parse_exponent()
            if exponent.denominator != 1 and base.is_zero_expr():
                return self.ctx.zero
            return base**exponent
        return base

    def parse_exponent(self) -> Fraction:
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.next()
            sign = -1 if tok.text == "-" else 1
            num = self.next()
            if num.kind != "number" or "." in num.text:
                raise ParseError("bad exponent", num.pos, "integer")
            return Fraction(sign * int(num.text))
        if tok.kind == "number":
            self.next()
            if "." in tok.text:
                raise ParseError("bad exponent", tok.pos, "integer")
            return Fraction(int(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.next()
            sign = 1
            t = self.peek()
            if t.kind == "op" and t.text == "-":
                self.next()
                sign = -1
            p = self.next()
            if p.kind != "number" or "." in p.text:
                raise ParseError("bad exponent", p.pos, "integer")
            self.expect("/")
            q = self.next()
            if q.kind != "number" or "." in q.text:
                raise ParseError("bad exponent", q.pos, "integer")
            self.expect(")")
            return Fraction(sign * int(p.text), int(q.text))
        raise ParseError(f"found {tok.text or 'end of input'!r}", tok.pos, "exponent")

    def parse_base(self) -> Expr:
        tok = self.next()
        if tok.kind == "number":
            if "." in tok.text:
                return self.ctx.number(Fraction(tok.text))
            return self.ctx.number(int(tok.text))
        if tok.kind == "ident":
            if tok.text == "sqrt":
                self.expect("(")
                inner = self.parse_expr()
                self.expect(")")
                return self.ctx.sqrt(inner)
            return self.ctx.var(self.ctx.var_named(tok.text))
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "op" and tok.text == "-":
            return -self.parse_factor()
        raise ParseError(
            f"found {tok.text or 'end of input'!r}", tok.pos, "number, name, '(' or 'sqrt'"
        )


def parse(text: str, ctx: Context) -> Expr:
    parser = _Parser(_tokenize(text), ctx)
    value = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"trailing input {tail.text!r}", tail.pos)
    return value


# -- printing ---------------------------------------------------------------


def _sym_text(ctx: Context, sym: int) -> str:
    if not ctx.is_atom_sym(sym):
        return ctx.sym_name(sym)
    atom = ctx.atom_at(sym)
    inner = to_text(atom.radicand)
    if atom.q == 2:
        return f"sqrt({inner})"
    return f"({inner})^(1/{atom.q})"


def _monomial_text(ctx: Context, exps: tuple[int, ...], coeff: Fraction) -> str:
    factors = []
    for i, e in enumerate(exps):
        if not e:
            continue
        base = _sym_text(ctx, i)
        if e == 1:
            factors.append(base)
        elif ctx.is_atom_sym(i) and ctx.atom_at(i).q != 2:
            # keep p/q exponents unreduced on parse-back
            factors.append(f"({base})^{e}")
        else:
            factors.append(f"{base}^{e}")
    mag = abs(coeff)
    if not factors:
        return str(mag)
    if mag != 1:
        factors.insert(0, str(mag))
    return "*".join(factors)


def _poly_text(ctx: Context, p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for exps, coeff in sorted(p.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        text = _monomial_text(ctx, exps, coeff)
        if not parts:
            parts.append(("-" if coeff < 0 else "") + text)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + text)
    return " ".join(parts)


def _den_needs_parens(p: Poly) -> bool:
    if len(p.terms) != 1:
        return True
    exps, coeff = next(iter(p.terms.items()))
    factor_count = sum(1 for e in exps if e) + (coeff != 1)
    return factor_count > 1 or any(e > 1 for e in exps)


def to_text(e: Expr) -> str:
    """Canonical text form; parses back to the same expression."""
    ctx = e.ctx
    num, den = e.num, e.den
    scale = 1
    for c in num.terms.values():
        scale = scale * c.denominator // _gcd(scale, c.denominator)
    if scale != 1:
        num = num.scale(scale)
        den = den.scale(scale)
    num_text = _poly_text(ctx, num)
    if den.is_const() and den.const_value() == 1:
        return num_text
    if len(num.terms) > 1:
        num_text = f"({num_text})"
    den_text = _poly_text(ctx, den)
    if _den_needs_parens(den):
        den_text = f"({den_text})"
    return f"{num_text}/{den_text}"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- LaTeX -------------------------------------------------------------------


def _sym_latex(ctx: Context, sym: int) -> str:
    if not ctx.is_atom_sym(sym):
        return ctx.sym_name(sym)
    atom = ctx.atom_at(sym)
    inner = to_latex(atom.radicand)
    if atom.q == 2:
        return rf"\sqrt{{{inner}}}"
    return rf"\left({inner}\right)^{{1/{atom.q}}}"


def _monomial_latex(ctx: Context, exps: tuple[int, ...], mag: Fraction) -> str:
    factors = []
    for i, e in enumerate(exps):
        if not e:
            continue
        if e != 1 and ctx.is_atom_sym(i):
            atom = ctx.atom_at(i)
            inner = to_latex(atom.radicand)
            factors.append(rf"\left({inner}\right)^{{{e}/{atom.q}}}")
            continue
        base = _sym_latex(ctx, i)
        factors.append(base if e == 1 else f"{base}^{{{e}}}")
    body = " ".join(factors)
    if not factors:
        return str(mag)
    if mag != 1:
        return f"{mag} {body}"
    return body


def _poly_latex(ctx: Context, p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for exps, coeff in sorted(p.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        text = _monomial_latex(ctx, exps, abs(coeff))
        if not parts:
            parts.append(("-" if coeff < 0 else "") + text)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + text)
    return " ".join(parts)


def to_latex(e: Expr) -> str:
    ctx = e.ctx
    num, den = e.num, e.den
    scale = 1
    for c in num.terms.values():
        scale = scale * c.denominator // _gcd(scale, c.denominator)
    if scale != 1:
        num = num.scale(scale)
        den = den.scale(scale)
    if den.is_const() and den.const_value() == 1:
        return _poly_latex(ctx, num)
    # single-term numerators carry their sign outside the fraction
    sign = ""
    if len(num.terms) == 1:
        ((exps, coeff),) = num.terms.items()
        if coeff < 0:
            sign = "-"
            num = num.scale(-1)
    return rf"{sign}\frac{{{_poly_latex(ctx, num)}}}{{{_poly_latex(ctx, den)}}}"
