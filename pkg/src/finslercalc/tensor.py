"""Dense tensor components with variance signatures and symmetries.

Components are canonical expressions indexed by 1-based multi-indices
over [1..dim]^rank.  Declared symmetries are used both to cut generation
work (one representative per orbit) and as a checked postcondition on a
sample of orbits.  All tensors are immutable after construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .expr import Context, Expr, ZeroStatus
from .poly import iter_indices


class TensorError(Exception):
    pass


class SymmetryViolation(TensorError):
    pass


class VarianceMismatch(TensorError):
    pass


class Variance(enum.Enum):
    UP = "up"
    DOWN = "down"


UP = Variance.UP
DOWN = Variance.DOWN


def signature(spec: str) -> tuple[Variance, ...]:
    """Signature from a compact string, e.g. 'udd' for (Up, Down, Down)."""
    table = {"u": UP, "d": DOWN}
    return tuple(table[c] for c in spec)


@dataclass(frozen=True)
class Symmetry:
    """Pairwise or set symmetry between index positions (1-based)."""

    kind: str  # "symmetric" | "antisymmetric"
    positions: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("symmetric", "antisymmetric"):
            raise ValueError("symmetry kind must be symmetric or antisymmetric")
        if len(self.positions) < 2 or len(set(self.positions)) != len(self.positions):
            raise ValueError("symmetry needs at least two distinct positions")


def symmetric(*positions: int) -> Symmetry:
    return Symmetry("symmetric", tuple(positions))


def antisymmetric(*positions: int) -> Symmetry:
    return Symmetry("antisymmetric", tuple(positions))


def _validate_symmetries(sig: Sequence[Variance], symmetries: Iterable[Symmetry]):
    rank = len(sig)
    for sym in symmetries:
        for p in sym.positions:
            if not 1 <= p <= rank:
                raise ValueError(f"symmetry position {p} outside rank {rank}")
        variances = {sig[p - 1] for p in sym.positions}
        if len(variances) > 1:
            raise VarianceMismatch("symmetry positions must share a variance")


def _transpositions(symmetries: Iterable[Symmetry]) -> list[tuple[int, int, int]]:
    """Generators (pos_a, pos_b, sign) as 0-based position pairs."""
    gens = []
    for sym in symmetries:
        sign = -1 if sym.kind == "antisymmetric" else 1
        ps = sorted(sym.positions)
        for a, b in zip(ps, ps[1:]):
            gens.append((a - 1, b - 1, sign))
    return gens


def _orbit(idx: tuple[int, ...], gens) -> dict[tuple[int, ...], int]:
    """Map from reachable index to sign relative to ``idx``; sign 0 marks a
    contradiction (index equal to itself with sign -1)."""
    seen = {idx: 1}
    frontier = [idx]
    contradiction = False
    while frontier:
        cur = frontier.pop()
        s = seen[cur]
        for a, b, sign in gens:
            nxt = list(cur)
            nxt[a], nxt[b] = nxt[b], nxt[a]
            nxt = tuple(nxt)
            ns = s * sign
            if nxt in seen:
                if seen[nxt] != ns:
                    contradiction = True
            else:
                seen[nxt] = ns
                frontier.append(nxt)
    if contradiction:
        return {k: 0 for k in seen}
    return seen


class Tensor:
    """Immutable dense tensor over [1..dim]^rank with Expr components."""

    def __init__(
        self,
        name: str,
        ctx: Context,
        dim: int,
        sig: Sequence[Variance],
        components: dict[tuple[int, ...], Expr],
        symmetries: Sequence[Symmetry] = (),
    ):
        _validate_symmetries(sig, symmetries)
        self.name = name
        self.ctx = ctx
        self.dim = dim
        self.sig = tuple(sig)
        self.symmetries = tuple(symmetries)
        self._comp = components

    @property
    def rank(self) -> int:
        return len(self.sig)

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        return self._comp[tuple(idx)]

    def components(self):
        return self._comp.items()

    def map(self, fn: Callable[[tuple[int, ...], Expr], Expr], name: str | None = None) -> "Tensor":
        comp = {idx: fn(idx, e) for idx, e in self._comp.items()}
        return Tensor(name or self.name, self.ctx, self.dim, self.sig, comp)

    def is_zero_tensor(self) -> bool:
        return all(e.is_zero_expr() for e in self._comp.values())

    def equals(self, other: "Tensor") -> bool:
        if self.sig != other.sig or self.dim != other.dim:
            return False
        return all((self._comp[i] - other._comp[i]).is_zero_expr() for i in self._comp)

    def __repr__(self) -> str:
        kinds = "".join("u" if v is UP else "d" for v in self.sig)
        return f"Tensor({self.name!r}, dim={self.dim}, sig={kinds!r})"


def define(
    name: str,
    ctx: Context,
    dim: int,
    sig: Sequence[Variance],
    generator: Callable[[tuple[int, ...]], Expr],
    symmetries: Sequence[Symmetry] = (),
    check_orbits: int = 8,
) -> Tensor:
    """Populate a tensor from a component generator.

    Symmetry orbits are generated once from a representative and
    propagated; the first ``check_orbits`` nontrivial orbits are verified
    against the generator and a mismatch raises SymmetryViolation.
    """
    _validate_symmetries(sig, symmetries)
    gens = _transpositions(symmetries)
    comp: dict[tuple[int, ...], Expr] = {}
    checked = 0
    for idx in iter_indices(dim, len(sig)):
        if idx in comp:
            continue
        orbit = _orbit(idx, gens) if gens else {idx: 1}
        if all(s == 0 for s in orbit.values()):
            value = ctx.zero
            if checked < check_orbits:
                checked += 1
                if not generator(idx).is_zero_expr():
                    raise SymmetryViolation(
                        f"{name}: generator is nonzero at {idx} but antisymmetry forces zero"
                    )
            for member in orbit:
                comp[member] = value
            continue
        value = generator(idx)
        for member, sign in orbit.items():
            comp[member] = value if sign == 1 else -value
        if len(orbit) > 1 and checked < check_orbits:
            checked += 1
            member, sign = next((m, s) for m, s in orbit.items() if m != idx)
            expected = value if sign == 1 else -value
            if not (generator(member) - expected).is_zero_expr():
                raise SymmetryViolation(
                    f"{name}: generator contradicts declared symmetry on orbit of {idx}"
                )
    return Tensor(name, ctx, dim, sig, comp, symmetries)


def from_components(
    name: str,
    ctx: Context,
    dim: int,
    sig: Sequence[Variance],
    table: dict[tuple[int, ...], Expr],
    symmetries: Sequence[Symmetry] = (),
) -> Tensor:
    """Tensor from a full component table (zeros may be omitted)."""
    comp = {}
    for idx in iter_indices(dim, len(sig)):
        comp[idx] = table.get(idx, ctx.zero)
    return Tensor(name, ctx, dim, sig, comp, symmetries)


def kronecker(ctx: Context, dim: int, name: str = "delta") -> Tensor:
    comp = {}
    for idx in iter_indices(dim, 2):
        comp[idx] = ctx.one if idx[0] == idx[1] else ctx.zero
    return Tensor(name, ctx, dim, (UP, DOWN), comp)


def zero_tensor(name: str, ctx: Context, dim: int, sig: Sequence[Variance]) -> Tensor:
    comp = {idx: ctx.zero for idx in iter_indices(dim, len(sig))}
    return Tensor(name, ctx, dim, sig, comp)


def tensor_add(a: Tensor, b: Tensor, name: str | None = None, symmetries=()) -> Tensor:
    if a.sig != b.sig or a.dim != b.dim:
        raise TensorError("tensor addition needs matching signatures")
    comp = {idx: a[idx] + b[idx] for idx, _ in a.components()}
    return Tensor(name or a.name, a.ctx, a.dim, a.sig, comp, symmetries)


def move_index(t: Tensor, pos: int, g: Tensor, g_inv: Tensor) -> Tensor:
    """Lower (Up -> Down, with g) or raise (Down -> Up, with g_inv) the
    index at 1-based position ``pos``; symmetries touching it are dropped."""
    if not 1 <= pos <= t.rank:
        raise ValueError("position outside rank")
    metric = g if t.sig[pos - 1] is UP else g_inv
    new_sig = list(t.sig)
    new_sig[pos - 1] = DOWN if t.sig[pos - 1] is UP else UP
    p = pos - 1
    comp = {}
    for idx in iter_indices(t.dim, t.rank):
        acc = t.ctx.zero
        for r in range(1, t.dim + 1):
            inner = idx[:p] + (r,) + idx[p + 1 :]
            term = t[inner]
            if term.is_zero_expr():
                continue
            acc = acc + metric[(idx[p], r)] * term
        comp[idx] = acc
    kept = tuple(s for s in t.symmetries if pos not in s.positions)
    return Tensor(t.name, t.ctx, t.dim, tuple(new_sig), comp, kept)


def contract_product(
    a: Tensor, b: Tensor, pairs: Sequence[tuple[int, int]], name: str | None = None
) -> Tensor:
    """Contract paired slots of a tensor product; the result keeps A's free
    slots then B's, in order.  Pairs are 1-based (posA, posB) and must have
    opposite variances."""
    for pa, pb in pairs:
        if not (1 <= pa <= a.rank and 1 <= pb <= b.rank):
            raise ValueError("contraction position outside rank")
        if a.sig[pa - 1] is b.sig[pb - 1]:
            raise VarianceMismatch(
                f"cannot contract slot {pa} of {a.name} with slot {pb} of {b.name}"
            )
    if len({p for p, _ in pairs}) != len(pairs) or len({p for _, p in pairs}) != len(pairs):
        raise ValueError("contraction positions must be distinct")
    a_dummy = [p - 1 for p, _ in pairs]
    b_dummy = [p - 1 for _, p in pairs]
    a_free = [i for i in range(a.rank) if i not in a_dummy]
    b_free = [i for i in range(b.rank) if i not in b_dummy]
    sig = tuple(a.sig[i] for i in a_free) + tuple(b.sig[i] for i in b_free)
    dim = a.dim
    ctx = a.ctx
    comp = {}
    for idx in iter_indices(dim, len(sig)):
        a_part = idx[: len(a_free)]
        b_part = idx[len(a_free) :]
        acc = ctx.zero
        for dummy in iter_indices(dim, len(pairs)):
            ia = [0] * a.rank
            for slot, v in zip(a_free, a_part):
                ia[slot] = v
            for slot, v in zip(a_dummy, dummy):
                ia[slot] = v
            ea = a[tuple(ia)]
            if ea.is_zero_expr():
                continue
            ib = [0] * b.rank
            for slot, v in zip(b_free, b_part):
                ib[slot] = v
            for slot, v in zip(b_dummy, dummy):
                ib[slot] = v
            eb = b[tuple(ib)]
            if eb.is_zero_expr():
                continue
            acc = acc + ea * eb
        comp[idx] = acc
    return Tensor(name or f"{a.name}.{b.name}", ctx, dim, sig, comp)


def alternate(t: Tensor, j: int, k: int, name: str | None = None) -> Tensor:
    """T minus T with slots j,k swapped; the result is antisymmetric there.

    The operator is order-sensitive in its position arguments, so
    alternate(t, k, j) == -alternate(t, j, k)."""
    if t.sig[j - 1] is not t.sig[k - 1]:
        raise VarianceMismatch("alternation needs slots of equal variance")
    sign = 1 if j < k else -1
    a, b = j - 1, k - 1
    comp = {}
    for idx in iter_indices(t.dim, t.rank):
        swapped = list(idx)
        swapped[a], swapped[b] = swapped[b], swapped[a]
        value = t[idx] - t[tuple(swapped)]
        comp[idx] = value if sign == 1 else -value
    return Tensor(
        name or t.name, t.ctx, t.dim, t.sig, comp, (antisymmetric(j, k),)
    )


@dataclass(frozen=True)
class ComponentEntry:
    index: tuple[int, ...]
    expr: Expr
    status: ZeroStatus


def nonzero_components(
    t: Tensor,
    full_table: bool = False,
    constraints: Iterable = (),
    seed: int = 0,
) -> list[ComponentEntry]:
    """Nonvanishing entries in lexicographic index order.

    By default one representative per symmetry orbit is reported (the
    lexicographically least index); ``full_table`` lists every index.
    Entries that are only numerically zero are kept and flagged.
    """
    gens = _transpositions(t.symmetries)
    out = []
    for idx in iter_indices(t.dim, t.rank):
        if not full_table and gens:
            orbit = _orbit(idx, gens)
            if min(orbit) != idx:
                continue
        e = t[idx]
        if e.is_zero_expr():
            continue
        status = e.is_zero(constraints=constraints, seed=seed)
        if status is ZeroStatus.ZERO:  # pragma: no cover - canonical zero caught above
            continue
        out.append(ComponentEntry(idx, e, status))
    return out
