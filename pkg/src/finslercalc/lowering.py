"""Simpler component displays via compute-lowered-then-raise.

For a curvature with a complicated contravariant-index expression, the
fully lowered tensor can be computed from a lowering-safe variant of the
defining formula (the metric enters each term where lowering is valid),
canonicalized, and the display index raised afterwards.  The guarded
spot: a metric factor must never be pushed through a derivative applied
to connection coefficients, since g_im * d(Gamma^m) != d(g_im * Gamma^m);
such terms contract with the metric as a whole, after differentiation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .expr import Var
from .geometry import ConnectionKind, Geometry
from .tensor import Tensor, antisymmetric, define, move_index
from .oracle import sample_points


class UnsupportedObject(Exception):
    def __init__(self, object_id: str):
        super().__init__(
            f"no lowering plan registered for {object_id!r}; "
            f"supported: {sorted(PLANS)}"
        )
        self.object_id = object_id


class EquivalenceFailure(Exception):
    """Direct and via-lowering routes disagree both canonically and
    numerically: the lowering plan itself is wrong."""


@dataclass(frozen=True)
class PlanTerm:
    """One term of a lowered defining formula.

    ``metric_site`` records where the metric factor enters: a term whose
    expression contains a bare derivative of connection coefficients must
    use 'whole_term' (contract g with the differentiated tensor), all
    others may use 'lowered_factor' (use an already-lowered tensor inside
    the term)."""

    description: str
    contains_connection_derivative: bool
    metric_site: str  # "whole_term" | "lowered_factor"


@dataclass(frozen=True)
class LoweringPlan:
    object_id: str
    terms: tuple[PlanTerm, ...]

    def check_guard(self) -> None:
        for term in self.terms:
            if term.contains_connection_derivative and term.metric_site != "whole_term":
                raise ValueError(
                    f"{self.object_id}: term {term.description!r} pushes the "
                    "metric through a derivative of connection coefficients"
                )


PLANS: dict[str, LoweringPlan] = {
    "v_curvature_cartan": LoweringPlan(
        "v_curvature_cartan",
        (
            PlanTerm("C^m_hk * C_imj", False, "lowered_factor"),
            PlanTerm("C^m_hj * C_imk", False, "lowered_factor"),
        ),
    ),
    "hv_curvature_cartan": LoweringPlan(
        "hv_curvature_cartan",
        (
            PlanTerm("g_mi * (dot-d_k Gamma^m_hj)", True, "whole_term"),
            PlanTerm("C_ihk|j (all-down h-covariant derivative)", False, "lowered_factor"),
            PlanTerm("C_ihm * P^m_jk", False, "lowered_factor"),
        ),
    ),
}

_DIRECT = {
    "v_curvature_cartan": ("v", "S"),
    "hv_curvature_cartan": ("hv", "P"),
}


def lowered_form(geom: Geometry, object_id: str) -> Tensor:
    """The all-Down rank-4 tensor computed term by term with the metric
    contracted inside each term at a lowering-safe site."""
    plan = PLANS.get(object_id)
    if plan is None:
        raise UnsupportedObject(object_id)
    plan.check_guard()
    n = geom.dim
    ctx = geom.ctx
    sig = ("d", "d", "d", "d")
    from .tensor import DOWN

    if object_id == "v_curvature_cartan":
        c_down, c_mixed = geom.cartan_tensor()

        def gen(idx):
            i, h, j, k = idx
            val = ctx.zero
            for m in range(1, n + 1):
                a = c_mixed[(m, h, k)]
                b = c_down[(i, m, j)]
                if not (a.is_zero_expr() or b.is_zero_expr()):
                    val = val + a * b
                a = c_mixed[(m, h, j)]
                b = c_down[(i, m, k)]
                if not (a.is_zero_expr() or b.is_zero_expr()):
                    val = val - a * b
            return val

        return define("S", ctx, n, (DOWN,) * 4, gen, (antisymmetric(3, 4),))

    # hv_curvature_cartan:
    # P_ihjk = g_mi * (dot-d_k Gamma^m_hj) - C_ihk|j + C_ihm P^m_jk
    g = geom.metric()
    gamma = geom.cartan_coefficients()
    c_down = geom.cartan_tensor()[0]
    cartan = geom.connection(ConnectionKind.CARTAN)
    ft_low = geom.h_cov_derivative(c_down, cartan)
    p_tor = geom.torsions()[1]

    def gen(idx):
        i, h, j, k = idx
        val = ctx.zero
        for m in range(1, n + 1):
            gm = g[(m, i)]
            if gm.is_zero_expr():
                continue
            d = gamma[(m, h, j)].diff(Var("y", k))
            if not d.is_zero_expr():
                val = val + gm * d
        val = val - ft_low[(i, h, k, j)]
        for m in range(1, n + 1):
            a = c_down[(i, h, m)]
            b = p_tor[(m, j, k)]
            if not (a.is_zero_expr() or b.is_zero_expr()):
                val = val + a * b
        return val

    return define("P", ctx, n, (DOWN,) * 4, gen)


def simplify_via_lowering(geom: Geometry, object_id: str) -> Tensor:
    """Raise the first slot of the lowered form and assert equivalence
    with the directly computed tensor."""
    lowered = lowered_form(geom, object_id)
    raised = move_index(lowered, 1, geom.metric(), geom.inverse_metric())
    which, name = _DIRECT[object_id]
    direct = geom.curvature(ConnectionKind.CARTAN, which)
    mismatches = [
        idx
        for idx, e in raised.components()
        if not (e - direct[idx]).is_zero_expr()
    ]
    if mismatches:
        if _numeric_disagreement(geom, raised, direct, mismatches):
            raise EquivalenceFailure(
                f"{object_id}: direct and via-lowering routes differ at "
                f"{mismatches[:4]}"
            )
        warnings.warn(
            f"{object_id}: routes differ canonically but agree numerically",
            stacklevel=2,
        )
    return Tensor(name, geom.ctx, geom.dim, raised.sig, dict(raised.components()),
                  raised.symmetries)


def _numeric_disagreement(geom, raised, direct, mismatches, tol=1e-9) -> bool:
    points = sample_points(geom.structure, 4, seed=20240101)
    for idx in mismatches:
        for p in points:
            a = raised[idx].eval_at(p)
            b = direct[idx].eval_at(p)
            if abs(a - b) > tol * max(1.0, abs(b)):
                return True
    return False


def node_counts(direct: Tensor, via_lowering: Tensor) -> dict[tuple[int, ...], tuple[int, int]]:
    """Canonical-form size report per component: (direct, via-lowering)."""
    return {
        idx: (direct[idx].node_count(), via_lowering[idx].node_count())
        for idx, _ in direct.components()
    }
