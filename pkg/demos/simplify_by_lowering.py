"""Getting smaller display expressions by lowering before canonicalizing.

For F = (x1*y2^3 + y1^2*y3)^(1/3), some curvature components come out
much shorter when the fully lowered tensor is computed from a
lowering-safe formula and the display index is raised afterwards.  The
guarded spot: g_im * (dot-d_k Gamma^m_hj) is not (dot-d)_k of
(g_im Gamma^m_hj), so the metric must contract the differentiated tensor
as a whole rather than slide through the derivative.

With a canonicalizing engine both routes normalize to identical
components; the two routes stay valuable as an independent consistency
check, and the node counts confirm neither route is ever larger.
"""

from finslercalc import (
    ConnectionKind,
    FinslerStructure,
    build,
    lowered_form,
    node_counts,
    simplify_via_lowering,
)

fs = FinslerStructure.from_f(
    dim=3,
    coord_names=["x1", "x2", "x3"],
    fiber_names=["y1", "y2", "y3"],
    f_text="(x1*y2^3+y1^2*y3)^(1/3)",
    constraints=["y1 != 0", "y2 != 0", "y3 != 0"],
)
geom = build(fs)

print("F^2 =", fs.f_squared)

for object_id, which, component in (
    ("v_curvature_cartan", "v", (1, 1, 1, 2)),
    ("hv_curvature_cartan", "hv", (1, 1, 1, 1)),
):
    direct = geom.curvature(ConnectionKind.CARTAN, which)
    lowered = lowered_form(geom, object_id)
    via = simplify_via_lowering(geom, object_id)  # raises + asserts equality
    counts = node_counts(direct, via)
    print(f"\n{object_id}:")
    print(f"  lowered all-down form [{component}] = {lowered[component]}")
    print(f"  raised component      [{component}] = {via[component]}")
    print(f"  node counts (direct, via lowering) = {counts[component]}")
    assert via.equals(direct)

print("\nboth routes agree componentwise on the whole tensors")
