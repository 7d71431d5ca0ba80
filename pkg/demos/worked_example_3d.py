"""Walk through the full pipeline on a 3-dimensional Finsler structure.

The structure is F = sqrt(x3*y1^3/y2 + y3^2) on the domain x3 != 0,
y2 != 0, y1^2 + y3^2 != 0.  Starting from F^2 we compute the metric and
its inverse, the supporting element and angular metric, the Cartan
tensor, spray, nonlinear connection, and the torsions and curvatures of
all four fundamental connections.
"""

from finslercalc import ConnectionKind, FinslerStructure, build, nonzero_components

fs = FinslerStructure(
    dim=3,
    coord_names=["x1", "x2", "x3"],
    fiber_names=["y1", "y2", "y3"],
    f_squared="x3*y1^3/y2 + y3^2",
    constraints=["x3 != 0", "y2 != 0", "y1^2+y3^2 != 0"],
)
geom = build(fs)


def show(title, tensor):
    print(f"\n{title}")
    entries = nonzero_components(tensor, constraints=fs.constraints)
    if not entries:
        print("  all components vanish")
    for entry in entries:
        idx = " ".join(fs.ctx.coord_names[i - 1] for i in entry.index)
        print(f"  [{idx}] = {entry.expr}")


show("metric tensor g_ij", geom.metric())
show("inverse metric g^ij", geom.inverse_metric())

l_down, l_up, h = geom.supporting_and_angular()
show("supporting element l_i", l_down)
show("angular metric h_ij", h)

c_down, c_mixed = geom.cartan_tensor()
show("Cartan tensor C_ijk", c_down)
show("(h)hv-torsion C^i_jk", c_mixed)

show("spray coefficients G^i", geom.spray())
show("nonlinear connection N^i_j", geom.nonlinear_connection())
show("Berwald connection coefficients G^i_jk", geom.berwald_coefficients())
show("Cartan connection coefficients Gamma^i_jk", geom.cartan_coefficients())

r_tor, p_tor = geom.torsions()
show("(v)h-torsion R^i_jk", r_tor)
show("(v)hv-torsion P^i_jk", p_tor)

# The space is neither Riemannian nor Berwaldian:
print("\nclassification:", geom.classify())

for kind in ConnectionKind:
    for which in ("h", "hv", "v"):
        show(f"{kind.value} {which}-curvature", geom.curvature(kind, which))
