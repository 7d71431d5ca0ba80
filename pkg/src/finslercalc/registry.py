"""Requestable geometric objects, shared by the CLI, the verifier, and
the tests.

Plain ids name cached tensors; ``R:<kind>``, ``P:<kind>`` and
``S:{cartan,hashiguchi}`` name curvatures; ``hcov:<id>:<kind>`` and
``vcov:<id>:<kind>`` apply a covariant derivative to any tensor id; and
``classify`` reports the Riemannian/Berwaldian flags.
"""

from __future__ import annotations

from .geometry import Classification, ConnectionKind, Geometry
from .tensor import Tensor

_KINDS = {k.value: k for k in ConnectionKind}

_BASE = {
    "g": ("dd", lambda geom: geom.metric()),
    "ginv": ("uu", lambda geom: geom.inverse_metric()),
    "l": ("d", lambda geom: geom.supporting_and_angular()[0]),
    "lup": ("u", lambda geom: geom.supporting_and_angular()[1]),
    "h": ("dd", lambda geom: geom.supporting_and_angular()[2]),
    "C": ("ddd", lambda geom: geom.cartan_tensor()[0]),
    "Cmixed": ("udd", lambda geom: geom.cartan_tensor()[1]),
    "gamma": ("udd", lambda geom: geom.christoffel_gamma()),
    "Gspray": ("u", lambda geom: geom.spray()),
    "N": ("ud", lambda geom: geom.nonlinear_connection()),
    "Gberwald": ("udd", lambda geom: geom.berwald_coefficients()),
    "Gamma": ("udd", lambda geom: geom.cartan_coefficients()),
    "Rtorsion": ("udd", lambda geom: geom.torsions()[0]),
    "Ptorsion": ("udd", lambda geom: geom.torsions()[1]),
}

_CURVATURE_WHICH = {"R": "h", "P": "hv", "S": "v"}


class UnknownObjectError(Exception):
    def __init__(self, object_id: str):
        super().__init__(f"unknown object id: {object_id!r}")
        self.object_id = object_id


def base_object_ids() -> list[str]:
    """Every non-compound id, in display order."""
    out = list(_BASE)
    for letter in ("R", "P"):
        out.extend(f"{letter}:{k}" for k in _KINDS)
    out.extend(["S:cartan", "S:hashiguchi"])
    out.append("classify")
    return out


def verifiable_object_ids() -> list[str]:
    return [i for i in base_object_ids() if i != "classify"]


def is_known(object_id: str) -> bool:
    try:
        _parse(object_id)
        return True
    except UnknownObjectError:
        return False


def _parse(object_id: str):
    if object_id in _BASE or object_id == "classify":
        return ("base", object_id)
    parts = object_id.split(":")
    if len(parts) == 2 and parts[0] in _CURVATURE_WHICH and parts[1] in _KINDS:
        if parts[0] == "S" and parts[1] in ("berwald", "chern"):
            raise UnknownObjectError(object_id)
        return ("curvature", parts[0], _KINDS[parts[1]])
    if len(parts) == 3 and parts[0] in ("hcov", "vcov") and parts[2] in _KINDS:
        if parts[1] in _BASE:
            return ("cov", parts[0], parts[1], _KINDS[parts[2]])
    raise UnknownObjectError(object_id)


def resolve(geom: Geometry, object_id: str, lower_simplify: bool = False):
    """Compute the object; tensors come back as Tensor, ``classify`` as a
    Classification."""
    parsed = _parse(object_id)
    if parsed[0] == "base":
        if object_id == "classify":
            return geom.classify()
        return _BASE[object_id][1](geom)
    if parsed[0] == "curvature":
        _, letter, kind = parsed
        if lower_simplify and kind is ConnectionKind.CARTAN and letter in ("P", "S"):
            from .lowering import simplify_via_lowering

            target = "hv_curvature_cartan" if letter == "P" else "v_curvature_cartan"
            return simplify_via_lowering(geom, target)
        return geom.curvature(kind, _CURVATURE_WHICH[letter])
    _, op, base_id, kind = parsed
    tensor = _BASE[base_id][1](geom)
    triple = geom.connection(kind)
    if op == "hcov":
        return geom.h_cov_derivative(tensor, triple)
    return geom.v_cov_derivative(tensor, triple)


def object_signature(object_id: str) -> str:
    """Variance string ('u'/'d' per slot) of a tensor object id."""
    parsed = _parse(object_id)
    if parsed[0] == "base":
        if object_id == "classify":
            raise ValueError("classify is not a tensor")
        return _BASE[object_id][0]
    if parsed[0] == "curvature":
        return "uddd"
    return _BASE[parsed[2]][0] + "d"
