"""JSON forms of symbols, scalars, factorization data and certificates.

Floats are written with 17 significant digits and complex numbers as
``[re, im]``, so identical objects serialize to identical bytes.
"""

import json
import math

import numpy as np
from numpy.polynomial import Polynomial

from .errors import BadApproxError, ParseError
from .pipeline import FactorizationData
from .symbols import AnalyticColumn, FactoredScalar, LaurentMatrix
from .thematic import ThematicMatrix


def _format_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def dumps(obj, indent=1, _level=0):
    """Deterministic JSON text for plain data (dict, list, str, int, float, bool, None)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        obj = list(obj)
        if not obj:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        items = [pad + dumps(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_pair(c):
    c = complex(c)
    return [c.real, c.imag]


def _complex(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(y, (int, float)) for y in x):
        return complex(x[0], x[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer, got {x!r}")
    return x


# --- symbols ---------------------------------------------------------------


def symbol_to_obj(sym):
    return {
        "m": sym.m,
        "n": sym.n,
        "terms": [
            {"k": k, "matrix": [[complex_pair(x) for x in row] for row in A]}
            for k, A in sym.terms.items()
        ],
    }


def symbol_from_obj(obj, where="symbol"):
    m = _int(_require(obj, "m", where), f"{where}.m")
    n = _int(_require(obj, "n", where), f"{where}.n")
    if m < 1 or n < 1:
        raise ParseError(f"{where}: sizes must be positive")
    terms = _require(obj, "terms", where)
    if not isinstance(terms, list):
        raise ParseError(f"{where}.terms: expected a list")
    out = {}
    for i, term in enumerate(terms):
        w = f"{where}.terms[{i}]"
        k = _int(_require(term, "k", w), f"{w}.k")
        mat = _require(term, "matrix", w)
        if not isinstance(mat, list) or len(mat) != m or any(
            not isinstance(row, list) or len(row) != n for row in mat
        ):
            raise ParseError(f"{w}.matrix: expected {m}x{n} entries")
        A = np.array([[_complex(x, f"{w}.matrix") for x in row] for row in mat], dtype=complex)
        if k in out:
            raise ParseError(f"{w}: duplicate frequency {k}")
        out[k] = A
    try:
        return LaurentMatrix(m, n, out)
    except BadApproxError as exc:
        raise ParseError(f"{where}: {exc}") from exc


# --- scalars and columns ---------------------------------------------------


def scalar_to_obj(s):
    if isinstance(s, Polynomial):
        return {"taylor": [complex_pair(c) for c in s.coef]}
    return {
        "c": complex_pair(s.c),
        "zpower": s.zpower,
        "zeros_inside": [complex_pair(a) for a in s.zeros_inside],
        "outer_zeros": [complex_pair(b) for b in s.outer_zeros],
        "scale": s.scale,
        "outer_poles": [complex_pair(p) for p in s.outer_poles],
    }


def scalar_from_obj(obj, where="scalar"):
    if isinstance(obj, dict) and "taylor" in obj:
        coeffs = obj["taylor"]
        if not isinstance(coeffs, list) or not coeffs:
            raise ParseError(f"{where}.taylor: expected a nonempty list")
        return Polynomial(np.array([_complex(c, f"{where}.taylor") for c in coeffs], dtype=complex))

    def roots(key):
        vals = obj.get(key, [])
        if not isinstance(vals, list):
            raise ParseError(f"{where}.{key}: expected a list")
        return tuple(_complex(x, f"{where}.{key}") for x in vals)

    c = _complex(_require(obj, "c", where), f"{where}.c")
    zpower = _int(_require(obj, "zpower", where), f"{where}.zpower")
    scale = _require(obj, "scale", where)
    if isinstance(scale, bool) or not isinstance(scale, (int, float)):
        raise ParseError(f"{where}.scale: expected a real number")
    try:
        return FactoredScalar(
            c=c,
            zpower=zpower,
            zeros_inside=roots("zeros_inside"),
            outer_zeros=roots("outer_zeros"),
            scale=float(scale),
            outer_poles=roots("outer_poles"),
        )
    except BadApproxError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def column_to_obj(col):
    return [scalar_to_obj(e) for e in col.entries]


def column_from_obj(obj, where="column"):
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{where}: expected a nonempty list")
    return AnalyticColumn(tuple(scalar_from_obj(e, f"{where}[{i}]") for i, e in enumerate(obj)))


def thematic_to_obj(V):
    """``theta`` is the stored analytic column; evaluation conjugates it."""
    return {
        "v": column_to_obj(V.v),
        "theta": None if V.theta is None else column_to_obj(V.theta),
    }


def thematic_from_obj(obj, where="thematic"):
    v = column_from_obj(_require(obj, "v", where), f"{where}.v")
    theta = obj.get("theta")
    theta = None if theta is None else column_from_obj(theta, f"{where}.theta")
    if theta is not None and theta.dimension != v.dimension:
        raise ParseError(f"{where}: v and theta lengths differ")
    if theta is None and v.dimension != 1:
        raise ParseError(f"{where}: theta required for size {v.dimension}")
    return ThematicMatrix(v, theta)


# --- pipeline records ------------------------------------------------------


def data_to_obj(data):
    return {
        "kind": "factorization",
        "t": data.t,
        "theta": scalar_to_obj(data.theta),
        "h": scalar_to_obj(data.h),
        "V": thematic_to_obj(data.V),
        "Wt": thematic_to_obj(data.Wt),
        "phi_sharp": None if data.phi_sharp is None else symbol_to_obj(data.phi_sharp),
        "residuals": dict(data.residuals),
        "warnings": list(data.warnings),
        "grid": data.grid,
        "truncation": data.truncation,
    }


def data_from_obj(obj, where="data"):
    t = _require(obj, "t", where)
    if isinstance(t, bool) or not isinstance(t, (int, float)):
        raise ParseError(f"{where}.t: expected a real number")
    ps = obj.get("phi_sharp")
    residuals = obj.get("residuals", {})
    if not isinstance(residuals, dict):
        raise ParseError(f"{where}.residuals: expected an object")
    return FactorizationData(
        t=float(t),
        theta=scalar_from_obj(_require(obj, "theta", where), f"{where}.theta"),
        h=scalar_from_obj(_require(obj, "h", where), f"{where}.h"),
        V=thematic_from_obj(_require(obj, "V", where), f"{where}.V"),
        Wt=thematic_from_obj(_require(obj, "Wt", where), f"{where}.Wt"),
        phi_sharp=None if ps is None else symbol_from_obj(ps, f"{where}.phi_sharp"),
        residuals=residuals,
        warnings=tuple(obj.get("warnings", ())),
        grid=_int(obj.get("grid", 4096), f"{where}.grid"),
        truncation=_int(obj.get("truncation", 0), f"{where}.truncation"),
    )


def certificate_to_obj(cert):
    return {
        "kind": "dual_extremal_certificate",
        "certified": cert.certified,
        "pairing": complex_pair(cert.pairing),
        "dist": cert.dist,
        "norm_residual": cert.norm_residual,
        "pairing_residual": cert.pairing_residual,
        "max_second_singular": cert.max_second_singular,
        "tol": cert.tol,
        "grid": cert.grid,
        "truncation": cert.truncation,
        "psi": symbol_to_obj(cert.psi),
    }


# --- files -----------------------------------------------------------------


def load_json(path):
    """Parse a JSON file; syntax errors carry line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def write_json(path, obj):
    text = dumps(obj) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc


def load_symbol(path):
    obj = load_json(path)
    if isinstance(obj, dict) and obj.get("kind") == "generated":
        obj = _require(obj, "phi", str(path))
    return symbol_from_obj(obj, str(path))


def save_symbol(path, sym):
    write_json(path, symbol_to_obj(sym))


def load_data(path):
    obj = load_json(path)
    if isinstance(obj, dict) and obj.get("kind") == "generated":
        obj = _require(obj, "data", str(path))
    return data_from_obj(obj, str(path))


def save_data(path, data):
    write_json(path, data_to_obj(data))


def is_data_file(obj):
    return isinstance(obj, dict) and obj.get("kind") in ("factorization", "generated")
