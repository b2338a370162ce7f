"""JSON persistence for configs and certificates.

Every rational is written as a "num/den" string, never as a float.  The
reader also accepts plain integers (JSON or string) and unreduced fractions,
so reading and re-writing a file yields the canonical form.
"""

from fractions import Fraction
import json
import re

from .config import ConstructionConfig
from .construction import Certificate
from .errors import ConfigError, FormatError
from .geometry import Cube, Hyperplane

_RATIONAL = re.compile(r"\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?")


def format_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(value):
    if isinstance(value, bool):
        raise FormatError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise FormatError(f"rationals must be 'num/den' strings, got {value!r}")
    match = _RATIONAL.fullmatch(value)
    if not match:
        raise FormatError(f"malformed rational {value!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise FormatError(f"zero denominator in {value!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def parse_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{name} must be an integer, got {value!r}")
    return value


def _vector(values, name):
    if not isinstance(values, list):
        raise FormatError(f"{name} must be a list")
    return tuple(parse_rational(v) for v in values)


def _matrix(values, name):
    if not isinstance(values, list) or not values:
        raise FormatError(f"{name} must be a non-empty list of rows")
    return tuple(_vector(row, name) for row in values)


def _fmt_matrix(rows):
    return [[format_rational(v) for v in row] for row in rows]


def _require(doc, key):
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    return doc[key]


# -- configs ---------------------------------------------------------------------


def config_to_dict(config):
    doc = {
        "m": config.m,
        "n": config.n,
        "edge": format_rational(config.edge),
        "cube_origin": _fmt_matrix(config.cube.lower),
        "gamma": [format_rational(g) for g in config.gamma],
        "c": format_rational(config.c),
        "R": config.R,
        "mode": config.mode,
        "hyperplanes": [
            {"coefficients": _fmt_matrix(H.coefficients), "offset": format_rational(H.offset)}
            for H in config.hyperplanes
        ],
    }
    constants = {
        name: format_rational(getattr(config, name))
        for name in ("const_mn", "cond5_const", "cond5_eps")
        if getattr(config, name) is not None
    }
    if constants:
        doc["constants"] = constants
    return doc


def config_from_dict(doc):
    if not isinstance(doc, dict):
        raise FormatError("config must be a JSON object")
    m = parse_int(_require(doc, "m"), "m")
    n = parse_int(_require(doc, "n"), "n")
    edge = parse_rational(_require(doc, "edge"))
    origin = _matrix(_require(doc, "cube_origin"), "cube_origin")
    hyperplanes = []
    for h in doc.get("hyperplanes", []):
        if not isinstance(h, dict):
            raise FormatError("hyperplane entries must be objects")
        try:
            hyperplanes.append(
                Hyperplane(_matrix(_require(h, "coefficients"), "coefficients"), parse_rational(_require(h, "offset")))
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    constants = doc.get("constants", {})
    if not isinstance(constants, dict):
        raise FormatError("constants must be an object")
    unknown = set(constants) - {"const_mn", "cond5_const", "cond5_eps"}
    if unknown:
        raise FormatError(f"unknown constants {sorted(unknown)}")
    try:
        cube = Cube(origin, edge)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kwargs = {name: parse_rational(v) for name, v in constants.items()}
    if "node_budget" in doc:
        kwargs["node_budget"] = parse_int(doc["node_budget"], "node_budget")
    return ConstructionConfig(
        m=m,
        n=n,
        cube=cube,
        gamma=_vector(_require(doc, "gamma"), "gamma"),
        c=parse_rational(_require(doc, "c")),
        R=parse_int(_require(doc, "R"), "R"),
        hyperplanes=tuple(hyperplanes),
        mode=doc.get("mode", "empirical"),
        **kwargs,
    )


# -- certificates ------------------------------------------------------------------


def certificate_to_dict(cert):
    doc = config_to_dict(cert.config)
    doc.update(
        {
            "K": cert.K,
            "search": cert.search,
            "chain": list(cert.chain),
            "observed_removals": list(cert.observed_removals),
            "witness": _fmt_matrix(cert.witness),
            "finite_range_bound": (
                None if cert.finite_range_bound is None else format_rational(cert.finite_range_bound)
            ),
        }
    )
    return doc


def certificate_from_dict(doc):
    config = config_from_dict(doc)
    chain = _require(doc, "chain")
    removals = _require(doc, "observed_removals")
    if not isinstance(chain, list) or not isinstance(removals, list):
        raise FormatError("chain and observed_removals must be lists")
    bound = _require(doc, "finite_range_bound")
    return Certificate(
        config=config,
        K=parse_int(_require(doc, "K"), "K"),
        chain=tuple(parse_int(v, "chain entry") for v in chain),
        observed_removals=tuple(parse_int(v, "observed_removals entry") for v in removals),
        witness=_matrix(_require(doc, "witness"), "witness"),
        finite_range_bound=None if bound is None else parse_rational(bound),
        search=doc.get("search", "dfs"),
    )


def dumps(doc):
    return json.dumps(doc, indent=2) + "\n"


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def save_certificate(cert, path):
    with open(path, "w") as fh:
        fh.write(dumps(certificate_to_dict(cert)))


def load_certificate(path):
    with open(path) as fh:
        return certificate_from_dict(loads(fh.read()))


def load_config(path):
    with open(path) as fh:
        return config_from_dict(loads(fh.read()))


def load_matrix(path):
    """A matrix file {"matrix": [[...]], "gamma": [...]} or a certificate (its witness)."""
    with open(path) as fh:
        doc = loads(fh.read())
    if not isinstance(doc, dict):
        raise FormatError("matrix file must be a JSON object")
    if "witness" in doc:
        cert = certificate_from_dict(doc)
        return cert.witness, cert.config.gamma
    A = _matrix(_require(doc, "matrix"), "matrix")
    if len({len(r) for r in A}) != 1:
        raise FormatError("ragged matrix")
    gamma = _vector(doc["gamma"], "gamma") if "gamma" in doc else (Fraction(0),) * len(A)
    if len(gamma) != len(A):
        raise FormatError("gamma must have one entry per row")
    return A, gamma
