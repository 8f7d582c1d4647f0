"""JSON documents for configurations, classes, bundles and certificates.

Point references are written by name.  Rationals are always ``"p/q"``
strings, so documents never contain floats.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .bundles import ConicBundle, Fiber, ramification_class, relative_tangent_class
from .certifier import (
    Certificate,
    CriterionReport,
    ZetaDecomposition,
    criterion,
    zeta_decomposition,
)
from .configuration import LineDecl, SurfaceConfig, validate
from .curves import CurveRecord, EffectivityWitness
from .errors import InvalidConfiguration
from .lattice import DivisorClass, PointRef


class DocumentError(InvalidConfiguration):
    """A JSON document is malformed; each violation names its location."""


def rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str, where: str) -> Fraction:
    if not isinstance(s, str):
        raise DocumentError([f"{where}: expected a \"p/q\" string"])
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise DocumentError([f"{where}: {s!r} is not a rational"]) from None


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def content_hash(doc: Any) -> str:
    compact = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(compact.encode()).hexdigest()[:16]


# --- configurations -----------------------------------------------------------------

def config_to_doc(config: SurfaceConfig) -> dict:
    """Canonical document: chains as given, each line and the line list in point order."""
    lines = sorted(decl.sorted() for decl in config.lines)
    return {
        "chains": [list(chain) for chain in (config.names or ())] or _default_chains(config),
        "lines": [[config.name(p) for p in line] for line in lines],
    }


def _default_chains(config: SurfaceConfig) -> list[list[str]]:
    return [[config.name(p) for p in config.points if p.chain == i] for i in range(1, config.r + 1)]


def _expect_list(value, where: str, errors: list[str]) -> list | None:
    if not isinstance(value, list):
        errors.append(f"{where}: expected a list")
        return None
    return value


def config_from_doc(doc: Any) -> SurfaceConfig:
    """Parse and validate; every problem is reported with its JSON path."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise DocumentError(["$: expected an object with keys \"chains\" and \"lines\""])
    for key in sorted(set(doc) - {"chains", "lines"}):
        errors.append(f"$: unexpected key {key!r}")
    for key in ("chains", "lines"):
        if key not in doc:
            errors.append(f"$: missing key {key!r}")
    if errors:
        raise DocumentError(errors)
    names: list[list[str]] = []
    lookup: dict[str, tuple[int, int]] = {}
    chains = _expect_list(doc["chains"], "chains", errors) or []
    for i, chain in enumerate(chains):
        chain = _expect_list(chain, f"chains[{i}]", errors)
        if chain is None:
            continue
        if not chain:
            errors.append(f"chains[{i}]: a chain needs at least one point")
        names.append([])
        for j, name in enumerate(chain):
            if not isinstance(name, str) or not name:
                errors.append(f"chains[{i}][{j}]: point names must be non-empty strings")
                continue
            if name in lookup:
                errors.append(f"chains[{i}][{j}]: duplicate point name {name!r}")
                continue
            lookup[name] = (len(names), len(names[-1]) + 1)
            names[-1].append(name)
    lines = _expect_list(doc["lines"], "lines", errors) or []
    decls = []
    for k, line in enumerate(lines):
        line = _expect_list(line, f"lines[{k}]", errors)
        if line is None:
            continue
        if len(line) != 3:
            errors.append(f"lines[{k}]: a line lists exactly 3 point names")
        refs = []
        for t, name in enumerate(line):
            if name not in lookup:
                errors.append(f"lines[{k}][{t}]: unknown point name {name!r}")
            else:
                refs.append(lookup[name])
        decls.append(refs)
    if errors:
        raise DocumentError(errors)
    config = SurfaceConfig(
        tuple(len(ch) for ch in names),
        tuple(LineDecl(frozenset(PointRef(*r) for r in refs)) for refs in decls),
        tuple(tuple(ch) for ch in names),
    )
    problems = validate(config)
    if problems:
        raise DocumentError(problems)
    return config


def loads_config(text: str) -> SurfaceConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    return config_from_doc(doc)


# --- classes and curves -----------------------------------------------------------

def class_to_doc(config: SurfaceConfig, cls: DivisorClass) -> dict:
    return {"h": cls.h, "c": {config.name(p): cls.coef(p) for p in config.points}}


def format_class(config: SurfaceConfig, cls: DivisorClass) -> str:
    """Human-readable form such as ``H + C[a1] - 2C[b]``."""
    terms = []
    if cls.h:
        terms.append(("-" if cls.h < 0 else "+", f"{abs(cls.h) if abs(cls.h) != 1 else ''}H"))
    for p, v in cls.c.items():
        terms.append(("-" if v < 0 else "+", f"{abs(v) if abs(v) != 1 else ''}C[{config.name(p)}]"))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{sign} {t}" for sign, t in terms[1:]])


def class_from_doc(config: SurfaceConfig, doc: Any, where: str) -> DivisorClass:
    if not isinstance(doc, dict) or not isinstance(doc.get("h"), int) or not isinstance(doc.get("c"), dict):
        raise DocumentError([f"{where}: expected {{\"h\": int, \"c\": {{name: int}}}}"])
    lookup = {config.name(p): p for p in config.points}
    coeffs = {}
    for name, v in doc["c"].items():
        if name not in lookup:
            raise DocumentError([f"{where}.c: unknown point name {name!r}"])
        if not isinstance(v, int):
            raise DocumentError([f"{where}.c.{name}: expected an integer"])
        coeffs[lookup[name]] = v
    return DivisorClass.from_map(config.lengths, doc["h"], coeffs)


def curve_to_doc(config: SurfaceConfig, rec: CurveRecord) -> dict:
    return {
        "kind": rec.kind,
        "label": rec.label(config.point_names),
        "points": [config.name(p) for p in rec.support],
        "class": class_to_doc(config, rec.cls),
        "self_int": rec.self_int,
    }


def curve_from_doc(config: SurfaceConfig, doc: Any, where: str) -> CurveRecord:
    if not isinstance(doc, dict):
        raise DocumentError([f"{where}: expected a curve object"])
    lookup = {config.name(p): p for p in config.points}
    try:
        support = tuple(lookup[n] for n in doc.get("points", []))
    except (KeyError, TypeError):
        raise DocumentError([f"{where}.points: unknown point name"]) from None
    return CurveRecord(
        str(doc.get("kind")),
        class_from_doc(config, doc.get("class"), f"{where}.class"),
        int(doc.get("self_int", 0)),
        support,
    )


# --- bundles and certificates ------------------------------------------------------

def report_to_doc(report: CriterionReport) -> dict:
    return {
        "terms": [rational(t) for t in report.terms],
        "total": rational(report.total),
        "pass": report.passed,
    }


def zeta_to_doc(zeta: ZetaDecomposition) -> dict:
    return {
        "fibers": [
            {
                "components": [rational(v) for v in fz.component_coeffs],
                "nodes": [rational(v) for v in fz.node_coeffs],
            }
            for fz in zeta.fibers
        ],
        "leftover": rational(zeta.leftover),
    }


def fiber_to_doc(config: SurfaceConfig, fiber: Fiber) -> dict:
    return {
        "components": [
            {"curve": curve_to_doc(config, rec), "multiplicity": a} for rec, a in fiber.components
        ],
        "nodes": [[i, j, k] for i, j, k in fiber.nodes],
        "M": fiber.M,
    }


def bundle_to_doc(config: SurfaceConfig, bundle: ConicBundle, details: bool = True) -> dict:
    doc = {
        "degree": bundle.degree,
        "base_points": [config.name(p) for p in bundle.base_points],
        "fiber_class": class_to_doc(config, bundle.fiber_class),
        "singular_fibers": [fiber_to_doc(config, f) for f in bundle.singular_fibers],
    }
    if details:
        doc["ramification"] = class_to_doc(config, ramification_class(bundle))
        doc["relative_tangent"] = class_to_doc(config, relative_tangent_class(bundle))
        doc["criterion"] = report_to_doc(criterion(bundle))
        doc["zeta"] = zeta_to_doc(zeta_decomposition(bundle))
    return doc


def certificate_to_doc(config: SurfaceConfig, cert: Certificate) -> dict:
    return {
        "branch": cert.branch,
        "k": cert.k,
        "bundles": [bundle_to_doc(config, b, details=False) for b in cert.bundles],
        "E": class_to_doc(config, cert.E),
        "E_witness": {
            "parts": [
                {"curve": curve_to_doc(config, rec), "multiplicity": m}
                for rec, m in cert.E_witness.parts
            ],
            "remainder": class_to_doc(config, cert.E_witness.remainder),
        },
        "reports": [report_to_doc(r) for r in cert.reports],
    }


def _get(doc: Any, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError([f"{where}: missing key {key!r}"])
    return doc[key]


def _fiber_from_doc(config: SurfaceConfig, doc: Any, where: str) -> Fiber:
    comps = []
    for n, item in enumerate(_get(doc, "components", where)):
        rec = curve_from_doc(config, _get(item, "curve", f"{where}.components[{n}]"), f"{where}.components[{n}].curve")
        comps.append((rec, int(_get(item, "multiplicity", f"{where}.components[{n}]"))))
    nodes = []
    for n, node in enumerate(_get(doc, "nodes", where)):
        if not (isinstance(node, list) and len(node) == 3 and all(isinstance(v, int) for v in node)):
            raise DocumentError([f"{where}.nodes[{n}]: expected [i, j, count]"])
        nodes.append(tuple(node))
    return Fiber(tuple(comps), tuple(nodes))


def certificate_from_doc(config: SurfaceConfig, doc: Any) -> Certificate:
    """Rebuild a certificate; accepts a bare certificate or a full certify report."""
    if isinstance(doc, dict) and "payload" in doc:
        doc = doc["payload"]
    bundles = []
    for n, bdoc in enumerate(_get(doc, "bundles", "$")):
        where = f"bundles[{n}]"
        lookup = {config.name(p): p for p in config.points}
        try:
            base = tuple(lookup[name] for name in _get(bdoc, "base_points", where))
        except (KeyError, TypeError):
            raise DocumentError([f"{where}.base_points: unknown point name"]) from None
        fibers = tuple(
            _fiber_from_doc(config, f, f"{where}.singular_fibers[{k}]")
            for k, f in enumerate(_get(bdoc, "singular_fibers", where))
        )
        bundles.append(
            ConicBundle(
                int(_get(bdoc, "degree", where)),
                base,
                class_from_doc(config, _get(bdoc, "fiber_class", where), f"{where}.fiber_class"),
                config,
                fibers,
            )
        )
    wdoc = _get(doc, "E_witness", "$")
    parts = tuple(
        (
            curve_from_doc(config, _get(p, "curve", f"E_witness.parts[{n}]"), f"E_witness.parts[{n}].curve"),
            int(_get(p, "multiplicity", f"E_witness.parts[{n}]")),
        )
        for n, p in enumerate(_get(wdoc, "parts", "E_witness"))
    )
    witness = EffectivityWitness(
        parts, class_from_doc(config, _get(wdoc, "remainder", "E_witness"), "E_witness.remainder")
    )
    reports = tuple(
        CriterionReport(
            tuple(parse_rational(t, f"reports[{n}].terms") for t in _get(r, "terms", f"reports[{n}]")),
            parse_rational(_get(r, "total", f"reports[{n}]"), f"reports[{n}].total"),
            bool(_get(r, "pass", f"reports[{n}]")),
        )
        for n, r in enumerate(_get(doc, "reports", "$"))
    )
    return Certificate(
        str(_get(doc, "branch", "$")),
        tuple(bundles),
        int(_get(doc, "k", "$")),
        class_from_doc(config, _get(doc, "E", "$"), "E"),
        witness,
        reports,
    )
