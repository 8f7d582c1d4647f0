"""Command line entry point: ``almostnef <command> [--json] ...``.

Exit codes: 0 success, 1 negative result (invalid configuration, failed
verification), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import serialize as ser
from .bundles import all_bundles, relative_tangent_class
from .certifier import certify, criterion, verify
from .configuration import enumerate_configs
from .curves import catalog
from .errors import InternalConsistencyError, InvalidConfiguration, TheoremViolation

EXIT_OK, EXIT_NEGATIVE, EXIT_INTERNAL = 0, 1, 2


class _Failure(Exception):
    def __init__(self, code: int, violations: list[str], config_doc=None):
        super().__init__("; ".join(violations))
        self.code = code
        self.violations = violations
        self.config_doc = config_doc


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Failure(EXIT_INTERNAL, [f"{path}: {exc.strerror}"]) from None


def _load_config(path: str):
    try:
        return ser.loads_config(_read(path))
    except InvalidConfiguration as exc:
        raise _Failure(EXIT_NEGATIVE, [f"{path}: {v}" for v in exc.violations]) from None


# --- commands: each returns (config_doc, payload, violations, text) -------------------

def cmd_validate(args):
    config = _load_config(args.file)
    doc = ser.config_to_doc(config)
    payload = {"valid": True, "points": config.n_points, "degree": config.degree, "hash": ser.content_hash(doc)}
    return doc, payload, [], f"valid: {config.n_points} points, degree {config.degree}"


def cmd_curves(args):
    config = _load_config(args.file)
    records = [ser.curve_to_doc(config, rec) for rec in catalog(config)]
    lines = [f"{r['label']:<24} self-intersection {r['self_int']}" for r in records]
    return ser.config_to_doc(config), {"catalog": records}, [], "\n".join(lines)


def cmd_bundles(args):
    config = _load_config(args.file)
    bundles = all_bundles(config)
    text = []
    for b in bundles:
        rep = criterion(b)
        text.append(
            f"{b.label}: {len(b.singular_fibers)} singular fibre(s), M = "
            f"{[f.M for f in b.singular_fibers]}, criterion total {rep.total} "
            f"({'pass' if rep.passed else 'fail'})"
        )
        for f in b.singular_fibers:
            text.append("    " + " + ".join(
                (f"{a}*" if a > 1 else "") + rec.label(config.point_names) for rec, a in f.components
            ))
        text.append(f"    T_f = {ser.format_class(config, relative_tangent_class(b))}")
    payload = {"bundles": [ser.bundle_to_doc(config, b) for b in bundles]}
    return ser.config_to_doc(config), payload, [], "\n".join(text)


def cmd_certify(args):
    config = _load_config(args.file)
    doc = ser.config_to_doc(config)
    if config.n_points != 5:
        raise _Failure(EXIT_NEGATIVE, ["certificates need a 5-point configuration"], doc)
    cert = certify(config)
    parts = " + ".join(
        (f"{m}*" if m > 1 else "") + rec.label(config.point_names) for rec, m in cert.E_witness.parts
    ) or "0"
    text = "\n".join([
        f"branch: {cert.branch}",
        "bundles: " + ", ".join(b.label for b in cert.bundles),
        f"k = {cert.k}",
        f"E = {ser.format_class(config, cert.E)}",
        f"E = {parts}" + ("" if cert.E_witness.remainder.is_zero() else " + (nef remainder)"),
        "criterion totals: " + ", ".join(str(r.total) for r in cert.reports),
    ])
    return doc, ser.certificate_to_doc(config, cert), [], text


def cmd_verify(args):
    config = _load_config(args.config)
    doc = ser.config_to_doc(config)
    try:
        cert = ser.certificate_from_doc(config, json.loads(_read(args.certificate)))
    except json.JSONDecodeError as exc:
        raise _Failure(EXIT_NEGATIVE, [f"{args.certificate}: line {exc.lineno}, column {exc.colno}: {exc.msg}"], doc) from None
    except InvalidConfiguration as exc:
        raise _Failure(EXIT_NEGATIVE, [f"{args.certificate}: {v}" for v in exc.violations], doc) from None
    result = verify(config, cert)
    if not result.ok:
        raise _Failure(EXIT_NEGATIVE, list(result.violations), doc)
    return doc, {"verified": True}, [], "certificate verified"


def cmd_enumerate(args):
    configs = enumerate_configs(args.points)
    entries = []
    certified = 0
    for config in configs:
        doc = ser.config_to_doc(config)
        entry = {"hash": ser.content_hash(doc), "config": doc}
        if args.certify:
            cert = certify(config)
            ok = verify(config, cert).ok
            certified += ok
            entry.update(branch=cert.branch, k=cert.k, verified=ok)
        entries.append(entry)
    payload = {"points": args.points, "count": len(entries), "configurations": entries}
    text = [f"{len(entries)} configurations on {args.points} points"]
    for e in entries:
        line = f"  {e['hash']}  chains={e['config']['chains']} lines={e['config']['lines']}"
        if args.certify:
            line += f"  {e['branch']} k={e['k']} verified={e['verified']}"
        text.append(line)
    violations = []
    if args.certify:
        fraction = Fraction(certified, len(entries))
        payload["certified"] = certified
        payload["certified_fraction"] = ser.rational(fraction)
        text.append(f"certified and verified: {certified}/{len(entries)} ({float(fraction):.0%})")
        if certified != len(entries):
            violations.append(f"{len(entries) - certified} configuration(s) failed verification")
    return None, payload, violations, "\n".join(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almostnef",
        description="Certify almost-nefness of tangent bundles of weak del Pezzo surfaces of degree 4.",
    )
    parser.add_argument("--json", action="store_true", help="emit a single JSON report")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("validate", cmd_validate, "check a configuration file"),
        ("curves", cmd_curves, "list the negative curves"),
        ("bundles", cmd_bundles, "list conic bundles and singular fibres"),
        ("certify", cmd_certify, "build an almost-nefness certificate"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.set_defaults(func=fn)
    p = sub.add_parser("verify", help="re-check a certificate against a configuration")
    p.add_argument("config")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("enumerate", help="enumerate all configurations")
    p.add_argument("--points", type=int, choices=(4, 5), required=True)
    p.add_argument("--certify", action="store_true", help="certify and verify each (5 points only)")
    p.set_defaults(func=cmd_enumerate)
    return parser


def _emit(args, config_doc, payload, violations, text, out) -> None:
    if args.json:
        report = {
            "command": args.command,
            "config": config_doc,
            "payload": payload,
            "violations": violations,
        }
        out.write(ser.dumps(report))
    else:
        if text:
            out.write(text + "\n")
        for v in violations:
            out.write(f"error: {v}\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "enumerate" and args.certify and args.points != 5:
        parser.error("--certify needs --points 5")
    try:
        config_doc, payload, violations, text = args.func(args)
        code = EXIT_NEGATIVE if violations else EXIT_OK
    except _Failure as exc:
        config_doc, payload, violations, text, code = exc.config_doc, None, exc.violations, "", exc.code
    except (InternalConsistencyError, TheoremViolation) as exc:
        config_doc, payload, violations, text, code = None, None, [f"internal error: {exc}"], "", EXIT_INTERNAL
    _emit(args, config_doc, payload, violations, text, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
