"""Command-line front end: run a certification and write a JSON report.

Input files are TOML with either a ``coxeter`` table::

    [coxeter]
    generators = ["s1", "s2", "s3", "s4", "s5"]
    default = "infty:21/20"          # label for pairs not listed
    edges = [["s1", "s2", "commute"], ["s1", "s3", "infty:21/20"]]

or a ``matrices`` table::

    [matrices]
    gram = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]
    [matrices.generators]
    a = [["5/3", 0, "4/3"], [0, 1, 0], ["4/3", 0, "5/3"]]

Matrix entries may be numbers or strings holding exact rationals.

Exit codes: 0 success (or verdict matches ``--expect``), 1 input error,
2 numerical failure, 3 verdict differs from ``--expect``.
"""

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gallery
from .coxeter_vinberg import CoxeterSpec, check_hypotheses, coxeter_pipeline
from .errors import CertError, HypothesisError, NumericalFailure, PreconditionError
from .plot import emit_plot
from .pq_form import QuadraticSpace
from .proximal_dynamics import DEFAULT_ELEMENT_CAP, DEFAULT_POINT_CAP, GroupRep
from .report import CertReport, certify_group
from .tolerances import Tolerances

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3
EXPECT_CHOICES = ("negative", "positive", "mixed", "empty")


class InputError(CertError, ValueError):
    """Malformed run specification."""


@dataclass
class RunConfig:
    input_path: str = None
    example: str = None
    depth: int = None
    element_cap: int = DEFAULT_ELEMENT_CAP
    point_cap: int = DEFAULT_POINT_CAP
    triple_samples: int = 2000
    probe_pairs: int = 200
    seed: int = 0
    expect: str = None
    report_path: str = None
    plot_path: str = None
    tol_overrides: list = field(default_factory=list)

    def validate(self):
        if (self.input_path is None) == (self.example is None):
            raise InputError("give exactly one of --input or --example")
        if self.depth is not None and self.depth < 1:
            raise InputError("--depth must be at least 1")
        if self.element_cap < 1 or self.point_cap < 2:
            raise InputError("caps must be positive")
        if self.expect is not None and self.expect not in EXPECT_CHOICES:
            raise InputError(f"--expect must be one of {EXPECT_CHOICES}")


def _parse_number(value, where):
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{where}: cannot parse {value!r} as a number") from exc
    raise InputError(f"{where}: expected a number, got {value!r}")


def _parse_matrix(rows, where):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{where}: expected a list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError(f"{where}: matrix must be square")
    entries = [[_parse_number(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
    exact = all(isinstance(v, Fraction) for r in entries for v in r)
    floats = np.array([[float(v) for v in r] for r in entries])
    return floats, (np.array(entries, dtype=object) if exact else None)


def _parse_label(label, where):
    label = str(label).strip()
    if label == "commute":
        return "commute", None
    if label == "infty" or label.startswith("infty"):
        _, _, rest = label.partition(":")
        if not rest.strip():
            rest = label.partition("=")[2]
        return "infty", (_parse_number(rest.strip(), where) if rest.strip() else None)
    raise InputError(f"{where}: label must be 'commute' or 'infty:ALPHA', got {label!r}")


def parse_coxeter_table(table):
    gens = table.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(g, str) for g in gens):
        raise InputError("coxeter.generators: expected a nonempty list of names")
    if len(set(gens)) != len(gens):
        raise InputError("coxeter.generators: names must be unique")
    index = {g: i for i, g in enumerate(gens)}
    kind, alpha = _parse_label(table.get("default", "infty:2"), "coxeter.default")
    default = (kind, alpha if alpha is not None else Fraction(2))
    labels = {}
    for k, edge in enumerate(table.get("edges", [])):
        where = f"coxeter.edges[{k}]"
        if not isinstance(edge, list) or len(edge) != 3:
            raise InputError(f"{where}: expected [name, name, label]")
        a, b, lab = edge
        if a not in index or b not in index or a == b:
            raise InputError(f"{where}: unknown or repeated generator in {edge!r}")
        kind, alpha = _parse_label(lab, where)
        labels[(min(index[a], index[b]), max(index[a], index[b]))] = (kind, alpha or default[1])
    infinite, alphas = [], {}
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            kind, alpha = labels.get((i, j), default)
            if kind == "infty":
                infinite.append((i, j))
                alphas[(i, j)] = alpha
    try:
        return CoxeterSpec.from_edges(gens, infinite, alphas)
    except PreconditionError as exc:
        raise InputError(f"coxeter: {exc}") from exc


def parse_matrices_table(table, tol):
    if "gram" not in table or "generators" not in table:
        raise InputError("matrices: need 'gram' and a 'generators' table")
    gram, exact = _parse_matrix(table["gram"], "matrices.gram")
    if not isinstance(table["generators"], dict) or not table["generators"]:
        raise InputError("matrices.generators: expected a table of named matrices")
    gens = []
    for name, rows in table["generators"].items():
        mat, _ = _parse_matrix(rows, f"matrices.generators.{name}")
        if mat.shape != gram.shape:
            raise InputError(f"matrices.generators.{name}: size differs from gram")
        gens.append((name, mat))
    try:
        space = QuadraticSpace(gram, tol=tol, exact_gram=exact)
        return GroupRep(space, gens)
    except (PreconditionError, ValueError) as exc:
        raise InputError(f"matrices: {exc}") from exc


def load_input(path, tol):
    """Parse an input file into ('coxeter', CoxeterSpec) or ('matrices', GroupRep)."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    kinds = [k for k in ("coxeter", "matrices") if k in doc]
    if len(kinds) != 1:
        raise InputError(f"{path}: need exactly one of the tables 'coxeter' or 'matrices'")
    if kinds[0] == "coxeter":
        return "coxeter", parse_coxeter_table(doc["coxeter"])
    return "matrices", parse_matrices_table(doc["matrices"], tol)


def _aborted_report(source, config, spec, exc):
    hyp = check_hypotheses(spec)
    data = {"source": source, "config": config,
            "identification": {"generators": spec.n, "generator_labels": list(spec.names),
                               "hypotheses": hyp.as_dict(), "square_witness": hyp.square_witness},
            "verdict": {"value": None},
            "aborted": {"reason": "hypotheses failed", "failed": list(exc.failed)},
            "notes": [str(exc)]}
    return CertReport(data)


def run(config):
    """Execute a run; returns ``(report or None, exit_code, message)``."""
    config.validate()
    base_tol = Tolerances()
    if config.example is not None:
        base_tol = base_tol.updated(**gallery.fixture_tolerances(config.example))
    try:
        tol = Tolerances.from_strings(config.tol_overrides, base=base_tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    opts = dict(seed=config.seed, element_cap=config.element_cap, point_cap=config.point_cap,
                triple_samples=config.triple_samples, probe_pairs=config.probe_pairs)
    echo = {"depth": None, "element_cap": config.element_cap, "point_cap": config.point_cap,
            "triple_samples": config.triple_samples, "probe_pairs": config.probe_pairs,
            "seed": config.seed, "tolerances": tol.as_dict()}
    spec = rep = None
    depth = config.depth
    if config.example is not None:
        source = {"kind": "example", "name": config.example}
        if config.example in gallery.COXETER_EXAMPLES:
            spec = gallery.COXETER_EXAMPLES[config.example]()
            depth = depth or 10
        elif config.example in gallery.EXAMPLES:
            bundle = gallery.get_example(config.example, tol=tol)
            rep = bundle.rep
            depth = depth or bundle.default_depth
            source["expected_verdict"] = bundle.expected_verdict
        else:
            raise InputError(f"unknown example {config.example!r}; choose from {gallery.example_names()}")
    else:
        kind, obj = load_input(config.input_path, tol)
        source = {"kind": kind, "path": str(config.input_path)}
        if kind == "coxeter":
            spec = obj
        else:
            rep = obj
        depth = depth or 8
    echo["depth"] = depth
    if spec is not None:
        source["coxeter_generators"] = list(spec.names)
        try:
            report = coxeter_pipeline(spec, depth, tol=tol, source=source, **opts)
        except HypothesisError as exc:
            return _aborted_report(source, echo, spec, exc), EXIT_INPUT, str(exc)
    else:
        report = certify_group(rep, depth, source=source, **opts)
    if config.plot_path:
        note = emit_plot(report, config.plot_path)
        report.data["plot"] = {"path": str(config.plot_path), "written": note is None}
        if note:
            report.data["notes"].append(note)
    code = EXIT_OK
    message = f"verdict {report.verdict}"
    if config.expect is not None:
        want = config.expect.capitalize()
        report.data["expect"] = {"wanted": want, "matched": report.verdict == want}
        if report.verdict != want:
            code = EXIT_MISMATCH
            message += f" (expected {want})"
    return report, code, message


def build_parser():
    ap = argparse.ArgumentParser(prog="hpqcert", description="Certify the sign of sampled limit sets.")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="TOML run specification")
    src.add_argument("--example", metavar="NAME", help="named fixture: " + ", ".join(gallery.example_names()))
    ap.add_argument("--depth", type=int, help="maximal word length")
    ap.add_argument("--cap", type=int, default=DEFAULT_ELEMENT_CAP, help="element enumeration cap")
    ap.add_argument("--point-cap", type=int, default=DEFAULT_POINT_CAP, help="limit point cap")
    ap.add_argument("--triples", type=int, default=2000, help="random triples for the sign scan")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--expect", choices=EXPECT_CHOICES)
    ap.add_argument("--report", metavar="PATH", help="write the JSON report here (default: stdout)")
    ap.add_argument("--plot", metavar="PATH", help="write an SVG plot (dimension 3 or 4 only)")
    ap.add_argument("--tol", action="append", default=[], metavar="KEY=VAL",
                    help="tolerance override: " + ", ".join(Tolerances.names()))
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = RunConfig(input_path=args.input, example=args.example, depth=args.depth,
                       element_cap=args.cap, point_cap=args.point_cap, triple_samples=args.triples,
                       seed=args.seed, expect=args.expect, report_path=args.report,
                       plot_path=args.plot, tol_overrides=args.tol)
    try:
        report, code, message = run(config)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CertError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if report is not None:
        if config.report_path:
            report.write(config.report_path)
        else:
            sys.stdout.write(report.to_json())
    print(message, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
