"""Command-line front end.

Exit codes: 0 success, 2 bad usage or input, 3 a mathematical invariant
failed numerically.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .docs import combination_from_doc, dumps, load_json, pair_from_doc, pair_to_doc
from .errors import InvariantViolation, NoConvergence, TwoProjError, UnknownScenario, ValidationError
from .grid import (
    GridSpec,
    cross_term_values,
    invariant_submodule_check,
    make_counterexample_pair,
    matched_triple_transfer,
    no_common_unitary_certificate,
    nonconvergence_check,
    obstruction_range_2IPQ,
    obstruction_semiharmonious,
    refinement_table,
)
from .halmos import decompose, decomposition_report
from .linalg import Tolerance
from .pairs import check_angle_symmetry, random_pair
from .unitary import build_unitary, check_absolute_value_identity
from .words import (
    RepresentationSpec,
    Word,
    check_lower_bounds,
    check_norm_transport,
    combination_norm,
    reduce_product,
    word_norm,
)

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3

SCENARIOS = (
    "semiharmonious-not-harmonious",
    "range-2ipq-fails",
    "no-common-unitary",
    "pqp-nonconvergence",
    "invariant-submodule",
    "matched-transfer",
)


def _tol(args):
    return Tolerance(residual=args.tol)


def _load_pair(args, rng=None):
    tol = _tol(args)
    if args.input:
        return pair_from_doc(load_json(args.input), tol), "file"
    rng = np.random.default_rng(args.seed) if rng is None else rng
    return random_pair(args.dim, rng, tol=tol), "seed"


def _pair_summary(pair, tol):
    dec = decompose(pair)
    cert = build_unitary(pair, tol)
    sym = check_angle_symmetry(pair)
    rep = decomposition_report(dec, pair)
    residuals = dict(cert.residuals)
    residuals["angle_symmetry"] = sym.residual
    residuals["absolute_value_identity"] = check_absolute_value_identity(pair)
    residuals.update({f"halmos_{k}": v for k, v in rep["residuals"].items()})
    spectrum = rep["generic_spectrum"]
    angle = sym.lhs
    residuals["angle_squared_vs_spectrum"] = abs(angle**2 - (spectrum[0] if spectrum else 0.0))
    results = {
        "friedrichs_angle": angle,
        "complement_angle": sym.rhs,
        "corner_dims": rep["dims"],
        "generic_spectrum": spectrum,
    }
    return results, residuals


def _verdict(residuals, tol):
    return all(v <= tol for v in residuals.values())


def cmd_analyze(args):
    pair, source = _load_pair(args)
    results, residuals = _pair_summary(pair, args.tol)
    ok = _verdict(residuals, args.tol)
    return ok, {"results": results, "residuals": residuals, "pair_source": source}


def cmd_halmos(args):
    pair, source = _load_pair(args)
    dec = decompose(pair)
    rep = decomposition_report(dec, pair)
    ok = _verdict(rep["residuals"], args.tol)
    return ok, {"results": rep, "residuals": rep.pop("residuals"), "pair_source": source}


def cmd_unitary(args):
    pair, source = _load_pair(args)
    cert = build_unitary(pair, args.tol)
    doc = {"residuals": cert.residuals, "certificate": {"accepted": cert.accepted}, "pair_source": source}
    if args.format == "structured":
        doc["results"] = {"pair": pair_to_doc(pair), "u": cert.u}
    return cert.accepted, doc


def _parse_word(text):
    text = text.strip()
    if text.upper() == "I":
        return Word("I")
    if len(text) < 2 or text[0].upper() not in "ABCD" or not text[1:].isdigit():
        raise ValidationError(f"word must look like A2, B0, C1, D3 or I, got {text!r}")
    return Word(text[0].upper(), int(text[1:]))


def cmd_words(args):
    pair, source = _load_pair(args)
    words = [_parse_word(w) for w in args.word or []]
    results = {"words": {}}
    for w in words:
        results["words"][str(w)] = word_norm(pair, w)
    if words:
        results["product"] = str(reduce_product(words))
    ok = True
    if args.combination:
        c = combination_from_doc(load_json(args.combination))
        rep = check_lower_bounds(pair, c)
        results["combination_norm"] = combination_norm(pair, c)
        results["lower_bounds"] = rep.to_doc()
        ok = rep.passed
    return ok, {"results": results, "pair_source": source}


def run_scenario(name, grid, seed=0, trials=1000, n_max=50, pair=None):
    if name == "semiharmonious-not-harmonious":
        return obstruction_semiharmonious(grid, trials, seed)
    if name == "range-2ipq-fails":
        return obstruction_range_2IPQ(grid, trials, seed)
    if name == "no-common-unitary":
        return no_common_unitary_certificate(grid)
    if name == "pqp-nonconvergence":
        return nonconvergence_check(grid, n_max)
    if name == "invariant-submodule":
        return invariant_submodule_check(grid)
    if name == "matched-transfer":
        if pair is None:
            raise ValidationError("matched-transfer needs a pair")
        return matched_triple_transfer(pair)
    raise UnknownScenario(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


def cmd_scenario(args):
    if args.scenario not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {args.scenario!r}; choose from {', '.join(SCENARIOS)}")
    pair = _load_pair(args)[0] if args.scenario == "matched-transfer" else None
    cert = run_scenario(args.scenario, GridSpec(args.grid), args.seed, args.trials, args.n_max, pair)
    doc = cert.to_doc()
    return cert.passed, {"results": doc.pop("data"), "certificate": doc}


def _sweep_pairs(args):
    children = np.random.SeedSequence(args.seed).spawn(args.count)
    lo, hi = args.dim_min, args.dim_max
    if not 1 <= lo <= hi:
        raise ValidationError(f"need 1 <= dim-min <= dim-max, got {lo}, {hi}")
    worst, violations, angles = {}, 0, []
    for child in children:
        rng = np.random.default_rng(child)
        pair = random_pair(int(rng.integers(lo, hi + 1)), rng, tol=_tol(args))
        results, residuals = _pair_summary(pair, args.tol)
        angles.append(results["friedrichs_angle"])
        violations += not _verdict(residuals, args.tol)
        for k, v in residuals.items():
            worst[k] = max(worst.get(k, 0.0), v)
    counts, edges = np.histogram(angles, bins=10, range=(0.0, 1.0))
    table = [{"bin_lo": float(a), "bin_hi": float(b), "count": int(c)}
             for a, b, c in zip(edges, edges[1:], counts)]
    results = {"instances": args.count, "violations": violations, "angle_histogram": table if angles else []}
    return violations == 0, {"results": results, "residuals": worst}


def _sweep_grid(args):
    sizes = sorted(args.grids)
    rows = []
    word = Word("A", 1)
    for n in sizes:
        grid = GridSpec(n)
        rep = check_norm_transport(RepresentationSpec.grid_evaluation(grid), make_counterexample_pair(grid), word)
        rows.append({"n_samples": n, "spacing": grid.spacing, "residual": rep.residual,
                     "bound": rep.bound, "passed": rep.passed})
    ratios = [a["residual"] / b["residual"] for a, b in zip(rows, rows[1:]) if b["residual"] > 0]

    refine = refinement_table(cross_term_values, sizes) if len(sizes) > 1 else None
    ok = all(r["passed"] for r in rows)
    results = {"norm_transport": rows, "ratios": ratios}
    if refine is not None:
        results["sup_norm_refinement"] = refine
        ok = ok and refine["monotone"] and refine["within_bound"]
    return ok, {"results": results}


def cmd_sweep(args):
    if args.count < 0:
        raise ValidationError("count must be nonnegative")
    if args.kind == "pairs":
        if args.count == 0:
            return True, {"results": {"instances": 0, "violations": 0, "angle_histogram": []}, "residuals": {}}
        return _sweep_pairs(args)
    return _sweep_grid(args)


COMMANDS = {
    "analyze": cmd_analyze,
    "halmos": cmd_halmos,
    "unitary": cmd_unitary,
    "words": cmd_words,
    "scenario": cmd_scenario,
    "sweep": cmd_sweep,
}


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _grid_list(text):
    try:
        return [int(n) for n in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="pair document (JSON)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--dim", type=_positive, default=6)
    common.add_argument("--grid", type=int, default=1001, help="number of grid samples")
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--tol", type=_positive_float, default=1e-10, help="residual tolerance")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="twoproj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="angles, corners, spectrum and residuals of a pair")
    sub.add_parser("halmos", parents=[common], help="six-subspace decomposition report")
    sub.add_parser("unitary", parents=[common], help="intertwining unitary certificate")
    w = sub.add_parser("words", parents=[common], help="word norms and lower bounds")
    w.add_argument("--word", action="append", help="word such as A2 or D0 (repeatable)")
    w.add_argument("--combination", help="combination document (JSON)")
    s = sub.add_parser("scenario", parents=[common], help="run a grid counterexample")
    s.add_argument("--scenario", required=True)
    s.add_argument("--trials", type=_positive, default=1000)
    s.add_argument("--n-max", type=_positive, default=50)
    sw = sub.add_parser("sweep", parents=[common], help="randomized or refinement sweeps")
    sw.add_argument("--kind", choices=("pairs", "grid-refinement"), default="pairs")
    sw.add_argument("--count", type=int, default=200)
    sw.add_argument("--dim-min", type=int, default=2)
    sw.add_argument("--dim-max", type=int, default=12)
    sw.add_argument("--grids", type=_grid_list, default=[251, 1001, 4001])
    return parser


def _config(args):
    keys = ("command", "input", "seed", "dim", "grid", "tol", "format", "scenario", "trials",
            "n_max", "kind", "count", "dim_min", "dim_max", "grids", "word", "combination")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _human(doc, indent=0):
    lines = []
    pad = "  " * indent
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_human(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}: [{len(value)} rows]")
            for row in value[:12]:
                lines.append(f"{pad}  " + ", ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
        else:
            lines.append(f"{pad}{key}: {_fmt(value)}")
    return lines


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 12:
        return f"[{', '.join(_fmt(x) for x in v[:12])}, ...] ({len(v)} values)"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, np.ndarray):
        return f"<{v.shape[0]}x{v.shape[1]} matrix>"
    return str(v)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ok, body = COMMANDS[args.command](args)
        status = EXIT_OK if ok else EXIT_VIOLATION
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InvariantViolation, NoConvergence) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except TwoProjError as exc:  # pragma: no cover - every subclass is handled above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    doc = {"config": _config(args), "passed": ok, **body}
    if args.format == "structured":
        _emit(dumps(doc), args.out)
    else:
        _emit("\n".join(_human(doc)) + "\n", args.out)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
