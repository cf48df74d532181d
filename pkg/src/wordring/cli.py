"""Command-line interface.

Exit codes: 0 on success, 1 for bad input (unreadable or malformed files,
invalid flags), 2 for internal errors.
"""

import argparse
import json
import sys
from pathlib import Path

from . import data as datafiles
from . import inference, report
from .errors import InputError
from .ring import Order

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

FIT_FAMILIES = inference.PLUGIN_FAMILIES + ("model1_trunc_exp",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_inputs(p):
    p.add_argument("--dataset", help="pair-count file (default: built-in 67-language table)")
    p.add_argument("--frequencies", help="dominant-order count file (default: shipped atlas counts)")


def _add_output(p, formats):
    p.add_argument("--format", choices=formats, default="text")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser():
    parser = _Parser(prog="wordring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="fit and rank all models")
    _add_inputs(p)
    _add_output(p, report.FORMATS)
    p.add_argument("--sort", choices=tuple(inference.SORT_KEYS), default="bic")
    p.add_argument("--include-reduced", action="store_true",
                   help="add the truncated-exponential Model 1 and the p_ov = 1/2 Model 2")
    p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("fit", help="plug-in estimates for one model family")
    p.add_argument("family", choices=FIT_FAMILIES)
    p.add_argument("--dataset")
    p.add_argument("--grid", type=float, metavar="RES",
                   help="verify the plug-in fit by grid search at this resolution")
    _add_output(p, ("text", "json"))

    p = sub.add_parser("ring", help="permutation ring, distances and displacement correlation")
    p.add_argument("--base", default="SOV", help="base order for the displacement table")
    _add_output(p, ("text", "json"))

    p = sub.add_parser("report", help="full analysis bundle")
    _add_inputs(p)
    _add_output(p, report.FORMATS)
    p.add_argument("--sort", choices=tuple(inference.SORT_KEYS), default="bic")
    p.add_argument("--include-reduced", action="store_true")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--base", default="SOV")
    return parser


def _load_data(args):
    if args.dataset:
        return datafiles.read_pair_counts(args.dataset), args.dataset
    return datafiles.canonical_dataset(), "canonical"


def _load_freqs(args):
    if args.frequencies:
        return datafiles.read_dominant_frequencies(args.frequencies), args.frequencies
    return datafiles.reference_frequencies(), f"reference ({datafiles.REFERENCE_FREQUENCIES_FILE})"


def _emit(text, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _analysis(args, full):
    data, dataset = _load_data(args)
    freqs, frequencies = _load_freqs(args)
    evaluations = inference.evaluate_all(data, freqs, args.include_reduced, args.sort)
    kwargs = dict(dataset=dataset, frequencies=frequencies, sort=args.sort, stamp=not args.no_timestamp)
    if full:
        return report.full_document(evaluations, data, base=Order.parse(args.base), **kwargs)
    return report.evaluation_document(evaluations, data, **kwargs)


def cmd_evaluate(args):
    _emit(report.render(_analysis(args, full=False), args.format), args.output)


def cmd_report(args):
    _emit(report.render(_analysis(args, full=True), args.format), args.output)


def _fit_document(args):
    data, dataset = _load_data(args)
    doc = {"family": args.family, "dataset": dataset, "m": data.total, "n": data.n}
    if args.family in inference.PLUGIN_FAMILIES:
        params = inference.plugin_fit(args.family, data)
        model = inference.build_model(args.family, params)
        doc["plugin"] = {"params": params, "loglik": inference.log_likelihood(model, data)}
    resolution = args.grid
    if resolution is None and args.family not in inference.PLUGIN_FAMILIES:
        resolution = inference.TRUNC_EXP_RESOLUTION
    if resolution is not None:
        g = inference.grid_search(args.family, data, resolution)
        doc["grid"] = {
            "resolution": g.resolution,
            "points": g.points,
            "params": g.params,
            "loglik": g.loglik,
            "improved_over_plugin": g.improved_over_plugin,
        }
    return doc


def _fit_text(doc):
    lines = [f"{doc['family']} fitted to {doc['dataset']} (m = {doc['m']}, n = {doc['n']})"]
    if "plugin" in doc:
        lines.append("plug-in estimates:")
        lines += [f"  {k} = {v:.2f}" for k, v in doc["plugin"]["params"].items()]
        lines.append(f"  L = {doc['plugin']['loglik']:.1f}")
    if "grid" in doc:
        g = doc["grid"]
        where = " ".join(f"{k}={v:.4f}" for k, v in g["params"].items())
        lines.append(f"grid search: resolution {g['resolution']:g}, {g['points']} points")
        lines.append(f"  best L = {g['loglik']:.4f} at {where}")
        if "plugin" in doc:
            if g["improved_over_plugin"]:
                gain = g["loglik"] - doc["plugin"]["loglik"]
                lines.append(f"  verdict: grid search improves on plug-in (L higher by {gain:.4f})")
            else:
                lines.append("  verdict: no improvement over plug-in")
    return "\n".join(lines) + "\n"


def cmd_fit(args):
    doc = _fit_document(args)
    text = json.dumps(doc, indent=2) + "\n" if args.format == "json" else _fit_text(doc)
    _emit(text, args.output)


def cmd_ring(args):
    section = report.ring_section(Order.parse(args.base))
    if args.format == "json":
        text = json.dumps(section, indent=2) + "\n"
    else:
        text = "\n".join(report.ring_text(section)) + "\n"
    _emit(text, args.output)


COMMANDS = {"evaluate": cmd_evaluate, "fit": cmd_fit, "ring": cmd_ring, "report": cmd_report}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
