"""Command-line front end.

Subcommands: ``decode`` (hypothesis selection over a JSONL corpus),
``decompose`` (per-instance error decomposition), ``correlate`` (measure vs
performance correlations), ``scale`` (subsampled-decoding curves), and
``info`` (discrete-joint property checks).  JSONL in, JSONL/CSV out; instances
are processed one at a time so memory stays bounded by a single instance.

Exit codes: 0 success, 1 validation error, 2 I/O error.  Diagnostics go to
stderr, data to files or stdout.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import IO, Sequence

from . import analysis, decomposition, infotheory, metrics
from .core import DecodingInstance, build_score_matrix, QualityVector, read_instances, row_mean
from .decode import importance_weights, mambr_decode, mbr_decode, weighted_mbr

IDENTITY_TOL = 1e-9


class UsageError(ValueError):
    """Bad flags or flag combinations."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage problems to exit code 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mbrkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, input_required=True):
        if input_required:
            p.add_argument("--input", required=True, help="input JSONL path")
        p.add_argument("--output", default=None, help="output path (default: stdout)")

    def add_metric(p):
        p.add_argument(
            "--metric",
            choices=["token_f1", "chrf", "bleu", "tabular"],
            default="chrf",
            help="utility function (default: chrf)",
        )
        p.add_argument("--tabular", default=None, help="CSV of precomputed scores")

    p = sub.add_parser("decode", help="select hypotheses by consensus utility")
    add_io(p)
    add_metric(p)
    p.add_argument(
        "--weights",
        choices=["uniform", "from_instance", "importance"],
        default="uniform",
        help="reference weighting mode (default: uniform)",
    )
    p.add_argument(
        "--mambr-table",
        action="append",
        default=[],
        metavar="PATH",
        help="additional tabular score CSV; repeatable; matrices are averaged",
    )
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decompose", help="bias/diversity decomposition per instance")
    add_io(p)
    add_metric(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("correlate", help="correlate measures against performance")
    add_io(p)

    p = sub.add_parser("scale", help="subsampled decoding performance curve")
    add_io(p)
    add_metric(p)
    p.add_argument("--sizes", default="4,8,16,32,64", help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("info", help="property checks on a discrete joint")
    p.add_argument("--joint", required=True, help="joint distribution JSON path")
    p.add_argument(
        "--check",
        choices=["identity", "bounds", "submodularity", "supermodularity",
                 "monotonicity", "all"],
        default="all",
    )
    p.add_argument("--output", default=None, help="output path (default: stdout)")

    return parser


@contextlib.contextmanager
def _open_output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _load_utility(args):
    if args.metric == "tabular":
        if not args.tabular:
            raise UsageError("--metric tabular requires --tabular PATH")
        with open(args.tabular, encoding="utf-8") as handle:
            return metrics.read_tabular_csv(handle)
    return metrics.get_metric(args.metric)


def _instance_weights(instance: DecodingInstance, mode: str):
    if mode == "uniform":
        return None
    if mode == "from_instance":
        if instance.sample_weights is None:
            raise ValueError(f"instance {instance.id!r} has no weights")
        return list(instance.sample_weights)
    if instance.target_probs is None or instance.proposal_probs is None:
        raise ValueError(
            f"instance {instance.id!r} needs target_probs and proposal_probs "
            "for importance weighting"
        )
    return importance_weights(instance.target_probs, instance.proposal_probs)


def _cmd_decode(args) -> int:
    utility = _load_utility(args)
    extra_tables = []
    for path in args.mambr_table:
        with open(path, encoding="utf-8") as handle:
            extra_tables.append(metrics.read_tabular_csv(handle))
    if extra_tables and args.weights != "uniform":
        raise UsageError("--mambr-table requires uniform weights")
    print(f"decode: metric={args.metric} weights={args.weights} seed={args.seed}",
          file=sys.stderr)

    with open(args.input, encoding="utf-8") as instream, _open_output(args.output) as out:
        for instance in read_instances(instream):
            matrix = build_score_matrix(instance, utility, reference_set="pseudo")
            if extra_tables:
                matrices = [matrix] + [
                    build_score_matrix(instance, table, reference_set="pseudo")
                    for table in extra_tables
                ]
                result = mambr_decode(matrices)
            else:
                weights = _instance_weights(instance, args.weights)
                result = mbr_decode(matrix) if weights is None else weighted_mbr(matrix, weights)
            out.write(json.dumps({
                "id": instance.id,
                "selected_index": result.selected_index,
                "selected_text": instance.hypotheses[result.selected_index],
                "selected_score": result.selected_score,
                "tie_count": result.tie_count,
            }) + "\n")
    return 0


_REPORT_FIELDS = (
    "mse", "bias", "diversity",
    "one_best_bias", "one_best_diversity", "one_best_mse",
)
_BROWN_FIELDS = ("bias_bar", "var_bar", "cov_bar", "omega", "bias_eq10", "diversity_eq10")


def _cmd_decompose(args) -> int:
    utility = _load_utility(args)
    sums = {name: 0.0 for name in _REPORT_FIELDS}
    pseudo_sum, pseudo_count, count = 0.0, 0, 0

    csv_path = None if args.output is None else args.output + ".csv"
    csv_handle: IO[str] | None = None
    try:
        if csv_path is not None:
            csv_handle = open(csv_path, "w", encoding="utf-8")
            csv_handle.write(
                "id," + ",".join(_REPORT_FIELDS) + ",one_best_index,pseudo_bias,"
                + ",".join(_BROWN_FIELDS) + "\n"
            )
        with open(args.input, encoding="utf-8") as instream, _open_output(args.output) as out:
            for instance in read_instances(instream):
                matrix = build_score_matrix(instance, utility, reference_set="pseudo")
                gold_matrix = None
                if instance.gold_references is not None:
                    gold_matrix = build_score_matrix(instance, utility, reference_set="gold")
                if instance.human_scores is not None:
                    human = QualityVector(instance.human_scores, kind="human")
                    source = "human"
                elif gold_matrix is not None:
                    human = QualityVector(row_mean(gold_matrix).values, kind="gold_mean")
                    source = "gold_mean"
                else:
                    raise ValueError(
                        f"instance {instance.id!r} has neither human scores nor "
                        "gold references"
                    )
                report = decomposition.decompose_report(human, matrix, gold_matrix)

                obj = {"id": instance.id}
                obj.update({name: getattr(report, name) for name in _REPORT_FIELDS})
                obj["one_best_index"] = report.one_best_index
                obj["pseudo_bias"] = report.pseudo_bias
                obj["brown"] = {name: getattr(report.brown, name) for name in _BROWN_FIELDS}
                obj["brown"]["cov_defined"] = report.brown.cov_defined
                obj["quality_source"] = source
                out.write(json.dumps(obj) + "\n")

                if csv_handle is not None:
                    row = [instance.id]
                    row += [repr(getattr(report, name)) for name in _REPORT_FIELDS]
                    row.append(str(report.one_best_index))
                    row.append("" if report.pseudo_bias is None else repr(report.pseudo_bias))
                    row += [repr(getattr(report.brown, name)) for name in _BROWN_FIELDS]
                    csv_handle.write(",".join(row) + "\n")

                for name in _REPORT_FIELDS:
                    sums[name] += getattr(report, name)
                if report.pseudo_bias is not None:
                    pseudo_sum += report.pseudo_bias
                    pseudo_count += 1
                count += 1

            if count == 0:
                raise ValueError("no instances in input")
            summary = {
                "summary": True,
                "instances": count,
                "seed": args.seed,
                "corpus_means": {name: sums[name] / count for name in _REPORT_FIELDS},
            }
            if pseudo_count:
                summary["corpus_means"]["pseudo_bias"] = pseudo_sum / pseudo_count
            out.write(json.dumps(summary) + "\n")
    finally:
        if csv_handle is not None:
            csv_handle.close()
    return 0


def _cmd_correlate(args) -> int:
    series = []
    with open(args.input, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                series.append(analysis.MeasureSeries(
                    label=obj["label"],
                    values=tuple(obj["values"]),
                    sign_convention=obj.get("sign_convention"),
                    dataset=obj.get("dataset", "default"),
                ))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
    rows = analysis.correlation_report(series)
    with _open_output(args.output) as out:
        out.write(analysis.correlation_csv(rows))
    return 0


def _cmd_scale(args) -> int:
    utility = _load_utility(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --sizes value {args.sizes!r}: {exc}") from exc
    with open(args.input, encoding="utf-8") as instream:
        curve = analysis.scaling_harness(
            read_instances(instream), utility, sizes, args.trials, seed=args.seed
        )
    with _open_output(args.output) as out:
        out.write(analysis.scaling_csv(curve))
    return 0


def _violation_obj(v: infotheory.PropertyViolation) -> dict:
    return {
        "function": v.function,
        "kind": v.kind,
        "subset_small": list(v.subset_small),
        "subset_large": list(v.subset_large),
        "added": v.added,
        "gain_small": v.gain_small,
        "gain_large": v.gain_large,
    }


def _cmd_info(args) -> int:
    with open(args.joint, encoding="utf-8") as handle:
        joint = infotheory.load_joint(handle)
    names = (
        ["identity", "bounds", "submodularity", "supermodularity", "monotonicity"]
        if args.check == "all"
        else [args.check]
    )
    checks = []
    for name in names:
        if name == "identity":
            report = infotheory.decompose_mi(joint)
            residual = abs(
                report.mi - (report.relevancy + report.cond_redundancy - report.redundancy)
            )
            checks.append({"check": name, "ok": residual <= IDENTITY_TOL,
                           "residual": residual})
        elif name == "bounds":
            report = infotheory.decompose_mi(joint)
            ok = (report.lower_bound <= report.bayes_error + IDENTITY_TOL
                  and report.bayes_error <= report.upper_bound + IDENTITY_TOL)
            checks.append({
                "check": name, "ok": ok,
                "lower_bound": report.lower_bound,
                "bayes_error": report.bayes_error,
                "upper_bound": report.upper_bound,
            })
        elif name in ("submodularity", "supermodularity"):
            fn = (infotheory.submodularity_check if name == "submodularity"
                  else infotheory.supermodularity_check)
            result = fn(joint)
            checks.append({
                "check": name, "ok": result.ok,
                "triples": result.n_modularity_triples,
                "violations": [_violation_obj(v) for v in result.violations],
            })
        else:
            steps = infotheory.monotonicity_scan(joint, range(joint.n_vars))
            checks.append({
                "check": name, "ok": True,
                "steps": [{"added": s.added, "deltas": s.deltas} for s in steps],
            })
    ok = all(c["ok"] for c in checks)
    with _open_output(args.output) as out:
        out.write(json.dumps({"ok": ok, "checks": checks}) + "\n")
    return 0 if ok else 1


_COMMANDS = {
    "decode": _cmd_decode,
    "decompose": _cmd_decompose,
    "correlate": _cmd_correlate,
    "scale": _cmd_scale,
    "info": _cmd_info,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"mbrkit: i/o error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"mbrkit: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
