"""Command line front end: ``snpsvm {encode,train,split,predict,simulate}``.

Exit codes: 0 success, 2 usage or flag errors, 3 parse/schema errors,
4 solver non-convergence (the best iterate is still written).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path


from . import fileio
from .errors import DegenerateModelError, SchemaError, UsageError
from .genotype import DiffTable, encode_cohort
from .splitter import SplitConfig, classify_by_tree, depth, leaves, split_recursive
from .svm import SvmConfig, decision_values, geometric_margin, normalized_hyperplane, train
from .synth import SynthConfig, generate_cohort, split_cohort

EXIT_OK, EXIT_USAGE, EXIT_SCHEMA, EXIT_NONCONVERGED = 0, 2, 3, 4


class NotConverged(Exception):
    pass


def _diff_table(args) -> DiffTable:
    return DiffTable(args.diff_wwwm, args.diff_wmmm, args.diff_wwmm)


def load_features(args, diff_table=None) -> fileio.FeatureTable:
    """Feature rows from --features, or encoded from --cohort against --panel."""
    if args.features:
        if args.cohort:
            raise UsageError("give either --features or --cohort, not both")
        return fileio.loads_features(fileio.read_text(args.features))
    if not args.cohort:
        raise UsageError("one of --features or --cohort is required")
    if not args.panel:
        raise UsageError("--cohort requires --panel")
    cohort = fileio.loads_cohort(fileio.read_text(args.cohort))
    panel = fileio.loads_panel(fileio.read_text(args.panel))
    table = diff_table if diff_table is not None else _diff_table(args)
    X = encode_cohort(cohort, panel, table)
    return fileio.FeatureTable(tuple(cohort.sample_ids), tuple(cohort.labels), panel.snps, X)


def cmd_encode(args, out=None) -> int:
    out = out or sys.stdout
    if args.features:
        raise UsageError("encode reads genotypes; use --cohort and --panel")
    table = load_features(args)
    fileio.write_text(args.out, fileio.dumps_features(table))
    print(f"encoded {len(table.sample_ids)} samples x {len(table.names)} SNPs -> {args.out}", file=out)
    return EXIT_OK


def cmd_train(args, out=None) -> int:
    out = out or sys.stdout
    table = load_features(args)
    ids, X, y = table.labelled()
    config = SvmConfig(C=args.c, kkt_tolerance=args.tol, max_passes=args.max_passes, seed=args.seed)
    model, diag = train(X, y, config)
    doc = fileio.ModelDocument(table.names, model, ids, _diff_table(args))
    fileio.write_text(args.out, fileio.dumps_model(doc))
    print(f"samples            {len(ids)}", file=out)
    print(f"dual objective     {diag.dual_objective:.12g}", file=out)
    print(f"primal objective   {diag.primal_objective:.12g}", file=out)
    print(f"slack sum          {diag.slack_sum:.12g}", file=out)
    print(f"max KKT violation  {diag.max_kkt_violation:.3e}", file=out)
    print(f"iterations         {diag.iterations}", file=out)
    print(f"support vectors    {len(model.support_indices)}", file=out)
    try:
        print(f"geometric margin   {geometric_margin(model):.12g}", file=out)
        u, c = normalized_hyperplane(model)
        terms = " + ".join(f"{fileio.fmt(round(float(v), 12))}*{name}" for v, name in zip(u, table.names))
        print(f"hyperplane         {terms} + {fileio.fmt(round(c, 12))} = 0", file=out)
    except DegenerateModelError:
        print("geometric margin   undefined (w = 0)", file=out)
    for note in diag.notes:
        print(f"note               {note}", file=out)
    if not diag.converged:
        raise NotConverged(f"solver stopped after {diag.iterations} iterations "
                           f"with KKT violation {diag.max_kkt_violation:.3e}")
    return EXIT_OK


def cmd_split(args, out=None) -> int:
    out = out or sys.stdout
    table = load_features(args)
    ids, X, y = table.labelled()
    if len(ids) == 0:
        raise UsageError("no labelled samples to split")
    config = SplitConfig(args.tau, args.min_size, args.max_depth,
                         SvmConfig(C=args.c, kkt_tolerance=args.tol, seed=args.seed))
    tree = split_recursive(X, y, config)
    fileio.write_text(args.out, fileio.dumps_tree(fileio.TreeDocument(table.names, tree, ids, _diff_table(args))))
    found = leaves(tree)
    print(f"{len(found)} leaves, depth {depth(tree)}", file=out)
    for k, leaf in enumerate(found, start=1):
        center = ",".join(f"{v:.6g}" for v in leaf.center)
        print(f"leaf {k}: status={leaf.status.value} label={fileio.label_token(leaf.majority_label)} "
              f"purity={leaf.purity:.4f} size={len(leaf.indices)} center=({center}) "
              f"radius={leaf.radius:.6g}", file=out)
    return EXIT_OK


def _align(table, expected):
    """Permute feature columns into the model's SNP order when they are a reordering of it."""
    if table.names != tuple(expected) and sorted(table.names) == sorted(expected):
        order = [table.names.index(s) for s in expected]
        return fileio.FeatureTable(table.sample_ids, table.labels, tuple(expected), table.X[:, order])
    _check_names(expected, table.names)
    return table


def _check_names(expected, got):
    for a, b in zip(expected, got):
        if a != b:
            raise SchemaError(f"SNP {b!r} does not match model SNP {a!r}")
    if len(expected) != len(got):
        raise SchemaError(f"model expects {len(expected)} SNPs, input has {len(got)}")


def cmd_predict(args, out=None) -> int:
    out = out or sys.stdout
    text = fileio.read_text(args.model)
    if text.startswith(fileio.MODEL_HEADER):
        doc = fileio.loads_model(text)
        table = _align(load_features(args, doc.diff_table), doc.snps)
        scores = decision_values(doc.model, table.X)
        labels = [1 if s >= 0 else -1 for s in scores]
        fileio.write_text(args.out, fileio.dumps_predictions(table.sample_ids, labels, scores))
    else:
        doc = fileio.loads_tree(text)
        table = _align(load_features(args, doc.diff_table), doc.snps)
        routed = [classify_by_tree(doc.tree, x) for x in table.X]
        fileio.write_text(args.out, fileio.dumps_predictions(
            table.sample_ids, [r[0] for r in routed], [r[1] for r in routed], [r[2] for r in routed]))
    print(f"predicted {len(table.sample_ids)} samples -> {args.out}", file=out)
    return EXIT_OK


def cmd_simulate(args, out=None) -> int:
    out = out or sys.stdout
    if not 0.0 <= args.holdout < 1.0:
        raise UsageError(f"--holdout must lie in [0, 1), got {args.holdout}")
    config = SynthConfig(args.n_snps, args.n_causal, args.n_cases, args.n_controls, args.n_panel,
                         args.effect, args.base_maf, args.seed)
    cohort, panel, truth = generate_cohort(config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    fileio.write_text(outdir / "cohort.csv", fileio.dumps_cohort(cohort))
    fileio.write_text(outdir / "panel.csv", fileio.dumps_panel(panel))
    fileio.write_text(outdir / "truth.txt", "".join(f"{s}\n" for s in cohort.snps if s in truth))
    written = ["cohort.csv", "panel.csv", "truth.txt"]
    if args.holdout > 0:
        train_part, test_part = split_cohort(cohort, args.holdout, args.seed)
        fileio.write_text(outdir / "train.csv", fileio.dumps_cohort(train_part))
        fileio.write_text(outdir / "test.csv", fileio.dumps_cohort(test_part))
        written += ["train.csv", "test.csv"]
    print(f"wrote {', '.join(written)} to {outdir}", file=out)
    return EXIT_OK


def _positive_float(flag):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        if not value > 0 or math.isnan(value):
            raise argparse.ArgumentTypeError(f"{flag} must be positive, got {text!r}")
        return value
    return parse


def _positive_int(flag):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}") from None
        if value < 1:
            raise argparse.ArgumentTypeError(f"{flag} must be a positive integer, got {text!r}")
        return value
    return parse


def _unit_float(flag, low_open=False):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        if not (0.0 < value if low_open else 0.0 <= value) or not value <= 1.0:
            raise argparse.ArgumentTypeError(f"{flag} out of range: {text!r}")
        return value
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snpsvm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p):
        p.add_argument("--cohort", help="cohort CSV (sample_id,label,<snp ids>)")
        p.add_argument("--panel", help="reference panel CSV (snp_id,n_ww,n_wm,n_mm)")
        p.add_argument("--features", help="pre-encoded feature CSV instead of --cohort/--panel")
        p.add_argument("--diff-wwwm", type=_unit_float("--diff-wwwm"), default=0.25)
        p.add_argument("--diff-wmmm", type=_unit_float("--diff-wmmm"), default=0.75)
        p.add_argument("--diff-wwmm", type=_unit_float("--diff-wwmm"), default=1.0)

    def solver(p):
        p.add_argument("--c", type=_positive_float("--c"), default=1.0,
                       help="box bound C; 'inf' for the hard margin")
        p.add_argument("--tol", type=_positive_float("--tol"), default=1e-6)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("encode", help="encode genotypes as difference-score features")
    inputs(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("train", help="train a linear SVM and write a model file")
    inputs(p)
    solver(p)
    p.add_argument("--max-passes", type=_positive_int("--max-passes"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("split", help="recursively split an inseparable cohort")
    inputs(p)
    solver(p)
    p.add_argument("--tau", type=float, default=0.8, help="purity threshold in (0.5, 1]")
    p.add_argument("--min-size", type=_positive_int("--min-size"), default=3)
    p.add_argument("--max-depth", type=_positive_int("--max-depth"), default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("predict", help="apply a model or tree file to new samples")
    inputs(p)
    p.add_argument("--model", required=True, help="model file or tree JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="generate a synthetic cohort, panel and truth file")
    p.add_argument("--n-snps", type=_positive_int("--n-snps"), default=10)
    p.add_argument("--n-causal", type=int, default=2)
    p.add_argument("--n-cases", type=_positive_int("--n-cases"), default=200)
    p.add_argument("--n-controls", type=_positive_int("--n-controls"), default=200)
    p.add_argument("--n-panel", type=_positive_int("--n-panel"), default=500)
    p.add_argument("--effect", type=_unit_float("--effect"), default=0.6)
    p.add_argument("--base-maf", type=_unit_float("--base-maf", low_open=True), default=0.1)
    p.add_argument("--seed", type=int, default=SynthConfig.seed)
    p.add_argument("--holdout", type=float, default=0.0, help="also write train.csv/test.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as exc:
        print(f"snpsvm: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except SchemaError as exc:
        print(f"snpsvm: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (UsageError, FileNotFoundError) as exc:
        print(f"snpsvm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
