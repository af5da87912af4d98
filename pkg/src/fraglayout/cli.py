"""Command-line front end: shear, run, bench, matrix, compare.

Exit codes are a stable contract: 0 on success, 64 for usage errors, 2 for
domain or I/O errors. Output files are the machine interface; stdout is for
humans.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .bench import BenchDataset, emit_outputs, make_ztests, run_grid
from .errors import FraglayoutError, ParseError
from .fragments import read_fragments, shear_reference, write_fasta
from .swarm import Variant, default_config, run

EX_OK = 0
EX_DOMAIN = 2
EX_USAGE = 64

OUT_DIR_ENV = "FRAGLAYOUT_OUT"

_VARIANT_NAMES = [v.value for v in Variant]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 64 instead of argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_reads_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--take", type=int, default=None, metavar="K",
                     help="keep only the first K reads (desk-scale subsampling)")
    sub.add_argument("--format", choices=["auto", "fasta", "fastq"], default="auto")


def _add_config_overrides(sub: argparse.ArgumentParser) -> None:
    grp = sub.add_argument_group("variant parameters (defaults follow the benchmark protocol)")
    for flag, kind in [
        ("--c1-start", float), ("--c1-end", float),
        ("--c2-start", float), ("--c2-end", float),
        ("--w-const", float), ("--w-hi", float), ("--w-lo", float),
        ("--max-stagnancy", int), ("--levy-lambda", float), ("--levy-scale", float),
        ("--v-max", float), ("--apso-alpha", float), ("--apso-beta", float),
    ]:
        grp.add_argument(flag, type=kind, default=None)


def _collect_overrides(args: argparse.Namespace) -> dict:
    from .stochastic import LevyConfig

    overrides = {}
    for attr in ("c1_start", "c1_end", "c2_start", "c2_end", "w_const",
                 "w_hi", "w_lo", "max_stagnancy", "v_max", "apso_alpha", "apso_beta"):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[attr] = value
    lam, scale = getattr(args, "levy_lambda", None), getattr(args, "levy_scale", None)
    if lam is not None or scale is not None:
        levy = LevyConfig(
            lam=lam if lam is not None else 1.5,
            step_scale=scale if scale is not None else 0.1,
        )
        overrides["levy"] = levy
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fraglayout",
                     description="Layout-stage fragment assembly with particle swarm variants.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    shear = subs.add_parser("shear", help="cut a reference into overlapping shuffled reads")
    shear.add_argument("--reference", required=True, help="FASTA/FASTQ file; first record is used")
    shear.add_argument("--count", type=int, required=True)
    shear.add_argument("--mean-length", type=int, required=True)
    shear.add_argument("--min-overlap", type=int, default=0)
    shear.add_argument("--seed", type=int, default=0)
    shear.add_argument("--out", required=True, help="output FASTA; a .truth.json sidecar is written next to it")
    shear.set_defaults(func=cmd_shear)

    runp = subs.add_parser("run", help="one optimization trial over a reads file")
    runp.add_argument("--reads", required=True)
    _add_reads_options(runp)
    runp.add_argument("--variant", choices=_VARIANT_NAMES, required=True)
    runp.add_argument("--iters", type=int, default=50)
    runp.add_argument("--pop", type=int, default=10)
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--out", default=None, help="write the run trace as JSON")
    _add_config_overrides(runp)
    runp.set_defaults(func=cmd_run)

    bench = subs.add_parser("bench", help="variant x dataset grid with statistics")
    bench.add_argument("--reads", required=True, nargs="+", metavar="FILE")
    _add_reads_options(bench)
    bench.add_argument("--variants", default="all",
                       help="comma-separated variant names, or 'all'")
    bench.add_argument("--trials", type=int, default=10)
    bench.add_argument("--iters", type=int, default=50)
    bench.add_argument("--pop", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    bench.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} or ./bench_out)")
    _add_config_overrides(bench)
    bench.set_defaults(func=cmd_bench)

    matrix = subs.add_parser("matrix", help="dump the pairwise overlap matrix as CSV")
    matrix.add_argument("--reads", required=True)
    _add_reads_options(matrix)
    matrix.add_argument("--out", required=True)
    matrix.set_defaults(func=cmd_matrix)

    compare = subs.add_parser("compare", help="rank variants across saved bench reports")
    compare.add_argument("--reports", required=True, help="directory searched for report.json files")
    compare.set_defaults(func=cmd_compare)
    return parser


def cmd_shear(args: argparse.Namespace) -> int:
    reference = read_fragments(args.reference)[0]
    result = shear_reference(reference, args.count, args.mean_length,
                             args.min_overlap, args.seed)
    with open(args.out, "w", encoding="utf-8") as handle:
        write_fasta(result.fragments, handle)
    sidecar = {
        "true_order": result.true_order,
        "seed": result.seed,
        "fragment_count": args.count,
        "mean_length": args.mean_length,
        "min_overlap": args.min_overlap,
        "reference_length": len(reference),
    }
    sidecar_path = args.out + ".truth.json"
    with open(sidecar_path, "w", encoding="utf-8") as handle:
        json.dump(sidecar, handle, indent=2)
        handle.write("\n")
    print(f"wrote {result.fragments.size} reads to {args.out}")
    print(f"wrote ground truth to {sidecar_path}")
    return EX_OK


def cmd_run(args: argparse.Namespace) -> int:
    fragments = read_fragments(args.reads, args.format, args.take)
    dataset = BenchDataset.from_fragments(Path(args.reads).name, fragments)
    cfg = default_config(args.variant, max_itr=args.iters, population=args.pop,
                         **_collect_overrides(args))
    trace = run(cfg, dataset.fragments, dataset.matrix, args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(trace.to_dict(), handle, indent=2)
            handle.write("\n")
    print(f"best fitness: {trace.best_fitness}")
    print(f"permutation length: {len(trace.best_permutation)}")
    return EX_OK


def _parse_variants(spec: str, parser_error) -> list[Variant]:
    if spec.strip().lower() == "all":
        return list(Variant)
    variants = []
    for name in spec.split(","):
        name = name.strip()
        if name not in _VARIANT_NAMES:
            parser_error(f"unknown variant {name!r}; valid names: {', '.join(_VARIANT_NAMES)}")
        variants.append(Variant(name))
    return variants


def cmd_bench(args: argparse.Namespace) -> int:
    out_dir = args.out or os.environ.get(OUT_DIR_ENV) or "bench_out"
    variants = args._variants
    datasets = [
        BenchDataset.from_fragments(Path(path).name,
                                    read_fragments(path, args.format, args.take))
        for path in args.reads
    ]
    reports, failures = run_grid(
        datasets, variants, args.trials, args.seed,
        iters=args.iters, population=args.pop, jobs=args.jobs,
        config_overrides=_collect_overrides(args),
    )
    ztests = make_ztests(reports)
    paths = emit_outputs(reports, ztests, out_dir, master_seed=args.seed)
    if failures:
        failures_path = Path(out_dir) / "failures.csv"
        with open(failures_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["dataset", "variant", "error"])
            writer.writerows([f.dataset_label, f.variant.value, f.error] for f in failures)
        print(f"warning: {len(failures)} cell(s) failed; see {failures_path}", file=sys.stderr)
    for report in reports:
        print(f"{report.dataset_label} {report.variant.value}: "
              f"mean={report.mean:.2f} sd={report.sd:.2f} best={report.best} worst={report.worst}")
    print(f"outputs in {Path(out_dir).resolve()}")
    if not reports:
        print("error: every grid cell failed", file=sys.stderr)
        return EX_DOMAIN
    return EX_OK


def cmd_matrix(args: argparse.Namespace) -> int:
    fragments = read_fragments(args.reads, args.format, args.take)
    from .fragments import build_overlap_matrix

    matrix = build_overlap_matrix(fragments)
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerows(matrix.cells.tolist())
    print(f"wrote {matrix.dim}x{matrix.dim} overlap matrix to {args.out}")
    return EX_OK


def cmd_compare(args: argparse.Namespace) -> int:
    rows = []
    for path in sorted(Path(args.reports).rglob("report.json")):
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        for report in payload.get("reports", []):
            rows.append((report["dataset"], report["variant"], report["mean"],
                         report["sd"], report["best"], report["worst"]))
    if not rows:
        raise ParseError(f"no reports found under {args.reports}")
    rows.sort(key=lambda r: -r[2])
    print(f"{'dataset':<24} {'variant':<8} {'mean':>12} {'sd':>12} {'best':>8} {'worst':>8}")
    for dataset, variant, mean, sd, best, worst in rows:
        print(f"{dataset:<24} {variant:<8} {mean:>12.2f} {sd:>12.2f} {best:>8} {worst:>8}")
    return EX_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench":
        args._variants = _parse_variants(args.variants, parser.error)
    try:
        return args.func(args)
    except FraglayoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
