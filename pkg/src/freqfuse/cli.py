"""Command-line entry point: ``freqfuse {transform,fuse,eval,bench,synth}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .bench import DEFAULT_DIMS, bench_lowpass, format_table, results_to_json
from .episodes import EvalReport, format_accuracy
from .fusion import Combine, FusionParams, preprocess
from .harness import ConfigError, ImageLoadError, load_config, run_experiment, thread_count
from .imageio import PixelImage, from_unit_interval, load_pnm, save_pnm, to_grayscale, write_pnm
from .lowpass import LowpassParams, Strategy
from .specfile import load_spectrum, save_spectrum
from .transform import ScalingMode, dct2_forward, dct2_inverse

log = logging.getLogger("freqfuse")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

PNM_SUFFIXES = (".pgm", ".ppm", ".pnm")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive: {text!r}")
    return h, w


def _ratio(text: str) -> float:
    r = float(text)
    if not 0.0 <= r <= 1.0:
        raise argparse.ArgumentTypeError(f"--r must lie in [0, 1], got {text}")
    return r


def _nonneg(text: str) -> float:
    k = float(text)
    if not k >= 0.0:
        raise argparse.ArgumentTypeError(f"--k must be non-negative, got {text}")
    return k


def _workers() -> int:
    try:
        return thread_count()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_image(path: Path) -> PixelImage:
    try:
        return load_pnm(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from None


# --- transform ----------------------------------------------------------

def cmd_transform(args) -> int:
    mode = ScalingMode.parse(args.mode)
    if args.inverse:
        try:
            spectrum = load_spectrum(args.input)
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read spectrum {args.input}: {exc}") from None
        try:
            image = dct2_inverse(spectrum, mode)
        except ValueError as exc:
            raise DataError(str(exc)) from None
        data = write_pnm(from_unit_interval(image))
    else:
        gray = to_grayscale(_read_image(Path(args.input)))
        spectrum = dct2_forward(gray, mode)
        data = None
    try:
        if data is None:
            save_spectrum(spectrum, args.output)
        else:
            Path(args.output).write_bytes(data)
    except OSError as exc:
        raise DataError(f"cannot write {args.output}: {exc}") from None
    return EXIT_OK


# --- fuse ---------------------------------------------------------------

def _collect_inputs(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in PNM_SUFFIXES)
        if not files:
            raise DataError(f"no .pgm/.ppm files in {path}")
        return files
    if not path.exists():
        raise DataError(f"input {path} does not exist")
    return [path]


def cmd_fuse(args) -> int:
    params = FusionParams(
        LowpassParams(Strategy(args.strategy), args.r, args.k),
        Combine(args.combine),
        ScalingMode.parse(args.mode),
    )
    workers = _workers()
    inputs = _collect_inputs(Path(args.input))

    images, failures = {}, []
    for path in inputs:
        try:
            images[path] = load_pnm(path)
        except (OSError, ValueError) as exc:
            failures.append(f"{path}: {exc}")
    if failures:
        raise DataError("unreadable inputs, nothing written:\n  " + "\n  ".join(failures))

    out_dir = Path(args.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out_dir}: {exc}") from None

    def work(path):
        fused = from_unit_interval(preprocess(images[path], params))
        target = out_dir / path.name
        save_pnm(fused, target)
        return target

    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(work, inputs))
    except OSError as exc:
        raise DataError(f"cannot write output: {exc}") from None

    provenance = {
        "tool": f"freqfuse {__version__}",
        "params": params.as_dict(),
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
    }
    (out_dir / "provenance.json").write_text(
        json.dumps(provenance, indent=2) + "\n", encoding="utf-8")
    log.info("fused %d image(s) into %s", len(outputs), out_dir)
    return EXIT_OK


# --- eval ---------------------------------------------------------------

def comparison_summary(reports: dict[str, EvalReport]) -> dict:
    summary = {"arms": {arm: {"n_tasks": r.n_tasks, "mean_accuracy": r.mean_accuracy,
                              "ci_half_width": r.ci_half_width, "summary": r.summary}
                        for arm, r in reports.items()}}
    if "raw" in reports and "fused" in reports:
        raw, fused = reports["raw"], reports["fused"]
        summary["delta_pp"] = round(100.0 * (fused.mean_accuracy - raw.mean_accuracy), 6)
        summary["ci_overlap"] = (raw.mean_accuracy + raw.ci_half_width
                                 >= fused.mean_accuracy - fused.ci_half_width
                                 and fused.mean_accuracy + fused.ci_half_width
                                 >= raw.mean_accuracy - raw.ci_half_width)
    return summary


def cmd_eval(args) -> int:
    try:
        configs = load_config(args.config)
    except ConfigError as exc:
        raise DataError(str(exc)) from None
    workers = _workers()
    out_dir = Path(args.out) if args.out else Path(args.config).parent / "reports"
    out_dir.mkdir(parents=True, exist_ok=True)

    reports = {}
    for config in configs:
        try:
            report = run_experiment(config, workers=workers)
        except ImageLoadError as exc:
            raise DataError(str(exc)) from None
        except ValueError as exc:
            raise DataError(f"{config.arm}: {exc}") from None
        reports[config.arm] = report
        (out_dir / f"{config.arm}.report.json").write_text(report.to_json() + "\n", encoding="utf-8")
        (out_dir / f"{config.arm}.report.txt").write_text(report.to_text(), encoding="utf-8")

    summary = comparison_summary(reports)
    (out_dir / "comparison.json").write_text(
        json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    lines = [f"{'arm':<8} accuracy (%)"]
    lines += [f"{arm:<8} {format_accuracy(r.mean_accuracy, r.ci_half_width)}"
              for arm, r in reports.items()]
    if "delta_pp" in summary:
        lines.append(f"delta    {summary['delta_pp']:+.2f} pp")
    text = "\n".join(lines) + "\n"
    (out_dir / "comparison.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# --- bench --------------------------------------------------------------

def cmd_bench(args) -> int:
    dims = args.dims or list(DEFAULT_DIMS)
    results = bench_lowpass(dims, iterations=args.iters, seed=args.seed)
    print(format_table(results))
    if args.out:
        try:
            Path(args.out).write_text(results_to_json(results) + "\n", encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {args.out}: {exc}") from None
    return EXIT_OK


# --- synth --------------------------------------------------------------

def cmd_synth(args) -> int:
    from .synthetic import SyntheticSpec, generate_dataset

    spec = SyntheticSpec(images_per_class=args.images_per_class, seed=args.seed)
    manifests = generate_dataset(args.output, spec)
    for role, path in manifests.items():
        print(f"{role.value}\t{path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freqfuse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="forward/inverse 2-D DCT between PNM and spectrum files")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=["orthonormal", "paper"], default="orthonormal")
    p.add_argument("--inverse", action="store_true", help="spectrum file in, PGM out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("fuse", help="low-pass reconstruction fused with the original image")
    p.add_argument("input", help="PNM file or directory of PNM files")
    p.add_argument("output", help="output directory")
    p.add_argument("--r", type=_ratio, default=0.15, help="retention ratio (default 0.15)")
    p.add_argument("--strategy", choices=["box", "gradient"], default="box")
    p.add_argument("--k", type=_nonneg, default=2.0, help="sigma multiplier (default 2)")
    p.add_argument("--combine", choices=["addclamp", "average"], default="addclamp")
    p.add_argument("--mode", choices=["orthonormal", "paper"], default="orthonormal")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="episodic evaluation, raw vs fused arms")
    p.add_argument("config")
    p.add_argument("--out", help="report directory (default: <config dir>/reports)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time box vs gradient low-pass")
    p.add_argument("--dims", type=_dims, action="append",
                   help="HxW, repeatable (default 84x84 and 256x256)")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write JSON results here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write the synthetic low-frequency-class dataset")
    p.add_argument("output")
    p.add_argument("--images-per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "bench" and args.iters < 10:
        parser.error("--iters must be at least 10")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"freqfuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"freqfuse: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
