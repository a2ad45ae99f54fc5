"""Command-line surface.

Exit codes: 0 success; 2 usage; 3 malformed or unsupported input streams and
sidecars; 4 geometry, shape, or too-short inputs; 5 schedule/sidecar
misalignment; 6 bad numeric data, out-of-range values, degenerate fits;
7 violated preconditions (e.g. too few training items); 1 anything else.
Errors print one machine-parseable line to stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__
from .benchmark import benchmark, write_benchmark_report
from .config import load_config
from .errors import (
    AlignmentError,
    DataError,
    DegenerateInputError,
    GeometryError,
    PreconditionError,
    RangeError,
    ShapeError,
    SidecarFormatError,
    StreamParseError,
    TooShortError,
    TruncatedStreamError,
    UnsupportedFormatError,
    VqkitError,
)
from .evaluation import load_manifest, run_protocol_manifest
from .pipeline import extract_video, read_features, write_features
from .regressor import (
    QualityRegressor,
    fit_logistic,
    load_model,
    logistic_apply,
    save_model,
)
from .video_io import PixelFormat, build_schedule, parse_y4m, read_raw_yuv

EXIT_CODES: tuple[tuple[type, int], ...] = (
    (StreamParseError, 3),
    (TruncatedStreamError, 3),
    (UnsupportedFormatError, 3),
    (SidecarFormatError, 3),
    (GeometryError, 4),
    (TooShortError, 4),
    (ShapeError, 4),
    (AlignmentError, 5),
    (DataError, 6),
    (RangeError, 6),
    (DegenerateInputError, 6),
    (PreconditionError, 7),
    (VqkitError, 1),
)


def _exit_code(exc: VqkitError) -> int:
    for klass, code in EXIT_CODES:
        if isinstance(exc, klass):
            return code
    return 1


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except VqkitError as exc:
            click.echo(f"error class={type(exc).__name__} msg={str(exc)!r}", err=True)
            sys.exit(_exit_code(exc))
    return wrapper


@click.group()
@click.version_option(__version__, prog_name="vqkit")
def main():
    """Blind video quality toolkit: extract features, train and apply the
    regressor head, evaluate on manifests, and benchmark runtimes."""


_config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="JSON file overriding default parameters.")
_threads_option = click.option(
    "--threads", type=int, default=None,
    help="Worker threads (default: logical cores). Results are identical for any value.")


@main.command()
@click.option("--input", "input_path", required=True,
              help="Video path, or '-' to read a Y4M stream from stdin.")
@click.option("--format", "fmt", type=click.Choice(["auto", "y4m", "raw"]),
              default="auto", show_default=True)
@click.option("--width", type=int, default=None, help="Raw input width.")
@click.option("--height", type=int, default=None, help="Raw input height.")
@click.option("--fps", default=None, help="Raw input frame rate (e.g. 30 or 30000:1001).")
@click.option("--pix-fmt", type=click.Choice(["yuv420", "yuv444"]), default="yuv420",
              show_default=True, help="Raw input pixel format.")
@click.option("--deep", "deep_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="DFV1 deep-feature sidecar aligned to the schedule.")
@click.option("--no-deep", is_flag=True, help="Zero-fill the deep block.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--short-side", type=int, default=None, help="Resize target short side.")
@_threads_option
@_config_option
@handle_errors
def extract(input_path, fmt, width, height, fps, pix_fmt, deep_path, no_deep,
            out_path, short_side, threads, config_path):
    """Extract the video feature vector to an FTV1 file plus metadata."""
    config = load_config(config_path, resize_short_side=short_side, threads=threads)
    if fmt == "auto":
        fmt = "raw" if str(input_path).endswith((".yuv", ".raw")) else "y4m"
    if fmt == "raw":
        if width is None or height is None or fps is None:
            raise click.UsageError("--format raw requires --width, --height and --fps")
        if input_path == "-":
            raise click.UsageError("raw input needs a seekable file, not stdin")
        if not Path(input_path).exists():
            raise click.UsageError(f"input {input_path!r} does not exist")
        rate = Fraction(*map(int, fps.split(":"))) if ":" in str(fps) else Fraction(str(fps))
        pixel = PixelFormat.YUV420_8BIT if pix_fmt == "yuv420" else PixelFormat.YUV444_8BIT
        video, frames = read_raw_yuv(input_path, width, height, rate, pixel)
    elif input_path == "-":
        video, frames = parse_y4m(sys.stdin.buffer)
    else:
        if not Path(input_path).exists():
            raise click.UsageError(f"input {input_path!r} does not exist")
        video, frames = parse_y4m(input_path)
    if deep_path is None and not no_deep:
        raise AlignmentError("no deep sidecar given; pass --deep or --no-deep")
    schedule = build_schedule(video)
    vector, meta = extract_video(video, frames, schedule, deep=deep_path,
                                 config=config, no_deep=no_deep)
    meta["input"] = str(input_path)
    write_features(out_path, vector.concatenated, meta)
    click.echo(f"wrote {out_path} ({meta['dim']} features, {meta['chunks']} chunks)")


@main.command()
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out-model", required=True, type=click.Path(dir_okay=False))
@click.option("--budget", type=int, default=None, help="Hyperparameter search budget.")
@click.option("--seed", type=int, default=None)
@click.option("--epsilon", type=float, default=0.1, show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@_config_option
@handle_errors
def train(manifest_path, out_model, budget, seed, epsilon, folds, config_path):
    """Fit the regressor head on a manifest and save the model file."""
    config = load_config(config_path, search_budget=budget, seed=seed)
    manifest = load_manifest(manifest_path)
    X, y = manifest.load_features()
    model = QualityRegressor(search_budget=config.search_budget, epsilon=epsilon,
                             folds=folds, random_state=config.seed)
    model.fit(X, y)
    model.logistic_params_ = fit_logistic(model.predict(X), y)
    save_model(model, out_model)
    click.echo(json.dumps({
        "model": str(out_model),
        "n_items": len(manifest),
        "C": model.best_params_[0],
        "gamma": model.best_params_[1],
        "cv_rmse": model.cv_rmse_,
        "config": config.as_dict(),
    }))


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--features", "feature_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here instead of stdout.")
@_config_option
@handle_errors
def predict(model_path, feature_paths, out_path, config_path):
    """Score FTV1 feature files with a trained model."""
    config = load_config(config_path)
    model = load_model(model_path)
    results = []
    for path in feature_paths:
        vec = read_features(path).astype(np.float64)
        raw = float(model.predict(vec))
        row = {"features": str(path), "raw_score": raw}
        if model.logistic_params_ is not None:
            row["mapped_score"] = float(logistic_apply(model.logistic_params_, raw))
        results.append(row)
    doc = json.dumps({"model": str(model_path), "scores": results,
                      "config": config.as_dict()}, indent=2)
    if out_path:
        Path(out_path).write_text(doc + "\n")
    else:
        click.echo(doc)


@main.command(name="eval")
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--iterations", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--train-frac", type=float, default=0.8, show_default=True)
@click.option("--budget", type=int, default=None, help="Hyperparameter search budget.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@_config_option
@handle_errors
def eval_cmd(manifest_path, iterations, seed, train_frac, budget, report_path, config_path):
    """Run the repeated random-split protocol and report median metrics."""
    config = load_config(config_path, search_budget=budget, seed=seed)
    manifest = load_manifest(manifest_path)
    report = run_protocol_manifest(
        manifest,
        iterations=iterations,
        train_frac=train_frac,
        seed=config.seed,
        regressor_params={"search_budget": config.search_budget},
    )
    doc = report.to_dict()
    doc["config"] = config.as_dict()
    text = json.dumps(doc, indent=2)
    if report_path:
        Path(report_path).write_text(text + "\n")
        click.echo(f"median SRCC {report.median_srcc:.4f}, wrote {report_path}")
    else:
        click.echo(text)


@main.command()
@click.option("--inputs", "input_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@_config_option
@handle_errors
def bench(input_paths, reps, report_path, config_path):
    """Time per-stage extraction over the given videos."""
    config = load_config(config_path)
    report = benchmark(input_paths, repetitions=reps, config=config)
    if report_path:
        write_benchmark_report(report, report_path)
        click.echo(f"wrote {report_path}")
    else:
        click.echo(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
