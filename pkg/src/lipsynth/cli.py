"""Command-line frontend.

Subcommands cover the full pipeline: ``gen-synthetic`` writes a seeded fixture
tree, ``build-lib`` turns capture CSVs into a viseme library, ``synth``
renders a timed script to a trajectory CSV, ``retarget`` maps it to actuator
commands, ``eval`` compares two trajectory CSVs, and ``map`` prints the viseme
decomposition of one syllable.

Exit codes: 0 success, 1 data/processing error, 2 usage error. Output files
are written to a temporary sibling and renamed on success, so failures never
leave partial artifacts behind.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

from . import audio as audio_mod
from .builder import BuilderConfig, build_viseme, fusion_residual, lowpass_filter, segment_cycles
from .errors import LipSyncError
from .library import VisemeLibrary, load_library, serialize_library
from .metrics import evaluate, jerk_series
from .pinyin import VISEME_IDS, default_table, load_mapping_table, syllable_to_visemes
from .retarget import default_calibration, load_calibration, retarget_series, write_actuator_csv
from .series import CSV_FLOAT_FORMAT, parse_capture_csv, series_csv_text
from .synthesis import FusionParams, parse_script, script_to_json, synthesize
from .synthetic import TEST_SENTENCES, make_capture_series, make_script, make_script_audio


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _load_table(args):
    if getattr(args, "table", None):
        return load_mapping_table(Path(args.table).read_text(encoding="utf-8"))
    return default_table()


def cmd_build_lib(args) -> int:
    cfg = BuilderConfig(
        reference_channel=args.reference_channel,
        smoothing_window=args.window,
        peak_min_height=args.min_height,
        peak_min_separation=args.separation,
        segmentation_mode=args.mode,
        target_samples=args.target_samples,
        min_cycles=args.min_cycles,
        rest_blend=args.rest_blend,
    )
    visemes = {}
    sample_count = cfg.target_samples
    if args.update:
        existing = load_library(args.update)
        if existing.sample_count != cfg.target_samples:
            print(
                f"error: existing library uses sample_count={existing.sample_count}, "
                f"requested {cfg.target_samples}",
                file=sys.stderr,
            )
            return 1
        visemes.update(existing.visemes)

    for pair in args.captures:
        if "=" not in pair:
            print(f"error: expected VISEME=PATH, got {pair!r}", file=sys.stderr)
            return 2
        vid, _, path = pair.partition("=")
        if vid not in VISEME_IDS:
            print(f"error: unknown viseme id {vid!r}", file=sys.stderr)
            return 1
        try:
            with open(path, "r", encoding="utf-8") as fh:
                series = parse_capture_csv(fh)
            filtered = lowpass_filter(series, cfg.smoothing_window)
            segments = segment_cycles(filtered, cfg)
            traj = build_viseme(series, cfg)
        except LipSyncError as exc:
            print(f"error: viseme {vid}: {exc}", file=sys.stderr)
            return 1
        visemes[vid] = traj
        _say(args, f"{vid}: {len(segments)} cycles, fusion residual "
                   f"{fusion_residual(segments, traj):.5f}")

    lib = VisemeLibrary(sample_count=sample_count, visemes=visemes)
    _atomic_write_text(Path(args.out), serialize_library(lib))
    _say(args, f"wrote {args.out} ({len(visemes)} visemes, {sample_count} samples)")
    return 0


def cmd_synth(args) -> int:
    params = FusionParams(
        a=args.exponent,
        lam=args.division_ratio,
        rest_decay_alpha=args.rest_decay,
        method=args.method,
        fps=args.fps,
        initial_slot_fraction=args.initial_slot,
    )
    library = load_library(args.library)
    table = _load_table(args)
    script = parse_script(Path(args.script).read_text(encoding="utf-8"))

    energy = None
    mod = audio_mod.ModulationParams(
        gain_floor=args.gain_floor,
        ema_alpha=args.ema_alpha,
        smoothing=args.smoothing,
    )
    if args.method == "D":
        samples, rate = audio_mod.read_wav(args.audio)
        n_frames = int(round(script.total_duration * params.fps)) + 1
        energy = audio_mod.rms_envelope(samples, rate, params.fps, mod, n_frames=n_frames)

    series = synthesize(script, library, table, params, energy=energy, modulation=mod)
    if args.verbose and not args.quiet:
        for i, ev in enumerate(script.events):
            seq = " ".join(v.value for v in syllable_to_visemes(ev.syllable, table))
            print(f"event {i}: {ev.syllable!r} [{ev.start:.3f}s +{ev.duration:.3f}s] -> {seq}")
    _atomic_write_text(Path(args.out), series_csv_text(series))
    _say(args, f"wrote {args.out} ({series.frame_count} frames at {series.fps:g} fps, "
               f"method {args.method})")
    return 0


def cmd_retarget(args) -> int:
    if args.calibration:
        calib = load_calibration(Path(args.calibration).read_text(encoding="utf-8"))
    else:
        calib = default_calibration()
    with open(args.input, "r", encoding="utf-8") as fh:
        series = parse_capture_csv(fh)
    frames, stats = retarget_series(series, calib)
    buf = io.StringIO()
    write_actuator_csv(frames, calib, buf)
    _atomic_write_text(Path(args.out), buf.getvalue())
    _say(args, f"wrote {args.out} ({len(frames)} frames, {calib.dof} actuators, "
               f"{stats.summary()})")
    return 0


def cmd_eval(args) -> int:
    with open(args.generated, "r", encoding="utf-8") as fh:
        gen = parse_capture_csv(fh)
    with open(args.reference, "r", encoding="utf-8") as fh:
        ref = parse_capture_csv(fh)
    try:
        report = evaluate(gen, ref)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(report.to_text(), end="")
    if args.out:
        _atomic_write_text(Path(args.out), report.to_json())
    if args.jerk_csv:
        lines = ["frame_index," + ",".join(report.active_channels)]
        cols = [jerk_series(gen.channel(name), gen.fps) for name in report.active_channels]
        for k in range(len(cols[0])):
            cells = [str(k)] + [CSV_FLOAT_FORMAT % col[k] for col in cols]
            lines.append(",".join(cells))
        _atomic_write_text(Path(args.jerk_csv), "\n".join(lines) + "\n")
    return 0


def cmd_map(args) -> int:
    table = _load_table(args)
    seq = syllable_to_visemes(args.syllable, table)
    print(" ".join(v.value for v in seq))
    return 0


def cmd_gen_synthetic(args) -> int:
    out = Path(args.out_dir)
    captures = out / "captures"
    scripts = out / "scripts"
    audio_dir = out / "audio"
    for d in (captures, scripts, audio_dir):
        d.mkdir(parents=True, exist_ok=True)

    for vid in VISEME_IDS:
        series = make_capture_series(
            vid, fps=args.fps, noise_sigma=args.noise, seed=args.seed
        )
        _atomic_write_text(captures / f"{vid}.csv", series_csv_text(series))
    for name, syllables in TEST_SENTENCES.items():
        script = make_script(syllables, syllable_duration=args.syllable_duration)
        _atomic_write_text(scripts / f"{name}.json", script_to_json(script))
        samples = make_script_audio(script)
        audio_mod.write_wav(audio_dir / f"{name}.wav", samples, 16000)
    _say(args, f"wrote {len(VISEME_IDS)} captures, {len(TEST_SENTENCES)} scripts + wavs "
               f"under {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipsynth",
        description="Speech-driven lip motion synthesis toolkit "
                    "(viseme libraries, coarticulated synthesis, retargeting, metrics).",
        epilog="Library files use JSON format version 1; CSVs carry the 27 canonical "
               "lower-face channels. See README.md for the format reference.",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-lib", help="build/update a viseme library from capture CSVs")
    p.add_argument("captures", nargs="+", metavar="VISEME=CSV",
                   help="capture CSV per viseme, e.g. V8_A=a.csv")
    p.add_argument("--out", required=True, help="library JSON output path")
    p.add_argument("--update", help="existing library to merge into")
    p.add_argument("--reference-channel", default="jawOpen")
    p.add_argument("--window", type=int, default=5, help="odd smoothing window (frames)")
    p.add_argument("--min-height", type=float, default=0.15, help="peak detection threshold")
    p.add_argument("--separation", type=float, default=0.25, help="min peak separation (s)")
    p.add_argument("--mode", choices=["valley-to-valley", "peak-to-peak"],
                   default="valley-to-valley")
    p.add_argument("--target-samples", type=int, default=60)
    p.add_argument("--min-cycles", type=int, default=3)
    p.add_argument("--rest-blend", action="store_true",
                   help="blend trajectory edges toward the per-channel rest level")
    p.set_defaults(func=cmd_build_lib)

    p = sub.add_parser("synth", help="synthesize a trajectory CSV from a timed script")
    p.add_argument("--script", required=True, help="timed script JSON")
    p.add_argument("--library", required=True, help="viseme library JSON")
    p.add_argument("--table", help="mapping table JSON (default: built-in table)")
    p.add_argument("--method", choices=["A", "B", "C", "D"], default="C")
    p.add_argument("--audio", help="WAV file (required for method D)")
    p.add_argument("--out", required=True, help="trajectory CSV output path")
    p.add_argument("--fps", type=float, default=60.0)
    p.add_argument("--exponent", type=float, default=0.7,
                   help="dual-fusion weight exponent")
    p.add_argument("--division-ratio", type=float, default=0.5,
                   help="three-viseme temporal division ratio")
    p.add_argument("--rest-decay", type=float, default=0.15,
                   help="per-frame decay toward neutral between events")
    p.add_argument("--initial-slot", type=float, default=0.2,
                   help="method B: share of the period given to the first viseme")
    p.add_argument("--gain-floor", type=float, default=0.2,
                   help="method D: minimum energy gain")
    p.add_argument("--ema-alpha", type=float, default=0.3,
                   help="method D: smoothing coefficient")
    p.add_argument("--smoothing", choices=["ema", "moving-average"], default="ema")
    p.add_argument("--verbose", action="store_true",
                   help="print per-event viseme decompositions")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("retarget", help="map a trajectory CSV to actuator commands")
    p.add_argument("--input", required=True, help="trajectory CSV")
    p.add_argument("--calibration", help="calibration JSON (default: 14-DOF demo)")
    p.add_argument("--out", required=True, help="actuator CSV output path")
    p.set_defaults(func=cmd_retarget)

    p = sub.add_parser("eval", help="compare a generated trajectory against a reference")
    p.add_argument("--generated", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--out", help="write the report as JSON")
    p.add_argument("--jerk-csv", help="write per-frame jerk of the generated series")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("map", help="print the viseme sequence of one pinyin syllable")
    p.add_argument("syllable")
    p.add_argument("--table", help="mapping table JSON (default: built-in table)")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("gen-synthetic", help="write a deterministic synthetic fixture tree")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--noise", type=float, default=0.01, help="capture noise sigma")
    p.add_argument("--fps", type=float, default=60.0)
    p.add_argument("--syllable-duration", type=float, default=0.4)
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth" and args.method == "D" and not args.audio:
        parser.error("--audio is required with --method D")
    try:
        return args.func(args)
    except (LipSyncError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
