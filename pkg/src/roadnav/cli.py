"""Command-line entry point: ``roadnav <command> ...``.

Every command reads its main input from a file path or ``-`` (stdin) and writes
its main output either to stdout or, with ``--out DIR``, to a fixed file name
inside ``DIR``. Exit codes: 0 success, 2 bad input, 3 no destination or no
collision-free path (the robot should rotate and rescan).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .apf import Proceed
from .config import ConfigError, PipelineConfig, load_config
from .destination import find_destination
from .flow_warp import propagate_feature, propagation_residual
from .metrics import match_instances, metrics_report
from .morphology import smooth
from .motion_blur import BlurSpec, apply_blur, psf_kernel, random_spec
from .overlay import render_overlay
from .pipeline import run_episode, run_frame
from .raster import (
    FormatError,
    read_flo,
    read_ften,
    read_pgm,
    read_pnm,
    resize_flow,
    write_ften,
    write_pgm,
    write_ppm,
)
from .scene import SceneSpec, generate_scene
from .segmap import ClassMap

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_PATH = 3


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _emit(args, name: str, payload: bytes):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _dumps(doc) -> bytes:
    return (json.dumps(doc) + "\n").encode()


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = dataclasses.replace(cfg, workers=args.threads)
    return cfg


def _binary_pgm(data: bytes) -> np.ndarray:
    return (read_pgm(data) > 0).astype(np.uint8)


def cmd_plan(args) -> int:
    cfg = _config(args)
    class_map = ClassMap(read_pgm(_read_bytes(args.input)), cfg.class_table)
    result = run_frame(class_map, cfg)
    _emit(args, "path.json", _dumps(result.to_json_dict()))
    if args.out and cfg.overlay:
        _emit(args, "overlay.ppm", write_ppm(render_overlay(result)))
    return EXIT_OK if isinstance(result.directive, Proceed) else EXIT_NO_PATH


def cmd_smooth(args) -> int:
    cfg = _config(args)
    smoothed = smooth(_binary_pgm(_read_bytes(args.input)), cfg.morphology)
    _emit(args, "smoothed.pgm", write_pgm(smoothed * 255))
    return EXIT_OK


def cmd_destination(args) -> int:
    cfg = _config(args)
    binary = _binary_pgm(_read_bytes(args.input))
    dest = find_destination(binary, cfg.destination, workers=cfg.workers)
    doc = {
        "destination": [dest.col, dest.row] if dest else None,
        "threshold": cfg.destination.alpha * binary.shape[1],
    }
    _emit(args, "destination.json", _dumps(doc))
    return EXIT_OK if dest else EXIT_NO_PATH


def cmd_blur(args) -> int:
    image = read_pnm(_read_bytes(args.input))
    if args.length is not None:
        spec = BlurSpec(args.length, args.theta)
    else:
        spec = random_spec(args.seed if args.seed is not None else 0)
    kernel = psf_kernel(spec)
    if image.ndim == 2:
        blurred = apply_blur(image.astype(np.float64), kernel)
        out = np.clip(np.floor(blurred + 0.5), 0, 255).astype(np.uint8)
        _emit(args, "blurred.pgm", write_pgm(out))
    else:
        blurred = apply_blur(np.moveaxis(image, 2, 0).astype(np.float64), kernel)
        out = np.clip(np.floor(blurred + 0.5), 0, 255).astype(np.uint8)
        _emit(args, "blurred.ppm", write_ppm(np.moveaxis(out, 0, 2)))
    print(json.dumps({"length": spec.length, "theta": spec.theta}), file=sys.stderr)
    return EXIT_OK


def cmd_warp(args) -> int:
    features = read_ften(_read_bytes(args.features))
    flow = read_flo(_read_bytes(args.flow))
    c, h, w = features.shape
    if flow.shape[:2] != (h, w):
        flow = resize_flow(flow, w, h)
    scale = read_ften(_read_bytes(args.scale))[0] if args.scale else None
    if args.observed:
        observed = read_ften(_read_bytes(args.observed))
        residual = propagation_residual(observed, features, flow, scale)
        _emit(args, "residual.json", _dumps({"residual": residual}))
    else:
        _emit(args, "warped.ften", write_ften(propagate_feature(features, flow, scale)))
    return EXIT_OK


def _load_path(path: str):
    doc = json.loads(_read_bytes(path))
    return doc["waypoints"] if isinstance(doc, dict) else doc


def cmd_metrics(args) -> int:
    if len(args.pred) != len(args.gt):
        raise ValueError("--pred and --gt must be given the same number of times")
    if len(args.path) != len(args.reference):
        raise ValueError("--path and --reference must be given the same number of times")
    preds = [read_pgm(_read_bytes(p)) for p in args.pred]
    gts = [read_pgm(_read_bytes(g)) for g in args.gt]
    kwargs = {}
    if preds:
        if args.num_classes is None:
            raise ValueError("--num-classes is required with --pred/--gt")
        kwargs.update(
            pred=np.concatenate([p.ravel() for p in preds])[np.newaxis],
            gt=np.concatenate([g.ravel() for g in gts])[np.newaxis],
            num_classes=args.num_classes,
        )
        if args.obstacle_label:
            ids = list(args.obstacle_label)
            kwargs["matches"] = [match_instances(np.isin(p, ids), np.isin(g, ids)) for p, g in zip(preds, gts)]
    pairs = [(_load_path(a), _load_path(b)) for a, b in zip(args.path, args.reference)]
    if pairs:
        kwargs["path_pairs"] = pairs
    _emit(args, "metrics.json", _dumps(metrics_report(**kwargs)))
    return EXIT_OK


def cmd_episode(args) -> int:
    cfg = _config(args)
    if args.inputs:
        frames = [ClassMap(read_pgm(_read_bytes(p)), cfg.class_table) for p in args.inputs]
        report = run_episode(frames, cfg)
    else:
        spec = SceneSpec(width=args.width, height=args.height, count=tuple(args.obstacles), size=tuple(args.size))
        seed = args.seed if args.seed is not None else 0

        def sampler(pose, i):
            # a rotated robot sees a different synthetic view
            return generate_scene(np.random.SeedSequence([seed, i, int(round(pose["heading"])) % 360]), spec)

        report = run_episode(sampler, cfg, n_frames=args.synthetic)
    _emit(args, "episode.json", _dumps(report))
    return EXIT_OK


def cmd_gen_scene(args) -> int:
    spec = SceneSpec(width=args.width, height=args.height, count=tuple(args.obstacles), size=tuple(args.size))
    scene = generate_scene(args.seed if args.seed is not None else 0, spec)
    _emit(args, "scene.pgm", write_pgm(scene.class_map.labels))
    if args.out:
        ref = [list(p) for p in scene.reference_path] if scene.reference_path else None
        _emit(args, "reference.json", _dumps({"waypoints": ref}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline configuration JSON")
    common.add_argument("--seed", type=int, help="random seed (u64)")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--threads", type=int, help="worker threads for row scanning")

    parser = argparse.ArgumentParser(prog="roadnav", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common], help="class-map PGM -> path JSON (+ overlay PPM)")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("smooth", parents=[common], help="binary PGM -> smoothed binary PGM")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("destination", parents=[common], help="binary PGM -> destination JSON")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_destination)

    p = sub.add_parser("blur", parents=[common], help="motion-blur a PGM/PPM image")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--length", type=int, help="kernel length (odd); omit to draw from --seed")
    p.add_argument("--theta", type=float, default=0.0, help="motion angle in degrees")
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("warp", parents=[common], help="propagate an FTEN feature tensor through a .flo field")
    p.add_argument("features")
    p.add_argument("flow")
    p.add_argument("--scale", help="FTEN file whose first channel is the per-pixel scale")
    p.add_argument("--observed", help="FTEN of observed current features; prints the residual instead")
    p.set_defaults(func=cmd_warp)

    p = sub.add_parser("metrics", parents=[common], help="mIoU / ODR / NOFP / Hausdorff report")
    p.add_argument("--pred", action="append", default=[], help="predicted label PGM (repeatable)")
    p.add_argument("--gt", action="append", default=[], help="ground-truth label PGM (repeatable)")
    p.add_argument("--num-classes", type=int)
    p.add_argument("--obstacle-label", type=int, action="append", default=[], help="label id counted as obstacle")
    p.add_argument("--path", action="append", default=[], help="planned path JSON (repeatable)")
    p.add_argument("--reference", action="append", default=[], help="reference path JSON (repeatable)")
    p.set_defaults(func=cmd_metrics)

    for name, func, helptext in (
        ("episode", cmd_episode, "run a multi-frame episode"),
        ("gen-scene", cmd_gen_scene, "write a synthetic class-map PGM"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "episode":
            p.add_argument("inputs", nargs="*", help="class-map PGMs; omit for synthetic frames")
            p.add_argument("--synthetic", type=int, default=10, help="number of synthetic frames")
        p.add_argument("--width", type=int, default=640)
        p.add_argument("--height", type=int, default=480)
        p.add_argument("--obstacles", type=int, nargs=2, default=(1, 4), metavar=("MIN", "MAX"))
        p.add_argument("--size", type=int, nargs=2, default=(5, 50), metavar=("MIN", "MAX"))
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"roadnav {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
