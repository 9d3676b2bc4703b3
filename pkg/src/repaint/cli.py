"""Command-line front end: single renders, light-path animation, sweeps.

Overrides use the scene document's key paths, e.g.
`--set params.optics.mu=0.5` or `--set lights.0.direction=[0.6,0,0.8]`,
and are applied to the fully defaulted document, so a CLI override is
exactly equivalent to editing the scene file. Nothing here is stochastic;
there is no seed flag because no operation needs one.

`animate` and `sweep` also drop a small report next to the frames: a CSV
of per-frame mean intensity and a matplotlib plot of the same curve.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .compositor import render
from .demo import DEMO_KINDS, make_demo_scene
from .illum import LightSpec
from .image import ImageError, save_image
from .scene_io import SceneError, apply_overrides, load_scene, parse_scene, serialize_scene
from .shadow import set_worker_threads


def _load_doc(scene_file, overrides):
    text = Path(scene_file).read_text(encoding="utf-8")
    doc = parse_scene(text)
    if overrides:
        raw = serialize_scene(doc)
        apply_overrides(raw, overrides)
        doc = parse_scene(raw)
    return doc


def _render_doc(doc, base_dir):
    scene, lights, params = load_scene(doc, base_dir=base_dir)
    return render(scene, lights, params)


def _slerp(a, b, t):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    dot = float(np.clip(np.dot(a, b), -1.0, 1.0))
    if dot > 1.0 - 1e-9:
        return a if t == 0.0 else (b if t == 1.0 else a + t * (b - a))
    theta = math.acos(dot)
    s = math.sin(theta)
    out = (math.sin((1.0 - t) * theta) / s) * a + (math.sin(t * theta) / s) * b
    return out / np.linalg.norm(out)


def _interp_light(light, waypoints, tau):
    n_seg = len(waypoints) - 1
    pos = min(tau * n_seg, float(n_seg))
    seg = min(int(pos), n_seg - 1)
    local = pos - seg
    a, b = waypoints[seg], waypoints[seg + 1]
    if light.kind == "directional":
        a = np.asarray(a) / np.linalg.norm(a)
        b = np.asarray(b) / np.linalg.norm(b)
        v = _slerp(a, b, local)
        return LightSpec(kind="directional", direction=tuple(v / np.linalg.norm(v)), color=light.color)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    v = a if local == 0.0 else (b if local == 1.0 else a + local * (b - a))
    return LightSpec(kind="point", position=tuple(v), color=light.color)


def _parse_path(text):
    pts = []
    for chunk in text.split(";"):
        parts = [float(v) for v in chunk.split(",")]
        if len(parts) != 3:
            raise SceneError(f"light-path waypoint {chunk!r} is not x,y,z")
        pts.append(tuple(parts))
    if len(pts) < 2:
        raise SceneError("light path needs at least two waypoints")
    return pts


def _write_report(out_dir, rows, header, x_label, stem):
    csv_path = Path(out_dir) / f"{stem}.csv"
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xs = [r[0] for r in rows]
        ys = [r[-1] for r in rows]
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot(range(len(xs)), ys, "o-", color="#34557f")
        ax.set_xticks(range(len(xs)))
        ax.set_xticklabels([str(x) for x in xs], rotation=45, fontsize=7)
        ax.set_xlabel(x_label)
        ax.set_ylabel("mean intensity")
        ax.grid(alpha=0.3)
        fig.tight_layout()
        fig.savefig(Path(out_dir) / f"{stem}.png", dpi=110)
        plt.close(fig)
    except Exception as exc:  # the frames are the deliverable; the plot is a bonus
        print(f"note: report figure skipped ({exc})", file=sys.stderr)
    return csv_path


def cmd_render(args):
    doc = _load_doc(args.scene, args.set)
    img = _render_doc(doc, Path(args.scene).parent)
    save_image(img, args.out)
    print(args.out)
    return 0


def cmd_animate(args):
    if args.frames < 2:
        raise SceneError("animate needs --frames >= 2")
    doc = _load_doc(args.scene, args.set)
    waypoints = _parse_path(args.light_path)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene, lights, params = load_scene(doc, base_dir=Path(args.scene).parent)
    rows = []
    for f in range(args.frames):
        tau = f / (args.frames - 1)
        frame_lights = [_interp_light(lights[0], waypoints, tau)] + lights[1:]
        img = render(scene, frame_lights, params)
        path = out_dir / f"frame_{f:05d}.{args.format}"
        save_image(img, path)
        rows.append([f, tau, float(img.data.mean())])
    _write_report(out_dir, rows, ["frame", "tau", "mean_intensity"], "frame", "frames")
    print(out_dir)
    return 0


def cmd_sweep(args):
    doc = _load_doc(args.scene, args.set)
    base_raw = serialize_scene(doc)
    values = args.values.split(",")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for f, value in enumerate(values):
        raw = json.loads(json.dumps(base_raw))
        apply_overrides(raw, [f"{args.key}={value}"])
        img = _render_doc(parse_scene(raw), Path(args.scene).parent)
        path = out_dir / f"frame_{f:05d}.{args.format}"
        save_image(img, path)
        rows.append([value, float(img.data.mean())])
    _write_report(out_dir, rows, [args.key, "mean_intensity"], args.key, "sweep")
    print(out_dir)
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_demo(args):
    path = make_demo_scene(args.out, kind=args.kind, size=args.size)
    print(path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="repaint", description="Re-shade image-defined paintings under movable lights.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("scene", help="scene document (JSON)")
        p.add_argument("--out", required=out_required, help="output path")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scene document value (repeatable)")
        p.add_argument("--threads", type=int, default=None, help="cap render worker threads")

    p = sub.add_parser("render", help="render one frame")
    common(p)

    p = sub.add_parser("animate", help="render frames along a light path")
    common(p)
    p.add_argument("--light-path", required=True, help="waypoints 'x,y,z;x,y,z[;...]' for lights[0]")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--format", choices=("ppm", "png"), default="ppm")

    p = sub.add_parser("sweep", help="render one frame per parameter value")
    common(p)
    p.add_argument("--key", required=True, help="override path, e.g. params.optics.mu")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--format", choices=("ppm", "png"), default="ppm")

    p = sub.add_parser("serve", help="run the HTTP render service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8650)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("demo", help="write a procedural demo scene")
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=DEMO_KINDS, default="hemisphere")
    p.add_argument("--size", type=int, default=256)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        set_worker_threads(args.threads)
    handlers = {
        "render": cmd_render,
        "animate": cmd_animate,
        "sweep": cmd_sweep,
        "serve": cmd_serve,
        "demo": cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except (SceneError, ImageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
