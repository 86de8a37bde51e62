"""Command-line entry points.

Subcommands:
    simulate     run a configured scenario and write CSV/JSONL logs
    filters-demo compare raw vs median vs Kalman heading on a noisy stream
    train        train the segmentation network on synthetic or directory data
    eval         evaluate a checkpoint and print the metrics table
    segment      predict a mask for one image
    serve        run the live telemetry/teleop service
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np


def _cmd_simulate(args: argparse.Namespace) -> int:
    from .config import load_config
    from .sim import emit_plot_data, run_simulation, write_records_jsonl

    cfg = load_config(args.config)
    records = run_simulation(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if records:
        paths = emit_plot_data(records, out)
        write_records_jsonl(records, out / "records.jsonl")
        last = records[-1]
        print(f"wrote {paths['heading']} and {paths['trajectory']} ({len(records)} ticks)")
        print(
            f"final pose: ({last.truth_x:.3f}, {last.truth_y:.3f}, {last.truth_theta:.3f}), "
            f"waypoint {last.waypoint_index}, done={last.done}"
        )
    else:
        print("zero-duration run: no records")
    return 0


def _cmd_filters_demo(args: argparse.Namespace) -> int:
    from .filters import Kalman1D, MedianFilter
    from .sensors import NoiseChannel

    rng_channel = NoiseChannel(sigma_y=args.sigma, rng=np.random.default_rng(args.seed))
    median = MedianFilter(args.window)
    kalman = Kalman1D(q=args.q, r=args.sigma**2)
    truth = args.heading
    raw, med_out, kal_out = [], [], []
    for _ in range(args.steps):
        z = rng_channel.sample(truth)
        raw.append(z)
        med_out.append(median.step(z))
        kal_out.append(kalman.step(z, angular=True))

    def rmse(xs):
        return float(np.sqrt(np.mean((np.asarray(xs) - truth) ** 2)))

    print(f"constant heading {truth} rad, noise sigma {args.sigma} rad, {args.steps} samples")
    print(f"raw    RMSE: {rmse(raw):.5f}")
    print(f"median RMSE: {rmse(med_out):.5f} (window {args.window})")
    print(f"kalman RMSE: {rmse(kal_out):.5f} (q={args.q}, r={args.sigma**2})")
    if args.out:
        with open(args.out, "w") as f:
            f.write("t,raw,median_filtered,kalman_filtered\n")
            for i, (r, m, k) in enumerate(zip(raw, med_out, kal_out)):
                f.write(f"{i},{r!r},{m!r},{k!r}\n")
        print(f"wrote {args.out}")
    return 0


def _load_training_data(args: argparse.Namespace):
    from .channels import build_channel_stack

    if args.data == "synthetic":
        from .scenes import synthetic_dataset

        return synthetic_dataset(
            args.count, seed=args.seed, width=args.width, height=args.height,
            weed_fraction=args.weed_fraction,
        )
    from .dataset import load_pairs

    return [(build_channel_stack(img), mask) for img, mask in load_pairs(args.data)]


def _cmd_train(args: argparse.Namespace) -> int:
    from .segnet import save_checkpoint, train

    data = _load_training_data(args)
    params, history = train(data, epochs=args.epochs, lr=args.lr, loss=args.loss, seed=args.seed)
    save_checkpoint(params, args.out)
    for epoch, value in enumerate(history):
        print(f"epoch {epoch:3d}  mean {args.loss} loss {value:.5f}")
    print(f"saved checkpoint to {args.out}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    from .metrics import ConfusionMatrix, report_csv, report_table, summarize
    from .segnet import load_checkpoint, predict_mask

    params = load_checkpoint(args.ckpt)
    data = _load_training_data(args)
    cm = ConfusionMatrix(3)
    for stack, mask in data:
        cm.accumulate(predict_mask(params, stack), mask)
    summary = summarize(cm)
    print(report_table(summary))
    if args.csv:
        Path(args.csv).write_text(report_csv(summary))
        print(f"wrote {args.csv}")
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    from .channels import build_channel_stack
    from .imgio import mask_to_rgb, read_rgb, write_mask, write_rgb
    from .segnet import load_checkpoint, predict_mask
    from .sim import class_fractions

    params = load_checkpoint(args.ckpt)
    img = read_rgb(args.image)
    mask = predict_mask(params, build_channel_stack(img))
    soil, crop, weed = class_fractions(mask)
    print(f"class fractions: soil {soil:.3f}, crop {crop:.3f}, weed {weed:.3f}")
    if args.out:
        write_mask(args.out, mask)
        print(f"wrote label mask to {args.out}")
    if args.overlay:
        write_rgb(args.overlay, mask_to_rgb(mask))
        print(f"wrote colorized mask to {args.overlay}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .config import load_config
    from .server import serve

    cfg = load_config(args.config)
    params = None
    if args.ckpt:
        from .segnet import load_checkpoint

        params = load_checkpoint(args.ckpt)
    serve(
        cfg,
        port=args.port,
        host=args.host,
        params=params,
        include_mask_png=args.mask_png,
        frontend_dir=args.frontend,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and write logs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("filters-demo", help="median vs Kalman on a noisy constant heading")
    p.add_argument("--heading", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--q", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_filters_demo)

    def add_data_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", default="synthetic", help="'synthetic' or a dataset directory")
        p.add_argument("--count", type=int, default=32, help="synthetic scene count")
        p.add_argument("--width", type=int, default=64)
        p.add_argument("--height", type=int, default=48)
        p.add_argument("--weed-fraction", type=float, default=0.02, dest="weed_fraction")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train the segmentation network")
    add_data_args(p)
    p.add_argument("--loss", choices=["cce", "wcce"], default="wcce")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint, print the metrics table")
    add_data_args(p)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--csv", default=None, help="also write the report as CSV")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("segment", help="predict a mask for one image")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--out", default=None, help="write the label mask PNG here")
    p.add_argument("--overlay", default=None, help="write the colorized mask PNG here")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("serve", help="run the telemetry/teleop service")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ckpt", default=None, help="segmentation checkpoint for camera frames")
    p.add_argument("--mask-png", action="store_true", help="include mask PNGs in telemetry")
    p.add_argument("--frontend", default=None, help="static files directory to serve at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
