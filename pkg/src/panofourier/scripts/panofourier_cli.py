#!/usr/bin/env python3

"""
Train, evaluate, run and benchmark the joint panorama segmentation and depth network
"""

import argparse
import json
import sys
import typing
from pathlib import Path

import panofourier
from panofourier.data import generate_samples, load_split, write_dataset
from panofourier.data.image_io import read_png

MODES = {"joint": "joint", "depth": "depth_only", "semantic": "semantic_only"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panofourier", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="Train a model from a config JSON file")
    train.add_argument("-c", "--config", type=str, default="config.json", help="The path to the config JSON file")
    train.add_argument("--seed", type=int, default=None, help="Overrides Settings.seed")
    train.add_argument("--mode", choices=sorted(MODES), default=None, help="Overrides Settings.mode")
    train.add_argument(
        "--loss-ablation",
        choices=["mar", "obj"],
        action="append",
        default=[],
        help="Switch off the margin (mar) or object (obj) loss term; may be repeated",
    )
    train.add_argument(
        "--ablation",
        choices=["loss", "mode"],
        default=None,
        help="Train every loss configuration or every training mode and write an ablation table",
    )
    train.add_argument("--out", type=str, default=None, help="Overrides Settings.out_dir")

    evaluate = commands.add_parser("eval", help="Evaluate a checkpoint on a dataset split")
    evaluate.add_argument("--checkpoint", type=str, required=True, help="The path to the .fdsn checkpoint")
    evaluate.add_argument("--data", type=str, required=True, help="Dataset root holding the split manifest")
    evaluate.add_argument("--split", type=str, default="test", help="Split name")
    evaluate.add_argument("-c", "--config", type=str, default=None, help="Config JSON file for the Settings section")
    evaluate.add_argument("--depth-format", choices=["pfm", "png16"], default="pfm", help="Ground-truth depth files")
    evaluate.add_argument("--oracle", action="store_true", help="Score the ground truth as the prediction")
    evaluate.add_argument("--out", type=str, default=None, help="Report JSON file; printed when omitted")

    infer = commands.add_parser("infer", help="Predict depth and labels of one panorama")
    infer.add_argument("--checkpoint", type=str, required=True, help="The path to the .fdsn checkpoint")
    infer.add_argument("-i", "--input", type=str, required=True, help="Equirectangular RGB PNG")
    infer.add_argument("--out", type=str, required=True, help="Output directory")
    infer.add_argument("-c", "--config", type=str, default=None, help="Config JSON file for the Settings section")
    infer.add_argument(
        "--reconstruct",
        action="store_true",
        help="Also write the semantic point cloud, room structure, free-floor and obstacle grids",
    )

    bench = commands.add_parser("bench", help="Measure forward-pass throughput")
    bench.add_argument("--checkpoint", type=str, default=None, help="Checkpoint; a freshly initialized model when omitted")
    bench.add_argument("-c", "--config", type=str, default=None, help="Config JSON file")
    bench.add_argument("--height", type=int, default=256, help="Panorama height, the width is twice as large")
    bench.add_argument("--iterations", type=int, default=10, help="Timed forward passes, at least 10")
    bench.add_argument("--out", type=str, default=None, help="Report JSON file; printed when omitted")

    gen_data = commands.add_parser("gen-data", help="Render a synthetic dataset split")
    gen_data.add_argument("--out", type=str, required=True, help="Dataset root")
    gen_data.add_argument("--count", type=int, default=8, help="Number of panoramas")
    gen_data.add_argument("--height", type=int, default=64, help="Panorama height, the width is twice as large")
    gen_data.add_argument("--seed", type=int, default=0, help="Scene seed")
    gen_data.add_argument("--split", type=str, default="train", help="Split name")
    gen_data.add_argument("--max-boxes", type=int, default=4, help="Maximum furniture boxes per room")
    return parser


def _trainer(config: typing.Optional[str]) -> panofourier.JointTrainer:
    if config is None:
        return panofourier.JointTrainer()
    return panofourier.JointTrainer.from_json(config, load_data=False)


def _emit(values: dict, out: typing.Optional[str]):
    text = json.dumps(values, indent=2)
    if out is None:
        print(text)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text)
    print(f"report written to {out}")


def run_train(args):
    trainer = panofourier.JointTrainer.from_json(args.config)
    if args.seed is not None:
        trainer.settings.seed = args.seed
    if args.mode is not None:
        trainer.settings.mode = MODES[args.mode]
    if args.out is not None:
        trainer.settings.out_dir = args.out
    if "mar" in args.loss_ablation:
        trainer.loss_weights.use_margin = False
    if "obj" in args.loss_ablation:
        trainer.loss_weights.use_object = False

    if args.ablation is not None:
        rows = trainer.run_ablation(args.ablation)
        _emit({"kind": args.ablation, "rows": rows}, None)
        return
    report = trainer.train()
    print(f"best checkpoint written to {trainer.checkpoint_path}")
    _emit(report.to_dict(), None)


def run_eval(args):
    trainer = _trainer(args.config)
    trainer.load_checkpoint(args.checkpoint)
    samples = load_split(args.data, args.split, depth_format=args.depth_format)
    for sample in samples:
        if (sample.height, sample.width) != (trainer.model_config.height, trainer.model_config.width):
            raise ValueError(
                f"sample {sample.sample_id} has extent {sample.width}x{sample.height} but the checkpoint expects "
                f"{trainer.model_config.width}x{trainer.model_config.height}"
            )
    report = trainer.evaluate(samples, oracle=args.oracle)
    _emit(report.to_dict(), args.out)


def run_infer(args):
    trainer = _trainer(args.config)
    trainer.load_checkpoint(args.checkpoint)
    written = trainer.infer(read_png(args.input), args.out, reconstruct=args.reconstruct)
    for name, path in written.items():
        print(f"{name}: {path}")


def run_bench(args):
    trainer = _trainer(args.config)
    if args.checkpoint is not None:
        trainer.load_checkpoint(args.checkpoint)
    _emit(trainer.benchmark(args.height, args.iterations), args.out)


def run_gen_data(args):
    panofourier.ModelConfig.check_extent(args.height, 2 * args.height)
    samples = generate_samples(args.count, args.height, seed=args.seed, prefix=args.split, max_boxes=args.max_boxes)
    manifest = write_dataset(args.out, args.split, samples)
    print(f"{len(samples)} panoramas written, manifest {manifest}")


COMMANDS = {"train": run_train, "eval": run_eval, "infer": run_infer, "bench": run_bench, "gen-data": run_gen_data}


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValueError, TypeError, FileNotFoundError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
