"""Train/eval entry points emitting loss.csv and nmse.csv."""

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

import torch

from .channel import ChannelParams
from .data import load_dataset, split_train_eval
from .evaluate import DEFAULT_SNR_GRID_DB, evaluate_nmse
from .models import ARCHITECTURES, ModelSpec, build
from .train import TrainSpec, build_and_train


def _model_path(out_dir: Path, spec: ModelSpec) -> Path:
    cr = spec.compression_ratio.replace("/", "_")
    return out_dir / f"{spec.architecture}_cr{cr}.pt"


def _append_csv(path: Path, header: str, rows):
    fresh = not path.exists()
    with open(path, "a", encoding="ascii", newline="\n") as fh:
        if fresh:
            fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def save_model(path, model, spec: ModelSpec):
    torch.save({"spec": asdict(spec), "state_dict": model.state_dict()}, path)


def load_model(path):
    payload = torch.load(path, weights_only=False)
    spec = ModelSpec(**payload["spec"])
    model = build(spec)
    model.load_state_dict(payload["state_dict"])
    return model, spec


def _cmd_train(args) -> int:
    dataset = load_dataset(args.dataset)
    spec = ModelSpec(
        architecture=args.arch,
        input_bits=dataset.quant_bits,
        latent_bits=args.latent_bits,
    )
    trainspec = TrainSpec(lr=args.lr, decay=args.decay, batch=args.batch, epochs=args.epochs)
    channel = ChannelParams(snr_db=args.train_snr)
    if args.train_snr_range:
        lo, hi = (float(v) for v in args.train_snr_range.split(","))
        channel.snr_range_db = (lo, hi)
    train_idx, _ = split_train_eval(dataset, seed=args.seed)
    model, curve = build_and_train(
        spec, dataset.bits[train_idx], trainspec, channel, seed=args.seed
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = _model_path(out_dir, spec)
    save_model(model_path, model, spec)
    _append_csv(
        out_dir / "loss.csv",
        "model,cr,epoch,loss",
        (
            (spec.architecture, spec.compression_ratio, epoch + 1, f"{loss:.10g}")
            for epoch, loss in enumerate(curve)
        ),
    )
    print(f"trained {spec.architecture} CR {spec.compression_ratio}: "
          f"final loss {curve[-1]:.3e}, saved {model_path}")
    return 0


def _cmd_eval(args) -> int:
    model, spec = load_model(args.model)
    dataset = load_dataset(args.dataset)
    if dataset.quant_bits != spec.input_bits:
        print(
            f"error: model expects {spec.input_bits}-bit words, dataset has "
            f"{dataset.quant_bits}",
            file=sys.stderr,
        )
        return 2
    _, eval_idx = split_train_eval(dataset, seed=args.seed)
    grid = [float(v) for v in args.snr_grid.split(",")]
    report = evaluate_nmse(model, dataset, eval_idx, snr_grid_db=grid, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _append_csv(
        out_dir / "nmse.csv",
        "model,cr,user,snr_db,nmse_db",
        (
            (spec.architecture, spec.compression_ratio, tag, f"{snr:g}", f"{val:.6f}")
            for (tag, snr), val in sorted(report.items())
        ),
    )
    from .evaluate import evaluate_ber

    ber = evaluate_ber(model, dataset, eval_idx, snr_db=max(grid), seed=args.seed)
    print(f"evaluated {spec.architecture} CR {spec.compression_ratio} at {grid} dB; "
          f"thresholded bit-error diagnostic at {max(grid):g} dB: {ber:.4f}")
    return 0


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="qpsae", description="QPS feedback-compression autoencoder suite"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one architecture on a QPS dataset")
    p_train.add_argument("--dataset", required=True)
    p_train.add_argument("--arch", choices=ARCHITECTURES, required=True)
    p_train.add_argument("--latent-bits", type=int, default=4)
    p_train.add_argument("--epochs", type=int, default=100)
    p_train.add_argument("--batch", type=int, default=500)
    p_train.add_argument("--lr", type=float, default=1e-4)
    p_train.add_argument("--decay", type=float, default=0.99)
    p_train.add_argument("--train-snr", type=float, default=40.0)
    p_train.add_argument("--train-snr-range", help="lo,hi dB for per-batch uniform draws")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", default="runs")

    p_eval = sub.add_parser("eval", help="NMSE vs SNR for a trained model")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--snr-grid", default=",".join(str(v) for v in DEFAULT_SNR_GRID_DB))
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", default="runs")

    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            return _cmd_train(args)
        return _cmd_eval(args)
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
