"""Autoencoder suite for compressed RIS phase-shift feedback."""

__version__ = "0.1.0"

from .channel import ChannelParams, awgn_train, envelope
from .data import QpsDataset, load_dataset, split_train_eval
from .evaluate import evaluate_ber, evaluate_nmse, nmse_db
from .models import ARCHITECTURES, ModelSpec, build
from .train import EvalReport, TrainSpec, build_and_train, train

__all__ = [
    "ARCHITECTURES",
    "ChannelParams",
    "EvalReport",
    "ModelSpec",
    "QpsDataset",
    "TrainSpec",
    "awgn_train",
    "build",
    "build_and_train",
    "envelope",
    "evaluate_ber",
    "evaluate_nmse",
    "load_dataset",
    "nmse_db",
    "split_train_eval",
    "train",
]
