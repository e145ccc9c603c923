"""End-to-end training of the compression autoencoders.

Adam at lr 1e-4 with a 0.99 exponential decay per epoch, batch 500, MSE
loss, 100 epochs. The channel between encoder and decoder during training
is the constant-coefficient AWGN path; the faded envelope channel is an
evaluation-time model (see channel.py docstring).
"""

from dataclasses import dataclass, field

import numpy as np
import torch

from .channel import ChannelParams, awgn_train
from .models import ModelSpec, build


@dataclass
class TrainSpec:
    lr: float = 1e-4
    decay: float = 0.99  # multiplicative, applied once per epoch
    batch: int = 500
    epochs: int = 100
    adam_betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.batch < 1 or self.epochs < 1:
            raise ValueError("batch and epochs must be positive")


@dataclass
class EvalReport:
    nmse_db: dict = field(default_factory=dict)  # (user_tag, snr_db) -> dB
    final_loss: float = float("nan")
    loss_curve: list = field(default_factory=list)


def train(model, train_bits: np.ndarray, trainspec: TrainSpec, channel: ChannelParams,
          seed: int = 0) -> list:
    """Train in place; returns the per-epoch mean MSE curve."""
    if train_bits.ndim != 2 or train_bits.shape[0] < trainspec.batch:
        raise ValueError(
            f"training set of {train_bits.shape} rows cannot fill a "
            f"{trainspec.batch}-row batch"
        )
    gen = torch.Generator().manual_seed(seed)
    x_all = torch.as_tensor(train_bits, dtype=torch.float32)
    opt = torch.optim.Adam(
        model.parameters(), lr=trainspec.lr, betas=trainspec.adam_betas, eps=trainspec.adam_eps
    )
    sched = torch.optim.lr_scheduler.ExponentialLR(opt, gamma=trainspec.decay)
    n = x_all.shape[0]
    curve = []
    model.train()
    for _ in range(trainspec.epochs):
        order = torch.randperm(n, generator=gen)
        total, batches = 0.0, 0
        for start in range(0, n - trainspec.batch + 1, trainspec.batch):
            x = x_all[order[start:start + trainspec.batch]]
            z = model.encode(x)
            z_noisy = awgn_train(z, channel, generator=gen)
            x_hat = model.decode(z_noisy)
            loss = torch.mean((x_hat - x) ** 2)
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss)
            batches += 1
        sched.step()
        curve.append(total / batches)
    return curve


def build_and_train(spec: ModelSpec, train_bits: np.ndarray, trainspec: TrainSpec,
                    channel: ChannelParams, seed: int = 0):
    """Seeded build + train; returns (model, loss_curve)."""
    torch.manual_seed(seed)
    model = build(spec)
    curve = train(model, train_bits, trainspec, channel, seed=seed)
    return model, curve
