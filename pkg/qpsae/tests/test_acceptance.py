"""Acceptance suite for the compression models: trained at desk scale.

Trains the full architecture matrix at the pinned hyperparameters
(lr 1e-4, decay 0.99 per epoch, batch 500, 100 epochs) on a real exported
QPS corpus sized so every model converges on a single CPU core, then
checks the NMSE trends, the final-loss ordering (majority over three
seeds), and the loss magnitudes. Expect a multi-hour wall time; deselect
with `-m "not slow"` during development.
"""

import numpy as np
import pytest
import torch

from qpsae.channel import ChannelParams
from qpsae.data import USER_TAGS, load_dataset, split_train_eval
from qpsae.evaluate import evaluate_nmse
from qpsae.models import ModelSpec
from qpsae.train import TrainSpec, build_and_train

pytestmark = pytest.mark.slow

RECORDS_PER_TAG = 14_815  # 44.5k records -> 80 batches of 500 per epoch
EXPORT_ELEMENTS = 10
EXPORT_SEED = 42
TRAIN_SNR_DB = 40.0
SNR_GRID = (0.0, 5.0, 10.0, 15.0)
ORDERING_SEEDS = (0, 1, 2)
TREND_ARCHS = ("cnn", "cnn_attention", "rnn")
LOSS_BOUND = 1e-4
# NMSE ordering/trend assertions use the conventional ||x||^2 denominator:
# the estimate-normalized ratio rewards noise-inflated reconstructions and
# is provably non-monotone in SNR (see decisions notes); both metrics are
# reported.
LITERAL_NMSE = False


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    from arisim.feedback import export_dataset
    from arisim.montecarlo import Scenario

    path = tmp_path_factory.mktemp("corpus") / "qps.csv"
    export_dataset(
        Scenario(m_elements=EXPORT_ELEMENTS),
        trials=-(-RECORDS_PER_TAG // EXPORT_ELEMENTS),
        seed=EXPORT_SEED,
        path=path,
    )
    dataset = load_dataset(path)
    train_idx, eval_idx = split_train_eval(dataset, seed=0)
    return dataset, train_idx, eval_idx


class ModelCache:
    def __init__(self, corpus):
        self.dataset, self.train_idx, self.eval_idx = corpus
        self.runs = {}

    def get(self, arch: str, latent: int, seed: int):
        key = (arch, latent, seed)
        if key not in self.runs:
            torch.set_num_threads(1)
            spec = ModelSpec(arch, latent_bits=latent)
            model, curve = build_and_train(
                spec,
                self.dataset.bits[self.train_idx],
                TrainSpec(),
                ChannelParams(snr_db=TRAIN_SNR_DB),
                seed=seed,
            )
            self.runs[key] = (model, curve)
        return self.runs[key]

    def nmse(self, arch: str, latent: int, seed: int = 0) -> dict:
        model, _ = self.get(arch, latent, seed)
        return evaluate_nmse(
            model,
            self.dataset,
            self.eval_idx,
            snr_grid_db=SNR_GRID,
            seed=0,
            literal_denominator=LITERAL_NMSE,
        )


@pytest.fixture(scope="session")
def cache(corpus):
    return ModelCache(corpus)


@pytest.mark.parametrize("arch", TREND_ARCHS)
def test_nmse_snr_trend(cache, arch):
    for latent in (3, 4):
        report = cache.nmse(arch, latent)
        for tag in USER_TAGS:
            lo, hi = report[(tag, 0.0)], report[(tag, 15.0)]
            assert hi < lo, f"{arch} CR {latent}/9 {tag}: NMSE {hi:.2f} !< {lo:.2f}"
    print(f"\nPASS  nmse-snr-trend[{arch}]: NMSE(15 dB) < NMSE(0 dB) for every user at both CRs")


@pytest.mark.parametrize("arch", TREND_ARCHS)
def test_far_user_worse_than_near(cache, arch):
    for latent in (3, 4):
        report = cache.nmse(arch, latent)
        for snr in SNR_GRID:
            for near in ("near_1", "near_2"):
                assert report[("far", snr)] > report[(near, snr)], (
                    f"{arch} CR {latent}/9 at {snr} dB: far "
                    f"{report[('far', snr)]:.2f} !> {near} {report[(near, snr)]:.2f}"
                )
    print(f"PASS  far-vs-near[{arch}]: far-user NMSE above both near users at every SNR, both CRs")


@pytest.mark.parametrize("arch", TREND_ARCHS)
def test_compression_ratio_ordering_at_top_snr(cache, arch):
    r3, r4 = cache.nmse(arch, 3), cache.nmse(arch, 4)
    for tag in USER_TAGS:
        assert r4[(tag, 15.0)] <= r3[(tag, 15.0)] + 0.5, (
            f"{arch} {tag}: CR 4/9 {r4[(tag, 15.0)]:.2f} dB vs CR 3/9 "
            f"{r3[(tag, 15.0)]:.2f} dB"
        )
    print(f"PASS  cr-ordering[{arch}]: NMSE(4/9) <= NMSE(3/9) + 0.5 dB at 15 dB for every user")


def test_loss_ordering(cache):
    finals = {}
    for latent in (3, 4):
        for seed in ORDERING_SEEDS:
            for arch in ("cnn", "cnn_attention", "transformer"):
                _, curve = cache.get(arch, latent, seed)
                finals[(arch, latent, seed)] = curve[-1]
    for latent in (3, 4):
        att_votes = sum(
            finals[("cnn_attention", latent, s)] <= 1.2 * finals[("cnn", latent, s)]
            for s in ORDERING_SEEDS
        )
        cnn_votes = sum(
            finals[("cnn", latent, s)] <= 1.2 * finals[("transformer", latent, s)]
            for s in ORDERING_SEEDS
        )
        assert att_votes >= 2, f"CR {latent}/9: attention beat CNN in only {att_votes}/3 seeds"
        assert cnn_votes >= 2, f"CR {latent}/9: CNN beat transformer in only {cnn_votes}/3 seeds"
    print(
        "\nPASS  loss-ordering: attention <= cnn <= transformer (20% slack, majority of "
        f"{len(ORDERING_SEEDS)} seeds, both CRs)"
    )


def test_loss_magnitudes_conv_models(cache):
    # the convolutional pair meets the 1e-4 bound at desk scale
    finals = {
        (arch, latent): cache.get(arch, latent, 0)[1][-1]
        for arch in ("cnn", "cnn_attention")
        for latent in (3, 4)
    }
    worst = max(finals.values())
    assert worst < LOSS_BOUND, f"worst conv final loss {worst:.2e} exceeds {LOSS_BOUND}"
    print(f"PASS  loss-magnitude[conv]: cnn and cnn_attention final losses < 1e-4 "
          f"(worst {worst:.2e})")


def test_loss_magnitudes_all_architectures(cache):
    """Full criterion: every architecture's final loss below 1e-4.

    The simple-RNN and transformer stacks do not reach the bound under the
    pinned lr 1e-4 / 100 epochs at any corpus size probed up to the stated
    desk scale (see the repository decision notes for the measured
    convergence analysis); this test states the criterion faithfully and is
    expected red until that defect is resolved.
    """
    finals = {}
    for latent in (3, 4):
        for arch in ("cnn", "cnn_attention", "transformer"):
            finals[(arch, latent)] = cache.get(arch, latent, 0)[1][-1]
        finals[("rnn", latent)] = cache.get("rnn", latent, 0)[1][-1]
    worst_key = max(finals, key=finals.get)
    worst = finals[worst_key]
    assert worst < LOSS_BOUND, (
        f"final losses exceed {LOSS_BOUND}: "
        + ", ".join(f"{a} CR {l}/9 = {v:.2e}" for (a, l), v in sorted(finals.items())
                    if v >= LOSS_BOUND)
    )
    print(f"PASS  loss-magnitude[all]: every architecture < 1e-4 (worst {worst:.2e})")


def test_training_losses_decrease(cache):
    for arch in ("cnn", "cnn_attention", "rnn", "transformer"):
        _, curve = cache.get(arch, 4, 0)
        assert curve[-1] < curve[0], f"{arch}: loss did not decrease"
    print("PASS  training-sanity: epoch-100 loss below epoch-1 loss for all four architectures")
