"""Dataset loading, sidecar validation, and the stratified split."""

import json
import shutil

import numpy as np
import pytest

from qpsae.data import USER_TAGS, load_dataset, split_train_eval


def test_load_real_export(mini_dataset):
    assert mini_dataset.quant_bits == 9
    assert mini_dataset.bits.shape == (3 * 6 * 60, 9)
    assert set(np.unique(mini_dataset.bits)) == {0.0, 1.0}
    for tag in USER_TAGS:
        assert mini_dataset.rows_for(tag).size == 360
    assert mini_dataset.sidecar["config_hash"]


def test_bits_roughly_balanced(mini_dataset):
    # quantized phases of faded links are near uniform, so bit means sit
    # near one half
    means = mini_dataset.bits.mean(axis=0)
    assert np.all(means > 0.35) and np.all(means < 0.65)


def test_missing_sidecar_rejected(mini_dataset_path, tmp_path):
    orphan = tmp_path / "orphan.csv"
    shutil.copy(mini_dataset_path, orphan)
    with pytest.raises(OSError):
        load_dataset(orphan)


def test_sidecar_bit_width_mismatch(mini_dataset_path, tmp_path):
    csv = tmp_path / "d.csv"
    shutil.copy(mini_dataset_path, csv)
    meta = json.loads(open(str(mini_dataset_path) + ".meta.json").read())
    meta["quant_bits"] = 7
    (tmp_path / "d.csv.meta.json").write_text(json.dumps(meta))
    with pytest.raises(ValueError):
        load_dataset(csv)


def test_sidecar_count_mismatch(mini_dataset_path, tmp_path):
    csv = tmp_path / "d.csv"
    shutil.copy(mini_dataset_path, csv)
    meta = json.loads(open(str(mini_dataset_path) + ".meta.json").read())
    meta["records_per_tag"]["far"] += 1
    (tmp_path / "d.csv.meta.json").write_text(json.dumps(meta))
    with pytest.raises(ValueError):
        load_dataset(csv)


def test_malformed_rows_rejected(mini_dataset_path, tmp_path):
    csv = tmp_path / "d.csv"
    lines = open(mini_dataset_path).read().splitlines()
    lines[1] = lines[1].replace("1", "2", 1)
    csv.write_text("\n".join(lines) + "\n")
    shutil.copy(str(mini_dataset_path) + ".meta.json", str(csv) + ".meta.json")
    with pytest.raises(ValueError):
        load_dataset(csv)


def test_split_is_stratified_and_seeded(mini_dataset):
    train_idx, eval_idx = split_train_eval(mini_dataset, eval_fraction=0.1, seed=3)
    assert np.intersect1d(train_idx, eval_idx).size == 0
    assert train_idx.size + eval_idx.size == mini_dataset.bits.shape[0]
    for tag in USER_TAGS:
        rows = mini_dataset.rows_for(tag)
        n_eval = np.isin(eval_idx, rows).sum()
        assert n_eval == 36  # 10% of 360 per tag
    again = split_train_eval(mini_dataset, eval_fraction=0.1, seed=3)
    np.testing.assert_array_equal(again[1], eval_idx)
    other = split_train_eval(mini_dataset, eval_fraction=0.1, seed=4)
    assert not np.array_equal(other[1], eval_idx)


def test_split_rejects_bad_fraction(mini_dataset):
    with pytest.raises(ValueError):
        split_train_eval(mini_dataset, eval_fraction=0.0)
