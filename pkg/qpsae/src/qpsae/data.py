"""QPS bit-dataset loading, validation, and the train/eval split.

The dataset is the simulator's export: CSV rows `user,element,b0..b{I-1}`
plus a `<path>.meta.json` sidecar pinning the bit width, seed, and config
hash. Loading validates the file against its sidecar so a stale or
regenerated dataset cannot silently drift under a trained model.
"""

import json
from dataclasses import dataclass, field

import numpy as np

USER_TAGS = ("near_1", "near_2", "far")

# Evaluation SNR penalty per user: the far user's feedback link spans twice
# the near-user distance, roughly -10 * alpha * log10(2) dB at alpha ~ 3.3.
DEFAULT_SNR_OFFSETS_DB = {"near_1": 0.0, "near_2": 0.0, "far": -10.0}


@dataclass
class QpsDataset:
    bits: np.ndarray  # (records, I) float32 in {0, 1}
    tags: np.ndarray  # (records,) int index into USER_TAGS
    sidecar: dict = field(default_factory=dict)

    @property
    def quant_bits(self) -> int:
        return self.bits.shape[1]

    def rows_for(self, tag: str) -> np.ndarray:
        return np.flatnonzero(self.tags == USER_TAGS.index(tag))


def load_dataset(path) -> QpsDataset:
    sidecar_path = str(path) + ".meta.json"
    try:
        with open(sidecar_path, encoding="ascii") as fh:
            sidecar = json.load(fh)
    except OSError as exc:
        raise OSError(f"missing dataset sidecar {sidecar_path}: {exc}") from exc

    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        bit_cols = header[2:]
        if header[:2] != ["user", "element"] or bit_cols != [f"b{k}" for k in range(len(bit_cols))]:
            raise ValueError(f"unexpected dataset header: {header}")
        if len(bit_cols) != sidecar.get("quant_bits"):
            raise ValueError(
                f"dataset carries {len(bit_cols)} bit columns but sidecar says "
                f"{sidecar.get('quant_bits')}"
            )
        tags, rows = [], []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if parts[0] not in USER_TAGS:
                raise ValueError(f"unknown user tag {parts[0]!r}")
            bits = [int(b) for b in parts[2:]]
            if len(bits) != len(bit_cols) or any(b not in (0, 1) for b in bits):
                raise ValueError(f"malformed bit row: {line!r}")
            tags.append(USER_TAGS.index(parts[0]))
            rows.append(bits)
    bits = np.asarray(rows, dtype=np.float32)
    tags = np.asarray(tags, dtype=np.int64)
    expected = sidecar.get("records_per_tag", {})
    for tag, want in expected.items():
        got = int(np.sum(tags == USER_TAGS.index(tag)))
        if got != want:
            raise ValueError(f"sidecar promises {want} rows for {tag}, file has {got}")
    return QpsDataset(bits=bits, tags=tags, sidecar=sidecar)


def split_train_eval(dataset: QpsDataset, eval_fraction: float = 0.1, seed: int = 0):
    """Stratified-by-tag split; returns (train_idx, eval_idx)."""
    if not 0.0 < eval_fraction < 1.0:
        raise ValueError("eval_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_parts, eval_parts = [], []
    for t in range(len(USER_TAGS)):
        idx = np.flatnonzero(dataset.tags == t)
        rng.shuffle(idx)
        n_eval = max(1, int(round(eval_fraction * idx.size))) if idx.size else 0
        eval_parts.append(idx[:n_eval])
        train_parts.append(idx[n_eval:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(eval_parts))
