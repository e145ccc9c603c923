import numpy as np
import pytest


@pytest.fixture(scope="session")
def mini_dataset_path(tmp_path_factory):
    """Small real export from the simulator (6 elements, 60 trials)."""
    from arisim.feedback import export_dataset
    from arisim.montecarlo import Scenario

    path = tmp_path_factory.mktemp("data") / "qps_mini.csv"
    export_dataset(Scenario(m_elements=6), trials=60, seed=5, path=path)
    return path


@pytest.fixture(scope="session")
def mini_dataset(mini_dataset_path):
    from qpsae.data import load_dataset

    return load_dataset(mini_dataset_path)
