import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ribbonhash import SecretKeys, save_png, synthetic

KEYS = SecretKeys(k1=101, k2=202)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def keys():
    return KEYS


@pytest.fixture(scope="session")
def desk5():
    return synthetic.desk_corpus(5)


@pytest.fixture(scope="session")
def desk20(desk5):
    return desk5 + synthetic.desk_corpus(20)[5:]


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, desk20):
    """The 20-image desk corpus written out as PNG files."""
    root = tmp_path_factory.mktemp("corpus")
    for i, img in enumerate(desk20):
        save_png(img, root / f"desk_{i:02d}.png")
    return root


@pytest.fixture(scope="session")
def small_corpus_dir(tmp_path_factory, desk5):
    root = tmp_path_factory.mktemp("small_corpus")
    for i, img in enumerate(desk5[:3]):
        save_png(img, root / f"desk_{i}.png")
    return root
