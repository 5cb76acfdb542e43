import dataclasses

import numpy as np
import pytest

from ribbonhash import (
    Config,
    ConfigError,
    HashIndex,
    IncompatibleIndexError,
    ManipulationSpec,
    apply_manipulation,
    generate_hash,
    preset,
    read_config,
    write_config,
)


class TestConfig:
    def test_presets_match_published_settings(self):
        c = preset("concat-default")
        assert (c.scheme, c.side, c.n_ribbons, c.tau, c.variance_threshold) == (
            "concat",
            256,
            32,
            0.4,
            40.0,
        )
        c = preset("cca-default")
        assert (c.scheme, c.side, c.n_ribbons, c.tau, c.variance_threshold) == (
            "cca",
            512,
            67,
            0.4,
            14.0,
        )

    def test_hash_lengths(self):
        assert preset("concat-default").hash_length == 70
        assert preset("cca-default").hash_length == 70
        assert Config(scheme="concat", n_ribbons=10).hash_length == 26

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset("nope")

    def test_digest_tracks_hashing_parameters(self):
        base = Config()
        assert base.digest() == Config().digest()
        for field, value in [
            ("side", 128),
            ("n_ribbons", 16),
            ("tau", 0.5),
            ("variance_threshold", 10.0),
            ("scheme", "cca"),
            ("g_max", 8),
            ("mask_size", 5),
        ]:
            changed = dataclasses.replace(base, **{field: value})
            assert changed.digest() != base.digest(), field

    def test_xi_not_in_digest(self):
        assert Config(xi=740.0).digest() == Config(xi=500.0).digest()

    def test_validation(self):
        with pytest.raises(ConfigError):
            Config(scheme="md5")
        with pytest.raises(ConfigError):
            Config(side=4)
        with pytest.raises(ConfigError):
            Config(tau=0.0)
        with pytest.raises(ConfigError):
            Config(components=99)
        with pytest.raises(ConfigError):
            Config(xi=-1.0)

    def test_file_round_trip(self, tmp_path):
        cfg = Config(scheme="cca", side=128, n_ribbons=12, tau=0.3, ridge=0.5, components=10)
        path = tmp_path / "cfg.txt"
        write_config(cfg, path)
        assert read_config(path) == cfg

    def test_file_overrides_base(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("side = 128\nn_ribbons = 8\n# a comment\n\nxi = 300\n")
        cfg = read_config(path, base=preset("concat-default"))
        assert cfg.side == 128 and cfg.n_ribbons == 8 and cfg.xi == 300.0
        assert cfg.variance_threshold == 40.0  # inherited from the preset

    def test_file_errors(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("nonsense_key = 5\n")
        with pytest.raises(ConfigError):
            read_config(bad)
        bad.write_text("side 128\n")
        with pytest.raises(ConfigError):
            read_config(bad)
        bad.write_text("side = many\n")
        with pytest.raises(ConfigError):
            read_config(bad)


@pytest.fixture(scope="module")
def tiny_cfg():
    return Config(scheme="concat", side=64, n_ribbons=8, variance_threshold=40.0)


class TestHashIndex:
    def test_round_trip_query(self, tmp_path, desk5, keys, tiny_cfg):
        index = HashIndex(tmp_path / "idx.jsonl")
        hashes = [generate_hash(img, tiny_cfg, keys) for img in desk5[:3]]
        for i, h in enumerate(hashes):
            entry_id = index.add(h, label=f"img{i}", timestamp="t0")
            assert entry_id == i
        results = index.query(hashes[1], top_k=3, xi=tiny_cfg.xi)
        assert results[0].entry.label == "img1"
        assert results[0].distance == 0.0
        assert results[0].is_copy
        assert len(results) == 3

    def test_empty_index_returns_empty(self, tmp_path, desk5, keys, tiny_cfg):
        index = HashIndex(tmp_path / "fresh.jsonl")
        h = generate_hash(desk5[0], tiny_cfg, keys)
        assert index.query(h) == []

    def test_incompatible_config_rejected(self, tmp_path, desk5, keys, tiny_cfg):
        index = HashIndex(tmp_path / "idx.jsonl")
        index.add(generate_hash(desk5[0], tiny_cfg, keys), label="a", timestamp="t0")
        other_cfg = dataclasses.replace(tiny_cfg, n_ribbons=4)
        with pytest.raises(IncompatibleIndexError):
            index.query(generate_hash(desk5[0], other_cfg, keys))
        with pytest.raises(IncompatibleIndexError):
            index.add(generate_hash(desk5[0], other_cfg, keys), label="b")

    def test_incompatible_keys_rejected(self, tmp_path, desk5, keys, tiny_cfg):
        from ribbonhash import SecretKeys

        index = HashIndex(tmp_path / "idx.jsonl")
        index.add(generate_hash(desk5[0], tiny_cfg, keys), label="a", timestamp="t0")
        with pytest.raises(IncompatibleIndexError):
            index.query(generate_hash(desk5[0], tiny_cfg, SecretKeys(5, 5)))

    def test_jpeg_copy_ranks_first(self, tmp_path, desk5, keys, tiny_cfg):
        index = HashIndex(tmp_path / "idx.jsonl")
        for i, img in enumerate(desk5):
            index.add(generate_hash(img, tiny_cfg, keys), label=f"img{i}", timestamp="t0")
        copy = apply_manipulation(desk5[2], ManipulationSpec("jpeg", 85))
        results = index.query(generate_hash(copy, tiny_cfg, keys), top_k=2, xi=tiny_cfg.xi)
        assert results[0].entry.label == "img2"

    def test_entries_round_trip_values(self, tmp_path, desk5, keys, tiny_cfg):
        index = HashIndex(tmp_path / "idx.jsonl")
        h = generate_hash(desk5[0], tiny_cfg, keys)
        index.add(h, label="a", timestamp="t0")
        entry = index.entries()[0]
        np.testing.assert_allclose(entry.hash.values, h.values, rtol=1e-8)
        assert entry.timestamp == "t0"
