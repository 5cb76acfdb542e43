"""Command-line surface: hashing, comparison, attacks, fitting, evaluation.

Exit codes: 0 success (or "similar" for compare), 1 "different" for compare,
2 any error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluation
from .attacks import (
    LARGE_ROTATION_CROP,
    apply_manipulation,
    attack_specs,
    central_crop_for_large_rotation,
)
from .cca import cca_fit, load_model, save_model
from .color import harris_corners, select_boundary_corners
from .config import Config, PRESETS, preset, read_config
from .errors import ConfigError, RibbonHashError
from .evaluation import DistanceSample
from .imaging import RgbImage, load_image, luminance, preprocess, save_png
from .pipeline import SecretKeys, extract_bundle, format_hash, generate_hash
from .rings import ribbon_map
from .similarity import classify, euclidean_distance
from .store import HashIndex

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    parser.add_argument("--config", metavar="FILE", help="flat key=value config file")
    parser.add_argument("--model", metavar="FILE", help="fitted CCA model (cca scheme)")
    parser.add_argument("--key1", type=lambda s: int(s, 0), default=None, help="feature-stage key")
    parser.add_argument("--key2", type=lambda s: int(s, 0), default=None, help="hash-stage key")


def _resolve_config(args) -> Config:
    cfg = preset(args.preset) if args.preset else Config()
    if args.config:
        cfg = read_config(args.config, base=cfg)
    return cfg


def _resolve_keys(args) -> SecretKeys:
    k1 = args.key1
    k2 = args.key2
    if k1 is None:
        k1 = int(os.environ.get("RIBBONHASH_KEY1", "0"), 0)
    if k2 is None:
        k2 = int(os.environ.get("RIBBONHASH_KEY2", "0"), 0)
    return SecretKeys(k1=k1, k2=k2)


def _resolve_model(args, cfg: Config):
    if cfg.scheme != "cca":
        return None
    if not args.model:
        raise ConfigError("the cca scheme needs --model FILE (see `ribbonhash fit-model`)")
    return load_model(args.model)


def _corpus_paths(directory: str) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ConfigError(f"{directory} is not a directory")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise ConfigError(f"no images ({', '.join(IMAGE_SUFFIXES)}) under {directory}")
    return paths


def _write_debug_art(image: RgbImage, cfg: Config, keys: SecretKeys, out_dir: str) -> None:
    """False-color ribbon raster and selected-corner overlay, for inspection."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    secondary = preprocess(image, cfg.side, cfg.mask_size, cfg.sigma)
    ribbons = ribbon_map(cfg.side, cfg.n_ribbons)
    phase = ribbons.labels * (2.0 * np.pi / max(cfg.n_ribbons, 1))
    art = np.stack(
        [
            127.5 * (1 + np.sin(phase)),
            127.5 * (1 + np.sin(phase + 2.1)),
            127.5 * (1 + np.sin(phase + 4.2)),
        ],
        axis=-1,
    )
    art[ribbons.labels == 0] = 0.0
    save_png(RgbImage(np.clip(art, 0, 255)), out / "ribbons.png")

    overlay = secondary.pixels.copy()
    selected = select_boundary_corners(
        harris_corners(luminance(secondary)), ribbons, cfg.tau, key=keys.k1
    )
    for pts in selected:
        for p in pts:
            r0, r1 = max(p.row - 1, 0), min(p.row + 2, cfg.side)
            c0, c1 = max(p.col - 1, 0), min(p.col + 2, cfg.side)
            overlay[r0:r1, c0:c1] = (255.0, 0.0, 0.0)
    save_png(RgbImage(overlay), out / "corners.png")


def cmd_hash(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    model = _resolve_model(args, cfg)
    h = generate_hash(load_image(args.image), cfg, keys, model)
    print(format_hash(h))
    if args.index:
        entry_id = HashIndex(args.index).add(h, label=args.label or args.image)
        print(f"indexed as entry {entry_id} in {args.index}", file=sys.stderr)
    if args.debug_dir:
        _write_debug_art(load_image(args.image), cfg, keys, args.debug_dir)
    return 0


def cmd_compare(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    model = _resolve_model(args, cfg)
    xi = args.xi if args.xi is not None else cfg.xi
    h1 = generate_hash(load_image(args.image_a), cfg, keys, model)
    h2 = generate_hash(load_image(args.image_b), cfg, keys, model)
    verdict = classify(euclidean_distance(h1, h2), xi)
    print(f"distance={verdict.distance:.9g} xi={xi:g} verdict={verdict.decision}")
    return 0 if verdict.similar else 1


def cmd_attack(args) -> int:
    img = load_image(args.image)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    count = 0
    for spec in attack_specs(base_seed=args.seed):
        attacked = apply_manipulation(img, spec)
        save_png(attacked, out / f"{stem}__{spec.label()}.png")
        count += 1
    print(f"wrote {count} manipulated images to {out}")
    return 0


def cmd_fit_model(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    paths = _corpus_paths(args.corpus)
    if len(paths) < 2:
        raise ConfigError(f"need at least 2 training images, found {len(paths)}")
    h1_rows, h2_rows = [], []
    for path in paths:
        bundle = extract_bundle(load_image(path), cfg, k1=keys.k1)
        h1_rows.append(bundle.texture_view())
        h2_rows.append(bundle.color_view())
    model = cca_fit(
        np.array(h1_rows),
        np.array(h2_rows),
        e=cfg.components,
        ridge=cfg.ridge,
        config_digest=cfg.digest(),
    )
    save_model(model, args.out_model)
    lams = ", ".join(f"{v:.4f}" for v in model.lambdas[:8])
    print(
        f"fitted CCA on {model.sample_count} images: dim={model.dim} e={model.e} "
        f"ridge={model.ridge:.6g} lambda=[{lams}{', ...' if model.e > 8 else ''}]"
    )
    print(f"model written to {args.out_model}")
    return 0


def run_evaluation(
    paths: list[Path],
    cfg: Config,
    keys: SecretKeys,
    out_dir: Path,
    seed: int,
    wrong_key_count: int,
    model=None,
):
    """Attack every corpus image, collect distances, and emit the CSV reports.

    Returns the collected DistanceSamples so callers can post-process them.
    """
    images = [load_image(p) for p in paths]
    if cfg.scheme == "cca" and model is None:
        h1_rows, h2_rows = [], []
        for img in images:
            b = extract_bundle(img, cfg, k1=keys.k1)
            h1_rows.append(b.texture_view())
            h2_rows.append(b.color_view())
        model = cca_fit(
            np.array(h1_rows), np.array(h2_rows), e=cfg.components, ridge=cfg.ridge,
            config_digest=cfg.digest(),
        )

    samples: list[DistanceSample] = []
    originals = []
    for i, (path, img) in enumerate(zip(paths, images)):
        orig = generate_hash(img, cfg, keys, model)
        originals.append(orig)
        crop_ref = None
        for spec in attack_specs(base_seed=seed * 100 + i):
            attacked = apply_manipulation(img, spec)
            if spec.kind == "large_rotate" and min(img.width, img.height) >= LARGE_ROTATION_CROP:
                if crop_ref is None:
                    crop_ref = generate_hash(
                        central_crop_for_large_rotation(img), cfg, keys, model
                    )
                h = generate_hash(central_crop_for_large_rotation(attacked), cfg, keys, model)
                d = euclidean_distance(crop_ref, h)
            else:
                h = generate_hash(attacked, cfg, keys, model)
                d = euclidean_distance(orig, h)
            samples.append(
                DistanceSample(
                    pair_id=f"{path.name}:{spec.label()}",
                    kind="similar",
                    distance=d,
                    tag=spec.kind,
                )
            )
    for i in range(len(originals)):
        for j in range(i + 1, len(originals)):
            samples.append(
                DistanceSample(
                    pair_id=f"{paths[i].name}:{paths[j].name}",
                    kind="different",
                    distance=euclidean_distance(originals[i], originals[j]),
                )
            )

    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_stats_csv(
        out_dir / "stats.csv", evaluation.distance_stats([s for s in samples if s.kind == "similar"])
    )
    if any(s.kind == "different" for s in samples):
        points, auc = evaluation.roc_curve(samples)
        evaluation.write_roc_csv(out_dir / "roc.csv", points)
        evaluation.write_hist_csv(out_dir / "hist.csv", evaluation.distance_histogram(samples))
    else:
        auc = None
    if wrong_key_count > 0:
        wrong = evaluation.wrong_key_pairs(wrong_key_count, keys, seed=seed)
        dists = evaluation.key_security_sweep(images[0], keys, wrong, cfg, model)
        evaluation.write_keys_csv(out_dir / "keys.csv", dists)
    return samples, auc


def cmd_evaluate(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    model = load_model(args.model) if args.model else None
    paths = _corpus_paths(args.corpus)
    samples, auc = run_evaluation(
        paths, cfg, keys, Path(args.out), args.seed, args.wrong_keys, model
    )
    n_sim = sum(1 for s in samples if s.kind == "similar")
    n_diff = sum(1 for s in samples if s.kind == "different")
    msg = f"evaluated {len(paths)} images: {n_sim} similar pairs, {n_diff} different pairs"
    if auc is not None:
        msg += f", AUC={auc:.4f}"
    print(msg)
    print(f"reports written to {args.out}")
    return 0


def cmd_index_add(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    model = _resolve_model(args, cfg)
    index = HashIndex(args.index_file)
    for image in args.images:
        h = generate_hash(load_image(image), cfg, keys, model)
        entry_id = index.add(h, label=image)
        print(f"{image} -> entry {entry_id}")
    return 0


def cmd_index_query(args) -> int:
    cfg = _resolve_config(args)
    keys = _resolve_keys(args)
    model = _resolve_model(args, cfg)
    xi = args.xi if args.xi is not None else cfg.xi
    h = generate_hash(load_image(args.image), cfg, keys, model)
    results = HashIndex(args.index_file).query(h, top_k=args.top_k, xi=xi)
    if not results:
        print("index is empty")
        return 0
    for r in results:
        flag = "COPY" if r.is_copy else "    "
        print(f"{flag} distance={r.distance:.9g} id={r.entry.entry_id} label={r.entry.label}")
    return 0


def cmd_keys_check(args) -> int:
    keys = _resolve_keys(args)
    print(f"key fingerprint: {keys.fingerprint()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ribbonhash",
        description="Rotation-robust perceptual color-image hashing and evaluation tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", help="hash one image")
    p.add_argument("image")
    _add_common(p)
    p.add_argument("--index", metavar="FILE", help="also append the hash to this index")
    p.add_argument("--label", help="label stored with the index entry")
    p.add_argument("--debug-dir", metavar="DIR", help="dump ribbon/corner debug images")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("compare", help="compare two images (exit 0 similar, 1 different)")
    p.add_argument("image_a")
    p.add_argument("image_b")
    _add_common(p)
    p.add_argument("--xi", type=float, default=None, help="decision threshold")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("attack", help="write the 82 standard manipulated variants")
    p.add_argument("image")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("fit-model", help="fit the CCA fusion model on an image corpus")
    p.add_argument("corpus", metavar="CORPUS_DIR")
    _add_common(p)
    p.add_argument("--out-model", required=True, metavar="FILE")
    p.set_defaults(func=cmd_fit_model)

    p = sub.add_parser("evaluate", help="robustness/discrimination/key-security reports")
    p.add_argument("corpus", metavar="CORPUS_DIR")
    _add_common(p)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wrong-keys", type=int, default=100, help="size of the wrong-key sweep")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("index", help="copy-detection hash index")
    isub = p.add_subparsers(dest="index_command", required=True)
    pa = isub.add_parser("add", help="hash images and append them to an index")
    pa.add_argument("index_file")
    pa.add_argument("images", nargs="+")
    _add_common(pa)
    pa.set_defaults(func=cmd_index_add)
    pq = isub.add_parser("query", help="find the nearest indexed hashes")
    pq.add_argument("index_file")
    pq.add_argument("image")
    _add_common(pq)
    pq.add_argument("--top-k", type=int, default=5)
    pq.add_argument("--xi", type=float, default=None)
    pq.set_defaults(func=cmd_index_query)

    p = sub.add_parser("keys", help="key utilities")
    ksub = p.add_subparsers(dest="keys_command", required=True)
    pk = ksub.add_parser("check", help="print the fingerprint of the active keys")
    pk.add_argument("--key1", type=lambda s: int(s, 0), default=None)
    pk.add_argument("--key2", type=lambda s: int(s, 0), default=None)
    pk.set_defaults(func=cmd_keys_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RibbonHashError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
