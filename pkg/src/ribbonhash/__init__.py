"""Rotation-robust perceptual hashing for color images.

The pipeline resizes and smooths an image, partitions its inscribed circle
into equal-area ring-ribbons, extracts local texture (per-ribbon quadtree
split counts) and local color (corner color-vector-angle variances) together
with global GLCM and color-moment features, and emits a fixed-length,
key-scrambled hash either by direct concatenation or by CCA feature fusion.
"""

from .attacks import (
    ManipulationSpec,
    apply_manipulation,
    attack_specs,
    central_crop_for_large_rotation,
    full_attack_matrix,
    rotate_image,
)
from .cca import CcaModel, cca_fit, cca_fuse, load_model, save_model
from .color import (
    CornerPoint,
    ReferenceColor,
    color_moments,
    color_vector_distance,
    cva_sin,
    harris_corners,
    local_color_vector,
    reference_color,
    select_boundary_corners,
)
from .config import Config, PRESETS, preset, read_config, write_config
from .errors import (
    ComparisonError,
    ConfigError,
    EmptyGlcmError,
    EvaluationError,
    IncompatibleIndexError,
    InvalidImageError,
    NumericalRankError,
    ParameterError,
    RibbonHashError,
)
from .evaluation import (
    DistanceSample,
    RocPoint,
    distance_histogram,
    distance_stats,
    key_security_sweep,
    roc_curve,
    tpr_fpr,
    wrong_key_pairs,
)
from .imaging import (
    GaussianMask,
    LumaImage,
    RgbImage,
    gaussian_filter,
    gaussian_mask,
    load_image,
    luminance,
    preprocess,
    resize_bilinear,
    rgb_to_ycbcr,
    save_png,
)
from .pipeline import (
    FeatureBundle,
    Hash,
    SecretKeys,
    concat_hash,
    extract_bundle,
    format_hash,
    generate_hash,
    parse_hash,
    permutation,
    scramble,
    unscramble,
)
from .rings import RibbonMap, assign_ribbons, ribbon_map, ribbon_radii
from .similarity import Verdict, classify, correlation_coefficient, euclidean_distance
from .store import HashIndex, HashIndexEntry, QueryResult
from .texture import (
    Glcm,
    QuadtreeParams,
    glcm,
    glcm_of_luma,
    glcm_scalars,
    local_texture_vector,
    quadtree_count,
    quantize_levels,
)

__version__ = "0.1.0"
