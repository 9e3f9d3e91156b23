"""Exact and statistical computations around the Farey group, Minkowski's
question-mark function and random matrix products."""

__version__ = "0.1.0"

from .exact import INF, Arc, ExtRational, IntMatrix2, arc_contains, arc_image, mediant, mobius_apply
from .farey import FareySequence, farey_pair_level, farey_sequence, stern_brocot_path
from .group import GroupElement, Tile, element_from_word, generator, multiply, sphere, tile, word_of
from .minkowski import Dyadic, mbar, measure_arc, question_mark, question_mark_cf, question_mark_inverse
from .orbit import (
    DistanceDistribution,
    convolution_cdf,
    distance_distribution,
    sphere_count_in_arc,
    stationarity_check,
    word_limit_table,
)
from .walk import (
    EnsembleStats,
    WalkConfig,
    WalkMeasure,
    angular_ecdf,
    clt_check,
    estimate_lyapunov,
    ks_distance,
    radial_profile,
    run_ensemble,
)
