"""fpplab: a simulation laboratory for first-passage percolation on Z^2.

Deterministic lazily-evaluated random environments, exact geodesics with a
certified search box, pioneer-point tubes and restricted passage times,
limit-shape probes, and reproducible Monte-Carlo experiment harnesses.
"""

from .env import (
    Constant,
    EdgeKey,
    Environment,
    Exponential,
    GaussianCoupling,
    HORIZONTAL,
    ScaledShifted,
    StandardGaussian,
    Uniform,
    VERTICAL,
    combine_seed,
    coupling_h,
    coupling_h_inv,
    dist_spec,
    edge_between,
    edge_weight,
    parse_dist,
    perturb,
    perturb_environment,
)
from .geodesic import (
    LatticePath,
    SearchBox,
    geodesic,
    metric_ball,
    multi_geodesic,
    passage_time,
    path_time,
    subpath_between,
    symmetric_difference,
)
from .geometry import (
    IntervalJ,
    PioneerProfile,
    has_bounded_slope,
    in_tube,
    is_r_close,
    pioneer_profile,
)
from .restricted import (
    RestrictedQuery,
    RestrictedResult,
    attractive_interval,
    attractive_interval_detail,
    deviation,
    expected_pioneer_time,
    load_fixture,
    pioneer_passage_time,
    query_for_path,
    restricted_passage_time,
)
from .shape import (
    DirectionProbe,
    ShapeEstimate,
    berry_probe,
    flat_edge_test,
    linf_bound_check,
    shape_boundary,
    sides_probe_schedule,
    sides_witness,
    staircase_bound,
    time_constant,
)
from .experiments import (
    ExperimentConfig,
    attractiveness_diagnostic,
    box_event,
    coalescence_experiment,
    midpoint_experiment,
    mw_check_gaussian,
    mw_check_general,
    restricted_time_event,
    tail_fit,
    wrong_direction_probe,
)
from .reporting import ExperimentReport

__version__ = "0.1.0"
