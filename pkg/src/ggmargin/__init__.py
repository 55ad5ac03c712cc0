"""Gabriel-graph large-margin classifiers.

Builds the Gabriel graph of a dataset, filters low-quality samples by their
graph-neighborhood memberships, recomputes the graph incrementally after
filtering, and trains margin classifiers on the surviving support structure.
"""

from .dataset import Dataset, Preprocessing
from .errors import (
    DataError,
    DuplicateSampleError,
    EmptyClassError,
    EmptySupportError,
    GGMarginError,
    NumericalError,
    SplitError,
    UndefinedMetricError,
    UsageError,
)
from .graph import (
    GabrielGraph,
    SupportEdge,
    SupportStructure,
    build_graph,
    build_graph_with_witness,
    edge_list,
    extract_support,
    is_gabriel_edge,
    recompute_after_removal,
    to_dot,
)
from .regularization import (
    FilterModel,
    all_memberships,
    class_thresholds,
    filter_samples,
    gaussian_kernel,
    membership_cardinality,
    membership_distance,
    membership_report,
)
from .classifier import (
    ARCHITECTURES,
    ActivationVector,
    EdgeEndpoints,
    TrainedModel,
    build_chipclass,
    chip_activation,
    chip_activation_derivative,
    chip_activation_matrix,
    chip_edge_weight,
    chipclass_predict,
    fit_multiclass,
    fit_ssv_binary,
    predict_proba,
    softmax,
    tanh_activation,
    tanh_activation_matrix,
    tanh_activation_raw,
)
from .numeric import (
    LeastSquaresProblem,
    MetricReport,
    auc_binary,
    pairwise_sq_dists,
    roc_auc_ovo,
    solve_least_squares,
    stable_sigmoid,
)
from .harness import (
    BenchmarkRecord,
    ExperimentConfig,
    PipelineResult,
    bench_recompute,
    benchmark_csv_rows,
    fit_pipeline,
    format_report_table,
    load_csv,
    report_to_dict,
    run_nested_cv,
    standardize,
    stratified_kfold,
)
from .cli import cli_dispatch

__version__ = "0.1.0"
