"""Learning radial grid topology and line parameters from quantized meter data.

The package covers the full pipeline: linearized power flow on a radial
network, uniformly dithered quantization of the resulting injection
measurements, assembly of the sensing operator over the complete-graph edge
set, a projected-gradient solver for the l1-ball constrained least-squares
estimate, closed-form error-bound calculators, and an experiment harness that
sweeps sample size and bin width.
"""

from gridquant.graph import (
    TopologyError,
    TreeTopology,
    algebraic_connectivity,
    all_edges,
    complete_incidence,
    edge_index,
    edge_pair,
    is_radial,
    laplacian_from_weights,
    max_weight_spanning_tree,
    num_edges,
    num_nodes,
    random_spanning_tree,
    tree_incidence,
    tree_incidence_inverse,
)
from gridquant.lcpf import (
    FeederSpec,
    ModelViolationError,
    PowerFactorModel,
    equivalent_impedance,
    ground_truth_parameters,
    kappa_from_power_factor,
    scaled_impedance,
    voltages_from_injections,
)
from gridquant.quantizer import (
    DegenerateInputError,
    MeasurementSet,
    QuantizerConfig,
    bin_width_from_percentage,
    dither,
    dither_stream,
    quantize,
    quantize_measurements,
)
from gridquant.sensing import (
    PowerIterationError,
    SensingOperator,
    VoltageData,
    build_sensing_operator,
    generate_measurements,
)
from gridquant.estimator import (
    Estimate,
    SolverConfig,
    project_l1_ball,
    recover_topology,
    relative_error,
    solve_lasso,
)
from gridquant.bounds import (
    calibrate_constant,
    error_bound,
    estimate_gaussian_width_sq,
    gaussian_width_sq_bound,
    min_samples_per_node,
    sparse_width_sq_bound,
)

__version__ = "0.1.0"

__all__ = [
    "TopologyError",
    "TreeTopology",
    "algebraic_connectivity",
    "all_edges",
    "complete_incidence",
    "edge_index",
    "edge_pair",
    "is_radial",
    "laplacian_from_weights",
    "max_weight_spanning_tree",
    "num_edges",
    "num_nodes",
    "random_spanning_tree",
    "tree_incidence",
    "tree_incidence_inverse",
    "FeederSpec",
    "ModelViolationError",
    "PowerFactorModel",
    "equivalent_impedance",
    "ground_truth_parameters",
    "kappa_from_power_factor",
    "scaled_impedance",
    "voltages_from_injections",
    "DegenerateInputError",
    "MeasurementSet",
    "QuantizerConfig",
    "bin_width_from_percentage",
    "dither",
    "dither_stream",
    "quantize",
    "quantize_measurements",
    "PowerIterationError",
    "SensingOperator",
    "VoltageData",
    "build_sensing_operator",
    "generate_measurements",
    "Estimate",
    "SolverConfig",
    "project_l1_ball",
    "recover_topology",
    "relative_error",
    "solve_lasso",
    "calibrate_constant",
    "error_bound",
    "estimate_gaussian_width_sq",
    "gaussian_width_sq_bound",
    "min_samples_per_node",
    "sparse_width_sq_bound",
    "__version__",
]
