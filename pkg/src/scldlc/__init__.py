"""Spatially-coupled low-density lattice code simulator."""

from .errors import BracketError, ConstructionError, ParameterError, ScldlcError
from .graphs import (SparseLabeledGraph, ValidationReport, build_conventional,
                     build_randomized_coupled, build_standard_coupled,
                     expand_protograph, load_edges, validate_graph)
from .mcde import DeConfig, DeTrace, PoolBank, converged, initialize, run_de
from .messages import (GaussianMsg, LabeledMsg, check_combine, integer_window,
                       ordering_metric, q_step, variable_combine)
from .params import (CouplingParams, LdlcParams, derive_weight, dimension_ratio,
                     null_check_positions)
from .sim import (ChannelRealization, DecodeResult, ErrorReport, decode,
                  encode_integers, run_error_sim, transmit_all_zero)
from .threshold import (CapacityModel, ThresholdResult, capacity_sigma2,
                        find_threshold, gap_db)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
