"""Layered multi-path routing construction and redundancy-overhead rating."""

from .capillary import (CapillaryResult, LayerResult, UnroutableError,
                        build_capillary, build_layer, complete_residual,
                        hunt_bottlenecks, layer_pattern)
from .fecsizing import (FecInfeasibleError, FecProfile, FecTable,
                        decoding_failure_prob, fec_block_size,
                        large_block_rate, rate_increase)
from .manetgen import Ensemble, ManetConfig, ManetSample, generate_samples
from .netmodel import (FlowPattern, Network, NetworkError, RoutabilityReport,
                       parse_network, serialize_network, validate_routable)
from .rormetric import RorReport, ror_offline, ror_realtime

__all__ = [
    "CapillaryResult", "LayerResult", "UnroutableError", "build_capillary",
    "build_layer", "complete_residual", "hunt_bottlenecks", "layer_pattern",
    "FecInfeasibleError", "FecProfile", "FecTable", "decoding_failure_prob",
    "fec_block_size", "large_block_rate", "rate_increase",
    "Ensemble", "ManetConfig", "ManetSample", "generate_samples",
    "FlowPattern", "Network", "NetworkError", "RoutabilityReport",
    "parse_network", "serialize_network", "validate_routable",
    "RorReport", "ror_offline", "ror_realtime",
]
