"""Trivariate bicycle quantum LDPC codes: construction, distances, layouts,
decoding and Monte-Carlo benchmarking."""

from .code_builder import CodeSpec, CssCode, Monomial, SpecError, TbCode, build_code, parse_spec, read_specs
from .decoder import DecoderConfig, OracleConfig, bp_decode, oracle_min_weight_decode, osd_postprocess
from .distance import DistanceResult, distance, distance_upper_bound, exact_distance
from .gf2_core import BinaryMatrix, BinaryVector
from .simulator import fit_curve, monte_carlo, pseudo_threshold, surface_code_baseline
from .tanner_layout import biplanar_split, build_tanner, build_toric_layout, toric_layout_check

__all__ = [
    "BinaryMatrix", "BinaryVector", "CodeSpec", "CssCode", "DecoderConfig", "DistanceResult",
    "Monomial", "OracleConfig", "SpecError", "TbCode", "biplanar_split", "bp_decode", "build_code",
    "build_tanner", "build_toric_layout", "distance", "distance_upper_bound", "exact_distance",
    "fit_curve", "monte_carlo", "oracle_min_weight_decode", "osd_postprocess", "parse_spec",
    "pseudo_threshold", "read_specs", "surface_code_baseline", "toric_layout_check",
]
