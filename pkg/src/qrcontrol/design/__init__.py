"""Regressor construction, dataset handling, discretizers and synthetic data."""

from .basis import BasisSpec, Term, build_w, parse_term
from .data import Dataset, read_dataset_csv, write_dataset_csv
from .discretize import discretize_design1, discretize_design2
from .dgp import DgpSpec, TrueStructure, available_presets, make_preset, simulate

__all__ = [
    "BasisSpec",
    "Term",
    "build_w",
    "parse_term",
    "Dataset",
    "read_dataset_csv",
    "write_dataset_csv",
    "discretize_design1",
    "discretize_design2",
    "DgpSpec",
    "TrueStructure",
    "available_presets",
    "make_preset",
    "simulate",
]
