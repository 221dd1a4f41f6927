"""Entropy-maximising sensing matrix design and sparse recovery."""

from ._core import (
    EmsError,
    add_awgn,
    average_entropy,
    basis_pursuit,
    bpdn,
    check_bounds,
    dct_basis,
    entropy,
    mutual_coherence,
    omp,
    procrustes,
    read_matrix,
    sparse_signals,
    spark,
    srer,
    sweep_measurements,
    theoretical_dimension,
    train,
    write_matrix,
)

__all__ = [
    "EmsError",
    "add_awgn",
    "average_entropy",
    "basis_pursuit",
    "bpdn",
    "check_bounds",
    "dct_basis",
    "entropy",
    "mutual_coherence",
    "omp",
    "procrustes",
    "read_matrix",
    "sparse_signals",
    "spark",
    "srer",
    "sweep_measurements",
    "theoretical_dimension",
    "train",
    "write_matrix",
]
