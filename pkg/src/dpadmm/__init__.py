"""Differentially private distributed ERM over consensus ADMM."""

from .admm import AdmmConfig, run_nonprivate
from .data import load_dataset, normalize, partition, synthetic_dataset
from .dvp import dvp_calibrate, run_dvp
from .model import ErmParams, get_loss, get_regularizer
from .network import build_topology
from .pvp import run_pvp

__all__ = [
    "AdmmConfig", "ErmParams", "build_topology", "dvp_calibrate", "get_loss", "get_regularizer",
    "load_dataset", "normalize", "partition", "run_dvp", "run_nonprivate", "run_pvp",
    "synthetic_dataset",
]
