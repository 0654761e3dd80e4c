"""Pseudo-independent probabilistic models and structure learners."""

__version__ = "0.1.0"

from .data import Dataset, count, empirical, exact_dataset, sample
from .jpd import (
    JointTable,
    VariableSpec,
    condition,
    entropy,
    index_of,
    is_independent,
    marginalize,
    mutual_information,
)
from .k2_analysis import K2Cell, exhaustive_min_r, min_r_prime, ratio_r, ratio_r_prime
from .learners import k2_learn, kutato_learn, lam_bacchus_learn, pc_skeleton
from .pi_models import PiSpec, Verdict, classify, construct_full_pi, find_embedded_pi, fixture
from .scores import Dag, cross_entropy, description_length, k2_g_exact, k2_g_log, link_weights, network_entropy
