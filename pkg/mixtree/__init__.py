"""
mixtree - mode-tree tensor decompositions, their mixtures and matricization ranks

Licensed under the MIT License, see LICENSE file for details
"""

from mixtree.utilities.logger import mtLogger, set_log_level
from mixtree.tensor_core import DenseTensor, MatrixView, ScalarKindError, matricize, matrix_rank
from mixtree.mode_tree import ModeTree, theorem1_bounds, tiling
from mixtree.decomposition import (Discretizers, GridTensorBatch, MixSpec, WeightSet,
                                   mixed_decompose, tree_decompose)
from mixtree.network_oracle import GridBudgetError, grid_tensor_bruteforce
from mixtree.analysis import VerificationFailure, separation_report

__version__ = "0.1.0"
