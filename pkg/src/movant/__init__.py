"""Movable-antenna array modelling and layout optimisation."""
__version__ = "0.1.0"

from .channel import Scenario, ScenarioConfig, build_channel, generate_scenario
from .errors import (ConfigError, DimensionMismatch, InfeasibleLayout, LowSignal, MovantError,
                     QuantizationCollision, RangeError, RankDeficient, SingularKernel)
from .geometry import (AntennaLayout, Box, DualScale, ElementGlobal, ElementLocal, FixedArray,
                       FoldableArray, Hinge, Orientation, Polyline, RotatableArray, SlidingArray,
                       SubArray, TurnableArray, planar_offsets, quantize_positions, rotation_matrix,
                       validate)
from .optimizer import Objective, OptResult, bo_run, grid_search, random_search, sum_rate_objective
from .patterns import OMNI, Directional38901, Tabulated, make_pattern
from .precoding import sum_rate, zf_precoder
