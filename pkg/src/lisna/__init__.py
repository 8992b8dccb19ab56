"""Network intensity functions and local indicators of network association."""

from .autocorr import (NodeField, autocorrelation, correlogram, geary_c, getis_g, lagged_autocovariance,
                       local_g, local_geary, local_moran, local_permutation_test, moran_i,
                       moran_scatter, permutation_test)
from .graph import Edge, Path, SpatialNetwork, Traversal, Vertex
from .intensity import (IntensityField, cg_node_intensity, edge_intensity, field,
                        node_mean_intensity, path_intensity, pooled_set_intensity)
from .pattern import Event, SnappedPattern, snap
from .second_order import lag_second_order, resolve, second_order
from .sim import SimSpec, simulate
from .weights import WeightMatrix, adjacency, standardize

__version__ = "0.1.0"
