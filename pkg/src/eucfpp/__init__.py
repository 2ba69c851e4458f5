"""Euclidean first-passage percolation on Poisson-Delaunay and relative neighbourhood graphs."""

__version__ = "0.1.0"

from .geom import (CSVFormatError, EmptyInputError, PointSet, SeedStream, Window, nearest_vertex,
                   read_points_csv, sample_ppp, write_points_csv)
from .graphs import GraphKind, ProximityGraph, build_delaunay, build_graph, build_rng
from .fpp import (Barrier, GeodesicPath, ShortestPathTree, restricted_shortest_path, restricted_tree,
                  shortest_path, shortest_path_tree)
from .forest import DirectedForest, DirectionSpec, build_directed_forest, coalescence, highway_counts
