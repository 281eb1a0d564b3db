"""Cluster-based reference set reduction for k-NN classification."""

from .core import (
    Dataset,
    DistanceCounter,
    Instance,
    Label,
    Partition,
    counted_distance,
    euclidean_distance,
)
from .datasets import DatasetSpec, dataset_fingerprint, get_spec, load_dataset
from .experiment import (
    ExperimentRecord,
    GridConfig,
    derive_L,
    derive_k_clusters,
    find_best_k,
    pareto_front,
    run_conv_baseline,
    run_rsrm_grid,
)
from .kmeans import Clustering, cluster_train_set, nearest_centroid, rank_clusters
from .knn import NeighborList, conv_knn_classify, find_k_nearest, vote
from .model import (
    QueryTrace,
    RsrmModel,
    assemble_reference_set,
    build_model,
    classify_many,
    rsrm_classify,
)

__version__ = "0.1.0"
