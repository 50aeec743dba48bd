"""Distributional K-means / K-medoids under 2-Wasserstein and expectation distances."""

from .barycenter import BarycenterResult, barycenter, center_cross_cov
from .clustering import (
    ENGINES,
    ClusterConfig,
    ClusteringResult,
    cluster_distributions_kmeans,
    cluster_distributions_kmedoids,
    kmeans_raw,
    kmedoids_raw,
    propagate_labels,
    run_engine,
)
from .distances import (
    DistanceKind,
    ed_squared,
    optimal_coupling_cov,
    pairwise_matrix,
    w2_squared,
)
from .distributions import (
    DistributionDataset,
    GaussianModel,
    LognormalModel,
    build_dataset,
    estimate_cross_cov,
    estimate_gaussian,
    estimate_lognormal,
    lognormal_moments,
)
from .estimators import (
    DistributionalKMeans,
    DistributionalKMedoids,
    KMeans,
    KMedoids,
    MomentEstimator,
)
from .exceptions import DistClustError, InputError, NumericsError
from .metrics import accuracy, ari, contingency, evaluate, nmi
from .psd import psd_sqrt, symmetrize

__version__ = "0.1.0"
