"""Two-stage region similarity screening for epidemic strategy transfer.

A target region's candidate "teachers" are first screened by distance on the
normalized infection rate, then scored by per-dimension Pearson similarity and
clustered with k-means; regions sharing the target's cluster are recommended.
"""

__version__ = "0.1.0"

from .schema import Dimension, Indicator, IndicatorSchema, RegionRecord, Dataset, default_schema
from .ingest import IngestReport, load_csv, save_dataset, save_normalized, load_normalized
from .preprocess import NormalizedDataset, normalize, box_stats, pcc_matrix
from .neighbors import NeighborSet, first_filter
from .similarity import SimilarityProfile, pearson, dimension_similarity, similarity_profile
from .clustering import (AUTO, KMeansConfig, ClusterResult, kmeans, sse_curve, choose_k_elbow,
                         second_filter, baseline_kmeans)
from .metrics import MetricsReport, metrics
from .pipeline import RecommendationReport, run_stdsa, compare
