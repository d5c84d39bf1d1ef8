"""Hybrid SOM + PCA + k-means clustering of monthly energy-consumption profiles."""

__version__ = "0.1.0"

from .evaluate import SilhouetteReport, adjusted_rand_index, silhouette, sweep_k
from .ingest import (
    PAPER_MONTHS,
    MonthKey,
    MonthlyMatrix,
    Reading,
    ReadingTable,
    build_monthly_matrices,
    parse_readings,
    read_csv,
    synth_generate,
)
from .kmeans import KMeansConfig, KMeansModel, assign_labels, fit_kmeans, inertia
from .pca import PcaModel, fit_pca, project, reconstruct
from .pipeline import PipelineConfig, PipelineResult, load_result, run_pipeline, save_result
from .preprocess import ScalerParams, apply_minmax, fit_minmax, invert_minmax
from .som import (
    CenterSet,
    SomConfig,
    SomModel,
    best_matching_unit,
    extract_centers,
    quantization_error,
    train_som,
)
