"""End-to-end hybrid clustering run and its JSON persistence.

Stages, in order:

1. daily-total matrices per month (incomplete series dropped),
2. per month: MinMax fit + transform, 1 x k_m SOM, activated-node centers,
3. all month centers pooled (still in [0, 1]^28),
4. PCA fitted on the pooled centers,
5. silhouette sweep of k-means over the projected centers,
6. every normalized series-month row projected with the same PCA and
   labelled by its nearest final k-means center.

Every random draw is seeded from ``PipelineConfig.seed`` through
:func:`hybridsom.seeding.mix`, so a run is a pure function of its inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

from .errors import (
    CorruptFile,
    HybridSomError,
    InvalidConfig,
    IoFailure,
    NoUsableSeries,
    TooFewCenters,
    VersionMismatch,
)
from .evaluate import SilhouetteReport, sweep_k
from .ingest import PAPER_MONTHS, MonthKey, MonthlyMatrix, ReadingTable, build_monthly_matrices
from .kmeans import KMeansConfig, KMeansModel, assign_labels, fit_kmeans
from .pca import PcaModel, fit_pca, project
from .preprocess import ScalerParams, apply_minmax, fit_minmax
from .seeding import TAG_SOM, TAG_SWEEP, mix
from .som import CenterSet, SomConfig, SomModel, extract_centers, train_som

FORMAT_VERSION = "1.0"
PAPER_TOTAL_CLUSTERS = 88

# Reported on 50 houses of the London smart-meter data; informational only,
# reproducing them needs that dataset.
PAPER_REPORTED_BEST_K = 24
PAPER_REPORTED_SILHOUETTE = 0.66


def split_clusters(total: int, months: list[MonthKey]) -> dict[MonthKey, int]:
    """Spread ``total`` SOM clusters over ``months`` as evenly as possible.

    Earlier months take the remainder: 88 over 12 months gives four 8s then
    eight 7s.
    """
    base, extra = divmod(total, len(months))
    return {m: base + (1 if i < extra else 0) for i, m in enumerate(months)}


@dataclass
class PipelineConfig:
    months: list[MonthKey] = field(default_factory=lambda: list(PAPER_MONTHS))
    som_clusters_per_month: dict[MonthKey, int] | None = None
    som: SomConfig = field(default_factory=SomConfig)
    pca_q: int = 2
    k_min: int = 2
    k_max: int = 40
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    seed: int = 0

    def __post_init__(self):
        if not self.months:
            raise InvalidConfig("months must be non-empty")
        if len(set(self.months)) != len(self.months):
            raise InvalidConfig("months must be distinct")
        if self.som_clusters_per_month is None:
            self.som_clusters_per_month = split_clusters(PAPER_TOTAL_CLUSTERS, self.months)
        missing = [str(m) for m in self.months if m not in self.som_clusters_per_month]
        if missing:
            raise InvalidConfig(f"no SOM cluster count for {', '.join(missing)}")
        if any(v < 1 for v in self.som_clusters_per_month.values()):
            raise InvalidConfig("SOM cluster counts must be positive")
        if self.k_min < 2 or self.k_max < self.k_min:
            raise InvalidConfig("need 2 <= k_min <= k_max")
        if self.pca_q < 1:
            raise InvalidConfig("pca_q must be positive")

    def to_dict(self) -> dict:
        som = asdict(self.som)
        del som["grid_rows"], som["grid_cols"], som["seed"]
        km = asdict(self.kmeans)
        del km["k"], km["seed"]
        return {
            "months": [str(m) for m in self.months],
            "som_clusters_per_month": {str(m): self.som_clusters_per_month[m] for m in self.months},
            "som": som,
            "pca_q": self.pca_q,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "kmeans": km,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {"months", "som_clusters_per_month", "som", "pca_q", "k_min", "k_max",
                 "kmeans", "seed"}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw: dict[str, Any] = {}
        try:
            if "months" in d:
                kw["months"] = [MonthKey.parse(m) for m in d["months"]]
            if d.get("som_clusters_per_month") is not None:
                kw["som_clusters_per_month"] = {
                    MonthKey.parse(k): int(v) for k, v in d["som_clusters_per_month"].items()}
            if "som" in d:
                som = dict(d["som"])
                bad = set(som) - {"epochs", "lr_start", "lr_end", "sigma_start", "sigma_end"}
                if bad:
                    raise InvalidConfig(f"unknown som keys: {', '.join(sorted(bad))}")
                kw["som"] = SomConfig(**som)
            if "kmeans" in d:
                km = dict(d["kmeans"])
                bad = set(km) - {"max_iters", "n_restarts"}
                if bad:
                    raise InvalidConfig(f"unknown kmeans keys: {', '.join(sorted(bad))}")
                kw["kmeans"] = KMeansConfig(**km)
            for key in ("pca_q", "k_min", "k_max", "seed"):
                if key in d:
                    kw[key] = int(d[key])
        except (TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, HybridSomError):
                raise
            raise InvalidConfig(f"bad config: {exc}") from None
        return cls(**kw)


def paper_config(seed: int = 0) -> PipelineConfig:
    """Jan-Jun 2012 and 2013, 88 SOM clusters in total, k swept over 2..40."""
    return PipelineConfig(months=list(PAPER_MONTHS), k_min=2, k_max=40, seed=seed)


@dataclass
class Assignment:
    series_id: str
    month: MonthKey
    label: int


@dataclass(eq=False)
class PipelineResult:
    config: PipelineConfig
    assignments: list[Assignment]
    assignment_scores: np.ndarray  # PCA scores of each assigned row, same order
    scalers: dict[MonthKey, ScalerParams]
    som_models: dict[MonthKey, SomModel]
    pooled_centers: np.ndarray
    pooled_provenance: list[tuple[MonthKey, int]]
    pca: PcaModel
    kmeans: KMeansModel
    report: SilhouetteReport
    warnings: list[str] = field(default_factory=list)

    @property
    def labels(self) -> np.ndarray:
        return np.array([a.label for a in self.assignments], dtype=np.int64)


@dataclass
class PreparedCenters:
    """Output of stages 1-4: everything up to the k-means sweep."""

    matrices: list[MonthlyMatrix]
    normalized: dict[MonthKey, np.ndarray]
    scalers: dict[MonthKey, ScalerParams]
    som_models: dict[MonthKey, SomModel]
    center_sets: list[CenterSet]
    pooled: np.ndarray
    provenance: list[tuple[MonthKey, int]]
    pca: PcaModel
    projected: np.ndarray
    warnings: list[str]


def prepare_centers(table: ReadingTable, config: PipelineConfig) -> PreparedCenters:
    warnings = list(table.warnings)
    matrices = build_monthly_matrices(table, config.months)
    normalized, scalers, models, center_sets = {}, {}, {}, []
    for i, mat in enumerate(matrices):
        if mat.dropped:
            shown = ", ".join(f"{s} ({r})" for s, r in mat.dropped[:5])
            more = f" and {len(mat.dropped) - 5} more" if len(mat.dropped) > 5 else ""
            warnings.append(f"{mat.month}: dropped {len(mat.dropped)} series: {shown}{more}")
        if mat.n == 0:
            warnings.append(f"{mat.month}: no complete series, month skipped")
            continue
        params = fit_minmax(mat.values)
        x = apply_minmax(mat.values, params)
        k_m = config.som_clusters_per_month[mat.month]
        som_cfg = replace(config.som, grid_rows=1, grid_cols=k_m, seed=mix(config.seed, TAG_SOM, i))
        model = train_som(x, som_cfg)
        cs = extract_centers(model, mat.month)
        if cs.warning:
            warnings.append(cs.warning)
        normalized[mat.month], scalers[mat.month], models[mat.month] = x, params, model
        center_sets.append(cs)
    if not center_sets:
        raise NoUsableSeries("every series was dropped in every requested month")

    pooled = np.vstack([cs.centers for cs in center_sets])
    provenance = [(cs.month, node) for cs in center_sets for node in cs.source_nodes]
    if len(pooled) - 1 < config.k_min:
        raise TooFewCenters(
            f"{len(pooled)} pooled centers; at least k_min + 1 = {config.k_min + 1} needed")
    pca = fit_pca(pooled, config.pca_q)
    return PreparedCenters(matrices, normalized, scalers, models, center_sets, pooled,
                           provenance, pca, project(pca, pooled), warnings)


def sweep_centers(prepared: PreparedCenters, config: PipelineConfig) -> SilhouetteReport:
    base = replace(config.kmeans, seed=mix(config.seed, TAG_SWEEP))
    return sweep_k(prepared.projected, config.k_min, config.k_max, base)


def run_pipeline(table: ReadingTable, config: PipelineConfig | None = None) -> PipelineResult:
    config = config or PipelineConfig()
    prep = prepare_centers(table, config)
    report = sweep_centers(prep, config)

    # same seed derivation as the sweep, so the final model is the one that was scored
    sweep_seed = mix(config.seed, TAG_SWEEP)
    final = fit_kmeans(prep.projected,
                       replace(config.kmeans, k=report.best_k, seed=mix(sweep_seed, report.best_k)))

    assignments, scores = [], []
    for mat in prep.matrices:
        if mat.month not in prep.normalized:
            continue
        s = project(prep.pca, prep.normalized[mat.month])
        labels = assign_labels(final.centers, s)
        assignments.extend(Assignment(sid, mat.month, int(lab))
                           for sid, lab in zip(mat.series_ids, labels))
        scores.append(s)

    return PipelineResult(
        config=config,
        assignments=assignments,
        assignment_scores=np.vstack(scores),
        scalers=prep.scalers,
        som_models=prep.som_models,
        pooled_centers=prep.pooled,
        pooled_provenance=prep.provenance,
        pca=prep.pca,
        kmeans=final,
        report=report,
        warnings=prep.warnings,
    )


# ---------------------------------------------------------------- persistence

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x}")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    parts: list[str] = []

    def emit(o, indent):
        pad = "\n" + "  " * (indent + 1)
        if isinstance(o, dict):
            if not o:
                parts.append("{}")
                return
            parts.append("{")
            for i, (k, v) in enumerate(o.items()):
                parts.append(("," if i else "") + pad + json.dumps(str(k)) + ": ")
                emit(v, indent + 1)
            parts.append("\n" + "  " * indent + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                parts.append("[]")
            elif all(not isinstance(v, (dict, list, tuple)) for v in o):
                parts.append("[")
                for i, v in enumerate(o):
                    if i:
                        parts.append(", ")
                    emit(v, indent)
                parts.append("]")
            else:
                parts.append("[")
                for i, v in enumerate(o):
                    parts.append(("," if i else "") + pad)
                    emit(v, indent + 1)
                parts.append("\n" + "  " * indent + "]")
        elif isinstance(o, (bool, np.bool_)):
            parts.append("true" if o else "false")
        elif isinstance(o, (int, np.integer)):
            parts.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            parts.append(_fmt_float(float(o)))
        elif o is None:
            parts.append("null")
        elif isinstance(o, str):
            parts.append(json.dumps(o))
        elif isinstance(o, np.ndarray):
            emit(o.tolist(), indent)
        else:
            raise TypeError(f"cannot serialise {type(o).__name__}")

    emit(obj, 0)
    return "".join(parts) + "\n"


def result_to_dict(result: PipelineResult) -> dict:
    months = [m for m in result.config.months if m in result.som_models]
    return {
        "format_version": FORMAT_VERSION,
        "config": result.config.to_dict(),
        "scalers": [
            {"month": str(m), "mins": result.scalers[m].mins, "maxs": result.scalers[m].maxs}
            for m in months
        ],
        "som_models": [
            {
                "month": str(m),
                "config": asdict(result.som_models[m].config),
                "codebook": result.som_models[m].codebook,
                "activations": result.som_models[m].activations,
            }
            for m in months
        ],
        "pooled_centers": {
            "values": result.pooled_centers,
            "provenance": [{"month": str(m), "node": n} for m, n in result.pooled_provenance],
        },
        "pca": {
            "mean": result.pca.mean,
            "components": result.pca.components,
            "eigenvalues": result.pca.eigenvalues,
            "all_eigenvalues": result.pca.all_eigenvalues,
            "total_variance": result.pca.total_variance,
        },
        "kmeans": {
            "centers": result.kmeans.centers,
            "inertia": result.kmeans.inertia,
            "iterations": result.kmeans.iterations,
            "converged": result.kmeans.converged,
            "labels": result.kmeans.labels,
            "history": result.kmeans.history,
        },
        "report": result.report.to_dict(),
        "assignments": [
            {"series_id": a.series_id, "year": a.month.year, "month": a.month.month,
             "label": a.label, "scores": s}
            for a, s in zip(result.assignments, result.assignment_scores)
        ],
        "warnings": result.warnings,
    }


def _matrix(v, cols=None) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim == 1 and a.size == 0 and cols is not None:
        a = a.reshape(0, cols)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    return a


def _vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("expected a vector")
    return a


def result_from_dict(d: dict) -> PipelineResult:
    if not isinstance(d, dict) or "format_version" not in d:
        raise CorruptFile("missing format_version")
    if d["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(f"file version {d['format_version']!r}, expected {FORMAT_VERSION!r}")
    expected = {"format_version", "config", "scalers", "som_models", "pooled_centers", "pca",
                "kmeans", "report", "assignments", "warnings"}
    if set(d) != expected:
        raise CorruptFile(f"top-level fields differ: {sorted(set(d) ^ expected)}")
    try:
        config = PipelineConfig.from_dict(d["config"])
        scalers = {MonthKey.parse(s["month"]): ScalerParams(_vector(s["mins"]), _vector(s["maxs"]))
                   for s in d["scalers"]}
        soms = {}
        for s in d["som_models"]:
            cfg = SomConfig(**s["config"])
            soms[MonthKey.parse(s["month"])] = SomModel(
                cfg, _matrix(s["codebook"]), np.asarray(s["activations"], dtype=np.int64))
        pc = d["pooled_centers"]
        p = d["pca"]
        pca = PcaModel(_vector(p["mean"]), _matrix(p["components"]), _vector(p["eigenvalues"]),
                       float(p["total_variance"]), _vector(p["all_eigenvalues"]))
        k = d["kmeans"]
        km = KMeansModel(_matrix(k["centers"]), float(k["inertia"]), int(k["iterations"]),
                         bool(k["converged"]), np.asarray(k["labels"], dtype=np.int64),
                         [float(h) for h in k["history"]])
        assignments = [Assignment(str(a["series_id"]), MonthKey(int(a["year"]), int(a["month"])),
                                  int(a["label"])) for a in d["assignments"]]
        scores = _matrix([a["scores"] for a in d["assignments"]], cols=pca.n_components)
        return PipelineResult(
            config=config,
            assignments=assignments,
            assignment_scores=scores,
            scalers=scalers,
            som_models=soms,
            pooled_centers=_matrix(pc["values"]),
            pooled_provenance=[(MonthKey.parse(e["month"]), int(e["node"])) for e in pc["provenance"]],
            pca=pca,
            kmeans=km,
            report=SilhouetteReport.from_dict(d["report"]),
            warnings=[str(w) for w in d["warnings"]],
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorruptFile(f"schema violation: {type(exc).__name__}: {exc}") from None


def save_result(result: PipelineResult, path) -> None:
    text = dumps(result_to_dict(result))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def load_result(path) -> PipelineResult:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"{path}: not valid JSON ({exc})") from None
    return result_from_dict(d)
