"""Score-matrix, label, and manifest I/O with strict validation.

File formats
------------
Score CSV      header ``sample_id,class_0,...,class_{K-1}``, one row per
               sample, UTF-8, ``.`` decimal separator. Values are written
               with ``repr`` so a load/write/load cycle is bit-identical.
Labels CSV     header ``sample_id,label``.
Id list        plain text, one sample_id per line (validation split).
Manifest       JSON object; unknown keys are rejected to catch typos.
Report CSV     header ``method,precision,recall,f1,accuracy,objective,weights``
               with ``weights`` a ``;``-joined list at fixed 6 decimals.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, UsageError
from .fusion import exact_simplex

ROW_SUM_TOLERANCE = 1e-6
SPLITS = ("validation", "test")
REPORT_HEADER = ("method", "precision", "recall", "f1", "accuracy", "objective", "weights")


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Per-model probability table, one row per sample.

    Rows must lie on the probability simplex within ``ROW_SUM_TOLERANCE``
    (classifier exports are rarely exact) and are renormalized on
    construction so downstream arithmetic sees rows that sum to exactly 1.0
    under compensated summation.
    """

    model_id: str
    sample_ids: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        ids = tuple(str(s) for s in self.sample_ids)
        arr = np.array(self.scores, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise DataError(f"model '{self.model_id}': scores must be a 2-D table")
        n, k = arr.shape
        if n == 0:
            raise DataError(f"model '{self.model_id}': no samples")
        if k < 2:
            raise DataError(f"model '{self.model_id}': need at least 2 classes, found {k}")
        if len(ids) != n:
            raise DataError(
                f"model '{self.model_id}': {len(ids)} sample ids for {n} score rows"
            )
        if len(set(ids)) != n:
            dup = _first_duplicate(ids)
            raise DataError(f"model '{self.model_id}': duplicate sample_id '{dup}'")
        if not np.all(np.isfinite(arr)):
            raise DataError(f"model '{self.model_id}': non-finite score value")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DataError(f"model '{self.model_id}': score outside [0, 1]")
        for i in range(n):
            row_sum = math.fsum(arr[i].tolist())
            if abs(row_sum - 1.0) > ROW_SUM_TOLERANCE:
                raise DataError(
                    f"model '{self.model_id}': row for sample '{ids[i]}' sums to "
                    f"{row_sum!r}, expected 1 within {ROW_SUM_TOLERANCE}"
                )
            if row_sum != 1.0:
                arr[i] = exact_simplex(arr[i])
        arr.setflags(write=False)
        object.__setattr__(self, "sample_ids", ids)
        object.__setattr__(self, "scores", arr)

    @property
    def num_samples(self) -> int:
        return int(self.scores.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.scores.shape[1])


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Ground-truth class index per sample (0-based)."""

    sample_ids: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self):
        ids = tuple(str(s) for s in self.sample_ids)
        arr = np.array(self.labels, dtype=np.int64, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("labels must be a non-empty 1-D vector")
        if len(ids) != arr.size:
            raise DataError(f"{len(ids)} sample ids for {arr.size} labels")
        if len(set(ids)) != len(ids):
            raise DataError(f"duplicate sample_id '{_first_duplicate(ids)}' in labels")
        if arr.min() < 0:
            raise DataError("labels must be nonnegative class indices")
        arr.setflags(write=False)
        object.__setattr__(self, "sample_ids", ids)
        object.__setattr__(self, "labels", arr)

    def __len__(self) -> int:
        return int(self.labels.size)


@dataclass(frozen=True, eq=False)
class FusionDataset:
    """Aligned collection of score matrices plus labels, tagged with a split.

    Construction requires the inputs to already share one sample_id
    sequence; use :func:`align` to build one from unordered inputs.
    """

    matrices: tuple[ScoreMatrix, ...]
    labels: LabelVector
    split: str = "validation"
    stack: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mats = tuple(self.matrices)
        if not mats:
            raise DataError("a fusion dataset needs at least one score matrix")
        if self.split not in SPLITS:
            raise DataError(f"split must be one of {SPLITS}, got {self.split!r}")
        k = mats[0].num_classes
        for m in mats:
            if m.num_classes != k:
                raise DataError(
                    f"model '{m.model_id}' has {m.num_classes} classes, "
                    f"model '{mats[0].model_id}' has {k}"
                )
            if m.sample_ids != self.labels.sample_ids:
                raise DataError(
                    f"model '{m.model_id}' is not aligned with the labels; call align()"
                )
        if int(self.labels.labels.max()) >= k:
            raise DataError(
                f"label {int(self.labels.labels.max())} out of range for {k} classes"
            )
        stack = np.stack([m.scores for m in mats])
        stack.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "stack", stack)

    @property
    def num_models(self) -> int:
        return len(self.matrices)

    @property
    def num_samples(self) -> int:
        return len(self.labels)

    @property
    def num_classes(self) -> int:
        return self.matrices[0].num_classes

    @property
    def sample_ids(self) -> tuple[str, ...]:
        return self.labels.sample_ids

    @property
    def y(self) -> np.ndarray:
        return self.labels.labels


def _first_duplicate(ids):
    seen = set()
    for s in ids:
        if s in seen:
            return s
        seen.add(s)
    return None


def load_scores(path, model_id: str | None = None) -> ScoreMatrix:
    """Read a score CSV, reporting the offending line on any violation."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}:1: missing header")
    header = rows[0]
    expected = ["sample_id"] + [f"class_{i}" for i in range(len(header) - 1)]
    if len(header) < 3 or header != expected:
        raise DataError(
            f"{path}:1: malformed header {header!r}; expected "
            "'sample_id,class_0,...,class_{K-1}' with K >= 2"
        )
    k = len(header) - 1
    ids: list[str] = []
    data: list[list[float]] = []
    seen: dict[str, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != k + 1:
            raise DataError(f"{path}:{lineno}: expected {k + 1} fields, found {len(row)}")
        sid = row[0]
        if sid in seen:
            raise DataError(
                f"{path}:{lineno}: duplicate sample_id '{sid}' (first seen at line {seen[sid]})"
            )
        seen[sid] = lineno
        values = []
        for col, cell in enumerate(row[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: non-numeric value {cell!r} in column '{header[col + 1]}'"
                ) from None
            if not math.isfinite(v) or v < 0.0 or v > 1.0:
                raise DataError(
                    f"{path}:{lineno}: value {cell!r} outside [0, 1] in column '{header[col + 1]}'"
                )
            values.append(v)
        row_sum = math.fsum(values)
        if abs(row_sum - 1.0) > ROW_SUM_TOLERANCE:
            raise DataError(
                f"{path}:{lineno}: row sums to {row_sum!r}, expected 1 within {ROW_SUM_TOLERANCE}"
            )
        ids.append(sid)
        data.append(values)
    if not ids:
        raise DataError(f"{path}: no samples")
    return ScoreMatrix(model_id if model_id is not None else path.stem, tuple(ids), np.array(data))


def write_scores(matrix: ScoreMatrix, path) -> None:
    """Write a score CSV; floats use ``repr`` so they round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id"] + [f"class_{i}" for i in range(matrix.num_classes)])
        for sid, row in zip(matrix.sample_ids, matrix.scores):
            writer.writerow([sid] + [repr(float(v)) for v in row])


def load_labels(path) -> LabelVector:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}:1: missing header")
    if rows[0] != ["sample_id", "label"]:
        raise DataError(f"{path}:1: malformed header {rows[0]!r}; expected 'sample_id,label'")
    ids: list[str] = []
    labels: list[int] = []
    seen: dict[str, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields, found {len(row)}")
        sid, cell = row
        if sid in seen:
            raise DataError(
                f"{path}:{lineno}: duplicate sample_id '{sid}' (first seen at line {seen[sid]})"
            )
        seen[sid] = lineno
        try:
            label = int(cell)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer label {cell!r}") from None
        if label < 0:
            raise DataError(f"{path}:{lineno}: negative label {label}")
        ids.append(sid)
        labels.append(label)
    if not ids:
        raise DataError(f"{path}: no samples")
    return LabelVector(tuple(ids), np.array(labels))


def write_labels(labels: LabelVector, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id", "label"])
        for sid, label in zip(labels.sample_ids, labels.labels):
            writer.writerow([sid, int(label)])


def read_id_list(path) -> tuple[str, ...]:
    """Read a newline-separated sample_id list; blank lines are skipped."""
    path = Path(path)
    ids = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    ids = [s for s in ids if s]
    if not ids:
        raise DataError(f"{path}: no sample ids")
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate sample_id '{_first_duplicate(ids)}'")
    return tuple(ids)


def align(matrices, labels: LabelVector, split: str = "validation") -> FusionDataset:
    """Reorder every matrix to the labels' sample_id sequence.

    Alignment is strict: a sample_id present in the labels but missing from
    any matrix (or vice versa) is an error, never a silent intersection,
    because dropped samples would silently change reported metrics.
    """
    mats = tuple(matrices)
    if not mats:
        raise DataError("at least one score matrix is required")
    want = labels.sample_ids
    want_set = set(want)
    aligned = []
    for m in mats:
        have = set(m.sample_ids)
        missing = [s for s in want if s not in have]
        if missing:
            raise DataError(
                f"model '{m.model_id}' is missing sample_id '{missing[0]}' present in the "
                f"labels ({len(missing)} missing in total)"
            )
        extra = [s for s in m.sample_ids if s not in want_set]
        if extra:
            raise DataError(
                f"model '{m.model_id}' has sample_id '{extra[0]}' absent from the labels "
                f"({len(extra)} extra in total)"
            )
        if m.sample_ids == want:
            aligned.append(m)
        else:
            pos = {s: i for i, s in enumerate(m.sample_ids)}
            perm = np.array([pos[s] for s in want])
            aligned.append(ScoreMatrix(m.model_id, want, m.scores[perm]))
    return FusionDataset(tuple(aligned), labels, split)


def subset(dataset: FusionDataset, sample_ids, split: str) -> FusionDataset:
    """Restrict an aligned dataset to ``sample_ids``, tagged with ``split``."""
    wanted = tuple(sample_ids)
    if not wanted:
        raise DataError("subset needs at least one sample id")
    if len(set(wanted)) != len(wanted):
        raise DataError(f"duplicate sample_id '{_first_duplicate(wanted)}' in subset")
    pos = {s: i for i, s in enumerate(dataset.sample_ids)}
    try:
        perm = np.array([pos[s] for s in wanted])
    except KeyError as exc:
        raise DataError(f"sample_id {exc.args[0]!r} not present in the dataset") from None
    labels = LabelVector(wanted, dataset.y[perm])
    mats = tuple(
        ScoreMatrix(m.model_id, wanted, m.scores[perm]) for m in dataset.matrices
    )
    return FusionDataset(mats, labels, split)


# --- experiment manifest ------------------------------------------------

MANIFEST_KEYS = {
    "models", "labels_path", "validation_ids_path", "method", "params",
    "seed", "grid_step", "objective", "output",
}
MANIFEST_REQUIRED = {"models", "labels_path", "method", "output"}
MODEL_ENTRY_KEYS = {"id", "scores_path"}


@dataclass(frozen=True)
class Manifest:
    """Validated experiment description (see module docstring for the format)."""

    models: tuple[tuple[str, Path], ...]
    labels_path: Path
    method: str
    output: Path
    params: dict
    seed: int | None
    grid_step: float
    objective: str
    validation_ids_path: Path | None


def load_manifest(path) -> Manifest:
    from .objective import OBJECTIVE_VARIANTS
    from .optimizers.common import METHODS, STOCHASTIC_METHODS

    path = Path(path)
    base = path.parent
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: manifest must be a JSON object")
    unknown = sorted(set(raw) - MANIFEST_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown manifest key(s): {', '.join(unknown)}")
    missing = sorted(MANIFEST_REQUIRED - set(raw))
    if missing:
        raise ConfigError(f"{path}: missing manifest key(s): {', '.join(missing)}")

    models_raw = raw["models"]
    if not isinstance(models_raw, list) or not models_raw:
        raise ConfigError(f"{path}: 'models' must be a non-empty array")
    models = []
    for entry in models_raw:
        if not isinstance(entry, dict) or set(entry) != MODEL_ENTRY_KEYS:
            raise ConfigError(
                f"{path}: each model entry must be an object with exactly "
                f"{sorted(MODEL_ENTRY_KEYS)}"
            )
        models.append((str(entry["id"]), base / str(entry["scores_path"])))
    ids = [m[0] for m in models]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"{path}: duplicate model id '{_first_duplicate(ids)}'")

    method = str(raw["method"])
    if method not in METHODS:
        raise ConfigError(f"{path}: unknown method '{method}'; expected one of {', '.join(METHODS)}")

    seed = raw.get("seed")
    if seed is not None:
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigError(f"{path}: seed must be an unsigned 64-bit integer")
    if seed is None and method in STOCHASTIC_METHODS:
        raise UsageError(
            f"{path}: method '{method}' is stochastic and requires an explicit seed"
        )

    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}: 'params' must be an object")

    grid_step = raw.get("grid_step", 0.05)
    if isinstance(grid_step, bool) or not isinstance(grid_step, (int, float)):
        raise ConfigError(f"{path}: grid_step must be a number")

    objective = str(raw.get("objective", "fused_accuracy"))
    if objective not in OBJECTIVE_VARIANTS:
        raise ConfigError(
            f"{path}: unknown objective '{objective}'; expected one of {', '.join(OBJECTIVE_VARIANTS)}"
        )

    validation_ids_path = raw.get("validation_ids_path")
    if validation_ids_path is not None:
        validation_ids_path = base / str(validation_ids_path)

    manifest = Manifest(
        models=tuple(models),
        labels_path=base / str(raw["labels_path"]),
        method=method,
        output=base / str(raw["output"]),
        params=dict(params),
        seed=seed,
        grid_step=float(grid_step),
        objective=objective,
        validation_ids_path=validation_ids_path,
    )
    for _, scores_path in manifest.models:
        if not scores_path.exists():
            raise FileNotFoundError(f"manifest references missing file: {scores_path}")
    if not manifest.labels_path.exists():
        raise FileNotFoundError(f"manifest references missing file: {manifest.labels_path}")
    if manifest.validation_ids_path is not None and not manifest.validation_ids_path.exists():
        raise FileNotFoundError(
            f"manifest references missing file: {manifest.validation_ids_path}"
        )
    return manifest


def load_manifest_splits(manifest: Manifest) -> tuple[FusionDataset, FusionDataset]:
    """Load, align, and carve a manifest into (validation, test) datasets.

    Without a validation id list every sample is validation and the test
    split reuses the same samples; with one, the test split is the
    complement (or the validation samples again if the list covers
    everything).
    """
    matrices = [load_scores(path, model_id=mid) for mid, path in manifest.models]
    labels = load_labels(manifest.labels_path)
    full = align(matrices, labels, split="validation")
    if manifest.validation_ids_path is None:
        return full, subset(full, full.sample_ids, "test")
    val_ids = read_id_list(manifest.validation_ids_path)
    validation = subset(full, val_ids, "validation")
    val_set = set(val_ids)
    rest = tuple(s for s in full.sample_ids if s not in val_set)
    return validation, subset(full, rest if rest else val_ids, "test")


# --- report CSV ---------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    """One report line: a method (or model) with its evaluation metrics.

    ``objective`` is the validation error the weights were chosen on;
    ``weights`` the chosen weight vector. Both are blank for plain
    per-model evaluation rows.
    """

    method: str
    precision: float
    recall: float
    f1: float
    accuracy: float
    objective: float | None = None
    weights: tuple[float, ...] | None = None

    @classmethod
    def from_metrics(cls, method, report, objective=None, weights=None):
        """Build a row from a metrics report plus optional search outcome."""
        return cls(
            method=method,
            precision=report.precision,
            recall=report.recall,
            f1=report.f1,
            accuracy=report.accuracy,
            objective=objective,
            weights=None if weights is None else tuple(float(w) for w in weights),
        )


def write_report(rows, path) -> None:
    """Write report rows as CSV with a deterministic column order."""
    if isinstance(rows, ReportRow):
        rows = [rows]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in rows:
            writer.writerow([
                r.method,
                f"{r.precision:.6f}",
                f"{r.recall:.6f}",
                f"{r.f1:.6f}",
                f"{r.accuracy:.6f}",
                "" if r.objective is None else f"{r.objective:.6f}",
                "" if r.weights is None else ";".join(f"{w:.6f}" for w in r.weights),
            ])
