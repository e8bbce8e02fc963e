"""Batch orchestration: manifest in, per-recording analysis, ANOVA, reports out.

Each manifest row (path, subject_id, group) is processed independently:
parse -> tachogram -> spline resample -> packet decomposition -> per-band
threshold split -> features. Failures are recorded per recording without
aborting the batch. Completed recordings feed two group-level ANOVA tables
(coefficient statistics and band energies), run only when the design is
balanced. Reports serialize losslessly to JSON; CSV mirrors use 12
significant digits.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .features import FeatureVector, extract_features
from .ingest import (
    Group,
    UniformSignal,
    detect_format,
    parse_rr_file,
    resample_cubic_spline,
    rr_to_tachogram,
    truncate_to_block,
)
from .stats import AnovaTable, DegenerateDataError, FactorialData, anova_two_way
from .threshold import BandSplit, threshold_band
from .wavelet import (
    HF_BAND_HZ,
    LF_BAND_HZ,
    band_nodes,
    daubechies_filters,
    wpt_decompose,
)

__all__ = [
    "PipelineConfig",
    "BandReport",
    "RecordingReport",
    "AnovaReport",
    "RunReport",
    "load_manifest",
    "process_recording",
    "run_pipeline",
    "emit_report",
    "COEFF_STAT_COLUMNS",
    "ENERGY_COLUMNS",
]

MANIFEST_FIELDS = ("path", "subject_id", "group")
COEFF_STAT_COLUMNS = ("STDLF", "MEANLF", "STDHF", "MEANHF")
ENERGY_COLUMNS = ("E_LF", "E_HF", "R_E")
MAD_SOURCES = ("per-band", "first-level")
CSV_FLOAT_DIGITS = 12

_FEATURE_BY_COLUMN = {
    "STDLF": "std_lf",
    "MEANLF": "mean_lf",
    "STDHF": "std_hf",
    "MEANHF": "mean_hf",
    "E_LF": "e_lf",
    "E_HF": "e_hf",
    "R_E": "r_e",
}


@dataclass(frozen=True)
class PipelineConfig:
    """Analysis parameters; the defaults are the reference configuration."""

    rate_hz: float = 4.0
    wavelet_order: int = 4
    depth: int = 6
    lf_band_hz: tuple[float, float] = LF_BAND_HZ
    hf_band_hz: tuple[float, float] = HF_BAND_HZ
    tie_policy: str = "background"
    mad_source: str = "per-band"
    detrend: bool = False
    standardize_anova: bool = False
    output_format: str = "csv"
    output_dir: str | None = None

    def __post_init__(self):
        if not self.rate_hz > 0.0:
            raise ValueError("rate_hz must be positive")
        if not 1 <= self.wavelet_order <= 10:
            raise ValueError("wavelet_order must be in [1, 10]")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        for name, band in (("lf_band_hz", self.lf_band_hz), ("hf_band_hz", self.hf_band_hz)):
            lo, hi = band
            if not 0.0 <= lo < hi:
                raise ValueError(f"{name} must satisfy 0 <= lo < hi")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.tie_policy != "background":
            raise ValueError("tie_policy is fixed: equal-magnitude ties go to background")
        if self.mad_source not in MAD_SOURCES:
            raise ValueError(f"mad_source must be one of {MAD_SOURCES}")
        if self.mad_source == "first-level" and self.depth < 1:
            raise ValueError("first-level noise estimation needs depth >= 1")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output_format must be 'csv' or 'json'")

    def as_dict(self) -> dict:
        return {
            "rate_hz": self.rate_hz,
            "wavelet_order": self.wavelet_order,
            "depth": self.depth,
            "lf_band_hz": list(self.lf_band_hz),
            "hf_band_hz": list(self.hf_band_hz),
            "tie_policy": self.tie_policy,
            "mad_source": self.mad_source,
            "detrend": self.detrend,
            "standardize_anova": self.standardize_anova,
            "output_format": self.output_format,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        kwargs = dict(data)
        kwargs["lf_band_hz"] = tuple(kwargs["lf_band_hz"])
        kwargs["hf_band_hz"] = tuple(kwargs["hf_band_hz"])
        return cls(**kwargs)


@dataclass(frozen=True)
class BandReport:
    """Serializable summary plus per-coefficient records for one band split."""

    band: str
    lam: float
    h: float
    n: int
    n_background: int
    n_significant: int
    energy_background: float
    energy_significant: float
    coefficients: tuple[tuple[int, int, float, str], ...]

    @classmethod
    def from_split(cls, split: BandSplit) -> "BandReport":
        return cls(
            band=split.band,
            lam=split.lam,
            h=split.h,
            n=split.n,
            n_background=split.n_background,
            n_significant=split.n_significant,
            energy_background=split.energy_background,
            energy_significant=split.energy_significant,
            coefficients=tuple(split.coefficient_records()),
        )

    def as_dict(self) -> dict:
        return {
            "band": self.band,
            "lambda": self.lam,
            "h": self.h,
            "n": self.n,
            "n_background": self.n_background,
            "n_significant": self.n_significant,
            "energy_background": self.energy_background,
            "energy_significant": self.energy_significant,
            "coefficients": [list(rec) for rec in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BandReport":
        return cls(
            band=data["band"],
            lam=data["lambda"],
            h=data["h"],
            n=data["n"],
            n_background=data["n_background"],
            n_significant=data["n_significant"],
            energy_background=data["energy_background"],
            energy_significant=data["energy_significant"],
            coefficients=tuple(
                (int(node), int(offset), float(value), str(component))
                for node, offset, value, component in data["coefficients"]
            ),
        )


@dataclass(frozen=True)
class RecordingReport:
    subject_id: str
    group: str
    status: str  # "ok" | "failed"
    error: str | None = None
    n_intervals: int | None = None
    n_resampled: int | None = None
    n_analyzed: int | None = None
    features: FeatureVector | None = None
    bands: tuple[BandReport, ...] = ()

    def as_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "group": self.group,
            "status": self.status,
            "error": self.error,
            "n_intervals": self.n_intervals,
            "n_resampled": self.n_resampled,
            "n_analyzed": self.n_analyzed,
            "features": self.features.as_dict() if self.features else None,
            "bands": [b.as_dict() for b in self.bands],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RecordingReport":
        features = None
        if data["features"] is not None:
            f = dict(data["features"])
            f["group"] = Group(f["group"])
            features = FeatureVector(**f)
        return cls(
            subject_id=data["subject_id"],
            group=data["group"],
            status=data["status"],
            error=data["error"],
            n_intervals=data["n_intervals"],
            n_resampled=data["n_resampled"],
            n_analyzed=data["n_analyzed"],
            features=features,
            bands=tuple(BandReport.from_dict(b) for b in data["bands"]),
        )


@dataclass(frozen=True)
class AnovaReport:
    name: str
    status: str  # "ok" | "skipped"
    reason: str | None = None
    row_labels: tuple[str, ...] = ()
    column_labels: tuple[str, ...] = ()
    replicates: int | None = None
    table: AnovaTable | None = None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "reason": self.reason,
            "row_labels": list(self.row_labels),
            "column_labels": list(self.column_labels),
            "replicates": self.replicates,
            "table": self.table.as_dict() if self.table else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnovaReport":
        return cls(
            name=data["name"],
            status=data["status"],
            reason=data["reason"],
            row_labels=tuple(data["row_labels"]),
            column_labels=tuple(data["column_labels"]),
            replicates=data["replicates"],
            table=AnovaTable.from_dict(data["table"]) if data["table"] else None,
        )


@dataclass(frozen=True)
class RunReport:
    """Full batch result; serializes losslessly through as_dict/to_json."""

    config: dict
    recordings: tuple[RecordingReport, ...]
    anova: tuple[AnovaReport, ...]
    tool_name: str = "hrvwp"
    tool_version: str = __version__

    def as_dict(self) -> dict:
        return {
            "tool": {"name": self.tool_name, "version": self.tool_version},
            "config": self.config,
            "recordings": [r.as_dict() for r in self.recordings],
            "anova": [a.as_dict() for a in self.anova],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            config=data["config"],
            recordings=tuple(RecordingReport.from_dict(r) for r in data["recordings"]),
            anova=tuple(AnovaReport.from_dict(a) for a in data["anova"]),
            tool_name=data["tool"]["name"],
            tool_version=data["tool"]["version"],
        )

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    @property
    def all_ok(self) -> bool:
        return all(r.status == "ok" for r in self.recordings) and all(
            a.status == "ok" for a in self.anova
        )


def load_manifest(path) -> list[tuple[str, str, Group]]:
    """Read a UTF-8 CSV manifest with header path,subject_id,group.

    Relative recording paths are resolved against the manifest's directory.
    """
    manifest_path = Path(path)
    with open(manifest_path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != list(MANIFEST_FIELDS):
            raise ValueError(
                f"manifest must start with header {','.join(MANIFEST_FIELDS)}"
            )
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if any(record.get(key) is None for key in MANIFEST_FIELDS) or None in record:
                raise ValueError(f"manifest row {lineno}: expected 3 columns")
            raw = Path(record["path"].strip())
            resolved = raw if raw.is_absolute() else manifest_path.parent / raw
            try:
                group = Group.from_string(record["group"])
            except ValueError as exc:
                raise ValueError(f"manifest row {lineno}: {exc}") from None
            rows.append((str(resolved), record["subject_id"].strip(), group))
    if not rows:
        raise ValueError(f"manifest {manifest_path} lists no recordings")
    return rows


def process_recording(
    path, subject_id: str, group: Group, config: PipelineConfig
) -> RecordingReport:
    """Run the full single-recording chain; exceptions become a failed report."""
    try:
        text = Path(path).read_text(encoding="utf-8")
        series = parse_rr_file(text, detect_format(text), subject_id=subject_id, group=group)
        times, values = rr_to_tachogram(series)
        signal = resample_cubic_spline(times, values, config.rate_hz)
        n_resampled = len(signal)
        signal = truncate_to_block(signal, config.depth)
        if config.detrend:
            signal = UniformSignal(
                samples=signal.samples - signal.samples.mean(),
                rate_hz=signal.rate_hz,
                t0_s=signal.t0_s,
            )

        bank = daubechies_filters(config.wavelet_order)
        tree = wpt_decompose(signal, config.depth, bank)

        mad_coeffs = None
        if config.mad_source == "first-level":
            # finest-detail convention: noise scale from the level-1 high-pass node
            mad_coeffs = tree.node(1, 1).coeffs

        splits = []
        for band, edges in (("LF", config.lf_band_hz), ("HF", config.hf_band_hz)):
            leaf_ids = band_nodes(band, config.depth, config.rate_hz, edges)
            chunks = [tree.node(config.depth, j).coeffs for j in leaf_ids]
            source = tuple(
                (j, off) for j, chunk in zip(leaf_ids, chunks) for off in range(len(chunk))
            )
            splits.append(
                threshold_band(
                    np.concatenate(chunks), band=band,
                    source_index=source, mad_coeffs=mad_coeffs,
                )
            )

        feats = extract_features(splits[0], splits[1], subject_id=subject_id, group=group)
        return RecordingReport(
            subject_id=subject_id,
            group=group.value,
            status="ok",
            n_intervals=len(series),
            n_resampled=n_resampled,
            n_analyzed=len(signal),
            features=feats,
            bands=tuple(BandReport.from_split(s) for s in splits),
        )
    except Exception as exc:
        return RecordingReport(
            subject_id=subject_id, group=group.value, status="failed",
            error=f"{type(exc).__name__}: {exc}",
        )


def _anova_report(
    name: str,
    columns: tuple[str, ...],
    completed: list[RecordingReport],
    standardize: bool,
) -> AnovaReport:
    """Assemble a balanced groups x columns grid and run the ANOVA."""
    by_group: dict[Group, list[FeatureVector]] = {}
    for rec in completed:
        feats = rec.features
        if feats.group is Group.UNLABELED:
            continue
        by_group.setdefault(feats.group, []).append(feats)

    groups = [g for g in (Group.CONTROL, Group.VT, Group.VF) if g in by_group]
    if len(groups) < 2:
        return AnovaReport(name, "skipped", reason="insufficient design: needs >= 2 labeled groups")
    counts = {g: len(by_group[g]) for g in groups}
    if len(set(counts.values())) != 1:
        detail = ", ".join(f"{g.value}={n}" for g, n in counts.items())
        return AnovaReport(name, "skipped", reason=f"unbalanced design: {detail}")
    k = counts[groups[0]]
    if k < 2:
        return AnovaReport(name, "skipped", reason="insufficient design: needs >= 2 subjects per group")

    # replicate order fixed by subject_id so the result is manifest-order independent
    grid = np.array(
        [
            [
                [getattr(f, _FEATURE_BY_COLUMN[col]) for f in
                 sorted(by_group[g], key=lambda f: f.subject_id)]
                for col in columns
            ]
            for g in groups
        ]
    )
    if standardize:
        flat = grid.transpose(1, 0, 2).reshape(len(columns), -1)
        std = flat.std(axis=1)
        if np.any(std == 0.0):
            return AnovaReport(name, "skipped", reason="standardization undefined: constant feature column")
        grid = (grid - flat.mean(axis=1)[None, :, None]) / std[None, :, None]

    try:
        table = anova_two_way(FactorialData(grid))
    except DegenerateDataError as exc:
        return AnovaReport(name, "skipped", reason=str(exc))
    return AnovaReport(
        name, "ok",
        row_labels=tuple(g.value for g in groups),
        column_labels=columns,
        replicates=k,
        table=table,
    )


def run_pipeline(manifest, config: PipelineConfig | None = None) -> RunReport:
    """Process every manifest row, then run the two group-level ANOVA tables."""
    config = config or PipelineConfig()
    rows = load_manifest(manifest)
    ids = [subject for _, subject, _ in rows]
    if len(set(ids)) != len(ids):
        raise ValueError("manifest subject_id values must be unique")

    recordings = tuple(
        sorted(
            (process_recording(path, subject, group, config) for path, subject, group in rows),
            key=lambda r: r.subject_id,
        )
    )
    completed = [r for r in recordings if r.status == "ok"]
    anova = (
        _anova_report("coefficient_stats", COEFF_STAT_COLUMNS, completed, config.standardize_anova),
        _anova_report("energy", ENERGY_COLUMNS, completed, config.standardize_anova),
    )
    return RunReport(config=config.as_dict(), recordings=recordings, anova=anova)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.{CSV_FLOAT_DIGITS}g}"
    return "" if value is None else str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _safe_name(subject_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", subject_id) or "unnamed"


def _anova_table_rows(table: AnovaTable):
    label = {"columns": "Columns", "rows": "Rows", "interaction": "Interaction",
             "error": "Error", "total": "Total"}
    return [(label[r.source], r.ss, r.df, r.ms, r.f, r.p) for r in table.rows]


def emit_report(report: RunReport, fmt: str | None = None, out_dir=".") -> set[Path]:
    """Write report.json, features and ANOVA tables, and per-recording band dumps.

    Returns the set of files written. JSON numbers round-trip exactly; CSV
    numbers carry 12 significant digits.
    """
    fmt = fmt or report.config.get("output_format", "csv")
    if fmt not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written: set[Path] = set()

        path = out / "report.json"
        path.write_text(report.to_json() + "\n", encoding="utf-8")
        written.add(path)

        feature_dicts = [
            r.features.as_dict() for r in report.recordings if r.features is not None
        ]
        feature_header = [
            "subject_id", "group", "std_lf", "mean_lf", "std_hf", "mean_hf",
            "e_lf", "e_hf", "r_e",
        ]
        if fmt == "csv":
            path = out / "features.csv"
            _write_csv(path, feature_header,
                       [[d[k] for k in feature_header] for d in feature_dicts])
        else:
            path = out / "features.json"
            path.write_text(json.dumps(feature_dicts, indent=2) + "\n", encoding="utf-8")
        written.add(path)

        for a in report.anova:
            if a.status != "ok":
                continue
            if fmt == "csv":
                path = out / f"anova_{a.name}.csv"
                _write_csv(path, ["Source", "SS", "df", "MS", "F", "p"],
                           _anova_table_rows(a.table))
            else:
                path = out / f"anova_{a.name}.json"
                path.write_text(json.dumps(a.as_dict(), indent=2) + "\n", encoding="utf-8")
            written.add(path)

        for rec in report.recordings:
            if rec.status != "ok":
                continue
            path = out / f"bands_{_safe_name(rec.subject_id)}.csv"
            rows = [
                (band.band, node, offset, value, component)
                for band in rec.bands
                for node, offset, value, component in band.coefficients
            ]
            _write_csv(path, ["band", "node", "offset", "coefficient", "component"], rows)
            written.add(path)
    except OSError as exc:
        raise OSError(f"cannot write report under {out}: {exc}") from exc
    return written
