"""Command line front end for the batch pipeline."""

from __future__ import annotations

import argparse
import sys

from .pipeline import PipelineConfig, emit_report, run_pipeline


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrvwp",
        description=(
            "Analyze RR-interval recordings: wavelet packet band decomposition, "
            "background/significant coefficient split, band features, and a "
            "balanced two-way ANOVA across subject groups."
        ),
    )
    parser.add_argument("--manifest", required=True,
                        help="CSV manifest with header path,subject_id,group")
    parser.add_argument("--out", required=True, help="output directory for reports")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="format for the feature/ANOVA tables (default csv)")
    parser.add_argument("--rate", type=float, default=4.0, metavar="HZ",
                        help="uniform resampling rate (default 4)")
    parser.add_argument("--wavelet-order", type=int, default=4, metavar="N",
                        help="Daubechies order / vanishing moments (default 4)")
    parser.add_argument("--depth", type=int, default=6, metavar="L",
                        help="packet decomposition depth (default 6)")
    parser.add_argument("--mad-source", choices=("band", "first-level"), default="band",
                        help="where the noise scale is estimated (default: each band)")
    parser.add_argument("--detrend", action="store_true",
                        help="subtract the mean of the resampled signal before analysis")
    parser.add_argument("--standardize-anova", action="store_true",
                        help="z-score feature columns before the ANOVA (exploratory)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = PipelineConfig(
            rate_hz=args.rate,
            wavelet_order=args.wavelet_order,
            depth=args.depth,
            mad_source="per-band" if args.mad_source == "band" else args.mad_source,
            detrend=args.detrend,
            standardize_anova=args.standardize_anova,
            output_format=args.format,
            output_dir=args.out,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run_pipeline(args.manifest, config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        written = emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    n_ok = sum(1 for r in report.recordings if r.status == "ok")
    print(f"processed {len(report.recordings)} recording(s): {n_ok} ok, "
          f"{len(report.recordings) - n_ok} failed")
    for rec in report.recordings:
        if rec.status != "ok":
            print(f"  failed {rec.subject_id}: {rec.error}")
    for a in report.anova:
        if a.status == "ok":
            print(f"anova {a.name}: ok "
                  f"({len(a.row_labels)} groups x {len(a.column_labels)} features "
                  f"x {a.replicates} subjects)")
        else:
            print(f"anova {a.name}: skipped ({a.reason})")
    print(f"wrote {len(written)} file(s) to {args.out}")
    return 0 if report.all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
