#!/usr/bin/env python3
"""Generate a synthetic RR-interval dataset plus manifest for pipeline runs.

Each recording is a modulated beat series: a slow oscillation near 0.1 Hz, a
faster one near 0.3 Hz, and Gaussian jitter. Groups differ in modulation
depth so a balanced batch produces a non-trivial ANOVA. Useful for smoke
tests and demos; real analyses should point the manifest at actual RR files.
"""

import argparse
from pathlib import Path

import numpy as np

GROUPS = ("Control", "VT", "VF")


def synthetic_rr(n, seed, base_ms, lf_amp, hf_amp, noise_ms):
    rng = np.random.default_rng(seed)
    rr = np.empty(n)
    t = 0.0
    for k in range(n):
        value = (base_ms
                 + lf_amp * np.sin(2 * np.pi * 0.1 * t)
                 + hf_amp * np.sin(2 * np.pi * 0.3 * t)
                 + rng.normal(0.0, noise_ms))
        rr[k] = value
        t += value / 1000.0
    return rr


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="dataset directory to create")
    parser.add_argument("--per-group", type=int, default=3,
                        help="recordings per group (default 3)")
    parser.add_argument("--intervals", type=int, default=1000,
                        help="RR intervals per recording (default 1000)")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    args = parser.parse_args()

    out = Path(args.out)
    data = out / "data"
    data.mkdir(parents=True, exist_ok=True)

    lines = ["path,subject_id,group"]
    seed = args.seed
    for gi, group in enumerate(GROUPS):
        for i in range(args.per_group):
            rr = synthetic_rr(
                n=args.intervals,
                seed=seed,
                base_ms=780.0 + 40.0 * gi,
                lf_amp=35.0 + 6.0 * gi,
                hf_amp=18.0 + 5.0 * gi + 3.0 * i,
                noise_ms=6.0,
            )
            subject = f"{group.lower()}{i}"
            (data / f"{subject}.txt").write_text(
                "# synthetic RR intervals (ms)\n"
                + "\n".join(f"{v:.3f}" for v in rr) + "\n",
                encoding="utf-8",
            )
            lines.append(f"data/{subject}.txt,{subject},{group}")
            seed += 1

    manifest = out / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.per_group * len(GROUPS)} recordings under {data}")
    print(f"manifest: {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
