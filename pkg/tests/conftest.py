import numpy as np
import pytest


def synthetic_rr(n=300, seed=0, base_ms=800.0, lf_amp=40.0, hf_amp=25.0, noise=5.0):
    """RR series (ms) with LF and HF modulation at the usual band centers."""
    rng = np.random.default_rng(seed)
    rr = np.empty(n)
    t = 0.0
    for k in range(n):
        v = (base_ms
             + lf_amp * np.sin(2 * np.pi * 0.1 * t)
             + hf_amp * np.sin(2 * np.pi * 0.3 * t)
             + rng.normal(0.0, noise))
        rr[k] = v
        t += v / 1000.0
    return rr


def rr_text(rr):
    return "\n".join(f"{v:.6f}" for v in rr) + "\n"


@pytest.fixture
def write_dataset(tmp_path):
    """Write recordings + manifest; returns (manifest_path, data_dir)."""

    def _write(spec, manifest_name="manifest.csv"):
        data = tmp_path / "data"
        data.mkdir(exist_ok=True)
        lines = ["path,subject_id,group"]
        for subject_id, group, rr in spec:
            path = data / f"{subject_id}.txt"
            path.write_text(rr_text(rr), encoding="utf-8")
            lines.append(f"data/{subject_id}.txt,{subject_id},{group}")
        manifest = tmp_path / manifest_name
        manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return manifest

    return _write


def balanced_spec(per_group=3, n=300):
    spec = []
    seed = 0
    for group in ("Control", "VT", "VF"):
        for i in range(per_group):
            spec.append((f"{group.lower()}{i}", group,
                         synthetic_rr(n=n, seed=seed, hf_amp=20.0 + 5.0 * i)))
            seed += 1
    return spec
