"""Shared fixtures: a desk-scale run directory produced through the
simulator's command-line interface (the only coupling to the primary
package), plus a small synthetic run directory with hand-computed
summary values."""

import subprocess
import sys

import pytest

CONFIG = """\
n_initial: 30
capacity: 60
n_food: 40
steps: 800
sample_every: 50
stability_window: 3
base_seed: 424242
"""


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweep")
    config = root / "config.yaml"
    config.write_text(CONFIG)
    out = root / "run"
    result = subprocess.run(
        [sys.executable, "-m", "hierarchy_abm", "sweep",
         "--config", str(config), "--grid-c", "0.05,0.5", "--grid-u", "0.1,1.0",
         "--reps", "3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    return str(out)


SYNTHETIC_WINDOW = 3

# three replicates, constant TI values per replicate; the ensemble
# median is 0.30 and the IQR is 0.01 at every sample, so the stability
# criterion holds from the first sample onward
SYNTHETIC_TI = {0: 0.30, 1: 0.29, 2: 0.31}
SYNTHETIC_STEPS = [100, 200, 300, 400, 500]


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("synthetic")
    rows = ["c,u,replicate,step,ti,population"]
    for rep, ti in SYNTHETIC_TI.items():
        for step in SYNTHETIC_STEPS:
            rows.append(f"0.1,1.0,{rep},{step},{ti},25")
    (root / "trajectories.csv").write_text("\n".join(rows) + "\n")
    summary = [
        "c,u,replicates,mean_final_ti,median_final_ti,iqr_final_ti,regime,onset_step,extinct_count",
        "0.1,1.0,3,0.3,0.3,0.01,ConsistentDecrease,100,0",
    ]
    (root / "summary.csv").write_text("\n".join(summary) + "\n")
    (root / "meta.json").write_text(
        '{"config": {"stability_window": %d}}\n' % SYNTHETIC_WINDOW)
    return str(root)
