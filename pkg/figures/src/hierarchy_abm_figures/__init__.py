"""Non-interactive figure scripts over hierarchy-abm run directories.

Every script is a pure reader of the documented output files
(summary.csv, trajectories.csv, network_*.json, meta.json); nothing is
re-simulated and no run directory is ever modified.
"""

__version__ = "0.1.0"

import matplotlib

matplotlib.use("Agg")
