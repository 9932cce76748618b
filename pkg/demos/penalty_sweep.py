"""Small penalty map over normalized filter bandwidths, written to CSV.

The same grid can be run from the command line with ``ponsim sweep``; the
emitted plot script draws contours of the penalty.
"""

import sys
from pathlib import Path

from ponsim.sweep import SweepGrid, run_sweep

out = Path(sys.argv[1] if len(sys.argv) > 1 else "edb_sweep.csv")
grid = SweepGrid(formats=["edb"], b3db_pct=[20.0, 30.0, 40.0], b20db_pct=[60.0, 100.0])
rows = run_sweep(grid, out, workers=2, emit_plot_script=True)
for row in rows:
    print(",".join(row.as_csv()))
print(f"written {out}")
