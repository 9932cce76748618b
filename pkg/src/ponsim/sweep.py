"""Parameter sweeps over filter bandwidths, formats, bit rates and dispersion.

Every grid cell is an independent sensitivity search with its own noise seed
derived from the base seed and the cell index, so serial and parallel runs
write identical files.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .equalizer import EqualizerConfig
from .fiber import FiberSpec
from .filters import FilterSpec
from .link import MAX_PENALTY_DB, LinkScenario, sensitivity
from .reference import cases_for, nearest_cell, s0_dbm
from .rx import ApdParams
from .tx import ModFormat

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "format",
    "Rb_gbps",
    "b3db_pct",
    "b20db_pct",
    "dispersion_ps_nm",
    "wavelength_nm",
    "sensitivity_dbm",
    "penalty_db",
    "status",
    "seed",
]


@dataclass
class SweepGrid:
    formats: list = field(default_factory=lambda: ["pam2", "pam4", "edb", "odb"])
    rb_gbps: list = field(default_factory=lambda: [25.0])
    b3db_pct: list = field(default_factory=lambda: [15.0, 20.0, 25.0, 30.0, 35.0, 40.0])
    b20db_pct: list = field(default_factory=lambda: [40.0, 60.0, 80.0, 100.0, 120.0, 140.0])
    dispersion_ps_nm: list = field(default_factory=lambda: [0.0])
    wavelength_nm: float = 1550.0
    seed: int = 1
    poles: int | None = None
    apd: ApdParams = field(default_factory=ApdParams)
    eq: EqualizerConfig = field(default_factory=EqualizerConfig)
    prbs_seed: int = 1


@dataclass(frozen=True)
class Cell:
    index: int
    fmt: str
    rb_gbps: float
    b3db_pct: float
    b20db_pct: float
    dispersion_ps_nm: float


@dataclass
class SweepRow:
    format: str
    Rb_gbps: float
    b3db_pct: float
    b20db_pct: float
    dispersion_ps_nm: float
    wavelength_nm: float
    sensitivity_dbm: float
    penalty_db: float
    status: str
    seed: int

    def as_csv(self) -> list[str]:
        return [
            self.format,
            _num(self.Rb_gbps),
            _num(self.b3db_pct),
            _num(self.b20db_pct),
            _num(self.dispersion_ps_nm),
            _num(self.wavelength_nm),
            _num(self.sensitivity_dbm, 3),
            _num(self.penalty_db, 3),
            self.status,
            str(self.seed),
        ]


def _num(v, digits=None) -> str:
    if v is None or not math.isfinite(v):
        return "NA"
    if digits is not None:
        return f"{v:.{digits}f}"
    return f"{v:g}"


def cell_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)[0])


def grid_cells(grid: SweepGrid) -> list[Cell]:
    """Valid cells in output order; cells with B20dB <= B3dB are dropped."""
    b20_axis = [math.nan] if grid.poles is not None else sorted(grid.b20db_pct)
    cells = []
    combos = itertools.product(
        sorted(ModFormat.parse(f).value for f in grid.formats),
        sorted(grid.rb_gbps),
        sorted(grid.b3db_pct),
        b20_axis,
        sorted(grid.dispersion_ps_nm),
    )
    for fmt, rb, b3, b20, disp in combos:
        if grid.poles is None and not b20 > b3:
            log.warning("skipping cell %s %g G B3dB=%g%% B20dB=%g%%: need B20dB > B3dB", fmt, rb, b3, b20)
            continue
        cells.append(Cell(len(cells), fmt, rb, b3, b20, disp))
    return cells


def cell_scenario(grid: SweepGrid, cell: Cell) -> LinkScenario:
    rb = cell.rb_gbps * 1e9
    f3 = cell.b3db_pct * rb / 100.0
    if grid.poles is not None:
        flt = FilterSpec.butterworth(grid.poles, f3)
    else:
        flt = FilterSpec.supergaussian(f3, cell.b20db_pct * rb / 100.0)
    return LinkScenario(
        bit_rate=rb,
        fmt=cell.fmt,
        tx_filter=flt,
        fiber=FiberSpec(cell.dispersion_ps_nm, grid.wavelength_nm),
        apd=grid.apd,
        eq=grid.eq,
        prbs_seed=grid.prbs_seed,
        noise_seed=cell_seed(grid.seed, cell.index),
    )


def run_cell(grid: SweepGrid, cell: Cell) -> SweepRow:
    scenario = cell_scenario(grid, cell)
    b20 = cell.b20db_pct
    if grid.poles is not None:
        b20 = 100.0 * scenario.tx_filter.f20db / scenario.bit_rate
    sens, pen, status = math.nan, math.nan, "non-operable"
    try:
        res = sensitivity(scenario)
        if res.converged:
            sens = res.sensitivity_dbm
            pen = sens - s0_dbm(cell.rb_gbps)
            status = "ok" if pen <= MAX_PENALTY_DB else "non-operable"
        else:
            log.info("cell %d non-operable: %s", cell.index, res.reason)
    except Exception as exc:  # a failing cell must not take the sweep down
        log.warning("cell %d failed: %s", cell.index, exc)
    return SweepRow(
        cell.fmt,
        cell.rb_gbps,
        cell.b3db_pct,
        b20,
        cell.dispersion_ps_nm,
        grid.wavelength_nm,
        sens,
        pen,
        status,
        scenario.noise_seed,
    )


def _run_cell_star(args):
    return run_cell(*args)


def run_sweep(grid: SweepGrid, out, workers: int = 1, emit_plot_script: bool = False) -> list[SweepRow]:
    """Evaluate every cell of ``grid`` and write the rows to ``out`` as CSV.

    Also writes ``<out>_cases.csv``, which maps each bundled reference case
    for the swept bit rates to its nearest grid cell.
    """
    out = Path(out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from None

    cells = grid_cells(grid)
    jobs = [(grid, c) for c in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_star, jobs))
    else:
        rows = [_run_cell_star(j) for j in jobs]
    write_rows(out, rows)
    write_case_overlay(_sibling(out, "_cases.csv"), grid)
    if emit_plot_script:
        _sibling(out, "_plot.py").write_text(plot_script(out.name))
    return rows


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def write_rows(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.as_csv())


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_case_overlay(path, grid: SweepGrid) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["case", "technology", "rb_gbps", "b3db_pct", "b20db_pct", "grid_b3db_pct", "grid_b20db_pct"])
        for rb in sorted(grid.rb_gbps):
            for c in cases_for(rb):
                g3, g20 = nearest_cell(c, grid.b3db_pct, grid.b20db_pct)
                w.writerow([c.label, c.technology, c.rb_gbps, _num(c.b3db_pct), _num(c.b20db_pct), _num(g3), _num(g20)])


PLOT_TEMPLATE = '''"""Contour plots of power penalty from {csv_name}.

Generated by ponsim; reads only the sweep CSV. Run with: python {script_name}
"""
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
CSV = HERE / "{csv_name}"

groups = defaultdict(list)
with open(CSV, newline="") as fh:
    for row in csv.DictReader(fh):
        key = (row["format"], row["Rb_gbps"], row["dispersion_ps_nm"])
        groups[key].append(row)

for (fmt, rb, disp), rows in sorted(groups.items()):
    b3 = np.array([float(r["b3db_pct"]) for r in rows])
    b20 = np.array([float(r["b20db_pct"]) for r in rows])
    pen = np.array([float(r["penalty_db"]) if r["penalty_db"] != "NA" else np.nan for r in rows])
    ok = np.isfinite(pen)
    fig, ax = plt.subplots(figsize=(5, 4))
    if ok.sum() >= 3 and len(set(b3[ok])) > 1 and len(set(b20[ok])) > 1:
        cs = ax.tricontour(b3[ok], b20[ok], pen[ok], levels=np.arange(0, 12.5, 0.5), cmap="viridis")
        ax.clabel(cs, fontsize=7)
    ax.scatter(b3[~ok], b20[~ok], marker="x", color="grey", label="non-operable")
    ax.set_xlabel("B3dB [%]")
    ax.set_ylabel("B20dB [%]")
    ax.set_title(f"{{fmt.upper()}} {{rb}} Gb/s, {{disp}} ps/nm: penalty [dB]")
    if (~ok).any():
        ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(HERE / f"{stem}_{{fmt}}_{{rb}}G_{{disp}}psnm.png", dpi=120)
    plt.close(fig)
'''


def plot_script(csv_name: str) -> str:
    stem = Path(csv_name).stem
    return PLOT_TEMPLATE.format(csv_name=csv_name, script_name=f"{stem}_plot.py", stem=stem)
