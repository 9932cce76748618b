"""Bundled reference data: published device-pair bandwidths and S0 anchors."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


@dataclass(frozen=True)
class ReferenceCase:
    table: int
    case: int
    technology: str
    tx_ref: str
    tx_f3db_ghz: float | None
    rx_ref: str
    rx_f3db_ghz: float | None
    rb_gbps: int
    b3db_pct: float
    b20db_pct: float

    @property
    def label(self) -> str:
        return f"T{self.table}C{self.case}"


def _read(name: str) -> list[dict]:
    text = resources.files("ponsim.data").joinpath(name).read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def _opt_float(v: str):
    return float(v) if v else None


@lru_cache(maxsize=None)
def reference_cases() -> tuple[ReferenceCase, ...]:
    out = []
    for r in _read("reference_cases.csv"):
        out.append(
            ReferenceCase(
                table=int(r["table"]),
                case=int(r["case"]),
                technology=r["technology"],
                tx_ref=r["tx_ref"],
                tx_f3db_ghz=_opt_float(r["tx_f3db_ghz"]),
                rx_ref=r["rx_ref"],
                rx_f3db_ghz=_opt_float(r["rx_f3db_ghz"]),
                rb_gbps=int(r["rb_gbps"]),
                b3db_pct=float(r["b3db_pct"]),
                b20db_pct=float(r["b20db_pct"]),
            )
        )
    return tuple(out)


def cases_for(rb_gbps: int, table: int | None = None) -> list[ReferenceCase]:
    return [
        c
        for c in reference_cases()
        if c.rb_gbps == int(rb_gbps) and (table is None or c.table == table)
    ]


@lru_cache(maxsize=None)
def s0_anchors() -> dict[int, float]:
    return {int(r["rb_gbps"]): float(r["s0_dbm"]) for r in _read("s0_anchors.csv")}


def s0_dbm(rb_gbps) -> float:
    """Reference PAM-2 sensitivity for a bit rate given in Gb/s."""
    try:
        return s0_anchors()[int(round(float(rb_gbps)))]
    except KeyError:
        raise ValueError(f"no S0 anchor for {rb_gbps} Gb/s") from None


def nearest_cell(case: ReferenceCase, b3db_values, b20db_values) -> tuple[float, float]:
    """Grid cell (B3dB, B20dB) closest to a reference case, in percent."""
    b3 = min(b3db_values, key=lambda v: abs(v - case.b3db_pct))
    b20 = min(b20db_values, key=lambda v: abs(v - case.b20db_pct))
    return b3, b20


def format_tables() -> str:
    """Plain-text dump of both tables."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "case", "technology", "tx_ref", "tx_f3db_ghz", "rx_ref",
                "rx_f3db_ghz", "rb_gbps", "b3db_pct", "b20db_pct"])
    for c in reference_cases():
        w.writerow([c.table, c.case, c.technology, c.tx_ref,
                    "" if c.tx_f3db_ghz is None else c.tx_f3db_ghz, c.rx_ref,
                    "" if c.rx_f3db_ghz is None else c.rx_f3db_ghz,
                    c.rb_gbps, c.b3db_pct, c.b20db_pct])
    w.writerow([])
    w.writerow(["rb_gbps", "s0_dbm"])
    for rb, s0 in sorted(s0_anchors().items()):
        w.writerow([rb, s0])
    return buf.getvalue()
