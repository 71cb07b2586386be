"""Report entries, three-valued verdicts and serialisation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class ReportEntry:
    test: str
    params: dict
    estimate: float
    se: float
    oracle: float
    tolerance: float
    verdict: str
    note: str = ""

    def params_str(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in self.params.items())


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v)


def verdict_within(estimate, se, oracle, tol):
    """Two-sided: pass iff |estimate - oracle| <= tol; inconclusive if se > tol."""
    if not math.isfinite(se) or se > tol:
        return INCONCLUSIVE
    return PASS if abs(estimate - oracle) <= tol else FAIL


def verdict_at_least(estimate, se, bound, k):
    """One-sided: pass iff estimate >= bound - k * se."""
    if not math.isfinite(se):
        return INCONCLUSIVE
    return PASS if estimate >= bound - k * se else FAIL


def verdict_at_most(estimate, se, bound, k):
    if not math.isfinite(se):
        return INCONCLUSIVE
    return PASS if estimate <= bound + k * se else FAIL


@dataclass
class EnsembleReport:
    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def extend(self, entries):
        self.entries.extend(entries)
        return self

    def by_test(self, name):
        return [e for e in self.entries if e.test == name]

    @property
    def failed(self):
        return [e for e in self.entries if e.verdict == FAIL]

    @property
    def inconclusive(self):
        return [e for e in self.entries if e.verdict == INCONCLUSIVE]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["test", "params", "estimate", "se", "oracle", "verdict"])
        for e in self.entries:
            w.writerow([e.test, e.params_str(), repr(float(e.estimate)), repr(float(e.se)),
                        repr(float(e.oracle)), e.verdict])
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        if self.meta:
            lines.append("ensemble: " + ", ".join(f"{k}={v}" for k, v in self.meta.items()))
        width = max([len(e.test) for e in self.entries] + [4])
        for e in self.entries:
            oracle = "-" if math.isnan(e.oracle) else f"{e.oracle:.6g}"
            line = (f"[{e.verdict.upper():>12}] {e.test:<{width}} {e.params_str()}: "
                    f"estimate={e.estimate:.6g} se={e.se:.3g} oracle={oracle} tol={e.tolerance:.3g}")
            if e.note:
                line += f"  ({e.note})"
            lines.append(line)
        n = len(self.entries)
        lines.append(f"{n} entries: {n - len(self.failed) - len(self.inconclusive)} pass, "
                     f"{len(self.failed)} fail, {len(self.inconclusive)} inconclusive")
        return "\n".join(lines) + "\n"
