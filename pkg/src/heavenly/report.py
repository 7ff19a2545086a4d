"""Verification report records and their JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class VerificationReport:
    check: str
    case: str
    params: dict[str, Any]
    defect: float
    tolerance: float
    sign: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)
    secondary: tuple[tuple[str, float, float], ...] = ()

    @property
    def passed(self) -> bool:
        """Primary and every secondary (name, defect, tolerance) entry within tolerance."""
        checks = [(self.defect, self.tolerance)] + [(d, t) for _, d, t in self.secondary]
        return all(math.isfinite(d) and d <= t for d, t in checks)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "check": self.check,
            "case": self.case,
            "params": dict(sorted(self.params.items())),
            "defect": float(self.defect) if math.isfinite(self.defect) else None,
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        if self.sign is not None:
            out["sign"] = int(self.sign)
        if self.secondary:
            out["secondary"] = {
                name: {"defect": float(d) if math.isfinite(d) else None, "tolerance": float(t), "pass": bool(math.isfinite(d) and d <= t)}
                for name, d, t in sorted(self.secondary)
            }
        if self.extra:
            out["extra"] = dict(sorted(self.extra.items()))
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        sign = f" sign={self.sign:+d}" if self.sign is not None else ""
        more = "".join(f" {n}={d:.3e}/{t:.1e}" for n, d, t in self.secondary)
        return f"[{status}] {self.check} ({self.case}): defect={self.defect:.3e} tol={self.tolerance:.1e}{sign}{more}"


def _sort_key(r: VerificationReport):
    return (r.check, r.case, json.dumps(r.params, sort_keys=True, default=str))


def render_reports(reports: list[VerificationReport], timestamp: bool = True) -> str:
    """Canonical JSON document: reports sorted by check name, keys sorted."""
    body: dict[str, Any] = {
        "format": REPORT_FORMAT_VERSION,
        "reports": [r.to_dict() for r in sorted(reports, key=_sort_key)],
    }
    if timestamp:
        body["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def strip_timestamp(text: str) -> dict[str, Any]:
    doc = json.loads(text)
    doc.pop("generated_at", None)
    return doc
