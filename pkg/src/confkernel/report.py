"""Structured check results and the versioned report record."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Residual:
    """One failing identity: where it failed, which component, what is left over."""

    location: tuple
    component: str
    residual: str

    def to_dict(self) -> dict:
        return {"location": list(self.location), "component": self.component, "residual": self.residual}


@dataclass
class Report:
    check: str
    subject: str
    checked: int = 0
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.residuals

    def __bool__(self) -> bool:
        return self.passed

    def add(self, location: Sequence, component: str, residual) -> None:
        self.residuals.append(Residual(tuple(location), component, str(residual)))

    def failures_at(self, *location) -> list:
        return [r for r in self.residuals if r.location == tuple(location)]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "subject": self.subject,
            "passed": self.passed,
            "checked": self.checked,
            "residuals": [r.to_dict() for r in self.residuals],
            "notes": list(self.notes),
        }

    def __str__(self) -> str:
        return render_text({"results": [self.to_dict()]})


def thread_count() -> int:
    raw = os.environ.get("CONFKERNEL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: Iterable) -> list:
    """Map ``fn`` over ``items``; results keep input order whatever the thread count."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def merge(report: Report, parts: Iterable) -> Report:
    """Fold per-item (checked, residual list) pairs into ``report`` in input order."""
    for checked, residuals in parts:
        report.checked += checked
        report.residuals.extend(residuals)
    return report


def make_record(command: list, results: list, extra: dict | None = None) -> dict:
    record = {"schema": SCHEMA_VERSION, "command": list(command), "results": results}
    if extra:
        record.update(extra)
    record["passed"] = all(r.get("passed", True) for r in results)
    return record


def render_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _render_value(key: str, value: Any, indent: str, out: list) -> None:
    if isinstance(value, dict):
        if not value:
            out.append(f"{indent}{key}: {{}}")
            return
        out.append(f"{indent}{key}:")
        for k in sorted(value):
            _render_value(k, value[k], indent + "  ", out)
    elif isinstance(value, list):
        if not value:
            out.append(f"{indent}{key}: []")
            return
        out.append(f"{indent}{key}:")
        for item in value:
            if isinstance(item, dict):
                out.append(f"{indent}  -")
                for k in sorted(item):
                    _render_value(k, item[k], indent + "    ", out)
            else:
                out.append(f"{indent}  - {item}")
    else:
        out.append(f"{indent}{key}: {value}")


def render_text(record: dict) -> str:
    """Human-readable rendering carrying exactly the fields of the JSON form."""
    out: list = []
    for k in sorted(record):
        _render_value(k, record[k], "", out)
    return "\n".join(out) + "\n"
