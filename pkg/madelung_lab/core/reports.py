"""运行报告: 断言、来源标签与确定性负载"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..common.utils import canonical_json, digest, to_jsonable


PROVENANCE_TAGS = ("PAPER", "TRIVIAL", "DERIVED")
COMPARISONS = ("<", "<=", ">", ">=", "abs<", "finite", "true")


@dataclass
class Assertion:
    """单项数值断言; value 与 threshold 按 comparison 比较"""

    name: str
    value: Any
    threshold: Optional[float]
    comparison: str
    provenance: str
    tolerance: Optional[float] = None
    note: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance tag: {self.provenance}")
        if self.comparison not in COMPARISONS:
            raise ValueError(f"unknown comparison: {self.comparison}")
        if self.tolerance is None and self.threshold is not None:
            self.tolerance = self.threshold

    @property
    def passed(self) -> bool:
        v = self.value
        if self.comparison == "true":
            return bool(v)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            return False
        v = float(v)
        if self.comparison == "finite":
            return math.isfinite(v)
        t = float(self.threshold)
        if self.comparison == "<":
            return v < t
        if self.comparison == "<=":
            return v <= t
        if self.comparison == ">":
            return v > t
        if self.comparison == ">=":
            return v >= t
        return abs(v) < t

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": to_jsonable(self.value),
            "threshold": self.threshold,
            "comparison": self.comparison,
            "tolerance": self.tolerance,
            "provenance": self.provenance,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class RunReport:
    command: str
    config: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    assertions: List[Assertion] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def check(self, name: str, value: Any, threshold: Optional[float], comparison: str,
              provenance: str, tolerance: Optional[float] = None, note: str = "") -> Assertion:
        assertion = Assertion(name, value, threshold, comparison, provenance, tolerance, note)
        self.assertions.append(assertion)
        return assertion

    def time(self, label: str, seconds: float) -> None:
        self.timings[label] = float(seconds)

    def stop_clock(self) -> None:
        self.timings["total"] = time.perf_counter() - self._started

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    @property
    def failures(self) -> List[str]:
        return [a.name for a in self.assertions if not a.passed]

    @property
    def inputs_digest(self) -> str:
        return digest(self.config)

    def payload(self) -> Dict[str, Any]:
        """报告中与计时无关的部分; 相同 (config, seed) 下逐字节一致"""
        return to_jsonable({
            "command": self.command,
            "config": self.config,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "assertions": [a.to_dict() for a in self.assertions],
            "passed": self.passed,
        })

    def payload_text(self) -> str:
        return canonical_json(self.payload())

    def to_dict(self) -> Dict[str, Any]:
        return {**self.payload(), "timings": to_jsonable(self.timings)}
