"""运行报告与 JSON 工具测试"""

import math

import numpy as np
import pytest

from madelung_lab.common.utils import canonical_json, digest, to_jsonable
from madelung_lab.core.reports import Assertion, RunReport


class TestAssertion:
    """比较算子与来源标签"""

    @pytest.mark.parametrize("value,threshold,comparison,expected", [
        (0.5, 1.0, "<", True),
        (1.0, 1.0, "<", False),
        (1.0, 1.0, "<=", True),
        (2.0, 1.0, ">", True),
        (1.0, 1.0, ">=", True),
        (-0.5, 1.0, "abs<", True),
        (-1.5, 1.0, "abs<", False),
        (3.0, None, "finite", True),
        (math.inf, None, "finite", False),
        (True, None, "true", True),
        (0, None, "true", False),
    ])
    def test_comparisons(self, value, threshold, comparison, expected):
        assert Assertion("a", value, threshold, comparison, "DERIVED").passed is expected

    @pytest.mark.parametrize("value", [math.nan, None])
    def test_missing_values_fail(self, value):
        assert not Assertion("a", value, 1.0, "<", "PAPER").passed

    def test_unknown_tags(self):
        with pytest.raises(ValueError):
            Assertion("a", 1.0, 1.0, "<", "GUESS")
        with pytest.raises(ValueError):
            Assertion("a", 1.0, 1.0, "!=", "PAPER")

    def test_tolerance_defaults_to_threshold(self):
        assert Assertion("a", 0.1, 1e-3, "<", "TRIVIAL").tolerance == 1e-3
        assert Assertion("a", 0.1, 1e-3, "<", "TRIVIAL", tolerance=1e-2).tolerance == 1e-2


class TestRunReport:
    """通过/失败汇总与确定性负载"""

    def _report(self):
        report = RunReport(command="verify-lp", config={"L": 40.0, "N": 512, "seed": 0})
        report.results["residual"] = np.float64(1e-15)
        report.check("residual", 1e-15, 1e-12, "<", "TRIVIAL")
        report.check("ratio", 2.0, 1.5, "<", "DERIVED")
        return report

    def test_failures(self):
        report = self._report()
        assert not report.passed
        assert report.failures == ["ratio"]

    def test_payload_excludes_timings(self):
        a = self._report()
        b = self._report()
        a.time("probe", 1.0)
        a.stop_clock()
        assert a.payload_text() == b.payload_text()
        assert "timings" not in a.payload()
        assert a.to_dict()["timings"]["probe"] == 1.0

    def test_inputs_digest(self):
        report = self._report()
        assert report.inputs_digest == digest({"seed": 0, "N": 512, "L": 40.0})
        assert len(report.inputs_digest) == 64


class TestJsonable:
    """numpy 与非有限值的 JSON 形式"""

    def test_conversions(self):
        data = {
            "nan": math.nan, "inf": math.inf, "neg": -math.inf,
            "arr": np.arange(3), "flag": np.bool_(True), "z": 1.0 + 2.0j, "t": (1, 2),
        }
        assert to_jsonable(data) == {
            "nan": None, "inf": "inf", "neg": "-inf", "arr": [0, 1, 2], "flag": True,
            "z": {"re": 1.0, "im": 2.0}, "t": [1, 2],
        }

    def test_canonical_json_is_key_order_independent(self):
        assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1}) == '{"a":2,"b":1}'
