from __future__ import annotations

import json
import math

import pytest

from genderscope.render import (
    fmt_chi2,
    fmt_p,
    fmt_pct,
    fmt_ratio,
    json_num,
    render_markdown,
    render_rows_json,
    render_table,
    render_tsv,
)


class TestFormatters:
    def test_ratio(self):
        assert fmt_ratio(1.934) == "1.93"
        assert fmt_ratio(math.inf, 40) == "40/0"
        assert fmt_ratio(math.inf) == "inf"
        assert fmt_ratio(math.nan) == "-"

    def test_chi2_one_decimal(self):
        assert fmt_chi2(8.8366) == "8.8"
        assert fmt_chi2(3.9633) == "4.0"

    def test_pct_rounds_to_whole(self):
        assert fmt_pct(23 / 124) == "19%"
        assert fmt_pct(0.414) == "41%"
        assert fmt_pct(1.0) == "100%"
        assert fmt_pct(0.0) == "0%"

    def test_p_three_significant(self):
        assert fmt_p(0.0499988) == "0.05"
        assert fmt_p(1.4268e-10) == "1.43e-10"

    def test_json_num(self):
        assert json_num(2.5) == 2.5
        assert json_num(math.inf) is None
        assert json_num(math.nan) is None
        assert json_num(None) is None


class TestRenderers:
    header = ["term", "count"]
    rows = [["nurse", "23"], ["home", "26"]]

    def test_tsv_with_comment(self):
        out = render_tsv(self.header, self.rows, comment="run abc")
        lines = out.splitlines()
        assert lines[0] == "# run abc"
        assert lines[1] == "term\tcount"
        assert lines[2] == "nurse\t23"
        assert out.endswith("\n")

    def test_markdown_escapes_pipes(self):
        out = render_markdown(self.header, [["a|b", "1"]])
        assert "a\\|b" in out
        assert out.splitlines()[1].startswith("| ---")

    def test_json_rows(self):
        parsed = json.loads(render_rows_json(self.header, self.rows))
        assert parsed == [{"term": "nurse", "count": "23"},
                          {"term": "home", "count": "26"}]

    def test_dispatch(self):
        assert render_table(self.header, self.rows, "tsv").startswith("term\t")
        assert render_table(self.header, self.rows, "markdown").startswith("| term")
        json.loads(render_table(self.header, self.rows, "json"))
        with pytest.raises(ValueError):
            render_table(self.header, self.rows, "xml")
