import io
import json

import pytest

from sinkfree import __version__
from sinkfree.cli import parse_sset, rational, run
from sinkfree.graph import parse_graph

K4_TEXT = "p 4 6\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n"
C3_TEXT = "p 3 3\ne 0 1\ne 1 2\ne 2 0\n"


@pytest.fixture
def k4(tmp_path):
    p = tmp_path / "k4.txt"
    p.write_text(K4_TEXT)
    return str(p)


@pytest.fixture
def c3(tmp_path):
    p = tmp_path / "c3.txt"
    p.write_text(C3_TEXT)
    return str(p)


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def test_helpers():
    assert rational(0.5) == {"num": "1", "den": "2"}
    assert parse_sset("all") == "all"
    assert parse_sset("none") == ()
    assert parse_sset("1,2,3") == (1, 2, 3)


def test_count_oracle(k4):
    code, out = call_json("count", k4, "--method", "oracle")
    assert code == 0
    assert out["count"] == "32"
    assert out["count_rational"] == {"num": "32", "den": "1"}
    assert out["version"] == __version__ and out["config"]["command"] == "count"


def test_count_det(k4):
    code, out = call_json("count", k4, "--method", "det", "--eps", "0.5")
    assert code == 0
    assert 16 <= out["count"] <= 48
    assert len(out["factors"]) == 4


def test_count_fpras_replay(k4):
    a = call_json("count", k4, "--method", "fpras", "--eps", "0.9", "--seed", "4")
    b = call_json("count", k4, "--method", "fpras", "--eps", "0.9", "--seed", "4")
    assert a == b and a[0] == 0


def test_oracle_queries(k4):
    code, out = call_json("oracle", k4, "--query", "q")
    assert (out["num"], out["den"]) == ("1", "2")
    code, out = call_json("oracle", k4, "--query", "marginal", "--s", "1,2,3", "--v", "0")
    assert (out["num"], out["den"]) == ("4", "5")


def test_marginal_methods(k4):
    code, out = call_json("marginal", k4, "--method", "enum", "--v", "0", "--depth", "3")
    assert code == 0 and (out["num"], out["den"]) == ("7", "8")
    code, out = call_json("marginal", k4, "--method", "oracle", "--e", "0", "--s", "all")
    assert out["value"] == 0.5
    code, out = call_json("marginal", k4, "--method", "mc", "--v", "0", "--s", "1,2,3",
                          "--draws", "4000", "--seed", "3")
    assert abs(out["value"] - 0.8) <= 4 * out["stderr"]


def test_sample_replay(k4):
    a = call("sample", k4, "--seed", "7")
    b = call("sample", k4, "--seed", "7")
    assert a == b and a[0] == 0
    out = json.loads(a[1])
    G = parse_graph(K4_TEXT)
    heads = {tuple(sorted(t_h)) for t_h in out["orientation"]}
    assert heads == {tuple(sorted(e)) for e in G.edges}


def test_sample_fast_text(k4):
    code, text = call("sample", k4, "--method", "fast", "--format", "text", "--seed", "2")
    lines = text.strip().splitlines()
    assert code == 0 and len(lines) == 6
    assert all(line.startswith("e ") for line in lines)


def test_sample_fast_trace(k4, tmp_path):
    path = tmp_path / "trace.jsonl"
    code, _ = call("sample", k4, "--method", "fast", "--trace", str(path), "--seed", "2")
    assert code == 0
    events = [json.loads(line) for line in path.read_text().splitlines()]
    assert events and events[0]["focus"] == 0


def test_min_degree_error(c3):
    for argv in (("count", c3), ("count", c3, "--method", "fpras"), ("sample", c3, "--method", "fast")):
        code, out = call_json(*argv)
        assert code == 1 and out["error"] == "min_degree"
        assert "message" in out and "config" in out


def test_prs_allows_low_degree(c3):
    code, out = call_json("sample", c3, "--seed", "1")
    assert code == 0


def test_parse_error(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("p 2 1\ne 0 5\n")
    code, out = call_json("count", str(p), "--method", "oracle")
    assert code == 1 and out["error"] == "parse_error" and "line 2" in out["message"]


def test_missing_file():
    code, out = call_json("count", "/nonexistent/graph.txt")
    assert code == 1 and out["error"] == "io_error"


def test_bad_eps(k4):
    code, out = call_json("count", k4, "--eps", "1.5")
    assert code == 1 and out["error"] == "invalid_value"


def test_budget_exceeded(tmp_path):
    from sinkfree.graph import hypercube, serialize_graph

    p = tmp_path / "q3.txt"
    p.write_text(serialize_graph(hypercube(3)))
    code, out = call_json("count", str(p), "--budget", "20")
    assert code == 1 and out["error"] == "budget_exceeded"
    code, out = call_json("count", str(p), "--budget", "20", "--force")
    assert code == 0 and out["budget_hit"] is True


def test_usage_errors(k4):
    assert call("count", k4, "--bogus")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("marginal", k4, "--method", "enum", "--v", "0")[0] == 2


def test_verify_and_bench():
    code, out = call("verify", "wheel-slack")
    assert code == 0
    code, text = call("bench", "--sizes", "20,40", "--min-seconds", "0.01")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "suite,n,m,eps,seconds,result"
    assert lines[-1].startswith("# slope=")
