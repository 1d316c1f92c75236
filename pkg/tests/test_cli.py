"""Command-line harness: subcommands, exit codes, CSV and trace output."""
import re

import pytest

from srvnp.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main
from srvnp.runner import CSV_HEADER

SMALL = """
node_count = 12
area_x = 400
area_y = 400
sim_duration_s = 10
speed_max = 5
flow_count = 3
seed = 2
"""

TRACE_RE = re.compile(
    r"^t=\d+ node=\d+ ev=(RREQ_TX|RREQ_DROP_DUP|RREQ_DROP_POWER|RREP_TX|"
    r"RRPR_TX|ERR_TX|LINK_BREAK|REPAIR_START|REPAIR_OK|REPAIR_FAIL|DATA_TX|"
    r"DATA_RX|DATA_DROP|VN_ADD|VN_EVICT)( \S+=\S+)*$")


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "scenario.cfg"
    p.write_text(SMALL)
    return str(p)


def test_run_writes_header_and_one_row(cfg_file, tmp_path, capsys):
    out = tmp_path / "out.csv"
    assert main(["run", cfg_file, "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2
    row = lines[1].split(",")
    assert len(row) == len(CSV_HEADER.split(","))
    assert row[1] == "srvnp"
    assert row[2] == "12"


def test_run_protocol_flag_overrides_config(cfg_file, tmp_path):
    out = tmp_path / "out.csv"
    assert main(["run", cfg_file, "--protocol", "aodv_baseline",
                 "--out", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[1].split(",")[1] == "aodv_baseline"


def test_run_trace_lines_match_grammar(cfg_file, tmp_path):
    out = tmp_path / "out.csv"
    tr = tmp_path / "trace.txt"
    assert main(["run", cfg_file, "--out", str(out),
                 "--trace", str(tr)]) == EXIT_OK
    lines = tr.read_text().splitlines()
    assert lines, "trace should not be empty"
    for line in lines:
        assert TRACE_RE.match(line), line


def test_sweep_produces_full_cartesian_product(cfg_file, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", cfg_file, "--param", "pause_time_s",
                 "--values", "0,30", "--seeds", "1,2",
                 "--protocols", "srvnp,aodv_baseline",
                 "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 2 * 2
    pauses = {row.split(",")[3] for row in lines[1:]}
    assert pauses == {"0.0", "30.0"}


def test_validate_ok_and_exit_codes(cfg_file, capsys):
    assert main(["validate", cfg_file]) == EXIT_OK
    assert "12 nodes" in capsys.readouterr().out


def test_validate_bad_config_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("node_cout = 5\n")
    assert main(["validate", str(p)]) == EXIT_USAGE
    assert "node_count" in capsys.readouterr().err


def test_missing_file_exits_1(capsys):
    assert main(["run", "/no/such/file.cfg"]) == EXIT_USAGE


def test_bad_usage_exits_1(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["sweep"]) == EXIT_USAGE


def test_fixtures_table_output(capsys):
    assert main(["fixtures", "table1"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "node computed printed"
    assert len(out) == 10


def test_fixtures_fig1_and_fig2(capsys):
    assert main(["fixtures", "fig1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "initial_path=A-B-H-G-F-E-D" in out
    assert "repaired_path=A-B-H-I-F-E-D" in out
    assert main(["fixtures", "fig2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "repair_path=N-L-M-K-X" in out
    assert "selected=L" in out


def test_run_twice_is_byte_identical(cfg_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ta, tb = tmp_path / "a.tr", tmp_path / "b.tr"
    assert main(["run", cfg_file, "--out", str(a), "--trace", str(ta)]) == EXIT_OK
    assert main(["run", cfg_file, "--out", str(b), "--trace", str(tb)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert ta.read_bytes() == tb.read_bytes()
