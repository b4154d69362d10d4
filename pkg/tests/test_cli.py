"""Command-line interface: exit codes, determinism, file handling."""

import json

import pytest

from strictlin import reproductions
from strictlin.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main


FIG2_PROGRAM = """
thread { call Q.Enqueue('c') }
thread { call Q.Enqueue('d') }
thread { call y = Q.Dequeue() }
"""

GOOD_HISTORY = """# concurrent enqueue/dequeue
t=1 op=1 inv Enqueue 'c'
t=2 op=2 inv Dequeue unit
t=1 op=1 ret unit
t=2 op=2 ret 'c'
"""


@pytest.fixture
def program_file(tmp_path):
    f = tmp_path / "prog.txt"
    f.write_text(FIG2_PROGRAM)
    return str(f)


@pytest.fixture
def history_file(tmp_path):
    f = tmp_path / "hist.txt"
    f.write_text(GOOD_HISTORY)
    return str(f)


def test_list_names_every_reproduction(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in reproductions.CATALOG:
        assert name in out


def test_every_listed_reproduction_runs(capsys):
    for name in reproductions.CATALOG:
        assert main(["reproduce", name]) == EXIT_OK, name
    capsys.readouterr()


def test_reproduce_unknown_name_is_usage_error(capsys):
    assert main(["reproduce", "nope"]) == EXIT_USAGE


def test_explore_with_strict_check(program_file, capsys):
    assert main(
        ["explore", "--program", program_file, "--model", "coarse-queue",
         "--mode", "strict"]
    ) == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict=pass" in out


def test_explore_reports_are_byte_stable(program_file, capsys):
    main(["explore", "--program", program_file, "--model", "hw-queue,N=4"])
    first = capsys.readouterr().out
    main(["explore", "--program", program_file, "--model", "hw-queue,N=4"])
    second = capsys.readouterr().out
    assert first == second


def test_explore_emits_history_files(program_file, tmp_path, capsys):
    outdir = tmp_path / "hists"
    assert main(
        ["explore", "--program", program_file, "--model", "coarse-queue",
         "--histories", str(outdir)]
    ) == EXIT_OK
    files = sorted(outdir.glob("exec-*.txt"))
    assert files
    from strictlin.history import parse_history

    parse_history(files[0].read_text())


def test_explore_json_report(program_file, tmp_path, capsys):
    out = tmp_path / "report.json"
    main(
        ["explore", "--program", program_file, "--model", "hw-queue,N=4",
         "--json", str(out)]
    )
    data = json.loads(out.read_text())
    assert len(data["final_states"]) == 4
    assert data["divergence"] == ["object-divergent"]


def test_compare_exit_reflects_equality(program_file, capsys):
    assert main(["compare", "--program", program_file, "--model", "coarse-queue"]) == EXIT_OK
    assert (
        main(["compare", "--program", program_file, "--model", "hw-queue,N=4"])
        == EXIT_CHECK_FAILED
    )
    capsys.readouterr()


def test_check_history_general(history_file, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(
        ["check-history", "--file", history_file, "--mode", "general",
         "--adt", "adt-queue", "--json", str(out)]
    )
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["passed"] and data["executions"][0]["witness"]


def test_check_history_strict_prints_witness_finals(history_file, capsys):
    code = main(
        ["check-history", "--file", history_file, "--mode", "strict",
         "--spec", "coarse-queue-seq"]
    )
    assert code == EXIT_OK
    assert "legal final states" in capsys.readouterr().out


def test_check_history_failing_history(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("t=1 op=1 inv Dequeue unit\nt=1 op=1 ret 'z'\n")
    code = main(
        ["check-history", "--file", str(f), "--mode", "general", "--adt", "adt-queue"]
    )
    assert code == EXIT_CHECK_FAILED
    assert "fail" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["check-history", "--file", "/no/such/file", "--mode", "general",
         "--adt", "adt-queue"],
        ["explore", "--program", "/no/such/file", "--model", "coarse-queue"],
        ["check-history", "--file", "x", "--mode", "impl"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_malformed_history_is_usage_error(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("t=1 op=1 frob\n")
    code = main(
        ["check-history", "--file", str(f), "--mode", "general", "--adt", "adt-queue"]
    )
    assert code == EXIT_USAGE
    assert "line 1" in capsys.readouterr().err


def test_unknown_model_is_usage_error(program_file, capsys):
    assert (
        main(["explore", "--program", program_file, "--model", "wobbly-queue"])
        == EXIT_USAGE
    )


def test_unknown_flag_rejected(program_file, capsys):
    assert (
        main(["explore", "--program", program_file, "--model", "coarse-queue",
              "--frobnicate"])
        == EXIT_USAGE
    )


def test_general_mode_requires_adt_and_af(program_file, capsys):
    assert (
        main(["explore", "--program", program_file, "--model", "coarse-queue",
              "--mode", "general"])
        == EXIT_USAGE
    )
    assert (
        main(["explore", "--program", program_file, "--model", "coarse-queue",
              "--mode", "general", "--adt", "adt-queue"])
        == EXIT_USAGE
    )


def test_explore_with_seeded_contents(program_file, tmp_path, capsys):
    f = tmp_path / "deq.txt"
    f.write_text("thread { call y = Q.Dequeue() }\n")
    assert main(
        ["explore", "--program", str(f), "--model", "ms-queue,P=4",
         "--init", "'a'", "--mode", "strict"]
    ) == EXIT_OK
    assert "y='a'" in capsys.readouterr().out
