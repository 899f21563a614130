"""Command-line surface: subcommands, exit codes, engine equivalence."""

import os

import pytest

from drablocus import aesref
from drablocus.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, KEY_ENV_VAR, main

FIPS_KEY_HEX = "000102030405060708090a0b0c0d0e0f"
FIPS_PT = bytes.fromhex("00112233445566778899aabbccddeeff")
FIPS_CT = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")


def test_vectors_default_pass(capsys):
    assert main(["vectors"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "24/24 vectors passed" in out


def test_vectors_ref_only(capsys):
    assert main(["vectors", "--engine", "ref"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "sim " not in out
    assert "12/12 vectors passed" in out


def test_vectors_corrupted_table_detected(capsys):
    assert main(["vectors", "--corrupt-tables"]) == EXIT_FAILURE
    out = capsys.readouterr().out
    assert "FAIL" in out
    # The reference engine is unaffected by the table fault.
    assert all("PASS" in line for line in out.splitlines() if line.startswith("ref "))


@pytest.mark.parametrize("engine", ["ref", "sim"])
def test_encrypt_decrypt_round_trip(tmp_path, engine):
    plain = tmp_path / "plain.bin"
    ct = tmp_path / "ct.bin"
    back = tmp_path / "back.bin"
    plain.write_bytes(bytes(range(48)))
    assert (
        main(["encrypt", "--key", FIPS_KEY_HEX, "--in", str(plain), "--out", str(ct),
              "--engine", engine])
        == EXIT_OK
    )
    other = "sim" if engine == "ref" else "ref"
    assert (
        main(["decrypt", "--key", FIPS_KEY_HEX, "--in", str(ct), "--out", str(back),
              "--engine", other])
        == EXIT_OK
    )
    assert back.read_bytes() == plain.read_bytes()


def test_engines_produce_identical_files(tmp_path):
    plain = tmp_path / "plain.bin"
    plain.write_bytes(os.urandom(16 * 20))
    outs = {}
    for engine in ("ref", "sim"):
        out = tmp_path / f"{engine}.bin"
        assert (
            main(["encrypt", "--key", FIPS_KEY_HEX, "--in", str(plain), "--out", str(out),
                  "--engine", engine])
            == EXIT_OK
        )
        outs[engine] = out.read_bytes()
    assert outs["ref"] == outs["sim"]


def test_fips_single_block_file(tmp_path):
    plain = tmp_path / "p.bin"
    out = tmp_path / "c.bin"
    plain.write_bytes(FIPS_PT)
    main(["encrypt", "--key", FIPS_KEY_HEX, "--in", str(plain), "--out", str(out)])
    assert out.read_bytes() == FIPS_CT


def test_non_block_multiple_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(17))
    code = main(["encrypt", "--key", FIPS_KEY_HEX, "--in", str(bad), "--out", str(tmp_path / "x")])
    assert code == EXIT_USAGE
    assert "multiple" in capsys.readouterr().err


def test_bad_key_is_usage_error(tmp_path, capsys):
    f = tmp_path / "p.bin"
    f.write_bytes(bytes(16))
    assert main(["encrypt", "--key", "1234", "--in", str(f), "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert main(["encrypt", "--key", "zz" * 16, "--in", str(f), "--out", str(tmp_path / "x")]) == EXIT_USAGE


def test_key_from_environment(tmp_path, monkeypatch):
    plain = tmp_path / "p.bin"
    out = tmp_path / "c.bin"
    plain.write_bytes(FIPS_PT)
    monkeypatch.setenv(KEY_ENV_VAR, FIPS_KEY_HEX)
    assert main(["encrypt", "--in", str(plain), "--out", str(out)]) == EXIT_OK
    assert out.read_bytes() == FIPS_CT
    monkeypatch.delenv(KEY_ENV_VAR)
    assert main(["encrypt", "--in", str(plain), "--out", str(out)]) == EXIT_USAGE


def test_simulate_summary_and_outputs(tmp_path, capsys):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text(
        "0 enc 00112233445566778899aabbccddeeff\n"
        "1 dec 69c4e0d86a7b0430d8cdb78070b4c55a\n"
    )
    out = tmp_path / "out.txt"
    trace = tmp_path / "trace.txt"
    code = main([
        "simulate", "--key", FIPS_KEY_HEX, "--jobs", str(jobs),
        "--out", str(out), "--trace", str(trace),
    ])
    assert code == EXIT_OK
    summary = capsys.readouterr().out
    assert "latency_cycles=115" in summary
    assert "blocks=2" in summary
    lines = out.read_text().splitlines()
    assert lines[0] == "0 " + FIPS_CT.hex()
    assert lines[1] == "1 " + FIPS_PT.hex()
    assert trace.read_text().startswith("cycle=0 fsm=reset")


def test_simulate_bad_jobs_file_line_number(tmp_path, capsys):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text("0 enc 00112233445566778899aabbccddeeff\nbogus line\n")
    assert main(["simulate", "--key", FIPS_KEY_HEX, "--jobs", str(jobs)]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_metrics_prints_both_bram_factors(capsys):
    assert main(["metrics", "--design", "DRAB-LOCUS"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "220.47" in out
    assert "195.97" in out
    assert "energy_per_block_nws=7.47" in out


def test_metrics_unknown_design_lists_alternatives(capsys):
    assert main(["metrics", "--design", "AES-Missing"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "available:" in err


def test_colocate_feasible_row(capsys):
    assert main(["colocate", "--accel", "Video", "--aes", "DRAB-LOCUS"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "4675 19 176 feasible"


def test_colocate_infeasible_exits_1(capsys):
    assert main(["colocate", "--accel", "DNN 1", "--aes", "AES-EncDec"]) == EXIT_FAILURE
    assert capsys.readouterr().out.splitlines()[0] == "-3286 -394 -126 infeasible"


def test_colocate_explicit_device(capsys):
    assert main([
        "colocate", "--device", "xc7z020", "--accel", "Video", "--aes", "AES-Modes",
    ]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "4826 20 166 feasible"


def test_dump_tables(tmp_path, capsys):
    assert main(["dump-tables", "--out", str(tmp_path), "--key", FIPS_KEY_HEX]) == EXIT_OK
    sbox = (tmp_path / "sbox.hex").read_text().splitlines()
    assert len(sbox) == 512
    assert sbox[0] == "63"
    assert sbox[0x163] == "00"
    mc = (tmp_path / "mixcolumns.hex").read_text().splitlines()
    assert len(mc) == 512
    assert mc[1] == "02010103"
    assert mc[0x101] == "0e090d0b"
    keystore = (tmp_path / "keystore.hex").read_text().splitlines()
    assert len(keystore) == 32
    expansion = aesref.key_expand(bytes.fromhex(FIPS_KEY_HEX)).keys
    assert keystore[10] == expansion[10].hex()


def test_custom_catalog_file(tmp_path, capsys):
    catalog = tmp_path / "cat.txt"
    catalog.write_text(
        "[device tiny]\nslices = 100\nbrams = 10\ndsps = 4\n"
        "[accelerator blinker]\ndevice = tiny\nslices = 40\nbrams = 2\ndsps = 1\n"
        "[design mini]\ndevice = tiny\nslices = 10\nbrams = 1\ndsps = 1\n"
    )
    assert main([
        "colocate", "--catalog", str(catalog), "--accel", "blinker", "--aes", "mini",
    ]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "50 7 2 feasible"
