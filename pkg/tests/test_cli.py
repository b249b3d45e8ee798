import json
import logging
import os
import subprocess
import sys

import numpy as np
import pytest

from bakercrypt import cipher, cli, metrics
from bakercrypt.chaos import save_key
from bakercrypt.gif import parse_gif
from bakercrypt.jpeg import parse_jpeg


@pytest.fixture
def workdir(tmp_path, key, jpeg_files, gif_files):
    save_key(key, tmp_path / "key.txt")
    save_key(key.replace(x0=key.x0 + 1e-14), tmp_path / "wrong.txt")
    (tmp_path / "plain.jpg").write_bytes(jpeg_files["chelsea_422"])
    (tmp_path / "plain.gif").write_bytes(gif_files["animated_local"])
    return tmp_path


def run(*args) -> int:
    return cli.main([str(a) for a in args])


def test_jpeg_round_trip(workdir):
    assert run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / "c.jpg") == 0
    assert run("decrypt", workdir / "c.jpg", "--key", workdir / "key.txt", "--out", workdir / "d.jpg") == 0
    original = parse_jpeg((workdir / "plain.jpg").read_bytes())
    assert parse_jpeg((workdir / "d.jpg").read_bytes()) == original
    assert parse_jpeg((workdir / "c.jpg").read_bytes()) != original


def test_gif_round_trip(workdir):
    assert run("encrypt", workdir / "plain.gif", "--key", workdir / "key.txt", "--out", workdir / "c.gif") == 0
    assert run("decrypt", workdir / "c.gif", "--key", workdir / "key.txt", "--out", workdir / "d.gif") == 0
    assert parse_gif((workdir / "d.gif").read_bytes()) == parse_gif((workdir / "plain.gif").read_bytes())


def test_reruns_are_bit_identical(workdir):
    for out in ("a.jpg", "b.jpg"):
        run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / out)
    assert (workdir / "a.jpg").read_bytes() == (workdir / "b.jpg").read_bytes()


def test_rounds_flag_overrides_key(workdir, key):
    run("encrypt", workdir / "plain.gif", "--key", workdir / "key.txt", "--out", workdir / "r3.gif", "--rounds", 3)
    expected = cipher.encrypt_gif(parse_gif((workdir / "plain.gif").read_bytes()), key.replace(rounds=3))
    assert parse_gif((workdir / "r3.gif").read_bytes()) == expected
    assert run("decrypt", workdir / "r3.gif", "--key", workdir / "key.txt", "--out", workdir / "d.gif", "--rounds", 3) == 0
    assert parse_gif((workdir / "d.gif").read_bytes()) == parse_gif((workdir / "plain.gif").read_bytes())


def test_wrong_key_exits_zero_with_noise(workdir):
    run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / "c.jpg")
    assert run("decrypt", workdir / "c.jpg", "--key", workdir / "wrong.txt", "--out", workdir / "w.jpg") == 0
    plain = metrics.channels(parse_jpeg((workdir / "plain.jpg").read_bytes()))["Y"][0]
    wrong = metrics.channels(parse_jpeg((workdir / "w.jpg").read_bytes()))["Y"][0]
    assert abs(metrics.pearson(plain, wrong)) < 0.05


def test_analyze_matches_library(workdir, key, capsys):
    run("encrypt", workdir / "plain.gif", "--key", workdir / "key.txt", "--out", workdir / "c.gif")
    report_path = workdir / "report.json"
    bits_path = workdir / "c.bits"
    assert run("analyze", workdir / "plain.gif", workdir / "c.gif", "--report", report_path, "--bits", bits_path) == 0
    out = capsys.readouterr().out
    assert "npcr/uaci Index" in out and "nist subset on" in out
    plain = parse_gif((workdir / "plain.gif").read_bytes())
    enc = parse_gif((workdir / "c.gif").read_bytes())
    expected = metrics.analyze(enc, plain)
    assert report_path.read_text() == expected.to_json() + "\n"
    doc = json.loads(report_path.read_text())
    assert doc["npcr"] == expected.npcr and doc["entropies"] == expected.entropies
    nbits = doc["nist_bits"]
    assert np.array_equal(metrics.import_bitstream(bits_path, nbits), metrics.payload_bits(enc))


def test_analyze_single_cipher(workdir, capsys):
    run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / "c.jpg")
    assert run("analyze", workdir / "c.jpg") == 0
    out = capsys.readouterr().out
    assert "correlation Y" in out and "npcr" not in out


def test_analyze_mismatched_pair(workdir, capsys):
    assert run("analyze", workdir / "plain.jpg", workdir / "plain.gif") == cli.EXIT_USAGE
    assert run("analyze", workdir / "plain.jpg", workdir / "plain.jpg", workdir / "plain.jpg") == cli.EXIT_USAGE


def test_analyze_different_images_same_format(workdir, jpeg_files):
    (workdir / "other.jpg").write_bytes(jpeg_files["coffee_420"])
    assert run("analyze", workdir / "plain.jpg", workdir / "other.jpg") == cli.EXIT_USAGE


def test_missing_arguments_are_usage_errors(workdir):
    with pytest.raises(SystemExit) as exc:
        run("encrypt", workdir / "plain.jpg")
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / "x", "--rounds", 0)
    assert exc.value.code == cli.EXIT_USAGE


def test_io_error_for_missing_input(workdir):
    assert run("encrypt", workdir / "absent.jpg", "--key", workdir / "key.txt", "--out", workdir / "c.jpg") == cli.EXIT_IO


def test_io_error_for_unwritable_output(workdir):
    out = workdir / "no" / "such" / "dir" / "c.jpg"
    assert run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", out) == cli.EXIT_IO


def test_parse_error_for_unknown_format(workdir):
    (workdir / "notes.txt").write_bytes(b"hello world")
    assert run("encrypt", workdir / "notes.txt", "--key", workdir / "key.txt", "--out", workdir / "c") == cli.EXIT_PARSE


def test_parse_error_for_format_override_mismatch(workdir):
    assert run("encrypt", workdir / "plain.jpg", "--key", workdir / "key.txt", "--out", workdir / "c",
               "--format", "gif") == cli.EXIT_PARSE


def test_parse_error_for_progressive_jpeg(workdir):
    from PIL import Image

    Image.new("RGB", (32, 32), (200, 10, 10)).save(workdir / "p.jpg", progressive=True)
    assert run("encrypt", workdir / "p.jpg", "--key", workdir / "key.txt", "--out", workdir / "c") == cli.EXIT_PARSE


@pytest.mark.parametrize("content", [b"0.1\n0.2\n", b"\xff\xfe\x00binary", b"0.0\n0.2\n32\n20\n1\n"])
def test_key_errors(workdir, content):
    (workdir / "bad.txt").write_bytes(content)
    assert run("encrypt", workdir / "plain.jpg", "--key", workdir / "bad.txt", "--out", workdir / "c") == cli.EXIT_KEY


def test_missing_key_file(workdir):
    assert run("encrypt", workdir / "plain.jpg", "--key", workdir / "none.txt", "--out", workdir / "c") == cli.EXIT_KEY


def test_failed_run_leaves_existing_output_untouched(workdir):
    target = workdir / "c.jpg"
    target.write_bytes(b"previous")
    (workdir / "trunc.jpg").write_bytes((workdir / "plain.jpg").read_bytes()[:500])
    assert run("encrypt", workdir / "trunc.jpg", "--key", workdir / "key.txt", "--out", target) == cli.EXIT_PARSE
    assert target.read_bytes() == b"previous"
    assert sorted(p.name for p in workdir.iterdir() if p.name.startswith(".")) == []


def test_atomic_write_cleans_up_on_failure(tmp_path):
    target = tmp_path / "out.bin"
    target.write_bytes(b"old")
    with pytest.raises(TypeError):
        cli.atomic_write(target, object())
    assert target.read_bytes() == b"old"
    assert [p.name for p in tmp_path.iterdir()] == ["out.bin"]


def test_bench_command(capsys):
    assert run("bench", "--sizes", 32, 64, "--formats", "gif", "--repeats", 1) == 0
    out = capsys.readouterr().out
    assert "gif 32x32" in out and "gif 64x64" in out and "gif 32->64" in out


def test_log_level_from_environment(workdir):
    env = dict(os.environ, BAKERCRYPT_LOG="INFO")
    proc = subprocess.run(
        [sys.executable, "-m", "bakercrypt.cli", "encrypt", str(workdir / "plain.gif"),
         "--key", str(workdir / "key.txt"), "--out", str(workdir / "c.gif")],
        env=env, capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "INFO reading" in proc.stderr and "INFO wrote" in proc.stderr


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "bakercrypt.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "wrong key" in proc.stdout


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    logging.getLogger().handlers.clear()
