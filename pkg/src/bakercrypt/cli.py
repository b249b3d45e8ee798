"""Command-line front end.

    bakercrypt encrypt photo.jpg --key key.txt --out photo.enc.jpg
    bakercrypt decrypt photo.enc.jpg --key key.txt --out photo.dec.jpg
    bakercrypt analyze photo.jpg photo.enc.jpg --report report.json --bits photo.bits
    bakercrypt bench

There is no authentication: decrypting with a wrong key succeeds and yields
noise. Keep key files safe and verify decrypted output out of band.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bench, cipher, metrics
from .chaos import load_key
from .errors import BakerCryptError, FormatError, KeyMaterialError, ShapeMismatch
from .gif import parse_gif, serialize_gif
from .jpeg import parse_jpeg, serialize_jpeg

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_KEY = 4
EXIT_IO = 5

LOG_ENV = "BAKERCRYPT_LOG"

log = logging.getLogger("bakercrypt")


class UsageError(Exception):
    pass


def atomic_write(path: str | os.PathLike, data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_model(path: str, fmt: str | None):
    data = Path(path).read_bytes()
    try:
        fmt = fmt or metrics.sniff_format(data)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    log.info("reading %s as %s (%d bytes)", path, fmt, len(data))
    model = parse_jpeg(data) if fmt == "jpeg" else parse_gif(data)
    return fmt, model


def _load_key(args):
    key = load_key(args.key)
    if args.rounds is not None:
        key = key.replace(rounds=args.rounds)
    return key


def cmd_crypt(args) -> int:
    key = _load_key(args)
    fmt, model = read_model(args.input, args.format)
    if args.command == "encrypt":
        fn = cipher.encrypt_jpeg if fmt == "jpeg" else cipher.encrypt_gif
    else:
        fn = cipher.decrypt_jpeg if fmt == "jpeg" else cipher.decrypt_gif
    out = fn(model, key)
    data = serialize_jpeg(out) if fmt == "jpeg" else serialize_gif(out)
    atomic_write(args.out, data)
    log.info("wrote %s (%d bytes)", args.out, len(data))
    return EXIT_OK


def _fmt(v) -> str:
    return "undefined" if v is None else f"{v:.6f}"


def print_report(report: metrics.MetricsReport, stream=None) -> None:
    stream = stream or sys.stdout
    print(f"format: {report.format}", file=stream)
    for name, dirs in report.correlations.items():
        cells = "  ".join(f"{d}={_fmt(v)}" for d, v in dirs.items())
        print(f"correlation {name}: {cells}", file=stream)
    for name, h in report.entropies.items():
        print(f"entropy {name}: {h:.6f}", file=stream)
    if report.npcr is not None:
        for name in report.npcr:
            print(f"npcr/uaci {name}: {report.npcr[name]:.6f} / {report.uaci[name]:.6f}", file=stream)
    if report.avalanche_pct is not None:
        print(f"bit difference vs plaintext: {report.avalanche_pct:.4f}%", file=stream)
    note = " (advisory: fewer than 10^6 bits)" if report.nist_advisory else ""
    print(f"nist subset on {report.nist_bits} bits{note}", file=stream)
    for r in report.nist:
        print(f"  {r['name']}: p={r['p_value']:.6f} {'pass' if r['passed'] else 'FAIL'}", file=stream)


def cmd_analyze(args) -> int:
    if len(args.inputs) not in (1, 2):
        raise UsageError("analyze takes CIPHER or PLAIN CIPHER")
    models = [read_model(p, args.format) for p in args.inputs]
    if len({fmt for fmt, _ in models}) != 1:
        raise UsageError("plaintext and ciphertext must have the same format")
    cipher_model = models[-1][1]
    plain_model = models[0][1] if len(models) == 2 else None
    try:
        report = metrics.analyze(cipher_model, plain_model)
    except ShapeMismatch as exc:
        raise UsageError(f"plaintext and ciphertext do not match in structure: {exc}") from None
    print_report(report)
    if args.report:
        atomic_write(args.report, (report.to_json() + "\n").encode())
    if args.bits:
        bits = metrics.payload_bits(cipher_model)
        atomic_write(args.bits, np.packbits(bits).tobytes())
        print(f"wrote {bits.size} payload bits to {args.bits}")
    return EXIT_OK


def cmd_bench(args) -> int:
    results = bench.run_bench(args.sizes, args.formats, repeats=args.repeats)
    for r in results:
        print(f"{r.format} {r.side}x{r.side}: {r.seconds * 1e3:.2f} ms, "
              f"{r.bytes_per_second / 1e6:.2f} MB/s, {r.pixels_per_second / 1e6:.2f} Mpx/s")
    for fmt, a, b, ratio in bench.scaling_ratios(results):
        print(f"{fmt} {a}->{b}: time ratio / area ratio = {ratio:.2f}")
    return EXIT_OK


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bakercrypt",
        description="Lossless chaotic encryption of baseline JPEG and GIF files.",
        epilog="Decryption with a wrong key is not detected; it produces noise and exits 0.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("encrypt", "encrypt a JPEG or GIF file"), ("decrypt", "decrypt a JPEG or GIF file")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input")
        p.add_argument("--key", required=True, help="key file")
        p.add_argument("--out", required=True, help="output file")
        p.add_argument("--format", choices=("jpeg", "gif"), help="skip format detection")
        p.add_argument("--rounds", type=positive_int, help="permutation rounds (overrides the key file)")
        p.set_defaults(func=cmd_crypt)

    p = sub.add_parser("analyze", help="security statistics for CIPHER or a PLAIN CIPHER pair")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--format", choices=("jpeg", "gif"))
    p.add_argument("--report", help="write the report as JSON")
    p.add_argument("--bits", help="export ciphertext payload bits (packed, MSB first)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="throughput on synthetic images")
    p.add_argument("--sizes", type=positive_int, nargs="+", default=list(bench.DEFAULT_SIZES))
    p.add_argument("--formats", nargs="+", choices=("jpeg", "gif"), default=["jpeg", "gif"])
    p.add_argument("--repeats", type=positive_int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bakercrypt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyMaterialError as exc:
        print(f"bakercrypt: key error: {exc}", file=sys.stderr)
        return EXIT_KEY
    except FormatError as exc:
        print(f"bakercrypt: cannot process file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"bakercrypt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BakerCryptError as exc:
        print(f"bakercrypt: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
