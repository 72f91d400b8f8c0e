"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 sampling exhausted, 4 decryption
failure, 5 attack found nothing.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, attacks, serialization
from .construction import ExhaustedRetries, sample_code
from .cryptosystem import DecodeFailure, KeyVariant, decrypt, encrypt, keygen
from .decoder import DecoderConfig
from .params import TOY, ParameterError, SystemParams, preset
from .simulate import run_fer

EXIT_OK, EXIT_INPUT, EXIT_SAMPLING, EXIT_DECODE, EXIT_NOT_FOUND = 0, 2, 3, 4, 5


class UsageError(ValueError):
    pass


def _hex_seed(s: str) -> int:
    try:
        return int(s, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hexadecimal, got {s!r}") from None


def _params(args, default: SystemParams | None = None) -> SystemParams:
    custom = {"n0": args.n0, "d_v": args.dv, "p": args.p, "m": args.m, "t_prime": args.tprime}
    system = getattr(args, "system", None)
    if system in (None, "custom"):
        base = default
        if base is None:
            missing = [k for k, v in custom.items() if v is None]
            if missing:
                raise UsageError(f"custom parameters need --{' --'.join(missing)}")
            return SystemParams(**custom).validate()
    else:
        base = preset(system)
    d = base.__dict__ | {k: v for k, v in custom.items() if v is not None}
    return SystemParams(**d).validate()


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _emit(args, report: dict, rows: list[dict] | None = None) -> None:
    if getattr(args, "format", "table") == "json":
        out = dict(report)
        if rows is not None:
            out["rows"] = rows
        print(json.dumps(_clean(out), sort_keys=True))
        return
    width = max((len(k) for k in report), default=0)
    for k, v in report.items():
        if isinstance(v, float):
            v = f"{v:.1f}" if k.startswith("log2") else f"{v:.6g}"
        print(f"{k:<{width}}  {v}")
    if rows:
        keys = list(rows[0])
        print("  ".join(keys))
        for r in rows:
            print("  ".join(f"{r[k]:.2f}" if isinstance(r[k], float) else str(r[k]) for k in keys))


def _provenance(args, params: SystemParams | None) -> dict:
    d = {"command": args.command}
    if getattr(args, "seed", None) is not None:
        d["seed"] = f"{args.seed:x}"
    if params is not None:
        d.update({f"param_{k}": v for k, v in params.as_dict().items()})
    return d


# commands

def cmd_keygen(args) -> int:
    params = _params(args)
    sk, pk = keygen(params, args.variant, args.seed)
    prefix = Path(args.out_prefix)
    pub = serialization.save_key(pk, prefix.with_name(prefix.name + ".pub"))
    priv = serialization.save_key(sk, prefix.with_name(prefix.name + ".priv"))
    rep = _provenance(args, sk.params) | {
        "variant": sk.variant.value,
        "public_key_payload_bytes": len(serialization.public_payload(pk)),
        "public_key_file_bytes": pub,
        "private_key_file_bytes": priv,
    }
    _emit(args, rep)
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pk = serialization.load_public(Path(args.pub).read_bytes())
    u = serialization.unpack_bits(Path(args.inp).read_bytes(), pk.params.k)
    x = encrypt(pk, u, args.seed)
    Path(args.out).write_bytes(serialization.pack_bits(x.bits))
    return EXIT_OK


def cmd_decrypt(args) -> int:
    sk = serialization.load_private(Path(args.priv).read_bytes())
    x = serialization.unpack_bits(Path(args.inp).read_bytes(), sk.params.n)
    u = decrypt(sk, x)
    Path(args.out).write_bytes(serialization.pack_bits(u))
    return EXIT_OK


def cmd_analyze(args) -> int:
    if (args.shifts is not None or args.scan_shifts) and args.attack != "decoding":
        raise UsageError("--shifts/--scan-shifts only apply to the decoding attack")
    if args.shifts is not None and args.scan_shifts:
        raise UsageError("--shifts and --scan-shifts are exclusive")
    if args.speedup12 and args.attack == "otd":
        raise UsageError("--speedup12 applies to Stern work factors, not OTD estimates")
    params = None if args.attack == "original-mceliece" else _params(args, preset(1))
    rep = _provenance(args, params)
    rows = None
    speed = analysis.apply_speedup12 if args.speedup12 else (lambda r: r)
    if args.attack == "dual":
        d = analysis.dual_attack_wf(params)
        rep |= speed(d.report).as_dict() | {"threshold_w": d.threshold_w, "threshold_log2": d.target}
    elif args.attack == "decoding":
        if args.shifts is not None:
            rep |= speed(analysis.decoding_attack_wf(params, args.shifts)).as_dict()
        else:
            curve = analysis.decoding_attack_curve(params)
            r = curve.argmin
            rep |= speed(analysis.decoding_attack_wf(params, r)).as_dict() | {"r_opt": r}
            if args.scan_shifts:
                off = analysis.LOG2_12 if args.speedup12 else 0.0
                rows = [{"r": int(a), "log2_WF": float(b) - off} for a, b in zip(curve.r, curve.log2_WF)]
    elif args.attack == "otd":
        rep |= analysis.otd_wf(params).as_dict()
    else:
        rep |= speed(analysis.original_mceliece_wf()).as_dict()
    _emit(args, rep, rows)
    return EXIT_OK


def _load_or_generate(args, variant: str):
    if args.pub:
        pk = serialization.load_public(Path(args.pub).read_bytes())
        return None, pk
    params = _params(args, TOY)
    return keygen(params, args.variant or variant, args.seed)


def _hamming74() -> np.ndarray:
    return np.array([[1, 0, 0, 0, 1, 1, 0],
                     [0, 1, 0, 0, 1, 0, 1],
                     [0, 0, 1, 0, 0, 1, 1],
                     [0, 0, 0, 1, 1, 1, 1]], dtype=np.uint8)


def cmd_attack(args) -> int:
    rng = np.random.default_rng([args.seed, 1])
    cfg = attacks.SternConfig(args.g, args.l, args.iterations, args.seed)
    rep = {"command": "attack", "attack": args.attack, "seed": f"{args.seed:x}"}
    if args.attack == "stern":
        if args.pub:
            pk = serialization.load_public(Path(args.pub).read_bytes())
            code, w = attacks.public_parity_check_dense(pk), args.weight or pk.params.d_c * pk.params.m
        else:
            code, w = _hamming74(), args.weight or 3
        words = attacks.stern_search(code, w, cfg)
        if not words:
            raise attacks.NotFound(f"no codeword of weight <= {w}")
        rep |= {"weight": int(words[0].sum()), "codeword": "".join(map(str, words[0])),
                "found": len(words), "verified": True}
        _emit(args, rep)
        return EXIT_OK

    default_variant = {"dual": "permutation", "decoding": "hardened"}.get(args.attack, "weak_otd")
    _, pk = _load_or_generate(args, default_variant)
    rep |= _provenance(args, pk.params) | {"variant": pk.variant.value}
    if args.attack in ("dual", "decoding"):
        u = rng.integers(0, 2, size=pk.params.k, dtype=np.uint8)
        x = encrypt(pk, u, rng)
        if args.attack == "dual":
            rows = attacks.dual_code_attack(pk, cfg)
            if not rows:
                raise attacks.NotFound("no low-weight dual codeword within budget")
            brk = attacks.break_with_dual_rows(pk, rows, x)
            rep |= {"rows_found": len(rows), "row_weight": int(rows[0].sum()),
                    "row_support": " ".join(map(str, np.flatnonzero(rows[0])))}
            recovered = brk.message
        else:
            res = attacks.decoding_attack(pk, x, args.shifts, cfg)
            rep |= {"error_support": " ".join(map(str, np.flatnonzero(res.error))),
                    "iterations": res.iterations}
            recovered = res.message
        ok = bool(np.array_equal(recovered, u))
        rep["verified"] = ok
        _emit(args, rep)
        return EXIT_OK if ok else EXIT_NOT_FOUND

    strategy = {"otd1": attacks.otd_strategy1, "otd2": attacks.otd_strategy2,
                "otd3": lambda k: attacks.otd_strategy3(k, cfg)}[args.attack]
    res = strategy(pk)
    ok = attacks.verify_otd_recovery(pk, res)
    rep["rows_recovered"] = " ".join(map(str, res.rows_recovered))
    for i in res.rows_recovered:
        rep[f"q{i}_support"] = " ".join(map(str, res.q[i].support()))
        rep[f"s{i}_weights"] = " ".join(str(s.weight) for s in res.s_rows[i])
    rep["verified"] = ok
    _emit(args, rep)
    return EXIT_OK if ok else EXIT_NOT_FOUND


def cmd_simulate(args) -> int:
    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    params = _params(args)
    t = params.t if args.t is None else args.t
    if not 0 <= t <= params.n:
        raise UsageError(f"--t must lie in [0, {params.n}]")
    code = sample_code(params, np.random.default_rng([args.seed, 0]))
    cfg = DecoderConfig(max_iterations=args.max_iterations, t=t, quant_bits=args.qbits)
    sim = run_fer(code, t, args.frames, cfg, args.seed, args.workers)
    rep = _provenance(args, params) | {"t": t, "qbits": args.qbits} | sim.as_dict()
    _emit(args, rep)
    return EXIT_OK


def cmd_complexity(args) -> int:
    params = _params(args)
    c = analysis.complexity_estimate(params, args.iave, args.qbits)
    rep = _provenance(args, params) | c.as_dict()
    _emit(args, rep)
    return EXIT_OK


# parser

def _add_custom(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("custom parameters (override the preset)")
    g.add_argument("--n0", type=int)
    g.add_argument("--dv", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--tprime", type=int)


def _system(v: str) -> str | int:
    return v if v == "custom" else int(v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcmce", description="QC-LDPC McEliece toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["table", "json"], default="table")

    p = sub.add_parser("keygen", parents=[fmt], help="generate a key pair")
    p.add_argument("--system", type=_system, default=1)
    p.add_argument("--variant", type=KeyVariant.parse, default=KeyVariant.HARDENED)
    p.add_argument("--seed", type=_hex_seed, required=True)
    p.add_argument("--out-prefix", required=True)
    _add_custom(p)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a bit-packed cleartext")
    p.add_argument("--pub", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=_hex_seed, required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a bit-packed ciphertext")
    p.add_argument("--priv", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("analyze", parents=[fmt], help="closed-form work factors")
    p.add_argument("attack", choices=["dual", "decoding", "otd", "original-mceliece"])
    p.add_argument("--system", type=_system, default=1)
    p.add_argument("--shifts", type=int)
    p.add_argument("--scan-shifts", action="store_true")
    p.add_argument("--speedup12", action="store_true")
    _add_custom(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack", parents=[fmt], help="run an attack at toy scale")
    p.add_argument("attack", choices=["stern", "dual", "decoding", "otd1", "otd2", "otd3"])
    p.add_argument("--toy-params", action="store_true", help="toy defaults (n0=4, d_v=3, p=64, m=3, t'=2)")
    p.add_argument("--variant", type=KeyVariant.parse)
    p.add_argument("--pub", help="attack this public key instead of a fresh one")
    p.add_argument("--seed", type=_hex_seed, default=0)
    p.add_argument("--shifts", type=int, default=8)
    p.add_argument("--weight", type=int)
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--l", type=int)
    p.add_argument("--iterations", type=int, default=500)
    _add_custom(p)
    p.set_defaults(func=cmd_attack, system=None)

    p = sub.add_parser("simulate", parents=[fmt], help="frame-error simulation")
    p.add_argument("--system", type=_system, default=1)
    p.add_argument("--t", type=int)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--seed", type=_hex_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--qbits", type=int)
    p.add_argument("--max-iterations", type=int, default=100)
    _add_custom(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("complexity", parents=[fmt], help="encryption/decryption cost")
    p.add_argument("--system", type=_system, default=1)
    p.add_argument("--iave", type=float, required=True)
    p.add_argument("--qbits", type=int, default=6)
    _add_custom(p)
    p.set_defaults(func=cmd_complexity)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ExhaustedRetries as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except DecodeFailure as exc:
        print(f"error: decryption failed: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except attacks.NotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ParameterError, serialization.KeyFormatError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
