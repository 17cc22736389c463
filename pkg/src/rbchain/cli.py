"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 integrity or crypto error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import attack, keys, ledger, modmath, store
from .errors import RBChainError

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_INTEGRITY = 3

DEFAULT_BITS = 2048


class UsageError(Exception):
    pass


def _seed(text: str) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be hex") from None
    if len(raw) != modmath.SEED_BYTES:
        raise argparse.ArgumentTypeError(f"seed must be {modmath.SEED_BYTES} bytes ({2 * modmath.SEED_BYTES} hex chars)")
    return raw


def _default_bits() -> int:
    env = os.environ.get("RBCHAIN_DEFAULT_BITS")
    if env is None:
        return DEFAULT_BITS
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"RBCHAIN_DEFAULT_BITS must be an integer, got {env!r}") from None


def _content(args) -> bytes:
    if args.content_str is not None:
        return args.content_str.encode("utf-8")
    try:
        return Path(args.content_file).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read content file: {exc}") from None


def _step_seed(args, *labels):
    # one --seed drives several commands; bind it to the operation and position
    return None if args.seed is None else modmath.derive_seed(args.seed, *labels)


def _read_chain(args, verify=True):
    return store.read_chain(args.chain, verify=verify and not getattr(args, "no_verify", False))


def _read_private_key(path):
    pp, sk = store.read_key(path)
    if sk is None:
        raise RBChainError(f"{path} holds no private part")
    return pp, sk


# -- commands ---------------------------------------------------------------


def cmd_keygen(args) -> int:
    bits = args.bits if args.bits is not None else _default_bits()
    if bits < 6:
        raise UsageError("--bits must be at least 6 (smaller sizes hold a single safe prime)")
    pp, sk = keys.keygen(bits, args.seed, args.hash_alg)
    store.write_key(args.out, pp, sk)
    if args.public_out:
        store.write_key(args.public_out, pp)
    print(f"wrote {bits}-bit-prime key ({pp.modulus_n.bit_length()}-bit modulus) to {args.out}")
    return EXIT_OK


def cmd_init(args) -> int:
    pp, _ = store.read_key(args.key)
    cg = ledger.init_chain(pp, args.chain_id)
    store.write_chain(args.out, cg)
    print(f"initialised chain {args.chain_id!r} at {args.out}")
    return EXIT_OK


def cmd_append(args) -> int:
    cg = _read_chain(args)
    pos = ledger.append(cg, args.parent, _content(args), _step_seed(args, "append", len(cg)))
    store.write_chain(args.chain, cg)
    print(pos)
    return EXIT_OK


def cmd_branch(args) -> int:
    cg = _read_chain(args)
    pos = ledger.branch(cg, args.block, _step_seed(args, "branch", len(cg)))
    store.write_chain(args.chain, cg)
    print(pos)
    return EXIT_OK


def cmd_redact(args) -> int:
    cg = _read_chain(args)
    _, sk = _read_private_key(args.key)
    if not sk.matches(cg.params):
        raise RBChainError("key modulus does not match the chain")
    record = ledger.redact(cg, sk, args.block, _content(args))
    store.write_chain(args.chain, cg)
    audit_path = args.audit_log or f"{args.chain}.audit.jsonl"
    store.append_audit(audit_path, [record])
    print(f"redacted block {record.position} (offset {record.new_offset})")
    return EXIT_OK


def cmd_verify(args) -> int:
    cg = store.read_chain(args.chain, verify=False)
    report = ledger.verify_chain(cg)
    if args.json:
        print(
            json.dumps(
                {
                    "ok": report.ok,
                    "edges": [
                        {"parent": e.parent, "child": e.child, "ok": e.ok, "reason": e.reason}
                        for e in report.edges
                    ],
                    "suffix_violations": report.suffix_violations,
                    "structural": report.structural,
                },
                indent=2,
            )
        )
    else:
        print("\n".join(report.lines()))
    return EXIT_OK if report.ok else EXIT_VERIFY_FAILED


def cmd_show(args) -> int:
    cg = store.read_chain(args.chain, verify=False)
    pp = cg.params
    print(f"chain {cg.chain_id!r}  hash {pp.hash_alg}  n: {pp.modulus_n.bit_length()} bits")
    for i, b in enumerate(cg.blocks):
        parent = "genesis" if b.parent == ledger.GENESIS else b.parent
        text = b.content.decode("utf-8", errors="replace")
        if len(text) > 60:
            text = text[:57] + "..."
        print(f"[{i}] parent={parent} kind={b.kind.value} offset={b.offset} content={text!r}")
    return EXIT_OK


def cmd_attack_demo(args) -> int:
    pp, sk = _read_private_key(args.key)
    summary = attack.run_trials(sk, pp, args.trials, args.seed)
    print(f"trials: {summary.trials}")
    print(f"weak scheme (exponent d) forged: {summary.weak_forged}/{summary.trials}")
    print(f"strong scheme (exponent d^2+1) survived: {summary.strong_resisted}/{summary.trials}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _add_content(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--content-str", help="content as a UTF-8 string")
    g.add_argument("--content-file", help="read content bytes from a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbchain", description="RSA-style redactable blockchain toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    seed_help = "32-byte hex seed for reproducible randomness (default: system entropy)"

    p = sub.add_parser("keygen", help="generate a safe-prime key pair")
    p.add_argument("--bits", type=int, help="bits per prime (default: $RBCHAIN_DEFAULT_BITS or 2048)")
    p.add_argument("--seed", type=_seed, help=seed_help)
    p.add_argument("--hash-alg", default=keys.DEFAULT_HASH, choices=keys.HASH_ALGORITHMS)
    p.add_argument("--out", required=True, help="key file (holds the private part)")
    p.add_argument("--public-out", help="also write a public-only key file")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("init", help="create an empty chain")
    p.add_argument("--key", required=True)
    p.add_argument("--chain-id", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("append", help="append a block")
    p.add_argument("--chain", required=True)
    _add_content(p)
    p.add_argument("--parent", type=int, help="parent block index (default: last block)")
    p.add_argument("--seed", type=_seed, help=seed_help)
    p.add_argument("--no-verify", action="store_true", help="skip verification on load")
    p.set_defaults(func=cmd_append)

    p = sub.add_parser("branch", help="open a branch via an intermediate block")
    p.add_argument("--chain", required=True)
    p.add_argument("--block", type=int, required=True)
    p.add_argument("--seed", type=_seed, help=seed_help)
    p.add_argument("--no-verify", action="store_true", help="skip verification on load")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("redact", help="rewrite a block's content with the private key")
    p.add_argument("--chain", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--block", type=int, required=True)
    _add_content(p)
    p.add_argument("--audit-log", help="audit log path (default: <chain>.audit.jsonl)")
    p.add_argument("--no-verify", action="store_true", help="skip verification on load")
    p.set_defaults(func=cmd_redact)

    p = sub.add_parser("verify", help="check every link of a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("show", help="list blocks")
    p.add_argument("--chain", required=True)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("attack-demo", help="run the two-step attack trials")
    p.add_argument("--key", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=_seed, help=seed_help)
    p.set_defaults(func=cmd_attack_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RBChainError as exc:
        block = getattr(exc, "block", None)
        where = f" (block {block})" if block is not None else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


def run() -> None:
    sys.exit(main())
