"""JSON chain and key files.

Big integers are lowercase minimal hex, content bytes are base64, offsets
are decimal. Tree structure is an explicit ``parent`` index per block
(-1 for the root).
"""

from __future__ import annotations

import base64
import binascii
import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Optional

from .errors import IntegrityError, KeyMismatch, ParseError
from .keys import PrivateKey, PublicParams
from .ledger import GENESIS, Block, BlockKind, ChainGraph, verify_chain

FORMAT_VERSION = 1
_HEX = re.compile(r"0|[1-9a-f][0-9a-f]*")


def to_hex(value: int) -> str:
    return format(value, "x")


def _from_hex(value: Any, where: str) -> int:
    if not isinstance(value, str) or not _HEX.fullmatch(value):
        raise ParseError(f"{where}: expected minimal lowercase hex, got {value!r}")
    return int(value, 16)


def _field(obj: Any, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}.{key}: missing")
    return obj[key]


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _check_version(doc: Any) -> None:
    version = _field(doc, "format_version", "document")
    if version != FORMAT_VERSION:
        raise ParseError(f"format_version: unsupported version {version!r}")


# -- chain files ------------------------------------------------------------


def chain_to_dict(cg: ChainGraph) -> dict:
    pp = cg.params
    return {
        "format_version": FORMAT_VERSION,
        "header": {
            "chain_id": cg.chain_id,
            "hash_alg": pp.hash_alg,
            "modulus_n": to_hex(pp.modulus_n),
            "genesis_prefix": to_hex(pp.genesis_prefix),
        },
        "blocks": [
            {
                "parent": b.parent,
                "kind": b.kind.value,
                "prefix": to_hex(b.prefix),
                "content": base64.b64encode(b.content).decode("ascii"),
                "suffix": to_hex(b.suffix),
                "offset": b.offset,
            }
            for b in cg.blocks
        ],
    }


def dumps_chain(cg: ChainGraph) -> str:
    return json.dumps(chain_to_dict(cg), indent=2) + "\n"


def _parse_block(raw: Any, i: int) -> Block:
    where = f"blocks[{i}]"
    parent = _field(raw, "parent", where)
    if not isinstance(parent, int) or isinstance(parent, bool) or parent < GENESIS:
        raise ParseError(f"{where}.parent: expected an index or -1")
    kind = _field(raw, "kind", where)
    try:
        kind = BlockKind(kind)
    except ValueError:
        raise ParseError(f"{where}.kind: unknown block kind {kind!r}") from None
    content = _field(raw, "content", where)
    try:
        content = base64.b64decode(content, validate=True)
    except (binascii.Error, TypeError, ValueError):
        raise ParseError(f"{where}.content: invalid base64") from None
    offset = _field(raw, "offset", where)
    if not isinstance(offset, int) or isinstance(offset, bool):
        raise ParseError(f"{where}.offset: expected a decimal integer")
    return Block(
        parent,
        _from_hex(_field(raw, "prefix", where), f"{where}.prefix"),
        content,
        _from_hex(_field(raw, "suffix", where), f"{where}.suffix"),
        offset,
        kind,
    )


def chain_from_dict(doc: Any) -> ChainGraph:
    _check_version(doc)
    header = _field(doc, "header", "document")
    chain_id = _field(header, "chain_id", "header")
    if not isinstance(chain_id, str):
        raise ParseError("header.chain_id: expected a string")
    try:
        pp = PublicParams(
            _from_hex(_field(header, "modulus_n", "header"), "header.modulus_n"),
            _field(header, "hash_alg", "header"),
            _from_hex(_field(header, "genesis_prefix", "header"), "header.genesis_prefix"),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"header: {exc}") from None
    raw_blocks = _field(doc, "blocks", "document")
    if not isinstance(raw_blocks, list):
        raise ParseError("blocks: expected a list")
    return ChainGraph(pp, chain_id, [_parse_block(b, i) for i, b in enumerate(raw_blocks)])


def loads_chain(text: str, verify: bool = True) -> ChainGraph:
    """Parse a chain file. With ``verify`` the whole chain must check out."""
    cg = chain_from_dict(_load_json(text))
    if verify:
        report = verify_chain(cg)
        if not report.ok:
            block = None
            if report.failed_edges:
                e = report.failed_edges[0]
                block = e.child if e.parent == GENESIS else e.parent
            elif report.suffix_violations:
                block = report.suffix_violations[0]
            problems = [line for line in report.lines()[:-1] if not line.endswith(": ok")]
            raise IntegrityError("chain failed verification: " + "; ".join(problems), block=block)
    return cg


# -- key files --------------------------------------------------------------


def key_to_dict(pp: PublicParams, sk: Optional[PrivateKey] = None) -> dict:
    doc: dict = {
        "format_version": FORMAT_VERSION,
        "public": {"modulus_n": to_hex(pp.modulus_n), "hash_alg": pp.hash_alg},
    }
    if sk is not None:
        doc["private"] = {"p": to_hex(sk.p), "q": to_hex(sk.q)}
    return doc


def dumps_key(pp: PublicParams, sk: Optional[PrivateKey] = None) -> str:
    return json.dumps(key_to_dict(pp, sk), indent=2) + "\n"


def loads_key(text: str) -> tuple[PublicParams, Optional[PrivateKey]]:
    doc = _load_json(text)
    _check_version(doc)
    public = _field(doc, "public", "document")
    try:
        pp = PublicParams(
            _from_hex(_field(public, "modulus_n", "public"), "public.modulus_n"),
            _field(public, "hash_alg", "public"),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"public: {exc}") from None
    if "private" not in doc:
        return pp, None
    private = doc["private"]
    sk = PrivateKey(
        _from_hex(_field(private, "p", "private"), "private.p"),
        _from_hex(_field(private, "q", "private"), "private.q"),
    )
    if not sk.matches(pp):
        raise KeyMismatch("private.p * private.q does not equal public.modulus_n")
    try:
        sk.validate()
    except ValueError as exc:
        raise IntegrityError(f"private key: {exc}") from None
    return pp, sk


# -- files ------------------------------------------------------------------


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory and rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_chain(path, verify: bool = True) -> ChainGraph:
    return loads_chain(Path(path).read_text(encoding="utf-8"), verify=verify)


def write_chain(path, cg: ChainGraph) -> None:
    atomic_write(path, dumps_chain(cg))


def read_key(path) -> tuple[PublicParams, Optional[PrivateKey]]:
    return loads_key(Path(path).read_text(encoding="utf-8"))


def write_key(path, pp: PublicParams, sk: Optional[PrivateKey] = None) -> None:
    atomic_write(path, dumps_key(pp, sk))


def append_audit(path, records) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.as_dict()) + "\n")

