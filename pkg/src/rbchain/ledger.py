"""Blocks, the chain/tree container and its lifecycle operations.

Blocks live in a flat list in creation order; the tree shape comes from each
block's ``parent`` index (``GENESIS`` for the root). A node's first child
consumes the node's emitted next-prefix directly. Every further child is an
INTERMEDIATE block carrying that same prefix, so a later redaction of the
node, which keeps the emitted value fixed, leaves all branches valid.

``ChainGraph`` is single-writer: ``append``, ``branch`` and ``redact`` need
exclusive access, concurrent readers are fine otherwise.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Optional

from . import keys, linkage, modmath
from .errors import BlockNotFound, LeafRedaction, MustAppend, MustBranch
from .keys import PrivateKey, PublicParams

GENESIS = -1
INTERMEDIATE_MARKER = b"INTERMEDIATE\x00"


class BlockKind(str, enum.Enum):
    NORMAL = "NORMAL"
    INTERMEDIATE = "INTERMEDIATE"


@dataclass
class Block:
    parent: int
    prefix: int
    content: bytes
    suffix: int
    offset: int = 0
    kind: BlockKind = BlockKind.NORMAL


@dataclass(frozen=True)
class RedactionRecord:
    position: int
    old_digest: str
    new_digest: str
    new_offset: int
    timestamp: float

    def as_dict(self) -> dict:
        return {
            "position": self.position,
            "old_digest": self.old_digest,
            "new_digest": self.new_digest,
            "new_offset": self.new_offset,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class EdgeResult:
    parent: int
    child: int
    ok: bool
    reason: str = ""


@dataclass
class VerificationReport:
    edges: list[EdgeResult] = field(default_factory=list)
    suffix_violations: list[int] = field(default_factory=list)
    structural: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            not self.structural
            and not self.suffix_violations
            and all(e.ok for e in self.edges)
        )

    @property
    def failed_edges(self) -> list[EdgeResult]:
        return [e for e in self.edges if not e.ok]

    def lines(self) -> list[str]:
        out = []
        for e in self.edges:
            src = "genesis" if e.parent == GENESIS else str(e.parent)
            status = "ok" if e.ok else f"FAIL ({e.reason})"
            out.append(f"edge {src} -> {e.child}: {status}")
        out += [f"block {i}: invalid suffix" for i in self.suffix_violations]
        out += [f"structure: {msg}" for msg in self.structural]
        out.append("chain valid" if self.ok else "chain INVALID")
        return out


@dataclass
class ChainGraph:
    params: PublicParams
    chain_id: str
    blocks: list[Block] = field(default_factory=list)
    audit: list[RedactionRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.blocks)

    def block(self, pos: int) -> Block:
        if not 0 <= pos < len(self.blocks):
            raise BlockNotFound(f"no block at position {pos}")
        return self.blocks[pos]

    def children(self, pos: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if b.parent == pos]

    def is_leaf(self, pos: int) -> bool:
        return not self.children(pos)

    def next_prefix(self, pos: int) -> int:
        """Link value the block at ``pos`` emits, recomputed from its stored fields."""
        b = self.block(pos)
        d = linkage.hash_to_exponent(b.prefix, b.content, self.params) + b.offset
        return linkage.link(b.suffix, d, self.params)


def genesis_prefix(pp: PublicParams, chain_id: str) -> int:
    """Hash of the chain id mod n, bumped up to the next unit in [1, n-1]."""
    n = pp.modulus_n
    g = int.from_bytes(keys.hash_bytes(chain_id.encode(), pp.hash_alg), "big") % n
    while g == 0 or gcd(g, n) != 1:
        g = (g + 1) % n
    return g


def init_chain(pp: PublicParams, chain_id: str) -> ChainGraph:
    return ChainGraph(replace(pp, genesis_prefix=genesis_prefix(pp, chain_id)), chain_id)


def _incoming_prefix(cg: ChainGraph, parent: int) -> int:
    if parent == GENESIS:
        return cg.params.genesis_prefix
    return cg.next_prefix(parent)


def append(cg: ChainGraph, parent: Optional[int], content: bytes, seed: bytes | None = None) -> int:
    """Add a NORMAL block under ``parent`` (``None`` means the last block, or genesis)."""
    if parent is None:
        parent = len(cg.blocks) - 1 if cg.blocks else GENESIS
    if parent == GENESIS:
        if cg.blocks:
            raise MustBranch("the chain already has a root block")
    else:
        cg.block(parent)
        if not cg.is_leaf(parent):
            raise MustBranch(f"block {parent} already has a child; branch instead")
    suffix = linkage.sample_suffix(cg.params, seed)
    cg.blocks.append(Block(parent, _incoming_prefix(cg, parent), bytes(content), suffix))
    return len(cg.blocks) - 1


def branch(cg: ChainGraph, at: int, seed: bytes | None = None) -> int:
    """Open a new branch at ``at`` via an INTERMEDIATE block sharing its first child's prefix."""
    cg.block(at)
    kids = cg.children(at)
    if not kids:
        raise MustAppend(f"block {at} has no children; append instead")
    shared = cg.blocks[kids[0]].prefix
    suffix = linkage.sample_suffix(cg.params, seed)
    cg.blocks.append(Block(at, shared, INTERMEDIATE_MARKER, suffix, 0, BlockKind.INTERMEDIATE))
    return len(cg.blocks) - 1


def redact(cg: ChainGraph, sk: PrivateKey, pos: int, new_content: bytes) -> RedactionRecord:
    """Rewrite the content of block ``pos`` while keeping its emitted next-prefix.

    ``sk`` must be the trapdoor for the chain's modulus; with any other key
    the new suffix is garbage and ``verify_chain`` fails afterwards.
    """
    b = cg.block(pos)
    kids = cg.children(pos)
    if not kids:
        raise LeafRedaction(f"block {pos} is a leaf; rewrite it and append instead")
    pp = cg.params
    # the value the children consume; equals next_prefix(pos) on an intact chain
    target = cg.blocks[kids[0]].prefix
    new_content = bytes(new_content)
    pe = keys.pad_exponent(linkage.hash_to_exponent(b.prefix, new_content, pp), sk)
    e_inv = keys.redaction_exponent(pe, sk)
    record = RedactionRecord(
        pos,
        keys.hash_bytes(b.content, pp.hash_alg).hex(),
        keys.hash_bytes(new_content, pp.hash_alg).hex(),
        pe.offset,
        time.time(),
    )
    b.content = new_content
    b.offset = pe.offset
    b.suffix = modmath.mod_exp(target, e_inv, pp.modulus_n)
    cg.audit.append(record)
    return record


def verify_chain(cg: ChainGraph) -> VerificationReport:
    """Recompute every link from stored fields. Never raises on bad data."""
    report = VerificationReport()
    pp = cg.params
    n = pp.modulus_n
    blocks = cg.blocks

    if pp.genesis_prefix != genesis_prefix(pp, cg.chain_id):
        report.structural.append("genesis prefix does not match chain id")

    children: dict[int, list[int]] = {}
    for i, b in enumerate(blocks):
        if not (b.parent == GENESIS or 0 <= b.parent < i):
            report.structural.append(f"block {i}: parent {b.parent} must precede it")
            continue
        children.setdefault(b.parent, []).append(i)
        if not linkage.is_valid_suffix(b.suffix, n):
            report.suffix_violations.append(i)
        if b.kind == BlockKind.INTERMEDIATE and b.content != INTERMEDIATE_MARKER:
            report.structural.append(f"block {i}: intermediate block without marker content")

    roots = children.get(GENESIS, [])
    if blocks and len(roots) != 1:
        report.structural.append(f"expected exactly one root block, found {len(roots)}")
    for parent, kids in children.items():
        for extra in kids[1:]:
            if blocks[extra].kind != BlockKind.INTERMEDIATE:
                report.structural.append(
                    f"block {extra}: extra child of {parent} must be INTERMEDIATE"
                )

    for root in roots:
        ok = blocks[root].prefix == pp.genesis_prefix
        report.edges.append(EdgeResult(GENESIS, root, ok, "" if ok else "prefix != genesis"))
    for parent in sorted(k for k in children if k != GENESIS):
        p = blocks[parent]
        for child in children[parent]:
            ok = linkage.verify_link(p.prefix, p.content, p.offset, p.suffix, blocks[child].prefix, pp)
            report.edges.append(EdgeResult(parent, child, ok, "" if ok else "link mismatch"))
    return report
