import hashlib
import random
from math import gcd

import pytest

from rbchain import ledger, store
from rbchain.errors import BlockNotFound, LeafRedaction, MustAppend, MustBranch
from rbchain.keys import PrivateKey
from rbchain.ledger import GENESIS, INTERMEDIATE_MARKER, BlockKind

from conftest import build_chain, seed


def test_init_chain_genesis(pp77):
    cg = ledger.init_chain(pp77, "t")
    # SHA-256("t") mod 77 == 2, already a unit
    assert cg.params.genesis_prefix == 2
    assert int.from_bytes(hashlib.sha256(b"t").digest(), "big") % 77 == 2
    assert ledger.init_chain(pp77, "t") == cg


def test_genesis_adjustment_skips_non_units(pp77):
    for i in range(300):
        g = ledger.genesis_prefix(pp77, f"id{i}")
        assert 1 <= g < 77 and gcd(g, 77) == 1


def test_append_first_block_uses_genesis(pp77):
    cg = ledger.init_chain(pp77, "t")
    pos = ledger.append(cg, None, b"", seed("a"))
    assert pos == 0
    assert cg.blocks[0].prefix == cg.params.genesis_prefix
    assert cg.blocks[0].offset == 0 and cg.blocks[0].kind == BlockKind.NORMAL


def test_three_appends_on_toy_key_verify(pp77):
    cg = build_chain(pp77, 3)
    report = ledger.verify_chain(cg)
    assert report.ok
    assert [(e.parent, e.child) for e in report.edges] == [(GENESIS, 0), (0, 1), (1, 2)]
    for i in (1, 2):
        assert cg.blocks[i].prefix == cg.next_prefix(i - 1)


def test_append_requires_leaf(pp77):
    cg = build_chain(pp77, 3)
    with pytest.raises(MustBranch):
        ledger.append(cg, 0, b"x", seed("x"))
    with pytest.raises(MustBranch):
        ledger.append(cg, GENESIS, b"x", seed("x"))
    with pytest.raises(BlockNotFound):
        ledger.append(cg, 9, b"x", seed("x"))


def test_verify_is_pure(pp12):
    cg = build_chain(pp12, 5)
    before = store.dumps_chain(cg)
    assert ledger.verify_chain(cg) == ledger.verify_chain(cg)
    assert store.dumps_chain(cg) == before


def _failed(report):
    return [(e.parent, e.child) for e in report.failed_edges]


def test_content_mutation_breaks_exactly_one_edge(pp12):
    cg = build_chain(pp12, 5)
    cg.blocks[3].content = b"tampered"
    report = ledger.verify_chain(cg)
    assert not report.ok
    assert _failed(report) == [(3, 4)]


def test_suffix_mutation_breaks_outgoing_edge(pp12):
    cg = build_chain(pp12, 5)
    cg.blocks[3].suffix = ledger.linkage.sample_suffix(pp12, seed("other"))
    assert _failed(ledger.verify_chain(cg)) == [(3, 4)]


def test_prefix_mutation_breaks_both_edges(pp12):
    cg = build_chain(pp12, 5)
    cg.blocks[2].prefix += 1
    assert _failed(ledger.verify_chain(cg)) == [(1, 2), (2, 3)]


def test_invalid_suffix_reported(pp77):
    cg = build_chain(pp77, 3)
    cg.blocks[2].suffix = 76
    report = ledger.verify_chain(cg)
    assert report.suffix_violations == [2]
    assert not report.ok


def test_redact_middle_block_toy(sk77, pp77):
    cg = build_chain(pp77, 3)
    before = store.chain_to_dict(cg)["blocks"]
    rec = ledger.redact(cg, sk77, 1, b"redacted")
    after = store.chain_to_dict(cg)["blocks"]
    assert ledger.verify_chain(cg).ok
    assert before[0] == after[0] and before[2] == after[2]
    assert cg.blocks[1].content == b"redacted"
    assert rec.position == 1 and rec.new_offset == cg.blocks[1].offset
    assert rec.new_digest == hashlib.sha256(b"redacted").hexdigest()
    assert cg.audit == [rec]


def test_redact_to_same_content(sk12, pp12):
    cg = build_chain(pp12, 4)
    content = cg.blocks[1].content
    ledger.redact(cg, sk12, 1, content)
    assert ledger.verify_chain(cg).ok
    assert cg.blocks[1].content == content


def test_redact_is_deterministic(sk12, pp12):
    a, b = build_chain(pp12, 4), build_chain(pp12, 4, label="other")
    ledger.redact(a, sk12, 0, b"same")
    ledger.redact(b, sk12, 0, b"same")
    # same genesis and content, but the emitted prefix differs
    assert a.blocks[0].suffix != b.blocks[0].suffix
    c = build_chain(pp12, 4)
    ledger.redact(c, sk12, 0, b"same")
    assert c.blocks[0].suffix == a.blocks[0].suffix


def test_redact_with_wrong_key_breaks_chain(pp12):
    cg = build_chain(pp12, 4)
    wrong = PrivateKey(2063, 2903)
    ledger.redact(cg, wrong, 1, b"forged")
    assert not ledger.verify_chain(cg).ok


def test_redact_rejects_leaf_and_missing(sk77, pp77):
    cg = build_chain(pp77, 3)
    with pytest.raises(LeafRedaction):
        ledger.redact(cg, sk77, 2, b"x")
    with pytest.raises(BlockNotFound):
        ledger.redact(cg, sk77, 7, b"x")


def test_redaction_locality_random(sk12, pp12):
    rng = random.Random(11)
    for trial in range(20):
        cg = build_chain(pp12, rng.randrange(2, 12), label=f"loc{trial}")
        pos = rng.randrange(0, len(cg) - 1)
        before = store.chain_to_dict(cg)
        ledger.redact(cg, sk12, pos, rng.randbytes(rng.randrange(0, 40)))
        after = store.chain_to_dict(cg)
        assert before["header"] == after["header"]
        for i, (b, a) in enumerate(zip(before["blocks"], after["blocks"])):
            if i != pos:
                assert a == b
            else:
                assert {k: v for k, v in a.items() if k not in ("content", "suffix", "offset")} == {
                    k: v for k, v in b.items() if k not in ("content", "suffix", "offset")
                }
        assert ledger.verify_chain(cg).ok


def _fork_fixture(sk, pp):
    cg = ledger.init_chain(pp, "fork")
    b1 = ledger.append(cg, None, b"B1", seed("f1"))
    b2 = ledger.append(cg, b1, b"B2", seed("f2"))
    b3 = ledger.append(cg, b2, b"B3", seed("f3"))
    b_in = ledger.branch(cg, b2, seed("fin"))
    b_prime = ledger.append(cg, b_in, b"B'", seed("fp"))
    return cg, (b1, b2, b3, b_in, b_prime)


def test_branch_and_redact_fork(sk12, pp12):
    cg, (b1, b2, b3, b_in, b_prime) = _fork_fixture(sk12, pp12)
    assert ledger.verify_chain(cg).ok
    inter = cg.blocks[b_in]
    assert inter.kind == BlockKind.INTERMEDIATE and inter.content == INTERMEDIATE_MARKER
    assert inter.prefix == cg.blocks[b3].prefix
    assert cg.blocks[b_prime].prefix == cg.next_prefix(b_in)

    before = store.chain_to_dict(cg)["blocks"]
    ledger.redact(cg, sk12, b2, b"B2 rewritten")
    after = store.chain_to_dict(cg)["blocks"]
    assert ledger.verify_chain(cg).ok
    for i in (b1, b3, b_in, b_prime):
        assert before[i] == after[i]


def test_branch_k_times(pp12):
    cg = build_chain(pp12, 3)
    inter = [ledger.branch(cg, 1, seed("k", k)) for k in range(4)]
    prefixes = {cg.blocks[i].prefix for i in inter}
    assert prefixes == {cg.blocks[2].prefix}
    assert ledger.verify_chain(cg).ok


def test_branch_requires_children(pp77):
    cg = build_chain(pp77, 2)
    with pytest.raises(MustAppend):
        ledger.branch(cg, 1, seed("b"))


def test_extra_normal_child_is_structural_error(pp12):
    cg = build_chain(pp12, 3)
    pos = ledger.branch(cg, 1, seed("b"))
    cg.blocks[pos].kind = BlockKind.NORMAL
    report = ledger.verify_chain(cg)
    assert not report.ok and report.structural


def test_intermediate_marker_enforced(pp12):
    cg = build_chain(pp12, 3)
    pos = ledger.branch(cg, 1, seed("b"))
    cg.blocks[pos].content = b"something else"
    assert not ledger.verify_chain(cg).ok


def test_genesis_mismatch_detected(pp12):
    cg = build_chain(pp12, 3)
    cg.chain_id = "other"
    assert not ledger.verify_chain(cg).ok


@pytest.mark.parametrize("length", [100])
def test_long_toy_chain(pp12, length):
    cg = build_chain(pp12, length)
    assert ledger.verify_chain(cg).ok


def test_chain_on_512_bit_key():
    from rbchain import keys

    pp, sk = keys.keygen(512, seed("k512"))
    cg = build_chain(pp, 10)
    assert ledger.verify_chain(cg).ok
    ledger.redact(cg, sk, 4, b"rewritten")
    assert ledger.verify_chain(cg).ok
