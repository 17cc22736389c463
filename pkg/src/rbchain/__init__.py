"""Redactable blockchain with RSA-style trapdoor links.

Anyone can append and verify blocks; only the holder of the factorization of
the modulus can rewrite a block's content without breaking its outgoing link.
"""

from .keys import PaddedExponent, PrivateKey, PublicParams, keygen, pad_exponent, redaction_exponent
from .ledger import (
    GENESIS,
    Block,
    BlockKind,
    ChainGraph,
    RedactionRecord,
    VerificationReport,
    append,
    branch,
    init_chain,
    redact,
    verify_chain,
)

__version__ = "0.1.0"
