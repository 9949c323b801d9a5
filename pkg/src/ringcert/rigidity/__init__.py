"""Rigidity checks for token-counting ring strategies."""

from .canonical import canonical_ptc_strategy, canonical_tc_strategy, locally_rotated, ptc_token_strategy
from .chain import ChainOperators, build_chain_operators
from .dilation import NaimarkDilation, naimark_dilate_binary
from .lemma import lemma_chain_harness
from .tokens import (
    TokenFunctions,
    check_token_functions,
    find_token_functions,
    relabel_messages,
    tc_message_model,
)
from .unitaries import (
    PartyUnitary,
    apply_party_unitaries,
    build_party_unitary,
    factor_product_unitary,
    parity_party_unitary,
    pvm_from_unitarity,
    stabilizer_residual,
    tc_party_unitaries,
    tc_phase,
)
