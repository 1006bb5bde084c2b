"""
Random access response (RAR) codec

Frame layout, MSB first within every field:

    7 ack bits (all 1) | TA (6) | rb_start (4) | num_rb - 1 (2) | CRC-5 (5)

The CRC covers the 12 payload bits with g(x) = x^5 + x^4 + x^2 + 1, zero initial
remainder, no reflection and no output XOR. Each bit rides on one subcarrier and
is sent twice: a second hop copy sits half a band higher, n_slot symbols later.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .sysparams import SystemParams

logger = logging.getLogger(__name__)

ACK_BITS = 7
TA_BITS = 6
RB_START_BITS = 4
NUM_RB_BITS = 2
PAYLOAD_BITS = TA_BITS + RB_START_BITS + NUM_RB_BITS
CRC_BITS = 5
FRAME_BITS = ACK_BITS + PAYLOAD_BITS + CRC_BITS

CRC5_POLY = 0b110101  # x^5 + x^4 + x^2 + 1
ACK_MIN_ONES = 5  # more than 4 of the 7 ack bits
TA_MAX = 44  # G - L channel uses at the default operating point
RB_START_MAX = 14


class DecodeStatus(str, Enum):
    NO_RAR = "no_rar"
    CRC_FAIL = "crc_fail"
    SUCCESS = "success"


def _int_to_bits(value: int, width: int) -> List[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def _bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


@dataclass(frozen=True)
class RarPayload:
    """TA command and uplink grant carried by the RAR"""
    ta: int
    rb_start: int
    num_rb: int

    def __post_init__(self):
        if not 0 <= self.ta <= TA_MAX:
            raise ValueError(f"ta={self.ta} outside 0..{TA_MAX}")
        if not 0 <= self.rb_start <= RB_START_MAX:
            raise ValueError(f"rb_start={self.rb_start} outside 0..{RB_START_MAX}")
        if not 1 <= self.num_rb <= 2 ** NUM_RB_BITS:
            raise ValueError(f"num_rb={self.num_rb} outside 1..{2 ** NUM_RB_BITS}")

    def to_bits(self) -> np.ndarray:
        bits = (
            _int_to_bits(self.ta, TA_BITS)
            + _int_to_bits(self.rb_start, RB_START_BITS)
            + _int_to_bits(self.num_rb - 1, NUM_RB_BITS)
        )
        return np.array(bits, dtype=np.uint8)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "RarPayload":
        if len(bits) != PAYLOAD_BITS:
            raise ValueError(f"payload needs {PAYLOAD_BITS} bits, got {len(bits)}")
        ta = _bits_to_int(bits[:TA_BITS])
        rb_start = _bits_to_int(bits[TA_BITS:TA_BITS + RB_START_BITS])
        num_rb = _bits_to_int(bits[TA_BITS + RB_START_BITS:]) + 1
        return cls(ta=ta, rb_start=rb_start, num_rb=num_rb)


@dataclass
class GridPlacement:
    """(ofdm_symbol, subcarrier) of every RAR bit, one array per hop copy"""
    copies: Tuple[np.ndarray, np.ndarray]

    @property
    def subcarriers(self) -> np.ndarray:
        """Subcarrier index of every RE, copy 1 then copy 2"""
        return np.concatenate([c[:, 1] for c in self.copies])

    def resource_elements(self) -> set:
        return {tuple(int(v) for v in re) for c in self.copies for re in c}


@dataclass
class RarFrame:
    bits: np.ndarray
    placement: Optional[GridPlacement] = None


@dataclass
class DecodeResult:
    status: DecodeStatus
    payload: Optional[RarPayload] = None
    bits: np.ndarray = field(default_factory=lambda: np.zeros(FRAME_BITS, dtype=np.uint8))
    ack_ones: int = 0

    @property
    def success(self) -> bool:
        return self.status == DecodeStatus.SUCCESS


def crc5(message: Sequence[int]) -> np.ndarray:
    """Remainder of message * x^5 modulo g(x), MSB first"""
    if len(message) != PAYLOAD_BITS:
        raise ValueError(f"crc5 expects {PAYLOAD_BITS} bits, got {len(message)}")
    remainder = 0
    low_terms = CRC5_POLY & 0b11111
    for bit in message:
        feedback = ((remainder >> (CRC_BITS - 1)) & 1) ^ (int(bit) & 1)
        remainder = (remainder << 1) & 0b11111
        if feedback:
            remainder ^= low_terms
    return np.array(_int_to_bits(remainder, CRC_BITS), dtype=np.uint8)


def crc5_check(codeword: Sequence[int]) -> bool:
    """True when a 17-bit payload+CRC word is divisible by g(x)"""
    if len(codeword) != PAYLOAD_BITS + CRC_BITS:
        raise ValueError(f"codeword needs {PAYLOAD_BITS + CRC_BITS} bits")
    return bool(np.array_equal(crc5(codeword[:PAYLOAD_BITS]), np.asarray(codeword[PAYLOAD_BITS:], dtype=np.uint8)))


def encode(payload: RarPayload) -> RarFrame:
    info = payload.to_bits()
    bits = np.concatenate([np.ones(ACK_BITS, dtype=np.uint8), info, crc5(info)])
    return RarFrame(bits=bits)


def map_to_grid(k: int, params: SystemParams) -> GridPlacement:
    """
    Copy 1 puts bit b on RE index (k-1)*N_SC + b of the symbol-major grid;
    copy 2 adds N_RS/2 subcarriers (mod N_RS) and n_slot symbols.
    """
    if not 1 <= k <= params.num_preambles:
        raise ValueError(f"preamble index {k} outside 1..{params.num_preambles}")
    base = (k - 1) * params.n_sc + np.arange(params.rar_bits)
    symbol, subcarrier = np.divmod(base, params.n_rs)
    first = np.stack([symbol, subcarrier], axis=1)
    second = np.stack([symbol + params.n_slot, (subcarrier + params.n_rs // 2) % params.n_rs], axis=1)
    if second[:, 0].max() >= params.num_ofdm_symbols:
        raise ValueError("RAR grid overflow")
    return GridPlacement(copies=(first, second))


def bpsk(bits: Sequence[int]) -> np.ndarray:
    """1 -> +1, 0 -> -1"""
    return 2.0 * np.asarray(bits, dtype=float) - 1.0


def decode(rx: np.ndarray) -> DecodeResult:
    """
    Equal-gain combine the real parts of both hop copies and slice.

    Args:
        rx: Received values, shape (2, 24) or a flat copy-1-then-copy-2 vector

    Returns:
        DecodeResult with status no_rar / crc_fail / success
    """
    rx = np.asarray(rx)
    if rx.ndim == 1:
        rx = rx.reshape(2, -1)
    if rx.shape[-1] != FRAME_BITS:
        raise ValueError(f"expected {FRAME_BITS} values per copy, got {rx.shape[-1]}")
    statistic = np.sum(np.real(rx), axis=0)
    bits = (statistic > 0).astype(np.uint8)
    ack_ones = int(bits[:ACK_BITS].sum())
    if ack_ones < ACK_MIN_ONES:
        return DecodeResult(status=DecodeStatus.NO_RAR, bits=bits, ack_ones=ack_ones)
    codeword = bits[ACK_BITS:]
    if not crc5_check(codeword):
        return DecodeResult(status=DecodeStatus.CRC_FAIL, bits=bits, ack_ones=ack_ones)
    try:
        payload = RarPayload.from_bits(codeword[:PAYLOAD_BITS])
    except ValueError as e:
        # CRC passed on garbage; the UE discards it like a CRC failure
        logger.debug(f"CRC-valid RAR with out-of-range fields: {e}")
        return DecodeResult(status=DecodeStatus.CRC_FAIL, bits=bits, ack_ones=ack_ones)
    return DecodeResult(status=DecodeStatus.SUCCESS, payload=payload, bits=bits, ack_ones=ack_ones)


def to_hex(bits: Sequence[int]) -> str:
    """24 bits -> 6 upper-case hex digits"""
    if len(bits) != FRAME_BITS:
        raise ValueError(f"expected {FRAME_BITS} bits")
    return f"{_bits_to_int(bits):0{FRAME_BITS // 4}X}"


def from_hex(text: str) -> np.ndarray:
    cleaned = text.strip().lower().removeprefix("0x")
    if len(cleaned) != FRAME_BITS // 4:
        raise ValueError(f"expected {FRAME_BITS // 4} hex digits, got {text!r}")
    try:
        value = int(cleaned, 16)
    except ValueError as e:
        raise ValueError(f"not a hex frame: {text!r}") from e
    return np.array(_int_to_bits(value, FRAME_BITS), dtype=np.uint8)
