"""Zero-run-length + canonical Huffman coding of quantiser symbols.

Stream layout (all integers little-endian)::

    u32     number of symbols in the sequence
    varint  number of code-table entries k
    k x     (varint gap to previous table symbol, u8 code length)
    bits    codes, MSB first, zero-padded to a whole byte

The token alphabet is the 2**q literal symbols plus ``ZERO_RUN = 2**q``.
A run of at least ``MIN_RUN`` zero symbols is sent as the ZERO_RUN code
followed by the Elias-gamma code of the run length. Table entries are listed
in increasing symbol order; the first gap is the symbol itself and later gaps
are ``symbol - previous - 1``. Codes are assigned canonically, ordered by
(length, symbol).
"""

from __future__ import annotations

import heapq
import struct

import numpy as np

from ..errors import CorruptPayloadError, MalformedCodeTableError, TruncatedStreamError

__all__ = ["entropy_encode", "entropy_decode", "MIN_RUN", "MAX_CODE_LENGTH"]

MIN_RUN = 4
MAX_CODE_LENGTH = 32
_LOOKUP_BITS = 16


def _write_varint(out: bytearray, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise TruncatedStreamError("truncated stream: varint runs past end of data")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise MalformedCodeTableError("malformed code table: varint too long")


def _huffman_lengths(freqs: dict[int, int]) -> dict[int, int]:
    if len(freqs) == 1:
        return {next(iter(freqs)): 1}
    syms = sorted(freqs)
    while True:
        # leaves are 0..len-1, internal nodes follow; ties broken by node id
        heap = [(freqs[s], i) for i, s in enumerate(syms)]
        heapq.heapify(heap)
        parent = [0] * (2 * len(syms) - 1)
        node = len(syms)
        while len(heap) > 1:
            f1, a = heapq.heappop(heap)
            f2, b = heapq.heappop(heap)
            parent[a] = parent[b] = node
            heapq.heappush(heap, (f1 + f2, node))
            node += 1
        root = node - 1
        depth = [0] * (2 * len(syms) - 1)
        for i in range(root - 1, -1, -1):
            depth[i] = depth[parent[i]] + 1
        lengths = {s: depth[i] for i, s in enumerate(syms)}
        if max(lengths.values()) <= MAX_CODE_LENGTH:
            return lengths
        # flatten the distribution until the tree fits the length limit
        freqs = {s: (f + 1) // 2 for s, f in freqs.items()}


def _canonical_codes(lengths: dict[int, int]) -> dict[int, int]:
    codes = {}
    code = 0
    prev_len = 0
    for sym, length in sorted(lengths.items(), key=lambda item: (item[1], item[0])):
        code <<= length - prev_len
        codes[sym] = code
        code += 1
        prev_len = length
    return codes


def _tokenize(symbols: np.ndarray, marker: int):
    """Replace long zero runs by marker tokens; returns (tokens, run_lengths)."""
    is_zero = np.concatenate([[False], symbols == 0, [False]])
    edges = np.flatnonzero(np.diff(is_zero.astype(np.int8)))
    starts, ends = edges[0::2], edges[1::2]
    runs = ends - starts
    long = runs >= MIN_RUN
    starts, runs = starts[long], runs[long]
    keep = np.ones(symbols.size, dtype=bool)
    tokens = symbols.copy()
    for s, r in zip(starts.tolist(), runs.tolist()):
        keep[s + 1 : s + r] = False
    tokens[starts] = marker
    return tokens[keep], runs


def entropy_encode(symbols, q: int) -> bytes:
    """Losslessly code a sequence of integers in [0, 2**q - 1]."""
    symbols = np.asarray(symbols, dtype=np.int64).reshape(-1)
    alphabet = 1 << q
    if symbols.size and (symbols.min() < 0 or symbols.max() >= alphabet):
        raise ValueError(f"symbol out of range for {q}-bit alphabet")
    if symbols.size >= 1 << 32:
        raise ValueError("sequence too long")
    out = bytearray(struct.pack("<I", symbols.size))
    if symbols.size == 0:
        _write_varint(out, 0)
        return bytes(out)

    tokens, runs = _tokenize(symbols, alphabet)
    counts = np.bincount(tokens, minlength=alphabet + 1)
    used = np.flatnonzero(counts)
    lengths = _huffman_lengths({int(s): int(counts[s]) for s in used})
    codes = _canonical_codes(lengths)

    _write_varint(out, len(used))
    prev = -1
    for sym in used.tolist():
        _write_varint(out, sym - prev - 1)
        out.append(lengths[sym])
        prev = sym

    code_of = np.zeros(alphabet + 1, dtype=np.uint64)
    len_of = np.zeros(alphabet + 1, dtype=np.int64)
    for sym in used.tolist():
        code_of[sym] = codes[sym]
        len_of[sym] = lengths[sym]

    # interleave each marker token with its Elias-gamma run length
    is_marker = tokens == alphabet
    slots = 1 + is_marker.astype(np.int64)
    pos = np.cumsum(slots) - slots
    total = int(slots.sum())
    values = np.zeros(total, dtype=np.uint64)
    nbits = np.zeros(total, dtype=np.int64)
    values[pos] = code_of[tokens]
    nbits[pos] = len_of[tokens]
    if runs.size:
        gamma_pos = pos[is_marker] + 1
        values[gamma_pos] = runs.astype(np.uint64)
        nbits[gamma_pos] = np.array([2 * (int(r).bit_length() - 1) + 1 for r in runs.tolist()])

    owner = np.repeat(np.arange(total), nbits)
    first = np.cumsum(nbits) - nbits
    shift = (nbits[owner] - 1 - (np.arange(owner.size) - first[owner])).astype(np.uint64)
    bits = ((values[owner] >> shift) & np.uint64(1)).astype(np.uint8)
    out += np.packbits(bits).tobytes()
    return bytes(out)


def _read_table(data: bytes, pos: int, alphabet: int):
    count, pos = _read_varint(data, pos)
    if count == 0 or count > alphabet + 1:
        raise MalformedCodeTableError(f"malformed code table: {count} entries for alphabet of {alphabet + 1}")
    lengths = {}
    sym = -1
    for _ in range(count):
        gap, pos = _read_varint(data, pos)
        sym += gap + 1
        if sym > alphabet:
            raise MalformedCodeTableError(f"malformed code table: symbol {sym} outside alphabet")
        if pos >= len(data):
            raise TruncatedStreamError("truncated stream: code table cut short")
        length = data[pos]
        pos += 1
        if not 1 <= length <= MAX_CODE_LENGTH:
            raise MalformedCodeTableError(f"malformed code table: invalid code length {length}")
        lengths[sym] = length
    kraft = sum(1 << (MAX_CODE_LENGTH - l) for l in lengths.values())
    if kraft > 1 << MAX_CODE_LENGTH:
        raise MalformedCodeTableError("malformed code table: lengths violate the Kraft inequality")
    return lengths, pos


def entropy_decode(data: bytes, q: int, expected: int | None = None) -> np.ndarray:
    """Invert :func:`entropy_encode`.

    ``expected`` optionally pins the symbol count; a mismatch is reported
    before any decoding work.
    """
    data = bytes(data)
    alphabet = 1 << q
    if len(data) < 4:
        raise TruncatedStreamError("truncated stream: missing symbol count")
    (count,) = struct.unpack_from("<I", data, 0)
    if expected is not None and count != expected:
        raise CorruptPayloadError(f"payload declares {count} symbols, expected {expected}")
    if count == 0:
        _, pos = _read_varint(data, 4)
        return np.zeros(0, dtype=np.int64)
    lengths, pos = _read_table(data, 4, alphabet)
    codes = _canonical_codes(lengths)

    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, offset=pos))
    nbits = bits.size
    max_len = max(lengths.values())
    k = min(max_len, _LOOKUP_BITS)
    padded = np.concatenate([bits, np.zeros(k, dtype=np.uint8)]).astype(np.int64)
    window = np.zeros(nbits, dtype=np.int64)
    for j in range(k):
        window = (window << 1) | padded[j : j + nbits]

    table_sym = np.full(1 << k, -1, dtype=np.int64)
    table_len = np.zeros(1 << k, dtype=np.int64)
    long_codes = {}
    for sym, code in codes.items():
        length = lengths[sym]
        if length <= k:
            lo = code << (k - length)
            hi = (code + 1) << (k - length)
            table_sym[lo:hi] = sym
            table_len[lo:hi] = length
        else:
            long_codes[(length, code)] = sym
    win = window.tolist()
    tsym = table_sym.tolist()
    tlen = table_len.tolist()
    bit_list = None

    out = np.zeros(count, dtype=np.int64)
    i = 0
    p = 0
    while i < count:
        if p >= nbits:
            raise TruncatedStreamError(f"truncated stream: decoded {i} of {count} symbols")
        e = win[p]
        length = tlen[e]
        if length:
            sym = tsym[e]
        else:
            if bit_list is None:
                bit_list = bits.tolist()
            code = e
            length = k
            sym = None
            while length < max_len:
                if p + length >= nbits:
                    raise TruncatedStreamError(f"truncated stream: decoded {i} of {count} symbols")
                code = (code << 1) | bit_list[p + length]
                length += 1
                sym = long_codes.get((length, code))
                if sym is not None:
                    break
            if sym is None:
                raise CorruptPayloadError(f"invalid code at bit {p}")
        if p + length > nbits:
            raise TruncatedStreamError(f"truncated stream: decoded {i} of {count} symbols")
        p += length
        if sym == alphabet:
            if bit_list is None:
                bit_list = bits.tolist()
            zeros = 0
            while p + zeros < nbits and bit_list[p + zeros] == 0:
                zeros += 1
            if p + 2 * zeros + 1 > nbits:
                raise TruncatedStreamError("truncated stream: run length cut short")
            run = 0
            for b in bit_list[p + zeros : p + 2 * zeros + 1]:
                run = (run << 1) | b
            p += 2 * zeros + 1
            if run > count - i:
                raise CorruptPayloadError(f"zero run of {run} overflows the {count}-symbol sequence")
            i += run
        else:
            out[i] = sym
            i += 1
    return out
