"""Matrix-vector products over encrypted vectors, five ways.

Methods (X is the plaintext m x n matrix, y the encrypted length-n vector;
slot convention: every finished result puts output r in slot r):

  naive    row-order plaintexts; per row: mult, log2(n) rotate-and-sum
           rounds, indicator mask, positioning rotation. Expensive but simple.
  column   one broadcast ciphertext per column of y; sum of column scalings.
           No rotations at all, but n input ciphertexts.
  gala     diagonal-order plaintexts; rotates each *product* into place, so
           its min(m,n)-1 rotations cannot share precomputation.
  hoisted  diagonal encoding rotated on the *input* side, so all rotations
           collapse into one hoisted group; packs ceil(mn/N') diagonals when
           slots would go vacant, partitions into N'-sized blocks when the
           operand exceeds them, and defers the final rotate-and-sum to
           cleartext after decryption (lazy RaS) by default.
  cheetah  coefficient packing: one polynomial product, m extracted
           single-coefficient ciphertexts out.

The complexity of each path is a closed form of (m, n, N'); matmult performs
exactly the operations predict_complexity counts, and tests pin the two
together over the whole size grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (
    CapacityExceeded,
    EncodingMismatch,
    LayoutUnsupported,
    MatrixTooLarge,
    OperandTooLarge,
    PackingNotApplicable,
    PartitionNotRequired,
    PlanMismatch,
    ReplicationMismatch,
    ScaleMismatch,
    ShapeMismatch,
)
from .fixedpoint import to_fixed
from .params import SchemeParams
from .rlwe.cheetah import coeff_encode_cheetah, coeff_encode_vec, result_coeff_index
from .simd import CiphertextHandle, Plaintext, SimdBackend

METHODS = ("naive", "column", "gala", "hoisted", "cheetah")


def _pad_pow2(x: int) -> int:
    return 1 << max(0, (int(x) - 1).bit_length())


def _pad_matrix(x: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Zero-pad to power-of-two dimensions; returns (padded, orig_m, orig_n)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    m, n = x.shape
    mp, np_ = _pad_pow2(m), _pad_pow2(n)
    if (mp, np_) != (m, n):
        out = np.zeros((mp, np_), dtype=np.float64)
        out[:m, :n] = x
        x = out
    return x, m, n


def packed_diagonal_count(m: int, n: int, slot_count: int) -> int:
    return -(-m * n // slot_count)


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass
class PartitionPlan:
    """How an oversized operand tiles into N'-sized blocks."""

    case: str  # "rows" | "cols" | "grid"
    row_blocks: int
    col_blocks: int
    block_rows: int
    block_cols: int


@dataclass
class DiagonalEncodedMatrix:
    """Encoded matrix operand plus the layout facts matmult dispatches on.

    m, n are the padded (power-of-two) dimensions; orig_m/orig_n remember the
    caller's true shape so results can be sliced back. `diagonals` holds
    Plaintexts normally, CiphertextHandles for the encrypted-matrix path, or
    the single coefficient polynomial for cheetah. Partitioned operands keep
    their per-block encodings in `blocks`.
    """

    scheme: str
    m: int
    n: int
    orig_m: int
    orig_n: int
    slot_count: int
    packed: bool = False
    diagonals: list = field(default_factory=list)
    partition: PartitionPlan | None = None
    blocks: list["DiagonalEncodedMatrix"] | None = None
    ciphertext: bool = False


@dataclass
class PendingResult:
    """Matmult output with the rotate-and-sum deferred to cleartext.

    reduction_plan[k] lists (ciphertext index, slot) pairs whose decrypted
    values sum to output k. Decrypt the ciphertexts, then feed the slot
    vectors to finalize_lazy_ras.
    """

    ciphertexts: list
    reduction_plan: list[list[tuple[int, int]]]
    scale_exponent: int = 2


@dataclass(frozen=True)
class ComplexityPrediction:
    """Closed-form op and ciphertext-traffic counts for one matmult."""

    add: int
    mult: int
    rot: int
    hst_rot: int
    ct_b_to_a: tuple[int, str]  # vector owner -> matrix owner (count, kind)
    ct_a_to_b: tuple[int, str]  # matrix owner -> vector owner (count, kind)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.add, self.mult, self.rot, self.hst_rot)


# ---------------------------------------------------------------------------
# encoders
# ---------------------------------------------------------------------------

def _fixed(x: np.ndarray, params: SchemeParams) -> np.ndarray:
    return to_fixed(x, params.scale, params.plain_modulus)


def _diag_plaintexts(build_row, count: int, params: SchemeParams) -> list[Plaintext]:
    j = np.arange(params.slot_count)
    return [Plaintext(_fixed(build_row(i, j), params), scale_exponent=1) for i in range(count)]


def encode_hoisted_diagonal(x: np.ndarray, params: SchemeParams) -> DiagonalEncodedMatrix:
    """min(m,n) diagonals: e_i[j] = X[j mod m, (i+j) mod n], replicated to N'."""
    xp, m0, n0 = _pad_matrix(x)
    m, n = xp.shape
    if max(m, n) > params.slot_count:
        raise OperandTooLarge(f"{m}x{n} exceeds {params.slot_count} slots; partition instead")
    diags = _diag_plaintexts(lambda i, j: xp[j % m, (i + j) % n], min(m, n), params)
    return DiagonalEncodedMatrix("hoisted", m, n, m0, n0, params.slot_count, diagonals=diags)


def encode_gala_diagonal(x: np.ndarray, params: SchemeParams) -> DiagonalEncodedMatrix:
    """min(m,n) diagonals in diagonal order: e_i[j] = X[(i+j) mod m, j mod n]."""
    xp, m0, n0 = _pad_matrix(x)
    m, n = xp.shape
    if max(m, n) > params.slot_count:
        raise OperandTooLarge(f"{m}x{n} exceeds {params.slot_count} slots; partition instead")
    diags = _diag_plaintexts(lambda i, j: xp[(i + j) % m, j % n], min(m, n), params)
    return DiagonalEncodedMatrix("gala", m, n, m0, n0, params.slot_count, diagonals=diags)


def encode_row_order(x: np.ndarray, params: SchemeParams) -> list[Plaintext]:
    """One plaintext per row, zero-padded (the naive method's operands)."""
    xp, _, _ = _pad_matrix(x)
    m, n = xp.shape
    if max(m, n) > params.slot_count:
        raise OperandTooLarge(f"{m}x{n} exceeds {params.slot_count} slots")
    out = []
    for r in range(m):
        slots = np.zeros(params.slot_count, dtype=np.int64)
        slots[:n] = _fixed(xp[r], params)
        out.append(Plaintext(slots, scale_exponent=1))
    return out


def encode_column_order(x: np.ndarray, params: SchemeParams) -> list[Plaintext]:
    """One plaintext per column, zero-padded below row m."""
    xp, _, _ = _pad_matrix(x)
    m, n = xp.shape
    if m > params.slot_count:
        raise OperandTooLarge(f"{m} rows exceed {params.slot_count} slots")
    out = []
    for c in range(n):
        slots = np.zeros(params.slot_count, dtype=np.int64)
        slots[:m] = _fixed(xp[:, c], params)
        out.append(Plaintext(slots, scale_exponent=1))
    return out


def _packed_row_index(j: np.ndarray, m_prime: int, n: int) -> np.ndarray:
    # slot j reads row (j mod m') of the vertical stack, section floor(j/n)
    return (j % m_prime) + m_prime * (j // n)


def input_pack(x: np.ndarray, params: SchemeParams, scheme: str = "hoisted") -> DiagonalEncodedMatrix:
    """Pack ceil(mn/N') generalized diagonals so no slot goes vacant.

    The matrix is reshaped so rows i and i+m' share a plaintext (row i sits in
    column section floor(i/m')), and the diagonal wrap happens within each
    n-wide section rather than across the whole slot vector.
    """
    xp, m0, n0 = _pad_matrix(x)
    m, n = xp.shape
    slots = params.slot_count
    if max(m, n) > slots:
        raise OperandTooLarge(f"{m}x{n} exceeds {slots} slots; partition instead")
    m_prime = packed_diagonal_count(m, n, slots)
    if m_prime == m and m > 1:
        raise PackingNotApplicable(f"no vacant slots to pack: ceil({m}*{n}/{slots}) = {m}")
    # zero rows so every packed-row index below m' * N'/n resolves
    stack_rows = m_prime * (slots // n)
    xs = np.zeros((stack_rows, n), dtype=np.float64)
    xs[:m] = xp
    if scheme == "hoisted":
        def row(i, j):
            return xs[_packed_row_index(j, m_prime, n), (i + j) % n]
    elif scheme == "gala":
        def row(i, j):
            return xs[_packed_row_index((j + i) % slots, m_prime, n), j % n]
    else:
        raise EncodingMismatch(f"packing applies to diagonal schemes, not {scheme!r}")
    diags = _diag_plaintexts(row, m_prime, params)
    return DiagonalEncodedMatrix(scheme, m, n, m0, n0, slots, packed=True, diagonals=diags)


def plan_partition(m: int, n: int, slot_count: int) -> PartitionPlan:
    """Tile an oversized operand into N'-sized blocks (padded dimensions)."""
    mp, np_ = _pad_pow2(m), _pad_pow2(n)
    if mp <= slot_count and np_ <= slot_count:
        raise PartitionNotRequired(f"{m}x{n} fits in {slot_count} slots")
    if mp > slot_count and np_ <= slot_count:
        return PartitionPlan("rows", mp // slot_count, 1, slot_count, np_)
    if mp <= slot_count and np_ > slot_count:
        return PartitionPlan("cols", 1, np_ // slot_count, mp, slot_count)
    return PartitionPlan("grid", mp // slot_count, np_ // slot_count, slot_count, slot_count)


def encode_partitioned(x: np.ndarray, params: SchemeParams) -> DiagonalEncodedMatrix:
    """Per-block hoisted-diagonal encodings following plan_partition."""
    xp, m0, n0 = _pad_matrix(x)
    m, n = xp.shape
    plan = plan_partition(m, n, params.slot_count)
    br, bc = plan.block_rows, plan.block_cols
    blocks = [
        encode_hoisted_diagonal(xp[r * br:(r + 1) * br, c * bc:(c + 1) * bc], params)
        for r in range(plan.row_blocks)
        for c in range(plan.col_blocks)
    ]
    return DiagonalEncodedMatrix(
        "hoisted", m, n, m0, n0, params.slot_count, partition=plan, blocks=blocks
    )


def encode_cheetah(x: np.ndarray, params: SchemeParams) -> DiagonalEncodedMatrix:
    """Coefficient encoding; no padding (no cyclic alignment to preserve)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    m, n = x.shape
    poly = coeff_encode_cheetah(x, params)  # raises MatrixTooLarge past m*n > N
    return DiagonalEncodedMatrix("cheetah", m, n, m, n, params.slot_count, diagonals=[poly])


def encode_for_method(method: str, x: np.ndarray, params: SchemeParams) -> DiagonalEncodedMatrix:
    """Uniform entry: picks packed/partitioned variants the way matmult expects."""
    if method == "naive":
        xp, m0, n0 = _pad_matrix(x)
        m, n = xp.shape
        rows = encode_row_order(xp, params)
        return DiagonalEncodedMatrix("naive", m, n, m0, n0, params.slot_count, diagonals=rows)
    if method == "column":
        xp, m0, n0 = _pad_matrix(x)
        m, n = xp.shape
        cols = encode_column_order(xp, params)
        return DiagonalEncodedMatrix("column", m, n, m0, n0, params.slot_count, diagonals=cols)
    if method == "cheetah":
        return encode_cheetah(x, params)
    if method in ("gala", "hoisted"):
        xp, _, _ = _pad_matrix(x)
        m, n = xp.shape
        if max(m, n) > params.slot_count:
            if method == "gala":
                raise OperandTooLarge(f"{m}x{n} exceeds {params.slot_count} slots")
            return encode_partitioned(x, params)
        if packed_diagonal_count(m, n, params.slot_count) < m:
            return input_pack(x, params, scheme=method)
        if method == "gala":
            return encode_gala_diagonal(x, params)
        return encode_hoisted_diagonal(x, params)
    raise EncodingMismatch(f"unknown method {method!r}; have {METHODS}")


def encode_matrix_ciphertext(
    x: np.ndarray, params: SchemeParams, backend: SimdBackend, key_id: int
) -> DiagonalEncodedMatrix:
    """Hoisted-diagonal encoding with each diagonal encrypted (matrix secret)."""
    enc = encode_hoisted_diagonal(x, params)
    enc.diagonals = [backend.encrypt(pt, key_id) for pt in enc.diagonals]
    enc.ciphertext = True
    return enc


# ---------------------------------------------------------------------------
# vector side
# ---------------------------------------------------------------------------

def encode_vector(y: np.ndarray, method: str, params: SchemeParams,
                  *, raw: bool = False) -> Plaintext | list[Plaintext]:
    """Encode y in the replication layout `method` expects (padded length).

    Returns a list for the multi-ciphertext layouts (column method; the
    column-partitioned cases), a single Plaintext otherwise. Plaintext objects
    get a `.replication` attribute that encrypt_vector copies onto handles.

    With ``raw=True`` the entries of y are taken as already-scaled mod-t
    residues (secret shares, masks) instead of reals to be fixed-point
    encoded. Not supported for the coefficient layout.
    """
    if raw:
        if method == "cheetah":
            raise LayoutUnsupported("raw residues have no coefficient encoding")
        y = np.asarray(y, dtype=np.int64).ravel()
    else:
        y = np.asarray(y, dtype=np.float64).ravel()
    n = _pad_pow2(len(y))
    slots = params.slot_count
    yp = np.zeros(n, dtype=y.dtype)
    yp[: len(y)] = y

    def tagged(values: np.ndarray, tag: tuple) -> Plaintext:
        if raw:
            slots_arr = np.asarray(values, dtype=np.int64) % params.plain_modulus
        else:
            slots_arr = _fixed(values, params)
        pt = Plaintext(slots_arr, scale_exponent=1)
        pt.replication = tag
        return pt

    if method == "naive":
        if n > slots:
            raise OperandTooLarge(f"{n} > {slots} slots")
        padded = np.zeros(slots, dtype=yp.dtype)
        padded[:n] = yp
        return tagged(padded, ("plain", n))
    if method == "column":
        return [tagged(np.full(slots, yp[c]), ("broadcast", c, n)) for c in range(n)]
    if method == "cheetah":
        pt = Plaintext(coeff_encode_vec(y, params), scale_exponent=1)
        pt.replication = ("coeff", len(y))
        return pt
    if method in ("gala", "hoisted"):
        if n <= slots:
            reps = np.tile(yp, slots // n)
            return tagged(reps, ("replicated", n))
        if method == "gala":
            raise OperandTooLarge(f"{n} > {slots} slots")
        segments = yp.reshape(n // slots, slots)
        return [tagged(seg, ("replicated", slots)) for seg in segments]
    raise EncodingMismatch(f"unknown method {method!r}")


def encrypt_vector(
    backend: SimdBackend, y: np.ndarray, method: str, key_id: int,
    *, raw: bool = False,
) -> CiphertextHandle | list[CiphertextHandle]:
    pts = encode_vector(y, method, backend.params, raw=raw)
    if method == "cheetah":
        ct = backend.encrypt_coeff(pts.slots, key_id, scale_exponent=1)
        ct.replication = pts.replication
        return ct

    def enc(pt: Plaintext) -> CiphertextHandle:
        ct = backend.encrypt(pt, key_id)
        ct.replication = pt.replication
        return ct

    return [enc(pt) for pt in pts] if isinstance(pts, list) else enc(pts)


def required_rot_offsets(method: str, m: int, n: int, slot_count: int,
                         eager: bool = False,
                         packed: bool | None = None) -> set[int]:
    """Left-rotation amounts keygen must register for one matmult to run.

    ``packed`` mirrors :func:`predict_complexity`: ``None`` follows the
    auto-packing rule of :func:`encode_for_method`, an explicit bool pins
    the layout (e.g. ``False`` when the caller encodes unpacked diagonals
    by hand for an eager reduction).
    """
    mp, np_ = _pad_pow2(m), _pad_pow2(n)
    slots = slot_count
    offs: set[int] = set()
    if method == "naive":
        offs |= {1 << r for r in range(int(math.log2(np_)))}            # fold
        offs |= {(-r) % slots for r in range(1, mp)}                    # positioning
    elif method == "column" or method == "cheetah":
        pass
    elif method == "gala":
        mn = min(mp, np_)
        m_prime = packed_diagonal_count(mp, np_, slots)
        if packed or (packed is None and m_prime < mp):
            offs |= {(-i) % slots for i in range(1, m_prime)}
        else:
            offs |= {(-i) % slots for i in range(1, mn)}                # product placement
            if mp < np_:
                offs |= {mp << r for r in range(int(math.log2(np_ // mp)))}
    elif method == "hoisted":
        if mp > slots or np_ > slots:
            plan = plan_partition(mp, np_, slots)
            inner = min(plan.block_rows, plan.block_cols)
            offs |= set(range(1, inner))
        else:
            m_prime = packed_diagonal_count(mp, np_, slots)
            use_packed = packed if packed is not None else m_prime < mp
            count = m_prime if use_packed else min(mp, np_)
            offs |= set(range(1, count))
            if eager and not use_packed and mp < np_:
                offs |= {mp << r for r in range(int(math.log2(np_ // mp)))}
    return offs


# ---------------------------------------------------------------------------
# matmult proper
# ---------------------------------------------------------------------------

def _check_vector(y_ct, expected_tag, count: int | None = None) -> None:
    cts = y_ct if isinstance(y_ct, (list, tuple)) else [y_ct]
    if count is not None and len(cts) != count:
        raise ReplicationMismatch(f"expected {count} vector ciphertexts, got {len(cts)}")
    for idx, ct in enumerate(cts):
        tag = expected_tag(idx)
        if getattr(ct, "replication", None) != tag:
            raise ReplicationMismatch(
                f"vector ciphertext {idx} has layout {getattr(ct, 'replication', None)}, "
                f"method needs {tag}"
            )
        if ct.scale_exponent != cts[0].scale_exponent:
            raise ScaleMismatch(
                f"vector ciphertexts at mixed scales "
                f"{ct.scale_exponent} vs {cts[0].scale_exponent}"
            )


def _sum_cts(backend: SimdBackend, cts: list[CiphertextHandle]) -> CiphertextHandle:
    acc = cts[0]
    for ct in cts[1:]:
        acc = backend.o1_add(acc, ct)
    return acc


def _unpacked_reduction_plan(m: int, n: int, orig_m: int, ct_index: int = 0):
    if m >= n:
        return [[(ct_index, k)] for k in range(orig_m)]
    return [[(ct_index, k + s * m) for s in range(n // m)] for k in range(orig_m)]


def _packed_reduction_plan(m_prime: int, n: int, orig_m: int):
    reps = max(1, n // m_prime)
    return [
        [(0, (k // m_prime) * n + (k % m_prime) + s * m_prime) for s in range(reps)]
        for k in range(orig_m)
    ]


def _matmult_naive(enc, y_ct, backend: SimdBackend) -> CiphertextHandle:
    m, n = enc.m, enc.n
    slots = enc.slot_count
    params = backend.params
    rounds = int(math.log2(n))
    parts = []
    for r, row_pt in enumerate(enc.diagonals):
        acc = backend.o2_mult(row_pt, y_ct)
        for rho in range(rounds):
            acc = backend.o1_add(acc, backend.o3_rot(acc, 1 << rho))
        indicator = np.zeros(slots, dtype=np.int64)
        indicator[0] = 1
        acc = backend.o2_mult(Plaintext(indicator, scale_exponent=0), acc)
        if r:
            acc = backend.o3_rot(acc, r, direction="right")
        parts.append(acc)
    return _sum_cts(backend, parts)


def _matmult_column(enc, y_cts, backend: SimdBackend) -> CiphertextHandle:
    parts = [backend.o2_mult(col_pt, y_cts[c]) for c, col_pt in enumerate(enc.diagonals)]
    return _sum_cts(backend, parts)


def _matmult_gala(enc, y_ct, backend: SimdBackend):
    m, n = enc.m, enc.n
    count = len(enc.diagonals)
    parts = [backend.o2_mult(pt, y_ct) for pt in enc.diagonals]
    rotated = [parts[0]] + [
        backend.o3_rot(parts[i], i, direction="right") for i in range(1, count)
    ]
    acc = _sum_cts(backend, rotated)
    if enc.packed:
        m_prime = count
        return PendingResult([acc], _packed_reduction_plan(m_prime, n, enc.orig_m))
    if m < n:  # trailing fold, booked as single-offset hoisted calls
        for rho in range(int(math.log2(n // m))):
            (shifted,) = backend.o4_hst_rot_many(acc, [m << rho])
            acc = backend.o1_add(acc, shifted)
    return acc


def _matmult_hoisted_small(enc, y_ct, backend: SimdBackend, eager: bool):
    m, n = enc.m, enc.n
    count = len(enc.diagonals)
    if count > 1:
        rotated = [y_ct] + backend.o4_hst_rot_many(y_ct, list(range(1, count)))
    else:
        rotated = [y_ct]
    acc = _sum_cts(
        backend, [backend.o2_mult(pt, rotated[i]) for i, pt in enumerate(enc.diagonals)]
    )
    if enc.packed:
        if eager:
            raise LayoutUnsupported("packed layout finalizes in cleartext only")
        return PendingResult([acc], _packed_reduction_plan(count, n, enc.orig_m))
    if eager:
        if m < n:
            for rho in range(int(math.log2(n // m))):
                acc = backend.o1_add(acc, backend.o3_rot(acc, m << rho))
        return acc
    return PendingResult([acc], _unpacked_reduction_plan(m, n, enc.orig_m))


def _matmult_partitioned(enc, y_ct, backend: SimdBackend) -> PendingResult:
    plan = enc.partition
    slots = enc.slot_count
    R, C = plan.row_blocks, plan.col_blocks
    y_cts = y_ct if isinstance(y_ct, (list, tuple)) else [y_ct]
    inner = min(plan.block_rows, plan.block_cols)

    if plan.case == "rows":
        # one hoist group on the single input ct, shared by every row block
        rotated = [y_cts[0]] + backend.o4_hst_rot_many(y_cts[0], list(range(1, inner)))
        outs = [
            _sum_cts(backend, [backend.o2_mult(pt, rotated[i])
                               for i, pt in enumerate(enc.blocks[r].diagonals)])
            for r in range(R)
        ]
        return PendingResult(outs, [[(k // slots, k % slots)] for k in range(enc.orig_m)])

    if plan.case == "cols":
        partials = []
        for c in range(C):
            rot = [y_cts[c]] + (
                backend.o4_hst_rot_many(y_cts[c], list(range(1, inner))) if inner > 1 else []
            )
            partials.append(_sum_cts(
                backend, [backend.o2_mult(pt, rot[i])
                          for i, pt in enumerate(enc.blocks[c].diagonals)]
            ))
        agg = _sum_cts(backend, partials)  # pre-transmission aggregation
        mp = plan.block_rows
        plan_rows = [[(0, k + s * mp) for s in range(slots // mp)] for k in range(enc.orig_m)]
        return PendingResult([agg], plan_rows)

    # grid: hoist once per column block, reuse across the row blocks
    rotated_by_col = [
        [y_cts[c]] + backend.o4_hst_rot_many(y_cts[c], list(range(1, slots)))
        for c in range(C)
    ]
    outs = []
    for r in range(R):
        partials = [
            _sum_cts(backend, [backend.o2_mult(pt, rotated_by_col[c][i])
                               for i, pt in enumerate(enc.blocks[r * C + c].diagonals)])
            for c in range(C)
        ]
        outs.append(_sum_cts(backend, partials))
    return PendingResult(outs, [[(k // slots, k % slots)] for k in range(enc.orig_m)])


def matmult(method: str, enc: DiagonalEncodedMatrix, y_ct, backend: SimdBackend, *,
            eager: bool = False):
    """Run one X . [[y]] product; see module docstring for return shapes."""
    if enc.scheme != method:
        raise EncodingMismatch(f"matrix encoded for {enc.scheme!r}, asked for {method!r}")
    if enc.ciphertext:
        raise LayoutUnsupported("use matmult_encrypted_diagonals for ciphertext matrices")
    n = enc.n
    if method == "naive":
        _check_vector(y_ct, lambda _: ("plain", n), count=1)
        return _matmult_naive(enc, y_ct, backend)
    if method == "column":
        _check_vector(y_ct, lambda c: ("broadcast", c, n), count=n)
        return _matmult_column(enc, y_ct, backend)
    if method == "cheetah":
        _check_vector(y_ct, lambda _: ("coeff", enc.orig_n), count=1)
        prod = backend.coeff_mult_plain(enc.diagonals[0], y_ct)
        return [backend.extract_lwe(prod, result_coeff_index(i, enc.orig_n))
                for i in range(enc.orig_m)]
    if method == "gala":
        _check_vector(y_ct, lambda _: ("replicated", n), count=1)
        if eager and enc.packed:
            raise LayoutUnsupported("packed layout finalizes in cleartext only")
        return _matmult_gala(enc, y_ct, backend)
    if method == "hoisted":
        if enc.partition is not None:
            if eager:
                raise LayoutUnsupported("partitioned layout finalizes in cleartext only")
            cts_in = enc.partition.col_blocks if enc.partition.case != "rows" else 1
            period = n if enc.partition.case == "rows" else enc.slot_count
            _check_vector(y_ct, lambda _: ("replicated", period), count=cts_in)
            return _matmult_partitioned(enc, y_ct, backend)
        _check_vector(y_ct, lambda _: ("replicated", n), count=1)
        return _matmult_hoisted_small(enc, y_ct, backend, eager)
    raise EncodingMismatch(f"unknown method {method!r}; have {METHODS}")


def matmult_encrypted_diagonals(
    enc: DiagonalEncodedMatrix, w: np.ndarray, backend: SimdBackend
) -> list[PendingResult]:
    """Encrypted matrix (as hoisted diagonals) times plaintext matrix columns.

    The rotations all land on the plaintext side (free numpy rolls of w), so
    the ciphertext work per output column is just min(r,c) multiplies and
    their adds — zero O3 and zero O4.
    """
    if not enc.ciphertext:
        raise LayoutUnsupported("expected ciphertext diagonals; matrix is plaintext-encoded")
    if enc.scheme != "hoisted" or enc.packed or enc.partition is not None:
        raise LayoutUnsupported("encrypted-matrix path needs the unpacked diagonal layout")
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    r, c = enc.m, enc.n
    if w.shape[0] != enc.orig_n:
        raise ShapeMismatch(f"inner dims: matrix has {enc.orig_n} columns, w has {w.shape[0]} rows")
    wp = np.zeros((c, w.shape[1]), dtype=np.float64)
    wp[: w.shape[0]] = w
    j = np.arange(enc.slot_count)
    params = backend.params
    outs = []
    for k in range(w.shape[1]):
        parts = []
        for i, ct in enumerate(enc.diagonals):
            rotated_col = Plaintext(_fixed(wp[(i + j) % c, k], params), scale_exponent=1)
            parts.append(backend.o2_mult(rotated_col, ct))
        outs.append(PendingResult([_sum_cts(backend, parts)],
                                  _unpacked_reduction_plan(r, c, enc.orig_m)))
    return outs


# ---------------------------------------------------------------------------
# cleartext-side reductions
# ---------------------------------------------------------------------------

def finalize_lazy_ras(slot_vectors: Sequence[np.ndarray], plan, modulus: int | None = None):
    """Sum the slots each output names; the cleartext half of lazy RaS."""
    vectors = [np.asarray(v) for v in slot_vectors]
    out = []
    for k, sources in enumerate(plan):
        total = 0
        for ct_idx, slot in sources:
            if ct_idx >= len(vectors) or slot >= len(vectors[ct_idx]):
                raise PlanMismatch(f"output {k} references ({ct_idx}, {slot})")
            total += vectors[ct_idx][slot]
        out.append(total % modulus if modulus else total)
    dtype = np.int64 if modulus else vectors[0].dtype
    return np.asarray(out, dtype=dtype)


def inverse_ras_cleartext(v: np.ndarray, rounds: int, rng: np.random.Generator, *,
                          slot_count: int, modulus: int) -> np.ndarray:
    """Split each element into 2^rounds random addends, interleaved so the
    ciphertext term's rotate-and-sum plan reconstructs v exactly.

    One round turns [M0, M1] into [M00, M10, M01, M11] with M0 = M00 + M01 and
    M1 = M10 + M11; the split halves occupy slots k and k + len.
    """
    v = np.asarray(v, dtype=np.int64) % modulus
    if len(v) << rounds > slot_count:
        raise CapacityExceeded(f"{len(v)} * 2^{rounds} exceeds {slot_count} slots")
    for _ in range(rounds):
        first = rng.integers(0, modulus, size=len(v), dtype=np.int64)
        second = (v - first) % modulus
        v = np.concatenate([first, second])
    return v


# ---------------------------------------------------------------------------
# transposed-encoding conversion
# ---------------------------------------------------------------------------

def transpose_diag_convert(enc: DiagonalEncodedMatrix, backend: SimdBackend | None = None
                           ) -> DiagonalEncodedMatrix:
    """Turn diagonals of X into diagonals of X^T using only rotations.

    Diagonal i of X^T is diagonal (min-i) mod min of X rotated left by
    delta_i (0 for i=0; i when m >= n; n-m+i otherwise) — an exact identity,
    so no alignment metadata is needed downstream. For ciphertext diagonals
    each source is a different ciphertext, so the min-1 rotations cannot share
    hoisting and are booked as plain O3.
    """
    if enc.scheme != "hoisted" or enc.packed or enc.partition is not None:
        raise LayoutUnsupported("conversion defined for the unpacked diagonal layout")
    m, n = enc.m, enc.n
    count = len(enc.diagonals)

    def delta(i: int) -> int:
        if i == 0:
            return 0
        return i if m >= n else n - m + i

    converted = []
    for i in range(count):
        src = enc.diagonals[(count - i) % count]
        d = delta(i)
        if enc.ciphertext:
            converted.append(backend.o3_rot(src, d) if d else src)
        else:
            converted.append(Plaintext(np.roll(src.slots, -d), src.scale_exponent))
    return DiagonalEncodedMatrix(
        "hoisted", n, m, enc.orig_n, enc.orig_m, enc.slot_count,
        diagonals=converted, ciphertext=enc.ciphertext,
    )


# ---------------------------------------------------------------------------
# closed-form predictor
# ---------------------------------------------------------------------------

def predict_complexity(method: str, m: int, n: int, slot_count: int, *,
                       packed: bool | None = None, eager: bool = False,
                       ring_degree: int | None = None) -> ComplexityPrediction:
    """Exact operation/traffic counts matmult will incur for these sizes.

    `packed=None` mirrors the dispatcher (partition when oversized, packed
    when slots would go vacant); True/False force a variant.
    """
    if method == "cheetah":
        return ComplexityPrediction(0, 1, 0, 0, (1, "rlwe_ct"), (m, "lwe_ct_batch"))
    mp, np_ = _pad_pow2(m), _pad_pow2(n)
    s = slot_count
    if method == "naive":
        logn = int(math.log2(np_))
        return ComplexityPrediction(
            mp * logn + mp - 1, 2 * mp, mp * logn + mp - 1, 0, (1, "rlwe_ct"), (1, "rlwe_ct")
        )
    if method == "column":
        return ComplexityPrediction(np_ - 1, np_, 0, 0, (np_, "rlwe_ct"), (1, "rlwe_ct"))
    if method not in ("gala", "hoisted"):
        raise EncodingMismatch(f"unknown method {method!r}; have {METHODS}")

    oversized = mp > s or np_ > s
    if oversized and method == "hoisted":
        plan = plan_partition(mp, np_, s)
        if plan.case == "rows":
            return ComplexityPrediction(
                (mp * np_ - mp) // s, mp * np_ // s, 0, np_ - 1,
                (1, "rlwe_ct"), (mp // s, "rlwe_ct"),
            )
        if plan.case == "cols":
            return ComplexityPrediction(
                (mp * np_ - s) // s, mp * np_ // s, 0, (mp * np_ - np_) // s,
                (np_ // s, "rlwe_ct"), (1, "rlwe_ct"),
            )
        return ComplexityPrediction(
            (mp * np_ - mp) // s, mp * np_ // s, 0, np_ * (s - 1) // s,
            (np_ // s, "rlwe_ct"), (mp // s, "rlwe_ct"),
        )

    m_prime = packed_diagonal_count(mp, np_, s)
    use_packed = (m_prime < mp) if packed is None else packed
    if use_packed:
        if method == "gala":
            return ComplexityPrediction(
                m_prime - 1, m_prime, m_prime - 1, 0, (1, "rlwe_ct"), (1, "rlwe_ct")
            )
        return ComplexityPrediction(
            m_prime - 1, m_prime, 0, m_prime - 1, (1, "rlwe_ct"), (1, "rlwe_ct")
        )
    mn = min(mp, np_)
    lam = int(math.log2(np_ // mp)) if mp < np_ else 0
    if method == "gala":
        return ComplexityPrediction(
            mn - 1 + lam, mn, mn - 1, lam, (1, "rlwe_ct"), (1, "rlwe_ct")
        )
    if eager:
        return ComplexityPrediction(
            mn - 1 + lam, mn, lam, mn - 1, (1, "rlwe_ct"), (1, "rlwe_ct")
        )
    return ComplexityPrediction(mn - 1, mn, 0, mn - 1, (1, "rlwe_ct"), (1, "rlwe_ct"))
