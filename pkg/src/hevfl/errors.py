"""Exception hierarchy for the whole package.

Everything raises subclasses of :class:`HevflError` so callers can catch one
base type. Names describe the violated precondition.
"""


class HevflError(Exception):
    pass


# ---------------------------------------------------------------- simd layer

class VectorTooLong(HevflError):
    """More cleartext values than available slots."""


class OverflowAtScale(HevflError):
    """A value does not fit the plain modulus at the requested scale."""


class ScaleMismatch(HevflError):
    """Operands carry different fixed-point scale exponents."""


class SlotCountMismatch(HevflError):
    """Operands come from parameter sets with different slot counts."""


class LevelExhausted(HevflError):
    """No multiplication level left on a ciphertext."""


class OffsetOutOfRange(HevflError):
    """Rotation offset outside [0, slot_count)."""


class ScopeNotOpen(HevflError):
    """measure() called for a scope that was never opened."""


class KeyMismatch(HevflError):
    """Ciphertexts under different keys combined, or decrypted with the wrong key."""


# ---------------------------------------------------------------- rlwe layer

class BadModulus(HevflError):
    """Plain modulus does not satisfy the batching congruence t == 1 (mod 2N)."""


class ModulusMismatch(HevflError):
    """Ring elements over different coefficient moduli."""


class MissingGaloisKey(HevflError):
    """Rotation requested for an offset that keygen did not register."""


class MatrixTooLarge(HevflError):
    """Coefficient packing needs m*n <= N."""


class IndexOutOfRange(HevflError):
    """Coefficient index outside [0, N)."""


# ------------------------------------------------------------- matmult layer

class OperandTooLarge(HevflError):
    """Matrix dimension exceeds the slot count; use partitioning."""


class PackingNotApplicable(HevflError):
    """Input packing has no vacancy to exploit (ceil(mn/N') == m)."""


class PartitionNotRequired(HevflError):
    """Both dimensions already fit in one ciphertext."""


class EncodingMismatch(HevflError):
    """Encoded matrix scheme does not match the requested method."""


class ReplicationMismatch(HevflError):
    """Encrypted vector layout does not match what the method expects."""


class PlanMismatch(HevflError):
    """Reduction plan inconsistent with the supplied decrypted vectors."""


class CapacityExceeded(HevflError):
    """Inverse rotate-and-sum would need more slots than exist."""


class LayoutUnsupported(HevflError):
    """Operation defined only for unpacked diagonal layouts."""


class ShapeMismatch(HevflError):
    """Matrix/vector dimensions incompatible."""


class MissingConvertedTranspose(HevflError):
    """Backward pass invoked before the idle-time transpose conversion ran."""


# -------------------------------------------------------------- netsim layer

class ChannelClosed(HevflError):
    pass


class IncompleteTranscript(HevflError):
    """Transcript audit needs a terminated iteration record."""


# ----------------------------------------------------------------- cli layer

class DatasetMissing(HevflError):
    pass


class ConfigInvalid(HevflError):
    pass


class IoFailure(HevflError):
    pass
