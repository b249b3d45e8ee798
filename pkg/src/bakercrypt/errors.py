"""Exception hierarchy.

Errors are grouped by what went wrong so the CLI can map each group onto a
distinct exit status: key problems, malformed or unsupported input files, and
everything else that indicates misuse of the library.
"""


class BakerCryptError(Exception):
    """Base class for all errors raised by this package."""


# key material


class KeyMaterialError(BakerCryptError):
    """Invalid key material or key file."""


class OutOfRange(KeyMaterialError):
    pass


class FixedPointSeed(KeyMaterialError):
    pass


class KeyFileError(KeyMaterialError):
    pass


# file formats


class FormatError(BakerCryptError):
    """An input byte stream could not be parsed or re-encoded."""


class UnsupportedJpeg(FormatError):
    pass


class CorruptStream(FormatError):
    pass


class EncodingOverflow(FormatError):
    pass


class CorruptGif(FormatError):
    pass


class EncodingError(FormatError):
    pass


# engine and metrics


class InfeasiblePartition(BakerCryptError):
    pass


class DimensionMismatch(BakerCryptError):
    pass


class KeystreamExhausted(BakerCryptError):
    pass


class BadModulus(BakerCryptError):
    pass


class ShapeMismatch(BakerCryptError):
    pass


class LengthMismatch(BakerCryptError):
    pass


class DegenerateVariance(BakerCryptError):
    pass


class InsufficientBits(BakerCryptError):
    pass
