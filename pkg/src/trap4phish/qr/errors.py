class QrError(Exception):
    pass


class PayloadTooLong(QrError):
    pass


class NoFinderPatterns(QrError):
    """Could not locate three 1:1:3:1:1 finder patterns."""


class FormatUnrecoverable(QrError):
    """Neither format-information copy decodes within BCH distance."""


class RsFailure(QrError):
    """Codeword errors exceed the Reed-Solomon correction capacity."""


class UnsupportedMode(QrError):
    """Segment mode other than byte mode (or malformed bitstream)."""


class BadBitmap(QrError):
    """Bitmap is not a readable grid (wrong geometry or unreadable size)."""
