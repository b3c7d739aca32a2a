"""Exception taxonomy shared across the package.

Everything raised on bad data derives from RaycutError so the CLI can map
"data problem" to one exit code; plain OSError is left alone and means
"I/O problem".
"""


class RaycutError(Exception):
    """Base class for all data/domain errors raised by this package."""


class MalformedHeader(RaycutError):
    """NRRD header is missing required fields, duplicated, or unparseable."""


class UnsupportedDimension(RaycutError):
    """NRRD dimension is not 3."""


class UnsupportedEncoding(RaycutError):
    """NRRD encoding is not raw or gzip."""


class UnsupportedType(RaycutError):
    """NRRD scalar type outside the supported set."""


class SizeMismatch(RaycutError):
    """Decoded NRRD payload length does not match sizes * item size."""


class NonAxisAlignedDirections(RaycutError):
    """NRRD space directions carry rotation or axis flips; resampling is out of scope."""


class NonFiniteData(RaycutError):
    """Volume payload contains NaN or infinite intensities."""


class SeedOutsideVolume(RaycutError):
    """Seed point is not strictly inside the volume bounds."""


class SubdivTooLarge(RaycutError):
    """Icosphere subdivision level above the supported maximum."""


class MalformedCut(RaycutError):
    """Cut partition violates the per-ray prefix property; indicates a solver bug."""


class DegenerateMesh(RaycutError):
    """Surface mesh has zero-area triangles beyond tolerance."""


class GeometryMismatch(RaycutError):
    """Two masks disagree on dims, spacing, or origin."""


class EmptyInput(RaycutError):
    """An aggregate was requested over zero rows."""
