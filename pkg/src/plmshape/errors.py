"""Exception types raised across the package.

Every controlled failure maps to one of these classes so callers can
distinguish bad inputs from bugs; nothing here carries state beyond the
message (plus a line number for parse errors).
"""

from __future__ import annotations


class PlmShapeError(Exception):
    """Base class for all errors raised by this package."""


# --- PDB parsing ---

class MalformedRecord(PlmShapeError):
    """An ATOM record too short to hold coordinates, or with non-numeric ones."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NoAtoms(PlmShapeError):
    """Input contained no ATOM records at all."""


class TooShort(PlmShapeError):
    """A chain with fewer than two residues cannot form a curve."""


# --- curves / SRV ---

class ZeroCurve(PlmShapeError):
    """All derivatives vanish; the SRV representation cannot be normalized."""


# --- shape space ---

class DimensionMismatch(PlmShapeError):
    """Operands disagree in sample count or ambient dimension."""


class AntipodalPoints(PlmShapeError):
    """Log map is undefined between (near-)antipodal points on the sphere."""


# --- manifold statistics ---

class EmptyInput(PlmShapeError):
    """An operation that needs a population received too few shapes."""


# --- graph filtrations ---

class KTooLarge(PlmShapeError):
    """Requested neighbor count exceeds L - 1 (or the stored k_max)."""


class SizeMismatch(PlmShapeError):
    """Filtrations over point clouds of different sizes cannot be compared."""


class LengthMismatch(PlmShapeError):
    """Embedding row count disagrees with the structure's residue count."""


# --- dataset I/O ---

class BadMagic(PlmShapeError):
    """Not an NPY file, or an unsupported NPY version."""


class UnsupportedDtype(PlmShapeError):
    """NPY element type is not little-endian IEEE float32/float64."""


class UnsupportedOrder(PlmShapeError):
    """Fortran-ordered NPY payloads are rejected."""


class NotTwoDimensional(PlmShapeError):
    """Embedding tensors must be 2-D (residues x model dimension)."""


class TruncatedData(PlmShapeError):
    """NPY payload shorter than the header-declared shape requires."""


class SchemaError(PlmShapeError):
    """Manifest JSON does not match the expected schema."""


class MissingFile(PlmShapeError):
    """A path referenced by the manifest does not exist."""
