"""Typed error hierarchy shared by the library, the service, and the CLI.

Every domain error carries a stable integer ``code`` so that the CLI can map
it to a process exit status and the HTTP service can report it in a response
body.  Codes are part of the public contract; do not renumber.
"""

from __future__ import annotations


class HolotetError(Exception):
    """Base class for all domain errors."""

    code = 10

    def __init__(self, message: str, **data):
        super().__init__(message)
        self.data = data


class InputDocumentError(HolotetError):
    """Malformed or inconsistent input document (parse/shape problems)."""

    code = 2


# --- lorentz core -----------------------------------------------------------

class ModelMismatch(HolotetError):
    code = 11


class NotSymmetric(HolotetError):
    code = 12


class InertiaMismatch(HolotetError):
    code = 13


class DegenerateGram(HolotetError):
    code = 14


# --- vector holonomies ------------------------------------------------------

class MetricViolation(HolotetError):
    code = 20


class DetViolation(HolotetError):
    code = 21


class OrientationViolation(HolotetError):
    code = 22


class NullAxis(HolotetError):
    code = 23


class NonNullGenerator(HolotetError):
    code = 24


class CentralHolonomy(HolotetError):
    code = 25


# --- spin holonomies --------------------------------------------------------

class ZeroGenerator(HolotetError):
    code = 30


class LiftFailure(HolotetError):
    code = 31


class NotClosing(HolotetError):
    code = 32


# --- reconstruction pipeline ------------------------------------------------

class ClosureViolation(HolotetError):
    code = 40


class ExceptionalEntryMismatch(HolotetError):
    code = 41


class ZeroTriple(HolotetError):
    code = 42


class FlatOrDegenerate(HolotetError):
    code = 43


class InadmissibleParabolicBranch(HolotetError):
    code = 44


class WrongCausalVertexLine(HolotetError):
    code = 45


# --- forward map ------------------------------------------------------------

class DegeneratePair(HolotetError):
    code = 50


class NullFace(HolotetError):
    code = 51


# --- compact real form ------------------------------------------------------

class NotRotation(HolotetError):
    code = 60
