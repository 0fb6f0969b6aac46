"""Exception vocabulary shared across the engine."""


class VltError(Exception):
    """Base class for all engine errors."""


class UnknownElement(VltError):
    """An element id was referenced that does not exist in the design."""


class MinSizeViolation(VltError):
    """An operation would shrink an element below the 1-unit minimum."""


class LockedPropertyViolation(VltError):
    """A nonzero delta was applied to a locked geometry property."""


class MalformedXml(VltError):
    """The input could not be parsed as XML."""


class MissingCanvasSize(VltError):
    """The root svg element has no resolvable width/height or viewBox."""


class UnsupportedTransform(VltError):
    """A transform with a rotation/skew part (or zero scale) was found."""


class MissingFragment(VltError):
    """Serialization was asked for an element with no source fragment."""


class UnmatchedElement(VltError):
    """An operation required a correspondence partner that does not exist."""


class NotAChain(VltError):
    """Selected elements do not form a disjoint chain along the axis."""


class InfeasibleRule(VltError):
    """No transformation can satisfy the rule under the current locks."""


class UnknownCommand(VltError):
    """The gateway received a command tag it does not understand."""


class DesignInputError(VltError):
    """A design failed to load; remembers which one ('A' or 'B')."""

    def __init__(self, design: str, cause: VltError):
        super().__init__(f"design {design}: {cause}")
        self.design = design
        self.cause = cause
