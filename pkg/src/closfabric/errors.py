"""Exception types shared across the package."""


class FabricError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(FabricError, ValueError):
    """A fabric or topology spec violates its structural invariants."""


class InvalidRequest(FabricError, ValueError):
    """A connection request is malformed or impossible for the fabric."""


class InvalidInput(FabricError, ValueError):
    """A numeric argument is outside its admissible range."""


class InvalidConfig(FabricError, ValueError):
    """A simulation or scenario configuration is malformed."""


class UnknownFiber(FabricError, KeyError):
    """A fiber reference does not exist in the fabric."""


class UnknownConnection(FabricError, KeyError):
    """A connection id is not present in the fabric."""


class ResourceConflict(FabricError):
    """An apply would double-book an occupied (fiber, wavelength) slot."""


class NoSplitterSpine(FabricError):
    """A multicast admission was attempted on a fabric with no splitter spine."""


class IndexOutOfRange(FabricError, IndexError):
    """A spine or element index is outside the topology."""
