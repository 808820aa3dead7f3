"""amenlab: a computational laboratory for amenability-style group theory.

Folner sets and isoperimetry, random-walk spectral radii, cogrowth,
self-similar tree automorphism groups, paradoxical decompositions,
Garden-of-Eden cellular automata, and a minimal substitution-subshift
full-group toolkit, with exact-arithmetic oracles wherever possible.
"""

__version__ = "0.1.0"

from .errors import CapExceeded, ValidationError

__all__ = ["CapExceeded", "ValidationError", "__version__"]
