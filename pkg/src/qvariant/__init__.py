"""
qvariant - q-difference equations of q-hypergeometric and q-Heun type
"""

__version__ = "0.1.0"

from qvariant.config import RunConfig

__all__ = ["RunConfig", "__version__"]
