"""Exact and numeric tools for vector-valued modular forms on orthogonal groups O(2, n).

Modules: ``lattice`` (quadratic lattices, isotropic flags, cusp lattices),
``schur`` (orthogonal Schur functor spaces), ``domain`` (tube domain and
factors of automorphy), ``fourier`` (Fourier expansions and their
symmetries), ``operators`` (Siegel, Fourier–Jacobi, Witt restriction,
quasi-pullback, Rankin–Cohen), ``jfilt`` (the J-filtration),
``petersson`` (metrics and weight predicates) and ``cli``.
"""
__version__ = "0.1.0"

from .errors import OrthMFError  # noqa: E402
from .lattice import find_isotropic_flag, new_lattice  # noqa: E402
from .schur import partition, schur_space  # noqa: E402

__all__ = ["__version__", "OrthMFError", "find_isotropic_flag", "new_lattice", "partition", "schur_space"]
