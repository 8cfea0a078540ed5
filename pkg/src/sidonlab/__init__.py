"""Numerical companion for Sidon constants of Dirichlet polynomials.

Submodules: ``ntheory`` (sieve, rough and smooth counts), ``dickman``
(Dickman's rho), ``dirichlet`` (polynomials, Bohr lift, norms), ``torus``
(certified sup search), ``inequalities`` (coefficient inequalities),
``bounds`` (explicit envelopes and certificates), ``sidon`` (certified
lower bounds on small supports) and ``cli``.
"""

from .errors import BoundOverflowWarning, DomainError

__version__ = "0.1.0"

__all__ = ["DomainError", "BoundOverflowWarning", "__version__"]
