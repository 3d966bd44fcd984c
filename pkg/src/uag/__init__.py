"""Universal algebraic geometry over finite algebras and the (N, g_n) example."""

from __future__ import annotations

from .report import VERSION as __version__

__all__ = ["__version__"]
