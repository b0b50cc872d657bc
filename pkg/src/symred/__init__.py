"""Symanzik polynomials, polynomial reduction and rooted graph minors."""

__version__ = "0.1.0"
