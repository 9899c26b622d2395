"""Exact Magnus expansions and Johnson homomorphism lifts on marked fatgraphs."""

__version__ = "0.1.0"
