"""Exact symbolic toolkit for opers, Miura transformations, KdV Lax flows,
their Poisson structures, the critical-level sl_2 free-field module and the
q-deformed analogues."""

__version__ = "0.1.0"
