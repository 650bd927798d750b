"""Generalized binomial edge ideals of fan-type graphs: constructions,
closed-form invariants and an exact algebra oracle."""

__version__ = "0.1.0"
KERNEL_VERSION = "2"
