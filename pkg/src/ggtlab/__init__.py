"""Desk-scale computations on groups acting on trees and coned-off spaces."""

__version__ = "0.1.0"
