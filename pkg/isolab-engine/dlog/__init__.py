"""
Isolab Discrete Log Package
"""

from .bsgs import DlogInstance, dlog_bsgs
from .reduce import random_reduce, transport

__all__ = ["DlogInstance", "dlog_bsgs", "random_reduce", "transport"]
