"""Rank-based sparse anomaly detection across referentials."""

try:
    from ._rankhc import *  # noqa: F401,F403
except ImportError:  # extension on sys.path rather than inside the package
    from _rankhc import *  # noqa: F401,F403
