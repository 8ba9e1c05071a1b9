"""Torus quotients of T*C^n: exact stability, Kempf-Ness and hyperkahler reduction."""

from ._hkq import *  # noqa: F401,F403
from ._hkq import __doc__  # noqa: F401
