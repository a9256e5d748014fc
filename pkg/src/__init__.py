"""
Chopper - analysis of calling context tree profiles from parallel programs
"""

from .profile import CallGraph, Frame, ProfileFrame

__version__ = '1.0.0'
__all__ = ['CallGraph', 'Frame', 'ProfileFrame', ]
