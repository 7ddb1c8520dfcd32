"""Typing social bots (general, news, bridging) in a tweet corpus and profiling them.

Modules follow the pipeline order: :mod:`corpus`, :mod:`geo`, :mod:`botdetect`,
:mod:`newsbot`, :mod:`netgraph`, :mod:`topics`, :mod:`maneuvers`, then
:mod:`reports`, :mod:`pipeline` and :mod:`cli`.
"""

__version__ = "0.1.0"
