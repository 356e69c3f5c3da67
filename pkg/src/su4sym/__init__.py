"""Exceptional quantum symmetries of SU(4) at levels 4, 6 and 8.

Exact-arithmetic toolkit: conformal embeddings of SU(4) into Spin(15),
SU(10) and Spin(20), the exceptional modular invariants they induce,
the modular-splitting and intertwining equations, and the quantum
graphs E4, E6, E8 with their characteristic numbers.
"""

__version__ = "0.1.0"
