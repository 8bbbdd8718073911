"""Fiber products of free groups over finite perfect quotients.

Word algebra, coset enumeration, Reidemeister-Schreier rewriting, exact
integer linear algebra, low-dimensional group homology and nilpotent
quotients, glued together by a pipeline that builds the free central
extension of F x_Q F and certifies its lower-central-series anomaly.
"""

__version__ = "0.1.0"
