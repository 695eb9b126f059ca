"""lerwlab: loop-erased random walk and SLE(2) simulation toolkit.

Samplers for chordal LERW on lattice domains, exact small-domain oracles,
numerical conformal maps and Loewner machinery, SLE trace generation,
Minkowski-content estimation, and a scripted experiment harness for the
quantitative scaling laws relating the two models.
"""

__version__ = "0.1.0"
