"""Exact computer algebra for graded vertex algebras on the torus.

Subpackages cover, bottom up: exact coefficient rings (coeffring), elliptic
kernels as formal q-series (elliptic), graded vertex algebras with round and
square bracket structures (vertex, zhu), classical finiteness complexes
(classical), chiral chain complexes and their differentials (chiral), and
degree-one trace functionals (traces).  The ``chiralis`` command line tool
lives in cli.
"""

__version__ = "0.1.0"
