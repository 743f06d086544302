"""Homology exponents of H-spaces via mod-2 cohomology of Eilenberg-Mac Lane spaces.

Modules:
    steenrod  Steenrod words and their Adem normal form
    eml       spaces with their Serre generators and Steenrod action
    hopf      primitives and indecomposables of truncated Hopf algebras
    bss       Bockstein pages and the torsion they detect
    classify  exponent verdicts from homotopy groups
    cli       the ``homexp`` command
"""

__version__ = "0.1.0"
