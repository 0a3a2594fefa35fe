"""Exact relational engine for odd-prime and qubit stabilizer circuits.

Everything is a finite object: states, channels and codes are affine
subspaces of vector spaces over the prime field F_p, and wiring circuits
together is relational composition.  The layers build on each other:

* ``linalg``     -- exact Gaussian elimination, kernels and solvers mod p.
* ``relation``   -- affine relations between F_p spaces and their calculus.
* ``symplectic`` -- the symplectic form, subspace classification and
                    circuit dilations of coisotropic subspaces.
* ``doubled``    -- quantum/classical string-diagram generators whose
                    semantics are affine relations on doubled phase space.
* ``diagram``    -- a small text format for such diagrams plus evaluation.
* ``qec``        -- stabilizer codes, syndrome extraction and correction.
* ``cli``        -- the ``stabrel`` command line tool.
"""

from .linalg import Subspace, inv_mod, nullspace_mod, rref_mod, solve_mod
from .relation import AffineRelation
from .symplectic import Dilation, Gate, GradedSubspace, classify, dilation, omega
from .doubled import GradedRelation
from .diagram import Diagram, DiagramError, evaluate, parse, parse_file
from .qec import (
    CorrectionTable,
    StabilizerCode,
    affine_correction_protocol,
    code_from_subspace,
    parse_code_file,
    parse_subspace_file,
    syndrome,
    undetectable,
    verify_correction,
)

__version__ = "0.1.0"

__all__ = [
    "AffineRelation",
    "CorrectionTable",
    "Diagram",
    "DiagramError",
    "Dilation",
    "Gate",
    "GradedRelation",
    "GradedSubspace",
    "StabilizerCode",
    "Subspace",
    "affine_correction_protocol",
    "classify",
    "code_from_subspace",
    "dilation",
    "evaluate",
    "inv_mod",
    "nullspace_mod",
    "omega",
    "parse",
    "parse_code_file",
    "parse_file",
    "parse_subspace_file",
    "rref_mod",
    "solve_mod",
    "syndrome",
    "undetectable",
    "verify_correction",
    "__version__",
]
