"""Evaluation testbed for SMILES-based molecule generators."""

__version__ = "0.1.0"

from .errors import InvalidMolecule, ParseError  # noqa: F401
from .molgraph import Atom, Bond, Molecule, sanitize  # noqa: F401
from .smiles import CanonicalSmiles, canonicalize, parse, write  # noqa: F401
