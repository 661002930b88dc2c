"""Element data: supported set, valence tables, atomic weights."""

from __future__ import annotations

# Elements the molecule model accepts.  The first group may appear bare in
# SMILES (organic subset); the second group only inside brackets.
ORGANIC_SUBSET = {"B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I"}
BRACKET_ONLY = {"Si", "Se", "As", "H"}
SUPPORTED_ELEMENTS = ORGANIC_SUBSET | BRACKET_ONLY

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_CAPABLE = {"B", "C", "N", "O", "P", "S", "Se", "As"}

ATOMIC_NUMBER = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "Si": 14, "P": 15,
    "S": 16, "Cl": 17, "As": 33, "Se": 34, "Br": 35, "I": 53,
}
SYMBOL_BY_NUMBER = {v: k for k, v in ATOMIC_NUMBER.items()}

# IUPAC 2021 standard atomic weights (conventional values).
ATOMIC_WEIGHT = {
    "H": 1.008, "B": 10.811, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998, "Si": 28.085, "P": 30.974, "S": 32.06, "Cl": 35.45,
    "As": 74.922, "Se": 78.971, "Br": 79.904, "I": 126.904,
}

# Allowed valences for the neutral element, lowest first.
_NEUTRAL_VALENCES = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "As": (3, 5),
    "Se": (2, 4, 6),
    "Br": (1,),
    "I": (1,),
}

# Periodic-table group drives how formal charge shifts the valence table:
# group 13 gains a bonding slot per negative charge (borate), group 14 loses
# one per unit of either sign (carbocation/carbanion), groups 15-17 shift
# with the sign of the charge (ammonium, oxyanion).
_GROUP = {
    "H": 1, "B": 13, "C": 14, "Si": 14, "N": 15, "P": 15, "As": 15,
    "O": 16, "S": 16, "Se": 16, "F": 17, "Cl": 17, "Br": 17, "I": 17,
}

MAX_FORMAL_CHARGE = 4


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...]:
    """Allowed total valences for an element at a given formal charge."""
    base = _NEUTRAL_VALENCES[element]
    if charge == 0:
        return base
    group = _GROUP[element]
    if group == 13:
        shift = -charge
    elif group == 14:
        shift = -abs(charge)
    else:
        shift = charge
    vals = tuple(sorted(v + shift for v in base if v + shift >= 0))
    return vals if vals else (0,)


def default_valence(element: str, charge: int = 0) -> int:
    """Smallest allowed valence; basis of the implicit-hydrogen rule."""
    return allowed_valences(element, charge)[0]
