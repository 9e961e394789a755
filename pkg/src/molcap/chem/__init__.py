from .smiles import (
    AROMATIC_ORGANIC,
    BondOrder,
    ELEMENTS,
    LexError,
    MolGraph,
    N_ATOM_FEATURES,
    N_BOND_ORDERS,
    ORGANIC_SUBSET,
    ParseError,
    SmilesError,
    SmilesToken,
    UnsupportedElementError,
    dump_graph,
    parse_smiles,
    relabel_graph,
    smiles_to_graph,
    tokenize_smiles,
)
from .smiles import Atom, Bond, CHARGE_BUCKETS, MAX_DEGREE

__all__ = [
    "AROMATIC_ORGANIC", "Atom", "Bond", "BondOrder", "CHARGE_BUCKETS", "ELEMENTS",
    "LexError", "MAX_DEGREE", "MolGraph", "N_ATOM_FEATURES", "N_BOND_ORDERS",
    "ORGANIC_SUBSET", "ParseError", "SmilesError", "SmilesToken",
    "UnsupportedElementError", "dump_graph", "parse_smiles", "relabel_graph",
    "smiles_to_graph", "tokenize_smiles",
]
