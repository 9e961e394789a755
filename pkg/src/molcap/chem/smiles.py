"""SMILES lexing, parsing, and molecular graph construction.

Supported subset: organic-subset atoms, bracket atoms, branches, ring
closures (single digit and %NN), explicit bond orders, and aromatic
lowercase atoms. Stereo markers (/ \\ @) and isotopes/H-counts inside
brackets are accepted and ignored. No valence checking and no implicit
hydrogens: the graphs feed a learned encoder, not a chemistry kernel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class SmilesError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class LexError(SmilesError):
    pass


class ParseError(SmilesError):
    pass


class UnsupportedElementError(ValueError):
    def __init__(self, symbol: str):
        super().__init__(f"unsupported element symbol {symbol!r}")
        self.symbol = symbol


# Elements that may appear bare (outside brackets); two-letter first so the
# lexer munches maximally ("Cl" is one atom, never C + l).
ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")

# Element table backing the integer element-id feature. Bracket atoms may
# name any of these; anything else is an unsupported-element error.
ELEMENTS = (
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "K", "Ca",
    "Ti", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Sr", "Zr", "Mo", "Ru", "Rh", "Pd", "Ag",
    "Cd", "Sn", "Sb", "Te", "I", "Ba", "W", "Pt", "Au", "Hg", "Pb", "Bi",
)
_ELEMENT_IDS = {symbol: i for i, symbol in enumerate(ELEMENTS)}

# Atom feature columns: element id, degree, formal charge bucket, aromatic flag.
N_ATOM_FEATURES = 4
CHARGE_BUCKETS = 5  # charges clamped to [-2, +2] then shifted to [0, 4]
MAX_DEGREE = 8

BOND_CHARS = {"-", "=", "#", ":", "/", "\\"}


class BondOrder(IntEnum):
    SINGLE = 0
    DOUBLE = 1
    TRIPLE = 2
    AROMATIC = 3


N_BOND_ORDERS = len(BondOrder)

_BOND_CHAR_ORDER = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,   # stereo direction ignored
    "\\": BondOrder.SINGLE,  # stereo direction ignored
}


@dataclass
class SmilesToken:
    kind: str  # atom | bracket_atom | bond | branch_open | branch_close | ring_digit | ring_two_digit
    text: str
    position: int


@dataclass
class Atom:
    element: str
    formal_charge: int = 0
    is_aromatic: bool = False
    degree: int = 0
    index: int = 0


@dataclass
class Bond:
    i: int
    j: int
    order: BondOrder


@dataclass
class MolGraph:
    atoms: list = field(default_factory=list)
    bonds: list = field(default_factory=list)
    atom_features: np.ndarray = None
    bond_features: np.ndarray = None

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    def neighbors(self) -> list:
        """Adjacency lists as (neighbor index, bond index) pairs."""
        adj = [[] for _ in self.atoms]
        for b_idx, bond in enumerate(self.bonds):
            adj[bond.i].append((bond.j, b_idx))
            adj[bond.j].append((bond.i, b_idx))
        return adj


def tokenize_smiles(s: str) -> list[SmilesToken]:
    """Maximal-munch lexing of a SMILES string.

    Concatenating the token texts in order reproduces the input exactly.
    """
    if not s:
        raise LexError("empty SMILES string", 0)
    tokens = []
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch == "[":
            end = s.find("]", i)
            if end < 0:
                raise LexError("unterminated bracket atom", i)
            tokens.append(SmilesToken("bracket_atom", s[i:end + 1], i))
            i = end + 1
        elif s[i:i + 2] in ORGANIC_SUBSET:
            tokens.append(SmilesToken("atom", s[i:i + 2], i))
            i += 2
        elif ch in ORGANIC_SUBSET or ch in AROMATIC_ORGANIC:
            tokens.append(SmilesToken("atom", ch, i))
            i += 1
        elif ch in BOND_CHARS:
            tokens.append(SmilesToken("bond", ch, i))
            i += 1
        elif ch == "(":
            tokens.append(SmilesToken("branch_open", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(SmilesToken("branch_close", ch, i))
            i += 1
        elif ch.isdigit():
            tokens.append(SmilesToken("ring_digit", ch, i))
            i += 1
        elif ch == "%":
            if i + 2 >= n or not (s[i + 1].isdigit() and s[i + 2].isdigit()):
                raise LexError("'%' must be followed by two ring digits", i)
            tokens.append(SmilesToken("ring_two_digit", s[i:i + 3], i))
            i += 3
        else:
            raise LexError(f"unknown character {ch!r}", i)
    return tokens


# [isotope][symbol][chirality][H-count][charge]; isotope, chirality, and
# H-count are accepted and discarded.
_BRACKET_RE = re.compile(
    r"\[(?P<isotope>\d*)"
    r"(?P<symbol>[A-Z][a-z]?|as|se|[bcnops])"
    r"(?P<chiral>@{0,2})"
    r"(?P<hcount>H\d*)?"
    r"(?P<charge>\+\d+|-\d+|\++|-+)?"
    r"\]"
)


def _parse_bracket_atom(token: SmilesToken) -> Atom:
    m = _BRACKET_RE.fullmatch(token.text)
    if m is None:
        raise ParseError(f"malformed bracket atom {token.text!r}", token.position)
    symbol = m.group("symbol")
    aromatic = symbol[0].islower()
    element = symbol.capitalize() if aromatic else symbol
    charge_text = m.group("charge") or ""
    if not charge_text:
        charge = 0
    elif charge_text in ("+", "-") or charge_text[0] in "+-" and charge_text.lstrip("+-") == "":
        charge = len(charge_text) * (1 if charge_text[0] == "+" else -1)
    else:
        charge = int(charge_text)
    return Atom(element=element, formal_charge=charge, is_aromatic=aromatic)


def parse_smiles(tokens: list[SmilesToken]) -> MolGraph:
    """Build a MolGraph from a token stream.

    Branches go through a parse stack; ring digits pair first-open with
    first-close; bonds default to single, or aromatic between two aromatic
    atoms.
    """
    atoms: list[Atom] = []
    bonds: list[Bond] = []
    seen_pairs = set()
    prev: int | None = None
    stack: list[int] = []
    pending: tuple[str, int] | None = None  # (bond char, offset) awaiting its right operand
    open_rings: dict[int, tuple[int, str | None, int]] = {}  # ring no -> (atom, bond char, offset)

    def add_bond(i: int, j: int, bond_char: str | None, position: int) -> None:
        if i == j:
            raise ParseError("ring closure bonds an atom to itself", position)
        pair = (min(i, j), max(i, j))
        if pair in seen_pairs:
            raise ParseError(f"duplicate bond between atoms {i} and {j}", position)
        seen_pairs.add(pair)
        if bond_char is not None:
            order = _BOND_CHAR_ORDER[bond_char]
        elif atoms[i].is_aromatic and atoms[j].is_aromatic:
            order = BondOrder.AROMATIC
        else:
            order = BondOrder.SINGLE
        bonds.append(Bond(i, j, order))

    for token in tokens:
        if token.kind in ("atom", "bracket_atom"):
            if token.kind == "atom":
                aromatic = token.text in AROMATIC_ORGANIC
                atom = Atom(element=token.text.capitalize() if aromatic else token.text,
                            is_aromatic=aromatic)
            else:
                atom = _parse_bracket_atom(token)
            atom.index = len(atoms)
            atoms.append(atom)
            if prev is not None:
                add_bond(prev, atom.index, pending[0] if pending else None, token.position)
            elif pending is not None:
                raise ParseError("bond token with missing left operand", pending[1])
            pending = None
            prev = atom.index
        elif token.kind == "bond":
            if prev is None:
                raise ParseError("bond token with missing left operand", token.position)
            if pending is not None:
                raise ParseError("two consecutive bond tokens", token.position)
            pending = (token.text, token.position)
        elif token.kind == "branch_open":
            if prev is None:
                raise ParseError("branch opened before any atom", token.position)
            if pending is not None:
                raise ParseError("bond token with missing right operand", pending[1])
            stack.append(prev)
        elif token.kind == "branch_close":
            if not stack:
                raise ParseError("unmatched ')'", token.position)
            if pending is not None:
                raise ParseError("bond token with missing right operand", pending[1])
            prev = stack.pop()
        else:  # ring_digit | ring_two_digit
            if prev is None:
                raise ParseError("ring digit before any atom", token.position)
            number = int(token.text[1:] if token.kind == "ring_two_digit" else token.text)
            if number in open_rings:
                other, open_char, _ = open_rings.pop(number)
                bond_char = pending[0] if pending else open_char
                add_bond(prev, other, bond_char, token.position)
            else:
                open_rings[number] = (prev, pending[0] if pending else None, token.position)
            pending = None

    if pending is not None:
        raise ParseError("bond token with missing right operand", pending[1])
    if stack:
        raise ParseError("unmatched '('", len(tokens[-1].text) + tokens[-1].position)
    if open_rings:
        number, (_, _, position) = next(iter(open_rings.items()))
        raise ParseError(f"unclosed ring digit {number}", position)

    for bond in bonds:
        atoms[bond.i].degree += 1
        atoms[bond.j].degree += 1
    return MolGraph(atoms=atoms, bonds=bonds)


def _build_features(graph: MolGraph) -> None:
    atom_features = np.zeros((graph.n_atoms, N_ATOM_FEATURES), dtype=np.int64)
    for atom in graph.atoms:
        element_id = _ELEMENT_IDS.get(atom.element)
        if element_id is None:
            raise UnsupportedElementError(atom.element)
        charge_bucket = int(np.clip(atom.formal_charge, -2, 2)) + 2
        atom_features[atom.index] = (element_id, atom.degree, charge_bucket, int(atom.is_aromatic))
    bond_features = np.zeros((graph.n_bonds, 1), dtype=np.int64)
    for b_idx, bond in enumerate(graph.bonds):
        bond_features[b_idx, 0] = int(bond.order)
    graph.atom_features = atom_features
    graph.bond_features = bond_features


def smiles_to_graph(s: str) -> MolGraph:
    """Tokenize + parse a SMILES string and populate the feature matrices."""
    graph = parse_smiles(tokenize_smiles(s))
    _build_features(graph)
    return graph


def relabel_graph(graph: MolGraph, perm) -> MolGraph:
    """Apply an atom relabeling: new index of old atom i is perm[i]."""
    perm = list(perm)
    if sorted(perm) != list(range(graph.n_atoms)):
        raise ValueError("perm must be a permutation of the atom indices")
    atoms = [None] * graph.n_atoms
    for old, atom in enumerate(graph.atoms):
        atoms[perm[old]] = Atom(atom.element, atom.formal_charge, atom.is_aromatic,
                                atom.degree, perm[old])
    bonds = [Bond(perm[b.i], perm[b.j], b.order) for b in graph.bonds]
    out = MolGraph(atoms=atoms, bonds=bonds)
    _build_features(out)
    return out


def dump_graph(graph: MolGraph) -> str:
    """Debug edge-list dump: atom lines, then bond lines."""
    lines = [f"atom {a.index} {a.element} {a.formal_charge} {int(a.is_aromatic)}"
             for a in graph.atoms]
    lines += [f"bond {b.i} {b.j} {b.order.name.lower()}" for b in graph.bonds]
    return "\n".join(lines)
