"""Five-layer GIN encoder over molecular graphs.

Per layer, each node state becomes
    mlp_atom( z_i + sum_{j in N(i)} ( z_j + mlp_bond(e_ij) ) )
with per-layer atom and bond MLPs. The stack output is projected to the
text embedding width d and length-fixed to l rows (truncate in atom-index
order, or zero-pad), with a validity mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem import CHARGE_BUCKETS, ELEMENTS, MAX_DEGREE, MolGraph, N_BOND_ORDERS
from ..numerics import (
    ContractError,
    Embedding,
    Mlp,
    Module,
    Parameter,
    ShapeError,
    Tensor,
    add,
    concat,
    matmul,
    narrow,
    uniform_init,
)

N_GIN_LAYERS = 5


@dataclass
class GraphEncoderConfig:
    d_g: int = 128  # hidden width of the GIN stack
    l: int = 64     # fixed output length (graph token budget)
    d: int = 256    # output embedding width; must match the text model

    def __post_init__(self):
        if self.l < 1 or self.d_g < 1 or self.d < 1:
            raise ValueError("graph encoder dimensions must be positive")


@dataclass
class GraphEmbedding:
    values: Tensor          # (l, d); rows beyond valid_len are exactly zero
    valid_len: int          # min(n_atoms, l)
    mask: np.ndarray        # bool (l,), True on the first valid_len rows


def _graph_constants(graph: MolGraph, dtype):
    """Adjacency (N,N), bond incidence (N,E), and bond-order one-hots (E, orders)."""
    n, e = graph.n_atoms, graph.n_bonds
    adjacency = np.zeros((n, n), dtype=dtype)
    incidence = np.zeros((n, e), dtype=dtype)
    bond_onehot = np.zeros((e, N_BOND_ORDERS), dtype=dtype)
    for b_idx, bond in enumerate(graph.bonds):
        adjacency[bond.i, bond.j] = 1.0
        adjacency[bond.j, bond.i] = 1.0
        incidence[bond.i, b_idx] = 1.0
        incidence[bond.j, b_idx] = 1.0
        bond_onehot[b_idx, graph.bond_features[b_idx, 0]] = 1.0
    return Tensor(adjacency), Tensor(incidence), Tensor(bond_onehot)


class GinLayer(Module):
    def __init__(self, d_g: int, rng, dtype=np.float64):
        super().__init__()
        self.mlp_atom = Mlp(d_g, d_g, d_g, rng, dtype=dtype)
        self.mlp_bond = Mlp(N_BOND_ORDERS, d_g, d_g, rng, dtype=dtype)

    def forward(self, z: Tensor, adjacency: Tensor, incidence: Tensor, bond_onehot: Tensor) -> Tensor:
        # neighbor term: sum_j z_j plus, per incident bond, the bond MLP output
        neighbor_sum = matmul(adjacency, z)
        if bond_onehot.shape[0] > 0:
            bond_msgs = self.mlp_bond(bond_onehot)      # (E, d_g)
            neighbor_sum = add(neighbor_sum, matmul(incidence, bond_msgs))
        return self.mlp_atom(add(z, neighbor_sum))

    __call__ = forward


def gin_layer_forward(layer: GinLayer, z: Tensor, graph: MolGraph) -> Tensor:
    """One message-passing step over graph with node states z (N, d_g)."""
    if z.shape[0] != graph.n_atoms:
        raise ShapeError(f"state rows {z.shape[0]} != atom count {graph.n_atoms}")
    adjacency, incidence, bond_onehot = _graph_constants(graph, z.dtype)
    return layer(z, adjacency, incidence, bond_onehot)


class GraphEncoder(Module):
    """Atom-feature embedding -> 5 GIN layers -> projection -> length fixing."""

    def __init__(self, config: GraphEncoderConfig, rng, dtype=np.float64):
        super().__init__()
        self.config = config
        d_g = config.d_g
        self.element_embed = Embedding(len(ELEMENTS), d_g, rng, dtype=dtype)
        self.degree_embed = Embedding(MAX_DEGREE + 1, d_g, rng, dtype=dtype)
        self.charge_embed = Embedding(CHARGE_BUCKETS, d_g, rng, dtype=dtype)
        self.aromatic_embed = Embedding(2, d_g, rng, dtype=dtype)
        self.layer = [GinLayer(d_g, rng, dtype=dtype) for _ in range(N_GIN_LAYERS)]
        self.projection = Parameter(uniform_init(rng, (d_g, config.d), d_g, dtype))
        self._dtype = dtype

    def embed_atoms(self, graph: MolGraph) -> Tensor:
        feats = graph.atom_features
        z = self.element_embed(feats[:, 0])
        z = add(z, self.degree_embed(np.clip(feats[:, 1], 0, MAX_DEGREE)))
        z = add(z, self.charge_embed(feats[:, 2]))
        z = add(z, self.aromatic_embed(feats[:, 3]))
        return z

    def encode(self, graph: MolGraph) -> GraphEmbedding:
        if graph.n_atoms == 0:
            raise ContractError("cannot encode an empty graph")
        if graph.atom_features is None:
            raise ContractError("graph is missing feature matrices")
        adjacency, incidence, bond_onehot = _graph_constants(graph, self._dtype)
        z = self.embed_atoms(graph)
        for layer in self.layer:
            z = layer(z, adjacency, incidence, bond_onehot)
        projected = matmul(z, self.projection)  # (N, d)

        l = self.config.l
        n = graph.n_atoms
        valid_len = min(n, l)
        if n > l:
            values = narrow(projected, 0, l)
        elif n < l:
            pad = Tensor(np.zeros((l - n, self.config.d), dtype=self._dtype))
            values = concat([projected, pad], axis=0)
        else:
            values = projected
        mask = np.zeros(l, dtype=bool)
        mask[:valid_len] = True
        return GraphEmbedding(values=values, valid_len=valid_len, mask=mask)

    __call__ = encode
