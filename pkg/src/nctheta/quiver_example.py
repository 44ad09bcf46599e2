"""Quivers of holomorphic Hom spaces between line-bundle labels.

Nodes are symmetric integer matrices; an arrow a -> b carries
dim H^0(a, b) = det(A_b - A_a) when the difference is positive definite.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .errors import NotUnimodular
from .linalg_core import IntSymMatrix, int_det
from .structure_constants import hom_space

__all__ = [
    "enumerate_diag_symmetric",
    "conjugate",
    "hom_dim",
    "Quiver",
    "build_quiver",
    "det4_family",
]


def enumerate_diag_symmetric(n: int, det_target: int, bound: int) -> list[IntSymMatrix]:
    """Diagonal n x n integer matrices with entries in [-bound, bound] and the given determinant."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    out = [IntSymMatrix.diag(*d) for d in product(range(-bound, bound + 1), repeat=n)
           if int(np.prod(d)) == det_target]
    return sorted(out, key=lambda A: A.entries)


def conjugate(A: IntSymMatrix, g) -> IntSymMatrix:
    """g^T A g for a unimodular integer matrix g."""
    g = [[int(x) for x in row] for row in g]
    if len(g) != A.n or any(len(r) != A.n for r in g):
        raise ValueError(f"g must be {A.n} x {A.n}")
    if abs(int_det(g)) != 1:
        raise NotUnimodular(f"det g = {int_det(g)}")
    n = A.n
    Ag = [[sum(A.entries[i][k] * g[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return IntSymMatrix([[sum(g[k][i] * Ag[k][j] for k in range(n)) for j in range(n)]
                         for i in range(n)])


def hom_dim(A_a: IntSymMatrix, A_b: IntSymMatrix) -> int:
    return hom_space(A_a, A_b).dimension


@dataclass(frozen=True)
class Quiver:
    labels: tuple[IntSymMatrix, ...]
    names: tuple[str, ...]
    arrows: tuple[tuple[int, int, int], ...]  # (source, target, weight)

    def weight(self, a: int, b: int) -> int:
        return next((w for s, t, w in self.arrows if (s, t) == (a, b)), 0)

    def to_dot(self) -> str:
        lines = ["digraph quiver {"]
        for name, A in zip(self.names, self.labels):
            lines.append(f'  "{name}" [label="{name}\\n{A.tolist()}"];')
        for s, t, w in self.arrows:
            lines.append(f'  "{self.names[s]}" -> "{self.names[t]}" [label="{w}", weight={w}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "nodes": [{"name": nm, "A": A.tolist()} for nm, A in zip(self.names, self.labels)],
            "arrows": [{"source": self.names[s], "target": self.names[t], "weight": w}
                       for s, t, w in self.arrows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def build_quiver(labels: Sequence[IntSymMatrix], names: Sequence[str] | None = None) -> Quiver:
    """Arrow a -> b with weight hom_dim(a, b) for every ordered pair of distinct labels with weight > 0."""
    labels = tuple(labels)
    if names is None:
        names = tuple(str(i + 1) for i in range(len(labels)))
    if len(names) != len(labels):
        raise ValueError("need one name per label")
    arrows = []
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            if i != j and a != b:
                w = hom_dim(a, b)
                if w > 0:
                    arrows.append((i, j, w))
    return Quiver(labels, tuple(names), tuple(arrows))


def det4_family(with_opposites: bool = False) -> tuple[list[IntSymMatrix], list[str]]:
    """diag(1,-4), diag(2,-2), diag(4,-1), optionally followed by their negatives."""
    labels = [IntSymMatrix.diag(1, -4), IntSymMatrix.diag(2, -2), IntSymMatrix.diag(4, -1)]
    names = ["1", "2", "3"]
    if with_opposites:
        labels += [-A for A in labels]
        names += ["1'", "2'", "3'"]
    return labels, names
