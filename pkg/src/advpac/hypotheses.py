"""Halfspaces, layered sign networks and finite hypothesis classes.

Every neuron is a linear threshold unit: it outputs +1 when its activation
``w.x + b`` is strictly positive and -1 otherwise (so a zero activation maps to
-1).  Hidden layers therefore emit +/-1 vectors, and the next layer's biases
absorb the affine shift from a {0, 1} encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from ._numbers import dot, fmt_exact, q, qvec


class DimensionError(ValueError):
    """Raised when a point, weight row or class domain has the wrong shape."""


def _sign(activation: Fraction) -> int:
    return 1 if activation > 0 else -1


@dataclass(frozen=True)
class Halfspace:
    """Linear threshold classifier ``x -> sign(w.x + b)`` with ties at -1."""

    weights: tuple[Fraction, ...]
    bias: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "weights", qvec(self.weights))
        object.__setattr__(self, "bias", q(self.bias))
        if len(self.weights) < 1:
            raise DimensionError("a halfspace needs at least one weight")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def activation(self, x: Sequence) -> Fraction:
        x = qvec(x)
        if len(x) != self.dim:
            raise DimensionError(f"point has dimension {len(x)}, halfspace expects {self.dim}")
        return dot(self.weights, x) + self.bias

    def __call__(self, x: Sequence) -> int:
        return eval_halfspace(self, x)

    def to_dict(self) -> dict:
        return {
            "kind": "halfspace",
            "weights": [fmt_exact(w) for w in self.weights],
            "bias": fmt_exact(self.bias),
        }


def eval_halfspace(h: Halfspace, x: Sequence) -> int:
    return _sign(h.activation(x))


@dataclass(frozen=True)
class SignNetwork:
    """Fully connected layered network of sign neurons.

    ``weights[t]`` is the ``|V_{t+1}| x |V_t|`` matrix feeding layer ``t+1`` and
    ``biases[t]`` its bias vector; ``layer_sizes[0]`` is the input dimension.
    """

    weights: tuple[tuple[tuple[Fraction, ...], ...], ...]
    biases: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        weights = tuple(tuple(qvec(row) for row in mat) for mat in self.weights)
        biases = tuple(qvec(vec) for vec in self.biases)
        if not weights:
            raise DimensionError("a network needs at least one layer")
        if len(weights) != len(biases):
            raise DimensionError("one bias vector per weight matrix is required")
        fan_in = len(weights[0][0]) if weights[0] else 0
        if fan_in < 1:
            raise DimensionError("input dimension must be at least 1")
        for t, (mat, vec) in enumerate(zip(weights, biases), start=1):
            if len(mat) < 1:
                raise DimensionError(f"layer {t} has no neurons")
            if len(vec) != len(mat):
                raise DimensionError(f"layer {t}: {len(mat)} rows but {len(vec)} biases")
            for row in mat:
                if len(row) != fan_in:
                    raise DimensionError(f"layer {t}: row of width {len(row)}, expected {fan_in}")
            fan_in = len(mat)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @classmethod
    def from_halfspace(cls, h: Halfspace) -> "SignNetwork":
        return cls(weights=((h.weights,),), biases=((h.bias,),))

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (len(self.weights[0][0]),) + tuple(len(mat) for mat in self.weights)

    @property
    def depth(self) -> int:
        return len(self.weights)

    def neuron(self, layer: int, index: int) -> Halfspace:
        """Neuron ``index`` of layer ``layer`` (1-based layers, 0-based neuron index)."""
        return Halfspace(self.weights[layer - 1][index], self.biases[layer - 1][index])

    def layer(self, t: int) -> list[Halfspace]:
        return [self.neuron(t, i) for i in range(self.layer_sizes[t])]

    def propagate(self, values: Sequence, start_layer: int = 1) -> tuple[int, ...]:
        """Run layers ``start_layer..T`` on ``values`` (the output of layer start_layer-1)."""
        current = qvec(values)
        for t in range(start_layer, self.depth + 1):
            mat, vec = self.weights[t - 1], self.biases[t - 1]
            if len(current) != len(mat[0]):
                raise DimensionError(
                    f"layer {t} expects {len(mat[0])} inputs, got {len(current)}"
                )
            current = tuple(Fraction(_sign(dot(row, current) + b)) for row, b in zip(mat, vec))
        return tuple(int(v) for v in current)

    def __call__(self, x: Sequence) -> tuple[int, ...]:
        return eval_network(self, x)

    def to_dict(self) -> dict:
        return {
            "kind": "sign_network",
            "layer_sizes": list(self.layer_sizes),
            "weights": [[[fmt_exact(w) for w in row] for row in mat] for mat in self.weights],
            "biases": [[fmt_exact(b) for b in vec] for vec in self.biases],
        }


def eval_network(net: SignNetwork, x: Sequence) -> tuple[int, ...]:
    x = qvec(x)
    if len(x) != net.layer_sizes[0]:
        raise DimensionError(f"point has dimension {len(x)}, network expects {net.layer_sizes[0]}")
    return net.propagate(x, start_layer=1)


def edge_count(net: SignNetwork) -> int:
    """Number of weights plus biases, i.e. the sum of neuron fan-ins with the bias as an edge."""
    sizes = net.layer_sizes
    return sum(sizes[t] * (sizes[t - 1] + 1) for t in range(1, len(sizes)))


def fan_ins(net: SignNetwork) -> list[int]:
    """Per-neuron ``d_{t,i} = |V_{t-1}| + 1`` in layer order."""
    sizes = net.layer_sizes
    return [sizes[t - 1] + 1 for t in range(1, len(sizes)) for _ in range(sizes[t])]


def hypothesis_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "halfspace":
        return Halfspace(doc["weights"], doc.get("bias", "0"))
    if kind == "sign_network":
        net = SignNetwork(weights=doc["weights"], biases=doc["biases"])
        declared = doc.get("layer_sizes")
        if declared is not None and tuple(declared) != net.layer_sizes:
            raise DimensionError(
                f"declared layer_sizes {declared} disagree with matrices {list(net.layer_sizes)}"
            )
        return net
    raise ValueError(f"unknown hypothesis kind {kind!r}")


@dataclass(frozen=True)
class FiniteClass:
    """A hypothesis class given by its behaviour tuples on an explicit finite domain.

    Duplicate behaviours are collapsed (first occurrence keeps its position),
    so ``len(cls)`` is the number of distinct restrictions to the domain.
    """

    domain: tuple[Hashable, ...]
    hypotheses: tuple[tuple, ...]

    def __post_init__(self):
        domain = tuple(self.domain)
        if len(set(domain)) != len(domain):
            raise DimensionError("domain points must be distinct")
        seen: dict[tuple, None] = {}
        for h in self.hypotheses:
            h = tuple(h)
            if len(h) != len(domain):
                raise DimensionError(
                    f"behaviour tuple of length {len(h)} on a domain of size {len(domain)}"
                )
            seen.setdefault(h, None)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "hypotheses", tuple(seen))

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    @property
    def alphabet(self) -> set:
        return {v for h in self.hypotheses for v in h}

    def index(self, point) -> int:
        return self.domain.index(point)

    def restrict(self, indices: Sequence[int]) -> set[tuple]:
        return {tuple(h[i] for i in indices) for h in self.hypotheses}

    def as_functions(self) -> list["TableHypothesis"]:
        return [TableHypothesis(self.domain, h) for h in self.hypotheses]


@dataclass(frozen=True)
class TableHypothesis:
    """One member of a :class:`FiniteClass`, callable on its domain points."""

    domain: tuple
    outputs: tuple

    def __call__(self, x):
        key = tuple(x) if isinstance(x, (list, tuple)) else x
        try:
            return self.outputs[self.domain.index(key)]
        except ValueError:
            raise DimensionError(f"point {x!r} is outside the hypothesis domain") from None


def compose_classes(f1: FiniteClass, f2: FiniteClass) -> FiniteClass:
    """All compositions ``x -> f2(f1(x))`` over f1's domain."""
    missing = f1.alphabet - set(f2.domain)
    if missing:
        raise DimensionError(f"f1 outputs {sorted(map(repr, missing))} are outside f2's domain")
    position = {z: i for i, z in enumerate(f2.domain)}
    out = [
        tuple(g[position[z]] for z in h)
        for h in f1.hypotheses
        for g in f2.hypotheses
    ]
    return FiniteClass(f1.domain, out)


def product_classes(f1: FiniteClass, f2: FiniteClass) -> FiniteClass:
    """All pairings ``x -> (f1(x), f2(x))`` over a shared domain."""
    if f1.domain != f2.domain:
        raise DimensionError("product classes need identical domains")
    out = [tuple(zip(h, g)) for h in f1.hypotheses for g in f2.hypotheses]
    return FiniteClass(f1.domain, out)


def grid_halfspace_class(
    d: int,
    weight_grid: Iterable,
    bias_grid: Iterable,
    domain: Sequence[Sequence],
) -> FiniteClass:
    """Behaviours on ``domain`` of every halfspace with grid coordinates.

    The all-zero weight vector is skipped.
    """
    if d < 1:
        raise DimensionError("d must be at least 1")
    weight_grid = qvec(weight_grid)
    bias_grid = qvec(bias_grid)
    if not weight_grid or not bias_grid:
        raise ValueError("parameter grids must be nonempty")
    points = [qvec(x) for x in domain]
    if not points:
        raise ValueError("domain is empty")
    for x in points:
        if len(x) != d:
            raise DimensionError(f"domain point {x} does not have dimension {d}")
    behaviours = []
    for w in itertools.product(weight_grid, repeat=d):
        if not any(w):
            continue
        acts = [dot(w, x) for x in points]
        for b in bias_grid:
            behaviours.append(tuple(_sign(a + b) for a in acts))
    return FiniteClass(tuple(points), behaviours)


def grid_network_class(
    layer_sizes: Sequence[int], grid: Iterable, domain: Sequence[Sequence]
) -> FiniteClass:
    """Behaviours on ``domain`` of every network whose weights and biases lie on ``grid``.

    Enumerates networks directly (no composition shortcut), so it can serve as
    a brute-force reference for the growth-function chain.
    """
    grid = qvec(grid)
    sizes = list(layer_sizes)
    points = [qvec(x) for x in domain]
    n_params = sum(sizes[t] * (sizes[t - 1] + 1) for t in range(1, len(sizes)))
    behaviours = []
    for params in itertools.product(grid, repeat=n_params):
        it = iter(params)
        weights, biases = [], []
        for t in range(1, len(sizes)):
            mat, vec = [], []
            for _ in range(sizes[t]):
                mat.append(tuple(next(it) for _ in range(sizes[t - 1])))
                vec.append(next(it))
            weights.append(tuple(mat))
            biases.append(tuple(vec))
        net = SignNetwork(tuple(weights), tuple(biases))
        behaviours.append(tuple(eval_network(net, x) for x in points))
    return FiniteClass(tuple(points), behaviours)
