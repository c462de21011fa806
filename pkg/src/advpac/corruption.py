"""Corrupted hypotheses: the label a classifier keeps on a whole neighbourhood, or BOT.

``BOT`` marks a point whose neighbourhood contains two points the classifier
labels differently; a BOT prediction counts as wrong against every label.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Sequence

from ._numbers import q, qvec
from .errors import GuardExceeded
from .geometry import (
    FiniteNeighborhood,
    LinearSystem,
    LpBall,
    activation_range_signs,
    dual_norm,
    find_feasible_point,
    norm_sq,
    _key,
)
from .hypotheses import DimensionError, Halfspace, SignNetwork, eval_halfspace, eval_network

MAX_UNCERTAIN = 12


class _Bottom:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __str__(self):
        return "BOT"

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()


def label_text(value) -> str:
    if value is BOT:
        return "BOT"
    if value == 1:
        return "+1"
    if value == -1:
        return "-1"
    return str(value)


def parse_label(text: str):
    text = text.strip()
    if text.upper() in {"BOT", "⊥"}:
        return BOT
    return int(text)


def _agree(values):
    first = values[0]
    return first if all(v == first for v in values) else BOT


def _neighbors(n, x, domain=None):
    if isinstance(n, FiniteNeighborhood):
        return n.of(x)
    if domain is None:
        raise TypeError("an l_p ball neighbourhood is only enumerable over an explicit finite domain")
    centre = qvec(x)
    return [p for p in (qvec(d) for d in domain) if n.contains(centre, p)]


def corrupt_halfspace(h: Halfspace, x: Sequence, n) -> object:
    """+1 / -1 when the halfspace is constant on the neighbourhood of ``x``, else BOT."""
    if isinstance(n, LpBall):
        lo_positive, hi_nonpositive = activation_range_signs(h, x, n)
        if lo_positive:
            return 1
        if hi_nonpositive:
            return -1
        return BOT
    return _agree([eval_halfspace(h, p) for p in n.of(x)])


def _check_binary(net: SignNetwork):
    if net.layer_sizes[-1] != 1:
        raise DimensionError("corruption needs a single output neuron")


def _first_layer_options(net: SignNetwork, x, n: LpBall):
    options = []
    for neuron in net.layer(1):
        lo_positive, hi_nonpositive = activation_range_signs(neuron, x, n)
        if lo_positive:
            options.append((1,))
        elif hi_nonpositive:
            options.append((-1,))
        else:
            options.append((-1, 1))
    return options


def pattern_system(net: SignNetwork, x, n: LpBall, pattern: Sequence[int], neurons=None) -> LinearSystem:
    """Ball around ``x`` intersected with the region where layer 1 emits ``pattern``.

    ``neurons`` restricts the constraints to those first-layer indices.
    """
    system = LinearSystem(qvec(x), n.p, n.epsilon)
    layer = net.layer(1)
    for i in range(len(layer)) if neurons is None else neurons:
        if pattern[i] == 1:
            system.add_ge(layer[i].weights, -layer[i].bias, strict=True)
        else:
            system.add(layer[i].weights, -layer[i].bias)
    return system


def corrupt_network_exact(net: SignNetwork, x: Sequence, n, *, return_witnesses: bool = False,
                          max_uncertain: int = MAX_UNCERTAIN):
    """Exact corrupted output of a single-output sign network.

    First-layer sign patterns not excluded by per-neuron margins are tested for
    joint feasibility inside the ball; deeper layers see only +/-1 values, so
    each feasible pattern determines one output label.

    At most ``max_uncertain`` neurons may be undetermined by their own
    margins (2^k feasibility tests for k of them).

    With ``return_witnesses`` a dict ``label -> point of N(x)`` is returned as
    the second element of a tuple.
    """
    _check_binary(net)
    x = qvec(x)
    if len(x) != net.layer_sizes[0]:
        raise DimensionError(f"point has dimension {len(x)}, network expects {net.layer_sizes[0]}")
    if isinstance(n, FiniteNeighborhood):
        witnesses = {}
        for p in n.of(x):
            witnesses.setdefault(eval_network(net, p)[0], p)
        result = next(iter(witnesses)) if len(witnesses) == 1 else BOT
        return (result, witnesses) if return_witnesses else result

    base = eval_network(net, x)[0]
    witnesses = {base: x}
    options = _first_layer_options(net, x, n)
    uncertain = [i for i, opt in enumerate(options) if len(opt) == 2]
    if len(uncertain) > max_uncertain:
        raise GuardExceeded(
            f"{len(uncertain)} undetermined first-layer neurons; guard allows {max_uncertain}"
        )
    result = base
    if uncertain:
        for pattern in itertools.product(*options):
            label = net.propagate(pattern, start_layer=2)[0]
            if label == base:
                continue
            # neurons outside `uncertain` keep one sign on the whole ball
            system = pattern_system(net, x, n, pattern, neurons=uncertain)
            point = find_feasible_point(system)
            if point is not None:
                witnesses[label] = point
                result = BOT
                break
    return (result, witnesses) if return_witnesses else result


def _interval_sign(lo: Fraction, hi: Fraction):
    if lo > 0:
        return 1
    if hi <= 0:
        return -1
    return BOT


def corrupt_network_interval(net: SignNetwork, x: Sequence, n) -> object:
    """Sound but incomplete corrupted output via independent per-neuron intervals.

    A returned label is always correct; BOT may be returned where the exact
    oracle finds a label, because correlations between neurons are dropped.
    """
    _check_binary(net)
    x = qvec(x)
    if isinstance(n, FiniteNeighborhood):
        return corrupt_network_exact(net, x, n)
    if len(x) != net.layer_sizes[0]:
        raise DimensionError(f"point has dimension {len(x)}, network expects {net.layer_sizes[0]}")
    # each value is (lo, hi) over {-1, +1}
    values = []
    for opt in _first_layer_options(net, x, n):
        values.append((Fraction(min(opt)), Fraction(max(opt))))
    for t in range(2, net.depth + 1):
        nxt = []
        for neuron in net.layer(t):
            lo = hi = neuron.bias
            for w, (a, b) in zip(neuron.weights, values):
                lo += min(w * a, w * b)
                hi += max(w * a, w * b)
            s = _interval_sign(lo, hi)
            nxt.append((Fraction(-1), Fraction(1)) if s is BOT else (Fraction(s), Fraction(s)))
        values = nxt
    lo, hi = values[0]
    return int(lo) if lo == hi else BOT


def corrupt_multiclass(h: Callable, x, n, domain=None) -> object:
    """``h(x)`` when every neighbour of ``x`` receives that label, else BOT.

    ``n`` must be a finite neighbourhood map, or an l_p ball together with an
    explicit ``domain`` whose points inside the ball form the neighbourhood.
    """
    neighbours = _neighbors(n, x, domain)
    centre = h(_key(x))
    for p in neighbours:
        if h(p) != centre:
            return BOT
    return centre


class AffineFunction:
    """Real-valued ``x -> w.x + b``, the case the continuous corruption handles in closed form."""

    def __init__(self, weights, bias=0):
        self.weights = qvec(weights)
        self.bias = q(bias)

    def __call__(self, x):
        return sum((w * v for w, v in zip(self.weights, qvec(x))), Fraction(0)) + self.bias

    def __repr__(self):
        return f"AffineFunction({self.weights!r}, {self.bias!r})"


def _abs_metric(a, b):
    return abs(a - b)


def corrupt_continuous(h: Callable, x, n, delta, metric: Callable | None = None, domain=None):
    """Continuous corruption anchored at the centre output.

    Returns ``h(x)`` when ``metric(h(x), h(x')) <= delta`` for every neighbour
    ``x'``, else BOT.  For an :class:`AffineFunction` on an l_p ball with the
    default absolute-difference metric the supremum is ``eps * ||w||_q``
    exactly; other combinations need an enumerable neighbourhood.
    ``delta`` may be ``math.inf``.
    """
    if delta != float("inf"):
        delta = q(delta)
        if delta < 0:
            raise ValueError("delta must be non-negative")
    centre = h(_key(x)) if not isinstance(h, AffineFunction) else h(x)
    if delta == float("inf"):
        return centre
    if isinstance(h, AffineFunction) and isinstance(n, LpBall) and metric is None:
        if n.p == 2:
            within = n.epsilon * n.epsilon * norm_sq(h.weights) <= delta * delta
        else:
            within = n.epsilon * dual_norm(h.weights, n.p) <= delta
        return centre if within else BOT
    if isinstance(n, LpBall) and domain is None:
        raise TypeError("non-affine or custom-metric corruption needs a finite neighbourhood")
    metric = metric or _abs_metric
    for p in _neighbors(n, x, domain):
        if metric(centre, h(p)) > delta:
            return BOT
    return centre


def corrupt(h, x, n, mode: str = "exact", domain=None, max_uncertain: int = MAX_UNCERTAIN):
    """Dispatch to the corruption oracle matching the hypothesis type."""
    if isinstance(h, Halfspace):
        return corrupt_halfspace(h, x, n)
    if isinstance(h, SignNetwork):
        if mode == "interval":
            return corrupt_network_interval(h, x, n)
        if mode != "exact":
            raise ValueError(f"unknown corruption mode {mode!r}")
        return corrupt_network_exact(h, x, n, max_uncertain=max_uncertain)
    if callable(h):
        return corrupt_multiclass(h, x, n, domain=domain)
    raise TypeError(f"no corruption oracle for {type(h).__name__}")
