"""Growth functions, corrupted-loss shattering and the bound calculators.

Adversarial shattering follows the loss-class definition literally: a tuple
of points is shattered when, for some choice of labels, every one of the 2^n
corrupted 0/1 loss vectors is produced by some hypothesis.  BOT counts as a
loss, so this is weaker than asking each labelling to be realised robustly.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._numbers import fmt_exact, qvec
from .corruption import corrupt, label_text, parse_label
from .errors import GuardExceeded  # noqa: F401  (re-exported)
from .geometry import neighborhood_from_dict
from .hypotheses import (
    FiniteClass,
    SignNetwork,
    compose_classes,
    hypothesis_from_dict,
    product_classes,
)
from .risk import corrupted_loss, halfspace_patterns

DEFAULT_MAX_SUBSETS = 1_000_000


# ---------------------------------------------------------------- growth functions


def growth_function(cls: FiniteClass, m: int, max_subsets: int = DEFAULT_MAX_SUBSETS) -> int:
    """Largest number of distinct behaviours of ``cls`` on any m points of its domain."""
    size = len(cls.domain)
    if not 1 <= m <= size:
        raise ValueError(f"m={m} outside 1..{size}")
    work = math.comb(size, m)
    if work * m > max_subsets:
        raise GuardExceeded(f"growth function needs {work} subsets of size {m}")
    cap = min(len(cls), len(cls.alphabet) ** m)
    best = 0
    for subset in itertools.combinations(range(size), m):
        best = max(best, len(cls.restrict(subset)))
        if best == cap:
            break
    return best


def _clamped_growth(cls: FiniteClass, m: int, max_subsets: int) -> int:
    # growth is non-decreasing in m, so m beyond the domain saturates at the full restriction
    return growth_function(cls, min(m, len(cls.domain)), max_subsets)


@dataclass(frozen=True)
class BoundCheck:
    tau_h: int
    tau_f1: int
    tau_f2: int
    bound_holds: bool
    restriction_equality: bool | None = None

    @property
    def bound(self) -> int:
        return self.tau_f1 * self.tau_f2


def verify_composition_bound(f1: FiniteClass, f2: FiniteClass, m: int,
                             max_subsets: int = DEFAULT_MAX_SUBSETS) -> BoundCheck:
    """Exhaustively compare the growth of ``f2 o f1`` with the product of the parts.

    ``f2`` lives on the intermediate alphabet; when it has fewer than m
    points its growth is taken at its whole domain.
    """
    h = compose_classes(f1, f2)
    tau_h = growth_function(h, m, max_subsets)
    tau_f1 = growth_function(f1, m, max_subsets)
    tau_f2 = _clamped_growth(f2, m, max_subsets)
    return BoundCheck(tau_h, tau_f1, tau_f2, tau_h <= tau_f1 * tau_f2)


def verify_product_bound(f1: FiniteClass, f2: FiniteClass, m: int,
                         max_subsets: int = DEFAULT_MAX_SUBSETS) -> BoundCheck:
    """Growth of ``f1 x f2`` against the product of growths.

    Also reports whether, on the subset maximising the product class's growth,
    the restriction count factorises as ``|F1_C| * |F2_C|``.
    """
    h = product_classes(f1, f2)
    size = len(h.domain)
    if not 1 <= m <= size:
        raise ValueError(f"m={m} outside 1..{size}")
    if math.comb(size, m) * m > max_subsets:
        raise GuardExceeded(f"product check needs {math.comb(size, m)} subsets")
    tau_h, arg = -1, None
    for subset in itertools.combinations(range(size), m):
        count = len(h.restrict(subset))
        if count > tau_h:
            tau_h, arg = count, subset
    tau_f1 = growth_function(f1, m, max_subsets)
    tau_f2 = growth_function(f2, m, max_subsets)
    equality = tau_h == len(f1.restrict(arg)) * len(f2.restrict(arg))
    return BoundCheck(tau_h, tau_f1, tau_f2, tau_h <= tau_f1 * tau_f2, equality)


# ---------------------------------------------------------------- families


class HalfspaceFamily:
    """All halfspaces on R^d, explored through exact pattern enumeration."""

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("d must be at least 1")
        self.d = d

    def patterns(self, points, n) -> dict:
        patterns, _ = halfspace_patterns(points, n)
        return patterns

    def to_dict(self) -> dict:
        return {"kind": "halfspace", "d": self.d}


class ExplicitFamily:
    """A finite list of hypotheses, each corrupted through its own oracle."""

    def __init__(self, hypotheses: Iterable, mode: str = "exact", domain=None):
        self.hypotheses = list(hypotheses)
        if not self.hypotheses:
            raise ValueError("hypothesis class is empty")
        self.mode = mode
        self.domain = domain

    def patterns(self, points, n) -> dict:
        out = {}
        for h in self.hypotheses:
            pattern = tuple(corrupt(h, x, n, mode=self.mode, domain=self.domain) for x in points)
            out.setdefault(pattern, h)
        return out

    def to_dict(self) -> dict:
        return {
            "kind": "explicit",
            "mode": self.mode,
            "hypotheses": [h.to_dict() for h in self.hypotheses if hasattr(h, "to_dict")],
        }


def family_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "halfspace":
        return HalfspaceFamily(int(doc["d"]))
    if kind == "explicit":
        return ExplicitFamily([hypothesis_from_dict(h) for h in doc["hypotheses"]],
                              mode=doc.get("mode", "exact"))
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------- shattering


def loss_vector(pattern: Sequence, labels: Sequence) -> tuple[int, ...]:
    return tuple(corrupted_loss(v, y) for v, y in zip(pattern, labels))


def shattering_coefficient(family, points: Sequence, labels: Sequence, n) -> dict:
    """Achieved corrupted loss vectors on ``(points, labels)`` mapped to a witness hypothesis.

    The size of the returned mapping is the shattering count for this tuple.
    """
    if len(points) != len(labels):
        raise ValueError("points and labels differ in length")
    out = {}
    for pattern, h in family.patterns(points, n).items():
        out.setdefault(loss_vector(pattern, labels), h)
    return out


@dataclass
class ShatterWitness:
    points: list
    labels: tuple
    entries: list  # (loss_vector, hypothesis)
    family: dict = field(default_factory=dict)
    neighborhood: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "neighborhood": self.neighborhood,
            "points": [[fmt_exact(c) for c in x] for x in self.points],
            "labels": [label_text(y) for y in self.labels],
            "witnesses": [
                {"loss_vector": list(v), "hypothesis": h.to_dict()} for v, h in self.entries
            ],
        }


def _labelings(n: int):
    return itertools.product((-1, 1), repeat=n)


def is_adversarially_shattered(family, n, points: Sequence):
    """``(shattered, witness)`` for a fixed tuple of points.

    Labelings are tried in lexicographic order (-1 before +1); the first one
    achieving all 2^k loss vectors is returned with one witness per vector.
    """
    points = [qvec(x) for x in points]
    k = len(points)
    if k == 0:
        return True, ShatterWitness([], (), [], _family_doc(family), _nbhd_doc(n))
    patterns = family.patterns(points, n)
    if len(patterns) < 2 ** k:
        return False, None
    for labels in _labelings(k):
        vectors = {}
        for pattern, h in patterns.items():
            vectors.setdefault(loss_vector(pattern, labels), h)
        if len(vectors) == 2 ** k:
            entries = sorted(vectors.items())
            return True, ShatterWitness(points, labels, entries, _family_doc(family), _nbhd_doc(n))
    return False, None


def _family_doc(family):
    return family.to_dict() if hasattr(family, "to_dict") else {}


def _nbhd_doc(n):
    return n.to_dict() if hasattr(n, "to_dict") else {}


@dataclass
class WitnessCheck:
    ok: bool
    problems: list


def verify_witness(doc: dict) -> WitnessCheck:
    """Re-derive every recorded loss vector through the corruption oracle."""
    problems = []
    n = neighborhood_from_dict(doc["neighborhood"])
    points = [qvec(x) for x in doc["points"]]
    labels = [parse_label(y) for y in doc["labels"]]
    if len(points) != len(labels):
        problems.append("points and labels differ in length")
    mode = doc.get("family", {}).get("mode", "exact")
    seen = set()
    for i, entry in enumerate(doc["witnesses"]):
        h = hypothesis_from_dict(entry["hypothesis"])
        claimed = tuple(int(v) for v in entry["loss_vector"])
        got = tuple(corrupted_loss(corrupt(h, x, n, mode=mode), y) for x, y in zip(points, labels))
        if got != claimed:
            problems.append(f"witness {i}: claimed loss vector {claimed}, oracle gives {got}")
        seen.add(claimed)
    expected = set(itertools.product((0, 1), repeat=len(points)))
    if seen != expected:
        problems.append(f"{len(expected - seen)} of {len(expected)} loss vectors lack a witness")
    return WitnessCheck(not problems, problems)


# ---------------------------------------------------------------- AVC search


@dataclass
class AvcResult:
    best_n: int
    witness: ShatterWitness | None
    subsets_checked: dict
    exhausted_next: bool
    grid_size: int

    def report(self) -> str:
        nxt = self.best_n + 1
        if self.exhausted_next:
            tail = f"no {nxt}-subset of this {self.grid_size}-point grid is adversarially shattered"
        else:
            tail = f"{nxt}-subsets were not exhausted"
        return f"AVC >= {self.best_n} (certified by witness); {tail}"


def _check_chunk(args):
    family, n, chunk = args
    for subset in chunk:
        ok, witness = is_adversarially_shattered(family, n, subset)
        if ok:
            return subset, witness
    return None


def _chunks(iterable, size):
    it = iter(iterable)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def search_size(family, n, grid, size: int, workers: int = 1, chunk: int = 256):
    """First shattered ``size``-subset of ``grid`` in lexicographic order, or None."""
    subsets = itertools.combinations(grid, size)
    if workers <= 1:
        for block in _chunks(subsets, chunk):
            found = _check_chunk((family, n, block))
            if found:
                return found
        return None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        blocks = ((family, n, block) for block in _chunks(subsets, chunk))
        # map preserves submission order, so the first hit is the lexicographic first
        for found in pool.map(_check_chunk, blocks):
            if found:
                return found
    return None


def avc_lower_bound(family, n, grid: Sequence, max_n: int | None = None,
                    max_subsets: int = DEFAULT_MAX_SUBSETS, workers: int = 1) -> AvcResult:
    """Largest k such that some k-subset of ``grid`` is adversarially shattered.

    Stops at the first size with no shattered subset (shattering is inherited
    by subsets), so ``exhausted_next`` certifies that no (best_n+1)-subset of
    this grid is shattered.  This bounds the continuous class's AVC from below
    only.
    """
    grid = [qvec(x) for x in dict.fromkeys(tuple(qvec(x)) for x in grid)]
    result = AvcResult(0, ShatterWitness([], (), [], _family_doc(family), _nbhd_doc(n)), {}, False, len(grid))
    size = 1
    while size <= len(grid) and (max_n is None or size <= max_n):
        count = math.comb(len(grid), size)
        if count > max_subsets:
            raise GuardExceeded(
                f"{count} subsets of size {size} exceed the guard of {max_subsets}", partial=result
            )
        found = search_size(family, n, grid, size, workers=workers)
        result.subsets_checked[size] = count if found is None else None
        if found is None:
            result.exhausted_next = True
            return result
        result.best_n, result.witness = size, found[1]
        size += 1
    return result


def grid_points(d: int, lo, hi, step) -> list[tuple[Fraction, ...]]:
    lo, hi, step = qvec((lo, hi, step))
    if step <= 0:
        raise ValueError("grid step must be positive")
    axis = []
    v = lo
    while v <= hi:
        axis.append(v)
        v += step
    return [tuple(p) for p in itertools.product(axis, repeat=d)]


# ---------------------------------------------------------------- bound calculators


def sauer_bound(d: int, m: int) -> float:
    """``(e m / d)^d``, the Sauer-lemma growth bound for VC dimension d (m >= d)."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if m < d:
        raise ValueError(f"m={m} < d={d}: the (em/d)^d form needs m >= d")
    return (math.e * m / d) ** d


def neuron_growth_term(d: int, m: int) -> float:
    """Per-neuron factor used along the growth chain: Sauer for m >= d, else 2^m."""
    return sauer_bound(d, m) if m >= d else float(2 ** m)


@dataclass(frozen=True)
class GrowthBound:
    edges: int
    m: int
    loose: float
    per_neuron: float | None
    per_neuron_extended: float


def network_growth_bound(net, m: int) -> GrowthBound:
    """``(e m)^|E|`` plus the tighter product of per-neuron Sauer terms.

    ``net`` is a :class:`SignNetwork` or a list of layer sizes.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    sizes = net.layer_sizes if isinstance(net, SignNetwork) else tuple(net)
    ds = [sizes[t - 1] + 1 for t in range(1, len(sizes)) for _ in range(sizes[t])]
    edges = sum(ds)
    loose = _safe_pow(math.e * m, edges)
    extended = math.prod(neuron_growth_term(d, m) for d in ds)
    per_neuron = extended if m >= max(ds) else None
    return GrowthBound(edges, m, loose, per_neuron, extended)


def _safe_pow(base: float, exp: int) -> float:
    try:
        return base ** exp
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class ThresholdRow:
    edges: int
    m_star: int
    closed_form: float

    @property
    def closed_form_ceil(self) -> int:
        return math.ceil(self.closed_form)


_PREC = 80


def shatter_inequality_gap(m: int, edges: int) -> Decimal:
    """``edges*ln(e*m) - m*ln 2`` at 80 significant digits; >= 0 iff 2^m <= (e m)^edges."""
    with localcontext() as ctx:
        ctx.prec = _PREC
        gap = edges * (1 + Decimal(m).ln()) - m * Decimal(2).ln()
        if abs(gap) < Decimal(10) ** (-(_PREC - 20)):
            raise ArithmeticError(f"cannot separate 2^{m} from (e*{m})^{edges}")
        return +gap


def lemma3_threshold(edges: int) -> ThresholdRow:
    """Largest m with ``2^m <= (e m)^edges`` and the closed-form cap from the proof chain.

    The gap ``edges*(1 + ln m) - m ln 2`` is concave in m and positive at
    m = 1, so the first failure ends the scan.
    """
    if edges < 1:
        raise ValueError("edges must be at least 1")
    m = 1
    while shatter_inequality_gap(m + 1, edges) >= 0:
        m += 1
    ln2 = math.log(2)
    closed = (2 * edges / ln2) * math.log(math.e * edges / ln2)
    return ThresholdRow(edges, m, closed)


# ---------------------------------------------------------------- randomized bound trials


@dataclass(frozen=True)
class BoundTrial:
    kind: str
    trial: int
    m: int
    check: BoundCheck


def _random_class(rng, domain, alphabet, size):
    rows = rng.integers(0, len(alphabet), size=(size, len(domain)))
    return FiniteClass(tuple(domain), [tuple(alphabet[int(v)] for v in row) for row in rows])


def run_bound_trials(trials: int, seed: int, domain_size=(2, 6), alphabet_size=(2, 4),
                     class_size=(1, 8)) -> list[BoundTrial]:
    """Random finite classes checked against the composition and product bounds.

    Each trial draws a domain, an intermediate alphabet and classes of random
    sizes, then runs both exhaustive verifiers at a random m.
    """
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        nx = int(rng.integers(domain_size[0], domain_size[1] + 1))
        nz = int(rng.integers(alphabet_size[0], alphabet_size[1] + 1))
        domain = tuple(range(nx))
        inner = tuple(f"z{i}" for i in range(nz))
        m = int(rng.integers(1, nx + 1))

        def size():
            return int(rng.integers(class_size[0], class_size[1] + 1))

        f1 = _random_class(rng, domain, inner, size())
        f2 = _random_class(rng, inner, (-1, 1), size())
        out.append(BoundTrial("composition", t, m, verify_composition_bound(f1, f2, m)))
        g1 = _random_class(rng, domain, (-1, 1), size())
        g2 = _random_class(rng, domain, inner, size())
        out.append(BoundTrial("product", t, m, verify_product_bound(g1, g2, m)))
    return out
