"""Exact corruption oracles, adversarial risks and capacity checks for sign-activation classifiers."""

from .capacity import (
    ExplicitFamily,
    HalfspaceFamily,
    ShatterWitness,
    avc_lower_bound,
    growth_function,
    is_adversarially_shattered,
    lemma3_threshold,
    network_growth_bound,
    sauer_bound,
    shattering_coefficient,
    verify_composition_bound,
    verify_product_bound,
    verify_witness,
)
from .corruption import (
    BOT,
    AffineFunction,
    corrupt,
    corrupt_continuous,
    corrupt_halfspace,
    corrupt_multiclass,
    corrupt_network_exact,
    corrupt_network_interval,
)
from .geometry import (
    FiniteNeighborhood,
    LinearSystem,
    LpBall,
    ball_contains,
    dual_norm,
    lp_feasible,
    margin_interval,
)
from .hypotheses import (
    FiniteClass,
    Halfspace,
    SignNetwork,
    compose_classes,
    edge_count,
    eval_halfspace,
    eval_network,
    grid_halfspace_class,
    product_classes,
)
from .risk import (
    FiniteDistribution,
    LabeledSample,
    adversarial_empirical_risk,
    adversarial_true_risk,
    aerm,
    corrupted_loss,
    enumerate_halfspace_candidates,
    monte_carlo_true_risk,
)

__version__ = "0.1.0"

__all__ = [
    "adversarial_empirical_risk",
    "adversarial_true_risk",
    "aerm",
    "AffineFunction",
    "avc_lower_bound",
    "ball_contains",
    "BOT",
    "compose_classes",
    "corrupt",
    "corrupt_continuous",
    "corrupt_halfspace",
    "corrupt_multiclass",
    "corrupt_network_exact",
    "corrupt_network_interval",
    "corrupted_loss",
    "dual_norm",
    "edge_count",
    "enumerate_halfspace_candidates",
    "eval_halfspace",
    "eval_network",
    "ExplicitFamily",
    "FiniteClass",
    "FiniteDistribution",
    "FiniteNeighborhood",
    "grid_halfspace_class",
    "growth_function",
    "Halfspace",
    "HalfspaceFamily",
    "is_adversarially_shattered",
    "LabeledSample",
    "lemma3_threshold",
    "LinearSystem",
    "lp_feasible",
    "LpBall",
    "margin_interval",
    "monte_carlo_true_risk",
    "network_growth_bound",
    "product_classes",
    "sauer_bound",
    "shattering_coefficient",
    "ShatterWitness",
    "SignNetwork",
    "verify_composition_bound",
    "verify_product_bound",
    "verify_witness",
]
