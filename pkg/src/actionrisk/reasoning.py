"""Risk, bias, and trust measures plus discrete Bayesian decision support.

Risk is the cost-weighted sum of the system's error rates: the false
non-match rate (1 - sensitivity) weighted by the cost of a missed match,
plus the false match rate (1 - specificity) weighted by the cost of a false
match. Bias values are signed differences of risk or reliability between
two operating conditions. A small discrete Bayesian network machinery
(exact inference by variable elimination) supports the attribute-bias
network and the three-node flu network, and the flu probability can be
penalized multiplicatively by risk.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .data import GENDERS, POSES, VIEWS
from .evaluation import CohortReport, MetricsReport

ROW_SUM_TOLERANCE = 1e-9


class InconsistentEvidenceError(ValueError):
    """The supplied evidence has probability zero under the network."""


# ---------------------------------------------------------------------------
# Risk / bias / trust scaffolding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImpactCosts:
    """alpha: cost of a false non-match; beta: cost of a false match."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("costs must be finite")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("costs must be >= 0")


@dataclass(frozen=True)
class ErrorRates:
    fnmr: float
    fmr: float

    def __post_init__(self):
        for name in ("fnmr", "fmr"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def from_metrics(cls, metrics: MetricsReport) -> "ErrorRates":
        return cls(fnmr=1.0 - metrics.sensitivity, fmr=1.0 - metrics.specificity)


@dataclass(frozen=True)
class RiskProfile:
    costs: ImpactCosts
    errors: ErrorRates

    @property
    def risk(self) -> float:
        return self.costs.alpha * self.errors.fnmr + self.costs.beta * self.errors.fmr


def risk_error(costs: ImpactCosts, metrics: MetricsReport) -> RiskProfile:
    """Risk = alpha * (1 - sensitivity) + beta * (1 - specificity)."""
    return RiskProfile(costs=costs, errors=ErrorRates.from_metrics(metrics))


def risk_value(alpha: float, beta: float, sensitivity: float, specificity: float) -> float:
    """Scalar shortcut for what-if queries over explicit sens/spec values."""
    profile = risk_error(
        ImpactCosts(alpha=alpha, beta=beta),
        MetricsReport(
            accuracy=0.0, precision=0.0, sensitivity=sensitivity, specificity=specificity
        ),
    )
    return profile.risk


def bias_risk(risk_i: float, risk_j: float) -> float:
    """Signed risk change from condition i to condition j (positive = j safer)."""
    if not (np.isfinite(risk_i) and np.isfinite(risk_j)):
        raise ValueError("risk values must be finite")
    return risk_i - risk_j


def bias_reliability(reliability_j: float, reliability_i: float) -> float:
    """Signed reliability change; positive means condition j is more reliable."""
    for v in (reliability_j, reliability_i):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"reliability must lie in [0, 1], got {v}")
    return reliability_j - reliability_i


def trust_score(risk: float, reliability: float) -> float:
    """Default trust combination: reliability / (1 + risk).

    Any monotone combination (decreasing in risk, increasing in reliability)
    satisfies the contract; this default is one convenient choice, not a
    normative formula.
    """
    if risk < 0:
        raise ValueError("risk must be >= 0")
    if not 0.0 <= reliability <= 1.0:
        raise ValueError("reliability must lie in [0, 1]")
    return reliability / (1.0 + risk)


# ---------------------------------------------------------------------------
# Discrete Bayesian networks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    """One discrete variable: states plus a CPT conditioned on its parents.

    ``cpt`` has shape (*parent_cardinalities, n_states) with parents in
    declaration order; every row (fixing all parents) sums to 1.
    """

    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...]
    cpt: np.ndarray

    def __post_init__(self):
        cpt = np.array(self.cpt, dtype=float)
        cpt.setflags(write=False)
        object.__setattr__(self, "cpt", cpt)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "parents", tuple(self.parents))
        if len(self.states) < 2:
            raise ValueError(f"node {self.name!r} needs at least two states")
        if cpt.shape[-1] != len(self.states):
            raise ValueError(f"node {self.name!r}: CPT last axis must match state count")
        if np.any(cpt < 0):
            raise ValueError(f"node {self.name!r}: CPT entries must be >= 0")
        if not np.allclose(cpt.sum(axis=-1), 1.0, atol=ROW_SUM_TOLERANCE, rtol=0):
            raise ValueError(f"node {self.name!r}: CPT rows must sum to 1")


@dataclass(frozen=True)
class DiscreteBayesNet:
    nodes: tuple[Node, ...]

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        by_name = {n.name: n for n in nodes}
        if len(by_name) != len(nodes):
            raise ValueError("duplicate node names")
        for node in nodes:
            expected = tuple(len(by_name[p].states) for p in node.parents if p in by_name)
            if any(p not in by_name for p in node.parents):
                missing = [p for p in node.parents if p not in by_name]
                raise ValueError(f"node {node.name!r} references unknown parents {missing}")
            if node.cpt.shape[:-1] != expected:
                raise ValueError(
                    f"node {node.name!r}: CPT shape {node.cpt.shape} does not cover "
                    f"parent cardinalities {expected}"
                )
        self._check_acyclic(by_name)

    @staticmethod
    def _check_acyclic(by_name: Mapping[str, Node]) -> None:
        seen: dict[str, int] = {}  # 1 = visiting, 2 = done

        def visit(name: str) -> None:
            mark = seen.get(name)
            if mark == 1:
                raise ValueError(f"cycle detected through node {name!r}")
            if mark == 2:
                return
            seen[name] = 1
            for parent in by_name[name].parents:
                visit(parent)
            seen[name] = 2

        for name in by_name:
            visit(name)

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(f"no node named {name!r}")

    def state_index(self, name: str, state: str) -> int:
        node = self.node(name)
        try:
            return node.states.index(state)
        except ValueError:
            raise ValueError(f"node {name!r} has no state {state!r}") from None


def infer(
    net: DiscreteBayesNet, evidence: Mapping[str, str], query: str
) -> dict[str, float]:
    """Exact posterior over the query node's states given the evidence.

    Implemented by sum-product variable elimination over the CPT factors;
    evidence is applied by slicing factors to the observed states. Raises
    InconsistentEvidenceError if the evidence has zero probability.
    """
    query_node = net.node(query)
    if query in evidence:
        raise ValueError("query node cannot also be evidence")
    evidence_idx = {name: net.state_index(name, state) for name, state in evidence.items()}

    # Factors as (variable-name tuple, ndarray with one axis per variable).
    factors: list[tuple[tuple[str, ...], np.ndarray]] = []
    for node in net.nodes:
        variables = node.parents + (node.name,)
        table = np.asarray(node.cpt, dtype=float)
        for axis in reversed(range(len(variables))):
            var = variables[axis]
            if var in evidence_idx:
                table = np.take(table, evidence_idx[var], axis=axis)
                variables = variables[:axis] + variables[axis + 1 :]
        factors.append((variables, table))

    def expand(variables, table, merged):
        # Broadcastable view with the factor's axes in merged order.
        positions = [merged.index(v) for v in variables]
        table = np.transpose(table, np.argsort(positions))
        shape = [1] * len(merged)
        for pos, size in zip(sorted(positions), table.shape):
            shape[pos] = size
        return table.reshape(shape)

    def multiply(a, b):
        vars_a, t_a = a
        vars_b, t_b = b
        merged = vars_a + tuple(v for v in vars_b if v not in vars_a)
        return merged, expand(vars_a, t_a, merged) * expand(vars_b, t_b, merged)

    hidden = [
        node.name
        for node in net.nodes
        if node.name != query and node.name not in evidence_idx
    ]
    for var in hidden:
        involved = [f for f in factors if var in f[0]]
        rest = [f for f in factors if var not in f[0]]
        product = involved[0]
        for other in involved[1:]:
            product = multiply(product, other)
        variables, table = product
        axis = variables.index(var)
        rest.append((variables[:axis] + variables[axis + 1 :], table.sum(axis=axis)))
        factors = rest

    result = factors[0]
    for other in factors[1:]:
        result = multiply(result, other)
    variables, table = result
    if variables != (query,):
        axis = variables.index(query)
        table = np.moveaxis(table, axis, -1).sum(axis=tuple(range(table.ndim - 1)))
    total = table.sum()
    if total <= 0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)!r} has probability zero")
    return {state: float(p) for state, p in zip(query_node.states, table / total)}


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def net_to_json(net: DiscreteBayesNet) -> str:
    """Stable JSON form: nodes in order, CPT rows row-major over parent states."""
    doc = {
        "nodes": [
            {
                "name": n.name,
                "states": list(n.states),
                "parents": list(n.parents),
                "cpt": np.asarray(n.cpt).reshape(-1, len(n.states)).tolist(),
            }
            for n in net.nodes
        ]
    }
    return json.dumps(doc, indent=2)


def net_from_json(text: str) -> DiscreteBayesNet:
    doc = json.loads(text)
    cards: dict[str, int] = {}
    nodes = []
    for entry in doc["nodes"]:
        cards[entry["name"]] = len(entry["states"])
        parent_shape = tuple(cards[p] for p in entry["parents"])
        cpt = np.asarray(entry["cpt"], dtype=float).reshape(
            parent_shape + (len(entry["states"]),)
        )
        nodes.append(
            Node(
                name=entry["name"],
                states=tuple(entry["states"]),
                parents=tuple(entry["parents"]),
                cpt=cpt,
            )
        )
    return DiscreteBayesNet(nodes=tuple(nodes))


# ---------------------------------------------------------------------------
# Attribute-bias network
# ---------------------------------------------------------------------------

DEFAULT_ATTRIBUTE_PRIORS: Mapping[str, Mapping[str, float]] = {
    "gender": {"male": 0.60, "female": 0.40},
    "pose": {"stand": 0.50, "walk": 0.50},
    "view": {"left": 1 / 3, "center": 1 / 3, "right": 1 / 3},
}


def build_bias_network(
    report: CohortReport,
    priors: Mapping[str, Mapping[str, float]] | None = None,
) -> DiscreteBayesNet:
    """Gender/pose/view -> Valid -> Match network from cohort statistics.

    The Valid node holds the probability of a correct (valid) rank-1 call
    for each attribute combination, composed from the per-cohort rates by
    the product of marginal deviation ratios against the baseline rate:

        rate(g, p, v) = clamp(rate_g * rate_p * rate_v / baseline^2, 0, 1)

    so that cohorts matching the baseline leave the rate unchanged. Absent
    cohorts fall back to the baseline rate (with a warning). The Match node
    passes validity through to the decision level: a valid call matches the
    ground truth, an invalid one does not.
    """
    priors = priors or DEFAULT_ATTRIBUTE_PRIORS
    baseline = report.baseline.metrics.accuracy

    def cohort_rate(attribute: str, value: str) -> float:
        entry = report.cohorts[attribute][value]
        if entry is None:
            warnings.warn(
                f"bias network: cohort {attribute}={value} absent, using baseline rate",
                RuntimeWarning,
                stacklevel=3,
            )
            return baseline
        return entry.metrics.accuracy

    def composed(g: str, p: str, v: str) -> float:
        if baseline <= 0.0:
            return 0.0
        rate = (
            cohort_rate("gender", g)
            * cohort_rate("pose", p)
            * cohort_rate("view", v)
            / baseline**2
        )
        return min(max(rate, 0.0), 1.0)

    def prior_node(name: str, states: tuple[str, ...]) -> Node:
        table = np.array([priors[name][s] for s in states], dtype=float)
        table = table / table.sum()
        return Node(name=name, states=states, parents=(), cpt=table)

    valid_cpt = np.zeros((len(GENDERS), len(POSES), len(VIEWS), 2))
    for i, g in enumerate(GENDERS):
        for j, p in enumerate(POSES):
            for k, v in enumerate(VIEWS):
                rate = composed(g, p, v)
                valid_cpt[i, j, k] = (rate, 1.0 - rate)

    match_cpt = np.array([[1.0, 0.0], [0.0, 1.0]])  # rows: valid, invalid
    return DiscreteBayesNet(
        nodes=(
            prior_node("gender", GENDERS),
            prior_node("pose", POSES),
            prior_node("view", VIEWS),
            Node(
                name="valid",
                states=("valid", "invalid"),
                parents=("gender", "pose", "view"),
                cpt=valid_cpt,
            ),
            Node(name="match", states=("match", "nomatch"), parents=("valid",), cpt=match_cpt),
        )
    )


# ---------------------------------------------------------------------------
# Flu decision support
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FluAssessment:
    """Risk-penalized flu probability; adjusted = base / (1 + risk)."""

    risk: float
    p_flu_base: float
    p_flu_adjusted: float
    p_cough: float | None = None
    p_sneeze: float | None = None


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def flu_probability(p_cough: float, p_sneeze: float) -> float:
    """Base flu probability: the arithmetic mean of the symptom probabilities."""
    _check_probability("p_cough", p_cough)
    _check_probability("p_sneeze", p_sneeze)
    return (p_cough + p_sneeze) / 2.0


def risk_adjusted_flu(
    p_flu: float,
    risk: float,
    p_cough: float | None = None,
    p_sneeze: float | None = None,
) -> FluAssessment:
    """Penalize the flu probability multiplicatively: p / (1 + risk).

    Zero risk leaves the probability unchanged; the adjusted value never
    exceeds the base value.
    """
    _check_probability("p_flu", p_flu)
    if risk < 0:
        raise ValueError(f"risk must be >= 0, got {risk}")
    return FluAssessment(
        risk=risk,
        p_flu_base=p_flu,
        p_flu_adjusted=p_flu / (1.0 + risk),
        p_cough=p_cough,
        p_sneeze=p_sneeze,
    )


def assess_flu(p_cough: float, p_sneeze: float, risk: float) -> FluAssessment:
    """Full assessment from symptom probabilities and a risk value."""
    return risk_adjusted_flu(
        flu_probability(p_cough, p_sneeze), risk, p_cough=p_cough, p_sneeze=p_sneeze
    )


def build_flu_network(p_cough: float, p_sneeze: float) -> DiscreteBayesNet:
    """Three-node network: Cough and Sneeze roots feeding a Flu node.

    The Flu CPT averages the detected symptoms (both -> certain, one -> 0.5,
    none -> 0), so the marginal P(flu=yes) equals the arithmetic mean of the
    symptom probabilities.
    """
    _check_probability("p_cough", p_cough)
    _check_probability("p_sneeze", p_sneeze)
    yes_no = ("yes", "no")
    flu_cpt = np.array(
        [
            [[1.0, 0.0], [0.5, 0.5]],
            [[0.5, 0.5], [0.0, 1.0]],
        ]
    )
    return DiscreteBayesNet(
        nodes=(
            Node(name="cough", states=yes_no, parents=(), cpt=np.array([p_cough, 1 - p_cough])),
            Node(name="sneeze", states=yes_no, parents=(), cpt=np.array([p_sneeze, 1 - p_sneeze])),
            Node(name="flu", states=yes_no, parents=("cough", "sneeze"), cpt=flu_cpt),
        )
    )
