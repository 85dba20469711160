"""Error diagnostics and closed-form convergence bounds.

Four error families describe a run: per-cluster follower disagreement
(Frobenius distance of a follower block from its own average), leader
disagreement, the per-cluster gap between follower average and leader, and
per-node distance from the leader average.  Each family has a closed-form
envelope:

    follower disagreement:  ((1 - gamma) * sigma_a)^k * ||X_a(0)||
    leader disagreement:    2 * eta^k * ||X_L(0)||
    leader-follower gap:    (1 - gamma)^k * gap_a(0) + 2 * P * beta / gamma
    per-node error:         sum of the three above

with eta = 1 - beta + delta_c * beta / (1 - beta)^tau.  The leader envelope
contracts exactly when beta < beta_max = 1 - delta_c^(1/tau); at beta_max
the rate eta equals one.  Matrix norms are Frobenius, vector norms
Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import ConsistencyError, DomainError
from .topology import spectral_summary

VERIFY_SLACK = 1e-9

BOUND_FAMILIES = ("follower_disagreement", "leader_disagreement",
                  "leader_follower_gap", "node_error")


# ---------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsRecord:
    """Error families at one iteration.

    cluster_node_error[a] is the largest distance from a follower of
    cluster a to the leader average; global_error extends that maximum over
    the leaders as well.
    """

    k: int
    follower_disagreement: tuple
    leader_disagreement: float
    leader_follower_gap: tuple
    cluster_node_error: tuple
    global_error: float


def diagnostics(state) -> DiagnosticsRecord:
    """Compute all error families from a simulation state."""
    blocks = state.follower_blocks
    leaders = state.leader_block
    lead_avg = leaders.mean(axis=0)
    follower_dis = []
    gaps = []
    node_err = []
    for a, block in enumerate(blocks):
        avg = block.mean(axis=0)
        follower_dis.append(float(np.linalg.norm(block - avg)))
        gaps.append(float(np.linalg.norm(avg - leaders[a])))
        node_err.append(float(np.linalg.norm(block - lead_avg, axis=1).max()))
    leader_dis = float(np.linalg.norm(leaders - lead_avg))
    leader_err = float(np.linalg.norm(leaders - lead_avg, axis=1).max())
    return DiagnosticsRecord(
        k=int(state.k),
        follower_disagreement=tuple(follower_dis),
        leader_disagreement=leader_dis,
        leader_follower_gap=tuple(gaps),
        cluster_node_error=tuple(node_err),
        global_error=max(max(node_err), leader_err),
    )


# ---------------------------------------------------------------------
# step-size algebra
# ---------------------------------------------------------------------

def max_stable_beta(delta_c: float, tau: int) -> float:
    """Largest leader step size with a contracting envelope: for tau >= 1
    this is 1 - delta_c^(1/tau); without delay it degenerates to
    1 - delta_c."""
    if not (0.0 < delta_c < 1.0):
        raise DomainError(f"delta_c must lie in (0, 1), got {delta_c}")
    if not (isinstance(tau, Integral) and tau >= 0):
        raise DomainError(f"tau must be a non-negative integer, got {tau!r}")
    if tau == 0:
        return 1.0 - delta_c
    return 1.0 - delta_c ** (1.0 / tau)


def eta(beta: float, delta_c: float, tau: int) -> float:
    """Leader-disagreement contraction rate 1 - beta + delta_c*beta/(1-beta)^tau.

    Defined for beta in [0, 1); at beta = 1 the delay correction degenerates.
    delta_c = 0 (single leader) is allowed and gives 1 - beta.
    """
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"beta must lie in [0, 1) for eta, got {beta}")
    if not (0.0 <= delta_c < 1.0):
        raise DomainError(f"delta_c must lie in [0, 1), got {delta_c}")
    if not (isinstance(tau, Integral) and tau >= 0):
        raise DomainError(f"tau must be a non-negative integer, got {tau!r}")
    return 1.0 - beta + delta_c * beta / (1.0 - beta) ** tau


# ---------------------------------------------------------------------
# bound parameters
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class BoundParams:
    """Everything the closed-form envelopes need about one run.

    The leader and node-error envelopes require an admissible beta
    (0 < beta < beta_max); the follower families additionally require the
    run to use no intra-cluster delay, since their derivation reads
    neighbour states undelayed.
    """

    sigma_per_cluster: tuple
    delta_c: float
    beta_max: float
    tau: int
    tau_intra: int
    gamma: float
    beta: float
    eta: float | None
    p_max: float
    follower_init_norms: tuple
    leader_init_norm: float
    initial_gaps: tuple
    fingerprint: str

    @property
    def beta_admissible(self) -> bool:
        return 0.0 < self.beta < self.beta_max

    @property
    def leader_applicable(self) -> bool:
        return self.beta_admissible and self.eta is not None

    @property
    def follower_applicable(self) -> bool:
        return self.tau_intra == 0


def bound_params(network, spec) -> BoundParams:
    """Assemble bound parameters for the run that `spec` describes.

    Recomputes the seeded initial values, so the result matches the traces
    produced by the run drivers for the same spec.
    """
    from .engine import sample_initial_values  # local import to avoid a cycle

    summary = spectral_summary(network, spec.tau)
    vals = sample_initial_values(spec, network.total_nodes)
    blocks = [vals[list(c.follower_ids)] for c in network.clusters]
    leaders = np.stack([vals[c.leader_id] for c in network.clusters])
    rate = (eta(spec.beta, summary.delta_c, spec.tau)
            if spec.beta < 1.0 else None)
    return BoundParams(
        sigma_per_cluster=summary.sigma_per_cluster,
        delta_c=summary.delta_c,
        beta_max=summary.beta_max,
        tau=spec.tau,
        tau_intra=spec.tau_intra,
        gamma=spec.gamma,
        beta=spec.beta,
        eta=rate,
        p_max=float(np.linalg.norm(vals, axis=1).max()),
        follower_init_norms=tuple(float(np.linalg.norm(b)) for b in blocks),
        leader_init_norm=float(np.linalg.norm(leaders)),
        initial_gaps=tuple(
            float(np.linalg.norm(b.mean(axis=0) - leaders[a]))
            for a, b in enumerate(blocks)
        ),
        fingerprint=spec.fingerprint(),
    )


# ---------------------------------------------------------------------
# closed-form envelopes
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class BoundValues:
    """Envelope values at one iteration; None marks an inapplicable family."""

    k: int
    follower: tuple | None
    leader: float | None
    gap: tuple | None
    node: tuple | None


def theoretical_bounds(params: BoundParams, k: int) -> BoundValues:
    """Evaluate every applicable envelope at iteration k.

    Families whose hypotheses the run violates (beta outside (0, beta_max)
    for the leader and node families, intra-cluster delay for the follower
    families) are reported as None rather than as numbers.
    """
    if not (isinstance(k, Integral) and k >= 0):
        raise DomainError(f"iteration must be a non-negative integer, got {k!r}")
    follower = leader = gap = node = None
    if params.follower_applicable:
        follower = tuple(
            ((1.0 - params.gamma) * s) ** k * n0
            for s, n0 in zip(params.sigma_per_cluster, params.follower_init_norms)
        )
        residual = 2.0 * params.p_max * params.beta / params.gamma
        gap = tuple(
            (1.0 - params.gamma) ** k * g0 + residual
            for g0 in params.initial_gaps
        )
    if params.leader_applicable:
        leader = 2.0 * params.eta ** k * params.leader_init_norm
    if follower is not None and leader is not None:
        node = tuple(f + leader + g for f, g in zip(follower, gap))
    return BoundValues(int(k), follower, leader, gap, node)


# ---------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    k: int
    family: str
    cluster: int | None
    empirical: float
    theoretical: float
    satisfied: bool


@dataclass(frozen=True)
class FamilySummary:
    applicable: bool
    checked: int
    failures: int
    worst_margin: float | None     # max(empirical - theoretical); <= slack if ok
    first_violation_k: int | None

    @property
    def ok(self) -> bool:
        return self.applicable and self.failures == 0


@dataclass(frozen=True)
class BoundReport:
    fingerprint: str
    slack: float
    checks: tuple
    families: dict

    @property
    def all_satisfied(self) -> bool:
        return all(f.failures == 0 for f in self.families.values())

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "slack": self.slack,
            "all_satisfied": self.all_satisfied,
            "families": {
                name: {
                    "applicable": f.applicable,
                    "checked": f.checked,
                    "failures": f.failures,
                    "worst_margin": f.worst_margin,
                    "first_violation_k": f.first_violation_k,
                }
                for name, f in self.families.items()
            },
            "checked": len(self.checks),
            "violations": [
                {
                    "k": c.k,
                    "family": c.family,
                    "cluster": c.cluster,
                    "empirical": c.empirical,
                    "theoretical": c.theoretical,
                }
                for c in self.checks
                if not c.satisfied
            ],
        }


def verify_bounds(trace, params: BoundParams,
                  slack: float = VERIFY_SLACK) -> BoundReport:
    """Compare every recorded iteration against the closed-form envelopes.

    A check is satisfied when empirical <= theoretical + slack.  The trace
    and the parameters must fingerprint the same configuration; a mismatch
    raises ConsistencyError rather than producing a nonsense verdict.
    """
    if trace.fingerprint != params.fingerprint:
        raise ConsistencyError(
            f"trace fingerprint {trace.fingerprint[:12]}... does not match "
            f"bound parameters {params.fingerprint[:12]}..."
        )
    checks = []
    stats = {name: [0, 0, None, None] for name in BOUND_FAMILIES}

    def add(family, k, cluster, emp, theo):
        ok = emp <= theo + slack
        margin = emp - theo
        s = stats[family]
        s[0] += 1
        if not ok:
            s[1] += 1
            if s[3] is None:
                s[3] = k
        if s[2] is None or margin > s[2]:
            s[2] = margin
        checks.append(BoundCheck(k, family, cluster, float(emp), float(theo), ok))

    for rec in trace.records:
        values = theoretical_bounds(params, rec.k)
        if values.follower is not None:
            for a, theo in enumerate(values.follower):
                add("follower_disagreement", rec.k, a,
                    rec.follower_disagreement[a], theo)
            for a, theo in enumerate(values.gap):
                add("leader_follower_gap", rec.k, a,
                    rec.leader_follower_gap[a], theo)
        if values.leader is not None:
            add("leader_disagreement", rec.k, None,
                rec.leader_disagreement, values.leader)
        if values.node is not None:
            for a, theo in enumerate(values.node):
                add("node_error", rec.k, a, rec.cluster_node_error[a], theo)

    applicability = {
        "follower_disagreement": params.follower_applicable,
        "leader_disagreement": params.leader_applicable,
        "leader_follower_gap": params.follower_applicable,
        "node_error": params.follower_applicable and params.leader_applicable,
    }
    families = {
        name: FamilySummary(
            applicable=applicability[name],
            checked=stats[name][0],
            failures=stats[name][1],
            worst_margin=stats[name][2],
            first_violation_k=stats[name][3],
        )
        for name in BOUND_FAMILIES
    }
    return BoundReport(trace.fingerprint, slack, tuple(checks), families)
