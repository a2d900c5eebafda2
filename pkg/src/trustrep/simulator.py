"""Agent-based robustness harness for the reputation engine.

Populations of honest and hostile agents interact with synthetic products
through the real library pipeline (no mocked math). Strategies:

  - Honest: rates near the product's true quality (uniform +-0.5 noise,
    clipped to [1, 5]), writes text whose polarity matches the rating, and
    likes a served feedback exactly when its text polarity sign matches the
    sign of (true_quality - 3);
  - Random: uniform rating, random text polarity, coin-flip votes;
  - BallotStuffer: always rates its target product 5 with praise text and
    likes everything it is served;
  - BadMouther: always rates its target 1 with attack text and dislikes
    everything;
  - ContradictoryBot: submits same-aspect conflicting text (always refused
    by the concordance gate), and each attempt is preserved into the
    knowledge base as a -10 contradictory probe so selections can trap
    like-everything voters.

Runs are single-threaded and fully determined by the scenario's rng_seed:
ids, timestamps, and report bytes are reproducible.

Report schema (plain dict, JSON-serializable):
  config   echo of the scenario.
  initial  pre-run snapshot (products unrated, trust 0).
  rounds   one snapshot per round: per product ``score`` and ``abs_error``
           (null while unrated), per agent group ``mean_trust`` and the
           count currently ``blacklisted``.
  final    mean_trust per group, cumulative blacklist_events per group,
           and score_drift per product: the incremental score, a batch
           recomputation weighting every finalized rating by its author's
           end-of-run trust (included only while that trust is positive),
           and the absolute gap between the two.

CSV/table formats flatten the per-round snapshots: one header plus one row
per round, columns ``round``, ``score[<product>]``, ``abs_error[<product>]``,
``mean_trust[<group>]``, ``blacklisted[<group>]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from random import Random

from .domain import (
    APPRECIATION_MAX,
    APPRECIATION_MIN,
    SELECTION_MAX,
    SELECTION_MIN,
    TRUST_MIN,
    FeedbackCategory,
    FeedbackRecord,
    SessionState,
    VoteChoice,
)
from .engine import finalize_session, process_vote, submit_review
from .errors import InvalidValueError
from .store import DEFAULT_BLACKLIST_TTL, KnowledgeBase
from .textanalysis import Lexicon, classify_feedback, default_lexicon

SIM_EPOCH = 1_700_000_000
ROUND_SECONDS = 3600

_POSITIVE_ADJECTIVES = ("great", "excellent", "fantastic", "reliable", "impressive")
_NEGATIVE_ADJECTIVES = ("terrible", "awful", "poor", "disappointing", "unreliable")
_ASPECT_NOUNS = ("screen", "battery", "camera", "keyboard", "speaker")

#: Trustworthiness of seeded stock: tellers of truth about the product get
#: positive values, liars negative ones, so aligned voting is rewarded.
_SEED_TRUST_TRUE = (9.5, 6.0, 2.0)
_SEED_TRUST_FALSE = (-9.5, -6.0, -2.0)
_SEED_TRUST_MITIGATED = (-1.0, 0.5)


class AgentStrategy(str, Enum):
    HONEST = "Honest"
    RANDOM = "Random"
    BALLOT_STUFFER = "BallotStuffer"
    BAD_MOUTHER = "BadMouther"
    CONTRADICTORY_BOT = "ContradictoryBot"


@dataclass(frozen=True)
class ProductSpec:
    product_id: str
    true_quality: float

    def __post_init__(self):
        if not APPRECIATION_MIN <= self.true_quality <= APPRECIATION_MAX:
            raise InvalidValueError(
                f"true_quality {self.true_quality} outside [{APPRECIATION_MIN}, {APPRECIATION_MAX}]"
            )


@dataclass(frozen=True)
class AgentGroup:
    agent_id: str
    strategy: AgentStrategy
    count: int

    def __post_init__(self):
        if self.count <= 0:
            raise InvalidValueError("agent count must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    rng_seed: int
    rounds: int
    products: tuple[ProductSpec, ...]
    agents: tuple[AgentGroup, ...]
    k: int = 6
    blacklist_ttl: int = DEFAULT_BLACKLIST_TTL

    def __post_init__(self):
        if self.rounds < 0:
            raise InvalidValueError("rounds must be non-negative")
        if not self.products:
            raise InvalidValueError("at least one product is required")
        if not self.agents:
            raise InvalidValueError("at least one agent group is required")
        if not SELECTION_MIN <= self.k <= SELECTION_MAX:
            raise InvalidValueError(f"k must be in [{SELECTION_MIN}, {SELECTION_MAX}]")
        if self.blacklist_ttl <= 0:
            raise InvalidValueError("blacklist_ttl must be positive")
        names = [g.agent_id for g in self.agents]
        if len(set(names)) != len(names):
            raise InvalidValueError("agent group ids must be unique")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            return cls(
                rng_seed=data["rng_seed"],
                rounds=data["rounds"],
                products=tuple(
                    ProductSpec(p["product_id"], p["true_quality"]) for p in data["products"]
                ),
                agents=tuple(
                    AgentGroup(a["agent_id"], AgentStrategy(a["strategy"]), a["count"])
                    for a in data["agents"]
                ),
                k=data.get("k", 6),
                blacklist_ttl=data.get("blacklist_ttl", DEFAULT_BLACKLIST_TTL),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidValueError):
                raise
            raise InvalidValueError(f"bad scenario config: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "rounds": self.rounds,
            "products": [
                {"product_id": p.product_id, "true_quality": p.true_quality}
                for p in self.products
            ],
            "agents": [
                {"agent_id": g.agent_id, "strategy": g.strategy.value, "count": g.count}
                for g in self.agents
            ],
            "k": self.k,
            "blacklist_ttl": self.blacklist_ttl,
        }


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ScenarioConfig.from_dict(json.load(fh))


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _positive_text(rng: Random) -> str:
    a1, a2 = rng.sample(_ASPECT_NOUNS, 2)
    return (
        f"the {a1} is {rng.choice(_POSITIVE_ADJECTIVES)}. "
        f"the {a2} is {rng.choice(_POSITIVE_ADJECTIVES)}."
    )


def _negative_text(rng: Random) -> str:
    a1, a2 = rng.sample(_ASPECT_NOUNS, 2)
    return (
        f"the {a1} is {rng.choice(_NEGATIVE_ADJECTIVES)}. "
        f"the {a2} is {rng.choice(_NEGATIVE_ADJECTIVES)}."
    )


def _mitigated_text(rng: Random) -> str:
    a1, a2 = rng.sample(_ASPECT_NOUNS, 2)
    return (
        f"the {a1} is {rng.choice(_POSITIVE_ADJECTIVES)}. "
        f"the {a2} is {rng.choice(_NEGATIVE_ADJECTIVES)}."
    )


def _contradictory_text(rng: Random) -> str:
    aspect = rng.choice(_ASPECT_NOUNS)
    return (
        f"the {aspect} is {rng.choice(_POSITIVE_ADJECTIVES)}. "
        f"the {aspect} is {rng.choice(_NEGATIVE_ADJECTIVES)}."
    )


@dataclass
class _Agent:
    user_id: str
    group: str
    strategy: AgentStrategy

    def pick_product(self, rng: Random, products) -> ProductSpec:
        if self.strategy in (
            AgentStrategy.BALLOT_STUFFER,
            AgentStrategy.BAD_MOUTHER,
            AgentStrategy.CONTRADICTORY_BOT,
        ):
            return products[0]
        return rng.choice(products)

    def submission(self, rng: Random, product: ProductSpec) -> tuple[float, str]:
        q = product.true_quality
        if self.strategy is AgentStrategy.HONEST:
            appreciation = min(APPRECIATION_MAX, max(APPRECIATION_MIN, q + rng.uniform(-0.5, 0.5)))
            if appreciation >= 3.5:
                text = _positive_text(rng)
            elif appreciation <= 2.5:
                text = _negative_text(rng)
            else:
                text = _mitigated_text(rng)
            return appreciation, text
        if self.strategy is AgentStrategy.RANDOM:
            appreciation = rng.uniform(APPRECIATION_MIN, APPRECIATION_MAX)
            text = rng.choice((_positive_text, _negative_text, _mitigated_text))(rng)
            return appreciation, text
        if self.strategy is AgentStrategy.BALLOT_STUFFER:
            return 5.0, _positive_text(rng)
        if self.strategy is AgentStrategy.BAD_MOUTHER:
            return 1.0, _negative_text(rng)
        return 3.0, _contradictory_text(rng)

    def vote(self, rng: Random, feedback: FeedbackRecord, product: ProductSpec, lexicon: Lexicon) -> VoteChoice:
        if self.strategy is AgentStrategy.HONEST:
            # judge the text as written: conflicting content is never liked,
            # otherwise its classified polarity must match the true quality
            category = classify_feedback(feedback.text, lexicon)
            polarity = {
                FeedbackCategory.POSITIVE: 1,
                FeedbackCategory.NEGATIVE: -1,
            }.get(category)
            aligned = polarity is not None and polarity == _sign(product.true_quality - 3.0)
            if category is FeedbackCategory.MITIGATED:
                aligned = _sign(product.true_quality - 3.0) == 0
            return VoteChoice.LIKE if aligned else VoteChoice.DISLIKE
        if self.strategy is AgentStrategy.RANDOM:
            return rng.choice((VoteChoice.LIKE, VoteChoice.DISLIKE))
        if self.strategy is AgentStrategy.BALLOT_STUFFER:
            return VoteChoice.LIKE
        return VoteChoice.DISLIKE


def _seed_stock(store: KnowledgeBase, config: ScenarioConfig) -> None:
    """Prefabricate initial stock so first-round selections have all four
    categories: truthful-polarity items carry positive trustworthiness,
    lying ones negative, plus one -10 contradictory probe per product."""
    rng = Random(config.rng_seed ^ 0x5EED)
    created = SIM_EPOCH - 10_000
    for product in config.products:
        q = product.true_quality
        truthful_positive = q >= 3.0
        for category in (FeedbackCategory.POSITIVE, FeedbackCategory.NEGATIVE):
            is_positive = category is FeedbackCategory.POSITIVE
            truthful = truthful_positive == is_positive
            values = _SEED_TRUST_TRUE if truthful else _SEED_TRUST_FALSE
            for i, trust in enumerate(values):
                text = _positive_text(rng) if is_positive else _negative_text(rng)
                store.store_feedback(FeedbackRecord(
                    feedback_id=f"seed-{product.product_id}-{category.value.lower()}-{i}",
                    product_id=product.product_id,
                    author_id=f"seeder-{category.value.lower()}-{i}",
                    text=text,
                    category=category,
                    trustworthiness=trust,
                    created_at=created,
                    appreciation=5.0 if is_positive else 1.0,
                ))
                created += 1
        for i, trust in enumerate(_SEED_TRUST_MITIGATED):
            store.store_feedback(FeedbackRecord(
                feedback_id=f"seed-{product.product_id}-mitigated-{i}",
                product_id=product.product_id,
                author_id=f"seeder-mitigated-{i}",
                text=_mitigated_text(rng),
                category=FeedbackCategory.MITIGATED,
                trustworthiness=trust,
                created_at=created,
                appreciation=3.0,
            ))
            created += 1
        store.store_feedback(FeedbackRecord(
            feedback_id=f"seed-{product.product_id}-contradictory-0",
            product_id=product.product_id,
            author_id="seeder-contradictory-0",
            text=_contradictory_text(rng),
            category=FeedbackCategory.CONTRADICTORY,
            trustworthiness=TRUST_MIN,
            created_at=created,
            appreciation=3.0,
        ))
        created += 1


def batch_score_oracle(store: KnowledgeBase) -> dict[str, float | None]:
    """Recompute every product score from scratch from the journal.

    Each finalized rating is weighted by its author's end-of-run trust
    degree and included only while that trust is strictly positive. The gap
    to the live incremental score measures how much forward-only
    accumulation (coefficients frozen at finalization time) drifts.
    """
    terms: dict[str, list[tuple[float, float]]] = {}
    for record in store.journal:
        if record.get("kind") != "session" or record.get("state") != SessionState.FINALIZED.value:
            continue
        author = store.users.get(record["user_id"])
        if author is None:
            continue
        trust_now = author.trust_degree
        if trust_now > 0:
            terms.setdefault(record["product_id"], []).append(
                (record["appreciation"], trust_now)
            )
    scores: dict[str, float | None] = {}
    for product_id, pairs in terms.items():
        weighted = math.fsum(a * b for a, b in pairs)
        coefficients = math.fsum(b for _, b in pairs)
        scores[product_id] = weighted / coefficients if coefficients > 0 else None
    return scores


def simulate_into(config: ScenarioConfig) -> tuple[dict, KnowledgeBase]:
    """Run the scenario and return (report, populated store)."""
    rng = Random(config.rng_seed)
    store = KnowledgeBase()
    lexicon = default_lexicon()
    _seed_stock(store, config)

    agents: list[_Agent] = []
    clock = SIM_EPOCH
    for group in config.agents:
        for i in range(group.count):
            agent = _Agent(f"{group.agent_id}-{i:03d}", group.agent_id, group.strategy)
            store.create_user(agent.user_id, clock)
            clock += 1
            agents.append(agent)

    blacklist_events = {g.agent_id: 0 for g in config.agents}
    probe_counter = 0

    def snapshot(round_number: int) -> dict:
        products = {}
        for product in config.products:
            score = store.get_aggregate(product.product_id).score
            products[product.product_id] = {
                "score": score,
                "abs_error": abs(score - product.true_quality) if score is not None else None,
            }
        groups = {}
        for group in config.agents:
            members = [a for a in agents if a.group == group.agent_id]
            trusts = [store.get_user(a.user_id).trust_degree for a in members]
            groups[group.agent_id] = {
                "mean_trust": sum(trusts) / len(trusts),
                "blacklisted": sum(
                    1 for a in members if store.is_blacklisted(a.user_id, clock)
                ),
            }
        return {"round": round_number, "products": products, "groups": groups}

    report: dict = {
        "config": config.to_dict(),
        "initial": snapshot(0),
        "rounds": [],
    }

    for round_number in range(1, config.rounds + 1):
        clock = SIM_EPOCH + round_number * ROUND_SECONDS
        for agent in agents:
            clock += 1
            if store.is_blacklisted(agent.user_id, clock):
                continue
            product = agent.pick_product(rng, config.products)
            appreciation, text = agent.submission(rng, product)
            session = submit_review(
                store,
                lexicon,
                user_id=agent.user_id,
                product_id=product.product_id,
                appreciation=appreciation,
                text=text,
                now=clock,
                k=config.k,
                blacklist_ttl=config.blacklist_ttl,
            )
            if agent.strategy is AgentStrategy.CONTRADICTORY_BOT:
                # rejected conflicting text is preserved as fresh probe stock
                if classify_feedback(text, lexicon) is FeedbackCategory.CONTRADICTORY:
                    clock += 1
                    store.store_feedback(FeedbackRecord(
                        feedback_id=f"probe-{agent.user_id}-{probe_counter}",
                        product_id=product.product_id,
                        author_id=agent.user_id,
                        text=text,
                        category=FeedbackCategory.CONTRADICTORY,
                        trustworthiness=TRUST_MIN,
                        created_at=clock,
                        appreciation=appreciation,
                    ))
                    probe_counter += 1
            if session.state is SessionState.REJECTED:
                blacklist_events[agent.group] += 1
                continue
            for feedback_id in session.selection:
                clock += 1
                feedback = store.get_feedback(feedback_id)
                choice = agent.vote(rng, feedback, product, lexicon)
                process_vote(
                    store,
                    user_id=agent.user_id,
                    feedback_id=feedback_id,
                    choice=choice,
                    now=clock,
                    session_id=session.session_id,
                )
            clock += 1
            finalize_session(store, lexicon, session.session_id, clock)
        report["rounds"].append(snapshot(round_number))

    batch = batch_score_oracle(store)
    drift = {}
    for product in config.products:
        incremental = store.get_aggregate(product.product_id).score
        recomputed = batch.get(product.product_id)
        drift[product.product_id] = {
            "incremental": incremental,
            "batch": recomputed,
            "abs_drift": (
                abs(incremental - recomputed)
                if incremental is not None and recomputed is not None
                else None
            ),
        }
    report["final"] = {
        "mean_trust": {
            g.agent_id: report["rounds"][-1]["groups"][g.agent_id]["mean_trust"]
            if report["rounds"]
            else 0.0
            for g in config.agents
        },
        "blacklist_events": dict(blacklist_events),
        "score_drift": drift,
    }
    return report, store


def run_simulation(config: ScenarioConfig) -> dict:
    """Run the scenario and return its report."""
    report, _ = simulate_into(config)
    return report


def _columns(report: dict) -> list[str]:
    product_ids = [p["product_id"] for p in report["config"]["products"]]
    group_ids = [g["agent_id"] for g in report["config"]["agents"]]
    columns = ["round"]
    for pid in product_ids:
        columns.append(f"score[{pid}]")
        columns.append(f"abs_error[{pid}]")
    for gid in group_ids:
        columns.append(f"mean_trust[{gid}]")
        columns.append(f"blacklisted[{gid}]")
    return columns


def _row(snapshot: dict, report: dict) -> list:
    row: list = [snapshot["round"]]
    for p in report["config"]["products"]:
        cell = snapshot["products"][p["product_id"]]
        row.append(cell["score"])
        row.append(cell["abs_error"])
    for g in report["config"]["agents"]:
        cell = snapshot["groups"][g["agent_id"]]
        row.append(cell["mean_trust"])
        row.append(cell["blacklisted"])
    return row


def emit_report(report: dict, format: str = "table") -> str:
    """Serialize a report as ``json``, ``csv``, or an aligned ``table``.

    json carries the full report; csv and table flatten the per-round
    snapshots (header plus one line per round).
    """
    if format == "json":
        return json.dumps(report, indent=2, ensure_ascii=False)
    if format == "csv":
        lines = [",".join(_columns(report))]
        for snapshot in report["rounds"]:
            lines.append(",".join(_cell_csv(v) for v in _row(snapshot, report)))
        return "\n".join(lines) + "\n"
    if format == "table":
        columns = _columns(report)
        rows = [[_cell_table(v) for v in _row(s, report)] for s in report["rounds"]]
        widths = [
            max(len(c), *(len(r[i]) for r in rows)) if rows else len(c)
            for i, c in enumerate(columns)
        ]
        lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
        for row in rows:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines) + "\n"
    raise InvalidValueError(f"unknown report format {format!r}")


def _cell_csv(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def _cell_table(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)
