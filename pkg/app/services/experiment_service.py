"""Monte Carlo harness: trial runner, assignment sweeps, capacity tables, the
compatible-count experiment and result files."""

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError
from scipy.stats import binomtest

from app import __version__
from app.core.config import settings
from app.core.errors import CapacityError, ConfigError, ResultsWriteError, UsageError
from app.core.rng import codebook_rng, trial_rng
from app.models.adversary import AdversaryPower, AttackStrategy, EdgeAssignment, StrategyKind
from app.models.experiment import (
    CapacityRow,
    CompatReport,
    ExperimentConfig,
    ExperimentReport,
    SecrecySummary,
    SummaryStats,
    SweepReport,
    TrialResult,
    TrialVerdict,
)
from app.models.field import FieldSpec, field_from_q, get_field
from app.models.matrix import MatrixQ
from app.models.network import LinearNetworkCode, NetworkTopology
from app.models.secrecy import CosetCode
from app.models.subspace import Codebook, CodebookMode, DecodeVerdict
from app.services import adversary_service, secrecy_service
from app.services.matrix_service import rank
from app.services.network_service import (
    identity_code,
    load_topology,
    min_cut,
    min_cut_edges,
    sample_rlnc,
    transmit,
)
from app.services.subspace_service import (
    build_random_code,
    decode,
    encode,
    load_codebook,
    span,
    zero_subspace,
)

logger = logging.getLogger(__name__)

CSV_HEADER = ("trial", "message", "verdict", "compatible_count", "dim_ro", "dim_u", "dim_jam")
_CODE_AWARE = (StrategyKind.SYMMETRIZATION, StrategyKind.PUSH)


@dataclass(frozen=True, eq=False)
class ExperimentPlan:
    """A validated config with every derived object resolved."""

    cfg: ExperimentConfig
    spec: FieldSpec
    topology: NetworkTopology
    C: int
    c_override: bool
    n: int
    M: int
    mode: CodebookMode
    power: AdversaryPower
    assignment: EdgeAssignment
    strategy: StrategyKind
    knows_code: bool
    radius: int
    trials: int
    codebook: Codebook | None
    routing: LinearNetworkCode | None
    coset: CosetCode | None


# Config loading and resolution -------------------------------------------------


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        return ExperimentConfig.model_validate_json(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e


def with_overrides(cfg: ExperimentConfig, **updates: Any) -> ExperimentConfig:
    """Copy of ``cfg`` with top-level fields replaced, validated like a loaded config."""
    try:
        return ExperimentConfig.model_validate({**cfg.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(f"invalid override: {e}") from e


def _resolve_field(cfg: ExperimentConfig) -> FieldSpec:
    p, e = cfg.field.p, cfg.field.e
    if p**e > settings.max_field_size:
        raise CapacityError(f"GF({p}^{e}) exceeds max_field_size={settings.max_field_size}")
    try:
        return get_field(p, e, cfg.field.poly)
    except UsageError as exc:
        raise ConfigError(f"invalid field: {exc.detail}") from exc


def _default_assignment(t: NetworkTopology, power: AdversaryPower) -> EdgeAssignment:
    cut = min_cut_edges(t)
    pool = cut if power.z <= len(cut) else tuple(range(len(t.edges)))
    first = next(adversary_service.enumerate_assignments(t, power, pool), None)
    if first is None:
        raise ConfigError(f"power {power.as_tuple()} needs more than {len(pool)} edges")
    return first


def _resolve_assignment(
    cfg: ExperimentConfig, t: NetworkTopology, power: AdversaryPower
) -> EdgeAssignment:
    block = cfg.adversary.assignment
    if block is None or block == "sweep":
        return _default_assignment(t, power)
    try:
        assignment = EdgeAssignment(
            tuple(block.read_only), tuple(block.write_only), tuple(block.read_write)
        )
    except UsageError as e:
        raise ConfigError(e.detail) from e
    if assignment.power != power:
        raise ConfigError(
            f"assignment has power {assignment.power.as_tuple()}, config says {power.as_tuple()}"
        )
    for e in (*assignment.read_edges, *assignment.write_only):
        if not 0 <= e < len(t.edges):
            raise ConfigError(f"assigned edge {e} not in topology {t.name!r}")
    return assignment


def resolve_plan(cfg: ExperimentConfig) -> ExperimentPlan:
    """Validate a config against its topology and budgets, before any trial runs."""
    spec = _resolve_field(cfg)
    topology = load_topology(cfg.topology)
    cut = min_cut(topology)
    C = cfg.codebook.C or cut
    if C != cut:
        logger.warning("capacity override: C=%d while min-cut(%s)=%d", C, topology.name, cut)
    n = cfg.codebook.n
    if C > n:
        raise ConfigError(f"C={C} exceeds the packet length n={n}")

    try:
        power = AdversaryPower(*cfg.adversary.power)
    except UsageError as e:
        raise ConfigError(e.detail) from e
    if power.z > len(topology.edges):
        raise ConfigError(f"z={power.z} exceeds the {len(topology.edges)} edges of {topology.name}")
    assignment = _resolve_assignment(cfg, topology, power)

    coset = None
    if cfg.secrecy.enabled:
        if spec.e != 1:
            raise ConfigError("the composed secrecy pipeline needs a prime field")
        symbol_field = secrecy_service.symbol_field_for(spec, n)
        coset = secrecy_service.build_mds_parity(symbol_field, cfg.secrecy.L, cfg.secrecy.z_r)
        M = spec.p ** (n * cfg.secrecy.L)
        if cfg.codebook.M not in (None, M):
            raise ConfigError(f"the composed pipeline needs M = p^(n·L) = {M}")
    else:
        M = cfg.codebook.M or 0

    codebook = None
    if cfg.codebook.load_path:
        codebook = load_codebook(cfg.codebook.load_path)
        if (codebook.field, codebook.n, codebook.C) != (spec, n, C):
            raise ConfigError("loaded codebook does not match the configured field, n and C")
        M = codebook.M
    if M > settings.decode_budget:
        raise CapacityError(f"M={M} exceeds the decode budget {settings.decode_budget}")
    if codebook is None and cfg.codebook.fixed:
        codebook = build_random_code(spec, n, C, M, codebook_rng(cfg.seed), cfg.codebook.mode)

    return ExperimentPlan(
        cfg=cfg,
        spec=spec,
        topology=topology,
        C=C,
        c_override=C != cut,
        n=n,
        M=M,
        mode=cfg.codebook.mode,
        power=power,
        assignment=assignment,
        strategy=cfg.adversary.strategy,
        knows_code=cfg.adversary.knows_code,
        radius=power.z_w if cfg.adversary.decode_radius is None else cfg.adversary.decode_radius,
        trials=settings.default_trials if cfg.trials is None else cfg.trials,
        codebook=codebook,
        routing=identity_code(topology, spec, C) if cfg.coding == "identity" else None,
        coset=coset,
    )


# Trials ---------------------------------------------------------------------------


def _draw_message(plan: ExperimentPlan, rng) -> tuple[int, np.ndarray | None]:
    if plan.coset is None:
        return int(rng.integers(plan.M)), None
    coset = plan.coset
    secret = coset.symbol_field.random(coset.message_length, rng)
    s = secrecy_service.secret_encode(coset, secret, rng)
    return secrecy_service.flat_index(secrecy_service.flatten(coset, s)), secret


def _recovered(plan: ExperimentPlan, index: int, secret: np.ndarray) -> bool:
    coset = plan.coset
    flat = secrecy_service.flat_from_index(get_field(plan.spec.p), index, coset.L, coset.ell)
    s = secrecy_service.unflatten(coset, flat)
    return bool(np.array_equal(secrecy_service.secret_decode(coset, s), secret))


def run_trial(plan: ExperimentPlan, i: int) -> TrialResult:
    """One transmission over a freshly sampled network code, drawn from stream (1, i)."""
    rng = trial_rng(plan.cfg.seed, i)
    cb = plan.codebook or build_random_code(plan.spec, plan.n, plan.C, plan.M, rng, plan.mode)
    m, secret = _draw_message(plan, rng)
    code = plan.routing or sample_rlnc(plan.topology, plan.spec, rng, plan.C)
    X = encode(cb, m)

    clean = transmit(code, X, plan.assignment)
    transfer = clean.transfer
    strategy = AttackStrategy(
        plan.strategy, cb if plan.strategy in _CODE_AWARE else None, plan.knows_code
    )
    view = adversary_service.build_view(clean.Z, plan.assignment, transfer, plan.knows_code)
    jam_rows = adversary_service.jam(strategy, view, rng)
    sent = transmit(code, X, plan.assignment, jam_rows) if jam_rows is not None else clean

    Y = span(sent.Y)
    result = decode(cb, Y, plan.radius)
    transfer_rank = rank(transfer.T_AB)
    if result.verdict is DecodeVerdict.UNIQUE:
        correct = result.index == m if secret is None else _recovered(plan, result.index, secret)
        verdict = TrialVerdict.CORRECT if correct else TrialVerdict.WRONG_MESSAGE
    elif result.verdict is DecodeVerdict.AMBIGUOUS:
        verdict = TrialVerdict.AMBIGUOUS
    else:
        verdict = TrialVerdict.NONE_WITHIN_RADIUS
    if verdict is not TrialVerdict.CORRECT and transfer_rank < plan.C:
        verdict = TrialVerdict.RANK_DEFICIENT

    compatible = adversary_service.enumerate_compatible(cb, transfer.T_AJ, clean.Z)
    jam_span = span(jam_rows) if jam_rows is not None else zero_subspace(plan.spec, plan.n)
    parts = adversary_service.decompose_received(cb.codewords[m], Y, span(sent.Z), jam_span)
    return TrialResult(
        trial=i,
        message=m,
        verdict=verdict,
        decoded=result.index,
        compatible_count=len(compatible),
        dim_ro=parts.dim_ro,
        dim_u=parts.dim_u,
        dim_jam=parts.dim_jam,
        transfer_rank=transfer_rank,
    )


def wilson_interval(errors: int, trials: int, level: float) -> tuple[float, float]:
    point = errors / trials
    ci = binomtest(errors, trials).proportion_ci(confidence_level=level, method="wilson")
    low = max(0.0, min(float(ci.low), point))
    high = min(1.0, max(float(ci.high), point))
    return low, high


def summarize(plan: ExperimentPlan, results: list[TrialResult]) -> SummaryStats:
    if not results:
        raise UsageError("cannot summarize an empty trial list")
    histogram = dict.fromkeys(TrialVerdict, 0)
    for r in results:
        histogram[r.verdict] += 1
    trials = len(results)
    errors = trials - histogram[TrialVerdict.CORRECT]
    low, high = wilson_interval(errors, trials, settings.confidence_level)
    return SummaryStats(
        trials=trials,
        errors=errors,
        error_probability=errors / trials,
        ci_low=low,
        ci_high=high,
        confidence_level=settings.confidence_level,
        histogram=histogram,
        mean_compatible=float(np.mean([r.compatible_count for r in results])),
        regime=adversary_service.classify_regime(plan.C, plan.power).value,
        capacity=int(adversary_service.capacity(plan.C, plan.power)),
        secrecy_capacity=int(adversary_service.secrecy_capacity(plan.C, plan.power)),
        C=plan.C,
        c_override=plan.c_override,
        strategy=plan.strategy,
        assignment=plan.assignment.to_dict(),
        codebook_mode="fixed" if plan.codebook is not None else "fresh",
        rate=math.log(plan.M, plan.spec.q) / plan.n if plan.M else 0.0,
    )


def _execute(plan: ExperimentPlan) -> list[TrialResult]:
    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            return list(pool.map(lambda i: run_trial(plan, i), range(plan.trials)))
    return [run_trial(plan, i) for i in range(plan.trials)]


def _secrecy_summary(plan: ExperimentPlan, results: list[TrialResult]) -> SecrecySummary:
    coset = plan.coset
    leakage = []
    for subset in itertools.combinations(range(coset.L), coset.z_r):
        report = secrecy_service.leakage_entropy(coset, subset)
        leakage.append(
            {
                "observation": list(subset),
                "h_m": report.h_m,
                "h_m_given_z": report.h_m_given_z,
                "perfectly_secret": report.perfectly_secret,
            }
        )
    return SecrecySummary(
        L=coset.L,
        z_r=coset.z_r,
        ell=coset.ell,
        leakage=leakage,
        all_perfectly_secret=all(item["perfectly_secret"] for item in leakage),
        secure_symbols=coset.message_length,
        recovered=sum(r.verdict is TrialVerdict.CORRECT for r in results),
    )


def run_trials(cfg: ExperimentConfig) -> ExperimentReport:
    """Run cfg.trials independent trials; deterministic given cfg.seed."""
    plan = resolve_plan(cfg)
    return run_plan(plan)


def run_plan(plan: ExperimentPlan) -> ExperimentReport:
    logger.info(
        "running %d trials: %s C=%d n=%d M=%d power=%s strategy=%s",
        plan.trials,
        plan.topology.name,
        plan.C,
        plan.n,
        plan.M,
        plan.power.as_tuple(),
        plan.strategy.value,
    )
    results = _execute(plan)
    stats = summarize(plan, results)
    logger.info(
        "error probability %.4f [%.4f, %.4f] over %d trials",
        stats.error_probability,
        stats.ci_low,
        stats.ci_high,
        stats.trials,
    )
    return ExperimentReport(
        version=__version__,
        seed=plan.cfg.seed,
        config=plan.cfg,
        stats=stats,
        secrecy=_secrecy_summary(plan, results) if plan.coset is not None else None,
        results=results,
    )


def run_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Every (min-cut assignment, strategy) pair; the worst error is reported."""
    base = resolve_plan(cfg)
    cut = min_cut_edges(base.topology)
    pool = cut if base.power.z <= len(cut) else tuple(range(len(base.topology.edges)))
    entries: list[SummaryStats] = []
    for assignment in adversary_service.enumerate_assignments(base.topology, base.power, pool):
        for kind in cfg.adversary.sweep_strategies:
            plan = replace(base, assignment=assignment, strategy=kind)
            entries.append(summarize(plan, _execute(plan)))
    if not entries:
        raise ConfigError("the sweep produced no (assignment, strategy) pair")
    worst = max(entries, key=lambda s: s.error_probability)
    logger.info(
        "sweep over %d pairs: worst error %.4f (%s on %s)",
        len(entries),
        worst.error_probability,
        worst.strategy.value,
        worst.assignment,
    )
    return SweepReport(entries=entries, worst_case=worst)


# Capacity table ----------------------------------------------------------------


def parse_powers(text: str) -> list[tuple[int, int, int]]:
    """Parse "z_ro,z_wo,z_rw;..." into power triples."""
    triples = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            z_ro, z_wo, z_rw = (int(part) for part in chunk.split(","))
        except ValueError as e:
            raise UsageError(f"bad power triple {chunk!r}") from e
        if min(z_ro, z_wo, z_rw) < 0:
            raise UsageError(f"negative power in {chunk!r}")
        triples.append((z_ro, z_wo, z_rw))
    if not triples:
        raise UsageError("power list cannot be empty")
    return triples


def capacity_table(
    c_range: range | list[int], power_list: list[tuple[int, int, int]]
) -> list[CapacityRow]:
    rows = []
    for C in c_range:
        for triple in power_list:
            power = AdversaryPower(*triple)
            rows.append(
                CapacityRow(
                    C=C,
                    z_ro=power.z_ro,
                    z_wo=power.z_wo,
                    z_rw=power.z_rw,
                    regime=adversary_service.classify_regime(C, power).value,
                    capacity=int(adversary_service.capacity(C, power)),
                    secrecy_capacity=int(adversary_service.secrecy_capacity(C, power)),
                )
            )
    return rows


# Compatible-count experiment ------------------------------------------------------


def compatible_count_experiment(
    n: int, C: int, z_r: int, q: int, M: int, codebooks: int = 1000, seed: int = 0
) -> CompatReport:
    """Count Z-compatible codewords over fresh random codebooks.

    Z is the observation [I_{z_r} | 0]·X of a uniformly chosen codeword X, so
    the count is 1 + Binomial(M - 1, p_X) where p_X is the share of G_q(n, C)
    sharing X's observation. Mean and variance follow from the exact class sizes.
    """
    if codebooks < 1:
        raise UsageError("need at least one codebook")
    if seed < 0:
        raise UsageError(f"seed must be >= 0, got {seed}")
    if M > settings.decode_budget:
        raise CapacityError(f"M={M} exceeds the decode budget {settings.decode_budget}")
    spec = field_from_q(q)
    sizes, total = adversary_service.observation_class_sizes(n, C, z_r, q)
    probability = adversary_service.compatible_probability(n, C, z_r, q)
    shares = sizes.astype(float) / total
    p1 = float((shares**2).sum())  # E[p_X]
    p2 = float((shares**3).sum())  # E[p_X^2]
    variance = (M - 1) * (p1 - p2) + (M - 1) ** 2 * (p2 - p1**2)

    T = MatrixQ(spec, adversary_service.default_observation_transform(C, z_r))
    counts, containing = [], []
    for k in range(codebooks):
        rng = trial_rng(seed, k)
        cb = build_random_code(spec, n, C, M, rng)
        m = int(rng.integers(M))
        Z = MatrixQ(spec, spec.matmul(T.data, cb.stack[m]))
        counts.append(len(adversary_service.enumerate_compatible(cb, T, Z)))
        containing.append(len(adversary_service.enumerate_containing(cb, Z)))

    mean = float(np.mean(counts))
    expected = 1 + (M - 1) * float(probability)
    sigma = math.sqrt(max(variance, 0.0) / codebooks)
    within = abs(mean - expected) <= 3 * sigma + 1e-9
    logger.info("compatible count: mean %.3f, expected %.3f ± %.3f", mean, expected, 3 * sigma)
    ratios = adversary_service.compatible_ratio_forms(n, C, z_r, q)
    return CompatReport(
        n=n,
        C=C,
        z_r=z_r,
        q=q,
        M=M,
        codebooks=codebooks,
        mean=mean,
        minimum=min(counts),
        maximum=max(counts),
        mean_containing=float(np.mean(containing)),
        exact_probability=str(probability),
        expected_count=expected,
        expected_count_m_times_p=M * float(probability),
        std_of_mean=sigma,
        within_3_sigma=within,
        ratios={k: str(v) for k, v in ratios.items()},
    )


# Result files ------------------------------------------------------------------------


def results_csv(results: list[TrialResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow(
            [r.trial, r.message, r.verdict.value, r.compatible_count, r.dim_ro, r.dim_u, r.dim_jam]
        )
    return buffer.getvalue()


def emit_results(report: ExperimentReport, path: str | Path, fmt: str = "csv") -> Path:
    """Per-trial CSV, or the JSON report (config echo, stats, version, seed, trials)."""
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown results format {fmt!r}")
    path = Path(path)
    body = results_csv(report.results) if fmt == "csv" else report.model_dump_json(indent=2)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)
    except OSError as e:
        raise ResultsWriteError(f"cannot write results to {path}: {e}") from e
    logger.info("wrote %s results to %s", fmt, path)
    return path


def load_results(path: str | Path) -> ExperimentReport:
    path = Path(path)
    try:
        return ExperimentReport.model_validate_json(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read results {path}: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"{path} is not a results file: {e}") from e

