# Copyright 2026 The quantum-signature Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Monte Carlo estimates of attack success rates.

Two engines produce the same statistic. The protocol engine plays every trial
through the full party machines; the sampled engine draws only the random
choices that decide the outcome (permutations, error positions, guesses) with
numpy, which makes 10^5 and more trials cheap. Results depend only on the seed
and the parameters, never on the worker count.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from quantum_signature import analysis
from quantum_signature.adversary.scenarios import (
    AttackKind,
    DosTarget,
    ForgeryStrategy,
    Placement,
    RepudiationPlan,
    dos_scenario,
    forgery_attack,
    integrity_attack,
    repudiation_attack,
)
from quantum_signature.distribution import SeedSource
from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.errors import DomainError
from quantum_signature.shared_libraries.types import PartyRole, VerificationThreshold

logger = logging.getLogger(__name__)

Engine = Literal["sampled", "protocol"]

_SAMPLED_KINDS = {AttackKind.REPUDIATION, AttackKind.FORGERY_GUESS}
_CHUNK = 50_000
# numpy integers hold guesses of up to this many bits per block.
_MAX_SAMPLED_BLOCK_BITS = 62


class AttackParams(BaseModel):
    """Attack knobs; unset fields keep the values of the base run configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_blocks: int | None = Field(default=None, ge=2)
    e: int = Field(default=1, ge=1)
    l_bits: int | None = Field(default=None, ge=8)
    v_b: float | None = Field(default=None, ge=0.0, le=1.0)
    v_c: float | None = Field(default=None, ge=0.0, le=1.0)
    placement: Placement = Placement.RANDOM
    oracle: bool = False
    flips: int = Field(default=1, ge=1)
    target: DosTarget = DosTarget.SELF
    party: PartyRole = PartyRole.VERIFIER_1
    corrupt_blocks: int = Field(default=1, ge=0)

    def run_config(self, kind: AttackKind, base: RunConfig | None = None) -> RunConfig:
        base = base or RunConfig()
        updates: dict[str, object] = {}
        for name in ("n_blocks", "v_b", "v_c"):
            value = getattr(self, name)
            if value is not None:
                updates[name] = value
        if kind == AttackKind.FORGERY_GUESS and self.l_bits is not None:
            return RunConfig.desk_scale(
                self.l_bits,
                updates.pop("n_blocks", None),
                v_b=updates.get("v_b", base.v_b),
                v_c=updates.get("v_c", base.v_c),
                seed=base.seed,
                message=base.message,
            ).validated()
        if self.l_bits is not None:
            updates["l_bits"] = self.l_bits
        return RunConfig.model_validate({**base.model_dump(), **updates}).validated()


class MonteCarloReport(BaseModel):
    kind: AttackKind
    engine: Engine
    params: dict[str, object]
    trials: int
    successes: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int
    predicted_rate: float | None = None
    agrees: bool | None = None

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


def wilson_ci(k: int, n: int, z: float = constants.WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for k successes out of n."""
    if n <= 0:
        return (0.0, 0.0)
    phat = k / n
    denom = 1.0 + (z * z) / n
    center = (phat + (z * z) / (2.0 * n)) / denom
    half = (z * math.sqrt((phat * (1.0 - phat)) / n + (z * z) / (4.0 * n * n))) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def rates_agree(
    rate: float, predicted: float, trials: int, sigmas: float = constants.AGREEMENT_SIGMAS
) -> bool:
    """|rate - p| within `sigmas` binomial standard deviations; exact match when p is 0 or 1."""
    sigma = math.sqrt(predicted * (1.0 - predicted) / trials) if trials else 0.0
    if sigma == 0.0:
        return rate == predicted
    return abs(rate - predicted) <= sigmas * sigma


def trial_seed(seed: int, index: int) -> int:
    """Seed of trial `index`, independent of how trials are spread over workers."""
    state = np.random.SeedSequence([seed, index]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def _allowed(fraction: float, known: int) -> int:
    return VerificationThreshold(max_mismatch_fraction=fraction).allowed_mismatches(known)


def predicted_rate(kind: AttackKind, params: AttackParams, config: RunConfig) -> float | None:
    """The closed-form success probability the estimate is compared against."""
    n = config.n_blocks
    known = 3 * n // 2
    t_b, t_c = _allowed(config.v_b, known), _allowed(config.v_c, known)
    if kind == AttackKind.REPUDIATION:
        e = params.e
        if e > n:
            return None
        if params.placement == Placement.RANDOM:
            return analysis.p_rep_protocol(n, e, config.v_b, config.v_c).value
        if e > n // 2:
            return None
        fooled = e <= t_b if params.placement == Placement.BOB_KNOWN else True
        return 1.0 if fooled and e > t_c else 0.0
    if kind == AttackKind.FORGERY_GUESS:
        if params.oracle:
            return 1.0
        return analysis.p_guess_threshold(config.effective_key_bits, n, t_c).value
    if kind in (AttackKind.FORGERY_REUSE, AttackKind.INTEGRITY):
        return 0.0
    if kind == AttackKind.DOS:
        victim = params.party
        if params.target == DosTarget.EXCHANGE:
            victim = (
                PartyRole.VERIFIER_2
                if params.party == PartyRole.VERIFIER_1
                else PartyRole.VERIFIER_1
            )
        allowed = t_b if victim == PartyRole.VERIFIER_1 else t_c
        return 1.0 if params.corrupt_blocks > allowed else 0.0
    return None


def run_trial(kind: AttackKind, params: AttackParams, config: RunConfig, seed: int) -> bool:
    """One full protocol run of the attack."""
    if kind == AttackKind.INTEGRITY:
        outcome = integrity_attack(config, seed, flips=params.flips)
    elif kind in (AttackKind.FORGERY_GUESS, AttackKind.FORGERY_REUSE):
        strategy = ForgeryStrategy.GUESS if kind == AttackKind.FORGERY_GUESS else ForgeryStrategy.REUSE
        outcome = forgery_attack(strategy, config, seed, oracle=params.oracle, flips=params.flips)
    elif kind == AttackKind.REPUDIATION:
        outcome = repudiation_attack(
            RepudiationPlan(e=params.e, placement=params.placement), config, seed
        )
    else:
        outcome = dos_scenario(
            config,
            seed,
            target=params.target,
            party=params.party,
            corrupt_blocks=params.corrupt_blocks,
        )
    return outcome.success


def _count_protocol_successes(
    kind: AttackKind,
    params: AttackParams,
    config: RunConfig,
    seed: int,
    start: int,
    stop: int,
) -> int:
    # Worker entry point: module level so it pickles.
    logging.getLogger("quantum_signature").setLevel(logging.WARNING)
    return sum(
        run_trial(kind, params, config, trial_seed(seed, i)) for i in range(start, stop)
    )


def _protocol_engine(
    kind: AttackKind,
    params: AttackParams,
    config: RunConfig,
    trials: int,
    seed: int,
    workers: int,
) -> int:
    if workers <= 1:
        return _count_protocol_successes(kind, params, config, seed, 0, trials)
    step = math.ceil(trials / workers)
    bounds = [(start, min(start + step, trials)) for start in range(0, trials, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_count_protocol_successes, kind, params, config, seed, start, stop)
            for start, stop in bounds
        ]
        return sum(future.result() for future in futures)


def _sample_repudiation(
    n: int, e: int, placement: Placement, t_b: int, t_c: int, trials: int, rng: np.random.Generator
) -> int:
    if e <= t_c:
        return 0
    half = n // 2
    if placement == Placement.BOB_UNKNOWN:
        return trials if e <= half else 0
    if placement == Placement.BOB_KNOWN:
        return trials if e <= min(t_b, half) else 0

    successes = 0
    for start in range(0, trials, _CHUNK):
        size = min(_CHUNK, trials - start)
        # Charlie reveals the first n/2 labels of a uniform permutation of k_2.
        revealed = rng.random((size, n)).argsort(axis=1)[:, :half]
        bob_known = np.zeros((size, n), dtype=bool)
        np.put_along_axis(bob_known, revealed, True, axis=1)
        errors = rng.random((size, n)).argsort(axis=1)[:, :e]
        seen = np.take_along_axis(bob_known, errors, axis=1).sum(axis=1)
        successes += int(np.count_nonzero(seen <= t_b))
    return successes


def _sample_forgery(
    block_bits: int, guesses: int, t_c: int, oracle: bool, trials: int, rng: np.random.Generator
) -> int:
    if oracle:
        return trials
    if block_bits > _MAX_SAMPLED_BLOCK_BITS:
        raise DomainError(
            f"{block_bits}-bit blocks are too large for sampled guessing; use the protocol engine"
        )
    high = 1 << block_bits
    successes = 0
    for start in range(0, trials, _CHUNK):
        size = min(_CHUNK, trials - start)
        truth = rng.integers(0, high, size=(size, guesses), dtype=np.int64)
        guessed = rng.integers(0, high, size=(size, guesses), dtype=np.int64)
        wrong = np.count_nonzero(truth != guessed, axis=1)
        successes += int(np.count_nonzero(wrong <= t_c))
    return successes


def _sampled_engine(
    kind: AttackKind, params: AttackParams, config: RunConfig, trials: int, seed: int
) -> int:
    rng = SeedSource(seed).generator(f"monte-carlo/{kind.value}")
    n = config.n_blocks
    known = 3 * n // 2
    t_b, t_c = _allowed(config.v_b, known), _allowed(config.v_c, known)
    if kind == AttackKind.REPUDIATION:
        if params.e > n:
            raise DomainError(f"e = {params.e} exceeds n = {n}")
        return _sample_repudiation(n, params.e, params.placement, t_b, t_c, trials, rng)
    return _sample_forgery(config.block_len_bits, n // 2, t_c, params.oracle, trials, rng)


def monte_carlo(
    kind: AttackKind | str,
    params: AttackParams | None = None,
    trials: int = 1000,
    seed: int = 0,
    engine: Engine = "sampled",
    workers: int = 1,
    config: RunConfig | None = None,
) -> MonteCarloReport:
    """Estimate the success rate of `kind` over `trials` independent runs."""
    kind = AttackKind(kind)
    params = params or AttackParams()
    if trials < 1:
        raise DomainError(f"trials = {trials} must be positive")
    run_config = params.run_config(kind, config)

    used: Engine = engine
    if engine == "sampled" and kind not in _SAMPLED_KINDS:
        logger.info("%s has no sampled engine; playing full protocol runs", kind.value)
        used = "protocol"
    if used == "sampled":
        successes = _sampled_engine(kind, params, run_config, trials, seed)
    else:
        successes = _protocol_engine(kind, params, run_config, trials, seed, workers)

    rate = successes / trials
    ci_low, ci_high = wilson_ci(successes, trials)
    predicted = predicted_rate(kind, params, run_config)
    report = MonteCarloReport(
        kind=kind,
        engine=used,
        params={
            **params.model_dump(mode="json", exclude_none=True),
            "n_blocks": run_config.n_blocks,
            "l_bits": run_config.effective_key_bits,
            "v_b": run_config.v_b,
            "v_c": run_config.v_c,
        },
        trials=trials,
        successes=successes,
        rate=rate,
        ci_low=ci_low,
        ci_high=ci_high,
        seed=seed,
        predicted_rate=predicted,
        agrees=None if predicted is None else rates_agree(rate, predicted, trials),
    )
    logger.info(
        "%s: %d/%d successes (rate %.4g, 95%% CI [%.4g, %.4g])",
        kind.value,
        successes,
        trials,
        rate,
        ci_low,
        ci_high,
    )
    return report
