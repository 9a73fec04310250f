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

"""Command line: protocol runs, attack campaigns, formula queries and the key store.

Exit codes: 0 success or acceptance, 1 rejection / consumed key / attack rate
disagreeing with its prediction, 2 usage or configuration error.
"""

import functools
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click

from quantum_signature import analysis
from quantum_signature.adversary.monte_carlo import AttackParams, monte_carlo
from quantum_signature.adversary.scenarios import (
    AttackKind,
    DosTarget,
    Placement,
    corruption_overrides,
)
from quantum_signature.distribution import SeedSource, SimulatedQkdClient, partition
from quantum_signature.protocol import ProtocolHost
from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.config import MAX_SEED, RunConfig, load_run_config
from quantum_signature.shared_libraries.errors import (
    ChannelFailure,
    KeyConsumed,
    UnknownKey,
)
from quantum_signature.shared_libraries.types import (
    HashAlgorithmId,
    KeyHalf,
    Link,
    PartyRole,
    SignedTuple,
    Verdict,
    VerificationThreshold,
)
from quantum_signature.signing import combine_keys, sign
from quantum_signature.tools import key_store
from quantum_signature.tools.hash_suite import strength_lookup
from quantum_signature.tools.key_store import KeyRecord, KeyStore
from quantum_signature.tools.wire import encode_tuple
from quantum_signature.transport import FramedStreamTransport, InMemoryTransport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2

# SHA-2 compression block size B and maximum input length D (as log2).
_SHA2_GEOMETRY = {
    HashAlgorithmId.SHA2_224: (512, 64),
    HashAlgorithmId.SHA2_256: (512, 64),
    HashAlgorithmId.SHA2_384: (1024, 128),
    HashAlgorithmId.SHA2_512: (1024, 128),
}

_PARTIES = {"bob": PartyRole.VERIFIER_1, "charlie": PartyRole.VERIFIER_2}


@dataclass
class CliContext:
    config_path: str | None
    seed: int | None
    output_format: str
    keystore: str | None

    def config(self, **flags: Any) -> RunConfig:
        return load_run_config(self.config_path, {**flags, "seed": self.seed})

    @property
    def keystore_path(self) -> Path:
        return Path(self.keystore or key_store.KEYSTORE_PATH)


def _exit_codes(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (KeyConsumed, UnknownKey, ChannelFailure) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_REJECTED)
        except ValueError as e:
            # ConfigError, DomainError and pydantic's ValidationError land here.
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


def _emit(obj: CliContext, report: dict[str, Any], rows: list[tuple[str, Any]]) -> None:
    if obj.output_format == "json":
        click.echo(json.dumps(report, indent=2, sort_keys=True))
        return
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        click.echo(f"{label.ljust(width)}  {value}")


@click.group()
@click.option(
    "--config",
    "config_path",
    metavar="PATH|PROFILE",
    help="TOML config file, or a bundled profile (worked_example, desk_scale).",
)
@click.option("--seed", type=click.IntRange(0, MAX_SEED - 1), default=None)
@click.option(
    "--format", "output_format", type=click.Choice(["text", "json"]), default="text"
)
@click.option("--keystore", type=click.Path(dir_okay=False), default=None)
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level to stderr.")
@click.pass_context
def cli(ctx, config_path, seed, output_format, keystore, verbose):
    """Quantum-assisted digital signatures: run, attack and analyze the protocol."""
    level = "DEBUG" if verbose else os.getenv(constants.ENV_LOG_LEVEL, "WARNING").upper()
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = CliContext(config_path, seed, output_format, keystore)


def _message_options(func):
    func = click.option("--message-length", type=click.IntRange(min=0), default=None)(func)
    func = click.option("--message-file", type=click.Path(exists=True, dir_okay=False))(func)
    func = click.option("--message", default=None, help="Inline message text.")(func)
    return func


@cli.command()
@click.option("--l", "l_bits", type=int, default=None, help="QKD key length l in bits.")
@click.option("--n", "n_blocks", type=int, default=None, help="Blocks per key.")
@click.option("--delta", "delta_key_bits", type=int, default=None, help="Key expansion δ.")
@click.option("--vb", "v_b", type=float, default=None)
@click.option("--vc", "v_c", type=float, default=None)
@_message_options
@click.option("--corrupt-blocks", type=click.IntRange(min=0), default=None,
              help="Corrupt this many of Bob's stored k_1 blocks.")
@click.option("--transport", type=click.Choice(["memory", "stream"]), default="memory")
@click.option("--transcript", "transcript_path", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
@_exit_codes
def run(obj, transport, transcript_path, **flags):
    """Both phases with honest parties; exit 0 iff Bob and Charlie accept."""
    config = obj.config(**flags).validated()
    factory = FramedStreamTransport.loopback if transport == "stream" else InMemoryTransport
    host = ProtocolHost(config, transport_factory=factory)
    if config.corrupt_blocks:
        host.overrides = corruption_overrides(
            DosTarget.SELF,
            PartyRole.VERIFIER_1,
            config.corrupt_blocks,
            config.n_blocks,
            host.source.generator("run/corruption"),
        )
    transcript = host.run()
    verdicts = transcript.verdicts()
    reports = transcript.reports()
    accepted = all(verdicts.get(role) == Verdict.ACCEPTED for role in _PARTIES.values())

    sent = host.signer.sent if host.signer else None
    summary = {
        "seed": host.seed,
        "accepted": accepted,
        "key_ids": list(host.distribution.key_ids) if host.distribution else [],
        "message_bytes": len(sent.message) if sent else 0,
        "signature_bits": sent.signature.total_bits if sent else 0,
        "verdicts": {role.value: verdict.value for role, verdict in verdicts.items()},
        "reports": {role.value: report.model_dump(mode="json") for role, report in reports.items()},
    }
    if transcript_path:
        Path(transcript_path).write_text(transcript.to_json(config=config.model_dump(mode="json")))
        logger.info("transcript written to %s", transcript_path)

    rows: list[tuple[str, Any]] = [("seed", host.seed)]
    for role in _PARTIES.values():
        verdict = verdicts.get(role)
        line = verdict.value if verdict else "-"
        report = reports.get(role)
        if report is not None:
            line += (
                f"  ({report.matches} matched, {report.mismatches} mismatched, "
                f"{report.unknowns} unknown, tolerance {report.allowed_mismatches})"
            )
        rows.append((role.display_name, line))
    rows.append(("signature bits", summary["signature_bits"]))
    _emit(obj, summary, rows)
    sys.exit(EXIT_OK if accepted else EXIT_REJECTED)


_ATTACKS = ["integrity", "forgery", "repudiation", "dos"]


@cli.command()
@click.argument("kind", type=click.Choice(_ATTACKS))
@click.option("--strategy", type=click.Choice(["guess", "reuse"]), default="guess",
              help="Forgery strategy.")
@click.option("--trials", type=click.IntRange(min=1), default=1000)
@click.option("--engine", type=click.Choice(["sampled", "protocol"]), default="sampled")
@click.option("--workers", type=click.IntRange(min=1), default=1)
@click.option("--n", "n_blocks", type=int, default=None)
@click.option("--e", type=click.IntRange(min=1), default=1, help="Corrupted k_2 blocks.")
@click.option("--l", "l_bits", type=int, default=None,
              help="Key length; for forgery this selects the desk-scale profile.")
@click.option("--vb", "v_b", type=float, default=None)
@click.option("--vc", "v_c", type=float, default=None)
@click.option("--placement", type=click.Choice([p.value for p in Placement]),
              default=Placement.RANDOM.value)
@click.option("--oracle", is_flag=True, help="Hand the forger the true k_2 blocks.")
@click.option("--flips", type=click.IntRange(min=1), default=1, help="Tampered message bits.")
@click.option("--target", type=click.Choice([t.value for t in DosTarget]),
              default=DosTarget.SELF.value)
@click.option("--party", type=click.Choice(sorted(_PARTIES)), default="bob")
@click.option("--corrupt-blocks", type=click.IntRange(min=0), default=1)
@click.pass_obj
@_exit_codes
def attack(obj, kind, strategy, trials, engine, workers, party, **knobs):
    """Monte Carlo estimate of an attack's success rate with a 95% Wilson interval."""
    if kind == "forgery":
        kind = AttackKind.FORGERY_GUESS if strategy == "guess" else AttackKind.FORGERY_REUSE
    params = AttackParams(party=_PARTIES[party], **knobs)
    base = obj.config()
    report = monte_carlo(
        kind, params, trials=trials, seed=base.seed, engine=engine, workers=workers, config=base
    )
    rows: list[tuple[str, Any]] = [
        ("attack", report.kind.value),
        ("engine", report.engine),
        ("trials", report.trials),
        ("successes", report.successes),
        ("rate", f"{report.rate:.6g}"),
        ("95% CI", f"[{report.ci_low:.6g}, {report.ci_high:.6g}]"),
    ]
    if report.predicted_rate is not None:
        rows.append(("predicted", f"{report.predicted_rate:.6g}"))
        rows.append(("agrees", report.agrees))
    _emit(obj, report.model_dump(mode="json"), rows)
    sys.exit(EXIT_REJECTED if report.agrees is False else EXIT_OK)


@cli.group()
def analyze():
    """Closed-form security estimates."""


def _emit_probability(
    obj: CliContext,
    formula: str,
    params: dict[str, Any],
    p: analysis.ProbabilityValue,
    **extra: float,
) -> None:
    work = None
    if p.value > 0 and math.isfinite(p.log2_value):
        work = analysis.work_factor(max(0, round(-p.log2_value)))
    report = {
        "formula": formula,
        "params": params,
        "value": p.value,
        "log2": p.log2_value,
        "work_factor": work,
    }
    report.update(extra)
    if p.is_exact:
        report["fraction"] = f"{p.numerator}/{p.denominator}"
    rows = [
        ("formula", formula),
        *((name, value) for name, value in params.items()),
        ("value", f"{p.value:.4g}"),
        ("log2", f"{p.log2_value:.2f}"),
        ("work factor", work or "-"),
    ]
    rows.extend((name.replace("_", " "), f"{value:.4g}") for name, value in extra.items())
    _emit(obj, report, rows)


@analyze.command("p_guess")
@click.option("--l", "l_bits", type=int, required=True)
@click.option("--n", "n_blocks", type=int, default=None,
              help="With --n, Charlie tolerates floor(V_C * 3n/2) wrong blocks.")
@click.option("--vc", "v_c", type=float, default=0.0)
@click.pass_obj
@_exit_codes
def analyze_p_guess(obj, l_bits, n_blocks, v_c):
    """Forgery by guessing Bob's unknown half of k_2."""
    if n_blocks is None:
        _emit_probability(obj, "p_guess", {"l": l_bits}, analysis.p_guess(l_bits))
        return
    t_c = VerificationThreshold(max_mismatch_fraction=v_c).allowed_mismatches(3 * n_blocks // 2)
    p = analysis.p_guess_threshold(l_bits, n_blocks, t_c)
    _emit_probability(obj, "p_guess_threshold", {"l": l_bits, "n": n_blocks, "t_c": t_c}, p)


@analyze.command("p_rep")
@click.option("--n", "n_blocks", type=int, required=True)
@click.option("--e", type=int, required=True)
@click.option("--method", type=click.Choice(["closed", "bruteforce"]), default="closed")
@click.pass_obj
@_exit_codes
def analyze_p_rep(obj, n_blocks, e, method):
    """Repudiation with e corrupted k_2 blocks and zero tolerance at Bob."""
    if method == "bruteforce":
        p = analysis.p_rep_bruteforce(n_blocks, e)
    else:
        p = analysis.p_rep_closed_form(n_blocks, e)
    _emit_probability(obj, "p_rep", {"n": n_blocks, "e": e, "method": method}, p)


@analyze.command("p_rep_threshold")
@click.option("--n", "n_blocks", type=int, required=True)
@click.option("--e", type=int, required=True)
@click.option("--tb", "t_b", type=click.IntRange(min=0), default=None,
              help="Mismatches Bob tolerates.")
@click.option("--vb", "v_b", type=float, default=None, help="Bob's V_B over 3n/2 known blocks.")
@click.option("--vc", "v_c", type=float, default=None,
              help="Also require Charlie to reject under V_C.")
@click.pass_obj
@_exit_codes
def analyze_p_rep_threshold(obj, n_blocks, e, t_b, v_b, v_c):
    """Repudiation when Bob tolerates mismatches."""
    if v_c is not None:
        p = analysis.p_rep_protocol(n_blocks, e, v_b or 0.0, v_c)
        _emit_probability(
            obj, "p_rep_protocol", {"n": n_blocks, "e": e, "v_b": v_b or 0.0, "v_c": v_c}, p
        )
        return
    if t_b is None:
        t_b = VerificationThreshold(max_mismatch_fraction=v_b or 0.0).allowed_mismatches(
            3 * n_blocks // 2
        )
    p = analysis.p_rep_threshold(n_blocks, e, t_b)
    _emit_probability(obj, "p_rep_threshold", {"n": n_blocks, "e": e, "t_b": t_b}, p)


@analyze.command("p_col")
@click.option("--x", "x_bits", type=click.IntRange(min=0), required=True,
              help="Input length x in bits.")
@click.option("--k", "k_bits", type=click.IntRange(min=1), required=True,
              help="Digest length k in bits.")
@click.pass_obj
@_exit_codes
def analyze_p_col(obj, x_bits, k_bits):
    """Collision probability when hashing 2^x inputs to k bits."""
    params = analysis.CollisionParams(input_length_x_bits=x_bits, digest_length_k_bits=k_bits)
    birthday = analysis.birthday_approximation(params)
    _emit_probability(
        obj,
        "p_col",
        {"x": x_bits, "k": k_bits},
        analysis.p_collision(params),
        birthday_approximation=birthday.value,
    )


@analyze.command("2pr")
@click.option("--alg", required=True, help="e.g. sha2-256, sha3-384, shake-128.")
@click.option("--delta", "delta_bits", type=int, default=None, help="XOF output length δ.")
@click.option("--input-log2", type=int, default=None, help="log2 of the input length D in bits.")
@click.option("--block-bits", type=int, default=None, help="Hash block size B in bits.")
@click.pass_obj
@_exit_codes
def analyze_2pr(obj, alg, delta_bits, input_log2, block_bits):
    """Second-preimage strength d - log2(D/B)."""
    algorithm = HashAlgorithmId.parse(alg)
    d = algorithm.digest_bits or delta_bits
    if d is None:
        raise click.UsageError(f"{algorithm.display_name} needs --delta")
    default_block, default_log2 = _SHA2_GEOMETRY.get(algorithm, (512, 64))
    block = block_bits or default_block
    params = analysis.SecondPreimageParams(
        digest_d_bits=d,
        input_D_bits=2 ** (input_log2 if input_log2 is not None else default_log2),
        hash_block_B_bits=block,
    )
    bits = analysis.second_preimage_strength(params, algorithm)
    work = analysis.work_factor(bits)
    report = {
        "formula": "2pr",
        "params": {"alg": algorithm.value, "d": d, "log2_D": int(math.log2(params.input_D_bits)),
                   "B": block},
        "strength_bits": bits,
        "work_factor": work,
    }
    _emit(obj, report, [("algorithm", algorithm.display_name), ("2PR bits", bits),
                        ("work factor", work)])


@analyze.command("strength")
@click.option("--alg", required=True)
@click.option("--delta", "delta_bits", type=int, default=None)
@click.pass_obj
@_exit_codes
def analyze_strength(obj, alg, delta_bits):
    """Collision, preimage and second-preimage strength of one hash function."""
    algorithm = HashAlgorithmId.parse(alg)
    triple = strength_lookup(algorithm, delta_bits)
    low, high = triple.second_preimage_resistance_bits
    report = {
        "formula": "strength",
        "params": {"alg": algorithm.value, "delta": delta_bits},
        **triple.model_dump(mode="json"),
        "overall_strength": triple.overall_strength,
        "work_factor": analysis.work_factor(triple.overall_strength),
    }
    preimage = f"{'>= ' if triple.preimage_is_lower_bound else ''}{triple.preimage_resistance_bits}"
    rows = [
        ("algorithm", algorithm.display_name),
        ("collision", triple.collision_resistance_bits),
        ("preimage", preimage),
        ("second preimage", f"{low}" if low == high else f"{low}-{high}"),
        ("overall", triple.overall_strength),
        ("work factor", report["work_factor"]),
    ]
    _emit(obj, report, rows)


@analyze.command("protocol")
@click.pass_obj
@_exit_codes
def analyze_protocol(obj):
    """Strength of the configured suite: the minimum over its elements."""
    config = obj.config()
    strength = analysis.protocol_strength(config.suite())
    report = {
        "formula": "protocol",
        **strength.model_dump(mode="json"),
        "overall_bits": strength.overall_bits,
        "weakest": strength.weakest,
        "work_factor": analysis.work_factor(strength.overall_bits),
    }
    _emit(obj, report, [
        ("message hash", strength.message_hash_bits),
        ("block hash", strength.block_hash_bits),
        ("block preimage", strength.block_preimage_bits),
        ("overall", f"{strength.overall_bits} ({strength.weakest})"),
        ("work factor", report["work_factor"]),
    ])


@analyze.command("work")
@click.option("--bits", type=int, required=True)
@click.pass_obj
@_exit_codes
def analyze_work(obj, bits):
    """Brute-force work of a strength in bits."""
    work = analysis.work_factor(bits)
    _emit(obj, {"formula": "work", "bits": bits, "work_factor": work}, [("work factor", work)])


@cli.group()
def keytool():
    """Manage the JSON key store (--keystore or $QDS_KEYSTORE)."""


def _record_rows(records: list[KeyRecord]) -> list[tuple[str, Any]]:
    return [
        (record.key_id, f"{record.link.value:<14} {record.l_bits:>5} bits  "
                        f"{'consumed' if record.consumed else 'fresh'}")
        for record in records
    ]


@keytool.command("generate")
@click.option("--l", "l_bits", type=int, default=constants.DEFAULT_KEY_BITS)
@click.option("--link", type=click.Choice(["alice-bob", "alice-charlie", "both"]), default="both")
@click.option("--count", type=click.IntRange(min=1), default=1)
@click.pass_obj
@_exit_codes
def keytool_generate(obj, l_bits, link, count):
    """Simulated QKD keys, deterministic under --seed."""
    store = KeyStore.load(obj.keystore_path)
    client = SimulatedQkdClient(SeedSource(obj.config().seed))
    links = list(Link) if link == "both" else [Link(link)]
    created: list[str] = []
    for each in links:
        fresh = 0
        # Stored ids come from earlier counters of the same seed; skip past them.
        while fresh < count:
            key = client.establish(each, l_bits)
            if key.key_id in store:
                logger.debug("key %s is already stored, drawing the next one", key.key_id)
                continue
            store.put(key)
            created.append(key.key_id)
            fresh += 1
    store.export_json(obj.keystore_path)
    records = [r for r in store.records() if r.key_id in created]
    _emit(
        obj,
        {"created": [r.model_dump(mode="json") for r in records]},
        _record_rows(records) or [("created", 0)],
    )


@keytool.command("list")
@click.pass_obj
@_exit_codes
def keytool_list(obj):
    """Every stored key; consumed keys are shown but cannot sign again."""
    records = KeyStore.load(obj.keystore_path).records()
    _emit(
        obj,
        {"keys": [r.model_dump(mode="json") for r in records]},
        _record_rows(records) or [("keys", 0)],
    )


@keytool.command("export")
@click.argument("destination", type=click.Path(dir_okay=False))
@click.pass_obj
@_exit_codes
def keytool_export(obj, destination):
    store = KeyStore.load(obj.keystore_path)
    store.export_json(destination)
    _emit(obj, {"exported": len(store), "path": destination}, [("exported", len(store))])


@keytool.command("import")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_exit_codes
def keytool_import(obj, source):
    store = KeyStore.load(obj.keystore_path)
    count = store.import_records(KeyStore.load(source).records())
    store.export_json(obj.keystore_path)
    _emit(obj, {"imported": count}, [("imported", count)])


@keytool.command("sign")
@click.option("--first", "first_id", required=True, help="key_id of k_1 (Alice-Bob).")
@click.option("--second", "second_id", required=True, help="key_id of k_2 (Alice-Charlie).")
@click.option("--n", "n_blocks", type=int, default=None)
@_message_options
@click.pass_obj
@_exit_codes
def keytool_sign(obj, first_id, second_id, n_blocks, **message_flags):
    """Sign once with two stored keys; both are consumed."""
    store = KeyStore.load(obj.keystore_path)
    first, second = store.get(first_id), store.get(second_id)
    base = obj.config(n_blocks=n_blocks, **message_flags)
    config = RunConfig.model_validate(
        {
            **base.model_dump(),
            "l_bits": first.length_l_bits,
            "delta_key_bits": None,
            "delta_msg_bits": None,
        }
    ).validated()
    suite = config.suite()
    key = combine_keys(
        KeyHalf.full(partition(first, config.n_blocks)),
        KeyHalf.full(partition(second, config.n_blocks)),
    )
    message = config.message.resolve(SeedSource(config.seed).generator("message"))
    signed = SignedTuple(message=message, signature=sign(message, key, suite, store))
    store.export_json(obj.keystore_path)
    encoded = encode_tuple(signed)
    _emit(
        obj,
        {"key_ids": [first_id, second_id], "signed_tuple": encoded.hex()},
        [("key ids", f"{first_id}, {second_id}"), ("signed tuple", encoded.hex())],
    )
