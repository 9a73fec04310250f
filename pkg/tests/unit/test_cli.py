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

"""Command line: exit codes and report contents."""

import json

import pytest
from click.testing import CliRunner

from quantum_signature.cli import EXIT_OK, EXIT_REJECTED, EXIT_USAGE, cli


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    return json.loads(result.stdout)


def test_honest_run_accepts(runner):
    result = runner.invoke(cli, ["--format", "json", "--seed", "7", "run"])
    assert result.exit_code == EXIT_OK, result.output
    report = _json(result)
    assert report["accepted"] is True
    assert report["seed"] == 7
    assert report["verdicts"] == {"verifier_1": "accepted", "verifier_2": "accepted"}
    assert report["signature_bits"] == 64 * 256


def test_text_output(runner):
    result = runner.invoke(cli, ["run", "--message", "hello"])
    assert result.exit_code == EXIT_OK
    assert "accepted" in result.stdout
    assert "signature bits" in result.stdout


def test_run_over_the_stream_transport_with_a_transcript(runner, tmp_path):
    path = tmp_path / "transcript.json"
    result = runner.invoke(
        cli, ["--config", "desk_scale", "run", "--transport", "stream", "--transcript", str(path)]
    )
    assert result.exit_code == EXIT_OK, result.output
    transcript = json.loads(path.read_text())
    kinds = {event["kind"] for event in transcript["events"]}
    assert {"send", "receive", "verification", "verdict"} <= kinds
    assert transcript["config"]["l_bits"] == 16


def test_corrupted_key_is_rejected(runner):
    result = runner.invoke(cli, ["--format", "json", "run", "--corrupt-blocks", "1"])
    assert result.exit_code == EXIT_REJECTED
    assert _json(result)["verdicts"] == {"verifier_1": "rejected", "verifier_2": "aborted"}


def test_tolerated_corruption_is_accepted(runner):
    result = runner.invoke(cli, ["run", "--corrupt-blocks", "1", "--vb", "0.05"])
    assert result.exit_code == EXIT_OK


@pytest.mark.parametrize(
    "args",
    [
        ["run", "--n", "7"],
        ["run", "--message", "a", "--message-length", "3"],
        ["--config", "no_such_profile", "run"],
        ["analyze", "p_rep", "--n", "7", "--e", "1"],
        ["analyze", "p_col", "--x", "300", "--k", "256"],
    ],
)
def test_usage_errors(runner, args):
    assert runner.invoke(cli, args).exit_code == EXIT_USAGE


def test_analyze_p_rep(runner):
    result = runner.invoke(cli, ["--format", "json", "analyze", "p_rep", "--n", "32", "--e", "7"])
    assert result.exit_code == EXIT_OK
    report = _json(result)
    assert report["value"] == pytest.approx(0.0034, abs=5e-5)
    assert report["fraction"] == "55/16182"

    brute = runner.invoke(
        cli, ["--format", "json", "analyze", "p_rep", "--n", "16", "--e", "3", "--method", "bruteforce"]
    )
    closed = runner.invoke(cli, ["--format", "json", "analyze", "p_rep", "--n", "16", "--e", "3"])
    assert _json(brute)["value"] == _json(closed)["value"]


def test_analyze_p_guess(runner):
    result = runner.invoke(cli, ["--format", "json", "analyze", "p_guess", "--l", "256"])
    report = _json(result)
    assert report["value"] == pytest.approx(2.9387e-39, rel=1e-4)
    assert report["log2"] == -128
    assert report["work_factor"].startswith("2^128")


def test_analyze_p_rep_threshold(runner):
    result = runner.invoke(
        cli, ["--format", "json", "analyze", "p_rep_threshold", "--n", "32", "--e", "7", "--vb", "0.05"]
    )
    report = _json(result)
    assert report["params"]["t_b"] == 2
    assert report["value"] > 0.0034


def test_analyze_p_col(runner):
    result = runner.invoke(cli, ["--format", "json", "analyze", "p_col", "--x", "128", "--k", "256"])
    report = _json(result)
    assert report["value"] == pytest.approx(0.3935, abs=1e-4)
    assert report["birthday_approximation"] == pytest.approx(report["value"])


@pytest.mark.parametrize(
    "alg, expected",
    [("sha2-256", 201), ("sha2-384", 384), ("sha2-512", 394), ("sha3-256", 256)],
)
def test_analyze_second_preimage(runner, alg, expected):
    result = runner.invoke(cli, ["--format", "json", "analyze", "2pr", "--alg", alg])
    assert result.exit_code == EXIT_OK
    assert _json(result)["strength_bits"] == expected


def test_analyze_strength_and_protocol(runner):
    strength = _json(runner.invoke(cli, ["--format", "json", "analyze", "strength", "--alg", "sha2-384"]))
    assert strength["overall_strength"] == 192
    protocol = _json(runner.invoke(cli, ["--format", "json", "analyze", "protocol"]))
    assert protocol["weakest"] == "block_preimage"
    assert protocol["overall_bits"] == 32


def test_analyze_xof_without_delta_is_a_usage_error(runner):
    result = runner.invoke(cli, ["analyze", "2pr", "--alg", "shake-128"])
    assert result.exit_code == EXIT_USAGE


def test_attack_integrity(runner):
    result = runner.invoke(cli, ["--format", "json", "attack", "integrity", "--trials", "3"])
    assert result.exit_code == EXIT_OK, result.output
    report = _json(result)
    assert report["engine"] == "protocol"
    assert report["successes"] == 0
    assert report["agrees"] is True


def test_attack_repudiation_outside_bobs_view(runner):
    result = runner.invoke(
        cli,
        ["--format", "json", "attack", "repudiation", "--placement", "bob_unknown", "--e", "2",
         "--trials", "50"],
    )
    assert result.exit_code == EXIT_OK
    assert _json(result)["rate"] == 1.0


def test_keytool_sign_is_one_time(runner, tmp_path):
    store = str(tmp_path / "keys.json")
    base = ["--keystore", store, "--seed", "3", "--format", "json"]

    created = _json(runner.invoke(cli, [*base, "keytool", "generate"]))["created"]
    assert {record["link"] for record in created} == {"alice-bob", "alice-charlie"}
    first = next(r["key_id"] for r in created if r["link"] == "alice-bob")
    second = next(r["key_id"] for r in created if r["link"] == "alice-charlie")

    sign = [*base, "keytool", "sign", "--first", first, "--second", second, "--message", "m"]
    result = runner.invoke(cli, sign)
    assert result.exit_code == EXIT_OK, result.output
    assert _json(result)["signed_tuple"].startswith(b"QDS1".hex())

    listed = _json(runner.invoke(cli, [*base, "keytool", "list"]))["keys"]
    assert all(record["consumed"] for record in listed)

    again = runner.invoke(cli, sign)
    assert again.exit_code == EXIT_REJECTED


def test_keytool_export_and_import(runner, tmp_path):
    source = str(tmp_path / "a.json")
    target = str(tmp_path / "b.json")
    exported = str(tmp_path / "export.json")
    runner.invoke(cli, ["--keystore", source, "keytool", "generate", "--count", "2"])
    assert runner.invoke(cli, ["--keystore", source, "keytool", "export", exported]).exit_code == 0
    result = runner.invoke(cli, ["--keystore", target, "--format", "json", "keytool", "import", exported])
    assert _json(result)["imported"] == 4


def test_keytool_generate_twice_adds_fresh_keys(runner, tmp_path):
    base = ["--keystore", str(tmp_path / "keys.json"), "--seed", "3", "--format", "json"]
    first = _json(runner.invoke(cli, [*base, "keytool", "generate"]))["created"]
    result = runner.invoke(cli, [*base, "keytool", "generate", "--link", "alice-bob", "--count", "2"])
    assert result.exit_code == EXIT_OK, result.output
    second = _json(result)["created"]
    assert len(first) == 2
    assert len(second) == 2
    assert {r["link"] for r in second} == {"alice-bob"}
    assert not {r["key_id"] for r in first} & {r["key_id"] for r in second}

    listed = _json(runner.invoke(cli, [*base, "keytool", "list"]))["keys"]
    assert len({record["key_id"] for record in listed}) == 4


def test_unknown_key_is_rejected(runner, tmp_path):
    store = str(tmp_path / "keys.json")
    result = runner.invoke(
        cli, ["--keystore", store, "keytool", "sign", "--first", "x", "--second", "y"]
    )
    assert result.exit_code == EXIT_REJECTED
