"""Command line front end.

Every invocation is a self-contained deterministic scenario: the world
is built from the seed, enrollment runs first, and the requested flow
follows.  Exit codes summarize the outcome:

* 0: authentication accepted (or the command simply succeeded)
* 2: rejected for an expected operational reason (biometric mismatch,
  expired challenge)
* 3: a security property tripped (tamper, replay, spoof, unknown
  issuer, key mismatch, corrupt ledger)
* 4: configuration or usage error
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigurationError, HorcruxError
from .harness import (
    ADVERSARIES,
    SimulationConfig,
    compute_error_rates,
    leaks_needles,
    load_config,
    run_enrollment,
    run_scenario,
    verify_ledger_file,
)
from .protocol import AuthOutcome, FailureReason

EXIT_ACCEPTED = 0
EXIT_REJECTED = 2
EXIT_SECURITY = 3
EXIT_CONFIG = 4

_OPERATIONAL = frozenset(
    {FailureReason.BIOMETRIC_MISMATCH, FailureReason.CHALLENGE_EXPIRED}
)


def outcome_exit_code(outcome: AuthOutcome) -> int:
    if outcome.accepted:
        return EXIT_ACCEPTED
    if outcome.failure_reason in _OPERATIONAL:
        return EXIT_REJECTED
    return EXIT_SECURITY


def _describe(outcome: AuthOutcome) -> str:
    if outcome.accepted:
        return f"outcome: accepted mode={outcome.mode.value}"
    return (
        f"outcome: rejected mode={outcome.mode.value} "
        f"reason={outcome.failure_reason.value}"
    )


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; usage errors are config errors here."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _base_config(args: argparse.Namespace) -> SimulationConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return SimulationConfig()


def _apply_overrides(config: SimulationConfig, args: argparse.Namespace) -> SimulationConfig:
    overrides = {}
    for key in ("mode", "adversary", "seed", "trust", "scheme"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "mitigation", False):
        overrides["mitigation"] = True
    if getattr(args, "impostor", False):
        overrides["impostor"] = True
    config = replace(config, **overrides)
    config.validate()
    return config


def _maybe_export_ledger(args: argparse.Namespace, result) -> None:
    if getattr(args, "export_ledger", None):
        result.world.ledger.export_path(args.export_ledger)
        print(f"ledger exported to {args.export_ledger}")


def _cmd_enroll(args: argparse.Namespace) -> int:
    config = _apply_overrides(_base_config(args), args)
    result = run_enrollment(config, transcript_path=args.transcript)
    print(f"enrolled {result.did}")
    print(f"document object_key={result.enrollment.record.object_key}")
    print(f"replicas: {', '.join(result.enrollment.record.hub_ids)}")
    if args.transcript:
        print(f"transcript written to {args.transcript}")
    _maybe_export_ledger(args, result)
    return EXIT_ACCEPTED


def _cmd_auth(args: argparse.Namespace) -> int:
    config = _apply_overrides(_base_config(args), args)
    result = run_scenario(config, transcript_path=args.transcript)
    print(_describe(result.outcome))
    if args.transcript:
        print(f"transcript written to {args.transcript}")
    _maybe_export_ledger(args, result)
    if config.adversary == "mitm-observe":
        if leaks_needles(result.observed, result.needles):
            print("observer capture: secret material leaked")
            return EXIT_SECURITY
        print("observer capture: no secret material found")
    return outcome_exit_code(result.outcome)


def _cmd_attack(args: argparse.Namespace) -> int:
    config = _apply_overrides(_base_config(args), args)
    config = replace(config, mode="local", adversary="share-spoof")
    config.validate()
    result = run_scenario(config, transcript_path=args.transcript)
    assert result.outcome is not None
    if result.outcome.accepted:
        print("attack: possession proof forged from public data; accepted")
    else:
        print(
            "attack: rejected "
            f"reason={result.outcome.failure_reason.value}"
        )
    if args.transcript:
        print(f"transcript written to {args.transcript}")
    return outcome_exit_code(result.outcome)


def _cmd_rates(args: argparse.Namespace) -> int:
    config = _base_config(args)
    rates = compute_error_rates(
        trials=args.trials,
        seed=args.seed if args.seed is not None else config.seed,
        vector_length=config.vector_length,
        threshold=config.threshold,
        genuine_flip_prob=config.genuine_flip_prob,
    )
    print(f"trials={rates.trials}")
    print(f"frr={rates.frr}")
    print(f"far={rates.far}")
    print(f"genuine_rejects={rates.genuine_rejects}")
    print(f"impostor_accepts={rates.impostor_accepts}")
    if args.report_dir:
        from .report import write_report

        paths = write_report(rates, args.report_dir)
        for name in sorted(paths):
            print(f"wrote {paths[name]}")
    return EXIT_ACCEPTED


def _cmd_verify_ledger(args: argparse.Namespace) -> int:
    try:
        ok = verify_ledger_file(args.path)
    except OSError as exc:
        print(f"cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if ok:
        print("ledger: chain verified")
        return EXIT_ACCEPTED
    print("ledger: verification failed")
    return EXIT_SECURITY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="horcrux", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = False) -> None:
        p.add_argument(
            "--config",
            required=config_required,
            help="flat key = value scenario file",
        )
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--transcript", help="write the JSON-lines transcript here")

    enroll = sub.add_parser("enroll", parents=[], help="run an enrollment scenario")
    add_common(enroll, config_required=True)
    enroll.add_argument("--export-ledger", help="write the ledger export here")
    enroll.set_defaults(func=_cmd_enroll)

    auth = sub.add_parser("auth", help="run an authentication scenario")
    add_common(auth)
    auth.add_argument("--mode", required=True, choices=["remote", "local"])
    auth.add_argument(
        "--adversary",
        choices=list(ADVERSARIES),
        help="adversary present during the run",
    )
    auth.add_argument(
        "--mitigation",
        action="store_true",
        help="bind the possession proof to a device signature",
    )
    auth.add_argument(
        "--impostor",
        action="store_true",
        help="present an impostor capture instead of a genuine one",
    )
    auth.add_argument("--export-ledger", help="write the ledger export here")
    auth.set_defaults(func=_cmd_auth)

    attack = sub.add_parser("attack", help="reproduce a documented attack")
    add_common(attack)
    attack.add_argument("--kind", required=True, choices=["share-spoof"])
    attack.add_argument(
        "--mitigation",
        action="store_true",
        help="run the attack against the mitigated proof",
    )
    attack.set_defaults(func=_cmd_attack)

    rates = sub.add_parser("rates", help="empirical FRR/FAR measurement")
    add_common(rates)
    rates.add_argument("--trials", type=int, required=True)
    rates.add_argument(
        "--report-dir", help="write CSV tables and PNG figures here"
    )
    rates.set_defaults(func=_cmd_rates)

    verify = sub.add_parser("verify-ledger", help="check an exported ledger file")
    verify.add_argument("path")
    verify.set_defaults(func=_cmd_verify_ledger)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HorcruxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
