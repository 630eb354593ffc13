"""Acceptance gate: every promised property, checked at its stated scale.

Each test prints exactly one `criterion NN: PASS/FAIL` line so a full
run reads as a checklist.  Workload sizes, tolerances, and wall-clock
limits are part of the contract and are asserted, not just reported.
"""

import time
from itertools import combinations

from scipy.stats import chisquare

from oracles import (
    lagrange_at_zero,
    peasant_mul,
    prob_genuine_reject,
    prob_impostor_accept,
)

from horcrux.biometrics import BiometricVector, generate_ibv
from horcrux.encoding import derive_rng
from horcrux.harness import (
    SimulationConfig,
    compute_error_rates,
    leaks_needles,
    run_enrollment,
    run_scenario,
)
from horcrux.ledger import Ledger, verify_export
from horcrux.protocol import (
    FailureReason,
    enroll,
    make_client,
    make_server,
    verify_claim,
)
from horcrux.sharing import combine, split_shamir, split_xor
from horcrux.storage import InMemoryHub


def _report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def test_criterion_01_reconstruction_oracle_equivalence():
    started = time.monotonic()
    rng = derive_rng(42, "acceptance-1")
    failures = 0
    for _ in range(1000):
        ibv = generate_ibv(rng, 512)
        if combine(list(split_xor(ibv, rng))).bits != ibv.bits:
            failures += 1
        for k, n in ((2, 2), (2, 3), (3, 5)):
            shares = split_shamir(ibv, k, n, rng)
            for subset in combinations(shares, k):
                if combine(list(subset)).bits != ibv.bits:
                    failures += 1
    # independent Lagrange interpolation agrees on every 1-byte secret
    for secret in range(256):
        shares = split_shamir(BiometricVector(bytes([secret]), 8), 3, 5, rng)
        points = [(s.index, s.payload[0]) for s in shares[:3]]
        if lagrange_at_zero(points) != secret:
            failures += 1
        if combine(shares[2:5]).bits != bytes([secret]):
            failures += 1
    elapsed = time.monotonic() - started
    _report(
        1,
        failures == 0 and elapsed < 10.0,
        f"combine/split identity, 1000 vectors, all k-subsets, "
        f"{failures} failures, {elapsed:.2f}s (limit 10s)",
    )


def test_criterion_02_perfect_secrecy_small_instance():
    started = time.monotonic()
    rng = derive_rng(42, "acceptance-2")
    full = set(range(256))

    # every single share of every 1-byte secret is consistent with all
    # 256 candidate secrets: for share (i, y) the degree-1 polynomials
    # through it hit each candidate constant term exactly once
    consistent = True
    for secret in range(256):
        shares = split_shamir(BiometricVector(bytes([secret]), 8), 2, 3, rng)
        for share in shares:
            y, i = share.payload[0], share.index
            candidates = {y ^ peasant_mul(coeff, i) for coeff in range(256)}
            if candidates != full or secret not in candidates:
                consistent = False

    # one-time-pad shares are uniform across seeds
    ibv = generate_ibv(derive_rng(42, "acceptance-2-ibv"), 512)
    masked_counts = [0] * 256
    pad_counts = [0] * 256
    for seed in range(10_000):
        masked, pad = split_xor(ibv, derive_rng(seed, "acceptance-2-xor"))
        masked_counts[masked.payload[0]] += 1
        pad_counts[pad.payload[0]] += 1
    p_masked = float(chisquare(masked_counts).pvalue)
    p_pad = float(chisquare(pad_counts).pvalue)

    elapsed = time.monotonic() - started
    _report(
        2,
        consistent and p_masked > 0.01 and p_pad > 0.01 and elapsed < 30.0,
        f"single-share consistency exhaustive, chi-square p={p_masked:.3f}/"
        f"{p_pad:.3f} (> 0.01), {elapsed:.2f}s (limit 30s)",
    )


def test_criterion_03_end_to_end_flows():
    started = time.monotonic()
    errors = 0
    for seed in range(100):
        for mode in ("remote", "local"):
            genuine = run_scenario(SimulationConfig(seed=seed, mode=mode))
            if not genuine.outcome.accepted:
                errors += 1
            impostor = run_scenario(
                SimulationConfig(seed=seed, mode=mode, impostor=True)
            )
            if impostor.outcome.failure_reason is not FailureReason.BIOMETRIC_MISMATCH:
                errors += 1
            world = genuine.world
            if world.verifier is world.issuer:
                errors += 1
            if world.verifier.signing.public == world.issuer.signing.public:
                errors += 1
    elapsed = time.monotonic() - started
    _report(
        3,
        errors == 0 and elapsed < 60.0,
        f"100 seeded runs per mode, genuine accept + impostor reject, "
        f"verifier distinct from issuer, {errors} errors, "
        f"{elapsed:.2f}s (limit 60s)",
    )


def test_criterion_04_exhaustive_tamper_evidence():
    issuer = make_server("issuer", derive_rng(4, "issuer"))
    verifier = make_server("verifier", derive_rng(4, "verifier"))
    for server in (issuer, verifier):
        server.trust_issuer(issuer.signing.public)
    hubs = {"hub-0": InMemoryHub("hub-0")}
    ledger = Ledger()
    enrollments = []
    for i in range(3):
        client = make_client(f"client-{i}", derive_rng(4, f"client:{i}"))
        ibv = generate_ibv(derive_rng(4, f"ibv:{i}"), 512)
        enrollments.append(
            enroll(
                client, issuer, ledger, list(hubs.values()), ibv,
                derive_rng(4, f"enroll:{i}"),
            )
        )
    assert len(ledger) == 3 and ledger.verify_chain()

    export = ledger.export_bytes()
    missed_export = 0
    for position in range(len(export) * 8):
        mutated = bytearray(export)
        mutated[position // 8] ^= 1 << (7 - position % 8)
        if bytes(mutated) == export:
            continue
        if verify_export(bytes(mutated)):
            missed_export += 1

    target = enrollments[0]
    hub = hubs[target.record.hub_ids[0]]
    stored = hub.get_bytes(target.record.object_key)
    missed_document = 0
    for position in range(len(stored) * 8):
        mutated = bytearray(stored)
        mutated[position // 8] ^= 1 << (7 - position % 8)
        hub.tamper(target.record.object_key, bytes(mutated))
        document, failure = verify_claim(
            verifier,
            target.did,
            target.document.enrollment_public,
            ledger,
            hubs,
        )
        if failure is not FailureReason.TAMPER_DETECTED or document is not None:
            missed_document += 1
    hub.tamper(target.record.object_key, stored)

    _report(
        4,
        missed_export == 0 and missed_document == 0,
        f"single-bit mutations: {len(export) * 8} ledger bits "
        f"({missed_export} missed), {len(stored) * 8} document bits "
        f"({missed_document} missed)",
    )


def test_criterion_05_replay_and_observation_defense():
    replay_hits = 0
    clean_captures = 0
    for seed in range(100):
        mode = "remote" if seed % 2 == 0 else "local"
        replayed = run_scenario(
            SimulationConfig(seed=seed, mode=mode, adversary="replay")
        )
        if replayed.outcome.failure_reason is FailureReason.REPLAY:
            replay_hits += 1
        observed = run_scenario(
            SimulationConfig(seed=seed, mode=mode, adversary="mitm-observe")
        )
        if observed.outcome.accepted and not leaks_needles(
            observed.observed, observed.needles
        ):
            clean_captures += 1
    _report(
        5,
        replay_hits == 100 and clean_captures == 100,
        f"replay rejected {replay_hits}/100, observer capture free of "
        f"template and share bytes {clean_captures}/100",
    )


def test_criterion_06_share_spoof_attack_reproduction():
    spoof_accepted = 0
    spoof_detected = 0
    for seed in range(100):
        unmitigated = run_scenario(
            SimulationConfig(seed=seed, mode="local", adversary="share-spoof")
        )
        if unmitigated.outcome.accepted:
            spoof_accepted += 1
        mitigated = run_scenario(
            SimulationConfig(
                seed=seed, mode="local", adversary="share-spoof", mitigation=True
            )
        )
        if mitigated.outcome.failure_reason is FailureReason.SPOOF_DETECTED:
            spoof_detected += 1
    _report(
        6,
        spoof_accepted == 100 and spoof_detected == 100,
        f"possession proof forged from public data {spoof_accepted}/100 "
        f"without mitigation, SpoofDetected {spoof_detected}/100 with it",
    )


def test_criterion_07_monte_carlo_error_rates():
    started = time.monotonic()
    rates = compute_error_rates(10_000, seed=42)
    elapsed = time.monotonic() - started
    genuine_bound = prob_genuine_reject(512, 0.1, 0.32)
    impostor_bound = prob_impostor_accept(512, 0.32)
    _report(
        7,
        rates.frr == 0.0
        and rates.far == 0.0
        and genuine_bound < 1e-15
        and impostor_bound < 1e-15
        and elapsed < 300.0,
        f"10,000 trials through the full flow: FRR={rates.frr} FAR={rates.far} "
        f"(oracle bounds {genuine_bound:.1e}/{impostor_bound:.1e}), "
        f"{elapsed:.2f}s (limit 300s)",
    )


def test_criterion_08_transcript_determinism():
    configs = [
        SimulationConfig(seed=11),
        SimulationConfig(seed=11, mode="local"),
        SimulationConfig(seed=11, mode="local", mitigation=True),
        SimulationConfig(seed=11, adversary="replay"),
        SimulationConfig(seed=11, adversary="tamper-hub"),
        SimulationConfig(seed=11, adversary="mitm-observe"),
        SimulationConfig(seed=11, mode="local", adversary="share-spoof"),
        SimulationConfig(seed=11, scheme="shamir", shamir_k=3, shamir_n=5),
        SimulationConfig(seed=11, trust="escrow", impostor=True),
    ]
    mismatches = 0
    for config in configs:
        if run_scenario(config).transcript != run_scenario(config).transcript:
            mismatches += 1
    if (
        run_enrollment(SimulationConfig(seed=11)).transcript
        != run_enrollment(SimulationConfig(seed=11)).transcript
    ):
        mismatches += 1
    _report(
        8,
        mismatches == 0,
        f"equal seeds give byte-identical transcripts across "
        f"{len(configs) + 1} scenario shapes, {mismatches} mismatches",
    )
