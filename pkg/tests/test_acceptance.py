"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py`` (the lines appear in
the "acceptance criteria" section of the summary) or ``python
tests/test_acceptance.py``.
"""

import itertools
import json
import random
import statistics
import sys
import time

import pytest

from countra import accepts, classify, run_trace
from countra.cli import main
from countra.enumeration import difftest, difftest_predicate, language, predicate_levels
from countra.languages import (L1, L2, L3, amb2m_machine, config_census, fig1_machine,
                               grammar_accepts, lm_decide, lm_machine, scl_counter_decomposition,
                               scl_machine, threshold_machine)
from countra.semilinear import parikh, verify_decomposition
from countra.serialize import dumps, loads, save
from countra.slstm import counting_lstm, lstm_accepts, lstm_gates, lstm_run, lstm_step
from countra.transforms import (complement, difference, general_to_threshold, intersection,
                                symmetric_difference, threshold_to_general, to_incremental,
                                to_stateless, union)

from helpers import (alphabet_groups, all_strings, corpus, is_amb2m, lm_strings, qscl_machines,
                     record)

ACCEPT_TRACE = "⟨0, q0⟩ →a ⟨1, q0⟩ →a ⟨2, q0⟩ →b ⟨1, q1⟩ →b ⟨0, q1⟩ ∈ F"
REJECT_TRACE = "⟨0, q0⟩ →a ⟨1, q0⟩ →a ⟨2, q0⟩ →b ⟨1, q1⟩ →a ⟨1, q2⟩ ∉ F"


def _cli_trace(capsys, path, x):
    code = main(["run", str(path), x, "--trace"])
    out = capsys.readouterr().out
    return code, out.splitlines()[0]


def test_criterion_1_worked_traces(tmp_path, capsys):
    path = tmp_path / "fig1.json"
    save(fig1_machine(), path)
    code_a, line_a = _cli_trace(capsys, path, "aabb")
    code_r, line_r = _cli_trace(capsys, path, "aaba")

    m = fig1_machine()
    timings = []
    for x in ("aabb", "aaba"):
        for _ in range(1000):
            start = time.perf_counter()
            configs = run_trace(m, x)
            m.is_final(configs[-1].state, configs[-1].counters)
            timings.append(time.perf_counter() - start)
    main(["run", str(path), "aabb", "--timing", "--json"])
    cli_ms = json.loads(capsys.readouterr().out)["timing_ms"]
    worst_median_ms = statistics.median(timings) * 1000

    ok = (code_a == 0 and line_a == ACCEPT_TRACE and code_r == 1 and line_r == REJECT_TRACE
          and worst_median_ms < 1 and cli_ms < 1)
    record(1, ok, f"aabb -> '{line_a}' (exit {code_a}); aaba -> '{line_r}' (exit {code_r}); "
                  f"median run {worst_median_ms:.4f} ms, CLI run {cli_ms:.4f} ms")
    assert ok


def test_criterion_2_transform_certification():
    start = time.perf_counter()
    machines = corpus()
    failures, pairs = [], 0
    for name, m in machines.items():
        t = general_to_threshold(m)
        for label, image in (("to_incremental", to_incremental(m)), ("to_stateless", to_stateless(m)),
                             ("general_to_threshold", t), ("threshold_to_general", threshold_to_general(t))):
            report = difftest(m, image, 10)
            pairs += 1
            if not report.agree:
                failures.append(f"{name}/{label}: {report.counterexamples[:3]}")
        if not classify(to_incremental(m)).is_incremental or not classify(to_stateless(m)).is_stateless:
            failures.append(f"{name}: variant flags")
    for threshold in (-2, 0, 3):
        m = threshold_machine(threshold)
        plain = threshold_to_general(m)
        pairs += 1
        if plain.thresholds is not None or not difftest(m, plain, 10).agree:
            failures.append(f"threshold {threshold}")
    elapsed = time.perf_counter() - start
    ok = not failures and len(machines) >= 10 and elapsed < 300
    record(2, ok, f"{len(machines)} corpus machines, {pairs} transform pairs at length 10, "
                  f"{len(failures)} failing, {elapsed:.1f} s")
    assert ok, failures


def test_criterion_3_closure():
    machines = corpus()
    langs = {name: language(m, 8) for name, m in machines.items()}
    failures, checked = [], 0
    for names in alphabet_groups(machines).values():
        for a, b in itertools.product(names, repeat=2):
            ma, mb = machines[a], machines[b]
            la, lb = langs[a], langs[b]
            everything = set(all_strings(ma.alphabet, 8))
            expected = {
                "union": la | lb, "intersection": la & lb, "difference": la - lb,
                "symmetric_difference": la ^ lb,
            }
            for op in (union, intersection, difference, symmetric_difference):
                checked += 1
                if language(op(ma, mb), 8) != expected[op.__name__]:
                    failures.append(f"{op.__name__}({a}, {b})")
            if a == b:
                checked += 3
                if language(complement(ma), 8) != everything - la:
                    failures.append(f"complement({a})")
                if not difftest(complement(complement(ma)), ma, 8).agree:
                    failures.append(f"involution({a})")
                if language(difference(ma, ma), 8):
                    failures.append(f"L minus L ({a})")

    simplified = qscl_machines(40, seed=3)
    kept = 0
    for x, y in zip(simplified, simplified[1:]):
        if set(x.alphabet) != set(y.alphabet):
            continue
        for op in (union, intersection, difference, symmetric_difference):
            kept += 1
            if not classify(op(x, y)).is_simplified:
                failures.append("simplified-ness lost")
        if not classify(complement(x)).is_simplified:
            failures.append("simplified-ness lost (complement)")
    ok = not failures and kept > 0
    record(3, ok, f"{checked} closure checks at length 8 against set oracles, "
                  f"{kept} simplified products stayed simplified, {len(failures)} failing")
    assert ok, failures


def test_criterion_4_prefix_decider():
    details, ok = [], True
    for label, grammar in (("L1", L1), ("L2", L2), ("L3", L3)):
        oracle = lm_strings(grammar.arities, 10)
        total = sum(len(grammar.alphabet) ** n for n in range(11))
        # The recursive-descent recogniser must agree with bottom-up generation.
        descent = predicate_levels(lambda x: grammar_accepts(grammar, x), grammar.alphabet, 10)
        descent_ok = sum(sum(level) for level in descent) == len(oracle) and all(
            grammar_accepts(grammar, x) for x in oracle)

        guarded_lang = language(lm_machine(grammar, guarded=True), 10)
        verbatim_lang = language(lm_machine(grammar), 10)
        decide_ok = True
        decide_extra = set()
        for x in all_strings(grammar.alphabet, 10):
            expected = x in oracle
            if lm_decide(grammar, x, guarded=True) != expected:
                decide_ok = False
            verbatim = lm_decide(grammar, x)
            if verbatim != (x in verbatim_lang):
                decide_ok = False
            if verbatim and not expected:
                decide_extra.add(x)
        counterexamples = verbatim_lang - oracle
        shortest = min(counterexamples, key=lambda x: (len(x), x)) if counterexamples else None
        this_ok = (descent_ok and decide_ok and guarded_lang == oracle
                   and oracle <= verbatim_lang and decide_extra == counterexamples)
        ok &= this_ok
        details.append(f"{label}: {total} strings, {len(oracle)} expressions, guarded exact, "
                       f"verbatim accepts {len(counterexamples)} non-expressions"
                       + (f" (shortest '{' '.join(shortest)}')" if shortest else ""))
    record(4, ok, "; ".join(details))
    assert ok


def test_criterion_5_census():
    start = time.perf_counter()
    report = config_census(lm_machine(L2), 10)
    elapsed = time.perf_counter() - start
    functions_ok = [r.distinct_functions for r in report.rows] == [2 ** p for p in range(11)]
    # Fit C on the first rows, then check the bound on every row.
    c = max(r.reachable_configs / (r.p + 1) for r in report.rows[:6])
    bound_ok = all(r.reachable_configs <= c * r.p + c for r in report.rows)
    ok = functions_ok and bound_ok and elapsed < 60
    record(5, ok, f"distinct functions {[r.distinct_functions for r in report.rows]}; "
                  f"reachable configs {[r.reachable_configs for r in report.rows]} <= {c:g}*p + {c:g}; "
                  f"p = 10 census in {elapsed:.2f} s")
    assert ok


def test_criterion_6_scl_decomposition():
    mismatches = 0
    for u_a, u_b in itertools.product((-1, 0, 1), repeat=2):
        m = scl_machine({"a": [u_a], "b": [u_b]})
        for i in range(21):
            for j in range(21):
                final = run_trace(m, "a" * i + "b" * j)[-1].counters[0]
                if final != i * u_a + j * u_b or final != scl_counter_decomposition(u_a, u_b, i, j):
                    mismatches += 1
    amb = amb2m_machine()
    accepts_all = all(accepts(amb, "a" * m + "b" * (2 * m)) for m in range(31))
    report = difftest_predicate(amb, is_amb2m, 12)
    ok = mismatches == 0 and accepts_all and report.agree
    record(6, ok, f"9 update pairs x 441 (m, l): {mismatches} mismatches; amb2m accepts a^m b^2m "
                  f"for m <= 30: {accepts_all}; exhaustive length 12 ({report.tested_count} strings): "
                  f"{len(report.counterexamples)} counterexamples")
    assert ok


def test_criterion_7_qscl_verification():
    machines = qscl_machines(100)
    failing = sum(not verify_decomposition(m, 7).agree for m in machines)
    shapes = {(len(m.alphabet), m.num_counters) for m in machines}
    hand = [scl_machine({"a": [1], "b": [-1]}), scl_machine({"a": [1], "b": [-1], "r": ["x0"]})]
    hand_ok = all(verify_decomposition(m, 7).agree for m in hand)
    psi = parikh("ab", "abaa")
    ok = failing == 0 and hand_ok and psi == (3, 1) and all(k <= 2 and s <= 3 for s, k in shapes)
    record(7, ok, f"100 random QSCL machines at length 7: {failing} failing; "
                  f"#a=#b and reset machines verified: {hand_ok}; parikh('abaa') = {psi}")
    assert ok


def test_criterion_8_saturated_lstm():
    net, fig1 = counting_lstm(), fig1_machine()
    disagreements = 0
    for i in range(21):
        for j in range(21 - i):
            x = "a" * i + "b" * j
            if lstm_accepts(net, x) != accepts(fig1, x):
                disagreements += 1
    edges = all(lstm_accepts(net, "a" * n + "b" * n) and not lstm_accepts(net, "a" * n + "b" * (n + 1))
                and (n == 0 or not lstm_accepts(net, "a" * n + "b" * (n - 1))) for n in range(11))

    rng = random.Random(8)
    bad_gates = bad_states = fuzz_disagree = 0
    for _ in range(10_000):
        x = rng.choices("ab", k=rng.randint(0, 30))
        state = net.zero_state()
        for symbol in x:
            g = lstm_gates(net, state, symbol)
            if any(v not in (0, 1) for name in "fio" for v in g[name]) or any(v not in (-1, 1) for v in g["c"]):
                bad_gates += 1
            state = lstm_step(net, state, symbol)
            if any(v.denominator != 1 for v in state.c + state.h):
                bad_states += 1
        fuzz_disagree += lstm_accepts(net, x) != accepts(fig1, x)
    ok = disagreements == 0 and edges and bad_gates == 0 and bad_states == 0
    record(8, ok, f"a^i b^j with i + j <= 20: {disagreements} disagreements with fig1; "
                  f"10,000-string fuzz: {bad_gates} non-binary gate steps, {bad_states} non-integral "
                  f"states, {fuzz_disagree} verdict differences from fig1")
    assert ok


def test_criterion_9_serialization():
    failures = []
    machines = corpus()
    for name, m in machines.items():
        again = loads(dumps(m))
        if again != m or again.updates != m.updates or again.transitions != m.transitions:
            failures.append(f"{name}: structure")
        if not difftest(m, again, 8).agree:
            failures.append(f"{name}: language")
    ok = not failures
    record(9, ok, f"{len(machines)} corpus machines round-tripped, {len(failures)} failing")
    assert ok, failures


def test_lstm_run_matches_step_sequence():
    # Guard against lstm_run and lstm_step drifting apart (used above separately).
    net = counting_lstm()
    state = net.zero_state()
    for symbol in "aabba":
        state = lstm_step(net, state, symbol)
    assert lstm_run(net, "aabba")[-1] == state


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
