"""Command-line interface.

Exit status: 0 success (accept / agreement), 1 reject or disagreement,
2 usage error, 3 input or parse error, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import serialize
from .enumeration import DiffReport, difftest
from .errors import (BudgetExceededError, ContractError, InputError, MachineFormatError,
                     UnsupportedVariantError)
from .languages import (BOOL, L1, L2, L3, GrammarLm, amb2m_incremental_machine, amb2m_machine,
                        config_census, dyck1_machine, fig1_machine, grammar_accepts, lm_decide,
                        lm_machine, parity_machine)
from .machine import CounterMachine, as_tokens, classify, run_trace
from .semilinear import decompose_qscl, verify_decomposition
from .slstm import counting_lstm, load_weights, lstm_output, lstm_run, save_weights
from .transforms import (AND, DIFF, NOT, OR, SYMDIFF, BooleanCombinator, combine, general_to_threshold,
                         ring_plan, threshold_to_general, to_incremental, to_stateless)

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3, 4

NAMED_OPS = {"not": NOT, "and": AND, "or": OR, "diff": DIFF, "symdiff": SYMDIFF}

BUILTIN_MACHINES = {
    "fig1": fig1_machine,
    "amb2m": amb2m_machine,
    "amb2m-incremental": amb2m_incremental_machine,
    "dyck1": dyck1_machine,
    "parity": parity_machine,
    "lm1": lambda: lm_machine(L1, guarded=True),
    "lm2": lambda: lm_machine(L2, guarded=True),
    "lm3": lambda: lm_machine(L3, guarded=True),
}


@dataclass
class RunReport:
    verdict: bool
    trace: Optional[list] = None
    timing: float = 0.0

    def to_dict(self, with_timing: bool) -> dict:
        out = {"verdict": "accept" if self.verdict else "reject"}
        if self.trace is not None:
            out["trace"] = self.trace
        if with_timing:
            out["timing_ms"] = self.timing * 1000
        return out


def split_input(text: str, sep: Optional[str]) -> list:
    if sep is None:
        return list(text)
    return [] if text == "" else text.split(sep)


def format_trace(configs, tokens, verdict: bool) -> str:
    """``⟨0, q0⟩ →a ⟨1, q0⟩ ... ∈ F`` in the style of worked traces."""
    parts = [str(configs[0])]
    for token, config in zip(tokens, configs[1:]):
        parts.append(f"→{token} {config}")
    parts.append("∈ F" if verdict else "∉ F")
    return " ".join(parts)


def _emit(args, payload: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(payload, ensure_ascii=False, indent=1))
    else:
        print(text)


def _size(machine: CounterMachine) -> str:
    states = "state" if machine.num_states == 1 else "states"
    counters = "counter" if machine.num_counters == 1 else "counters"
    return f"{machine.num_states} {states}, {machine.num_counters} {counters}"


# -- commands -------------------------------------------------------------

def cmd_run(args) -> int:
    machine = serialize.load(args.machine)
    tokens = as_tokens(machine, split_input(args.input, args.sep))
    start = time.perf_counter()
    configs = run_trace(machine, tokens)
    verdict = machine.is_final(configs[-1].state, configs[-1].counters)
    elapsed = time.perf_counter() - start
    report = RunReport(verdict, None, elapsed)
    text = []
    if args.trace:
        line = format_trace(configs, tokens, verdict)
        report.trace = [{"state": c.state, "counters": list(c.counters)} for c in configs]
        text.append(line)
    text.append("accept" if verdict else "reject")
    if args.timing:
        text.append(f"time: {elapsed * 1000:.3f} ms")
    _emit(args, report.to_dict(args.timing), "\n".join(text))
    return EXIT_OK if verdict else EXIT_REJECT


def cmd_transform(args) -> int:
    machine = serialize.load(args.machine)
    notice = None
    if args.kind == "incremental":
        result = to_incremental(machine)
        plan = ring_plan(machine)
        notice = f"ring moduli d = {list(plan.moduli)}"
    elif args.kind == "stateless":
        result = to_stateless(machine)
    elif args.kind == "dethreshold":
        result = threshold_to_general(machine)
        if machine.thresholds is None:
            notice = "machine has no thresholds; copied unchanged"
    else:
        result = general_to_threshold(machine)
    serialize.save(result, args.out)
    payload = {
        "kind": args.kind,
        "before": {"states": machine.num_states, "counters": machine.num_counters},
        "after": {"states": result.num_states, "counters": result.num_counters},
        "notice": notice,
    }
    lines = [f"{args.kind}: {_size(machine)} -> {_size(result)}"]
    if notice:
        lines.append(notice)
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_combine(args) -> int:
    op = NAMED_OPS.get(args.op)
    if op is None:
        op = BooleanCombinator.from_string(args.op)
    machines = [serialize.load(path) for path in args.machines]
    result = combine(machines, op)
    serialize.save(result, args.out)
    payload = {"op": args.op, "table": str(op), "states": result.num_states, "counters": result.num_counters}
    _emit(args, payload, f"combine[{op}] of {len(machines)} machine(s): {_size(result)}")
    return EXIT_OK


def format_diff(report: DiffReport, sep: str) -> str:
    lines = [f"tested {report.tested_count} strings up to length {report.max_len}: "
             f"{len(report.counterexamples)} counterexample(s)"]
    for x, a, b in report.counterexamples[:50]:
        shown = sep.join(x) if x else "ε"
        lines.append(f"  {shown!s:>20}  A={'accept' if a else 'reject'}  B={'accept' if b else 'reject'}")
    if len(report.counterexamples) > 50:
        lines.append(f"  ... {len(report.counterexamples) - 50} more")
    return "\n".join(lines)


def cmd_difftest(args) -> int:
    a, b = serialize.load(args.machine_a), serialize.load(args.machine_b)
    report = difftest(a, b, args.max_len)
    sep = args.sep or ""
    _emit(args, report.to_dict(sep), format_diff(report, sep))
    return EXIT_OK if report.agree else EXIT_REJECT


def cmd_census(args) -> int:
    machine = serialize.load(args.machine) if args.machine else lm_machine(BOOL)
    try:
        report = config_census(machine, args.max_p)
    except BudgetExceededError as exc:
        if exc.partial is not None and exc.partial.rows:
            _emit(args, exc.partial.to_dict(), exc.partial.format_table())
        raise
    _emit(args, report.to_dict(), report.format_table())
    return EXIT_OK


def cmd_semilinear(args) -> int:
    machine = serialize.load(args.machine)
    decomposition = decompose_qscl(machine)
    payload = decomposition.to_dict()
    text = [decomposition.describe()]
    status = EXIT_OK
    if args.verify_len is not None:
        report = verify_decomposition(machine, args.verify_len)
        payload["verification"] = report.to_dict()
        verdict = "verified" if report.agree else "FAILED"
        text.append(f"{verdict}: {format_diff(report, '')}")
        status = EXIT_OK if report.agree else EXIT_REJECT
    _emit(args, payload, "\n".join(text))
    return status


def cmd_lstm(args) -> int:
    net = load_weights(args.weights)
    tokens = split_input(args.input, args.sep)
    start = time.perf_counter()
    states = lstm_run(net, tokens)
    verdict = lstm_output(net, states[-1]) == 1
    elapsed = time.perf_counter() - start
    report = RunReport(verdict, None, elapsed)
    text = []
    if args.trace:
        report.trace = [{"c": [str(v) for v in s.c], "h": [str(v) for v in s.h]} for s in states]
        text.append(str(states[0]))
        text.extend(f"→{t} {s}" for t, s in zip(tokens, states[1:]))
    text.append("accept" if verdict else "reject")
    if args.timing:
        text.append(f"time: {elapsed * 1000:.3f} ms")
    _emit(args, report.to_dict(args.timing), "\n".join(text))
    return EXIT_OK if verdict else EXIT_REJECT


def cmd_classify(args) -> int:
    machine = serialize.load(args.machine)
    report = classify(machine)
    lines = [_size(machine)]
    for name, ok in report.flags().items():
        lines.append(f"{name:>12}: {'yes' if ok else 'no'}")
        if not ok and name != "threshold":
            lines.extend(f"{'':>14}{w}" for w in report.violations.get(name, []))
    _emit(args, {"flags": report.flags(), "violations": report.violations}, "\n".join(lines))
    return EXIT_OK


def cmd_lm(args) -> int:
    grammar = GrammarLm.load(args.grammar) if args.grammar else BOOL
    tokens = split_input(args.input, args.sep)
    verbatim = lm_decide(grammar, tokens)
    guarded = lm_decide(grammar, tokens, guarded=True)
    oracle = grammar_accepts(grammar, tokens)
    payload = {"final_sum": verbatim, "guarded": guarded, "grammar": oracle}
    text = f"final-sum test: {verbatim}\nguarded test:   {guarded}\ngrammar:        {oracle}"
    _emit(args, payload, text)
    return EXIT_OK if oracle else EXIT_REJECT


def cmd_export(args) -> int:
    if args.name == "counting-lstm":
        save_weights(counting_lstm(), args.out)
        size = "5 cells"
    else:
        machine = BUILTIN_MACHINES[args.name]()
        serialize.save(machine, args.out)
        size = _size(machine)
    print(f"wrote {args.name} ({size}) to {args.out}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="countra", description="Real-time counter automata toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sep=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if sep:
            p.add_argument("--sep", default=None,
                           help="token delimiter for multi-character tokens (default: one token per character)")

    p = sub.add_parser("run", help="run a machine on an input string")
    p.add_argument("machine")
    p.add_argument("input")
    p.add_argument("--trace", action="store_true", help="print the configuration sequence")
    p.add_argument("--timing", action="store_true", help="report wall-clock time of the run")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("transform", help="apply a language-preserving construction")
    p.add_argument("kind", choices=["incremental", "stateless", "dethreshold", "threshold"])
    p.add_argument("machine")
    p.add_argument("out")
    common(p, sep=False)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("combine", help="boolean combination of machines")
    p.add_argument("op", help="not, and, or, diff, symdiff, or a truth table such as 1101")
    p.add_argument("machines", nargs="+")
    p.add_argument("-o", "--out", required=True)
    common(p, sep=False)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("difftest", help="compare two machines on all short strings")
    p.add_argument("machine_a")
    p.add_argument("machine_b")
    p.add_argument("--max-len", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_difftest)

    p = sub.add_parser("census", help="configurations vs boolean functions over operator prefixes")
    p.add_argument("--max-p", type=int, default=10)
    p.add_argument("--machine", help="machine over 0 1 ∧ ∨ (default: the one-counter L_2 decider)")
    common(p, sep=False)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("semilinear", help="decompose a stateless simplified machine")
    p.add_argument("machine")
    p.add_argument("--verify-len", type=int, default=None)
    common(p, sep=False)
    p.set_defaults(func=cmd_semilinear)

    p = sub.add_parser("lstm", help="run a saturated LSTM weight file")
    p.add_argument("weights")
    p.add_argument("input")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--timing", action="store_true")
    common(p)
    p.set_defaults(func=cmd_lstm)

    p = sub.add_parser("classify", help="report which machine variants apply")
    p.add_argument("machine")
    common(p, sep=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lm", help="check a prefix expression against an L_m grammar")
    p.add_argument("input")
    p.add_argument("--grammar", help="JSON file mapping token -> arity (default: 0 1 ∧ ∨)")
    common(p)
    p.set_defaults(func=cmd_lm)

    p = sub.add_parser("export", help="write a built-in machine or network to a file")
    p.add_argument("name", choices=sorted(BUILTIN_MACHINES) + ["counting-lstm"])
    p.add_argument("out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_len", 0) is not None and getattr(args, "max_len", 0) < 0:
        parser.error("--max-len must be non-negative")
    if getattr(args, "max_p", 0) < 0:
        parser.error("--max-p must be non-negative")
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"countra: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MachineFormatError, InputError, UnsupportedVariantError, ContractError, SyntaxError) as exc:
        print(f"countra: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"countra: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
