"""Command-line front end.

Exit codes for ``synthesize`` and ``decide`` follow solver-competition
conventions: 10 = synthesized / true, 20 = false, 0 = unknown,
1 = usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .certificate import format_henkin_vector, parse_henkin_vector
from .engine import Config, False_, Synthesized, synthesize
from .formula import DqbfInstance, ParseError, read_dqdimacs
from . import oracle
from .verifier import Verified, verify

EXIT_SYNTHESIZED = 10
EXIT_FALSE = 20
EXIT_UNKNOWN = 0
EXIT_ERROR = 1
EXIT_INVALID = 2

CSV_HEADER = ["instance", "outcome", "seconds", "iterations", "solver_calls", "seed"]
INSTANCE_SUFFIXES = (".dqdimacs", ".qdimacs", ".dimacs", ".cnf")


def _seed(value: int) -> int:
    return int(time.time_ns() % 2**31) if value == 0 else value


def _load_candidates(path: str, instance: DqbfInstance) -> dict:
    with open(path) as fh:
        _, vec = parse_henkin_vector(fh.read())
    missing = set(instance.existentials) - set(vec.functions)
    if missing:
        raise ValueError(f"candidate file lacks definitions for {sorted(missing)}")
    return dict(vec.functions)


def cmd_synthesize(args) -> int:
    try:
        instance = read_dqdimacs(args.instance)
    except (OSError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    trace = None
    try:
        if args.trace_repairs:
            trace = open(args.trace_repairs, "w")
        config = Config(
            seed=_seed(args.seed),
            samples=args.samples,
            timeout=args.timeout,
            max_iterations=args.max_iterations,
            strict_paper=args.strict_paper,
            dump_samples=args.dump_samples,
            dump_trees=args.dump_trees,
            trace_repairs=trace,
        )
        if args.candidates:
            config.initial_candidates = _load_candidates(args.candidates, instance)
        outcome = synthesize(instance, config)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        if trace:
            trace.close()

    s = outcome.stats
    print(
        f"c seed={config.seed} samples={s.samples} iterations={s.iterations} "
        f"repairs={s.repairs} probes={s.probes} solver_calls={s.solver_calls} "
        f"seconds={s.seconds:.3f}"
    )
    result = outcome.result
    if isinstance(result, Synthesized):
        text = format_henkin_vector(instance, result.vector)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        print("RESULT: SYNTHESIZED")
        return EXIT_SYNTHESIZED
    if isinstance(result, False_):
        xs = " ".join(str(x if b else -x) for x, b in sorted(result.witness.items()))
        print(f"c witness: {xs}")
        print("RESULT: FALSE")
        return EXIT_FALSE
    diag = result.reason
    if result.unrepaired:
        diag += "; unrepaired existentials: " + " ".join(map(str, result.unrepaired))
    print(f"c diagnosis: {diag}")
    print("RESULT: UNKNOWN")
    return EXIT_UNKNOWN


def cmd_verify(args) -> int:
    """Check a henkin-fn v1 certificate against an instance."""
    try:
        instance = read_dqdimacs(args.instance)
        num_vars, vector = parse_henkin_vector(Path(args.certificate).read_text())
    except (OSError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    problems = []
    if num_vars != instance.num_vars:
        problems.append(f"certificate declares {num_vars} variables, instance has {instance.num_vars}")
    if set(vector.functions) != set(instance.existentials):
        problems.append("definitions do not match the existentials")
    elif vector.henkin_violations(instance):
        problems.append(f"Henkin sets violated: {vector.henkin_violations(instance)}")
    if problems:
        for p in problems:
            print(f"c {p}")
        print("CERTIFICATE: INVALID")
        return EXIT_INVALID
    if len(instance.universals) <= args.enum_cap:
        ok = oracle.check_vector(instance, vector)
        method = "enumeration"
    else:
        ok = isinstance(verify(instance, vector), Verified)
        method = "sat"
    print(f"c method: {method}")
    print("CERTIFICATE: VALID" if ok else "CERTIFICATE: INVALID")
    return 0 if ok else EXIT_INVALID


def cmd_decide(args) -> int:
    try:
        instance = read_dqdimacs(args.instance)
        truth, _ = oracle.decide_truth(instance)
    except (OSError, ParseError, oracle.CapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    print("RESULT: TRUE" if truth else "RESULT: FALSE")
    return EXIT_SYNTHESIZED if truth else EXIT_FALSE


# -- benchmarking ----------------------------------------------------------

@dataclass
class RunRecord:
    instance: str
    outcome: str
    seconds: float
    iterations: int
    solver_calls: int
    seed: int

    def row(self) -> list:
        return [self.instance, self.outcome, f"{self.seconds:.4f}", self.iterations, self.solver_calls, self.seed]


def run_one(path: str, seed: int, timeout: float | None, max_iterations: int, strict: bool) -> RunRecord:
    name = os.path.basename(path)
    start = time.monotonic()
    try:
        instance = read_dqdimacs(path)
    except (OSError, ParseError, ValueError):
        return RunRecord(name, "parse_error", time.monotonic() - start, 0, 0, seed)
    try:
        outcome = synthesize(
            instance,
            Config(seed=seed, timeout=timeout, max_iterations=max_iterations, strict_paper=strict),
        )
    except Exception as e:  # recorded, never fatal for the batch
        logging.getLogger(__name__).warning("%s: %s", name, e)
        return RunRecord(name, "error", time.monotonic() - start, 0, 0, seed)
    s = outcome.stats
    return RunRecord(name, outcome.kind, s.seconds, s.iterations, s.solver_calls, seed)


def list_instances(directory: str) -> list[str]:
    return sorted(
        str(p) for p in Path(directory).iterdir()
        if p.is_file() and p.suffix in INSTANCE_SUFFIXES
    )


def cmd_bench(args) -> int:
    if not os.path.isdir(args.directory):
        print(f"error: not a directory: {args.directory}", file=sys.stderr)
        return EXIT_ERROR
    paths = list_instances(args.directory)
    seed = _seed(args.seed)
    job = (seed, args.timeout, args.max_iterations, args.strict_paper)
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(run_one, paths, *[[j] * len(paths) for j in job]))
    else:
        records = [run_one(p, *job) for p in paths]

    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())
    finally:
        if args.csv:
            out.close()

    solved = sorted(r.seconds for r in records if r.outcome in ("synthesized", "false"))
    if args.cactus:
        with open(args.cactus, "w") as fh:
            fh.write("solved cumulative_seconds\n")
            total = 0.0
            for i, t in enumerate(solved, start=1):
                total += t
                fh.write(f"{i} {total:.4f}\n")
    counts = {k: sum(r.outcome == k for r in records)
              for k in ("synthesized", "false", "unknown", "parse_error", "error")}
    summary = " ".join(f"{k}={v}" for k, v in counts.items())
    times = [r.seconds for r in records if r.outcome not in ("parse_error", "error")]
    if times:
        summary += f" min={min(times):.3f}s median={statistics.median(times):.3f}s"
    print(f"c instances={len(records)} {summary}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="henkin-synth", description="Henkin function synthesis for DQBF")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=1, help="random seed; 0 = time-derived (default: 1)")
        sp.add_argument("--timeout", type=float, default=None, help="seconds per instance (default: none)")
        sp.add_argument("--max-iterations", type=int, default=1000,
                        help="verify/repair iteration budget (default: 1000)")
        sp.add_argument("--strict-paper", action="store_true",
                        help="single learning phase, no resampling fallback")

    s = sub.add_parser("synthesize", help="synthesize Henkin functions for one instance")
    s.add_argument("instance")
    common(s)
    s.add_argument("--samples", type=int, default=None,
                   help="sample count (default: min(10000, 50*(|X|+|Y|)))")
    s.add_argument("--output", "-o", help="write the henkin-fn v1 certificate here (default: stdout)")
    s.add_argument("--dump-samples", metavar="PATH", help="write the sample table as CSV")
    s.add_argument("--dump-trees", metavar="DIR", help="write one decision tree per existential")
    s.add_argument("--trace-repairs", metavar="PATH", help="log every repair probe")
    s.add_argument("--candidates", metavar="PATH",
                   help="start from these candidates (henkin-fn v1 syntax) instead of learning")
    s.set_defaults(func=cmd_synthesize)

    b = sub.add_parser("bench", help="run every instance in a directory")
    b.add_argument("directory")
    common(b)
    b.set_defaults(timeout=60.0)
    b.add_argument("--jobs", "-j", type=int, default=1, help="parallel workers (default: 1)")
    b.add_argument("--csv", metavar="PATH", help="CSV output (default: stdout)")
    b.add_argument("--cactus", metavar="PATH", help="write solved-count vs cumulative time")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check a henkin-fn v1 certificate")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.add_argument("--enum-cap", type=int, default=oracle.MAX_UNIVERSALS,
                   help="enumerate when |X| is at most this, else use SAT (default: %(default)s)")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decide", help="decide truth by brute force (small instances only)")
    d.add_argument("instance")
    d.set_defaults(func=cmd_decide)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="c %(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
