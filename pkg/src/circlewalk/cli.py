"""Command-line harness: every experiment with reproducible seeds and stable output.

Identical arguments (including the seed) produce byte-identical primary
output.  Exit codes: 0 success, 1 verification failure, 2 argument/validation
error, 3 infeasible avoidance, 4 size-budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .core import (
    NAMED_STEPS,
    BudgetError,
    CirclewalkError,
    InfeasibleAvoidanceError,
    StepSet,
    ValidationError,
    Word,
    orbit,
    sample_word,
)
from .equidist import ud_profile
from .exceptional import CantorSchedule, cantor_word, dimension_estimate, gdelta_word, separation_ratios
from .verify import run_suite
from .weyl import mc_second_moment, mc_tail_probability, weyl_sum

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

OUTPUT_DIR_ENV = "CIRCLEWALK_OUTPUT_DIR"


def _parse_steps(text: str) -> StepSet:
    """Comma-separated step values: decimals, named constants, or exact p/q."""
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise ValidationError("empty step value")
        if token in NAMED_STEPS:
            values.append(NAMED_STEPS[token])
        elif "/" in token:
            values.append(Fraction(token))
        else:
            values.append(float(token))
    return StepSet(values)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse integer list {text!r}") from exc


def _dyadic_checkpoints(n: int) -> list[int]:
    cps = []
    k = 1
    while 2**k <= n:
        cps.append(2**k)
        k += 1
    if not cps or cps[-1] != n:
        cps.append(n)
    return cps


def _resolve_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        full = _resolve_path(path)
        os.makedirs(os.path.dirname(full) or ".", exist_ok=True)
        with open(full, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _word_from_args(args, ell: int) -> Word:
    if args.word is not None:
        return Word.from_string(args.word)
    if args.length is None:
        raise ValidationError("provide either --word or --seed/--length")
    return sample_word(args.seed, args.length, ell)


def _cmd_orbit(args) -> int:
    steps = _parse_steps(args.steps)
    word = _word_from_args(args, steps.ell)
    orb = orbit(word, steps)
    if args.format == "csv":
        lines = ["n,position"]
        lines += [f"{n},{float(p)!r}" for n, p in enumerate(orb.positions, start=1)]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        payload = {
            "schema": "circlewalk/orbit/v1",
            "steps": list(steps.values),
            "word": word.to_string() if len(word) <= 10**6 else None,
            "positions": list(map(float, orb.positions)),
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_weyl(args) -> int:
    steps = _parse_steps(args.steps)
    word = _word_from_args(args, steps.ell)
    orb = orbit(word, steps)
    cps = _parse_int_list(args.checkpoints) if args.checkpoints else _dyadic_checkpoints(len(orb))
    series = weyl_sum(orb, args.h, cps)
    _emit(series.to_csv() if args.format == "csv" else series.to_json(), args.output)
    return EXIT_OK


def _cmd_moment(args) -> int:
    steps = _parse_steps(args.steps)
    rep = mc_second_moment(steps, args.h, args.N, args.trials, args.seed, threads=args.threads)
    _emit(rep.to_csv() if args.format == "csv" else rep.to_json(), args.output)
    return EXIT_OK


def _cmd_tail(args) -> int:
    steps = _parse_steps(args.steps)
    rep = mc_tail_probability(
        steps, args.h, args.N, args.epsilon, args.trials, args.seed, threads=args.threads
    )
    _emit(rep.to_json(), args.output)
    return EXIT_OK


def _cmd_discrepancy(args) -> int:
    steps = _parse_steps(args.steps)
    word = _word_from_args(args, steps.ell)
    orb = orbit(word, steps)
    cps = _parse_int_list(args.checkpoints) if args.checkpoints else _dyadic_checkpoints(len(orb))
    profile = ud_profile(orb, cps)
    _emit(profile.to_csv() if args.format == "csv" else profile.to_json(), args.output)
    return EXIT_OK


def _schedule_from_args(args) -> CantorSchedule:
    eps = Fraction(args.eps)
    if args.schedule:
        return CantorSchedule(eps, tuple(_parse_int_list(args.schedule)))
    if args.rule == "square":
        return CantorSchedule.squares(eps, args.n1, args.count)
    if args.rule == "geometric":
        return CantorSchedule.geometric(eps, args.base, args.count)
    raise ValidationError("provide --schedule or --rule with its parameters")


def _cmd_exceptional(args) -> int:
    steps = _parse_steps(args.steps)
    if args.kind == "gdelta":
        if args.tau is None:
            raise ValidationError("gdelta construction needs --tau")
        word, cert = gdelta_word(steps, args.tau, args.n1, args.stages, args.seed)
    else:
        schedule = _schedule_from_args(args)
        if args.q is None:
            raise ValidationError("cantor construction needs --q")
        stages = args.stages if args.stages is not None else len(schedule)
        word, cert = cantor_word(steps, schedule, args.q, args.seed, stages)
    payload = json.loads(cert.to_json())
    payload["word"] = word.to_string()
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    return EXIT_OK


def _dimension_payload(schedule: CantorSchedule) -> dict:
    return {
        "schema": "circlewalk/dimension_report/v1",
        "eps": str(schedule.eps),
        "n": list(schedule.n),
        "n_tilde": list(schedule.n_tilde),
        "log2_q": list(schedule.log2_q),
        "estimates": [dimension_estimate(schedule, k) for k in range(1, len(schedule) + 1)],
        "separation_ratios": separation_ratios(schedule) if len(schedule) >= 2 else [],
        "limit_value": float(1 / (1 + schedule.eps)),
    }


def _cmd_dimension(args) -> int:
    schedule = _schedule_from_args(args)
    payload = _dimension_payload(schedule)
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = run_suite(args.suite, args.seed, echo=print)
    if args.output:
        _emit(report.to_json(), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _cmd_report(args) -> int:
    from . import report as figures

    steps = _parse_steps(args.steps) if args.steps else None
    prefix = _resolve_path(args.prefix)
    os.makedirs(os.path.dirname(prefix) or ".", exist_ok=True)
    if args.kind == "dimension":
        schedule = _schedule_from_args(args)
        payload = _dimension_payload(schedule)
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", prefix + ".json")
        figures.render_dimension_estimates(schedule, prefix + ".png")
        written = [prefix + ".json", prefix + ".png"]
    else:
        if steps is None:
            raise ValidationError(f"report kind {args.kind!r} needs --steps")
        word = _word_from_args(args, steps.ell)
        orb = orbit(word, steps)
        cps = _parse_int_list(args.checkpoints) if args.checkpoints else _dyadic_checkpoints(len(orb))
        if args.kind == "discrepancy":
            profile = ud_profile(orb, cps)
            _emit(profile.to_csv(), prefix + ".csv")
            figures.render_discrepancy_profile(profile, prefix + ".png")
        elif args.kind == "weyl":
            series = weyl_sum(orb, args.h, cps)
            _emit(series.to_csv(), prefix + ".csv")
            figures.render_weyl_growth(series, prefix + ".png")
        else:  # orbit histogram
            lines = ["n,position"] + [f"{n},{float(p)!r}" for n, p in enumerate(orb.positions, 1)]
            _emit("\n".join(lines) + "\n", prefix + ".csv")
            figures.render_orbit_histogram(orb, prefix + ".png")
        written = [prefix + ".csv", prefix + ".png"]
    print("\n".join(written))
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, word_input: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    if word_input:
        p.add_argument("--steps", required=True,
                       help="comma-separated step values (decimals, p/q, or sqrt2m1/sqrt3m1/golden)")
        p.add_argument("--word", default=None, help="explicit word as digit string")
        p.add_argument("--length", type=int, default=None, help="sampled word length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circlewalk",
        description="Random step-choice orbits on the unit circle: "
        "equidistribution experiments and exceptional constructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="emit orbit positions")
    _add_common(p, word_input=True)
    p.set_defaults(fn=_cmd_orbit)

    p = sub.add_parser("weyl", help="Weyl sums at checkpoints")
    _add_common(p, word_input=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--checkpoints", default=None, help="comma-separated N values (default dyadic)")
    p.set_defaults(fn=_cmd_weyl)

    p = sub.add_parser("moment", help="Monte Carlo second moment vs closed form")
    _add_common(p)
    p.add_argument("--steps", required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_moment)

    p = sub.add_parser("tail", help="tail probability of the completion sum")
    _add_common(p)
    p.add_argument("--steps", required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_tail)

    p = sub.add_parser("discrepancy", help="star discrepancy profile")
    _add_common(p, word_input=True)
    p.add_argument("--checkpoints", default=None)
    p.set_defaults(fn=_cmd_discrepancy)

    p = sub.add_parser("exceptional", help="construct a certified non-equidistributed word")
    _add_common(p)
    p.add_argument("--steps", required=True)
    p.add_argument("--kind", choices=("gdelta", "cantor"), required=True)
    p.add_argument("--tau", type=float, default=None, help="forbidden interval length (gdelta)")
    p.add_argument("--n1", type=int, default=4, help="first stage length")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--q", type=int, default=None, help="number of cells (cantor)")
    p.add_argument("--eps", default="1", help="avoidance fraction (exact, e.g. 1/2)")
    p.add_argument("--schedule", default=None, help="explicit comma-separated n_k list")
    p.add_argument("--rule", choices=("square", "geometric"), default=None)
    p.add_argument("--base", type=int, default=4)
    p.add_argument("--count", type=int, default=4)
    p.set_defaults(fn=_cmd_exceptional, stages_default=True)

    p = sub.add_parser("dimension", help="Cantor-scheme dimension estimates")
    _add_common(p)
    p.add_argument("--eps", default="1")
    p.add_argument("--schedule", default=None)
    p.add_argument("--rule", choices=("square", "geometric"), default=None)
    p.add_argument("--n1", type=int, default=8)
    p.add_argument("--base", type=int, default=4)
    p.add_argument("--count", type=int, default=6)
    p.set_defaults(fn=_cmd_dimension)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", default="acceptance", help="acceptance | oracles | smoke")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", "-o", default=None, help="also write the JSON report here")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("report", help="render a figure alongside the delimited output")
    p.add_argument("--kind", choices=("discrepancy", "weyl", "dimension", "orbit"), required=True)
    p.add_argument("--prefix", required=True, help="output path prefix (.csv/.json and .png)")
    p.add_argument("--steps", default=None)
    p.add_argument("--word", default=None)
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--checkpoints", default=None)
    p.add_argument("--eps", default="1")
    p.add_argument("--schedule", default=None)
    p.add_argument("--rule", choices=("square", "geometric"), default=None)
    p.add_argument("--n1", type=int, default=8)
    p.add_argument("--base", type=int, default=4)
    p.add_argument("--count", type=int, default=6)
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InfeasibleAvoidanceError as exc:
        print(f"error (infeasible avoidance): {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetError as exc:
        print(f"error (size budget): {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, ValueError, ZeroDivisionError) as exc:
        print(f"error (invalid arguments): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CirclewalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
