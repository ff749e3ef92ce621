"""Command-line interface.

Subcommands:

* ``synth``   -- run the full pipeline on one task file, write the emitted
  program (and serialized intermediates) plus a one-row metrics CSV.
* ``bench``   -- run a directory of tasks under both objectives, write the
  metrics CSV, emitted programs, and the aggregate improvement line.
* ``ablate``  -- run a suite with one phase skipped (--skip 1|2|3).
* ``explain`` -- print p1/p12/p123 and the rewrite trace for one task.
* ``eval``    -- run a serialized program over stdin lines.
* ``report``  -- render figures from a metrics CSV.

Exit codes: 0 success, 1 usage error, 2 synthesis failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bench import MetricsRow, run_suite, write_metrics
from .dsl import EvalError, evaluate
from .pipeline import PipelineConfig, SynthesisFailure, run_ablation, run_pipeline
from .rankers import load_weights
from .rewrite import shipped_rules
from .sexpr import ParseError, parse, serialize
from .synthesis import SynthConfig, SynthesisDeadline
from .tasks import BenchmarkTask, TaskError, load_suite, load_task

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SYNTH = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--objective", choices=("size", "perf", "both"), default=None,
                     help="cost objective (synth/explain default: the task's; bench: both)")
    sub.add_argument("--sample-size", type=int, default=20,
                     help="representative sample size for the equivalence spec")
    sub.add_argument("--top-k", type=int, default=None,
                     help="phase-2 candidate count (default 1 for perf, 5 for size)")
    sub.add_argument("--depth", type=int, default=4,
                     help="maximum concatenation parts searched")
    sub.add_argument("--budget", type=int, default=500,
                     help="rewrite search node-expansion budget")
    sub.add_argument("--seed", type=int, default=0,
                     help="random seed (the pipeline is deterministic; accepted "
                          "so runs are reproducible by construction)")
    sub.add_argument("--timeout-ms", type=int, default=None,
                     help="synthesis deadline per call in milliseconds")
    sub.add_argument("--weights", type=Path, default=None,
                     help="perf weight config file overriding the shipped defaults")
    sub.add_argument("--out", type=Path, default=Path("out"),
                     help="directory for emitted programs")
    sub.add_argument("--metrics", type=Path, default=None,
                     help="metrics CSV path")


def _pipeline_config(args, objective: str) -> PipelineConfig:
    synth = SynthConfig(
        max_concat_parts=args.depth,
        top_k=1,
        deadline_ms=args.timeout_ms,
    )
    weights = load_weights(args.weights) if args.weights else None
    return PipelineConfig(
        objective=objective,
        sample_n=args.sample_size,
        synth=synth,
        phase2_top_k=args.top_k,
        rewrite_budget=args.budget,
        weights=weights,
    )


def _objectives(args, task: BenchmarkTask | None = None) -> tuple[str, ...]:
    if args.objective == "both":
        return ("size", "perf")
    if args.objective:
        return (args.objective,)
    if task is not None:
        return (task.objective,)
    return ("size", "perf")


def _cmd_synth(args) -> int:
    task = load_task(args.task)
    objective = _objectives(args, task)[0]
    cfg = _pipeline_config(args, objective)
    result = run_pipeline(task.examples, task.corpus, cfg)

    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"{task.name}__{objective}"
    emitted_path = args.out / f"{stem}__p123.py"
    emitted_path.write_text(result.emitted.text, encoding="utf-8")
    for label in ("p1", "p12", "p123"):
        program = getattr(result, label)
        (args.out / f"{stem}__{label}.sexp").write_text(
            serialize(program) + "\n", encoding="utf-8"
        )
    if args.metrics:
        row = MetricsRow(
            task=task.name,
            objective=objective,
            e1=result.e1,
            o1=result.o1,
            o12=result.o12,
            o123=result.o123,
            improvement_ratio=(-result.o1) / (-result.o123),
            t_pbe_ms=result.t_pbe_ms,
            t_opt_ms=result.t_opt_ms,
            overhead_ratio=result.t_opt_ms / result.t_pbe_ms if result.t_pbe_ms else None,
        )
        write_metrics([row], args.metrics)
    print(f"{task.name}: {serialize(result.p123)}")
    print(f"emitted {emitted_path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    tasks = load_suite(args.tasks)
    cfg = _pipeline_config(args, "perf")
    result = run_suite(
        tasks,
        cfg,
        out_dir=args.out,
        metrics_path=args.metrics or Path("metrics.csv"),
        objectives=_objectives(args),
        jobs=args.jobs,
        repeat=args.repeat,
    )
    for line in result.aggregate_lines():
        print(line)
    failures = [r for r in result.rows if r.error]
    print(f"{len(result.rows) - len(failures)}/{len(result.rows)} rows ok")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    tasks = load_suite(args.tasks)
    rows = []
    for task in tasks:
        for objective in _objectives(args):
            cfg = replace(
                _pipeline_config(args, objective), ablation=f"skip{args.skip}"
            )
            row = MetricsRow(task=task.name, objective=objective)
            try:
                result = run_ablation(task.examples, task.corpus, cfg, reference=task.reference)
                row.e1 = result.e1
                row.e2 = result.e2
                row.o1 = result.o1
                row.o12 = result.o12
                row.o13 = result.o13
            except Exception as exc:
                row.error = f"{type(exc).__name__}: {exc}"
                print(f"task {task.name} [{objective}] failed: {row.error}", file=sys.stderr)
            rows.append(row)
    write_metrics(rows, args.metrics or Path(f"metrics_skip{args.skip}.csv"))
    print(f"{sum(1 for r in rows if not r.error)}/{len(rows)} rows ok")
    return EXIT_OK


def _cmd_explain(args) -> int:
    task = load_task(args.task)
    objective = _objectives(args, task)[0]
    cfg = _pipeline_config(args, objective)
    result = run_pipeline(task.examples, task.corpus, cfg)
    print(f"task: {task.name} (objective {objective})")
    print(f"p1  : {serialize(result.p1)}")
    print(f"p12 : {serialize(result.p12)}")
    print(f"p123: {serialize(result.p123)}")
    if result.steps:
        print("rewrites:")
        for step in result.steps:
            print(f"  [{step.rule_id}] at {list(step.path)}")
            print(f"    before: {step.before}")
            print(f"    after : {step.after}")
    else:
        print("rewrites: none applied")
    print("rules available:")
    for rule in shipped_rules():
        decreasing = ", ".join(sorted(rule.cost_decreasing)) or "none"
        print(f"  {rule.id} (cost-decreasing under: {decreasing})")
    return EXIT_OK


def _cmd_eval(args) -> int:
    try:
        program = parse(Path(args.program).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"cannot read program: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in sys.stdin:
        text = line.rstrip("\n")
        try:
            output = evaluate(program, text)
        except EvalError:
            output = None
        if args.json:
            print(json.dumps(output, ensure_ascii=False))
        else:
            print(output if output is not None else "<no output>")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import render_report

    written = render_report(args.metrics, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="textsynth", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="run the pipeline on one task")
    synth.add_argument("--task", type=Path, required=True)
    _add_common(synth)
    synth.set_defaults(func=_cmd_synth)

    bench = commands.add_parser("bench", help="run a task suite")
    bench.add_argument("--tasks", type=Path, required=True)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--repeat", type=int, default=1,
                       help="timing repetitions; medians are reported")
    _add_common(bench)
    bench.set_defaults(func=_cmd_bench)

    ablate = commands.add_parser("ablate", help="run a suite with one phase skipped")
    ablate.add_argument("--tasks", type=Path, required=True)
    ablate.add_argument("--skip", type=int, choices=(1, 2, 3), required=True)
    _add_common(ablate)
    ablate.set_defaults(func=_cmd_ablate)

    explain = commands.add_parser("explain", help="print programs and rewrite trace")
    explain.add_argument("--task", type=Path, required=True)
    _add_common(explain)
    explain.set_defaults(func=_cmd_explain)

    evaluate_cmd = commands.add_parser("eval", help="run a serialized program on stdin lines")
    evaluate_cmd.add_argument("--program", type=Path, required=True)
    evaluate_cmd.add_argument("--json", action="store_true",
                              help="JSON-encode outputs (null when the program fails)")
    evaluate_cmd.set_defaults(func=_cmd_eval)

    report = commands.add_parser("report", help="render figures from a metrics CSV")
    report.add_argument("--metrics", type=Path, required=True)
    report.add_argument("--out-dir", type=Path, default=Path("figures"))
    report.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TaskError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SynthesisFailure, SynthesisDeadline) as exc:
        print(f"synthesis failed: {exc}", file=sys.stderr)
        return EXIT_SYNTH
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
