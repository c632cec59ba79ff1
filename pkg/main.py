#!/usr/bin/env python3
"""
Ferromagnet Ground State Verifier - Main Application Entry Point
Version: 1.0.0

Numerically certifies the ground state of the spin-1/2 Heisenberg
ferromagnet on a connected graph with positive couplings.

Usage:
    python main.py verify --graph chain8.txt
    python main.py verify --gen ring:10 --J random:0.5:2.0:seed3 --format structured
    python main.py spectrum --gen grid:3x4
    python main.py lemma --gen random:9:0.4:seed7
    python main.py gen --gen complete:6 --output k6.txt
    python main.py arithmetic-sweep --max-n 1000000
"""

import argparse
import logging
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional

# Add the current directory to Python path for imports
sys.path.insert(0, str(Path(__file__).parent))

from config.config_manager import ConfigManager, Tolerances
from core.errors import FerroError, InputError, ReportWriteError
from core.graph import CouplingGraph
from core.graph_io import format_edge_list, load_graph, parse_coupling_rule, parse_generator_spec
from pipeline.eigensolve import SolverPolicy
from pipeline.report import FORMATS, emit_report
from pipeline.verification_pipeline import REPORT_VERSION, VerificationPipeline
from pipeline.verify import exclusion_sweep, verify_lemma

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

COMMANDS = ("verify", "spectrum", "lemma", "gen", "arithmetic-sweep")
GRAPH_COMMANDS = ("verify", "spectrum", "lemma", "gen")
DEFAULT_MAX_N = 1000

COMMAND_HELP = {
    "verify": "check every ground state property",
    "spectrum": "lowest eigenvalues of every S^z sector",
    "lemma": "removable vertex pair of the graph",
    "gen": "write a generated instance as an edge list",
    "arithmetic-sweep": "exact exclusion arithmetic for N = 2..MAX_N",
}

GRAMMAR = "commands:\n" + "".join(f"  {name:<18}{text}\n" for name, text in COMMAND_HELP.items()) + """
graph source (exactly one, except for arithmetic-sweep):
  --graph FILE      edge list: "N <count>" then one "E <i> <j> <J>" per edge
  --gen SPEC        chain:N | ring:N | grid:RxC | complete:N | star:N | random:N:P:seedK
  --J RULE          uniform:J | random:LO:HI:seedK   (only with --gen)

options:
  --dense-cap INT  --krylov-count INT  --tol-energy X  --tol-span X  --seed INT
  --format text|structured  --output FILE  --timings  --max-n INT
  --config-dir DIR  --log-level LEVEL

exit codes: 0 pass, 1 a clause fails, 2 input or usage error
"""


class UsageError(InputError):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """One parsed command line. ``None`` means "use the configured default"."""

    command: str
    graph: Optional[str] = None
    gen: Optional[str] = None
    coupling: Optional[str] = None
    dense_cap: Optional[int] = None
    krylov_count: Optional[int] = None
    tol_energy: Optional[float] = None
    tol_span: Optional[float] = None
    seed: Optional[int] = None
    fmt: str = "text"
    output: Optional[str] = None
    max_n: Optional[int] = None
    timings: bool = False
    config_dir: Optional[str] = None
    log_level: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"Unknown command '{self.command}'. Supported: {', '.join(COMMANDS)}")
        if self.fmt not in FORMATS:
            raise UsageError(f"Unknown format '{self.fmt}'. Supported: {', '.join(FORMATS)}")

        sources = [s for s in (self.graph, self.gen) if s is not None]
        if self.command in GRAPH_COMMANDS and len(sources) != 1:
            raise UsageError(f"'{self.command}' needs exactly one of --graph or --gen")
        if self.command == "arithmetic-sweep" and sources:
            raise UsageError("'arithmetic-sweep' takes no graph source")
        if self.coupling is not None and self.gen is None:
            raise UsageError("--J applies only to --gen instances")
        if self.command != "arithmetic-sweep" and self.max_n is not None:
            raise UsageError("--max-n applies only to arithmetic-sweep")

        for name in ("tol_energy", "tol_span"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive, got {value}")

        if self.command == "gen" and self.output and self.graph:
            if Path(self.output).resolve() == Path(self.graph).resolve():
                raise UsageError("gen refuses to overwrite its input file")

    def to_argv(self) -> List[str]:
        """An argument list that parses back to this config."""
        argv = [self.command]
        flags = [
            ("--graph", self.graph), ("--gen", self.gen), ("--J", self.coupling),
            ("--dense-cap", self.dense_cap), ("--krylov-count", self.krylov_count),
            ("--tol-energy", self.tol_energy), ("--tol-span", self.tol_span),
            ("--seed", self.seed), ("--output", self.output), ("--max-n", self.max_n),
            ("--config-dir", self.config_dir), ("--log-level", self.log_level),
        ]
        for flag, value in flags:
            if value is not None:
                argv += [flag, repr(value) if isinstance(value, float) else str(value)]
        if self.fmt != "text":
            argv += ["--format", self.fmt]
        if self.timings:
            argv.append("--timings")
        return argv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--dense-cap', type=int, metavar='INT', help='Largest sector solved densely')
    common.add_argument('--krylov-count', type=int, metavar='INT', help='Eigenpairs per Krylov sector')
    common.add_argument('--tol-energy', type=float, metavar='X', help='Ground energy tolerance')
    common.add_argument('--tol-span', type=float, metavar='X', help='Product-state span tolerance')
    common.add_argument('--seed', type=int, metavar='INT', help='Seed for rotations and Krylov starts')
    common.add_argument('--format', dest='fmt', choices=FORMATS, default='text', help='Report format')
    common.add_argument('--output', metavar='FILE', help='Write to FILE instead of standard output')
    common.add_argument('--timings', action='store_true', help='Include wall-clock timings')
    common.add_argument('--config-dir', metavar='DIR', help='Configuration directory')
    common.add_argument('--log-level', metavar='LEVEL', help='Override the configured log level')

    source = _Parser(add_help=False)
    source.add_argument('--graph', metavar='FILE', help='Edge-list graph file')
    source.add_argument('--gen', metavar='SPEC', help='Generator spec, e.g. chain:8')
    source.add_argument('--J', dest='coupling', metavar='RULE', help='Coupling rule for --gen')

    parser = _Parser(
        prog="ferro-verifier",
        description="Ferromagnet Ground State Verifier",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    for name in GRAPH_COMMANDS:
        commands.add_parser(name, parents=[source, common], help=COMMAND_HELP[name])
    sweep = commands.add_parser('arithmetic-sweep', parents=[common], help=COMMAND_HELP['arithmetic-sweep'])
    sweep.add_argument('--max-n', type=int, metavar='INT', help=f'Largest N checked (default {DEFAULT_MAX_N})')
    return parser


def parse_args(argv: List[str]) -> RunConfig:
    namespace = build_parser().parse_args(argv)
    return RunConfig(**vars(namespace))


def load_source(config: RunConfig) -> CouplingGraph:
    if config.graph is not None:
        return load_graph(config.graph)
    coupling = parse_coupling_rule(config.coupling) if config.coupling else None
    return parse_generator_spec(config.gen, coupling)


def make_pipeline(config: RunConfig, manager: ConfigManager) -> VerificationPipeline:
    tolerances = Tolerances.from_config(manager)
    overrides = {key: value for key, value in (("energy", config.tol_energy), ("span", config.tol_span))
                 if value is not None}
    if overrides:
        tolerances = replace(tolerances, **overrides)
    policy = SolverPolicy.from_config(manager, dense_cap=config.dense_cap, krylov_count=config.krylov_count,
                                      seed=config.seed, tolerances=tolerances)
    return VerificationPipeline(policy, int(manager.get('verification.max_rotation_attempts', 5)))


def _write_text(content: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(content)
        return
    try:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(content)
    except OSError as e:
        raise ReportWriteError(f"Failed to write {output}: {e}") from e


def run_command(config: RunConfig, manager: ConfigManager) -> int:
    if config.command == "arithmetic-sweep":
        max_n = config.max_n if config.max_n is not None else DEFAULT_MAX_N
        summary = exclusion_sweep(max_n)
        if not config.timings:
            summary.pop("elapsed_ms", None)
        summary["summary"] = ("no excluded S admits a solution" if summary["pass"]
                              else f"{summary['failure_count']} values of N admit an excluded solution")
        emit_report(summary, config.fmt, config.output)
        return EXIT_PASS if summary["pass"] else EXIT_FAIL

    graph = load_source(config)
    logger.info(f"Graph loaded: N={graph.vertex_count}, |E|={len(graph.edges)}")

    if config.command == "gen":
        if config.fmt == "structured":
            emit_report(graph.summary(), config.fmt, config.output)
        else:
            _write_text(format_edge_list(graph, comment=f"generated from {config.gen}"), config.output)
        return EXIT_PASS

    if config.command == "lemma":
        result = verify_lemma(graph)
        payload = {"version": REPORT_VERSION, "graph": graph.summary(), "pass": result.passed}
        payload.update({key: value for key, value in result.evidence.items() if key != "max_dev"})
        emit_report(payload, config.fmt, config.output)
        return EXIT_PASS if result.passed else EXIT_FAIL

    pipeline = make_pipeline(config, manager)
    if config.command == "spectrum":
        emit_report(pipeline.spectrum(graph, config.krylov_count), config.fmt, config.output)
        return EXIT_PASS

    report = pipeline.verify(graph)
    emit_report(report, config.fmt, config.output, include_timings=config.timings)
    return EXIT_PASS if report.passed else EXIT_FAIL


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = parse_args(argv)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        print(build_parser().format_usage(), file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        manager = ConfigManager(config.config_dir, configure_logging=False)
        manager.setup_logging(config.log_level)
        return run_command(config, manager)
    except InputError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ReportWriteError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT
    except FerroError as e:
        print(f"❌ Verification could not complete: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT


def main():
    """Main application entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
