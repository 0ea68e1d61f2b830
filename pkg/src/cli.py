"""
Command-line interface for the BREA simulator.

This module provides commands for running experiments, sweeping the
quantization level and validating configurations.
"""

import argparse
import sys

from pydantic import ValidationError

from .config import ExperimentConfig, parse_adversary, validate_config
from .errors import BreaError, ConfigError
from .experiment import run_experiment, sweep_q
from .utils import setup_logging

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_ALL_ABORTED = 3


class BreaCLI:
    """Command-line interface for the BREA simulator."""

    def __init__(self):
        """Initialize the CLI with argument parser."""
        self.parser = argparse.ArgumentParser(
            description="BREA - Byzantine-resilient secure aggregation simulator",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  brea run                                   # Default setting, FedAvg and BREA
  brea run --config exp.json --out runs/a    # Run a config file
  brea run --scheme brea --adversary CorruptDistances:6,PoisonModel:6
  brea sweep-q --q-values 32,256,1024        # One run per quantization level
  brea validate --config exp.json            # Check the resilience bound only
            """,
        )
        self.setup_parser()

    @staticmethod
    def _add_config_arguments(parser):
        parser.add_argument("--config", help="JSON experiment configuration")
        parser.add_argument("--n", type=int, help="Number of users N")
        parser.add_argument("--a", type=int, help="Byzantine budget A")
        parser.add_argument("--d", type=int, help="Dropout budget D")
        parser.add_argument("--t", type=int, help="Sharing degree T")
        parser.add_argument("--m", type=int, help="Selected-set size m")
        parser.add_argument("--q", type=int, help="Quantization level q")
        parser.add_argument("--p", type=int, help="Field modulus p")
        parser.add_argument("--rounds", type=int, help="Number of rounds J")
        parser.add_argument("--seed", type=int, help="Master seed")
        parser.add_argument(
            "--scheme", choices=["fedavg", "brea", "both"], help="Schemes to run"
        )
        parser.add_argument(
            "--adversary",
            help=(
                "Adversary mix, e.g. PoisonModel, "
                "PoisonModel:6,CorruptDistances:6 or none"
            ),
        )
        parser.add_argument("--out", help="Output directory (default: out)")
        parser.add_argument(
            "--verbose", action="store_true", help="Enable debug logging"
        )

    def setup_parser(self):
        """Set up command-line argument parser."""
        subparsers = self.parser.add_subparsers(
            dest="command", help="Available commands"
        )

        run_parser = subparsers.add_parser("run", help="Run an experiment")
        self._add_config_arguments(run_parser)
        run_parser.add_argument(
            "--record-timing",
            action="store_true",
            help="Fill the ms column of metrics.csv with measured wall time",
        )

        sweep_parser = subparsers.add_parser(
            "sweep-q", help="Run once per quantization level"
        )
        self._add_config_arguments(sweep_parser)
        sweep_parser.add_argument(
            "--q-values",
            default="32,256,1024",
            help="Comma-separated quantization levels (default: 32,256,1024)",
        )

        validate_parser = subparsers.add_parser(
            "validate", help="Validate a configuration"
        )
        self._add_config_arguments(validate_parser)

    def resolve_config(self, args):
        """
        Load the configuration file (or defaults) and apply flag overrides.

        Args:
            args: Parsed command-line arguments

        Returns:
            ExperimentConfig: Configuration with overrides applied
        """
        if args.config:
            cfg = ExperimentConfig.from_json(args.config)
        else:
            cfg = ExperimentConfig()
        cfg = cfg.with_overrides(
            N=args.n,
            A=args.a,
            D=args.d,
            T=args.t,
            m=args.m,
            q=args.q,
            p=args.p,
            rounds=args.rounds,
            seed=args.seed,
            scheme=args.scheme,
            out=args.out,
            record_timing=True if getattr(args, "record_timing", False) else None,
        )
        if args.adversary is not None:
            groups = parse_adversary(args.adversary, default_count=cfg.A)
            cfg = cfg.with_overrides(adversary=[group.model_dump() for group in groups])
        return cfg

    def command_validate(self, args):
        """
        Execute the validate command.

        Args:
            args: Parsed command-line arguments
        """
        cfg = self.resolve_config(args)
        problems = validate_config(cfg)
        if problems:
            print("❌ Invalid configuration:")
            for problem in problems:
                print(f"   - {problem}")
            return EXIT_INVALID_CONFIG
        print(
            f"✅ Configuration is valid "
            f"(N={cfg.N}, A={cfg.A}, D={cfg.D}, T={cfg.T}, m={cfg.m})"
        )
        return EXIT_OK

    def command_run(self, args):
        """
        Execute the run command.

        Args:
            args: Parsed command-line arguments
        """
        cfg = self.resolve_config(args)
        print(
            f"🚀 Running {cfg.rounds} rounds ({cfg.scheme}) "
            f"with N={cfg.N}, A={cfg.A}, m={cfg.m}..."
        )
        result = run_experiment(cfg)

        print("\n📊 Experiment Complete!")
        for scheme in result.models:
            print(
                f"   {scheme}: final loss {result.final_loss(scheme):.4f}, "
                f"accuracy {result.final_accuracy(scheme):.3f}"
            )
        if result.outcomes:
            aborted = f"{result.aborted_rounds}/{len(result.outcomes)}"
            print(f"   Aborted secure rounds: {aborted}")
        print(f"💾 Results saved to {cfg.out}")

        if result.all_aborted:
            print("❌ Error: every secure aggregation round aborted.")
            return EXIT_ALL_ABORTED
        print("✅ Experiment completed successfully!")
        return EXIT_OK

    def command_sweep_q(self, args):
        """
        Execute the sweep-q command.

        Args:
            args: Parsed command-line arguments
        """
        cfg = self.resolve_config(args)
        q_values = [int(q) for q in args.q_values.split(",") if q.strip()]
        if not q_values:
            print("❌ Error: no quantization levels given.")
            return EXIT_INVALID_CONFIG
        print(f"🔁 Sweeping q over {q_values}...")
        results = sweep_q(cfg, q_values)

        print("\n📊 Sweep Complete!")
        for q, result in results.items():
            for scheme in result.models:
                print(f"   q={q} {scheme}: final loss {result.final_loss(scheme):.4f}")
        print(f"💾 Results saved to {cfg.out}")

        if all(result.all_aborted for result in results.values()):
            print("❌ Error: every secure aggregation round aborted.")
            return EXIT_ALL_ABORTED
        print("✅ Sweep completed successfully!")
        return EXIT_OK

    def run(self, argv=None):
        """Parse arguments, run the command and return its exit code."""
        args = self.parser.parse_args(argv)

        if not args.command:
            self.parser.print_help()
            return EXIT_FAILURE

        setup_logging(getattr(args, "verbose", False))
        commands = {
            "run": self.command_run,
            "sweep-q": self.command_sweep_q,
            "validate": self.command_validate,
        }
        try:
            return commands[args.command](args)
        except ConfigError as e:
            print("❌ Invalid configuration:")
            for problem in e.violations:
                print(f"   - {problem}")
            return EXIT_INVALID_CONFIG
        except (ValidationError, FileNotFoundError) as e:
            print(f"❌ Error: {e}")
            return EXIT_INVALID_CONFIG
        except KeyboardInterrupt:
            print("\n⏹️  Operation cancelled by user.")
            return EXIT_FAILURE
        except BreaError as e:
            print(f"❌ Error: {e}")
            return EXIT_FAILURE
        except Exception as e:
            print(f"❌ Unexpected error: {e}")
            return EXIT_FAILURE


def main():
    """Main entry point for the CLI."""
    cli = BreaCLI()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
