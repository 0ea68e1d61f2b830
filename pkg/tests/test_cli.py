"""
Unit tests for BreaCLI class.
"""

from unittest.mock import MagicMock, patch

from cli import (
    EXIT_ALL_ABORTED,
    EXIT_FAILURE,
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    BreaCLI,
)
from errors import ConfigError, DecodeFailure


def _result(aborted=False):
    """A stand-in experiment result with one secure scheme."""
    result = MagicMock()
    result.models = {"brea": None}
    result.final_loss.return_value = 0.25
    result.final_accuracy.return_value = 0.9
    result.outcomes = [{"aborted": aborted}]
    result.aborted_rounds = int(aborted)
    result.all_aborted = aborted
    return result


class TestBreaCLI:
    """Test cases for BreaCLI class."""

    def test_init(self):
        """Test CLI initialization."""
        cli = BreaCLI()

        assert cli.parser is not None
        assert hasattr(cli, "parser")

    def test_resolve_config_overrides(self):
        """Test that flags override the defaults."""
        cli = BreaCLI()
        args = cli.parser.parse_args(
            ["run", "--n", "9", "--a", "1", "--m", "2", "--adversary", "PoisonModel"]
        )

        cfg = cli.resolve_config(args)

        assert (cfg.N, cfg.A, cfg.m) == (9, 1, 2)
        assert cfg.adversary[0].count == 1
        assert cfg.q == 1024
        assert cfg.record_timing is False

    def test_resolve_config_file(self, temp_directory):
        """Test loading a config file, timing flag and the empty adversary."""
        path = temp_directory / "exp.json"
        path.write_text('{"rounds": 4, "seed": 2}', encoding="utf-8")
        cli = BreaCLI()
        args = cli.parser.parse_args(
            ["run", "--config", str(path), "--adversary", "none", "--record-timing"]
        )

        cfg = cli.resolve_config(args)

        assert (cfg.rounds, cfg.seed) == (4, 2)
        assert cfg.adversary == []
        assert cfg.record_timing is True

    @patch("src.cli.run_experiment")
    def test_command_run_success(self, mock_run_experiment):
        """Test successful run command execution."""
        mock_run_experiment.return_value = _result()
        cli = BreaCLI()
        args = cli.parser.parse_args(["run", "--rounds", "2", "--out", "runs/a"])

        with patch("builtins.print"):
            result = cli.command_run(args)

            assert result == EXIT_OK
            cfg = mock_run_experiment.call_args.args[0]
            assert cfg.rounds == 2
            assert cfg.out == "runs/a"

    @patch("src.cli.run_experiment")
    def test_command_run_all_aborted(self, mock_run_experiment):
        """Test the exit code when no secure round completed."""
        mock_run_experiment.return_value = _result(aborted=True)
        cli = BreaCLI()
        args = cli.parser.parse_args(["run"])

        with patch("builtins.print"):
            assert cli.command_run(args) == EXIT_ALL_ABORTED

    @patch("src.cli.sweep_q")
    def test_command_sweep_q(self, mock_sweep_q):
        """Test that the sweep receives the parsed levels."""
        mock_sweep_q.return_value = {16: _result(), 64: _result(aborted=True)}
        cli = BreaCLI()
        args = cli.parser.parse_args(["sweep-q", "--q-values", "16, 64"])

        with patch("builtins.print"):
            result = cli.command_sweep_q(args)

            assert result == EXIT_OK
            assert mock_sweep_q.call_args.args[1] == [16, 64]

    @patch("src.cli.sweep_q")
    def test_command_sweep_q_no_levels(self, mock_sweep_q):
        """Test sweep-q with an empty level list."""
        cli = BreaCLI()
        args = cli.parser.parse_args(["sweep-q", "--q-values", ","])

        with patch("builtins.print"):
            assert cli.command_sweep_q(args) == EXIT_INVALID_CONFIG
            mock_sweep_q.assert_not_called()

    def test_validate_command(self):
        """Test validate on the default and on a too-small population."""
        cli = BreaCLI()

        with patch("builtins.print") as mock_print:
            assert cli.run(["validate"]) == EXIT_OK
            assert cli.run(["validate", "--n", "39"]) == EXIT_INVALID_CONFIG

            printed = " ".join(str(call.args[0]) for call in mock_print.call_args_list)
            assert "N >= 2A+1" in printed

    def test_run_run_command(self):
        """Test run method with run command."""
        cli = BreaCLI()

        with patch.object(cli, "command_run", return_value=EXIT_OK) as mock_run:
            with patch.object(cli.parser, "parse_args") as mock_parse_args:
                mock_args = MagicMock()
                mock_args.command = "run"
                mock_args.verbose = False
                mock_parse_args.return_value = mock_args

                result = cli.run()

                assert result == EXIT_OK
                mock_run.assert_called_once_with(mock_args)

    def test_run_no_command(self):
        """Test run method with no command."""
        cli = BreaCLI()

        with patch.object(cli.parser, "parse_args") as mock_parse_args:
            with patch.object(cli.parser, "print_help") as mock_print_help:
                mock_args = MagicMock()
                mock_args.command = None
                mock_parse_args.return_value = mock_args

                result = cli.run()

                assert result == EXIT_FAILURE
                mock_print_help.assert_called_once()

    def test_run_config_error(self):
        """Test that configuration errors map to exit code 2."""
        cli = BreaCLI()
        error = ConfigError(["resilience bound: need N >= 40, got N=39"])

        with patch.object(cli, "command_run", side_effect=error):
            with patch("builtins.print") as mock_print:
                assert cli.run(["run"]) == EXIT_INVALID_CONFIG
                mock_print.assert_any_call(
                    "   - resilience bound: need N >= 40, got N=39"
                )

    def test_run_missing_config_file(self, temp_directory):
        """Test a config path that does not exist."""
        cli = BreaCLI()
        missing = str(temp_directory / "missing.json")

        with patch("builtins.print"):
            assert cli.run(["run", "--config", missing]) == EXIT_INVALID_CONFIG

    def test_run_invalid_override(self):
        """Test a flag value pydantic rejects."""
        cli = BreaCLI()

        with patch("builtins.print"):
            assert cli.run(["validate", "--q", "0"]) == EXIT_INVALID_CONFIG

    def test_run_failures(self):
        """Test simulator errors, interrupts and unexpected errors."""
        cli = BreaCLI()

        errors = (DecodeFailure("too many errors"), KeyboardInterrupt(), RuntimeError())
        for error in errors:
            with patch.object(cli, "command_run", side_effect=error):
                with patch("builtins.print"):
                    assert cli.run(["run"]) == EXIT_FAILURE
