"""
Command-line entry point for the qubit-pair cavity simulator.

Run a figure preset or an ad-hoc scenario, print a summary, and write the
time series as CSV and (optionally) an SVG plot.

Examples:
    python main.py --preset fig1a --out fig1a.csv --plot bloch
    python main.py --nbar 10 --R 0.5 --tmax 30 --steps 600
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from errors import SimulationError, EXIT_OK
from scenarios import (
    ScenarioConfig, TimeSeriesRecord, preset_series, list_presets,
    load_config_file, run_scenario, PROPAGATORS
)
from display import Display, emit_csv, emit_plot, PLOT_KINDS

logger = logging.getLogger(__name__)


EXIT_IO_ERROR = 1
EXIT_INTERRUPTED = 130

DEFAULT_PLOT_NAME = 'simulation.svg'

# Command-line option -> ScenarioConfig field
OPTION_FIELDS = {
    'a_mag': 'a_mag',
    'a_phase': 'a_phase',
    'b_mag': 'b_mag',
    'b_phase': 'b_phase',
    'nbar': 'nbar',
    'R': 'R',
    'tmax': 't_max',
    'steps': 'steps',
    'cutoff': 'cutoff',
    'propagator': 'propagator',
    'normalize_doe': 'normalize_doe',
    'alpha_phase': 'alpha_phase',
    'omega': 'omega',
    'E1': 'E1',
    'E2': 'E2',
}


class ScenarioRunner:
    """
    Runs one or more scenario series and writes their output.

    Handles the order of work: show the parameters, simulate, summarize,
    then write CSV files and the plot.
    """

    def __init__(self, display: Optional[Display] = None):
        """
        Initialize the runner.

        Args:
            display: Display instance for console output (creates default if None)
        """
        self.display = display or Display()

    def run(self, configs: List[ScenarioConfig]) -> Dict[str, List[TimeSeriesRecord]]:
        """
        Simulate every series.

        Args:
            configs: Series to run, in order

        Returns:
            Mapping from series label to records
        """
        results: Dict[str, List[TimeSeriesRecord]] = {}
        for index, cfg in enumerate(configs):
            self.display.display_config(cfg)
            records = run_scenario(cfg)
            if cfg.snapshot_times is not None:
                self.display.display_snapshots(records)
            else:
                self.display.display_summary(records)
            self.display.display_oracle_status(cfg.propagator == 'both')
            results[cfg.label or f"series{index + 1}"] = records
        return results

    def write_csv(self, results: Dict[str, List[TimeSeriesRecord]],
                  out: Optional[str]) -> None:
        """
        Write each series as CSV.

        With one series the file is written to out; with several, each goes
        to '<stem>_<label><suffix>'. Without out, CSV goes to standard output.
        """
        if out is None:
            for records in results.values():
                emit_csv(records, sys.stdout.buffer)
            sys.stdout.flush()
            return

        if len(results) == 1:
            emit_csv(next(iter(results.values())), out)
            return

        stem, suffix = os.path.splitext(out)
        for label, records in results.items():
            emit_csv(records, f"{stem}_{label}{suffix or '.csv'}")

    def write_plot(self, results: Dict[str, List[TimeSeriesRecord]], which: str,
                   out: Optional[str], title: str = "") -> str:
        """
        Write the SVG plot next to the CSV output.

        Returns:
            Path of the written plot
        """
        path = os.path.splitext(out)[0] + '.svg' if out else DEFAULT_PLOT_NAME
        series = results if len(results) > 1 else next(iter(results.values()))
        emit_plot(series, path, which, title=title or None)
        return path


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog='simulate',
        description="Simulate two charge qubits coupled to one cavity mode",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Exit codes: 0 success, 2 configuration error, "
               "3 propagator mismatch, 4 cutoff too small"
    )

    source = parser.add_argument_group('scenario')
    source.add_argument('--preset', help='Figure preset name (see --list-presets)')
    source.add_argument('--list-presets', action='store_true',
                        help='List the figure presets and exit')
    source.add_argument('--config', metavar='PATH',
                        help='JSON file with ScenarioConfig fields (flags override it)')

    model = parser.add_argument_group('model')
    model.add_argument('--a-mag', type=float, help='Magnitude of the |ee> amplitude')
    model.add_argument('--a-phase', type=float, help='Phase of the |ee> amplitude')
    model.add_argument('--b-mag', type=float, help='Magnitude of the |gg> amplitude')
    model.add_argument('--b-phase', type=float, help='Phase of the |gg> amplitude')
    model.add_argument('--nbar', type=float, help='Mean photon number of the field')
    model.add_argument('--alpha-phase', type=float, help='Phase of the coherent amplitude')
    model.add_argument('--R', type=float, help='Coupling ratio lambda_2 / lambda_1')
    model.add_argument('--omega', type=float, help='Cavity frequency (units of lambda_1)')
    model.add_argument('--E1', type=float, help='Charging energy of the first qubit')
    model.add_argument('--E2', type=float, help='Charging energy of the second qubit')

    grid = parser.add_argument_group('evaluation')
    grid.add_argument('--tmax', type=float, help='Last scaled time (default 60)')
    grid.add_argument('--steps', type=int, help='Number of time points (default 2400)')
    grid.add_argument('--cutoff', type=int, help='Fock cutoff, 0 for automatic')
    grid.add_argument('--propagator', choices=PROPAGATORS,
                      help='blockwise, full, or both (cross-checked)')
    grid.add_argument('--normalize-doe', action='store_true', default=None,
                      help='Divide the degree of entanglement by 3')

    output = parser.add_argument_group('output')
    output.add_argument('--out', metavar='PATH', help='CSV output path (default: stdout)')
    output.add_argument('--plot', choices=PLOT_KINDS, help='Also write an SVG plot')
    output.add_argument('--no-color', action='store_true', help='Disable colored output')
    output.add_argument('--verbose', action='store_true', help='Log debugging details')

    return parser.parse_args(argv)


def build_configs(args: argparse.Namespace) -> List[ScenarioConfig]:
    """
    Combine preset, config file and flags into the series to run.

    Later sources win: preset < config file < command-line flags.

    Raises:
        UnknownPresetError: If the preset does not exist
        ConfigError: If the combined configuration is invalid
    """
    overrides = load_config_file(args.config) if args.config else {}
    for option, field_name in OPTION_FIELDS.items():
        value = getattr(args, option)
        if value is not None:
            overrides[field_name] = value

    if args.preset:
        bases = [cfg.to_dict() for cfg in preset_series(args.preset)]
    else:
        bases = [{}]

    return [ScenarioConfig.from_dict({**base, **overrides}) for base in bases]


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Process exit code
    """
    args = parse_arguments(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')

    # Keep standard output clean for CSV when no output file is given
    stream = sys.stdout if args.out or args.list_presets else sys.stderr
    display = Display(use_color=not args.no_color, stream=stream)

    try:
        if args.list_presets:
            display.display_presets(list_presets())
            return EXIT_OK

        configs = build_configs(args)
        display.display_header(f"Simulation: {args.preset or 'custom scenario'}")

        runner = ScenarioRunner(display)
        results = runner.run(configs)
        runner.write_csv(results, args.out)
        if args.plot:
            path = runner.write_plot(results, args.plot, args.out, configs[0].description)
            logger.info("plot written to %s", path)

    except SimulationError as exc:
        display.display_error(str(exc))
        return exc.exit_code
    except OSError as exc:
        display.display_error(f"cannot write output: {exc}")
        return EXIT_IO_ERROR
    except KeyboardInterrupt:
        display.display_error("interrupted")
        return EXIT_INTERRUPTED

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
