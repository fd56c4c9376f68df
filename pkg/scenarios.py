"""
Scenario configuration, figure presets and the simulation pipeline.

A ScenarioConfig holds everything needed for one run: the initial qubit
amplitudes, the coherent field, the coupling ratio, the time grid and which
propagator to use. run_scenario turns a config into a list of
TimeSeriesRecord rows, one per time point.
"""

import cmath
import json
import logging
import math
from dataclasses import dataclass, field, fields, replace, asdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import ConfigError, NotResonantError, OracleMismatchError, UnknownPresetError
from dynamics import (
    ModelParams, initial_joint_state, auto_cutoff, check_cutoff,
    block_propagator, full_propagator
)
from observables import evaluate_series, ObservableSeries, BELL_DOE
from quantum_core import pair_density_from_amplitudes

logger = logging.getLogger(__name__)


PROPAGATORS = ('blockwise', 'full', 'both')

# Default time grid
DEFAULT_T_MAX = 60.0
DEFAULT_STEPS = 2400

AMPLITUDE_TOLERANCE = 1e-9

# Oracle agreement thresholds
SCALAR_TOLERANCE = 1e-7
STATE_TOLERANCE = 1e-8

# Initial qubit-pair amplitudes (magnitudes of a and b)
EXCITED = (1.0, 0.0)
PARTIAL = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))

# Snapshot times of the Bloch-sphere figure
SNAPSHOT_TIMES = (10.2, 10.5, 10.6, 10.7, 10.8, 11.0, 11.5, 11.6)


@dataclass
class ScenarioConfig:
    """
    All parameters of one simulation run.

    Attributes:
        a_mag, a_phase: Polar form of the |ee> amplitude a
        b_mag, b_phase: Polar form of the |gg> amplitude b
        nbar: Mean photon number of the coherent field (alpha = sqrt(nbar))
        R: Coupling ratio lambda_2 / lambda_1
        t_max: Last scaled time of the grid
        steps: Number of grid points in [0, t_max]
        cutoff: Fock cutoff, 0 for the default rule
        propagator: 'blockwise', 'full' or 'both' (both checks one against the other)
        normalize_doe: Divide the degree of entanglement by its Bell value 3
        alpha_phase: Phase of the coherent amplitude
        omega, E1, E2: Field frequency and charging energies (resonant by default)
        label: Short series name (used in file names and plot legends)
        description: Human-readable description
        snapshot_times: If set, evaluate exactly these times instead of the grid
    """
    a_mag: float = 1.0
    a_phase: float = 0.0
    b_mag: float = 0.0
    b_phase: float = 0.0
    nbar: float = 20.0
    R: float = 0.9
    t_max: float = DEFAULT_T_MAX
    steps: int = DEFAULT_STEPS
    cutoff: int = 0
    propagator: str = 'blockwise'
    normalize_doe: bool = False
    alpha_phase: float = 0.0
    omega: float = 1.0
    E1: float = 0.5
    E2: float = 0.5
    label: str = ''
    description: str = ''
    snapshot_times: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        """Validate the configuration and normalize (a, b)."""
        if self.propagator not in PROPAGATORS:
            raise ConfigError(f"propagator must be one of {PROPAGATORS}, got {self.propagator!r}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError(f"steps must be an integer >= 2, got {self.steps}")
        if not self.t_max > 0:
            raise ConfigError(f"t_max must be > 0, got {self.t_max}")
        if not self.nbar >= 0:
            raise ConfigError(f"nbar must be >= 0, got {self.nbar}")
        if not self.R >= 0:
            raise ConfigError(f"R must be >= 0, got {self.R}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ConfigError(f"cutoff must be an integer >= 0, got {self.cutoff}")
        if self.a_mag < 0 or self.b_mag < 0:
            raise ConfigError("amplitude magnitudes must be >= 0")

        self.steps = int(self.steps)
        self.cutoff = int(self.cutoff)

        if self.snapshot_times is not None:
            self.snapshot_times = tuple(float(t) for t in self.snapshot_times)
            if not self.snapshot_times or min(self.snapshot_times) < 0:
                raise ConfigError("snapshot_times must be a non-empty list of times >= 0")

        self._normalize_amplitudes()

        if self.propagator != 'full' and not self.model_params().resonant:
            raise NotResonantError(
                f"E1={self.E1}, E2={self.E2}, omega={self.omega} is detuned; "
                "use propagator 'full'")

    def _normalize_amplitudes(self) -> None:
        """Scale (a_mag, b_mag) so that |a|^2 + |b|^2 = 1."""
        norm = self.a_mag ** 2 + self.b_mag ** 2
        if norm == 0:
            raise ConfigError("a and b cannot both be zero")
        if abs(norm - 1.0) > AMPLITUDE_TOLERANCE:
            logger.warning("renormalizing amplitudes: |a|^2 + |b|^2 = %.12g", norm)
        scale = 1.0 / math.sqrt(norm)
        self.a_mag *= scale
        self.b_mag *= scale

    @property
    def a(self) -> complex:
        """Amplitude of |ee>."""
        return cmath.rect(self.a_mag, self.a_phase)

    @property
    def b(self) -> complex:
        """Amplitude of |gg>."""
        return cmath.rect(self.b_mag, self.b_phase)

    @property
    def alpha(self) -> complex:
        """Coherent amplitude of the cavity field."""
        return cmath.rect(math.sqrt(self.nbar), self.alpha_phase)

    def model_params(self) -> ModelParams:
        """Hamiltonian parameters for this run."""
        return ModelParams.from_energies(self.R, self.omega, self.E1, self.E2)

    def resolved_cutoff(self) -> int:
        """The cutoff actually used (auto_cutoff when cutoff is 0)."""
        return self.cutoff or auto_cutoff(self.nbar)

    def times(self) -> np.ndarray:
        """Scaled times to evaluate, in increasing order."""
        if self.snapshot_times is not None:
            return np.array(self.snapshot_times)
        return np.linspace(0.0, self.t_max, self.steps)

    def with_overrides(self, **changes) -> 'ScenarioConfig':
        """Return a validated copy with some fields changed."""
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: Dict) -> 'ScenarioConfig':
        """
        Create a config from a dictionary whose keys are field names.

        Raises:
            ConfigError: If a key is not a ScenarioConfig field
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict:
        """Plain dictionary with every field (JSON friendly)."""
        data = asdict(self)
        if self.snapshot_times is not None:
            data['snapshot_times'] = list(self.snapshot_times)
        return data


def load_config_file(path: str) -> Dict:
    """
    Read a JSON scenario file.

    Args:
        path: Path to a JSON object with ScenarioConfig field names as keys

    Returns:
        The parsed dictionary (not yet validated)

    Raises:
        ConfigError: If the file cannot be read or is not a JSON object
    """
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data


@dataclass
class TimeSeriesRecord:
    """
    Everything reported for one time point.

    Attributes:
        t: Scaled time
        s: First-qubit Bloch vector
        t_vec: Second-qubit Bloch vector
        s_len, t_len: Their lengths
        doe: Degree of entanglement (divided by 3 when normalized)
        capacity: Dense-coding capacity in bits
        entropy_B: Entropy of the receiver's qubit in bits
        purity: tr(rho_c^2)
        cross_dyadic: Cross dyadic C (kept for checks, not written to CSV)
    """
    t: float
    s: np.ndarray
    t_vec: np.ndarray
    s_len: float
    t_len: float
    doe: float
    capacity: float
    entropy_B: float
    purity: float
    cross_dyadic: np.ndarray = field(repr=False, compare=False, default=None)


def _series_config(label: str, amplitudes: Tuple[float, float], nbar: float,
                   R: float, description: str, **extra) -> ScenarioConfig:
    """Build one preset series with the preset defaults."""
    a_mag, b_mag = amplitudes
    return ScenarioConfig(a_mag=a_mag, b_mag=b_mag, nbar=nbar, R=R,
                          propagator='both', label=label,
                          description=description, **extra)


def _two_couplings(figure: str, amplitudes: Tuple[float, float], state: str,
                   nbar: float, what: str) -> Dict[str, List[ScenarioConfig]]:
    """Presets '<figure>a' (R = 0.003) and '<figure>b' (R = 0.9)."""
    return {
        f"{figure}a": [_series_config(state, amplitudes, nbar, 0.003,
                                      f"{what}, {state} start, nbar={nbar:g}, R=0.003")],
        f"{figure}b": [_series_config(state, amplitudes, nbar, 0.9,
                                      f"{what}, {state} start, nbar={nbar:g}, R=0.9")],
    }


def _build_presets() -> Dict[str, List[ScenarioConfig]]:
    """All figure presets, in figure order."""
    presets: Dict[str, List[ScenarioConfig]] = {}
    presets.update(_two_couplings('fig1', EXCITED, 'excited', 20, "Bloch vectors"))
    presets['fig2'] = [_series_config(
        'excited', EXCITED, 20, 0.9,
        "Bloch-vector snapshots of the first qubit, excited start, nbar=20, R=0.9",
        snapshot_times=SNAPSHOT_TIMES)]

    partial_20 = _two_couplings('fig3', PARTIAL, 'partial', 20, "Bloch vectors")
    partial_10 = _two_couplings('fig3', PARTIAL, 'partial', 10, "Bloch vectors")
    presets['fig3a'] = partial_20['fig3a']
    presets['fig3b'] = partial_20['fig3b']
    presets['fig3c'] = partial_10['fig3a']
    presets['fig3d'] = partial_10['fig3b']

    presets.update(_two_couplings('fig4', EXCITED, 'excited', 20, "Degree of entanglement"))
    presets.update(_two_couplings('fig5', PARTIAL, 'partial', 20, "Degree of entanglement"))

    presets['fig6a'] = [_series_config(
        'excited', EXCITED, 10, 0.003,
        "Degree of entanglement, excited start, nbar=10, R=0.003")]
    presets['fig6b'] = [_series_config(
        'partial', PARTIAL, 10, 0.003,
        "Degree of entanglement, partial start, nbar=10, R=0.003")]

    for name, nbar, note in (('fig7a', 10, ''),
                             ('fig7b', 20, '; caption nbar=20, body text says 10')):
        description = f"Channel capacity, partial and excited starts, nbar={nbar}, R=0.9{note}"
        presets[name] = [
            _series_config('partial', PARTIAL, nbar, 0.9, description),
            _series_config('excited', EXCITED, nbar, 0.9, description),
        ]
    return presets


PRESET_NAMES = (
    'fig1a', 'fig1b', 'fig2', 'fig3a', 'fig3b', 'fig3c', 'fig3d', 'fig4a',
    'fig4b', 'fig5a', 'fig5b', 'fig6a', 'fig6b', 'fig7a', 'fig7b'
)


def preset_series(name: str) -> List[ScenarioConfig]:
    """
    All series of a figure preset (two for the capacity figures).

    Args:
        name: Preset name such as 'fig1a'

    Returns:
        List of configs; the first one is drawn solid, the second dotted

    Raises:
        UnknownPresetError: If there is no preset with this name
    """
    presets = _build_presets()
    if name not in presets:
        raise UnknownPresetError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return presets[name]


def preset(name: str) -> ScenarioConfig:
    """The primary (first) series of a figure preset."""
    return preset_series(name)[0]


def list_presets() -> List[Tuple[str, str]]:
    """Return (name, description) for every preset."""
    presets = _build_presets()
    return [(name, presets[name][0].description) for name in PRESET_NAMES]


def _check_oracle(times: np.ndarray, blockwise: np.ndarray, full: np.ndarray,
                  blockwise_series: ObservableSeries, full_series: ObservableSeries) -> None:
    """
    Compare the two propagators and raise on the first disagreement.

    Raises:
        OracleMismatchError: With the time, the field and the difference
    """
    state_delta = np.linalg.norm(blockwise - full, axis=(1, 2))
    comparisons = [('rho_c', state_delta, STATE_TOLERANCE)]

    for name in ('s', 't'):
        ours = getattr(blockwise_series, name)
        theirs = getattr(full_series, name)
        for axis, component in enumerate('xyz'):
            delta = np.abs(ours[:, axis] - theirs[:, axis])
            comparisons.append((f"{name}_{component}", delta, SCALAR_TOLERANCE))

    for name in ('s_length', 't_length', 'doe', 'capacity', 'entropy_B', 'purity'):
        delta = np.abs(getattr(blockwise_series, name) - getattr(full_series, name))
        comparisons.append((name, delta, SCALAR_TOLERANCE))

    for name, delta, tolerance in comparisons:
        bad = np.flatnonzero(delta >= tolerance)
        if bad.size:
            first = bad[0]
            raise OracleMismatchError(float(times[first]), name, float(delta[first]), tolerance)

    logger.debug("oracle agreement: max rho_c distance %.2e", float(np.max(state_delta)))


def run_scenario(cfg: ScenarioConfig) -> List[TimeSeriesRecord]:
    """
    Run the full pipeline: prepare, evolve, reduce and measure.

    With propagator 'both' the blockwise results are reported and the full
    propagator is used to verify them at every time point.

    Args:
        cfg: Scenario configuration

    Returns:
        One TimeSeriesRecord per time, ordered by t

    Raises:
        CutoffTooSmallError: If the cutoff cannot hold the field
        OracleMismatchError: If the two propagators disagree
    """
    params = cfg.model_params()
    cutoff = cfg.resolved_cutoff()
    times = cfg.times()
    logger.info("running %s: nbar=%g R=%g cutoff=%d points=%d propagator=%s",
                cfg.label or 'scenario', cfg.nbar, cfg.R, cutoff, len(times), cfg.propagator)

    psi0 = initial_joint_state(cfg.a, cfg.b, cfg.alpha, cutoff)
    check_cutoff(psi0)

    full_states = None
    if cfg.propagator in ('full', 'both'):
        full_states = full_propagator(params, cutoff).evolve_grid(psi0, times)
    if cfg.propagator in ('blockwise', 'both'):
        states = block_propagator(params, cutoff).evolve_grid(psi0, times)
    else:
        states = full_states
    check_cutoff(states, cutoff)

    pair_states = pair_density_from_amplitudes(states, cutoff)
    series = evaluate_series(pair_states)

    if cfg.propagator == 'both':
        full_pair_states = pair_density_from_amplitudes(full_states, cutoff)
        _check_oracle(times, pair_states, full_pair_states, series,
                      evaluate_series(full_pair_states))

    doe = series.doe / BELL_DOE if cfg.normalize_doe else series.doe
    s_length = series.s_length
    t_length = series.t_length

    return [
        TimeSeriesRecord(
            t=float(times[k]),
            s=series.s[k],
            t_vec=series.t[k],
            s_len=float(s_length[k]),
            t_len=float(t_length[k]),
            doe=float(doe[k]),
            capacity=float(series.capacity[k]),
            entropy_B=float(series.entropy_B[k]),
            purity=float(series.purity[k]),
            cross_dyadic=series.C[k],
        )
        for k in range(len(times))
    ]


def run_preset(name: str, **overrides) -> Dict[str, List[TimeSeriesRecord]]:
    """
    Run every series of a preset.

    Args:
        name: Preset name
        **overrides: ScenarioConfig fields to change in every series

    Returns:
        Mapping from series label to its records, in preset order
    """
    return {cfg.label: run_scenario(cfg.with_overrides(**overrides))
            for cfg in preset_series(name)}


if __name__ == "__main__":
    # Example usage: a short run of the first preset
    config = preset('fig1a').with_overrides(t_max=10.0, steps=11)
    print(f"{config.description}, cutoff {config.resolved_cutoff()}")
    for record in run_scenario(config):
        print(f"  t={record.t:5.1f}  |s|={record.s_len:.4f}  |t|={record.t_len:.4f}  "
              f"DoE={record.doe:.4f}  C={record.capacity:.4f}")
