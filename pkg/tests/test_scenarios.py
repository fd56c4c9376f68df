"""
Unit tests for the scenarios module.

Tests configuration handling, the figure presets and the simulation
pipeline on short time grids.
"""

import unittest
import sys
import os
import json
import math
import tempfile
from unittest import mock

import numpy as np
from scipy.stats import poisson

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import scenarios
from errors import (
    ConfigError, CutoffTooSmallError, NotResonantError, OracleMismatchError,
    UnknownPresetError
)
from dynamics import TAIL_TOLERANCE
from scenarios import (
    ScenarioConfig, preset, preset_series, list_presets, load_config_file,
    run_scenario, run_preset, PRESET_NAMES, SNAPSHOT_TIMES
)


class TestScenarioConfig(unittest.TestCase):
    """Test validation and conversion of scenario configurations."""

    def test_defaults(self):
        """Default run: excited start, nbar 20, R 0.9, 2400 points up to 60."""
        cfg = ScenarioConfig()
        self.assertEqual(cfg.a, 1.0)
        self.assertEqual(cfg.b, 0.0)
        self.assertEqual(cfg.resolved_cutoff(), 67)
        times = cfg.times()
        self.assertEqual(len(times), 2400)
        self.assertEqual(times[0], 0.0)
        self.assertEqual(times[-1], 60.0)

    def test_amplitude_renormalization(self):
        """Unnormalized magnitudes are rescaled with a warning."""
        with self.assertLogs('scenarios', level='WARNING'):
            cfg = ScenarioConfig(a_mag=3.0, b_mag=4.0)
        self.assertAlmostEqual(abs(cfg.a), 0.6, places=12)
        self.assertAlmostEqual(abs(cfg.b), 0.8, places=12)

    def test_phases(self):
        """Phases enter a, b and alpha."""
        cfg = ScenarioConfig(a_mag=0.6, b_mag=0.8, b_phase=math.pi / 2,
                             nbar=4, alpha_phase=math.pi)
        self.assertAlmostEqual(cfg.b, 0.8j, places=12)
        self.assertAlmostEqual(cfg.alpha, -2.0, places=12)

    def test_invalid_values(self):
        """Bad values raise ConfigError."""
        for bad in ({'propagator': 'magic'}, {'steps': 1}, {'t_max': 0},
                    {'nbar': -1}, {'R': -0.5}, {'cutoff': -3},
                    {'a_mag': 0.0, 'b_mag': 0.0}, {'snapshot_times': []}):
            with self.subTest(bad=bad):
                with self.assertRaises(ConfigError):
                    ScenarioConfig(**bad)

    def test_detuned_needs_full(self):
        """Detuned energies only work with the full propagator."""
        with self.assertRaises(NotResonantError):
            ScenarioConfig(E1=0.7)
        cfg = ScenarioConfig(E1=0.7, propagator='full')
        self.assertFalse(cfg.model_params().resonant)

    def test_dict_round_trip(self):
        """to_dict output is accepted by from_dict."""
        cfg = preset('fig2')
        again = ScenarioConfig.from_dict(cfg.to_dict())
        self.assertEqual(again, cfg)
        json.dumps(cfg.to_dict())

    def test_unknown_keys(self):
        """from_dict names the unknown keys."""
        with self.assertRaises(ConfigError) as context:
            ScenarioConfig.from_dict({'nbar': 5, 'photons': 3})
        self.assertIn('photons', str(context.exception))

    def test_with_overrides(self):
        """Overrides return a validated copy."""
        cfg = preset('fig1a')
        short = cfg.with_overrides(t_max=5.0, steps=6)
        self.assertEqual(cfg.steps, 2400)
        np.testing.assert_allclose(short.times(), [0, 1, 2, 3, 4, 5])
        with self.assertRaises(ConfigError):
            cfg.with_overrides(steps=0)


class TestConfigFile(unittest.TestCase):
    """Test reading JSON scenario files."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, name, text):
        path = os.path.join(self.directory.name, name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def test_valid_file(self):
        """A JSON object is returned as a dictionary."""
        path = self._write('run.json', '{"nbar": 5, "R": 0.5}')
        self.assertEqual(load_config_file(path), {'nbar': 5, 'R': 0.5})

    def test_bad_files(self):
        """Missing files, bad JSON and non-objects raise ConfigError."""
        for path in (os.path.join(self.directory.name, 'missing.json'),
                     self._write('broken.json', '{"nbar": '),
                     self._write('list.json', '[1, 2]')):
            with self.subTest(path=path):
                with self.assertRaises(ConfigError):
                    load_config_file(path)


class TestPresets(unittest.TestCase):
    """Test the figure presets."""

    def test_all_presets_exist(self):
        """Every preset name resolves and is listed."""
        listed = [name for name, _ in list_presets()]
        self.assertEqual(listed, list(PRESET_NAMES))
        self.assertEqual(len(PRESET_NAMES), 15)
        for name in PRESET_NAMES:
            for cfg in preset_series(name):
                self.assertEqual(cfg.propagator, 'both')
                self.assertTrue(cfg.description)

    def test_values(self):
        """Coupling ratios, photon numbers and amplitudes."""
        self.assertEqual(preset('fig1a').R, 0.003)
        self.assertEqual(preset('fig1b').R, 0.9)
        self.assertEqual(preset('fig6a').nbar, 10)
        self.assertEqual(preset('fig3c').nbar, 10)
        partial = preset('fig3a')
        self.assertAlmostEqual(partial.a, 1 / math.sqrt(2), places=12)
        self.assertAlmostEqual(partial.b, 1 / math.sqrt(2), places=12)

    def test_snapshot_preset(self):
        """The snapshot preset evaluates fixed times."""
        cfg = preset('fig2')
        self.assertEqual(cfg.snapshot_times, SNAPSHOT_TIMES)
        np.testing.assert_allclose(cfg.times(), SNAPSHOT_TIMES)

    def test_capacity_presets(self):
        """The capacity figures have a partial and an excited series."""
        for name, nbar in (('fig7a', 10), ('fig7b', 20)):
            series = preset_series(name)
            self.assertEqual([cfg.label for cfg in series], ['partial', 'excited'])
            self.assertTrue(all(cfg.nbar == nbar and cfg.R == 0.9 for cfg in series))
        # The n-bar of the second capacity figure is quoted two ways
        self.assertIn('caption nbar=20, body text says 10', preset('fig7b').description)
        self.assertNotIn('caption', preset('fig7a').description)

    def test_presets_are_independent(self):
        """Changing a returned preset does not change the next one."""
        preset('fig1a').R = 0.5
        self.assertEqual(preset('fig1a').R, 0.003)

    def test_unknown(self):
        """Unknown names raise UnknownPresetError."""
        with self.assertRaises(UnknownPresetError):
            preset('fig9')


class TestRunScenario(unittest.TestCase):
    """Test the simulation pipeline."""

    def test_initial_record(self):
        """At t = 0 the excited start has s = t = (0, 0, 1), DoE 0, capacity 1."""
        records = run_scenario(preset('fig1a').with_overrides(t_max=2.0, steps=3))
        first = records[0]
        self.assertEqual(first.t, 0.0)
        np.testing.assert_allclose(first.s, [0, 0, 1], atol=1e-12)
        np.testing.assert_allclose(first.t_vec, [0, 0, 1], atol=1e-12)
        self.assertAlmostEqual(first.doe, 0.0, places=12)
        self.assertAlmostEqual(first.capacity, 1.0, places=10)
        self.assertAlmostEqual(first.purity, 1.0, places=12)
        self.assertEqual([r.t for r in records], [0.0, 1.0, 2.0])

    def test_propagators_agree(self):
        """blockwise, full and both give the same records."""
        base = ScenarioConfig(a_mag=0.6, b_mag=0.8, nbar=3, R=0.5, t_max=8.0, steps=17)
        results = {name: run_scenario(base.with_overrides(propagator=name))
                   for name in ('blockwise', 'full', 'both')}
        for name in ('full', 'both'):
            for ours, theirs in zip(results['blockwise'], results[name]):
                np.testing.assert_allclose(ours.s, theirs.s, atol=1e-9)
                self.assertAlmostEqual(ours.doe, theirs.doe, places=8)
                self.assertAlmostEqual(ours.capacity, theirs.capacity, places=8)

    def test_normalized_doe(self):
        """normalize_doe divides by 3."""
        base = ScenarioConfig(a_mag=0.6, b_mag=0.8, nbar=2, R=0.9, t_max=4.0, steps=5)
        raw = run_scenario(base)
        scaled = run_scenario(base.with_overrides(normalize_doe=True))
        for first, second in zip(raw, scaled):
            self.assertAlmostEqual(first.doe / 3, second.doe, places=12)

    def test_detuned_full(self):
        """A detuned run with the full propagator keeps physical states."""
        cfg = ScenarioConfig(nbar=2, R=0.5, E1=0.6, E2=0.4, propagator='full',
                             t_max=10.0, steps=21)
        for record in run_scenario(cfg):
            self.assertLessEqual(record.s_len, 1 + 1e-9)
            self.assertLessEqual(record.purity, 1 + 1e-9)

    def test_oracle_mismatch_reported(self):
        """A disagreement between propagators raises OracleMismatchError."""
        cfg = ScenarioConfig(nbar=2, R=0.5, t_max=2.0, steps=3, propagator='both')
        real_full = scenarios.full_propagator

        class Shifted:
            def __init__(self, propagator):
                self.propagator = propagator

            def evolve_grid(self, psi0, times):
                # Swap the |ee> and |gg> parts of every state
                states = self.propagator.evolve_grid(psi0, times)
                by_pair = states.reshape(len(states), 4, psi0.cutoff + 1)
                return by_pair[:, ::-1, :].reshape(states.shape)

        with mock.patch.object(scenarios, 'full_propagator',
                               lambda params, cutoff: Shifted(real_full(params, cutoff))):
            with self.assertRaises(OracleMismatchError) as context:
                run_scenario(cfg)
        self.assertEqual(context.exception.exit_code, 3)
        self.assertEqual(context.exception.t, 0.0)

    def test_small_nbar_auto_cutoff(self):
        """Weak fields run with the automatic cutoff and keep a tiny tail."""
        for nbar in (0.1, 0.5, 1, 2, 3, 5):
            with self.subTest(nbar=nbar):
                cfg = ScenarioConfig(nbar=nbar, t_max=20, steps=201)
                cutoff = cfg.resolved_cutoff()
                self.assertLess(poisson.sf(cutoff, nbar), TAIL_TOLERANCE)
                records = run_scenario(cfg)
                self.assertEqual(len(records), 201)
                self.assertAlmostEqual(records[-1].t, 20.0, places=12)
                for record in records:
                    self.assertLessEqual(record.s_len, 1 + 1e-9)

    def test_explicit_cutoff_not_raised(self):
        """An explicit cutoff is used as given and rejected when too small."""
        cfg = ScenarioConfig(nbar=2, t_max=20, steps=201, cutoff=19)
        self.assertEqual(cfg.resolved_cutoff(), 19)
        with self.assertRaises(CutoffTooSmallError):
            run_scenario(cfg)

    def test_doe_matches_cross_dyadic(self):
        """Each record's DoE equals the squared norm of C - s t^T."""
        cfg = ScenarioConfig(a_mag=0.6, b_mag=0.8, nbar=3, R=0.7, t_max=15.0, steps=31)
        for record in run_scenario(cfg):
            self.assertEqual(record.cross_dyadic.shape, (3, 3))
            entangled = record.cross_dyadic - np.outer(record.s, record.t_vec)
            self.assertAlmostEqual(float(np.sum(entangled ** 2)), record.doe, delta=1e-12)

    def test_snapshot_run(self):
        """The snapshot preset yields one record per quoted time."""
        records = run_preset('fig2')['excited']
        self.assertEqual(len(records), 8)
        np.testing.assert_allclose([r.t for r in records], SNAPSHOT_TIMES, atol=0)
        for record in records:
            self.assertEqual(record.s.shape, (3,))
            self.assertTrue(np.all(np.isfinite(record.s)))

    def test_run_preset(self):
        """run_preset returns one series per preset series."""
        results = run_preset('fig7a', t_max=1.0, steps=2)
        self.assertEqual(list(results), ['partial', 'excited'])
        self.assertAlmostEqual(results['partial'][0].doe, 3.0, places=10)
        self.assertAlmostEqual(results['partial'][0].capacity, 2.0, places=10)


if __name__ == '__main__':
    unittest.main()
