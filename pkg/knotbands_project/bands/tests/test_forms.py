from django.test import SimpleTestCase, override_settings

from bands.choices import RunMode
from bands.forms import RunConfigForm, TwisterSpecForm
from bands.twister import TwisterSpec


class RunConfigFormTests(SimpleTestCase):
    def test_two_band_model(self):
        form = RunConfigForm({'model': '2band', 'm0': 0.5338, 'm1': 0.6, 'exact': True})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['twister'], TwisterSpec.two_band(0.5338, 0.6))
        self.assertEqual(form.cleaned_data['mode'], RunMode.EXACT)

    def test_four_band_model(self):
        form = RunConfigForm({'model': '4band', 'm0': -0.5, 'm1': -0.4})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['twister'].n_bands, 4)
        self.assertEqual(form.cleaned_data['mode'], RunMode.SAMPLED)

    def test_custom_model_from_flags(self):
        form = RunConfigForm({'model': 'custom', 'n_bands': 3, 'm0': 0.2, 'harmonics': '1.1,1'})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['twister'], TwisterSpec(3, 0.2j, (1.1, 1.0)))

    def test_spec_object_wins(self):
        spec = {'n_bands': 2, 'm0': [0.0, 1.273], 'harmonics': [[0.6, 0.0], [1.0, 0.0]]}
        form = RunConfigForm({'model': '4band', 'm0': 9.0, 'm1': 9.0, 'spec': spec})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['twister'], TwisterSpec.two_band(1.273, 0.6))

    def test_missing_parameter(self):
        form = RunConfigForm({'model': '2band', 'm0': 0.5})
        self.assertFalse(form.is_valid())

    def test_custom_needs_harmonics(self):
        self.assertFalse(RunConfigForm({'model': 'custom', 'n_bands': 3}).is_valid())

    def test_non_positive_time(self):
        self.assertFalse(RunConfigForm({'m0': 0.5, 'm1': 0.6, 't': 0}).is_valid())

    @override_settings(KNOTBANDS={'K_POINTS': 64, 'SHOTS': 100, 'SEED': 5})
    def test_defaults_from_settings(self):
        form = RunConfigForm({'m0': 0.5, 'm1': 0.6})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['k_points'], 64)
        self.assertEqual(form.cleaned_data['shots'], 100)
        self.assertEqual(form.cleaned_data['seed'], 5)


class TwisterSpecFormTests(SimpleTestCase):
    def test_string_coefficients(self):
        form = TwisterSpecForm({'n_bands': 3, 'm0': '0.5j', 'harmonics': ['1+0.5j', 1]})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['twister'].harmonics, (1 + 0.5j, 1 + 0j))

    def test_bad_pair(self):
        form = TwisterSpecForm({'n_bands': 2, 'm0': [1, 2, 3], 'harmonics': [1]})
        self.assertFalse(form.is_valid())

    def test_single_band_rejected(self):
        self.assertFalse(TwisterSpecForm({'n_bands': 1, 'm0': 0, 'harmonics': [1]}).is_valid())
