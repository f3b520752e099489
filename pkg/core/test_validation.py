"""
Tests for startup validation of the CONTRACTION_MODELS settings
"""

from django.test import SimpleTestCase, override_settings

from config.validation import (
    ConfigurationValidationError,
    get_configuration_summary,
    validate_configuration,
)

from .conf import DEFAULTS, get_setting

VALID = dict(DEFAULTS)


class ValidateConfigurationTest(SimpleTestCase):
    """Test CONTRACTION_MODELS validation"""

    @override_settings(CONTRACTION_MODELS=VALID)
    def test_defaults_are_valid(self) -> None:
        """The shipped defaults pass validation"""
        validate_configuration()

    @override_settings(CONTRACTION_MODELS={"TOLERANCE": 1e-9})
    def test_missing_keys_only_warn(self) -> None:
        """Missing keys fall back to defaults"""
        validate_configuration()
        self.assertEqual(get_setting("GRID_ANGLES"), DEFAULTS["GRID_ANGLES"])

    @override_settings(CONTRACTION_MODELS={**VALID, "TOLERANCE": 0.5})
    def test_rejects_loose_tolerance(self) -> None:
        """A tolerance of 0.5 is refused"""
        with self.assertRaises(ConfigurationValidationError) as context:
            validate_configuration()
        self.assertIn("TOLERANCE", str(context.exception))

    @override_settings(CONTRACTION_MODELS={**VALID, "GRID_RADII": [0.3, 0.95]})
    def test_rejects_radius_above_rmax(self) -> None:
        """Grid radii must stay under RMAX"""
        with self.assertRaises(ConfigurationValidationError):
            validate_configuration()

    @override_settings(CONTRACTION_MODELS={**VALID, "GRID_ANGLES": True})
    def test_rejects_bool_for_int(self) -> None:
        """Booleans are not accepted for integer keys"""
        with self.assertRaises(ConfigurationValidationError) as context:
            validate_configuration()
        self.assertIn("unexpected type bool", str(context.exception))

    @override_settings(CONTRACTION_MODELS={**VALID, "OUTPUT_ZERO_MINUS": "keep"})
    def test_rejects_unknown_zero_minus_mode(self) -> None:
        """OUTPUT_ZERO_MINUS must be drop or limit"""
        with self.assertRaises(ConfigurationValidationError):
            validate_configuration()

    @override_settings(CONTRACTION_MODELS="strict")
    def test_rejects_non_dict(self) -> None:
        """CONTRACTION_MODELS must be a dict"""
        with self.assertRaises(ConfigurationValidationError):
            validate_configuration()

    @override_settings(CONTRACTION_MODELS={**VALID, "SEED": 11})
    def test_summary(self) -> None:
        """The summary reports the configured values"""
        summary = get_configuration_summary()
        self.assertEqual(summary["seed"], 11)
        self.assertEqual(summary["grid_radii"], DEFAULTS["GRID_RADII"])
        self.assertEqual(get_setting("SEED"), 11)

    def test_unknown_setting_key(self) -> None:
        """Unknown keys raise KeyError"""
        with self.assertRaises(KeyError):
            get_setting("NOT_A_KEY")
