"""
Unit tests for json_validator.py module.

Covers Draft 7 validation, schema loading and the solve report schema.
"""

import unittest
import pytest
import os
import sys

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from utils.json_validator import JsonValidator
from utils.custom_exceptions import ReportValidationError


class TestJsonValidator(unittest.TestCase):
    """Test cases for JsonValidator class."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.json_validator = JsonValidator()
        self.report = {
            "n": 5,
            "m": 4,
            "algorithm": "brute",
            "md": 1,
            "witness": [0],
            "params": {"delta": 2, "ell": None, "s": None, "mw_width": None},
            "timings_ms": {"total": 1.5},
            "corpus_checks": {"degree_bound": True, "witness_verified": True},
        }
        self.point_schema = {
            "type": "object",
            "properties": {"x": {"type": "integer"}, "y": {"type": "integer"}},
            "required": ["x", "y"],
        }

    def test_singleton(self):
        """Test that every instance shares one schema cache."""
        self.assertIs(JsonValidator(), self.json_validator)

    def test_validate_with_draft7_valid(self):
        """Test validation of a conforming document."""
        result = self.json_validator.validate_with_draft7({"x": 1, "y": 2}, self.point_schema)
        self.assertTrue(result['valid'])
        self.assertEqual(result['errors'], [])

    def test_validate_with_draft7_collects_errors(self):
        """Test that every error is reported with its path."""
        result = self.json_validator.validate_with_draft7({"x": "one"}, self.point_schema)
        self.assertFalse(result['valid'])
        self.assertEqual(len(result['errors']), 2)
        paths = {error['path'] for error in result['errors']}
        self.assertEqual(paths, {"root", "x"})

    def test_load_schema_cached(self):
        """Test that a loaded schema is served from the cache."""
        schema = self.json_validator.load_schema("solve_report")
        self.assertIs(self.json_validator.load_schema("solve_report"), schema)
        self.assertIn("witness", schema["required"])

    def test_load_missing_schema(self):
        """Test that an unknown schema name raises FileNotFoundError."""
        with self.assertRaises(FileNotFoundError):
            self.json_validator.load_schema("no_such_schema")

    def test_solve_report_valid(self):
        """Test a well-formed solve report."""
        self.json_validator.require_valid(self.report, "solve_report")

    def test_solve_report_with_labels(self):
        """Test that labels are optional and may be null."""
        self.report["labels"] = ["a", "b", "c", "d", "e"]
        self.json_validator.require_valid(self.report, "solve_report")
        self.report["labels"] = None
        self.json_validator.require_valid(self.report, "solve_report")

    def test_solve_report_unknown_algorithm(self):
        """Test that the algorithm is restricted to the three solvers."""
        self.report["algorithm"] = "auto"
        with self.assertRaises(ReportValidationError) as ctx:
            self.json_validator.require_valid(self.report, "solve_report")
        self.assertEqual(ctx.exception.details['schema'], "solve_report")
        self.assertEqual(ctx.exception.exit_code, 1)

    def test_solve_report_extra_key(self):
        """Test that unknown top-level keys are rejected."""
        self.report["extra"] = 1
        with self.assertRaises(ReportValidationError):
            self.json_validator.require_valid(self.report, "solve_report")

    def test_solve_report_duplicate_witness(self):
        """Test that witness vertices must be distinct."""
        self.report["witness"] = [0, 0]
        with self.assertRaises(ReportValidationError):
            self.json_validator.require_valid(self.report, "solve_report")


@pytest.mark.parametrize("missing", ["n", "md", "witness", "params", "timings_ms", "corpus_checks"])
def test_solve_report_required_keys(missing):
    """Test that each required key is enforced."""
    report = {
        "n": 3, "m": 3, "algorithm": "mw", "md": 2, "witness": [0, 1],
        "params": {"delta": 2, "ell": None, "s": None, "mw_width": 0},
        "timings_ms": {"total": 0.2},
        "corpus_checks": {"degree_bound": True, "witness_verified": None},
    }
    del report[missing]
    with pytest.raises(ReportValidationError):
        JsonValidator().require_valid(report, "solve_report")


if __name__ == '__main__':
    unittest.main()
