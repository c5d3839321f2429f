"""
JSON schema validation for solve and stats reports.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from jsonschema import Draft7Validator, ValidationError

from utils.custom_exceptions import ReportValidationError
from utils.logger import logger


class JsonValidator:
    """
    Draft 7 validator with a schema cache.

    Singleton: the schema cache is shared by every caller in the process.
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(JsonValidator, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self.schema_cache: Dict[str, Dict[str, Any]] = {}
        self.schema_directory = Path(__file__).resolve().parent.parent / "data" / "schemas"
        logger.debug("JSON validator initialized")
        self._initialized = True

    def validate_with_draft7(self,
                             data: Union[Dict, List],
                             schema: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate data and collect every error.

        Returns:
            {'valid': bool, 'errors': [formatted error, ...]}
        """
        validator = Draft7Validator(schema)
        errors = [self._format_validation_error(error)
                  for error in sorted(validator.iter_errors(data), key=lambda e: list(e.path))]
        return {'valid': not errors, 'errors': errors}

    def _format_validation_error(self, error: ValidationError) -> Dict[str, Any]:
        path = '.'.join(str(p) for p in error.path) if error.path else 'root'
        return {
            'path': path,
            'message': error.message,
            'schema_path': '.'.join(str(p) for p in error.schema_path),
            'instance': error.instance
        }

    def load_schema(self, schema_name: str) -> Dict[str, Any]:
        """Load ``data/schemas/<schema_name>.json``."""
        if schema_name in self.schema_cache:
            return self.schema_cache[schema_name]

        schema_path = self.schema_directory / f"{schema_name}.json"
        if not schema_path.exists():
            raise FileNotFoundError(f"Schema not found: {schema_path}")

        with open(schema_path, 'r', encoding='utf-8') as f:
            schema = json.load(f)

        self.schema_cache[schema_name] = schema
        logger.debug(f"Loaded schema: {schema_name}")
        return schema

    def require_valid(self, data: Dict[str, Any], schema_name: str) -> None:
        """Raise ReportValidationError unless data matches the named schema."""
        result = self.validate_with_draft7(data, self.load_schema(schema_name))
        if not result['valid']:
            raise ReportValidationError(f"Report does not match schema '{schema_name}'",
                                        schema=schema_name, errors=result['errors'])
