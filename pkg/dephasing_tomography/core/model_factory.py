"""
Registry of noise model families.

Families are discovered from the noise_models package, so adding a module
with an AbstractNoiseModel subclass is enough to make it available to the
CLI and to model deserialization.
"""
from typing import Any, Dict, List, Mapping, Optional, Type
import importlib
import os
import pkgutil

from dephasing_tomography.utils.exceptions import ValidationError
from dephasing_tomography.utils.logger import logger


class ModelFactory:
    """
    Main entry point for creating noise models by family name.
    """

    def __init__(self):
        # Registry keyed by KIND, plus a lowercase alias index
        self.model_types: Dict[str, Type] = {}
        self._aliases: Dict[str, str] = {}
        self._discover_model_types()

    def _discover_model_types(self) -> None:
        """
        Automatically discover and register model families from the noise_models package.
        """
        from dephasing_tomography import noise_models
        from dephasing_tomography.noise_models.base import AbstractNoiseModel

        package_path = os.path.dirname(noise_models.__file__)

        for _, module_name, is_pkg in pkgutil.iter_modules([package_path]):
            if module_name.startswith('_') or module_name == 'base' or is_pkg:
                continue

            module = importlib.import_module(f"dephasing_tomography.noise_models.{module_name}")

            for attr_name in dir(module):
                attr = getattr(module, attr_name)
                if (isinstance(attr, type) and
                        issubclass(attr, AbstractNoiseModel) and
                        attr is not AbstractNoiseModel):
                    self.register_model_type(attr)

    def register_model_type(self, cls: Type) -> None:
        """
        Register a model family under its KIND and aliases.

        Args:
            cls: AbstractNoiseModel subclass
        """
        self.model_types[cls.KIND] = cls
        for alias in (cls.KIND.lower(),) + tuple(cls.ALIASES):
            self._aliases[alias.lower()] = cls.KIND

    def get_model_types(self) -> List[str]:
        """
        Get the registered family names.

        Returns:
            Sorted list of KIND values
        """
        return sorted(self.model_types)

    def model_class(self, kind: str) -> Type:
        """
        Resolve a family name or alias to its class.

        Args:
            kind: Family name, case-insensitive, or alias

        Returns:
            Model class

        Raises:
            ValidationError: If the family is unknown
        """
        name = self._aliases.get(str(kind).lower())
        if name is None:
            raise ValidationError(f"Unknown noise model kind: {kind}",
                                  [{"kind": f"must be one of {self.get_model_types()}"}])
        return self.model_types[name]

    def create(self, kind: str, params: Optional[Mapping[str, Any]] = None):
        """
        Create a model of the given family.

        Args:
            kind: Family name or alias
            params: Parameter values keyed by name

        Returns:
            Model instance

        Raises:
            ValidationError: On unknown families, unknown or missing parameters, or invalid values
        """
        cls = self.model_class(kind)
        params = dict(params or {})
        errors = [{key: "Unknown parameter"} for key in sorted(params) if key not in cls.PARAM_NAMES]
        errors += [{name: "Missing required parameter"} for name in cls.PARAM_NAMES if name not in params]
        if errors:
            raise ValidationError(f"Invalid {cls.KIND} parameters", errors)
        model = cls(**{name: params[name] for name in cls.PARAM_NAMES})
        logger.debug(f"Created {cls.KIND} model {model.values}", "noise")
        return model

    def from_dict(self, data: Mapping[str, Any]):
        """
        Rebuild a model from its JSON representation.

        Args:
            data: Dictionary with a 'kind' tag and one field per parameter

        Returns:
            Model instance
        """
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ValidationError("Model description needs a 'kind' field", [{"model.kind": "Missing required key"}])
        params = {key: value for key, value in data.items() if key != "kind"}
        return self.create(data["kind"], params)


# Module-level registry
model_factory = ModelFactory()


def model_class(kind: str) -> Type:
    """Resolve a family name or alias to its class."""
    return model_factory.model_class(kind)


def create_model(kind: str, params: Optional[Mapping[str, Any]] = None):
    """Create a model of the given family from named parameters."""
    return model_factory.create(kind, params)


def model_from_dict(data: Mapping[str, Any]):
    """Rebuild a model from its {'kind': ..., params} representation."""
    return model_factory.from_dict(data)


def kinds() -> List[str]:
    """Registered family names."""
    return model_factory.get_model_types()
