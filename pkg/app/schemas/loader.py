"""
YAML profile loader for simulation parameters
"""
import copy
import yaml
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from .models import ConfigError, SimulationProfile

logger = logging.getLogger(__name__)

# Setting one member of a pair drops the other so overrides never conflict
_POWER_PAIRS = {
    "pu_over_sigma2": "pu_db",
    "pu_db": "pu_over_sigma2",
    "pt_over_sigma2": "pt_db",
    "pt_db": "pt_over_sigma2",
}


def build_profile(raw: Dict[str, Any]) -> SimulationProfile:
    """
    Validate a raw parameter map into a SimulationProfile.

    Raises:
        ConfigError: If the map has unknown keys or invalid values
    """
    try:
        return SimulationProfile(**(raw or {}))
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'profile'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"Invalid simulation profile: {problems}") from e


def apply_overrides(raw: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """
    Merge ``section.key=value`` overrides into a raw parameter map.

    Values are parsed as YAML scalars/lists, so ``array.num_antennas=80`` gives
    an int and ``channel.pdp=[0.5,0.5]`` gives a list.

    Args:
        raw: Raw parameter map (not modified)
        overrides: Override strings

    Returns:
        New raw map with the overrides applied

    Raises:
        ConfigError: On malformed override strings or unknown sections/keys
    """
    merged = copy.deepcopy(raw or {})
    known_sections = SimulationProfile.model_fields

    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"Override must look like section.key=value: {item!r}")
        path, value_text = item.split("=", 1)
        parts = path.strip().split(".")
        if len(parts) == 1 and parts[0] in ("name", "description"):
            merged[parts[0]] = value_text
            continue
        if len(parts) != 2:
            raise ConfigError(f"Override key must be section.key: {path!r}")
        section, key = parts
        if section not in known_sections or section in ("name", "description"):
            raise ConfigError(f"Unknown config section: {section!r}")
        section_model = known_sections[section].annotation
        if key not in section_model.model_fields:
            raise ConfigError(f"Unknown config key: {section}.{key}")
        try:
            value = yaml.safe_load(value_text)
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse value for {path}: {e}") from e

        block = merged.setdefault(section, {}) or {}
        merged[section] = block
        if section == "power" and key in _POWER_PAIRS:
            block.pop(_POWER_PAIRS[key], None)
        block[key] = value
        logger.debug(f"Override {section}.{key} = {value!r}")

    return merged


class ParamsConfigLoader:
    """Loader for YAML simulation profiles"""

    def __init__(self, config_dir: Optional[Path] = None):
        """
        Initialize the profile loader.

        Args:
            config_dir: Directory containing YAML profiles.
                        Defaults to the directory containing this module.
        """
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent

    def load_raw(self, source: Union[str, Path]) -> Dict[str, Any]:
        """
        Read a profile as a raw parameter map.

        Args:
            source: Profile name (looked up in config_dir) or a path to a YAML file

        Raises:
            FileNotFoundError: If the profile doesn't exist
            ValueError: If the YAML is malformed
        """
        file_path = Path(source)
        if not (file_path.suffix in (".yaml", ".yml") and file_path.exists()):
            file_path = self.get_profile_path(str(source))
            if file_path is None:
                raise FileNotFoundError(
                    f"Simulation profile not found: {source} in {self.config_dir}"
                )

        logger.info(f"📖 Loading simulation profile from: {file_path}")

        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            logger.error(f"❌ YAML parsing error in {file_path}: {e}")
            raise ValueError(f"Invalid YAML in simulation profile: {e}")

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ValueError(f"Simulation profile must be a mapping: {file_path}")
        return data

    def load(
        self,
        source: Union[str, Path],
        overrides: Optional[Iterable[str]] = None
    ) -> SimulationProfile:
        """
        Load, override and validate a simulation profile.

        Args:
            source: Profile name or path
            overrides: Optional ``section.key=value`` strings

        Returns:
            SimulationProfile: Validated profile
        """
        raw = apply_overrides(self.load_raw(source), overrides or [])
        profile = build_profile(raw)
        logger.info(
            f"✅ Loaded profile '{profile.name}': N_ZC={profile.prach.n_zc}, "
            f"G={profile.prach.guard}, L={profile.prach.delay_spread}, "
            f"M={profile.array.num_antennas}"
        )
        return profile

    def list_profiles(self) -> List[str]:
        """List available profile names (without extension)"""
        profiles = []
        for ext in ['*.yaml', '*.yml']:
            profiles.extend([f.stem for f in self.config_dir.glob(ext)])
        return sorted(set(profiles))

    def profile_exists(self, name: str) -> bool:
        return self.get_profile_path(name) is not None

    def get_profile_path(self, name: str) -> Optional[Path]:
        """
        Get the full path to a profile file.

        Returns:
            Path to the profile, or None if not found
        """
        for ext in (".yaml", ".yml"):
            path = self.config_dir / f"{name}{ext}"
            if path.exists():
                return path
        return None

