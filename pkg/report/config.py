"""
Run configuration
-----------------
Two sources produce the same RunConfig:

  * config files: one `key = value` per line, `#` starts a comment
  * presets: Hydra group configs/variant/<name>.yaml composed with
    configs/config.yaml, plus optional `key=value` overrides

Each setting is merged onto the structured OmegaConf schema RunSettings,
which rejects unknown keys and coerces types. Unset keys take the module
defaults of core.bifurcation and core.dynamics.

Usage:
    from report.config import parse_config, load_preset

    cfg = parse_config("d1_4_d2_0.cfg")
    cfg = load_preset("csv_1_025", ["mu=36"])
"""

import logging
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from hydra import compose, initialize_config_dir
from hydra.errors import HydraException
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from core import bifurcation, dynamics
from core.errors import MayerWavesError, ModelDomainError
from core.types import CONSTANT_NAMES, CardioParams, ControlKind, ControlVariant

log = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class ConfigError(MayerWavesError, ValueError):
    """Invalid run configuration, with the offending line or key."""

    def __init__(self, message: str, source: str = "", line: Optional[int] = None,
                 key: Optional[str] = None):
        where = source
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(f"{where}: {message}" if where else message)
        self.source = source
        self.line = line
        self.key = key


# ============================================================
# SCHEMA
# ============================================================

@dataclass
class RunSettings:
    """Every key a config file may set. None means unset."""
    variant: Optional[str] = None
    f1: Optional[float] = None
    f2: Optional[float] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    d1: Optional[float] = None
    d2: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    mu: Optional[float] = None
    c_sa: Optional[float] = None
    c_pa: Optional[float] = None
    c_pv: Optional[float] = None
    c_sv: Optional[float] = None
    c_l: Optional[float] = None
    c_r: Optional[float] = None
    r_s: Optional[float] = None
    r_p: Optional[float] = None
    f: Optional[float] = None
    v_o: Optional[float] = None
    v_c: Optional[float] = None
    v_d: Optional[float] = None
    dt: Optional[float] = None
    t_end: Optional[float] = None
    transient_fraction: Optional[float] = None
    mu_min: Optional[float] = None
    mu_max: Optional[float] = None
    steps: Optional[int] = None
    mu_max_scan: Optional[float] = None
    tol: Optional[float] = None
    workers: Optional[int] = None
    stride: Optional[int] = None
    allow_unnormalized: bool = False


# config key -> CardioParams field
PARAM_KEYS: Dict[str, str] = {
    "c_sa": "c_sa",
    "c_pa": "c_pa",
    "c_pv": "c_pv",
    "c_sv": "c_sv_base",
    "c_l": "c_l",
    "c_r": "c_r",
    "r_s": "r_s_base",
    "r_p": "r_p",
    "f": "f_base",
    "v_o": "v_o",
    "v_c": "v_c",
    "v_d": "v_d_base",
}

VARIANT_NAMES: Dict[str, ControlKind] = {
    "linear": ControlKind.LINEAR,
    "heart_rate": ControlKind.HEART_RATE,
    "systemic_resistance": ControlKind.SYSTEMIC_RESISTANCE,
    "unstressed_volume": ControlKind.UNSTRESSED_VOLUME,
    "venous_compliance": ControlKind.VENOUS_COMPLIANCE,
    "hr": ControlKind.HEART_RATE,
    "rs": ControlKind.SYSTEMIC_RESISTANCE,
    "vd": ControlKind.UNSTRESSED_VOLUME,
    "csv": ControlKind.VENOUS_COMPLIANCE,
}


@dataclass(frozen=True)
class AnalysisSettings:
    """Grids, tolerances and integration settings with defaults resolved."""
    mu_min: float = 1.0
    mu_max: float = bifurcation.DEFAULT_MU_MAX
    steps: int = bifurcation.DEFAULT_SCAN_POINTS
    mu_max_scan: float = bifurcation.DEFAULT_MU_MAX
    tol: float = bifurcation.DEFAULT_TOL
    dt: float = dynamics.DEFAULT_DT
    t_end: float = dynamics.DEFAULT_T_END
    transient_fraction: float = dynamics.DEFAULT_TRANSIENT_FRACTION
    workers: int = 1
    stride: int = 1

    def validate(self, source: str = "") -> None:
        checks = [
            ("mu_min", self.mu_min > 0.0, "must be positive"),
            ("mu_max", self.mu_max > self.mu_min, "must exceed mu_min"),
            ("steps", self.steps >= 2, "must be at least 2"),
            ("mu_max_scan", self.mu_max_scan > 0.0, "must be positive"),
            ("tol", self.tol > 0.0, "must be positive"),
            ("dt", self.dt > 0.0, "must be positive"),
            ("t_end", self.t_end >= 100.0 * self.dt, "must cover at least 100 steps of dt"),
            ("transient_fraction", 0.0 <= self.transient_fraction < 1.0, "must lie in [0, 1)"),
            ("workers", self.workers >= 1, "must be at least 1"),
            ("stride", self.stride >= 1, "must be at least 1"),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigError(f"{message} (got {getattr(self, key)!r})", source, key=key)


@dataclass(frozen=True)
class RunConfig:
    params: CardioParams
    variant: ControlVariant
    mu: Optional[float] = None
    settings: AnalysisSettings = field(default_factory=AnalysisSettings)
    allow_unnormalized: bool = False
    source: str = ""

    def with_flags(self, mu: Optional[float] = None, **settings: Any) -> "RunConfig":
        """Apply command-line flags; None values leave the setting alone."""
        changes = {k: v for k, v in settings.items() if v is not None}
        new_settings = replace(self.settings, **changes)
        new_settings.validate("command line")
        if mu is not None and not mu > 0.0:
            raise ConfigError(f"must be positive (got {mu!r})", "command line", key="mu")
        return replace(self, mu=self.mu if mu is None else mu, settings=new_settings)

    def snapshot(self) -> Dict[str, Any]:
        """Plain-data view for the run manifest."""
        return {
            "source": self.source,
            "variant": self.variant.label(),
            "mu": self.mu,
            "params": self.params.as_dict(),
            "settings": asdict(self.settings),
            "allow_unnormalized": self.allow_unnormalized,
        }


# ============================================================
# BUILDING
# ============================================================

def _merge_entry(schema, key: str, fragment, source: str, line: Optional[int]) -> None:
    try:
        schema.merge_with(fragment)
    except OmegaConfBaseException as exc:
        if key not in RunSettings.__dataclass_fields__:
            raise ConfigError("unknown key", source, line, key) from None
        raise ConfigError(f"invalid value ({str(exc).splitlines()[0]})", source, line, key) from None


def _variant_from(settings: RunSettings, source: str) -> ControlVariant:
    if settings.variant is None:
        raise ConfigError("variant required", source, key="variant")
    kind = VARIANT_NAMES.get(settings.variant.strip().lower())
    if kind is None:
        raise ConfigError(
            f"unknown variant {settings.variant!r} (expected one of {', '.join(sorted(VARIANT_NAMES))})",
            source, key="variant",
        )

    for other_kind, names in CONSTANT_NAMES.items():
        if other_kind is kind:
            continue
        for name in names:
            if getattr(settings, name) is not None:
                raise ConfigError(f"does not apply to variant {kind.value}", source, key=name)

    if kind is ControlKind.LINEAR:
        return ControlVariant.linear()

    first, second = CONSTANT_NAMES[kind]
    x1, x2 = getattr(settings, first), getattr(settings, second)
    if x1 is None:
        raise ConfigError(f"required for variant {kind.value}", source, key=first)
    if x2 is None:
        raise ConfigError(f"required for variant {kind.value}", source, key=second)
    try:
        return ControlVariant(kind, float(x1), float(x2))
    except ModelDomainError as exc:
        key = first if str(exc).startswith(first) else second
        raise ConfigError(str(exc), source, key=key) from None


def _params_from(settings: RunSettings, source: str) -> CardioParams:
    overrides = {}
    for key, field_name in PARAM_KEYS.items():
        value = getattr(settings, key)
        if value is None:
            continue
        if not value > 0.0:
            raise ConfigError(f"must be strictly positive (got {value!r})", source, key=key)
        overrides[field_name] = float(value)
    try:
        return CardioParams(**overrides)
    except ModelDomainError as exc:
        raise ConfigError(str(exc), source, key=_blamed_key(str(exc), overrides)) from None


def _blamed_key(message: str, overrides: Dict[str, float]) -> str:
    """Config key for the first field named in message, preferring one the user set."""
    key_of = {field_name: key for key, field_name in PARAM_KEYS.items()}
    named = [w for w in re.findall(r"[a-z_]+", message) if w in key_of]
    for field_name in named:
        if field_name in overrides:
            return key_of[field_name]
    return key_of[named[0]] if named else "params"


def _analysis_from(settings: RunSettings, source: str) -> AnalysisSettings:
    values = {
        f.name: getattr(settings, f.name)
        for f in fields(AnalysisSettings)
        if getattr(settings, f.name) is not None
    }
    analysis = AnalysisSettings(**values)
    analysis.validate(source)
    return analysis


def build_run_config(entries: Mapping[str, Any], source: str = "",
                     lines: Optional[Mapping[str, int]] = None) -> RunConfig:
    """
    Validate raw key/value entries and assemble a RunConfig.

    String values are parsed like config-file values; None means unset.
    """
    lines = lines or {}
    schema = OmegaConf.structured(RunSettings)
    for key, value in entries.items():
        if value is None:
            continue
        if isinstance(value, str):
            fragment = OmegaConf.from_dotlist([f"{key}={value}"])
        else:
            fragment = OmegaConf.create({key: value})
        _merge_entry(schema, key, fragment, source, lines.get(key))

    settings: RunSettings = OmegaConf.to_object(schema)
    variant = _variant_from(settings, source)
    params = _params_from(settings, source)

    if variant.is_active and not settings.allow_unnormalized:
        try:
            variant.check_normalized(params)
        except ModelDomainError as exc:
            first, second = CONSTANT_NAMES[variant.kind]
            raise ConfigError(f"{exc} (set allow_unnormalized = true to override)",
                              source, key=f"{first}/{second}") from None

    if settings.mu is not None and not settings.mu > 0.0:
        raise ConfigError(f"must be positive (got {settings.mu!r})", source, key="mu")

    return RunConfig(
        params=params,
        variant=variant,
        mu=settings.mu,
        settings=_analysis_from(settings, source),
        allow_unnormalized=settings.allow_unnormalized,
        source=source,
    )


def parse_config(path: Union[str, Path]) -> RunConfig:
    """Read a `key = value` run config file."""
    path = Path(path)
    source = str(path)
    text = path.read_text(encoding="utf-8")

    entries: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", source, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {line!r}", source, lineno)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", source, lineno, key)
        if key not in RunSettings.__dataclass_fields__:
            raise ConfigError("unknown key", source, lineno, key)
        entries[key] = value
        lines[key] = lineno

    log.debug("[Config] %s: %s", source, entries)
    return build_run_config(entries, source, lines)


# ============================================================
# HYDRA PRESETS
# ============================================================

def compose_config(config_name: str, overrides: Sequence[str] = ()):
    """Compose a config from configs/ with Hydra overrides."""
    try:
        with initialize_config_dir(version_base=None, config_dir=str(CONFIG_DIR)):
            return compose(config_name=config_name, overrides=list(overrides))
    except HydraException as exc:
        raise ConfigError(str(exc).splitlines()[0], f"configs/{config_name}.yaml") from None


def flatten_preset(cfg) -> Dict[str, Any]:
    """Composed config.yaml tree -> flat config-file keys."""
    data = OmegaConf.to_container(cfg, resolve=True)
    variant = dict(data.pop("variant", {}) or {})
    entries: Dict[str, Any] = {"variant": variant.pop("kind", None)}
    entries.update(variant)
    for section in ("params", "analysis", "simulation"):
        entries.update(data.pop(section, {}) or {})
    entries.update(data)
    return entries


def load_preset(name: str, overrides: Sequence[str] = ()) -> RunConfig:
    """RunConfig for a named configuration in configs/variant/."""
    cfg = compose_config("config", [f"variant={name}", *overrides])
    return build_run_config(flatten_preset(cfg), source=f"preset:{name}")


def preset_names() -> List[str]:
    return sorted(p.stem for p in (CONFIG_DIR / "variant").glob("*.yaml"))
