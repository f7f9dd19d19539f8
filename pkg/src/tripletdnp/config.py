"""Sectioned key-value configuration for the toolkit.

The file format is INI-style with `#` comments. Every key carries its unit
in its name (field_tesla, td_minutes, ...) to keep the minutes/seconds and
mT/T traps out of config files. All keys have documented defaults; defaults
that are literature values or model placeholders rather than
setup-specific numbers are flagged as such and echoed in verbose mode.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .constants import (
    DEFAULT_TEMPERATURE_K,
    PENTACENE_D_MHZ,
    PENTACENE_E_MHZ,
    PENTACENE_ZF_POPULATIONS,
)
from .errors import ConfigError, ValidationError
from .ise import IseSequenceParams, hartmann_hahn_b1
from .kinetics import KineticsParams
from .tripletspin import MagneticFieldSetting, TripletParameters

__all__ = ["ToolkitConfig", "parse_config", "default_config", "CONFIG_REFERENCE"]

# (section, key) -> (default, provenance note). A None default marks a key
# computed from other keys. The provenance strings are printed verbatim in
# verbose mode for every key the file does not set.
CONFIG_REFERENCE: dict[tuple[str, str], tuple[object, str]] = {
    ("triplet", "d_mhz"): (PENTACENE_D_MHZ, "pentacene literature value, not setup-specific"),
    ("triplet", "e_mhz"): (PENTACENE_E_MHZ, "pentacene literature value, not setup-specific"),
    ("triplet", "population_x"): (
        PENTACENE_ZF_POPULATIONS[0],
        "pentacene literature value, not setup-specific",
    ),
    ("triplet", "population_y"): (
        PENTACENE_ZF_POPULATIONS[1],
        "pentacene literature value, not setup-specific",
    ),
    ("triplet", "population_z"): (
        PENTACENE_ZF_POPULATIONS[2],
        "pentacene literature value, not setup-specific",
    ),
    ("field", "field_tesla"): (0.64, "reference setup default"),
    ("field", "theta_rad"): (0.0, "free orientation parameter, default along the splitting z axis"),
    ("field", "phi_rad"): (0.0, "free orientation parameter"),
    ("sequence", "microwave_frequency_ghz"): (17.2, "reference setup default"),
    ("sequence", "microwave_width_us"): (20.0, "reference setup default"),
    ("sequence", "laser_width_us"): (1.0, "reference setup default"),
    ("sequence", "microwave_delay_us"): (2.0, "model placeholder, not a measured value"),
    ("sequence", "repetition_rate_hz"): (1000.0, "reference setup default"),
    ("sequence", "sweep_span_mt"): (3.0, "model placeholder, not a measured value"),
    ("sequence", "b1_amplitude_mt"): (None, "computed Hartmann-Hahn match to the static field"),
    ("sequence", "static_field_tesla"): (None, "defaults to field.field_tesla"),
    ("kinetics", "pe"): (0.826, "reference fit default"),
    ("kinetics", "td_minutes"): (20.2, "reference fit default"),
    ("kinetics", "tr_minutes"): (57.1, "reference fit default"),
    ("kinetics", "pth"): (0.0, "thermal floor negligible at the reference conditions"),
    ("general", "temperature_kelvin"): (DEFAULT_TEMPERATURE_K, "nominal room temperature"),
    ("general", "output_dir"): (".", "current directory"),
}


@dataclass(frozen=True)
class ToolkitConfig:
    """Validated toolkit configuration assembled from a config file."""

    triplet: TripletParameters
    field: MagneticFieldSetting
    sequence: IseSequenceParams
    kinetics: KineticsParams
    temperature_kelvin: float
    output_dir: Path

    def __post_init__(self):
        if self.temperature_kelvin <= 0.0:
            raise ConfigError(f"temperature_kelvin must be positive, got {self.temperature_kelvin}")


def default_config(verbose: bool = False, echo=print) -> ToolkitConfig:
    """Config with every key at its documented default."""
    return _assemble({}, verbose=verbose, echo=echo)


def parse_config(path, verbose: bool = False, echo=print) -> ToolkitConfig:
    """Read and validate a config file.

    Unknown sections or keys are rejected (they are usually typos). In
    verbose mode every key that fell back to its default is echoed with its
    provenance note.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(p.read_text(), source=str(p))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    raw: dict[tuple[str, str], str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if (section, key) not in CONFIG_REFERENCE:
                raise ConfigError(f"unknown config key [{section}] {key}")
            raw[(section, key)] = value
    return _assemble(raw, verbose=verbose, echo=echo)


def _get_float(raw, section: str, key: str, verbose: bool, echo) -> float:
    if (section, key) in raw:
        text = raw[(section, key)]
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None
    default, provenance = CONFIG_REFERENCE[(section, key)]
    if verbose:
        echo(f"# default [{section}] {key} = {default} ({provenance})")
    return float(default)


def _assemble(raw, verbose: bool, echo) -> ToolkitConfig:
    try:
        triplet = TripletParameters(
            d_mhz=_get_float(raw, "triplet", "d_mhz", verbose, echo),
            e_mhz=_get_float(raw, "triplet", "e_mhz", verbose, echo),
            zf_populations=(
                _get_float(raw, "triplet", "population_x", verbose, echo),
                _get_float(raw, "triplet", "population_y", verbose, echo),
                _get_float(raw, "triplet", "population_z", verbose, echo),
            ),
        )
        field = MagneticFieldSetting(
            magnitude_tesla=_get_float(raw, "field", "field_tesla", verbose, echo),
            theta_rad=_get_float(raw, "field", "theta_rad", verbose, echo),
            phi_rad=_get_float(raw, "field", "phi_rad", verbose, echo),
        )

        if ("sequence", "static_field_tesla") in raw:
            static_field = _get_float(raw, "sequence", "static_field_tesla", verbose, echo)
        else:
            static_field = field.magnitude_tesla
            if verbose:
                echo(
                    f"# default [sequence] static_field_tesla = {static_field} "
                    f"({CONFIG_REFERENCE[('sequence', 'static_field_tesla')][1]})"
                )
        if ("sequence", "b1_amplitude_mt") in raw:
            b1 = _get_float(raw, "sequence", "b1_amplitude_mt", verbose, echo)
        else:
            b1 = hartmann_hahn_b1(static_field) if static_field > 0 else 1.0
            if verbose:
                echo(
                    f"# default [sequence] b1_amplitude_mt = {b1} "
                    f"({CONFIG_REFERENCE[('sequence', 'b1_amplitude_mt')][1]})"
                )
        sequence = IseSequenceParams(
            microwave_frequency_ghz=_get_float(raw, "sequence", "microwave_frequency_ghz", verbose, echo),
            microwave_width_us=_get_float(raw, "sequence", "microwave_width_us", verbose, echo),
            laser_width_us=_get_float(raw, "sequence", "laser_width_us", verbose, echo),
            microwave_delay_us=_get_float(raw, "sequence", "microwave_delay_us", verbose, echo),
            repetition_rate_hz=_get_float(raw, "sequence", "repetition_rate_hz", verbose, echo),
            sweep_span_mt=_get_float(raw, "sequence", "sweep_span_mt", verbose, echo),
            b1_amplitude_mt=b1,
            static_field_tesla=static_field,
        )
        kinetics = KineticsParams(
            pe=_get_float(raw, "kinetics", "pe", verbose, echo),
            td_minutes=_get_float(raw, "kinetics", "td_minutes", verbose, echo),
            tr_minutes=_get_float(raw, "kinetics", "tr_minutes", verbose, echo),
            pth=_get_float(raw, "kinetics", "pth", verbose, echo),
        )
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc

    if ("general", "output_dir") in raw:
        output_dir = Path(raw[("general", "output_dir")])
    else:
        output_dir = Path(str(CONFIG_REFERENCE[("general", "output_dir")][0]))
        if verbose:
            echo(
                f"# default [general] output_dir = {output_dir} "
                f"({CONFIG_REFERENCE[('general', 'output_dir')][1]})"
            )
    return ToolkitConfig(
        triplet=triplet,
        field=field,
        sequence=sequence,
        kinetics=kinetics,
        temperature_kelvin=_get_float(raw, "general", "temperature_kelvin", verbose, echo),
        output_dir=output_dir,
    )
