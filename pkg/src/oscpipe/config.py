"""Run configuration: a flat-section INI document parsed into a validated RunConfig.

Strict by default: unknown sections or keys are errors naming the offender;
physical-parameter violations report the violated inequality.  The exact
schema (sections, keys, defaults) is documented in the README.
"""

from __future__ import annotations

import configparser
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .effective import DensityProfile
from .model import ConfigurationError, MediumParams, OscillatorChain
from .pulses import CompactBump, GaussianPulse

EXPERIMENTS = ("simulate-finite", "simulate-effective", "converge", "scatter",
               "bandgap", "static-check")

# section -> key -> (type tag, default or REQUIRED)
REQUIRED = object()
SCHEMA = {
    "run": {"experiment": ("str", REQUIRED), "seed": ("int", 0)},
    "medium": {"rho0": ("float", REQUIRED), "a": ("float", REQUIRED),
               "S": ("float", REQUIRED)},
    "profile": {"rho_m": ("float", REQUIRED), "rho_k": ("float", REQUIRED),
                "L": ("float", REQUIRED), "center": ("float", 0.0),
                "n": ("int", 0)},
    "chain": {"s": ("floats", REQUIRED), "M": ("floats", REQUIRED),
              "K": ("floats", REQUIRED), "L": ("float", REQUIRED),
              "center": ("float", 0.0)},
    "initial": {"kind": ("str", "gaussian"), "center": ("float", REQUIRED),
                "width": ("float", REQUIRED), "amplitude": ("float", 1.0),
                "link": ("str", "right"), "carrier": ("float", 0.0)},
    "grid": {"dx": ("float", REQUIRED), "t_max": ("float", REQUIRED),
             "snapshot_every": ("int", 0), "x_extent": ("float", 0.0),
             "csv_max_nodes": ("int", 800)},
    "converge": {"n_values": ("ints", (25, 50, 100, 200, 400)),
                 "t_max": ("float", 3.0), "x_half": ("float", 1.0),
                 "points_per_length": ("int", 200),
                 "lattice_nt": ("int", 201), "lattice_nx": ("int", 201),
                 "ref_refine": ("int", 4), "richardson": ("bool", True),
                 "shift": ("float", 0.0)},
    "scatter": {"probe_pad_frac": ("float", 0.1), "x_left": ("float", 0.0),
                "x_right": ("float", 0.0)},
    "bandgap": {"omega_min": ("float", REQUIRED), "omega_max": ("float", REQUIRED),
                "count": ("int", 41), "width": ("float", 0.0),
                "time_domain": ("bool", False), "rel_bandwidth": ("float", 0.1)},
    "static": {"n_values": ("ints", (2, 5, 20)), "draws": ("int", 3),
               "t_horizon": ("float", 1.0)},
}

_NEEDS = {
    "simulate-finite": ["medium", "initial", "grid"],
    "simulate-effective": ["medium", "profile", "initial", "grid"],
    "converge": ["medium", "profile", "initial"],
    "scatter": ["medium", "initial", "grid"],
    "bandgap": ["medium", "profile", "bandgap"],
    "static-check": ["medium", "static"],
}


def _parse_value(raw: str, kind: str, where: str):
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigurationError(f"key {where}: cannot parse {raw!r} as {kind}") from exc
    raise ConfigurationError(f"unknown schema kind {kind}")


@dataclass
class RunConfig:
    experiment: str
    seed: int
    sections: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> dict:
        return self.sections[name]

    def has(self, name: str) -> bool:
        return name in self.sections

    # -- builders ----------------------------------------------------------

    def medium(self) -> MediumParams:
        m = self.sections["medium"]
        return MediumParams(m["rho0"], m["a"], m["S"])

    def profile(self) -> DensityProfile:
        p = self.sections["profile"]
        return DensityProfile.constant(p["rho_m"], p["rho_k"], p["L"], p["center"])

    def chain(self) -> OscillatorChain:
        c = self.sections["chain"]
        return OscillatorChain(np.asarray(c["s"]), np.asarray(c["M"]),
                               np.asarray(c["K"]), c["L"], c["center"])

    def pulse(self):
        i = self.sections["initial"]
        cls = {"gaussian": GaussianPulse, "bump": CompactBump}.get(i["kind"])
        if cls is None:
            raise ConfigurationError(f"key initial.kind: unknown kind {i['kind']!r}")
        kwargs = dict(center=i["center"], width=i["width"], amplitude=i["amplitude"],
                      link=i["link"])
        if i["kind"] == "gaussian":
            kwargs["carrier"] = i["carrier"]
        elif i["carrier"] != 0.0:
            raise ConfigurationError("key initial.carrier: only gaussian pulses carry one")
        return cls(**kwargs)


def parse_config(text: str, permissive: bool = False) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc

    def complain(msg: str):
        if permissive:
            warnings.warn(msg, stacklevel=3)
        else:
            raise ConfigurationError(msg)

    sections: dict = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            complain(f"unknown section [{sec}]")
            continue
        out = {}
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                complain(f"unknown key {sec}.{key}")
                continue
            kind, _ = SCHEMA[sec][key]
            out[key] = _parse_value(raw, kind, f"{sec}.{key}")
        sections[sec] = out

    if "run" not in sections or "experiment" not in sections["run"]:
        raise ConfigurationError("key run.experiment is required")
    experiment = sections["run"]["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(
            f"key run.experiment: {experiment!r} not in {EXPERIMENTS}")

    for sec in _NEEDS[experiment]:
        if sec == "initial" and "chain" not in sections and "profile" not in sections \
                and experiment in ("simulate-finite", "scatter"):
            pass
        if sec not in sections:
            raise ConfigurationError(f"experiment {experiment} requires section [{sec}]")

    if experiment in ("simulate-finite", "scatter", "static-check"):
        if "chain" not in sections and "profile" not in sections:
            raise ConfigurationError(
                f"experiment {experiment} requires a [chain] or a [profile] section")
        if "profile" in sections and "chain" not in sections \
                and experiment != "static-check" and sections["profile"].get("n", 0) < 1:
            raise ConfigurationError(
                "key profile.n: a wall count >= 1 is needed to discretize the profile")
    if experiment == "converge" and "chain" in sections:
        raise ConfigurationError(
            "experiment converge takes [profile] only: giving [chain] too is ambiguous")
    if experiment in ("simulate-effective", "bandgap", "converge") \
            and "profile" not in sections:
        raise ConfigurationError(f"experiment {experiment} requires section [profile]")

    # fill defaults, validate inequalities
    for sec, keys in SCHEMA.items():
        if sec not in sections:
            continue
        for key, (kind, default) in keys.items():
            if key not in sections[sec]:
                if default is REQUIRED:
                    raise ConfigurationError(f"key {sec}.{key} is required")
                sections[sec][key] = default

    def positive(sec, key):
        if sec in sections and not sections[sec][key] > 0:
            raise ConfigurationError(f"key {sec}.{key}: must satisfy {key} > 0")

    for key in ("rho0", "a", "S"):
        positive("medium", key)
    if "profile" in sections:
        for key in ("rho_m", "rho_k"):
            if sections["profile"][key] < 0:
                raise ConfigurationError(f"key profile.{key}: must satisfy {key} >= 0")
        positive("profile", "L")
    if "chain" in sections:
        positive("chain", "L")
    if "initial" in sections:
        positive("initial", "width")
    if "grid" in sections:
        positive("grid", "dx")
        positive("grid", "t_max")
    if "bandgap" in sections:
        if not sections["bandgap"]["omega_min"] >= 0:
            raise ConfigurationError("key bandgap.omega_min: must satisfy omega_min >= 0")
        if not sections["bandgap"]["omega_max"] > sections["bandgap"]["omega_min"]:
            raise ConfigurationError("key bandgap.omega_max: must exceed omega_min")

    seed = sections["run"].get("seed", 0)
    return RunConfig(experiment=experiment, seed=seed, sections=sections)


def serialize_config(cfg: RunConfig) -> str:
    """Resolved-config INI text; parse_config(serialize_config(c)) == c."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for sec in SCHEMA:
        if sec not in cfg.sections:
            continue
        cp[sec] = {}
        for key in SCHEMA[sec]:
            if key not in cfg.sections[sec]:
                continue
            val = cfg.sections[sec][key]
            if isinstance(val, tuple):
                cp[sec][key] = ", ".join(repr(v) for v in val)
            elif isinstance(val, bool):
                cp[sec][key] = "true" if val else "false"
            elif isinstance(val, float):
                cp[sec][key] = repr(val)
            else:
                cp[sec][key] = str(val)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
