"""INI configuration files and run manifests.

Sections mirror the modules (``grid``, ``coefficients``, ``simulation``,
``ensemble``, ``tests``, ``dual``, ``rates``) plus ``run`` for manifest
metadata. Unknown sections or keys are rejected with the offending line.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .coefficients import CoefficientSpec
from .dual import DualConfig
from .errors import ConfigError, SheLabError
from .ensemble.runner import EnsembleConfig
from .lattice import make_grid
from .solver import BUFFER_WIDTHS, SimConfig


def _floats(s):
    s = s.strip()
    return tuple(float(v) for v in re.split(r"[,\s]+", s) if v) if s else ()


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _words(s):
    return tuple(w for w in re.split(r"[,\s]+", s.strip()) if w)


def _int_or_exact(s):
    s = s.strip()
    return None if s.lower() == "exact" else int(s)


def _opt_float(s):
    s = s.strip()
    return None if s == "" else float(s)


def _u64(s):
    v = int(s.strip(), 0)
    if not 0 <= v < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")
    return v


# section -> key -> (parser, default as text)
SCHEMA = {
    "grid": {"dx": (float, "0.05"), "dt": (_opt_float, ""), "x_lo": (float, "0"),
             "x_hi": (_opt_float, ""), "boundary": (str, "periodic")},
    "coefficients": {"gamma": (float, "0.5"), "n": (_int_or_exact, "exact")},
    "simulation": {"T": (float, "1"), "N": (float, "8"), "record_times": (_floats, ""),
                   "u0": (float, "1"), "seed": (_u64, "0"), "path": (int, "0")},
    "ensemble": {"paths": (int, "1000"), "windows": (_floats, ""), "keep_fields": (_bool, "true")},
    "tests": {
        "enabled": (_words, ""),
        "clt_times": (_floats, ""), "clt_rel_tol": (float, "0.15"), "clt_level": (float, "0.01"),
        "covariance_t": (_opt_float, ""), "covariance_offsets": (_floats, "0"),
        "covariance_rel_tol": (float, "0.2"),
        "association_t": (_opt_float, ""), "association_offsets": (_floats, "0.1,0.25,0.5,1,2"),
        "association_quantiles": (_floats, "0.1,0.3,0.5,0.7,0.9"),
        "ergodicity_t": (_opt_float, ""), "ergodicity_N": (_floats, "8,16,32"),
        "extremes_t": (_opt_float, ""), "extremes_N": (_floats, "8,16,32,64"),
        "mgf_lambda": (float, "1"), "mgf_t": (_opt_float, ""), "mgf_N": (_floats, ""),
        "mgf_rel_tol": (float, "0.1"),
        "lower_tail_a": (float, "0.5"), "lower_tail_t": (_opt_float, ""),
        "lower_tail_N": (_opt_float, ""), "lower_tail_slack": (float, "0.15"),
        "mean_t": (_opt_float, ""), "mean_x": (float, "0"),
    },
    "dual": {"lambda": (float, "1"), "N": (float, "100"), "t": (float, "1"), "dx": (float, "0.01"),
             "dt": (_opt_float, ""), "buffer": (_opt_float, ""), "scheme": (str, "imex")},
    "rates": {"lambdas": (_floats, "0.25,0.5,1,2,4"), "times": (_floats, "0.5,1,2"),
              "a": (_floats, "0.1,0.25,0.5,0.75,0.9")},
    "run": {"seed": (_u64, "0"), "version": (str, ""), "command": (str, ""), "out": (str, "")},
}
SECTION_ORDER = list(SCHEMA)
KNOWN_TESTS = ("clt", "covariance", "association", "ergodicity", "extremes", "mgf", "lower_tail",
               "mean_one", "variance_growth")


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            cur = m.group(1).strip()
            if key is None and cur == section:
                return i
            continue
        if key is not None and cur == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


@dataclass
class RunConfig:
    """Parsed configuration: raw strings (for round trips) plus typed values."""

    raw: dict = field(default_factory=dict)  # section -> key -> text as given
    source: str = "<string>"

    def has(self, section):
        return section in self.raw

    def get(self, section, key):
        parser, default = SCHEMA[section][key]
        text = self.raw.get(section, {}).get(key, default)
        try:
            return parser(text)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value {text!r}: {exc}", where=f"{self.source}: [{section}] {key}")

    def set(self, section, key, value):
        self.raw.setdefault(section, {})[key] = value

    # ---------------------------------------------------------- builders
    def sim_config(self) -> SimConfig:
        T = self.get("simulation", "T")
        N = self.get("simulation", "N")
        dx = self.get("grid", "dx")
        dt = self.get("grid", "dt")
        dt = 0.5 * dx * dx if dt is None else dt
        x_lo = self.get("grid", "x_lo")
        x_hi = self.get("grid", "x_hi")
        if x_hi is None:
            need = N + BUFFER_WIDTHS * math.sqrt(T)
            x_hi = x_lo + math.ceil(need / dx - 1e-9) * dx
        try:
            grid = make_grid(x_lo, x_hi, dx, dt, self.get("grid", "boundary"))
        except SheLabError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [grid]") from exc
        try:
            coeff = CoefficientSpec(self.get("coefficients", "gamma"), self.get("coefficients", "n"))
        except ValueError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [coefficients]") from exc
        try:
            return SimConfig(grid, coeff, T=T, N=N, record_times=self.get("simulation", "record_times"),
                             u0=self.get("simulation", "u0"))
        except ValueError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [simulation]") from exc

    def seed(self, override=None) -> int:
        if override is not None:
            return override
        if "run" in self.raw and "seed" in self.raw["run"]:
            return self.get("run", "seed")
        return self.get("simulation", "seed")

    def ensemble_config(self, seed=None) -> EnsembleConfig:
        sim = self.sim_config()
        tests = self.get("tests", "enabled")
        bad = [t for t in tests if t not in KNOWN_TESTS]
        if bad:
            raise ConfigError(f"unknown test {bad[0]!r}; known: {', '.join(KNOWN_TESTS)}",
                              where=f"{self.source}: [tests] enabled")
        windows = set(self.get("ensemble", "windows")) | {sim.N}
        windows |= set(self.get("tests", "mgf_N"))
        ltn = self.get("tests", "lower_tail_N")
        if ltn is not None:
            windows.add(ltn)
        try:
            return EnsembleConfig(sim=sim, paths=self.get("ensemble", "paths"), seed=self.seed(seed),
                                  tests=frozenset(tests), windows=tuple(sorted(windows)),
                                  keep_fields=self.get("ensemble", "keep_fields"))
        except SheLabError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [ensemble] windows") from exc
        except ValueError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [ensemble] paths") from exc

    def dual_config(self) -> DualConfig:
        try:
            return DualConfig(lam=self.get("dual", "lambda"), N=self.get("dual", "N"), t=self.get("dual", "t"),
                              dx=self.get("dual", "dx"), dt=self.get("dual", "dt"),
                              buffer=self.get("dual", "buffer"), scheme=self.get("dual", "scheme"))
        except SheLabError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [dual]") from exc
        except ValueError as exc:
            raise ConfigError(str(exc), where=f"{self.source}: [dual]") from exc

    # ---------------------------------------------------------- serialisation
    def dumps(self) -> str:
        lines = []
        for section in SECTION_ORDER:
            if section not in self.raw:
                continue
            if lines:
                lines.append("")
            lines.append(f"[{section}]")
            for key in SCHEMA[section]:
                if key in self.raw[section]:
                    lines.append(f"{key} = {self.raw[section][key]}")
        return "\n".join(lines) + "\n"


def loads(text: str, source: str = "<string>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], where=source) from exc
    raw = {}
    for section in cp.sections():
        if section not in SCHEMA:
            line = _line_of(text, section)
            raise ConfigError(f"unknown section [{section}]", where=f"{source}:{line}")
        raw[section] = {}
        for key, value in cp.items(section):
            if key not in SCHEMA[section]:
                line = _line_of(text, section, key)
                raise ConfigError(f"unknown key {key!r} in [{section}]", where=f"{source}:{line}")
            raw[section][key] = value.strip()
    cfg = RunConfig(raw=raw, source=source)
    for section, keys in raw.items():
        for key in keys:
            try:
                cfg.get(section, key)
            except ConfigError as exc:
                line = _line_of(text, section, key)
                raise ConfigError(str(exc).split(": ", 2)[-1], where=f"{source}:{line}: [{section}] {key}") from None
    return cfg


def load(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", where=str(path)) from exc
    return loads(text, source=str(path))


COMMAND_SECTIONS = {
    "simulate": ("grid", "coefficients", "simulation"),
    "verify": ("grid", "coefficients", "simulation", "ensemble", "tests"),
    "dual": ("dual",),
    "rates": ("rates",),
}


def manifest(cfg: RunConfig, seed: int, command: str, out: str, version: str) -> RunConfig:
    """Fully resolved copy of ``cfg`` plus a ``[run]`` section (seed, version, output)."""
    m = RunConfig(raw={s: dict(k) for s, k in cfg.raw.items() if s != "run"}, source=cfg.source)
    for section in COMMAND_SECTIONS.get(command, ()):
        keys = m.raw.setdefault(section, {})
        for key, (_, default) in SCHEMA[section].items():
            keys.setdefault(key, default)
    if "grid" in m.raw:
        grid = cfg.sim_config().grid
        m.raw["grid"]["dt"] = repr(grid.dt)
        m.raw["grid"]["x_hi"] = repr(grid.x_lo + grid.length)
    m.raw["run"] = {"seed": str(seed), "version": version, "command": command, "out": out}
    return m
