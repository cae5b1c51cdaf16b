"""Line-oriented ``key = value`` run configuration with [chain] [system] [initial] [run]."""

import configparser
from dataclasses import dataclass

import numpy as np

from .chain import ChainParams, SystemParams
from .simulate import ScenarioConfig


class ConfigError(ValueError):
    pass


# section -> key -> (converter, default)
_SCHEMA = {
    "chain": {
        "N": (int, 225),
        "omega0": (float, 0.3),
        "g": (float, 0.1),
        "h": (float, 0.05),
        "end_correction": (str, "first"),
    },
    "system": {
        "omega_s": (float, 0.35),
        "kappa": (float, 1e-4),
    },
    "initial": {
        "temperature": (float, 0.0),
        "squeezing": (float, 1.0),
    },
    "run": {
        "t_max": (float, 500.0),
        "dt": (float, 1.0),
        "observed_sites": (str, "all"),
        "front_threshold": (float, 0.05),
        "front_hold": (int, 2),
        "min_front_sites": (int, 10),
        "ballistic_sites": (int, 30),
        "confinement_ratio": (float, 0.01),
        "confinement_from_site": (int, 10),
        "penetration_window": (str, "2-20"),
        "spectral_width": (str, "auto"),
        "kernel_t_max": (float, 500.0),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; ``values`` echoes every key."""

    values: dict

    def get(self, section, key):
        return self.values[section][key]

    @property
    def chain(self) -> ChainParams:
        c = self.values["chain"]
        return ChainParams(N=c["N"], omega0=c["omega0"], g=c["g"], h=c["h"], end_correction=c["end_correction"])

    @property
    def system(self) -> SystemParams:
        s = self.values["system"]
        return SystemParams(omegaS=s["omega_s"], kappa=s["kappa"])

    @property
    def penetration_window(self):
        return parse_range(self.values["run"]["penetration_window"], "penetration_window")

    @property
    def spectral_width(self):
        w = self.values["run"]["spectral_width"]
        return None if w == "auto" else float(w)

    def scenario(self, omega_s=None) -> ScenarioConfig:
        run = self.values["run"]
        sys = self.system
        if omega_s is not None:
            sys = SystemParams(omegaS=omega_s, kappa=sys.kappa)
        n_steps = int(round(run["t_max"] / run["dt"]))
        t_grid = run["dt"] * np.arange(n_steps + 1)
        sites = parse_sites(run["observed_sites"], self.values["chain"]["N"])
        return ScenarioConfig(
            chain=self.chain,
            sys=sys,
            T=self.values["initial"]["temperature"],
            r=self.values["initial"]["squeezing"],
            t_grid=t_grid,
            observed_sites=sites,
            front_threshold=run["front_threshold"],
            front_hold=run["front_hold"],
            min_front_sites=run["min_front_sites"],
            ballistic_sites=run["ballistic_sites"],
            confinement_ratio=run["confinement_ratio"],
            confinement_from_site=run["confinement_from_site"],
        )

    def with_omega_s(self, omega_s):
        values = {k: dict(v) for k, v in self.values.items()}
        values["system"]["omega_s"] = float(omega_s)
        return RunConfig(values)


def parse_range(text, key):
    try:
        lo, hi = (int(x) for x in text.split("-"))
    except ValueError:
        raise ConfigError(f"[run] {key}: expected 'lo-hi', got {text!r}") from None
    return lo, hi


def parse_sites(text, N):
    """'all', a list '1,2,5', ranges '1-40', or a mix; None means every site."""
    text = text.strip()
    if not text:
        raise ConfigError("[run] observed_sites: empty site list")
    if text == "all":
        return None
    sites = []
    for part in text.split(","):
        part = part.strip()
        try:
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-"))
                sites.extend(range(lo, hi + 1))
            else:
                sites.append(int(part))
        except ValueError:
            raise ConfigError(f"[run] observed_sites: cannot parse {part!r}") from None
    if not sites:
        raise ConfigError("[run] observed_sites: empty site list")
    bad = [n for n in sites if not 1 <= n <= N]
    if bad:
        raise ConfigError(f"[run] observed_sites: site {bad[0]} outside 1..{N}")
    return tuple(sites)


def _line_of(text, section, key):
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=", 1)[0].strip() == key:
            return i
    return None


def _where(path, text, section, key):
    line = _line_of(text, section, key)
    return f"{path}:{line}" if line else str(path)


def parse_config_text(text: str, path="<config>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        delimiters=("=",),
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: key outside any section: {exc.line.strip()!r}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{path}:{lineno}: malformed line {line.strip()!r}") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: duplicate key [{exc.section}] {exc.option}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: duplicate section [{exc.section}]") from None

    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{_where(path, text, section, key)}: unknown key [{section}] {key}")
    for section, keys in _SCHEMA.items():
        values[section] = {}
        for key, (conv, default) in keys.items():
            if parser.has_option(section, key):
                raw = parser.get(section, key).strip()
                if raw == "" and key != "observed_sites":
                    raise ConfigError(f"{_where(path, text, section, key)}: empty value for [{section}] {key}")
                try:
                    values[section][key] = conv(raw)
                except ValueError:
                    raise ConfigError(
                        f"{_where(path, text, section, key)}: invalid value for [{section}] {key}: {raw!r}"
                    ) from None
            else:
                values[section][key] = default

    cfg = RunConfig(values)
    # surface parameter invariants as config errors naming the key
    checks = [
        ("chain", lambda: cfg.chain),
        ("system", lambda: cfg.system),
        ("run", lambda: cfg.penetration_window),
        ("run", lambda: cfg.spectral_width),
        ("run", lambda: cfg.scenario()),
    ]
    for section, check in checks:
        try:
            check()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}: [{section}] {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, path)


def config_text(cfg: RunConfig) -> str:
    """Render a resolved configuration back to the file format."""
    lines = []
    for section, keys in cfg.values.items():
        lines.append(f"[{section}]")
        for key, value in keys.items():
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
