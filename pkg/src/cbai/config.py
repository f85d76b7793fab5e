"""INI-style experiment configuration files.

Example::

    [instance]
    family = gaussian
    means = 2.5, 2.3, 2.0, 0.6
    sigma = 1.0

    [contamination]
    epsilon = 0.1
    adversary = fixed_shift
    shift = 5.0

    [policy]
    name = gcbai
    delta = 0.1

    [experiment]
    n_trials = 1000
    master_seed = 0

Unknown sections or keys are rejected. Relative CSV paths are resolved
against the directory of the configuration file.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

from .bandit import ArmDistribution, BanditInstance, ContaminationModel
from .datasets import ingest_pkis2, ingest_ratings, read_rows
from .exceptions import ConfigError
from .harness import ExperimentConfig

__all__ = ["RunSettings", "load_config", "parse_config", "instance_section"]

_KEYS = {
    "instance": {"family", "means", "sigma", "mu_log", "sigma_log", "p", "sigma_proxy", "uncertainty",
                 "ratings_csv", "pkis2_csv"},
    "contamination": {"epsilon", "epsilon_assumed", "adversary", "shift", "half_width", "mean_range", "per_arm_means"},
    "policy": {"name", "radius_mode", "delta", "alpha", "beta", "c1", "max_rounds"},
    "experiment": {"n_trials", "master_seed", "workers", "output", "trace"},
    "sweep": {"parameter", "grid"},
}


@dataclass(frozen=True)
class RunSettings:
    """Parsed file: the experiment plus runner-only settings."""

    config: ExperimentConfig
    workers: int = 1
    sweep_parameter: Optional[str] = None
    sweep_grid: Optional[tuple] = None


def _floats(text, key):
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None


def _float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        value = None
    if value is None or not value.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(value)


def _broadcast(values, n, key):
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise ConfigError(f"{key}: expected 1 or {n} values, got {len(values)}")
    return values


def _instance(sec, base_dir) -> BanditInstance:
    get = sec.get
    sigma_proxy = get("sigma_proxy")
    uncertainty = get("uncertainty")
    u = _floats(uncertainty, "instance.uncertainty") if uncertainty else None
    for key in ("ratings_csv", "pkis2_csv"):
        if get(key):
            path = get(key)
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            if not os.path.exists(path):
                raise FileNotFoundError(path)
            sigma = _float(get("sigma", "1.0"), "instance.sigma")
            inst = (ingest_ratings if key == "ratings_csv" else ingest_pkis2)(read_rows(path), sigma)
            if sigma_proxy or u is not None:
                sp = _float(sigma_proxy, "instance.sigma_proxy") if sigma_proxy else inst.sigma_proxy
                inst = BanditInstance(inst.arms, sp, u)
            return inst

    family = get("family", "gaussian").strip()
    if family in ("gaussian", "exponential"):
        if not get("means"):
            raise ConfigError(f"instance.means is required for family {family}")
        means = _floats(get("means"), "instance.means")
        if family == "gaussian":
            sig = _broadcast(_floats(get("sigma", "1.0"), "instance.sigma"), len(means), "instance.sigma")
            arms = [ArmDistribution.gaussian(m, s) for m, s in zip(means, sig)]
            default_proxy = max(sig)
        else:
            arms = [ArmDistribution.exponential(m) for m in means]
            default_proxy = max(means)
    elif family == "lognormal":
        if not (get("mu_log") and get("sigma_log")):
            raise ConfigError("instance.mu_log and instance.sigma_log are required for family lognormal")
        mu = _floats(get("mu_log"), "instance.mu_log")
        sl = _broadcast(_floats(get("sigma_log"), "instance.sigma_log"), len(mu), "instance.sigma_log")
        arms = [ArmDistribution.lognormal(m, s) for m, s in zip(mu, sl)]
        default_proxy = 1.0
    elif family == "bernoulli":
        if not get("p"):
            raise ConfigError("instance.p is required for family bernoulli")
        arms = [ArmDistribution.bernoulli(v) for v in _floats(get("p"), "instance.p")]
        default_proxy = 0.5
    else:
        raise ConfigError(f"instance.family must be gaussian, exponential, lognormal or bernoulli, got {family!r}")
    sp = _float(sigma_proxy, "instance.sigma_proxy") if sigma_proxy else default_proxy
    return BanditInstance(tuple(arms), sp, u)


def _contamination(sec) -> ContaminationModel:
    get = sec.get
    kw = {}
    if get("epsilon"):
        kw["epsilon"] = _float(get("epsilon"), "contamination.epsilon")
    if get("epsilon_assumed"):
        kw["epsilon_assumed"] = _float(get("epsilon_assumed"), "contamination.epsilon_assumed")
    if get("adversary"):
        kw["adversary"] = get("adversary").strip()
    if get("shift"):
        kw["shift"] = _float(get("shift"), "contamination.shift")
    if get("half_width"):
        kw["half_width"] = _float(get("half_width"), "contamination.half_width")
    if get("mean_range"):
        r = _floats(get("mean_range"), "contamination.mean_range")
        if len(r) != 2:
            raise ConfigError("contamination.mean_range needs two values: low, high")
        kw["mean_range"] = tuple(r)
    if get("per_arm_means"):
        kw["per_arm_means"] = tuple(_floats(get("per_arm_means"), "contamination.per_arm_means"))
    return ContaminationModel(**kw)


def parse_config(text: str, base_dir: str = ".", overrides: Optional[dict] = None) -> RunSettings:
    """Parse configuration text. ``overrides`` maps CLI names to values.

    Recognised override keys: ``delta``, ``epsilon``, ``trials``, ``seed``,
    ``policy``, ``radius_mode``, ``out``, ``alpha``, ``workers``, ``trace``,
    ``max_rounds``. ``None`` values are ignored.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    for name in cp.sections():
        if name not in _KEYS:
            raise ConfigError(f"unknown section [{name}]")
        extra = set(cp[name]) - _KEYS[name]
        if extra:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")
    if not cp.has_section("instance"):
        raise ConfigError("missing [instance] section")
    empty = {}
    pol = cp["policy"] if cp.has_section("policy") else empty
    exp = cp["experiment"] if cp.has_section("experiment") else empty
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}

    instance = _instance(cp["instance"], base_dir)
    contamination = _contamination(cp["contamination"] if cp.has_section("contamination") else empty)
    if "epsilon" in ov:
        contamination = dataclasses.replace(contamination, epsilon=float(ov["epsilon"]))

    kw = dict(instance=instance, contamination=contamination)
    kw["policy"] = ov.get("policy", pol.get("name", "gcbai")).strip()
    kw["radius_mode"] = ov.get("radius_mode", pol.get("radius_mode", "theorem")).strip()
    kw["delta"] = float(ov["delta"]) if "delta" in ov else _float(pol.get("delta", "0.1"), "policy.delta")
    alpha = ov.get("alpha", pol.get("alpha"))
    kw["alpha"] = None if alpha in (None, "") else _float(str(alpha), "policy.alpha")
    if pol.get("beta"):
        kw["beta_exp"] = _float(pol.get("beta"), "policy.beta")
    if pol.get("c1"):
        kw["c1_uncertainty"] = _float(pol.get("c1"), "policy.c1")
    kw["max_rounds"] = int(ov["max_rounds"]) if "max_rounds" in ov else _int(pol.get("max_rounds", "10000000"), "policy.max_rounds")
    kw["n_trials"] = int(ov["trials"]) if "trials" in ov else _int(exp.get("n_trials", "1000"), "experiment.n_trials")
    kw["master_seed"] = int(ov["seed"]) if "seed" in ov else _int(exp.get("master_seed", "0"), "experiment.master_seed")
    kw["output"] = ov.get("out", exp.get("output"))
    kw["trace"] = ov.get("trace", exp.get("trace"))
    config = ExperimentConfig(**kw)

    workers = int(ov["workers"]) if "workers" in ov else _int(exp.get("workers", "1"), "experiment.workers")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    param = grid = None
    if cp.has_section("sweep"):
        sw = cp["sweep"]
        param = sw.get("parameter", "delta").strip()
        if param not in ("delta", "epsilon"):
            raise ConfigError(f"sweep.parameter must be delta or epsilon, got {param!r}")
        grid = tuple(_floats(sw.get("grid", ""), "sweep.grid"))
    return RunSettings(config, workers, param, grid)


def load_config(path: str, overrides: Optional[dict] = None) -> RunSettings:
    """Read and parse a configuration file. Missing files raise ``FileNotFoundError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)), overrides)


def instance_section(instance: BanditInstance, comment: Optional[str] = None) -> str:
    """Render an ``[instance]`` section for a Gaussian instance (used by ``cbai ingest``)."""
    if any(a.kind != "gaussian" for a in instance.arms):
        raise ConfigError("only Gaussian instances can be rendered as a means list")
    means = ", ".join(format(a.params[0], ".12g") for a in instance.arms)
    sig = {a.params[1] for a in instance.arms}
    lines = []
    if comment:
        lines += [f"# {line}" for line in comment.splitlines()]
    lines += ["[instance]", "family = gaussian", f"means = {means}",
              f"sigma = {format(sig.pop(), '.12g') if len(sig) == 1 else ', '.join(format(a.params[1], '.12g') for a in instance.arms)}",
              f"sigma_proxy = {format(instance.sigma_proxy, '.12g')}", ""]
    return "\n".join(lines)
