"""Experiment configuration: dataclass, INI reader/writer and paper presets."""

from __future__ import annotations

import configparser
import itertools
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import ConfigurationError
from ..selectors import METHODS, CvSettings, DetConfig, StabilityConfig
from ..simgen import ClusterConfig, SerialConfig

WORKERS_ENV = "DIRECTEFFECTS_WORKERS"

SERIAL_RHOS = (0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99)
CONSISTENCY_NS = (250, 500, 1000, 2000, 4000, 8000)
CLUSTER_KS = tuple(range(1, 11))
GENERATORS = ("serial", "clustered", "file")


@dataclass(frozen=True)
class Cell:
    """One point of the experiment grid."""

    generator: str
    n: int
    p: int
    rho: float
    k: int | None
    effect: float

    @property
    def key(self):
        k = "-" if self.k is None else str(self.k)
        return f"{self.generator}|n={self.n}|p={self.p}|rho={self.rho!r}|k={k}|effect={self.effect!r}"

    def generator_config(self):
        if self.generator == "serial":
            return SerialConfig(self.n, self.p, self.rho)
        if self.generator == "clustered":
            return ClusterConfig(self.n, self.p, self.k, self.rho)
        raise ConfigurationError("file-based cells have no generator config")


@dataclass
class ExperimentConfig:
    generator: str = "serial"
    n: tuple = (1000,)
    p: tuple = (400,)
    rho: tuple = SERIAL_RHOS
    k: tuple = (1,)
    effect: tuple = (0.81,)
    n_causal: int = 1
    datasets: int = 100
    replicates: int = 10
    methods: tuple = METHODS
    seed: int = 20100101
    hct: bool = False
    hct_corr: float = 0.9
    output: str = "results"
    workers: int | None = None
    data_file: str | None = None
    cv: CvSettings = field(default_factory=CvSettings)
    enet_alpha: float = 0.5
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    det: DetConfig = field(default_factory=DetConfig)
    level: float = 0.05
    clean_family: str = "logistic"

    def __post_init__(self):
        for name in ("n", "p", "rho", "k", "effect", "methods"):
            v = getattr(self, name)
            if isinstance(v, (int, float, str)):
                v = (v,)
            setattr(self, name, tuple(v))
        self.validate()

    def validate(self):
        if self.generator not in GENERATORS:
            raise ConfigurationError(f"generator must be one of {GENERATORS}, got {self.generator!r}")
        if not self.methods:
            raise ConfigurationError("method list is empty")
        for m in self.methods:
            method_name(m)
        for name in ("n", "p", "rho", "effect"):
            if not getattr(self, name):
                raise ConfigurationError(f"grid over {name} is empty")
        if self.generator == "clustered" and not self.k:
            raise ConfigurationError("clustered generator needs k values")
        if self.generator == "file" and not self.data_file:
            raise ConfigurationError("generator=file needs data_file")
        if self.datasets < 1 or self.replicates < 1:
            raise ConfigurationError("datasets and replicates must be >= 1")
        if self.n_causal < 1:
            raise ConfigurationError("n_causal must be >= 1")
        if not 0 < self.hct_corr <= 1:
            raise ConfigurationError("hct_corr must lie in (0, 1]")
        if not 0 < self.level < 1:
            raise ConfigurationError("level must lie in (0, 1)")
        if not 0 < self.enet_alpha <= 1:
            raise ConfigurationError("enet alpha must lie in (0, 1]")
        if self.clean_family not in ("logistic", "linear"):
            raise ConfigurationError("clean family must be logistic or linear")
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        for cell in self.cells():
            if cell.generator == "file":
                continue
            cell.generator_config()
            if self.n_causal > cell.p:
                raise ConfigurationError(f"n_causal={self.n_causal} exceeds p={cell.p}")
        return self

    def cells(self):
        if self.generator == "file":
            return [Cell("file", 0, 0, 0.0, None, float(e)) for e in self.effect]
        ks = self.k if self.generator == "clustered" else (None,)
        return [
            Cell(self.generator, int(n), int(p), float(rho), None if k is None else int(k), float(e))
            for n, p, rho, k, e in itertools.product(self.n, self.p, self.rho, ks, self.effect)
        ]

    def worker_count(self):
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                w = int(env)
            except ValueError:
                raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
            if w < 1:
                raise ConfigurationError(f"{WORKERS_ENV} must be >= 1")
            return w
        return self.workers or 1

    def method_options(self, name):
        base = method_name(name)
        opts = {"cv": self.cv}
        if base == "enet":
            opts["alpha"] = method_alpha(name, self.enet_alpha)
        elif base == "stability":
            opts["config"] = self.stability
        elif base == "det":
            opts["config"] = self.det
        elif base == "screen_clean":
            opts["level"] = self.level
            opts["family"] = self.clean_family
        elif base == "fisher":
            opts["level"] = self.level
        return opts

    def with_(self, **changes):
        return replace(self, **changes)

    # --- INI round trip -------------------------------------------------

    @classmethod
    def from_file(cls, path):
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = parser.read(path)
        if not read:
            raise ConfigurationError(f"cannot read config file {path}")
        cfg = cls.from_parser(parser)
        base = Path(path).resolve().parent
        if cfg.data_file and not Path(cfg.data_file).is_absolute():
            cfg.data_file = str(base / cfg.data_file)
        return cfg

    @classmethod
    def from_string(cls, text):
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.read_string(text)
        return cls.from_parser(parser)

    @classmethod
    def from_parser(cls, parser):
        known = {"experiment", "methods", "cv", "enet", "stability", "det", "screen_clean", "fisher"}
        unknown = set(parser.sections()) - known
        if unknown:
            raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
        kw = {}
        try:
            ex = parser["experiment"] if parser.has_section("experiment") else {}
            _take(kw, ex, "generator", str)
            for name, conv in (("n", int), ("p", int), ("rho", float), ("k", int), ("effect", float)):
                if name in ex:
                    kw[name] = _list(ex[name], conv)
            for name, conv in (("n_causal", int), ("datasets", int), ("replicates", int), ("seed", int),
                               ("hct_corr", float), ("output", str), ("data_file", str)):
                _take(kw, ex, name, conv)
            if "hct" in ex:
                kw["hct"] = parser.getboolean("experiment", "hct")
            if ex.get("workers", "").strip():
                kw["workers"] = int(ex["workers"])
            if parser.has_section("methods") and "use" in parser["methods"]:
                kw["methods"] = _list(parser["methods"]["use"], str)
            if parser.has_section("cv"):
                s = parser["cv"]
                cvkw = {}
                _take(cvkw, s, "folds", int)
                _take(cvkw, s, "n_lambda", int)
                _take(cvkw, s, "lambda_min_ratio", float)
                _take(cvkw, s, "rule", str)
                if "early_stop" in s:
                    cvkw["early_stop"] = parser.getboolean("cv", "early_stop")
                kw["cv"] = CvSettings(**cvkw)
            if parser.has_section("enet"):
                _take(kw, parser["enet"], "alpha", float, dest="enet_alpha")
            if parser.has_section("stability"):
                s = parser["stability"]
                skw = {}
                _take(skw, s, "B", int)
                _take(skw, s, "pi_thr", float)
                if "per_subsample_cv" in s:
                    skw["per_subsample_cv"] = parser.getboolean("stability", "per_subsample_cv")
                kw["stability"] = StabilityConfig(**skw)
            if parser.has_section("det"):
                s = parser["det"]
                dkw = {}
                _take(dkw, s, "corr_threshold", float)
                _take(dkw, s, "ratio", float)
                _take(dkw, s, "level", float, dest="bonferroni_level")
                kw["det"] = DetConfig(**dkw)
            if parser.has_section("screen_clean"):
                _take(kw, parser["screen_clean"], "family", str, dest="clean_family")
                _take(kw, parser["screen_clean"], "level", float)
            if parser.has_section("fisher"):
                _take(kw, parser["fisher"], "level", float)
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad config value: {exc}") from None
        return cls(**kw)

    def to_ini(self):
        def fmt(vals):
            return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in vals)

        lines = [
            "[experiment]",
            f"generator = {self.generator}",
            f"n = {fmt(self.n)}",
            f"p = {fmt(self.p)}",
            f"rho = {fmt(self.rho)}",
            f"k = {fmt(self.k)}",
            f"effect = {fmt(self.effect)}",
            f"n_causal = {self.n_causal}",
            f"datasets = {self.datasets}",
            f"replicates = {self.replicates}",
            f"seed = {self.seed}",
            f"hct = {str(self.hct).lower()}",
            f"hct_corr = {self.hct_corr!r}",
            f"output = {self.output}",
        ]
        if self.workers is not None:
            lines.append(f"workers = {self.workers}")
        if self.data_file:
            lines.append(f"data_file = {self.data_file}")
        lines += [
            "",
            "[methods]",
            f"use = {', '.join(self.methods)}",
            "",
            "[cv]",
            f"folds = {self.cv.folds}",
            f"n_lambda = {self.cv.n_lambda}",
        ]
        if self.cv.lambda_min_ratio is not None:
            lines.append(f"lambda_min_ratio = {self.cv.lambda_min_ratio!r}")
        lines += [
            f"rule = {self.cv.rule}",
            f"early_stop = {str(self.cv.early_stop).lower()}",
            "",
            "[enet]",
            f"alpha = {self.enet_alpha!r}",
            "",
            "[stability]",
            f"B = {self.stability.B}",
            f"pi_thr = {self.stability.pi_thr!r}",
            f"per_subsample_cv = {str(self.stability.per_subsample_cv).lower()}",
            "",
            "[det]",
            f"corr_threshold = {self.det.corr_threshold!r}",
            f"ratio = {self.det.ratio!r}",
            f"level = {self.det.bonferroni_level!r}",
            "",
            "[screen_clean]",
            f"family = {self.clean_family}",
            f"level = {self.level!r}",
            "",
        ]
        return "\n".join(lines)


def _list(text, conv):
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    return tuple(conv(t) for t in items)


def _take(out, section, key, conv, dest=None):
    if key in section and str(section[key]).strip() != "":
        out[dest or key] = conv(section[key].strip())


def method_name(name):
    """Base method of a configured method token (``enet_0.9`` -> ``enet``)."""
    base = name.split("_")[0] if name.startswith("enet_") else name
    if base not in METHODS:
        raise ConfigurationError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    if base == "enet" and name != "enet":
        method_alpha(name, 0.5)
    return base


def method_alpha(name, default):
    if name.startswith("enet_"):
        try:
            a = float(name[len("enet_"):])
        except ValueError:
            raise ConfigurationError(f"cannot read alpha from method token {name!r}") from None
        if not 0 < a <= 1:
            raise ConfigurationError(f"alpha in {name!r} must lie in (0, 1]")
        return a
    return default


# --- presets --------------------------------------------------------------

def paper_serial(**kw):
    """Serial-correlation sweep at the published scale (n=1000, p=400)."""
    return ExperimentConfig(**{"generator": "serial", "n": (1000,), "p": (400,), "rho": SERIAL_RHOS, **kw})


def paper_serial_hct(**kw):
    return paper_serial(hct=True, **kw)


def paper_consistency(rho, **kw):
    """Sample-size sweep at fixed serial correlation."""
    return ExperimentConfig(**{"generator": "serial", "n": CONSISTENCY_NS, "p": (400,), "rho": (rho,), **kw})


def paper_cluster(rho, **kw):
    """Cluster-size sweep k = 1..10 at fixed within-cluster correlation."""
    return ExperimentConfig(**{"generator": "clustered", "n": (1000,), "p": (400,), "rho": (rho,),
                               "k": CLUSTER_KS, **kw})


PRESETS = {
    "serial": lambda **kw: paper_serial(**kw),
    "serial-hct": lambda **kw: paper_serial_hct(**kw),
    "consistency-0.95": lambda **kw: paper_consistency(0.95, **kw),
    "consistency-0.9": lambda **kw: paper_consistency(0.9, **kw),
    "consistency-0.5": lambda **kw: paper_consistency(0.5, **kw),
    "cluster-0.9": lambda **kw: paper_cluster(0.9, **kw),
    "cluster-0.95": lambda **kw: paper_cluster(0.95, **kw),
}


def desk_scale(cfg: ExperimentConfig):
    """Shrink a preset to desk scale: p=100, 20 datasets x 10 replicates."""
    return cfg.with_(p=(100,), datasets=20, replicates=10)
