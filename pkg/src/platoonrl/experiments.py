"""Experiment orchestration: config files, sweeps, metrics and plot data.

Config files are flat ``key = value`` text (``#`` starts a comment); every
key has a scenario default, unknown keys are rejected with their line
number.  A sweep runs the cartesian product of intra-platoon gaps, platoon
sizes, algorithms and seeds, writing one metrics file per point.  Metrics
files are versioned, delimited text that is byte-reproducible from
(config, seed); aggregation and plot-data export are read-only passes over
them.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .env import ConfigError, EnvConfig
from .rewards import RewardWeights
from .training import ALGORITHMS, RANDOM_POLICY, TrainConfig, TrainLog, run_training

METRICS_SCHEMA = "platoon-metrics v1"
PLOTDATA_SCHEMA = "platoon-plotdata v1"
FLOAT_FMT = "{:.12g}"


class ConfigFileError(ConfigError):
    """Config file missing, malformed or violating a constraint."""


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    sweep_gaps_m: tuple[float, ...] = (5.0, 15.0, 25.0, 35.0)
    sweep_platoon_sizes: tuple[int, ...] = (4,)
    algorithms: tuple[str, ...] = ("task_split",)
    seeds: tuple[int, ...] = (1, 2, 3)
    output_dir: str = "runs"
    tail_window: int = 0  # 0 = final 20 percent of episodes

    def __post_init__(self):
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigFileError("seeds must be distinct")
        if not self.seeds:
            raise ConfigFileError("need at least one seed")
        allowed = ALGORITHMS + (RANDOM_POLICY,)
        for alg in self.algorithms:
            if alg not in allowed:
                raise ConfigFileError(f"unknown algorithm {alg!r} (choose from {allowed})")
        if self.tail_window < 0 or self.tail_window > self.train.episodes:
            raise ConfigFileError("tail_window must lie in 0..episodes")
        for gap in self.sweep_gaps_m:
            for size in self.sweep_platoon_sizes:
                try:
                    replace(self.env, intra_platoon_gap_m=gap, platoon_size=size)
                except ConfigError as exc:
                    raise ConfigFileError(f"sweep point gap={gap}, size={size}: {exc}") from exc

    def effective_tail_window(self) -> int:
        if self.tail_window:
            return self.tail_window
        return max(1, self.train.episodes // 5)

    def sweep_points(self):
        """Cartesian product, deterministically ordered."""
        for gap in self.sweep_gaps_m:
            for size in self.sweep_platoon_sizes:
                for alg in self.algorithms:
                    for seed in self.seeds:
                        yield gap, size, alg, seed


# -- config file parsing -------------------------------------------------------

_BOOL_WORDS = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def _parse_bool(text: str) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {text!r}")


def _parse_list(text: str, item):
    items = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(item(s) for s in items)


def _scalar_parser(field_type):
    """Dataclass field annotations are strings under PEP 563."""
    name = field_type if isinstance(field_type, str) else field_type.__name__
    return {"int": int, "float": float, "bool": _parse_bool, "str": str}[name]


# key -> (section, field name, parser)
_KEYMAP: dict[str, tuple[str, str, object]] = {}
for f in dataclasses.fields(EnvConfig):
    _KEYMAP[f.name] = ("env", f.name, _scalar_parser(f.type))
for f in dataclasses.fields(TrainConfig):
    if f.name in ("actor_hidden", "local_critic_hidden", "global_critic_hidden"):
        _KEYMAP[f.name] = ("train", f.name, lambda s: _parse_list(s, int))
    else:
        _KEYMAP[f.name] = ("train", f.name, _scalar_parser(f.type))
_KEYMAP.update(
    {
        "cam_backlog_weight": ("weights", "cam_backlog", float),
        "aoi_weight": ("weights", "aoi", float),
        "rate_bonus_weight": ("weights", "rate_bonus", float),
        "power_weight": ("weights", "power", float),
        "success_revenue": ("weights", "success_revenue", float),
        "global_reward_offset": ("weights", "global_offset", float),
        "global_reward_scale": ("weights", "global_scale", float),
        "sweep_gaps_m": ("root", "sweep_gaps_m", lambda s: _parse_list(s, float)),
        "sweep_platoon_sizes": ("root", "sweep_platoon_sizes", lambda s: _parse_list(s, int)),
        "algorithms": ("root", "algorithms", lambda s: _parse_list(s, str)),
        "seeds": ("root", "seeds", lambda s: _parse_list(s, int)),
        "output_dir": ("root", "output_dir", str),
        "tail_window": ("root", "tail_window", int),
    }
)


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    sections: dict[str, dict] = {"env": {}, "train": {}, "weights": {}, "root": {}}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"{source}:{lineno}: expected 'key = value', got {rawline!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYMAP:
            raise ConfigFileError(f"{source}:{lineno}: unknown key {key!r}")
        if key in sections["env"] or key in sections["train"] or key in sections["weights"] or key in sections["root"]:
            raise ConfigFileError(f"{source}:{lineno}: duplicate key {key!r}")
        section, fname, parser = _KEYMAP[key]
        try:
            sections[section][fname] = parser(value)
        except (ValueError, TypeError) as exc:
            raise ConfigFileError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return ExperimentConfig(
            env=EnvConfig(**sections["env"]),
            train=TrainConfig(**sections["train"]),
            weights=RewardWeights(**sections["weights"]),
            **sections["root"],
        )
    except (ConfigError, ValueError) as exc:
        raise ConfigFileError(f"{source}: {exc}") from exc


def parse_config(path) -> ExperimentConfig:
    """Load and validate a config file; missing keys fall back to defaults."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigFileError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest exact round trip
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """Full key = value dump; parsing it reproduces an equal config."""
    parts = {"env": config.env, "train": config.train, "weights": config.weights, "root": config}
    lines = []
    for key, (section, fname, _) in _KEYMAP.items():
        lines.append(f"{key} = {_format_value(getattr(parts[section], fname))}")
    return "\n".join(lines) + "\n"


# -- metrics files ---------------------------------------------------------------


def metrics_filename(gap: float, size: int, algorithm: str, seed: int) -> str:
    return f"metrics_gap{gap:g}_size{size}_{algorithm}_seed{seed}.csv"


def metrics_columns(num_platoons: int) -> list[str]:
    cols = ["episode", "local_reward_mean"]
    cols += [f"local_reward_{j}" for j in range(num_platoons)]
    cols += [f"task_cam_{j}" for j in range(num_platoons)]
    cols += [f"task_aoi_{j}" for j in range(num_platoons)]
    cols += ["team_reward", "mean_aoi_s", "cam_delivered", "cam_delivered_frac", "mean_power_w"]
    return cols


def write_metrics(path, log: TrainLog, meta: dict):
    """Versioned delimited dump; byte-identical for identical (config, seed)."""
    p = log.env_config.num_platoons
    lines = [f"# {METRICS_SCHEMA}"]
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}")
    lines.append(",".join(metrics_columns(p)))
    for rec in log.records:
        row = [str(rec.episode), FLOAT_FMT.format(float(np.mean(rec.local_rewards)))]
        row += [FLOAT_FMT.format(v) for v in rec.local_rewards]
        row += [FLOAT_FMT.format(v) for v in rec.task_cam_rewards]
        row += [FLOAT_FMT.format(v) for v in rec.task_aoi_rewards]
        row += [
            FLOAT_FMT.format(rec.team_reward),
            FLOAT_FMT.format(rec.mean_aoi_s),
            "1" if rec.cam_delivered else "0",
            FLOAT_FMT.format(rec.cam_delivered_frac),
            FLOAT_FMT.format(rec.mean_power_w),
        ]
        lines.append(",".join(row))
    payload = "\n".join(lines) + "\n"
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(payload)
    os.replace(tmp, path)


def read_metrics(path) -> tuple[dict, dict]:
    """Returns (meta, columns) with columns as float arrays."""
    meta: dict = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as handle:
        first = handle.readline().strip()
        if first != f"# {METRICS_SCHEMA}":
            raise ValueError(f"{path}: unsupported metrics schema line {first!r}")
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                meta[key] = value
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: missing column header")
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    return meta, {name: data[:, i] for i, name in enumerate(header)}


# -- sweep running -----------------------------------------------------------------


def run_point(config: ExperimentConfig, gap: float, size: int, algorithm: str, seed: int) -> TrainLog:
    env_cfg = replace(config.env, intra_platoon_gap_m=gap, platoon_size=size)
    train_cfg = replace(config.train, algorithm=algorithm)
    return run_training(env_cfg, train_cfg, config.weights, seed)


def _point_meta(config: ExperimentConfig, gap, size, algorithm, seed) -> dict:
    return {
        "algorithm": algorithm,
        "seed": seed,
        "gap_m": f"{gap:g}",
        "platoon_size": size,
        "num_platoons": config.env.num_platoons,
        "episodes": config.train.episodes,
    }


def _sweep_worker(args):
    config, gap, size, algorithm, seed, path = args
    log = run_point(config, gap, size, algorithm, seed)
    write_metrics(path, log, _point_meta(config, gap, size, algorithm, seed))
    return path


def run_sweep(config: ExperimentConfig, parallel_runs: int = 1, skip_existing: bool = True) -> list[str]:
    """Run every sweep point, one metrics file each; existing files are kept
    (resume rule), failures are reported together after all points ran."""
    os.makedirs(config.output_dir, exist_ok=True)
    jobs = []
    paths = []
    for gap, size, alg, seed in config.sweep_points():
        path = os.path.join(config.output_dir, metrics_filename(gap, size, alg, seed))
        paths.append(path)
        if skip_existing and os.path.exists(path):
            continue
        jobs.append((config, gap, size, alg, seed, path))

    failures: list[tuple[str, str]] = []
    if parallel_runs > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel_runs) as pool:
            futures = {pool.submit(_sweep_worker, job): job[-1] for job in jobs}
            for fut in concurrent.futures.as_completed(futures):
                try:
                    fut.result()
                except Exception as exc:  # noqa: BLE001 - surfaced per run below
                    failures.append((futures[fut], repr(exc)))
    else:
        for job in jobs:
            try:
                _sweep_worker(job)
            except Exception as exc:  # noqa: BLE001
                failures.append((job[-1], repr(exc)))
    if failures:
        detail = "; ".join(f"{path}: {err}" for path, err in sorted(failures))
        raise RuntimeError(f"{len(failures)} sweep run(s) failed: {detail}")
    return paths


# -- aggregation ------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    gap_m: float
    platoon_size: int
    algorithm: str
    num_seeds: int
    mean_aoi_s: float  # tail-window mean, pooled over seeds
    cam_probability: float  # fraction of tail episodes with full delivery
    mean_reward: float  # tail-window mean of the agent-mean local reward


@dataclass
class SweepSummary:
    rows: list[SummaryRow]
    reward_curves: dict  # (gap, size, algorithm) -> per-episode seed-mean reward
    tail_window: int


def aggregate(paths, tail_window: int | None = None) -> SweepSummary:
    """Pool metrics files into converged-performance numbers per sweep point.

    The tail window defaults to the final 20 percent of episodes; the result
    is independent of the order the files are given in.
    """
    groups: dict = {}
    for path in sorted(str(p) for p in paths):
        meta, cols = read_metrics(path)
        key = (float(meta["gap_m"]), int(meta["platoon_size"]), meta["algorithm"])
        groups.setdefault(key, []).append(cols)

    rows = []
    curves = {}
    chosen_window = 0
    for key in sorted(groups):
        runs = groups[key]
        episodes = len(runs[0]["episode"])
        for cols in runs:
            if len(cols["episode"]) != episodes:
                raise ValueError(f"run length mismatch within sweep point {key}")
        window = tail_window if tail_window else max(1, episodes // 5)
        if window > episodes:
            raise ValueError(f"tail window {window} exceeds run length {episodes}")
        chosen_window = window
        aoi = np.mean([cols["mean_aoi_s"][-window:] for cols in runs])
        cam = np.mean([cols["cam_delivered"][-window:] for cols in runs])
        reward = np.mean([cols["local_reward_mean"][-window:] for cols in runs])
        rows.append(
            SummaryRow(
                gap_m=key[0],
                platoon_size=key[1],
                algorithm=key[2],
                num_seeds=len(runs),
                mean_aoi_s=float(aoi),
                cam_probability=float(cam),
                mean_reward=float(reward),
            )
        )
        curves[key] = np.mean([cols["local_reward_mean"] for cols in runs], axis=0)
    return SweepSummary(rows=rows, reward_curves=curves, tail_window=chosen_window)


def write_summary(path, summary: SweepSummary):
    lines = [
        f"# {PLOTDATA_SCHEMA}",
        f"# tail_window={summary.tail_window}",
        "# columns: gap_m [m], platoon_size [vehicles], algorithm [name], "
        "num_seeds [count], mean_aoi_s [s], cam_probability [fraction], mean_reward [reward]",
        "gap_m,platoon_size,algorithm,num_seeds,mean_aoi_s,cam_probability,mean_reward",
    ]
    for r in summary.rows:
        lines.append(
            f"{r.gap_m:g},{r.platoon_size},{r.algorithm},{r.num_seeds},"
            f"{FLOAT_FMT.format(r.mean_aoi_s)},{FLOAT_FMT.format(r.cam_probability)},"
            f"{FLOAT_FMT.format(r.mean_reward)}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


# -- plot data export -----------------------------------------------------------------


def _write_table(path, axis_name: str, axis_unit: str, axis_values, series: dict, value_unit: str):
    names = sorted(series)
    doc = ", ".join([f"{axis_name} [{axis_unit}]"] + [f"{n} [{value_unit}]" for n in names])
    lines = [f"# {PLOTDATA_SCHEMA}", f"# columns: {doc}", ",".join([axis_name] + names)]
    for i, x in enumerate(axis_values):
        row = [FLOAT_FMT.format(float(x))]
        row += [FLOAT_FMT.format(float(series[n][i])) for n in names]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _axis_tables(summary: SweepSummary, axis: str):
    """Per-algorithm curves versus the requested sweep axis, pooled over the
    other axis when it was swept too."""
    rows = summary.rows
    values = sorted({getattr(r, axis) for r in rows})
    algorithms = sorted({r.algorithm for r in rows})
    aoi, cam = {}, {}
    for alg in algorithms:
        aoi[f"aoi_{alg}"] = []
        cam[f"cam_{alg}"] = []
        for v in values:
            matching = [r for r in rows if r.algorithm == alg and getattr(r, axis) == v]
            aoi[f"aoi_{alg}"].append(np.mean([r.mean_aoi_s for r in matching]) if matching else np.nan)
            cam[f"cam_{alg}"].append(np.mean([r.cam_probability for r in matching]) if matching else np.nan)
    return values, aoi, cam


def export_plot_data(summary: SweepSummary, out_dir) -> list[str]:
    """Write the five figure-family files; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    created = []

    curve_names = {
        f"reward_{alg}_gap{gap:g}_size{size}": curve
        for (gap, size, alg), curve in summary.reward_curves.items()
    }
    if curve_names:
        episodes = np.arange(len(next(iter(curve_names.values()))))
        path = os.path.join(out_dir, "reward_vs_episode.csv")
        _write_table(path, "episode", "index", episodes, curve_names, "reward")
        created.append(path)

    for axis, unit, tag in (("gap_m", "m", "gap"), ("platoon_size", "vehicles", "size")):
        values, aoi, cam = _axis_tables(summary, axis)
        path = os.path.join(out_dir, f"aoi_vs_{tag}.csv")
        _write_table(path, axis, unit, values, aoi, "s")
        created.append(path)
        path = os.path.join(out_dir, f"cam_vs_{tag}.csv")
        _write_table(path, axis, unit, values, cam, "fraction")
        created.append(path)
    return created
