"""Experiment runner.

Each subcommand writes machine-readable artifacts (JSON, CSV) plus a rendered
PNG figure into the output directory, and encodes its verdict in the exit
status: 0 pass/CONVEX, 1 fail/NON_CONVEX, 2 configuration or parse error,
3 INCONCLUSIVE.  Artifacts are byte-deterministic for a fixed config and
seed; the manifest embeds the resolved config and the calibration constants.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calibration import THEOREM_RATIO_BOUNDS, constants_json
from .detector import DemoConfig, DetectorConfig, convexity_verdict, counterexample_demo
from .fixtures import _convex_fixtures, _nonconvex_fixtures
from .geometry import (ShapeError, crofton_perimeter, random_convex_polygon, rasterize,
                       shape_from_json, shape_to_json)
from .grids import GridError, GridSpec, load_mask
from .mollify import epsilon_schedule, mollify2d
from .radon import fourier_slice_check, global_identity_check, marginal_family
from .sobolev import perimeter_by_scaling


class ConfigError(Exception):
    """Consolidated configuration failure; message lists every violation."""


@dataclass
class ExperimentConfig:
    n: int = 512
    length: float = 2.0
    eps0: float | None = None       # default L/32
    ratio: float = 0.5
    count: int | None = None        # default: halve until the 2h floor
    n_angles: int = 180
    delta_ladder: tuple | None = None  # default (L/20, L/10, L/5)
    eta_factor: float = 4.0
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        problems = []
        if int(self.n) != self.n or self.n < 8:
            problems.append(f"grid N must be an integer >= 8, got {self.n}")
        if not (self.length > 0):
            problems.append(f"grid L must be positive, got {self.length}")
        if self.eps0 is not None and not (0 < self.eps0 < self.length):
            problems.append(f"eps0 must lie in (0, L), got {self.eps0}")
        if not (0 < self.ratio < 1):
            problems.append(f"schedule ratio must lie in (0, 1), got {self.ratio}")
        if self.count is not None and self.count < 2:
            problems.append(f"schedule count must be >= 2, got {self.count}")
        if self.n_angles < 8:
            problems.append(f"angle count must be >= 8, got {self.n_angles}")
        if self.eta_factor < 4.0:
            problems.append(f"eta factor must be >= 4, got {self.eta_factor}")
        if self.delta_ladder is not None:
            ladder = tuple(self.delta_ladder)
            if not ladder or any(d <= 0 for d in ladder) or any(
                    b <= a for a, b in zip(ladder, ladder[1:])):
                problems.append(f"delta ladder must be positive and increasing, got {ladder}")
            self.delta_ladder = ladder
        if int(self.seed) != self.seed or self.seed < 0:
            problems.append(f"seed must be a nonnegative integer, got {self.seed}")
        if self.threads < 1:
            problems.append(f"threads must be >= 1, got {self.threads}")
        if self.length > 0 and self.n >= 8:
            h = self.length / self.n
            eps0 = self.eps0 if self.eps0 is not None else self.length / 32.0
            if self.count is not None and eps0 * self.ratio ** (self.count - 1) < 2 * h * (1 - 1e-12):
                problems.append(
                    f"schedule reaches below the resolution floor 2h = {2 * h:.6g}")
            if eps0 * self.ratio < 2 * h * (1 - 1e-12):
                problems.append(
                    f"schedule admits fewer than 2 epsilons above the floor 2h = {2 * h:.6g}")
        if problems:
            raise ConfigError("; ".join(problems))

    @classmethod
    def from_json(cls, data: dict, **overrides) -> "ExperimentConfig":
        known = {
            "N": "n", "L": "length", "n": "n", "length": "length",
            "eps0": "eps0", "ratio": "ratio", "count": "count",
            "angles": "n_angles", "n_angles": "n_angles",
            "delta_ladder": "delta_ladder", "eta_factor": "eta_factor",
            "seed": "seed", "threads": "threads",
        }
        kwargs = {}
        bad = []
        flat = dict(data)
        for group in ("grid", "schedule"):
            sub = flat.pop(group, None)
            if isinstance(sub, dict):
                flat.update(sub)
        for key, value in flat.items():
            if key in known:
                kwargs[known[key]] = value
            else:
                bad.append(key)
        if bad:
            raise ConfigError(f"unknown config keys: {sorted(bad)}")
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.length)

    def schedule(self) -> tuple:
        spec = self.spec()
        eps0 = self.eps0 if self.eps0 is not None else self.length / 32.0
        return tuple(epsilon_schedule(spec, eps0=eps0, ratio=self.ratio, count=self.count))

    def ladder(self) -> tuple:
        if self.delta_ladder is not None:
            return self.delta_ladder
        return (self.length / 20.0, self.length / 10.0, self.length / 5.0)

    def to_json(self) -> dict:
        # threads deliberately omitted: artifacts must not depend on it
        return {
            "grid": {"N": self.n, "L": self.length},
            "schedule": {"eps0": self.eps0 if self.eps0 is not None else self.length / 32.0,
                         "ratio": self.ratio,
                         "epsilons": list(self.schedule())},
            "angles": self.n_angles,
            "delta_ladder": list(self.ladder()),
            "eta_factor": self.eta_factor,
            "seed": self.seed,
        }


_FIXTURE_SHAPES = None


def _named_shape(name: str, seed: int):
    global _FIXTURE_SHAPES
    if name == "random_polygon":
        return random_convex_polygon(np.random.default_rng(seed), radius=0.6)
    if _FIXTURE_SHAPES is None:
        _FIXTURE_SHAPES = {f.name: f.shape for f in _convex_fixtures() + _nonconvex_fixtures()}
    if name in _FIXTURE_SHAPES:
        return _FIXTURE_SHAPES[name]
    raise ShapeError(f"unknown shape name {name!r}; known: "
                     + ", ".join(sorted(_FIXTURE_SHAPES) + ["random_polygon"]))


def resolve_shape(text: str, seed: int = 0):
    """Shape from a JSON literal, a JSON file path, or a fixture name."""
    text = text.strip()
    if text.startswith("{"):
        return shape_from_json(json.loads(text))
    if Path(text).exists():
        return shape_from_json(json.loads(Path(text).read_text()))
    return _named_shape(text, seed)


def _dump_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_manifest(out: Path, command: str, config: ExperimentConfig,
                    shape=None, extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config": config.to_json(),
        "shape": shape_to_json(shape) if shape is not None else None,
        "constants": constants_json(),
    }
    if extra:
        manifest.update(extra)
    _dump_json(out / "manifest.json", manifest)


def cmd_perimeter_scaling(config: ExperimentConfig, shape, out: Path, figures: bool) -> int:
    spec = config.spec()
    grid = rasterize(shape, spec)
    fit = perimeter_by_scaling(grid, config.schedule(), threads=config.threads)
    crofton = crofton_perimeter(grid, config.n_angles)
    ratio = fit.slope / crofton.value if crofton.value > 0 else float("inf")
    band = (THEOREM_RATIO_BOUNDS[0] / 3.0, THEOREM_RATIO_BOUNDS[1] * 3.0)
    ok = (not fit.degenerate) and fit.r2 >= 0.99 and band[0] <= ratio <= band[1]

    lines = ["abs_log_eps,energy"]
    lines += [f"{x!r},{y!r}" for x, y in fit.points]
    (out / "scaling.csv").write_text("\n".join(lines) + "\n")
    _dump_json(out / "fit.json", {
        **fit.to_json(),
        "crofton_perimeter": crofton.value,
        "slope_over_crofton": ratio,
        "ratio_band": list(band),
        "r2_min": 0.99,
        "pass": bool(ok),
    })
    if figures:
        from .plots import save_scaling_figure
        save_scaling_figure(fit, crofton.value, out / "scaling.png")
    return 0 if ok else 1


def cmd_slice_identity(config: ExperimentConfig, shape, out: Path, figures: bool,
                       epsilon: float = 0.02, slice_angles: int | None = None) -> int:
    spec = config.spec()
    field_ = mollify2d(rasterize(shape, spec), epsilon)
    thetas = None
    if slice_angles is not None:
        thetas = [k * np.pi / slice_angles for k in range(slice_angles)]
    check = fourier_slice_check(field_, thetas=thetas)
    identity = global_identity_check(field_, n_angles=config.n_angles)
    ok = check.max_error <= 2e-2 and 0.98 <= identity.ratio <= 1.02
    _dump_json(out / "identity.json", {
        "slice": check.to_json(),
        "slice_max_err": check.max_error,
        "global": identity.to_json(),
        "global_ratio": identity.ratio,
        "epsilon": epsilon,
        "pass": bool(ok),
    })
    if figures:
        from .plots import save_identity_figure
        save_identity_figure(check, identity, out / "identity.png")
    return 0 if ok else 1


def cmd_convexity(config: ExperimentConfig, shape, mask: Path | None, out: Path,
                  figures: bool) -> int:
    if mask is not None:
        grid = load_mask(mask)
        spec = grid.spec
    else:
        spec = config.spec()
        grid = rasterize(shape, spec)
    det = DetectorConfig.for_grid(
        spec,
        epsilons=tuple(config.schedule()) if mask is None else tuple(epsilon_schedule(spec)),
        n_angles=max(config.n_angles, 64),
        delta=config.ladder()[len(config.ladder()) // 2],
        delta_ladder=config.ladder(),
        eta_factor=config.eta_factor,
    )
    report = convexity_verdict(grid, det)
    _dump_json(out / "report.json", report.to_json())
    if figures:
        from .plots import save_convexity_figure
        family = marginal_family(grid, det.n_angles)
        save_convexity_figure(grid, report, family, out / "convexity.png")
    return {"CONVEX": 0, "NON_CONVEX": 1, "INCONCLUSIVE": 3}[report.verdict]


def cmd_counterexample(config: ExperimentConfig, out: Path, figures: bool,
                       epsilon_bump: float = 0.05) -> int:
    demo = DemoConfig(n=config.n, length=config.length, n_angles=config.n_angles)
    report = counterexample_demo(epsilon_bump, demo)
    _dump_json(out / "counterexample.json", report.to_json())
    if figures:
        from .plots import save_counterexample_figure
        save_counterexample_figure(report, out / "counterexample.png")
    return 0 if report.success else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perimetry",
        description="perimeter-from-marginals experiments on rasterized planar sets")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, shape_default=None):
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
        if shape_default is not None:
            p.add_argument("--shape", default=shape_default,
                           help="shape JSON literal, JSON file, or fixture name")

    p = sub.add_parser("perimeter-scaling", help="energy vs |log eps| scaling fit")
    common(p, shape_default="disk")

    p = sub.add_parser("slice-identity", help="Fourier slice and energy identity checks")
    common(p, shape_default="disk")
    p.add_argument("--epsilon", type=float, default=0.02, help="mollification scale")
    p.add_argument("--slice-angles", type=int, default=None,
                   help="number of slice-check angles (default 64)")

    p = sub.add_parser("convexity", help="convexity verdict for a shape or mask")
    common(p, shape_default="disk")
    p.add_argument("--mask", type=Path, default=None, help="PGM mask with JSON sidecar")

    p = sub.add_parser("counterexample", help="perturbed-disk log-concavity demonstration")
    common(p)
    p.add_argument("--epsilon-bump", type=float, default=0.05)
    return parser


_DEMO_DEFAULTS = {"n": 1024, "length": 2.75}


def _load_config(args) -> ExperimentConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {"seed": args.seed, "threads": args.threads}
    if args.command == "counterexample" and args.config is None:
        overrides.update(_DEMO_DEFAULTS)
    return ExperimentConfig.from_json(data, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        shape = None
        if getattr(args, "shape", None) is not None and getattr(args, "mask", None) is None:
            shape = resolve_shape(args.shape, config.seed)
    except (ConfigError, ShapeError, GridError, ValueError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stderr)
        return 2

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    figures = not args.no_figures
    try:
        if args.command == "perimeter-scaling":
            _write_manifest(out, args.command, config, shape)
            return cmd_perimeter_scaling(config, shape, out, figures)
        if args.command == "slice-identity":
            _write_manifest(out, args.command, config, shape,
                            extra={"epsilon": args.epsilon})
            return cmd_slice_identity(config, shape, out, figures,
                                      epsilon=args.epsilon, slice_angles=args.slice_angles)
        if args.command == "convexity":
            _write_manifest(out, args.command, config,
                            None if args.mask is not None else shape,
                            extra={"mask": args.mask.name if args.mask else None})
            return cmd_convexity(config, shape, args.mask, out, figures)
        if args.command == "counterexample":
            _write_manifest(out, args.command, config,
                            extra={"epsilon_bump": args.epsilon_bump})
            return cmd_counterexample(config, out, figures, epsilon_bump=args.epsilon_bump)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ShapeError, GridError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
