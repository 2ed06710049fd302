"""Command-line front end: experiment drivers and CSV reports.

Four subcommands:

* ``blocksize-study`` -- Theta_{0,0}(0) against block size M for one
  weighting scheme, with the closed-form bound per row and a power-law
  fit exponent in the footer;
* ``spatial-decay``   -- Theta_{0,J}(0) against block offset J, with the
  diagonal bound per row and a log-linear decay rate in the footer;
* ``time-decay``      -- Theta_{0,0}(t) samples, with the envelope fit
  exponent and the stationary-phase prefactors of the dominant
  branches in the footer;
* ``validate``        -- runs the cross-module invariant suites and sets
  the exit code.

All reports share the CSV schema
``experiment,coordinate,value,bound,method,imag_residual`` with floats
serialized to 17 significant digits (binary round-trip exact), so a
fixed configuration and seed reproduce the output byte for byte.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
``GLE_MEMLAB_THREADS`` caps the linear-algebra thread pools.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .asymptotics import (
    bound_constant,
    bound_linear,
    branch_amplitude_caps,
    char_poly_residual,
    eigen_branches,
    fit_decay_rate,
    stationary_phase_estimate,
)
from .cg import (
    WeightingScheme,
    cg_symbols,
    linear_basis,
    randomized_constant_basis,
    randomized_linear_basis,
)
from .kernel import (
    KernelSeries,
    midpoint_grid,
    theta00_zero_simplified,
    theta_entry,
    theta_spatial_series,
    theta_time_series,
)
from .lattice import (
    ForceConstants,
    StabilityError,
    analytic_eigenpairs,
    require_stable,
    symbol,
)
from .oracle import build_dense, theta_dense

__all__ = ["ExperimentConfig", "main"]

CSV_HEADER = "experiment,coordinate,value,bound,method,imag_residual"


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one experiment run."""

    kappa1: float = 12.2676
    kappa2: float = 3.0628
    scheme: WeightingScheme = WeightingScheme.CONSTANT
    blocks: tuple = (16, 32, 64, 128, 256, 512, 1024)
    atoms: int | None = None
    quad_nodes: int = 2048
    tmin: float = 0.0
    tmax: float = 200.0
    tsteps: int = 2001
    jmax: int = 30
    # block size for single-M experiments; commands fill their own
    # defaults (spatial-decay 32, time-decay 100) when left unset
    M: int | None = None
    out: str = "-"
    seed: int = 2024
    fast: bool = False
    gnuplot: bool = False

    @property
    def fc(self) -> ForceConstants:
        return ForceConstants(self.kappa1, self.kappa2)


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _parse_blocks(text: str) -> tuple:
    """Parse a block-size list: comma-separated or a ``2^a..2^b`` range."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            a = int(lo.split("^")[1]) if "^" in lo else int(np.log2(int(lo)))
            b = int(hi.split("^")[1]) if "^" in hi else int(np.log2(int(hi)))
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"cannot parse block range {text!r}") from exc
        if b < a:
            raise ConfigError(f"empty block range {text!r}")
        return tuple(2**k for k in range(a, b + 1))
    try:
        blocks = tuple(int(s) for s in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse block list {text!r}") from exc
    if any(m < 2 for m in blocks) or list(blocks) != sorted(blocks):
        raise ConfigError("block sizes must be ascending and >= 2")
    return blocks


def _read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; later keys win."""
    out: dict = {}
    try:
        with open(path) as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
                key, val = (s.strip() for s in line.split("=", 1))
                out[key] = val
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


_CONFIG_KEYS = {
    "kappa1": float,
    "kappa2": float,
    "scheme": str,
    "blocks": str,
    "atoms": int,
    "quad_nodes": int,
    "tmin": float,
    "tmax": float,
    "tsteps": int,
    "jmax": int,
    "M": int,
    "out": str,
    "seed": int,
    "fast": lambda s: s.lower() in ("1", "true", "yes"),
}


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    updates: dict = {}
    if getattr(args, "config", None):
        raw = _read_config_file(args.config)
        for key, val in raw.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                updates[key] = _CONFIG_KEYS[key](val)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {val!r}") from exc
    # command-line flags win over the file
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None and not (key == "fast" and flag is False):
            updates[key] = flag
    if getattr(args, "gnuplot", False):
        updates["gnuplot"] = True
    if "scheme" in updates and isinstance(updates["scheme"], str):
        try:
            updates["scheme"] = WeightingScheme(updates["scheme"])
        except ValueError as exc:
            raise ConfigError(f"unknown scheme {updates['scheme']!r}") from exc
    if "blocks" in updates and isinstance(updates["blocks"], str):
        updates["blocks"] = _parse_blocks(updates["blocks"])
    cfg = replace(cfg, **updates)
    if cfg.fast:
        cfg = replace(
            cfg,
            quad_nodes=max(2, cfg.quad_nodes // 2),
            tsteps=max(2, cfg.tsteps // 2),
        )
    try:
        require_stable(cfg.fc)
    except StabilityError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.quad_nodes < 2:
        raise ConfigError("quad_nodes must be >= 2")
    if not (cfg.tmax > cfg.tmin >= 0.0):
        raise ConfigError("need tmax > tmin >= 0")
    if cfg.tsteps < 2:
        raise ConfigError("tsteps must be >= 2")
    if cfg.gnuplot and cfg.out == "-":
        raise ConfigError("--gnuplot needs --out FILE (a script must reference a file)")
    return cfg


def _apply_thread_cap() -> object:
    """Honor GLE_MEMLAB_THREADS by capping the BLAS/LAPACK pools."""
    raw = os.environ.get("GLE_MEMLAB_THREADS")
    if not raw:
        return None
    try:
        n = max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"GLE_MEMLAB_THREADS must be an integer, got {raw!r}") from exc
    import threadpoolctl

    return threadpoolctl.threadpool_limits(limits=n)


def _emit(cfg: ExperimentConfig, rows: list, name: str) -> None:
    lines = [CSV_HEADER] + [",".join(r) for r in rows]
    text = "\n".join(lines) + "\n"
    if cfg.out == "-":
        sys.stdout.write(text)
        return
    with open(cfg.out, "w") as fh:
        fh.write(text)
    if cfg.gnuplot:
        _write_gnuplot(cfg, name)


def _write_gnuplot(cfg: ExperimentConfig, name: str) -> None:
    logscale = {
        "blocksize-study": "set logscale xy",
        "spatial-decay": "set logscale y",
        "time-decay": "",
    }[name]
    xlabel = {
        "blocksize-study": "block size M",
        "spatial-decay": "block offset J",
        "time-decay": "t",
    }[name]
    script = "\n".join(
        [
            "set datafile separator ','",
            logscale,
            f"set xlabel '{xlabel}'",
            "set ylabel 'kernel value'",
            "set key off",
            # skip header and footer rows: plot only rows whose experiment
            # field matches the data id exactly
            f"plot '{cfg.out}' using 2:(strcol(1) eq '{name}' ? abs($3) : NaN) with linespoints",
            "pause -1",
        ]
    )
    with open(cfg.out + ".gp", "w") as fh:
        fh.write(script + "\n")


def cmd_blocksize_study(cfg: ExperimentConfig) -> int:
    """Theta_{0,0}(0) vs M with bounds, optional dense check, and a fit."""
    grid = midpoint_grid(cfg.quad_nodes)
    bound_fn = (
        bound_constant if cfg.scheme is WeightingScheme.CONSTANT else bound_linear
    )
    rows = []
    vals = []
    for M in cfg.blocks:
        val = theta00_zero_simplified(cfg.scheme, cfg.fc, M, grid)
        vals.append(val)
        rows.append(
            (
                "blocksize-study",
                _fmt(M),
                _fmt(val),
                _fmt(bound_fn(cfg.fc, M)),
                "spectral",
                _fmt(0.0),
            )
        )
        if cfg.atoms is not None and cfg.atoms % M == 0 and cfg.atoms >= 4 * M:
            chain = build_dense(cfg.fc, cfg.atoms, M, cfg.scheme)
            dval = theta_dense(chain, 0, 0.0)
            rows.append(
                (
                    "blocksize-study",
                    _fmt(M),
                    _fmt(dval),
                    _fmt(bound_fn(cfg.fc, M)),
                    "dense",
                    _fmt(0.0),
                )
            )
    if len(cfg.blocks) >= 2:
        slope = np.polyfit(
            np.log(np.array(cfg.blocks, float)), np.log(np.abs(vals)), 1
        )[0]
        rows.append(
            ("blocksize-study:fit-exponent", "", _fmt(slope), "", "spectral", _fmt(0.0))
        )
    _emit(cfg, rows, "blocksize-study")
    return 0


def cmd_spatial_decay(cfg: ExperimentConfig) -> int:
    """Theta_{0,J}(0) vs J with the diagonal bound and a log-linear rate."""
    if cfg.jmax < 8:
        raise ConfigError("spatial decay needs jmax >= 8")
    M = cfg.M if cfg.M is not None else 32
    grid = midpoint_grid(cfg.quad_nodes)
    series = theta_spatial_series(cfg.scheme, cfg.fc, M, cfg.jmax, grid)
    diag = series.values[0]
    rows = [
        (
            "spatial-decay",
            _fmt(J),
            _fmt(v),
            _fmt(diag),
            "spectral",
            _fmt(series.max_imag_residual),
        )
        for J, v in zip(series.coordinates, series.values)
    ]
    # J >= 1: drop only the diagonal so jmax = 8 still leaves 8 samples
    window = slice(1, cfg.jmax + 1)
    sub = KernelSeries(
        scheme=series.scheme,
        M=series.M,
        axis="space",
        coordinates=series.coordinates[window],
        values=series.values[window],
        quad_nodes=series.quad_nodes,
        max_imag_residual=series.max_imag_residual,
    )
    fit = fit_decay_rate(sub, "loglinear")
    rows.append(
        ("spatial-decay:loglinear-rate", "", _fmt(fit.exponent), "", "spectral", _fmt(0.0))
    )
    _emit(cfg, rows, "spatial-decay")
    return 0


def cmd_time_decay(cfg: ExperimentConfig) -> int:
    """Theta_{0,0}(t) samples with envelope fit and branch prefactors."""
    M = cfg.M if cfg.M is not None else 100
    t_grid = np.linspace(cfg.tmin, cfg.tmax, cfg.tsteps)
    grid = midpoint_grid(cfg.quad_nodes)
    series = theta_time_series(cfg.scheme, cfg.fc, M, t_grid, grid)
    rows = [
        ("time-decay", _fmt(t), _fmt(v), "", "spectral", _fmt(0.0))
        for t, v in zip(series.coordinates, series.values)
    ]
    mask = series.coordinates >= max(cfg.tmin, 0.1 * cfg.tmax)
    sub = KernelSeries(
        scheme=series.scheme,
        M=series.M,
        axis="time",
        coordinates=series.coordinates[mask],
        values=series.values[mask],
        quad_nodes=series.quad_nodes,
        max_imag_residual=series.max_imag_residual,
    )
    fit = fit_decay_rate(sub, "loglog_envelope")
    rows.append(
        ("time-decay:envelope-exponent", "", _fmt(fit.exponent), "", "spectral", _fmt(0.0))
    )
    if cfg.scheme is WeightingScheme.CONSTANT:
        caps = branch_amplitude_caps(cfg.fc, M)
        for j in np.argsort(caps)[::-1][:3]:
            # amplitude = prefactor * t^{-1/2}; report the prefactor
            pref = stationary_phase_estimate(cfg.fc, M, int(j), 1.0)
            rows.append(
                (
                    f"time-decay:sp-prefactor-branch-{int(j)}",
                    "",
                    _fmt(pref),
                    _fmt(caps[j]),
                    "spectral",
                    _fmt(0.0),
                )
            )
    _emit(cfg, rows, "time-decay")
    return 0


def _validate_suites(cfg: ExperimentConfig):
    """Yield (suite name, callable) pairs; callables raise AssertionError."""
    half = 2 if cfg.fast else 1
    fcs = [ForceConstants(12.2676, 3.0628), ForceConstants(12.2676, -3.0)]
    rng = np.random.default_rng(cfg.seed)

    def hermitian_psd():
        xi_grid = np.linspace(0, 2 * np.pi, 1024 // half + 2)[1:-1]
        for fc in fcs:
            for M in (4, 8):
                for xi in xi_grid[:: 8 * half]:
                    A = symbol(fc, M, xi).entries
                    assert np.linalg.norm(A - A.conj().T) <= 1e-12 * np.linalg.norm(A)
                    assert np.linalg.eigvalsh(A).min() >= -1e-10

    def analytic_eigs():
        for fc in fcs:
            for M in (2, 3, 5, 8):
                for xi in rng.uniform(0.01, 2 * np.pi - 0.01, 8 // half):
                    A = symbol(fc, M, xi).entries
                    lams, vecs = analytic_eigenpairs(fc, M, xi)
                    res = np.linalg.norm(A @ vecs - vecs * lams)
                    assert res <= 1e-12 * max(np.abs(lams).max(), 1.0)

    def basis_invariance():
        grid = midpoint_grid(256 // half)
        for fc in fcs:
            M = 6
            base_c = theta_entry(WeightingScheme.CONSTANT, fc, M, 0, 0.0, grid)
            rb = randomized_constant_basis(M, rng)
            alt_c = theta_entry(WeightingScheme.CONSTANT, fc, M, 0, 0.0, grid, rb)
            assert abs(base_c - alt_c) <= 1e-10
            base_l = theta_entry(WeightingScheme.LINEAR, fc, M, 0, 0.0, grid)
            lb = randomized_linear_basis(M, rng)
            alt_l = theta_entry(WeightingScheme.LINEAR, fc, M, 0, 0.0, grid, lb)
            assert abs(base_l - alt_l) <= 1e-10

    def completeness():
        for M in (2, 4, 8, 16):
            lb = linear_basis(M)
            for xi in np.linspace(0.1, 2 * np.pi - 0.1, 32 // half):
                pair = cg_symbols(WeightingScheme.LINEAR, M, xi, lb)
                full = np.hstack([pair.phi0, pair.psi0])
                smin = np.linalg.svd(full, compute_uv=False)[-1]
                assert smin > 1e-10

    def oracle_equivalence():
        grid = midpoint_grid(cfg.quad_nodes)
        for scheme in WeightingScheme:
            chain = build_dense(fcs[0], 256, 4, scheme)
            for t in (0.0, 1.0):
                dval = theta_dense(chain, 0, t)
                sval = theta_entry(scheme, fcs[0], 4, 0, t, grid)
                assert abs(dval - sval) <= 1e-8
        desk = theta00_zero_simplified(
            WeightingScheme.CONSTANT, ForceConstants(1.0, 0.0), 2, grid
        )
        assert abs(desk - (3.0 - 2.0 * np.sqrt(2.0))) <= 1e-6

    def interlacing_simplicity():
        for fc in fcs:
            for M in (5, 9) if cfg.fast else (5, 9, 16, 32):
                br = eigen_branches(fc, M, grid_size=128 // half)
                assert br.min_gap > 0.0

    def char_poly_roots():
        from .kernel import _node_modes

        for fc in fcs:
            for xi in (0.7, 1.9, 4.1):
                mu2, _, _ = _node_modes(WeightingScheme.CONSTANT, fc, 6, xi, None)
                for mu in mu2:
                    assert char_poly_residual(mu, fc, 6, xi) <= 1e-8

    def bounds():
        grid = midpoint_grid(cfg.quad_nodes)
        for fc in fcs:
            for M in (8, 32, 128):
                vc = theta00_zero_simplified(WeightingScheme.CONSTANT, fc, M, grid)
                assert 0.0 <= vc <= bound_constant(fc, M) + 1e-12
                vl = theta00_zero_simplified(WeightingScheme.LINEAR, fc, M, grid)
                assert 0.0 <= vl <= bound_linear(fc, M) + 1e-12

    return [
        ("hermitian-psd", hermitian_psd),
        ("analytic-eigenpairs", analytic_eigs),
        ("basis-invariance", basis_invariance),
        ("completeness", completeness),
        ("oracle-equivalence", oracle_equivalence),
        ("interlacing-simplicity", interlacing_simplicity),
        ("char-poly-roots", char_poly_roots),
        ("bounds", bounds),
    ]


def cmd_validate(cfg: ExperimentConfig) -> int:
    """Run the invariant suites; exit 0 iff all pass."""
    failed = []
    for name, suite in _validate_suites(cfg):
        try:
            suite()
        except AssertionError as exc:
            failed.append(name)
            print(f"FAIL {name}: {exc or 'assertion failed'}")
        except Exception as exc:  # noqa: BLE001 - report, keep running suites
            failed.append(name)
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"PASS {name}")
    if failed:
        print(f"{len(failed)} suite(s) failed: {', '.join(failed)}")
        return 1
    print("all suites passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gle-memlab",
        description="Memory-kernel experiments for a coarse-grained harmonic chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("blocksize-study", "Theta_{0,0}(0) against block size M"),
        ("spatial-decay", "Theta_{0,J}(0) against block offset J"),
        ("time-decay", "Theta_{0,0}(t) against time"),
        ("validate", "run the cross-module invariant suites"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--kappa1", type=float, default=None)
        p.add_argument("--kappa2", type=float, default=None)
        p.add_argument("--scheme", choices=[s.value for s in WeightingScheme], default=None)
        p.add_argument(
            "--blocks", default=None, help="comma list or range, e.g. 2^4..2^10"
        )
        p.add_argument("--atoms", type=int, default=None, help="dense-oracle chain size")
        p.add_argument("--quad-nodes", dest="quad_nodes", type=int, default=None)
        p.add_argument("--tmin", type=float, default=None)
        p.add_argument("--tmax", type=float, default=None)
        p.add_argument("--tsteps", type=int, default=None)
        p.add_argument("--jmax", type=int, default=None)
        p.add_argument("-M", "--block-size", dest="M", type=int, default=None)
        p.add_argument("--out", default=None, help="output CSV path, '-' for stdout")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--fast", action="store_true", default=False)
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument(
            "--gnuplot",
            action="store_true",
            default=False,
            help="also write a companion gnuplot script next to the CSV",
        )
    return parser


_COMMANDS = {
    "blocksize-study": cmd_blocksize_study,
    "spatial-decay": cmd_spatial_decay,
    "time-decay": cmd_time_decay,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        limiter = _apply_thread_cap()
        try:
            return _COMMANDS[args.command](cfg)
        finally:
            if limiter is not None:
                limiter.unregister()
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
