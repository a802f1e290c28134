"""Command-line front end: Wigner slices and grids, photon statistics and
the acceptance report.

Exit codes: 0 success, 1 usage error, 2 computation error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .fock import squeezed_fock_generating, squeezed_fock_wigner
from .gaussian import DivergenceError, extract_polygaussian
from .jets import JetSpace
from .states import STATE_KINDS, SqueezeParams, StateSpec, StateValidationError, make_state
from .statistics import (
    distribution,
    formal_subtracted_distribution,
    heralded_subtracted_distribution,
    npnr_distribution,
)
from .subtraction import SubtractionError, subtract

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3
METHODS = ("formal", "heralded", "npnr", "squeezed-fock")
DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    state: StateSpec
    method: str = "formal"
    n: int = 0
    zeta: float = 0.2
    axis: str = "q"
    lo: float = -4.0
    hi: float = 4.0
    step: float = 0.05
    fmt: str = "csv"
    oracle: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"method: must be one of {METHODS}, got {self.method!r}")
        if self.n < 0:
            raise UsageError(f"subtract: must be >= 0, got {self.n}")
        if not 0 < self.zeta < 1:
            raise UsageError(f"zeta: must lie in (0, 1), got {self.zeta}")
        if self.axis not in ("q", "p"):
            raise UsageError(f"axis: must be 'q' or 'p', got {self.axis!r}")
        if not all(math.isfinite(v) for v in (self.lo, self.hi, self.step)):
            raise UsageError("range: bounds and step must be finite")
        if self.step <= 0 or self.hi < self.lo:
            raise UsageError(f"range: need lo <= hi and step > 0, got {self.lo}:{self.hi}:{self.step}")
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format: must be csv or json, got {self.fmt!r}")

    def coordinates(self) -> np.ndarray:
        return np.round(np.arange(self.lo, self.hi + self.step / 2, self.step), 12)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["state"] = self.state.to_dict()
        return d


def _fmt(x) -> str:
    return f"{float(x):.{DIGITS}g}"


def parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range: expected lo:hi:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"range: expected numbers in lo:hi:step, got {text!r}") from None


def _config_from_args(args) -> RunConfig:
    try:
        spec = StateSpec(args.state, args.mean_n, args.purity, args.transmission, args.phi)
    except StateValidationError as exc:
        raise UsageError(f"state: {exc}") from None
    lo, hi, step = parse_range(args.range)
    return RunConfig(spec, args.method, args.subtract, args.zeta, args.axis, lo, hi, step, args.format, args.oracle)


# -- computations -----------------------------------------------------------


def _points(cfg: RunConfig, coord: np.ndarray, other: float = 0.0) -> np.ndarray:
    if cfg.axis == "q":
        return (coord + 1j * other) / math.sqrt(2.0)
    return (other + 1j * coord) / math.sqrt(2.0)


def _squeeze(cfg: RunConfig) -> SqueezeParams:
    return SqueezeParams.from_mean_n(cfg.state.mean_n, cfg.state.phi)


def _wigner(cfg: RunConfig, n: int, alpha: np.ndarray) -> np.ndarray:
    if cfg.method == "squeezed-fock":
        return squeezed_fock_wigner(n, _squeeze(cfg), alpha)
    state = make_state(cfg.state)
    if cfg.method == "formal":
        return subtract(state, n, "formal")(alpha)
    if cfg.method == "heralded":
        return subtract(state, n, "heralded", cfg.zeta)(alpha)
    return subtract(state, 1, "npnr", cfg.zeta)(alpha)


def _indices(cfg: RunConfig) -> list[int]:
    return [1] if cfg.method == "npnr" else list(range(cfg.n + 1))


def _input_dm(cfg: RunConfig) -> np.ndarray:
    spec = cfg.state
    if cfg.method == "squeezed-fock":
        return oracle.squeeze_dm(oracle.fock_dm(0), _squeeze(cfg).xi)
    if spec.kind == "lossy_squeezed":
        pure = oracle.squeeze_dm(oracle.fock_dm(0), SqueezeParams.from_mean_n(spec.mean_n, spec.phi).xi)
        return oracle.loss_channel(pure, spec.transmission)
    rho = oracle.thermal_dm(spec.T)
    if spec.kind in ("squeezed_vacuum", "squeezed_thermal"):
        rho = oracle.squeeze_dm(rho, SqueezeParams.from_mean_n(spec.mean_n, spec.phi).xi)
    return rho


def _oracle_states(cfg: RunConfig, indices: list[int]) -> list[np.ndarray]:
    if cfg.method == "squeezed-fock":
        xi = _squeeze(cfg).xi
        return [oracle.squeeze_dm(oracle.fock_dm(n), xi) for n in indices]
    rho = _input_dm(cfg)
    if cfg.method == "formal":
        return [oracle.annihilate(rho, n) for n in indices]
    states, probs = oracle.herald_distribution(rho, cfg.zeta)
    if cfg.method == "npnr":
        return [states[1:].sum(axis=0) / probs[1:].sum()]
    return [states[n] / probs[n] for n in indices]


def _distribution(cfg: RunConfig):
    if cfg.method == "squeezed-fock":
        form = squeezed_fock_generating(_squeeze(cfg), JetSpace.build({"nu": cfg.n}))
        return distribution(extract_polygaussian(form, (cfg.n,)).scaled(1.0 / math.factorial(cfg.n)))
    state = make_state(cfg.state)
    if cfg.method == "formal":
        return formal_subtracted_distribution(state, cfg.n)
    if cfg.method == "heralded":
        return heralded_subtracted_distribution(state, cfg.zeta, cfg.n)
    return npnr_distribution(state, cfg.zeta)


# -- commands ---------------------------------------------------------------


def cmd_slice(cfg: RunConfig) -> dict:
    coord = cfg.coordinates()
    alpha = _points(cfg, coord)
    indices = _indices(cfg)
    columns = {"n": [], cfg.axis: [], "W": []}
    if cfg.oracle:
        refs = oracle.wigner_from_dm(_oracle_states(cfg, indices), alpha)
        columns["W_oracle"] = []
    for i, n in enumerate(indices):
        w = np.broadcast_to(_wigner(cfg, n, alpha), coord.shape)
        columns["n"].extend([n] * coord.size)
        columns[cfg.axis].extend(coord.tolist())
        columns["W"].extend(w.tolist())
        if cfg.oracle:
            columns["W_oracle"].extend(refs[i].tolist())
    return {"columns": columns}


def cmd_grid(cfg: RunConfig) -> dict:
    coord = cfg.coordinates()
    q, p = np.meshgrid(coord, coord, indexing="ij")
    alpha = (q + 1j * p) / math.sqrt(2.0)
    n = _indices(cfg)[-1]
    w = _wigner(cfg, n, alpha)
    columns = {"q": q.ravel().tolist(), "p": p.ravel().tolist(), "W": np.ravel(w).tolist()}
    if cfg.oracle:
        columns["W_oracle"] = np.ravel(oracle.wigner_from_dm(_oracle_states(cfg, [n])[0], alpha)).tolist()
    return {"columns": columns, "shape": [coord.size, coord.size], "n": n}


def cmd_stats(cfg: RunConfig) -> dict:
    dist = _distribution(cfg)
    columns = {"n": list(range(dist.probs.size)), "P(n)": dist.probs.tolist()}
    summary = {"mean": dist.mean, "variance": dist.variance}
    if cfg.oracle:
        idx = _indices(cfg)[-1]
        ref = oracle.photon_dist_dm(_oracle_states(cfg, [idx])[0])
        columns["P_oracle(n)"] = ref.probs[: dist.probs.size].tolist()
        summary["max_abs_diff"] = float(np.abs(dist.probs - ref.probs[: dist.probs.size]).max())
        summary["oracle_mean"] = ref.mean
    return {"columns": columns, "summary": summary}


def metadata(cfg: RunConfig, command: str) -> dict:
    T, A, B = cfg.state.squeezed_thermal_parameters()
    return {
        "command": command,
        "A": float(A),
        "B": [float(complex(B).real), float(complex(B).imag)],
        "T": float(T),
        "config": cfg.to_dict(),
    }


def render(table: dict, cfg: RunConfig, command: str) -> str:
    cols = table["columns"]
    if cfg.fmt == "json":
        payload = {"metadata": metadata(cfg, command), **table}
        if command == "grid":
            size = table["shape"]
            payload["columns"] = {k: np.asarray(v).reshape(size).tolist() for k, v in cols.items()}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    names = list(cols)
    lines = [",".join(names)]
    for row in zip(*(cols[k] for k in names)):
        lines.append(",".join(str(v) if isinstance(v, int) else _fmt(v) for v in row))
    for key, value in table.get("summary", {}).items():
        lines.append(f"# {key}={_fmt(value)}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# -- argument parsing -------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys set defaults for the flags below")
    p.add_argument("--state", default="squeezed_vacuum", choices=STATE_KINDS)
    p.add_argument("--mean-n", type=float, default=1.0, help="mean photon number fixing the squeezing (default 1)")
    p.add_argument("--purity", type=float, default=1.0, help="purity T of thermal families")
    p.add_argument("--transmission", type=float, default=1.0, help="transmission t for lossy_squeezed")
    p.add_argument("--phi", type=float, default=0.0, help="squeezing phase")
    p.add_argument("--method", default="formal", choices=METHODS)
    p.add_argument("--subtract", type=int, default=0, help="number of subtracted photons (or Fock index)")
    p.add_argument("--zeta", type=float, default=0.2, help="beam-splitter reflectivity for heralding")
    p.add_argument("--axis", default="q", choices=("q", "p"), help="coordinate varied along the slice")
    p.add_argument("--range", default="-4:4:0.05", help="lo:hi:step")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--oracle", action="store_true", help="add a Fock-basis reference column")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phasegen", description="Wigner functions of photon-subtracted Gaussian states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("slice", "W along one quadrature axis for n = 0..N"),
        ("grid", "W on a square (q, p) grid for n = N"),
        ("stats", "photon-number distribution, mean and variance"),
    ):
        _common(sub.add_parser(name, help=text))
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--fast", action="store_true", help="skip checks that need the two-mode oracle")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str], args) -> argparse.Namespace:
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config: cannot read {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config: top level must be an object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise UsageError(f"config: unknown field {key!r}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _join_range(argv: list[str]) -> list[str]:
    # "--range -4:4:0.05" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


COMMANDS = {"slice": cmd_slice, "grid": cmd_grid, "stats": cmd_stats}


def main(argv: list[str] | None = None) -> int:
    argv = _join_range(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    if args.command == "verify":
        from .verify import format_report, run_suite

        results = run_suite(fast=args.fast)
        print(format_report(results))
        return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY

    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        cfg = _config_from_args(args)
    except UsageError as exc:
        sys.stderr.write(f"phasegen: usage error: {exc}\n")
        return EXIT_USAGE

    try:
        table = COMMANDS[args.command](cfg)
    except (ArithmeticError, DivergenceError, SubtractionError, oracle.OracleTruncationError, ValueError) as exc:
        sys.stderr.write(f"phasegen {args.command}: computation error ({type(exc).__name__}): {exc}\n")
        return EXIT_COMPUTE
    _emit(render(table, cfg, args.command), args.out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
