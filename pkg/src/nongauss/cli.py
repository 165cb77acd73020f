"""Command-line driver: measures, sweeps, and oracle comparison.

Exit codes: 0 success, 2 bad configuration, 3 numerical gate (leakage,
spectrum, cutoff), 4 memory guard, 5 oracle tolerance breach.

Output formats: CSV carries one comment line ``#schema=1`` followed by the
fixed header; JSON-lines carries one record per row with the same keys.
Every record embeds the provenance needed to reproduce it (cutoff,
leakage, quadrature order, seed).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

import numpy as np

from . import channels, conv, measures, oracles, protocol
from .errors import ConfigError, MemoryGuardError, NumericalGateError

CSV_HEADER = ("state_param", "noise_param", "measure", "value",
              "leakage", "cutoff", "quad_order", "seed")
SCHEMA_COMMENT = "#schema=1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GATE = 3
EXIT_MEMORY = 4
EXIT_TOLERANCE = 5


@dataclass(frozen=True)
class RunConfig:
    """Parsed command configuration; round-trips through key=value text."""

    command: str = "measure"
    state: str = "fock:0"
    measure: str = "nge:2:1"
    cutoff: str = "auto"
    gamma: float = 0.0
    eps: float = 0.0
    values: str = ""
    noise_grid: str = ""
    noise_kind: str = "eps"
    out: str = ""
    fmt: str = "csv"
    seed: int = 0
    quad_order: int = channels.DEFAULT_QUAD_ORDER
    only: str = ""
    tol: float = 1e-6

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"config line {lineno} is not 'key = value': {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise ConfigError(f"unknown config key {key!r} on line {lineno}")
            kwargs[key] = value
        return cls(**_coerce_fields(cls, kwargs))


def _coerce_fields(cls, kwargs: dict) -> dict:
    out = {}
    for f in fields(cls):
        if f.name not in kwargs:
            continue
        raw = kwargs[f.name]
        if f.type in ("float", float):
            out[f.name] = float(raw)
        elif f.type in ("int", int):
            out[f.name] = int(raw)
        else:
            out[f.name] = str(raw)
    return out


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_state(spec: str):
    """'fock:2' | 'coherent:1.2' | 'cat:+:1.5' -> (family, value, sign)."""
    parts = spec.split(":")
    if parts[0] == "fock" and len(parts) == 2:
        return "fock", int(parts[1]), +1
    if parts[0] == "coherent" and len(parts) == 2:
        return "coherent", complex(parts[1]) if "j" in parts[1] else float(parts[1]), +1
    if parts[0] == "cat" and len(parts) == 3:
        sign = {"+": +1, "-": -1}.get(parts[1])
        if sign is None:
            raise ConfigError(f"cat sign must be + or -, got {parts[1]!r}")
        return "cat", float(parts[2]), sign
    raise ConfigError(f"cannot parse state {spec!r}")


def parse_measure(spec: str):
    """'nge:2:1' | 'ming:1' | 'dF' | 'parity' | 'zero-mean-parity'."""
    parts = spec.split(":")
    name = parts[0]
    if name == "nge":
        if len(parts) != 3:
            raise ConfigError("nge selector is nge:<alpha>:<k>")
        return "nge", float(parts[1]), int(parts[2])
    if name == "ming":
        if len(parts) != 2:
            raise ConfigError("ming selector is ming:<alpha>")
        return "ming", float(parts[1]), None
    if name in ("dF", "parity", "zero-mean-parity") and len(parts) == 1:
        return name, None, None
    raise ConfigError(f"cannot parse measure {spec!r}")


def parse_grid(spec: str):
    """Comma list '0,0.25,0.5' or range 'a:b' (ints) or 'a:b:step' (floats)."""
    spec = spec.strip()
    if not spec:
        return []
    if ":" in spec and "," not in spec:
        parts = spec.split(":")
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            return list(range(lo, hi + 1))
        if len(parts) == 3:
            lo, hi, step = (float(p) for p in parts)
            count = int(round((hi - lo) / step)) + 1
            return [lo + i * step for i in range(count) if lo + i * step <= hi + 1e-12]
        raise ConfigError(f"cannot parse grid {spec!r}")
    vals = []
    for tok in spec.split(","):
        tok = tok.strip()
        vals.append(int(tok) if tok.lstrip("+-").isdigit() else float(tok))
    return vals


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)  # normalizes -0.0
    return str(v)


def _write_rows(rows, out_path: str, fmt: str) -> None:
    if fmt == "csv":
        lines = [SCHEMA_COMMENT, ",".join(CSV_HEADER)]
        for row in rows:
            lines.append(",".join(_fmt(row[k]) for k in CSV_HEADER))
        text = "\n".join(lines) + "\n"
    elif fmt == "jsonl":
        text = "".join(json.dumps({k: row[k] for k in CSV_HEADER}, sort_keys=False)
                       + "\n" for row in rows)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_measure(cfg: RunConfig) -> int:
    family, value, sign = parse_state(cfg.state)
    name, alpha, k = parse_measure(cfg.measure)
    psi = protocol.build_state(family, value, None if cfg.cutoff == "auto" else int(cfg.cutoff),
                               sign)
    state = psi
    if cfg.gamma > 0.0:
        state = channels.loss_channel(cfg.gamma).apply(psi)
    diagnostics = {}
    if name == "nge":
        if cfg.gamma > 0.0:
            raise ConfigError("nge takes pure states; gamma must be 0")
        if cfg.eps > 0.0:
            if (alpha, k) != (2.0, 1):
                raise ConfigError("noisy circuit estimates nge:2:1 only")
            par = protocol.run_nge21_protocol(psi, protocol.NoiseConfig.uniform(
                cfg.eps, cfg.quad_order))
            value_out = -math.log2(par) if par > 0 else math.inf
        else:
            rep = measures.nge(state, alpha, k)
            value_out, diagnostics = rep.value, rep.diagnostics
    elif name == "ming":
        rep = measures.ming(state, alpha)
        value_out, diagnostics = rep.value, rep.diagnostics
    elif name == "dF":
        rep = measures.d_frobenius(state)
        value_out, diagnostics = rep.value, rep.diagnostics
    elif name == "parity":
        noise = protocol.NoiseConfig.uniform(cfg.eps, cfg.quad_order)
        value_out = protocol.run_nge21_protocol(psi, noise)
    elif name == "zero-mean-parity":
        noise = protocol.NoiseConfig.uniform(cfg.eps, cfg.quad_order)
        value_out = protocol.run_zero_mean_protocol(psi, noise)
    else:
        raise ConfigError(f"unknown measure {name!r}")
    record = {
        "state": cfg.state,
        "measure": cfg.measure,
        "value": value_out,
        "gamma": cfg.gamma,
        "eps": cfg.eps,
        "cutoff": psi.spec.cutoffs[0],
        "leakage": state.leakage,
        "quad_order": cfg.quad_order,
        "seed": cfg.seed,
        "diagnostics": {key: _jsonable(val) for key, val in diagnostics.items()},
    }
    text = json.dumps(record) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def cmd_sweep(cfg: RunConfig) -> int:
    family, _, sign = parse_state(cfg.state)
    name, alpha, k = parse_measure(cfg.measure)
    values = parse_grid(cfg.values)
    levels = parse_grid(cfg.noise_grid)
    if not levels:
        levels = [0.0]
    rows = protocol.sweep(
        family, values, name, levels, noise_kind=cfg.noise_kind, sign=sign,
        alpha=alpha if alpha is not None else 2.0, k=k if k is not None else 1,
        cutoff=None if cfg.cutoff == "auto" else int(cfg.cutoff),
        quad_order=cfg.quad_order, seed=cfg.seed)
    _write_rows(rows, cfg.out, cfg.fmt)
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    checks = []
    wanted = cfg.only or "all"
    cutoff = None if cfg.cutoff == "auto" else int(cfg.cutoff)

    if wanted in ("all", "fock"):
        worst = 0.0
        for n in range(0, 7):
            psi = protocol.build_state("fock", n, cutoff)
            sim = measures.nge(psi, 2.0, 1).value
            ref = oracles.nge_fock_closed_form(n, 2.0)
            worst = max(worst, abs(sim - ref))
            diag = np.real(np.diagonal(conv.boxplus(psi, psi).matrix))
            worst = max(worst, float(np.abs(diag - oracles.fock_selfconv_diagonal(n)).max()))
        checks.append(("fock", worst, cfg.tol))

    if wanted in ("all", "lossy-fock"):
        worst = 0.0
        for n in range(0, 5):
            for gamma in (0.1, 0.3, 0.6):
                psi = protocol.build_state("fock", n, cutoff)
                rho = channels.loss_channel(gamma).apply(psi)
                sim = measures.ming(rho, 1.0).value
                worst = max(worst, abs(sim - oracles.ming_lossy_fock(n, gamma)))
        checks.append(("lossy-fock", worst, cfg.tol))

    if wanted in ("all", "cat"):
        worst = 0.0
        for z in (0.5, 1.0, 2.0):
            for gamma in (0.0, 0.25, 0.5, 0.75):
                psi = protocol.build_state("cat", z, cutoff)
                rho = channels.loss_channel(gamma).apply(psi)
                worst = max(worst, abs(measures.ming(rho, 1.0).value
                                       - oracles.ming_lossy_cat(z, gamma)))
                worst = max(worst, abs(measures.d_frobenius(rho).value
                                       - oracles.df_lossy_cat(z, gamma)))
        checks.append(("cat", worst, cfg.tol))

    if wanted in ("all", "wigner"):
        worst = 0.0
        for n in range(1, 9):
            block = oracles.wigner_small_d(Fraction(n, 2), math.pi / 4.0)
            bs = conv.beamsplitter_unitary(math.pi / 4.0, n + 1, n + 1)
            worst = max(worst, float(np.abs(bs.blocks[n] - block.matrix).max()))
        checks.append(("wigner", worst, 1e-10))

    if not checks:
        raise ConfigError(f"unknown oracle-check family {cfg.only!r}")
    status = EXIT_OK
    for name, worst, tol in checks:
        ok = worst <= tol
        print(f"{name}: max |delta| = {worst:.3e} (tol {tol:g}) "
              f"{'ok' if ok else 'BREACH'}")
        if not ok:
            status = EXIT_TOLERANCE
    return status


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nongauss",
        description="Bosonic non-Gaussianity measures and measurement circuits")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--state", default=None,
                       help="fock:<n> | coherent:<z> | cat:<+|->:<z>")
        p.add_argument("--cutoff", default=None, help="auto or an explicit integer")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--quad-order", type=int, default=None, dest="quad_order")
        p.add_argument("--out", default=None, help="output path (stdout if omitted)")

    p_measure = sub.add_parser("measure", help="evaluate one measure on one state")
    add_common(p_measure)
    p_measure.add_argument("--measure", default=None,
                           help="nge:<a>:<k> | ming:<a> | dF | parity | zero-mean-parity")
    p_measure.add_argument("--gamma", type=float, default=None,
                           help="loss applied to the state before measuring")
    p_measure.add_argument("--eps", type=float, default=None,
                           help="uniform circuit noise for parity-type measures")

    p_sweep = sub.add_parser("sweep", help="evaluate a measure over a grid")
    add_common(p_sweep)
    p_sweep.add_argument("--measure", default=None)
    p_sweep.add_argument("--values", default=None,
                         help="state grid: comma list, a:b ints, or a:b:step")
    p_sweep.add_argument("--noise-grid", default=None, dest="noise_grid")
    p_sweep.add_argument("--noise-kind", default=None, dest="noise_kind",
                         choices=("eps", "gamma"))
    p_sweep.add_argument("--format", default=None, dest="fmt", choices=("csv", "jsonl"))

    p_oracle = sub.add_parser("oracle-check", help="compare simulator to closed forms")
    add_common(p_oracle)
    p_oracle.add_argument("--only", default=None,
                          choices=("fock", "lossy-fock", "cat", "wigner"))
    p_oracle.add_argument("--tol", type=float, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = RunConfig.from_text(fh.read())
        cfg = replace(cfg, command=args.command)
    overrides = {}
    for name in ("state", "measure", "cutoff", "gamma", "eps", "values",
                 "noise_grid", "noise_kind", "out", "fmt", "seed",
                 "quad_order", "only", "tol"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    return replace(cfg, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "measure":
            return cmd_measure(cfg)
        if cfg.command == "sweep":
            return cmd_sweep(cfg)
        if cfg.command == "oracle-check":
            return cmd_oracle_check(cfg)
        raise ConfigError(f"unknown command {cfg.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryGuardError as exc:
        print(f"memory guard: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except NumericalGateError as exc:
        print(f"numerical gate: {exc}", file=sys.stderr)
        return EXIT_GATE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
