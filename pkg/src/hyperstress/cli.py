"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a tolerance breach, 2 on bad
input (unreadable or malformed files, invalid parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, suites
from .config import MAX_DEGREE, default_cli_tol, env_tol
from .fields import FieldError, PolyField, field_from_json
from .geometry import GeometryError, canned_parts, load_part
from .tensor import Tensor3Sym, TensorError

log = logging.getLogger("hyperstress")

EXIT_OK, EXIT_BREACH, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    parts: list[str] = field(default_factory=list)
    fields: str | None = None
    seed: int = 42
    degree: int = 2
    samples: int | None = None
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    inject_defect: bool = False
    axis: int = 2

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if not 0 <= self.degree <= MAX_DEGREE - 1:
            raise InputError(f"--degree must lie in [0, {MAX_DEGREE - 1}]")
        if self.samples is not None and self.samples < 1:
            raise InputError("--samples must be at least 1")
        if self.format not in ("json", "csv"):
            raise InputError("--format must be json or csv")

    def to_json(self) -> dict:
        return {"subcommand": self.subcommand, "parts": list(self.parts), "fields": self.fields,
                "seed": self.seed, "degree": self.degree, "samples": self.samples, "tol": self.tol,
                "format": self.format, "inject_defect": self.inject_defect, "axis": self.axis}


# -- input helpers ----------------------------------------------------------------
def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _load_parts(paths):
    if not paths:
        return canned_parts()
    parts = []
    for p in paths:
        try:
            parts.append(load_part(p))
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise InputError(f"{p}: {exc.strerror or exc}") from exc
        except GeometryError as exc:
            raise InputError(f"{p}: {exc}") from exc
    return parts


def _tensor3(raw) -> Tensor3Sym:
    A = np.asarray(raw, dtype=float)
    if A.shape == (3, 6):
        return Tensor3Sym(A)
    return Tensor3Sym.from_full(A)


def _field_spec(cfg: RunConfig):
    """Either explicit ``{"T", "H", "v"}`` PolyField JSON or a random spec."""
    if cfg.fields is None:
        return None, cfg.seed, cfg.degree
    data = _read_json(cfg.fields)
    if not isinstance(data, dict):
        raise InputError(f"{cfg.fields}: expected a JSON object")
    if "random" in data:
        rnd = data["random"]
        return None, int(rnd.get("seed", cfg.seed)), int(rnd.get("degree", cfg.degree))
    try:
        Tf = field_from_json(data["T"])
        Hf = field_from_json(data["H"])
        v = field_from_json(data["v"])
    except KeyError as exc:
        raise InputError(f"{cfg.fields}: missing field {exc}") from exc
    if (Tf.rank, Hf.rank, v.rank) != (2, 3, 1):
        raise InputError(f"{cfg.fields}: fields T, H, v must have ranks 2, 3, 1")
    if not Hf.hyperstress:
        Hf = PolyField(3, Hf.terms, hyperstress=True)
    return (Tf, Hf, v), cfg.seed, cfg.degree


def _constants(cfg: RunConfig) -> dict:
    if cfg.fields is None:
        return {}
    data = _read_json(cfg.fields)
    if not isinstance(data, dict):
        raise InputError(f"{cfg.fields}: expected a JSON object")
    return data


def _effective_tol(cfg: RunConfig):
    """``--tol``, else the environment default, else ``None`` (per-check defaults)."""
    return cfg.tol if cfg.tol is not None else env_tol()


# -- subcommands --------------------------------------------------------------------
def cmd_verify_pvp(cfg: RunConfig):
    parts = _load_parts(cfg.parts)
    explicit, seed, degree = _field_spec(cfg)
    tol = cfg.tol if cfg.tol is not None else default_cli_tol()
    samples = cfg.samples or 5
    seeds = [seed] if explicit is not None else [seed + i for i in range(samples)]
    reports = suites.pvp_battery(parts, seeds, tol, degree=degree, fields=explicit,
                                 inject_defect=cfg.inject_defect)
    passed = all(r.passed for r in reports)
    rows = [{"part": r.part, "seed": r.seed, "internal_power": r.internal_power,
             "external_power": r.external_power, "bulk_term": r.bulk_term,
             "pvp_residual": r.pvp_residual, "tol": r.tol, "passed": r.passed} for r in reports]
    return passed, {"reports": [r.to_json() for r in reports]}, rows


def _checks_result(checks):
    passed = all(c.passed for c in checks)
    rows = [c.to_json() for c in checks]
    return passed, {"checks": rows}, rows


def cmd_reconstruct(cfg: RunConfig):
    data = _constants(cfg)
    tensors = [_tensor3(h) for h in data["H"]] if "H" in data else None
    checks = suites.reconstruct_battery(cfg.seed, samples=cfg.samples or 1000, tol=_effective_tol(cfg),
                                        tensors=tensors, inject_defect=cfg.inject_defect)
    return _checks_result(checks)


def cmd_classify(cfg: RunConfig):
    data = _constants(cfg)
    tensors = [_tensor3(h) for h in data["H"]] if "H" in data else None
    checks = suites.classify_battery(cfg.seed, samples=cfg.samples or 50, tol=_effective_tol(cfg),
                                     tensors=tensors, inject_defect=cfg.inject_defect)
    return _checks_result(checks)


def cmd_invariance(cfg: RunConfig):
    data = _constants(cfg)
    stress = np.asarray(data["T"], dtype=float) if "T" in data else None
    if stress is not None and stress.shape != (3, 3):
        raise InputError("T must be a 3x3 array")
    checks = suites.invariance_battery(cfg.seed, samples=cfg.samples or 500, tol=_effective_tol(cfg),
                                       stress=stress, inject_defect=cfg.inject_defect)
    return _checks_result(checks)


def cmd_nsalpha(cfg: RunConfig):
    data = _constants(cfg)
    g = data.get("g")
    if g is not None and np.asarray(g, dtype=float).shape != (3,):
        raise InputError("g must be a 3-vector")
    checks = suites.nsalpha_battery(cfg.seed, samples=cfg.samples or 100, tol=_effective_tol(cfg),
                                    g=g, inject_defect=cfg.inject_defect)
    return _checks_result(checks)


def cmd_scan(cfg: RunConfig):
    data = _constants(cfg)
    H = _tensor3(data["H"][0]) if "H" in data else Tensor3Sym.random(np.random.default_rng(cfg.seed))
    rows = [{"theta": t, "f1": f1, "f2": f2, "f3": f3}
            for t, f1, f2, f3 in suites.scan_rows(H, cfg.axis, cfg.samples or 64)]
    return True, {"axis": cfg.axis, "scan": rows}, rows


COMMANDS = {
    "verify-pvp": cmd_verify_pvp,
    "reconstruct": cmd_reconstruct,
    "classify": cmd_classify,
    "invariance": cmd_invariance,
    "nsalpha": cmd_nsalpha,
    "scan": cmd_scan,
}


# -- output -------------------------------------------------------------------------
def render(cfg: RunConfig, passed: bool, payload: dict, rows: list[dict]) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return buf.getvalue()
    report = {"tool": "hyperstress", "version": __version__, "config": cfg.to_json(),
              "passed": passed, **payload}
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperstress", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--part", action="append", default=[], help="part file (repeatable); default: canned parts")
        p.add_argument("--fields", help="field or tensor spec (JSON)")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--degree", type=int, default=2, help="degree bound for random T and H (v gets one more)")
        p.add_argument("--samples", type=int, help="number of seeded samples")
        p.add_argument("--tol", type=float, help="tolerance override for every check")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--inject-defect", action="store_true",
                       help="swap in a known-wrong ingredient to exercise the failure path")
        if name == "scan":
            p.add_argument("--axis", type=int, choices=(0, 1, 2), default=2)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(subcommand=args.subcommand, parts=args.part, fields=args.fields,
                        seed=args.seed, degree=args.degree, samples=args.samples, tol=args.tol,
                        format=args.format, out=args.out, inject_defect=args.inject_defect,
                        axis=getattr(args, "axis", 2))
        passed, payload, rows = COMMANDS[cfg.subcommand](cfg)
    except (InputError, FieldError, GeometryError, TensorError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    text = render(cfg, passed, payload, rows)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            log.error("cannot write %s: %s", cfg.out, exc)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    if not passed:
        log.warning("tolerance breach in %s", cfg.subcommand)
    return EXIT_OK if passed else EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
