"""Command-line front end.

    gptaudit audit two-box --format json
    gptaudit chsh clock --grid 1440
    gptaudit teleport spin-factor --n 3 --group so

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audit import (
    DEFAULT_SEED,
    LOCAL_BOUND,
    NO_SIGNALING_BOUND,
    TSIRELSON,
    audit_all,
    audit_faithe,
    chsh_max,
    teleport_candidate,
    teleport_check,
)
from .convex import DEFAULT_TOL, Tolerance
from .errors import GptAuditError, Inapplicable, InputError
from .models import MODEL_NAMES, build_model
from .report import ReportDocument, render_markdown, render_table

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_NUMERIC"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
CONFIG_KEYS = {"n": int, "group": str, "grid": int, "tol": float, "seed": lambda s: int(s, 0), "format": str, "samples": int}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gptaudit", description="Audit toy probabilistic theories against quantum-like postulates.")
    p.add_argument("--version", action="version", version=f"gptaudit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "audit": "run every postulate audit and write a report",
        "chsh": "maximise the CHSH value",
        "teleport": "test whether alpha Phi^-1 teleports",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text, description=text)
        s.add_argument("model", choices=MODEL_NAMES, help="model name")
        s.add_argument("--n", type=int, default=None, help="dimension parameter (spin-factor, classical)")
        s.add_argument("--group", choices=("o", "so", "O", "SO"), default=None, help="local group for spin-factor")
        s.add_argument("--grid", type=int, default=None, help="angle samples per 2 pi")
        s.add_argument("--tol", type=float, default=None, help="numerical tolerance eps")
        s.add_argument("--seed", type=lambda x: int(x, 0), default=None, help="sampling seed (default $GPTAUDIT_SEED or 0xD1CE)")
        s.add_argument("--format", choices=("json", "md", "table"), default=None)
        s.add_argument("--samples", type=int, default=None, help="mixed states sampled by the purification audit")
        s.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
        s.add_argument("--config", type=Path, default=None, help="key=value file overriding defaults")
    return p


def read_config(path: Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or key not in CONFIG_KEYS:
            raise InputError(f"{path}:{lineno}: expected one of {sorted(CONFIG_KEYS)} as key=value")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def _settings(args) -> dict:
    cfg = read_config(args.config) if args.config else {}
    pick = lambda k, default: getattr(args, k) if getattr(args, k) is not None else cfg.get(k, default)  # noqa: E731
    env_seed = os.environ.get("GPTAUDIT_SEED")
    try:
        fallback_seed = int(env_seed, 0) if env_seed else DEFAULT_SEED
    except ValueError as exc:
        raise InputError(f"GPTAUDIT_SEED is not an integer: {env_seed!r}") from exc
    tol = Tolerance(
        eps=pick("tol", DEFAULT_TOL.eps),
        grid_angle=pick("grid", DEFAULT_TOL.grid_angle),
        grid_gamma=DEFAULT_TOL.grid_gamma,
    )
    return {
        "n": pick("n", None),
        "group": str(pick("group", "o")).upper(),
        "tol": tol,
        "seed": pick("seed", fallback_seed),
        "format": pick("format", "table"),
        "samples": pick("samples", 50),
    }


def _model(args, st):
    return build_model(args.model, st["n"], st["group"], st["tol"], st["seed"])


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _document(m, st, results) -> ReportDocument:
    return ReportDocument(model=m.name, params=dict(m.params), seed=st["seed"], tolerance=st["tol"], results=tuple(results))


def _render(doc: ReportDocument, fmt: str) -> str:
    if fmt == "json":
        return doc.dumps()
    if fmt == "md":
        return render_markdown(doc)
    return render_table(doc)


def run_audit_command(args) -> int:
    st = _settings(args)
    m = _model(args, st)
    results = audit_all(m, st["tol"], st["seed"], st["samples"])
    _emit(_render(_document(m, st, results), st["format"]), args.out)
    return EXIT_OK


def run_chsh_command(args) -> int:
    st = _settings(args)
    m = _model(args, st)
    r = chsh_max(m, st["tol"])
    if st["format"] != "table":
        _emit(_render(_document(m, st, [r]), st["format"]), args.out)
        return EXIT_OK
    w = r.witness
    lines = [
        f"model: {m.label()}",
        f"CHSH max: {r.value:.6f}",
        f"state: {w.get('label')} {w.get('params')}",
    ]
    if "setting" in w:
        lines.append(f"alice observables: {w['setting']['alice']}")
        lines.append(f"bob observables: {w['setting']['bob']}")
    if "bob_angles" in w:
        lines.append(f"bob angles: {[round(a, 6) for a in w['bob_angles']]}")
    lines += [
        f"local bound: {LOCAL_BOUND:.6f}",
        f"Tsirelson bound: {TSIRELSON:.6f}",
        f"no-signaling bound: {NO_SIGNALING_BOUND:.6f}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def run_teleport_command(args) -> int:
    st = _settings(args)
    m = _model(args, st)
    tol = st["tol"]
    try:
        faithe = audit_faithe(m, tol)
        alpha, F = teleport_candidate(m, tol)
    except Inapplicable as exc:
        _emit(f"model: {m.label()}\nteleport: inconclusive ({exc})\n", args.out)
        return EXIT_OK
    out = teleport_check(m, F, tol)
    res = out.to_result()
    if st["format"] != "table":
        _emit(_render(_document(m, st, [faithe, res]), st["format"]), args.out)
        return EXIT_OK
    lines = [
        f"model: {m.label()}",
        f"teleport: {'feasible' if out.feasible else 'infeasible'}",
        f"alpha candidate: {alpha:.6f}",
        f"fitted alpha: {out.alpha:.6f}",
        f"residual: {out.residual:.3e}",
        f"min of F over states: {out.min_value:.6f}",
        f"FAITHE: {faithe.status} (value {faithe.value:.6g})",
    ]
    if out.witness is not None:
        lines.append(f"witness: {out.witness.get('label')} {out.witness.get('params')}")
        A44 = m.extras.get("A44")
        if A44 is not None and np.allclose(out.witness["matrix"], A44 @ m.faithful, atol=1e-6):
            lines.append("witness equals (A44 x I) Phi")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {"audit": run_audit_command, "chsh": run_chsh_command, "teleport": run_teleport_command}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"gptaudit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GptAuditError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gptaudit: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
