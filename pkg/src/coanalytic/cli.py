"""Command-line front end: parse symbols, dispatch, emit JSON or CSV reports.

Exit codes: 0 success, 1 error, 2 when the verdict is ``unknown``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from coanalytic import __version__
from coanalytic.serialize import (
    InputError,
    class_a_to_json,
    csv_text,
    dumps,
    load_json_arg,
    parse_angle_list,
    parse_complex_list,
    rational_from_json,
    singular_from_json,
    to_jsonable,
)

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    n: int | None = None
    grid: int = 4096
    tol: float | None = None
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def validate(self) -> None:
        if self.n is not None and self.n < 1 and self.command not in ("norm", "kernel-check"):
            raise InputError("--n must be at least 1")
        if self.grid < 4 or self.grid & (self.grid - 1):
            raise InputError("--grid must be a power of two >= 4")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")


# -- input helpers -------------------------------------------------------------

def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return value


def _class_a(text: str):
    return parse_angle_list(text)


def _series(text: str) -> np.ndarray:
    obj = load_json_arg(text)
    if isinstance(obj, dict) and "coeffs" in obj:
        obj = obj["coeffs"]
    return parse_complex_list(obj)


def _complex(text: str) -> complex:
    text = text.strip()
    if text.startswith("["):
        re_, im = load_json_arg(text)
        return complex(float(re_), float(im))
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def _parse_sweep(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"--sweep expects start:stop, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise InputError("--sweep needs 0 <= start <= stop")
    return lo, hi


def _levels(text: str) -> list[int]:
    try:
        levels = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"--levels expects comma separated integers, got {text!r}") from None
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 0:
        raise InputError("--levels must be non-negative and increasing")
    return levels


# -- commands ------------------------------------------------------------------

def cmd_reduce(args, cfg):
    from coanalytic.symbols import MODULUS_TOL, reduce

    r = rational_from_json(load_json_arg(_need(args, "rational")))
    return class_a_to_json(reduce(r, cfg.tol or MODULUS_TOL)), EXIT_OK


def cmd_decompose(args, cfg):
    from coanalytic.rangespace import decompose

    a = _class_a(_need(args, "a"))
    return decompose(a, _series(_need(args, "f"))).to_json(), EXIT_OK


def cmd_norm(args, cfg):
    from coanalytic.sections import RangeElement

    a = _class_a(_need(args, "a"))
    el = RangeElement.from_function(a, _series(_need(args, "f")))
    return {"f": el.f, "g": el.g, "norm": el.norm, "residual": el.residual}, EXIT_OK


def cmd_kernel_check(args, cfg):
    from coanalytic.sections import kernel_degree, kernel_tail_bound, range_norm, reproducing_residual

    a = _class_a(_need(args, "a"))
    f = _series(_need(args, "f"))
    lam = _complex(_need(args, "lam"))
    eps = cfg.tol or 1e-8
    n = cfg.n if cfg.n is not None else kernel_degree(a, lam, eps / max(1.0, range_norm(a, f)))
    res = reproducing_residual(a, f, lam, n)
    return {"lambda": lam, "n": n, "residual": res, "tail_bound": kernel_tail_bound(a, lam, n)}, EXIT_OK


def cmd_mult_check(args, cfg):
    from coanalytic.multipliers import mult_check

    a1, a2 = _class_a(_need(args, "a1")), _class_a(_need(args, "a2"))
    phi = singular_from_json(load_json_arg(_need(args, "phi")))
    v = mult_check(a1, a2, phi)
    return v.to_json(), EXIT_UNKNOWN if v.decision == "unknown" else EXIT_OK


def cmd_onto_check(args, cfg):
    from coanalytic.multipliers import onto_check

    v = onto_check(_class_a(_need(args, "a1")), _class_a(_need(args, "a2")))
    return v.to_json(), EXIT_UNKNOWN if v.decision == "unknown" else EXIT_OK


def cmd_shift_norm(args, cfg):
    from coanalytic.shiftop import shift_norm_sections, sweep

    a = _class_a(_need(args, "a"))
    if args.sweep:
        levels = sweep(*_parse_sweep(args.sweep))
    else:
        levels = [cfg.n if cfg.n is not None else 256]
    rep = shift_norm_sections(a, levels)
    if cfg.format == "csv":
        return (("n", "sigma_max", "closed_form", "gap"), rep.rows()), EXIT_OK
    return rep.to_json(), EXIT_OK


def cmd_adjoint_check(args, cfg):
    from coanalytic.shiftop import adjoint_residual

    a = _class_a(_need(args, "a"))
    n = cfg.n if cfg.n is not None else 32
    return {"n": n, "residual": adjoint_residual(a, n)}, EXIT_OK


def cmd_mate(args, cfg):
    from coanalytic.mate import normalize_nonextreme, pythagorean_mate
    from coanalytic.symbols import RationalSymbol

    if args.rational:
        r = rational_from_json(load_json_arg(args.rational))
        scale = 1.0
    else:
        r, scale = normalize_nonextreme(_class_a(_need(args, "a")))
    res = pythagorean_mate(r, cfg.grid)
    out = res.to_json()
    out["mate"]["symbol"] = {"num": r.num, "den": r.den}
    out["mate"]["scale"] = scale
    return out, EXIT_OK


def cmd_decay_fit(args, cfg):
    from coanalytic.decay import decay_fit, sample_class_F

    if args.coeffs:
        coeffs = _series(args.coeffs)
    else:
        coeffs = sample_class_F(args.sample if args.sample is not None else 1.0, cfg.n or 4096)
    window = None
    if args.window:
        window = _parse_sweep(args.window)
    return decay_fit(coeffs, window).to_json(), EXIT_OK


def cmd_probe(args, cfg):
    from coanalytic.decay import sample_class_F, universal_mult_probe

    symbols = [_class_a(t) for t in (args.a or ["[(0,1)]", "[(0,1),(pi,1)]", "[(0,2)]"])]
    if args.coeffs:
        psi = _series(args.coeffs)
    else:
        psi = sample_class_F(args.sample if args.sample is not None else 1.0, cfg.n or 512)
    table = universal_mult_probe(psi, symbols, _levels(args.levels or "64,256,1024"))
    if cfg.format == "csv":
        return (("symbol", "n", "sigma_max", "growth_ratio"), table.csv_rows()), EXIT_OK
    return table.to_json(), EXIT_OK


def cmd_convergence(args, cfg):
    from coanalytic.sections import kernel_tail_bound, reproducing_residual

    a = _class_a(_need(args, "a"))
    f = _series(args.f) if args.f else np.ones(1, dtype=complex)
    lam = _complex(args.lam) if args.lam else 0.5
    lo, hi = _parse_sweep(args.sweep or "0:64")
    rows = [(n, reproducing_residual(a, f, lam, n), kernel_tail_bound(a, lam, n)) for n in range(lo, hi + 1)]
    if cfg.format == "csv":
        return (("n", "residual", "tail_bound"), rows), EXIT_OK
    return {"lambda": lam, "rows": [list(r) for r in rows]}, EXIT_OK


def cmd_selftest(args, cfg):
    from coanalytic.acceptance import DEFAULT_SEED, run_acceptance, select

    select(args.only)  # validate before running anything
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    results = run_acceptance(args.only, seed, args.tol)
    for r in results:
        print(r.line(), file=sys.stderr)
    failed = [r.number for r in results if not r.passed]
    report = {"criteria": [r.to_json() for r in results], "passed": not failed, "failed": failed}
    return report, EXIT_ERROR if failed else EXIT_OK


COMMANDS = {
    "reduce": cmd_reduce,
    "decompose": cmd_decompose,
    "norm": cmd_norm,
    "kernel-check": cmd_kernel_check,
    "mult-check": cmd_mult_check,
    "onto-check": cmd_onto_check,
    "shift-norm": cmd_shift_norm,
    "adjoint-check": cmd_adjoint_check,
    "mate": cmd_mate,
    "decay-fit": cmd_decay_fit,
    "probe": cmd_probe,
    "convergence": cmd_convergence,
    "selftest": cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; exit code 2 is reserved for undecided verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", action="append", help="class-A symbol as an angle list, e.g. '[(pi,1),(0,1)]'")
    common.add_argument("--a1", help="source symbol (angle list)")
    common.add_argument("--a2", help="target symbol (angle list)")
    common.add_argument("--rational", help="rational symbol JSON, or @file")
    common.add_argument("--phi", help="multiplier JSON (singular/rational/classA/coefficients), or a file")
    common.add_argument("--f", help="polynomial coefficients as JSON, constant term first")
    common.add_argument("--lam", help="kernel point, e.g. 0.3+0.2j or [0.3,0.2]")
    common.add_argument("--n", type=int, help="truncation degree")
    common.add_argument("--grid", type=int, default=4096, help="boundary grid size M (power of two)")
    common.add_argument("--tol", type=float, help="tolerance (meaning depends on the command)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--sweep", help="range start:stop for sweeps")
    common.add_argument("--coeffs", help="coefficient list JSON for decay-fit / probe")
    common.add_argument("--sample", type=float, help="use exp(-c sqrt(k)) with this c")
    common.add_argument("--window", help="fit window n0:n1")
    common.add_argument("--levels", help="probe truncations (default 64,256,1024)")
    common.add_argument("--only", help="selftest: comma list of criterion numbers or names")

    parser = _Parser(prog="coanalytic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _config(args) -> RunConfig:
    keys = ("a", "a1", "a2", "rational", "phi", "f", "lam", "sweep", "coeffs", "sample",
            "window", "levels", "only")
    inputs = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    return RunConfig(args.command, inputs, args.n, args.grid, args.tol,
                     args.seed if args.seed is not None else 0, args.format, args.out)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _single_a(args) -> None:
    # --a may repeat only for probe
    if args.a and args.command != "probe":
        if len(args.a) > 1:
            raise InputError("--a given more than once")
        args.a = args.a[0]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _single_a(args)
        cfg = _config(args)
        cfg.validate()
        result, code = COMMANDS[args.command](args, cfg)
    except (InputError, ValueError, ArithmeticError, NotImplementedError, TypeError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}, "command": args.command,
               "version": __version__}
        sys.stderr.write(dumps(err))
        return EXIT_ERROR

    if isinstance(result, tuple):  # CSV table
        header, rows = result
        if cfg.format == "csv":
            meta = f"# coanalytic {__version__} config={json.dumps(to_jsonable(asdict(cfg)), sort_keys=True)}\n"
            _emit(meta + csv_text(header, rows), cfg.out)
            return code
        result = {"columns": list(header), "rows": [list(r) for r in rows]}
    report = {"command": args.command, "config": asdict(cfg), "version": __version__, "result": result}
    _emit(dumps(report), cfg.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
