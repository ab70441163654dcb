"""Command-line front end.

Every command prints canonical JSON (sorted keys, 17 significant digits)
and records the seed it ran with.  Exit codes: 0 success, 2 failed
validation, 3 size cap exceeded, 4 malformed input.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .complex import BUILDERS, TwoComplex, dual
from .errors import CapExceededError, ComplexError, FieldError, ParseError, PauliError, ProtocolError
from .gfarith import FieldCtx
from .homology import cycle_representative, h1
from .protocols import braid_phase, interferometer, interferometer_csv, store, store_retrieve
from .serialize import dumps
from .stabilizer import StabilizerCode, code_parameters, global_identities, logical_relations
from .statevec import DEFAULT_CAP, build_hamiltonian, ground_space

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_PARSE = 0, 2, 3, 4


class ValidationFailure(Exception):
    """An invariant check ran and failed; the report is still printed."""

    def __init__(self, report: dict):
        super().__init__("validation failed")
        self.report = report


# -- shared options -----------------------------------------------------------


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_field(p: argparse.ArgumentParser):
    p.add_argument("--d", type=int, default=2, help="field characteristic (prime)")
    p.add_argument("--ell", type=int, default=1, help="extension degree")
    p.add_argument("--modulus", type=_ints, default=None,
                   help="monic modulus coefficients, low degree first")


def _add_complex(p: argparse.ArgumentParser, default_builder: str = "torus"):
    p.add_argument("--input", type=Path, help="complex JSON file (overrides --builder)")
    p.add_argument("--builder", choices=sorted(BUILDERS), default=default_builder)
    p.add_argument("--m", type=int, default=2, help="torus side length")
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--k", type=int, default=1, help="punctures of the punctured disk")
    p.add_argument("--sides", type=int, default=None, help="sides per punctured-disk annulus ring")
    p.add_argument("--spokes", type=int, default=3)
    _add_field(p)


def _add_run(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest dense amplitude count")
    p.add_argument("--out", type=Path, help="write JSON here instead of stdout")


def _ctx(args) -> FieldCtx:
    return FieldCtx(args.d, args.ell, tuple(args.modulus) if args.modulus else ())


def _complex(args) -> TwoComplex:
    if args.input is not None:
        try:
            text = args.input.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(str(exc), str(args.input)) from exc
        return TwoComplex.loads(text)
    kw = {"m": args.m, "k": args.k, "spokes": args.spokes}
    for key in ("rows", "cols", "sides"):
        if getattr(args, key, None) is not None:
            kw[key] = getattr(args, key)
    return BUILDERS[args.builder](_ctx(args), **kw)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in cfg.items()}


# -- commands -----------------------------------------------------------------


def cmd_complex(args) -> dict:
    g = _complex(args)
    if args.action == "build":
        g.validate()
        return {"complex": g.to_json()}
    if args.action == "validate":
        try:
            g.validate()
        except ComplexError as exc:
            raise ValidationFailure({"valid": False, "error": str(exc)}) from exc
        code = StabilizerCode(g)
        rep = {
            "valid": True,
            "euler_characteristic": len(g.vertices) - g.n + len(g.active_faces),
            "identities": global_identities(code),
            "code_dim_matches_homology": code_parameters(code).consistent(),
        }
        rep["roundtrip"] = TwoComplex.loads(g.dumps()).dumps() == g.dumps()
        if not (rep["identities"]["ok"] and rep["code_dim_matches_homology"] and rep["roundtrip"]):
            raise ValidationFailure(rep)
        return rep
    return {"complex": dual(g).to_json()}


def cmd_homology(args) -> dict:
    g = _complex(args)
    g.validate()
    return {"homology": h1(g).to_json(), "mode": g.mode}


def cmd_code(args) -> dict:
    code = StabilizerCode(_complex(args))
    if args.action == "params":
        p = code_parameters(code)
        return {"n": p.n, "code_dim": p.code_dim, "generator_rank": p.generator_rank,
                "rank_h1": p.rank_h1, "class_count": p.class_count, "consistent": p.consistent()}
    rep = {"identities": global_identities(code), "logicals": logical_relations(code)}
    if not (rep["identities"]["ok"] and rep["logicals"]["ok"]):
        raise ValidationFailure(rep)
    return rep


def cmd_ground(args) -> dict:
    code = StabilizerCode(_complex(args))
    gs = ground_space(code, args.U, args.h, cap=args.cap, seed=args.seed)
    ham = build_hamiltonian(code, args.U, args.h, cap=args.cap)
    if args.action == "degeneracy":
        expected = code.homology.class_count
        rep = {"degeneracy": gs.dim, "class_count": expected, "rank_h1": code.homology.rank_h1,
               "residual": gs.residual, "matches_homology": gs.dim == expected}
        if not rep["matches_homology"]:
            raise ValidationFailure(rep)
        return rep
    return {"ground_energy": gs.energy, "energy_bound": ham.ground_energy_bound, "residual": gs.residual}


def _alphas(args, d: int) -> np.ndarray:
    if args.alphas:
        vals = np.array(args.alphas, dtype=np.complex128)
        if vals.size == 2 * d:
            vals = vals[0::2] + 1j * vals[1::2]
        if vals.size != d:
            raise ParseError(f"need {d} real or {2 * d} re,im values", "--alphas")
    else:
        rng = np.random.default_rng(args.seed)
        vals = rng.normal(size=d) + 1j * rng.normal(size=d)
    return vals / np.linalg.norm(vals)


def cmd_protocol(args) -> dict:
    if args.action == "interfere":
        args.builder, args.rows, args.cols, args.input = "square-disk", 2, 3, None
    elif args.action == "braid" and args.input is None:
        args.builder = "wheel"
    code = StabilizerCode(_complex(args))
    d = code.ctx.d
    if args.action in ("store", "retrieve"):
        alphas = _alphas(args, d)
        omega = cycle_representative(code.complex, tuple(args.cycle) if len(args.cycle) > 1 else args.cycle[0])
        if args.action == "store":
            _, tr = store(code, alphas, omega, seed=args.seed)
            return {"alphas": alphas, "transcript": tr.to_json()}
        rt = store_retrieve(code, alphas, omega, seed=args.seed)
        return {"alphas": alphas, "store": rt["store"].to_json(), "retrieve": rt["retrieve"].to_json(),
                "store_fidelity": rt["store_fidelity"], "retrieve_fidelity": rt["retrieve_fidelity"]}
    if args.action == "braid":
        res = braid_phase(code, args.process, *args.labels, numeric=not args.symbolic_only)
        return {"process": res.process, "symbolic": res.symbolic, "numeric": res.numeric,
                "expected": res.expected, "labels": res.labels, "crossings": res.crossings, "ok": res.ok}
    rep = interferometer(code, args.probe, args.target, args.chi, exact=args.exact, shots=args.shots,
                         seed=args.seed, engine=args.engine, csv_rows=args.csv is not None)
    if args.csv is not None:
        args.csv.write_text(interferometer_csv(rep), encoding="utf-8")
        rep.pop("csv_rows", None)
    tr = rep.pop("transcript")
    out = dict(rep["estimate"])
    out.update(phi_top_ratio=rep["phi_top_ratio"], formulas=rep["formulas"], exact=rep["exact"],
               transcript=tr.to_json())
    if "stderr" in rep:
        out.update(stderr=rep["stderr"], shots=rep["shots"])
    return out


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qudit-surface", description="Qudit surface code laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complex", help="build, validate or dualise a two-complex")
    p.add_argument("action", choices=["build", "validate", "dual"])
    _add_complex(p)
    _add_run(p)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("homology", help="first homology over the field")
    _add_complex(p)
    _add_run(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("code", help="stabilizer code parameters and identities")
    p.add_argument("action", choices=["params", "identities"])
    _add_complex(p)
    _add_run(p)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("ground", help="ground-space dimension or energy by dense simulation")
    p.add_argument("action", choices=["degeneracy", "energy"])
    p.add_argument("--U", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1.0)
    _add_complex(p)
    _add_run(p)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("protocol", help="storage, retrieval, braiding and interferometry")
    p.add_argument("action", choices=["store", "retrieve", "braid", "interfere"])
    _add_complex(p)
    _add_run(p)
    p.add_argument("--alphas", type=_floats, default=None,
                   help="d real amplitudes or 2d interleaved re,im values (random if omitted)")
    p.add_argument("--cycle", type=_ints, default=[1, 0], help="class of the storage cycle")
    p.add_argument("--process", choices=["R2", "R", "T", "C", "none"], default="R2")
    p.add_argument("--labels", type=_ints, default=[1, 0, 0, 1], help="a,b,a2,b2 for braiding")
    p.add_argument("--symbolic-only", action="store_true")
    p.add_argument("--probe", type=_ints, default=[0, 1])
    p.add_argument("--target", type=_ints, default=[1, 0])
    p.add_argument("--chi", type=float, default=0.0)
    p.add_argument("--exact", action="store_true", help="exact expectations instead of sampled shots")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--engine", choices=["frame", "dense"], default="frame")
    p.add_argument("--csv", type=Path, default=None, help="write sampled shots as CSV")
    p.set_defaults(func=cmd_protocol)
    return ap


def _emit(obj: dict, out: Path | None):
    text = dumps(obj) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    warnings.simplefilter("ignore")
    try:
        result = args.func(args)
        code = EXIT_OK
    except ValidationFailure as exc:
        result, code = exc.report, EXIT_INVALID
    except ParseError as exc:
        result, code = {"error": "parse", "message": str(exc), "where": exc.where}, EXIT_PARSE
    except CapExceededError as exc:
        result, code = {"error": "cap", "message": str(exc), "required": exc.required, "cap": exc.cap}, EXIT_CAP
    except (ComplexError, FieldError, PauliError, ProtocolError) as exc:
        result, code = {"error": "validation", "message": str(exc)}, EXIT_INVALID
    result = dict(result)
    result["config"] = cfg
    result["seed"] = args.seed
    _emit(result, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
