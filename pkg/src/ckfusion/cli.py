"""Batch command-line front end.

Every command prints one JSON report on stdout.  Exit codes: 0 when the
certified claim holds, 1 when it is certified to fail, 2 on invalid input.
"""

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from ._linalg import DEFAULT_TOL
from .algebra import AlgebraElement
from .certificate import _plain
from .errors import FrameError, GenerationFailed, SingularFrameOperator
from .frames import FrameClass, frame_operator, optimal_star_bounds, reconstruct, verify_membership
from .generate import CONTROL_MODES, PRESETS, InstanceSpec, sequence_example_system, generate
from .hilbert_module import ModuleVector, module_norm
from .io import dumps, frame_to_json, load_frame
from .robustness import build_perturbed_frame, erasure_subset, perturbation_stability


class InvalidInput(Exception):
    pass


def _common(p):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", help="also write the report (or, for gen, the instance) to this file")


def build_parser():
    parser = argparse.ArgumentParser(prog="ckfusion", description="controlled *-K-fusion frame toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded random instance")
    _common(g)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--rank-min", type=int, default=1)
    g.add_argument("--rank-max", type=int, default=None)
    g.add_argument("--weight-min", type=float, default=0.5)
    g.add_argument("--weight-max", type=float, default=2.0)
    g.add_argument("--cond", type=float, default=2.0, help="condition-number cap for C and C'")
    g.add_argument("--k-rank", type=int, default=-1, help="rank of K (-1 for full rank)")
    g.add_argument("--mode", choices=CONTROL_MODES, default="equal")
    g.add_argument("--preset", choices=PRESETS, default="random")

    for name, text in (("validate", "check file invariants and frame membership"), ("bounds", "optimal bounds")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("path")

    r = sub.add_parser("reconstruct", help="reconstruction formula residual")
    _common(r)
    r.add_argument("path")
    r.add_argument("--vector", help="JSON file holding an n x d x 2 module vector (random if omitted)")

    e = sub.add_parser("erase-check", help="erase a set of submodules")
    _common(e)
    e.add_argument("path")
    e.add_argument("--J", required=True, help="comma-separated 0-based indices")

    q = sub.add_parser("perturb-check", help="perturb every submodule and check stability")
    _common(q)
    q.add_argument("path")
    q.add_argument("--magnitude", type=float, default=1e-3)

    x = sub.add_parser("sequence-example", help="the truncated sequence-space example")
    _common(x)
    x.add_argument("--N", type=int, default=16)
    x.add_argument("--alpha", type=float, default=1.0)
    x.add_argument("--beta", type=float, default=1.0)
    x.add_argument("--layout", choices=("scalar", "sequence"), default="scalar")
    return parser


def _load(args):
    try:
        return load_frame(args.path, args.tol)
    except OSError as exc:
        raise InvalidInput(f"cannot read {args.path}: {exc.strerror}") from None
    except (FrameError, ValueError) as exc:
        raise InvalidInput(f"{args.path}: {exc}") from None


def cmd_gen(args):
    rank_max = args.n if args.rank_max is None else args.rank_max
    try:
        spec = InstanceSpec(
            d=args.d, n=args.n, m=args.m,
            rank_range=(args.rank_min, rank_max),
            weight_range=(args.weight_min, args.weight_max),
            control_condition=args.cond, k_rank=args.k_rank, seed=args.seed,
            control_mode=args.mode, preset=args.preset,
        )
    except FrameError as exc:
        raise InvalidInput(str(exc)) from None
    try:
        F = generate(spec)
    except GenerationFailed as exc:
        return False, {"error": str(exc)}, None
    text = dumps(frame_to_json(F)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    digest = hashlib.sha256(text.encode()).hexdigest()
    b = optimal_star_bounds(F)
    return True, {"instance_sha256": digest, "bounds": b.to_json(), "written_to": args.out}, None


def _validate(F):
    checks = {
        "positive_cross": list(F.positive_cross),
        "cross_residuals": [list(r) for r in F.cross_residuals],
    }
    if not F.cross_ok:
        return False, checks, []
    S = frame_operator(F).blocks
    checks["frame_operator_hermitian_defect"] = max(float(np.linalg.norm(B - B.conj().T, 2)) for B in S)
    cert = verify_membership(F, FrameClass.CONTROLLED_K_FUSION)
    return cert.conclusion_verified, checks, [cert]


def cmd_validate(args):
    F, digest = _load(args)
    ok, checks, certs = _validate(F)
    return ok, {"input_sha256": digest, "residuals": checks}, certs


def cmd_bounds(args):
    F, digest = _load(args)
    if not F.cross_ok:
        return False, {"input_sha256": digest, "error": "C'^* pi_W C is not positive"}, []
    b = optimal_star_bounds(F)
    return b.is_frame, {"input_sha256": digest, "bounds": b.to_json()}, []


def cmd_reconstruct(args):
    F, digest = _load(args)
    if args.vector:
        try:
            with open(args.vector) as fh:
                f = ModuleVector.from_json(json.load(fh))
        except (OSError, ValueError) as exc:
            raise InvalidInput(f"cannot read vector: {exc}") from None
        if f.shape != (F.n, F.d):
            raise InvalidInput(f"vector has shape {f.shape}, system needs {(F.n, F.d)}")
    else:
        f = ModuleVector.random(F.n, F.d, np.random.default_rng(args.seed))
    try:
        _, resid = reconstruct(F, f)
    except SingularFrameOperator as exc:
        return False, {"input_sha256": digest, "error": str(exc)}, []
    rel = resid / max(module_norm(f), 1e-300)
    return rel <= 1e-8, {"input_sha256": digest, "residuals": {"absolute": resid, "relative": rel}}, []


def cmd_erase(args):
    F, digest = _load(args)
    try:
        J = [int(s) for s in args.J.split(",") if s.strip()]
    except ValueError:
        raise InvalidInput(f"--J must be comma-separated integers, got {args.J!r}") from None
    try:
        cert = erasure_subset(F, J)
    except IndexError as exc:
        raise InvalidInput(str(exc)) from None
    return cert.conclusion_verified, {"input_sha256": digest}, [cert]


def cmd_perturb(args):
    F, digest = _load(args)
    if args.magnitude < 0:
        raise InvalidInput("--magnitude must be nonnegative")
    Fv, P = build_perturbed_frame(F, args.magnitude, args.seed)
    cert = perturbation_stability(F, Fv, P, samples=args.samples, seed=args.seed)
    extra = {"input_sha256": digest, "a_norm": P.a_norm, "single_a": P.single}
    return cert.conclusion_verified, extra, [cert]


def cmd_sequence_example(args):
    try:
        F = sequence_example_system(args.N, args.alpha, args.beta, args.layout)
    except FrameError as exc:
        raise InvalidInput(str(exc)) from None
    A = 2.0 * np.sqrt(args.alpha / args.beta)
    B = np.sqrt(args.alpha * args.beta)
    fus = verify_membership(F, FrameClass.CONTROLLED_FUSION)
    kf = verify_membership(F, FrameClass.CONTROLLED_K_FUSION, A=AlgebraElement(np.full(F.d, A)), B=AlgebraElement(np.full(F.d, B)))
    b = optimal_star_bounds(F)
    ok = (not fus.conclusion_verified) and kf.conclusion_verified
    extra = {
        "summary": {"controlled_fusion": fus.conclusion_verified, "controlled_k_fusion": kf.conclusion_verified},
        "bounds": b.to_json(),
    }
    return ok, extra, [fus, kf]


COMMANDS = {
    "gen": cmd_gen,
    "validate": cmd_validate,
    "bounds": cmd_bounds,
    "reconstruct": cmd_reconstruct,
    "erase-check": cmd_erase,
    "perturb-check": cmd_perturb,
    "sequence-example": cmd_sequence_example,
}


def run(argv):
    """Returns (exit_code, report_dict, parsed_args)."""
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        ok, extra, certs = COMMANDS[args.command](args)
    except InvalidInput as exc:
        return 2, {"command": ["ckfusion", *argv], "error": str(exc)}, args
    report = {"command": ["ckfusion", *argv], "tol": args.tol, "seed": args.seed, "pass": ok}
    report.update(extra)
    if certs:
        report["certificates"] = [c.to_json() for c in certs]
    report["wall_time"] = time.perf_counter() - t0
    return (0 if ok else 1), report, args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    code, report, args = run(argv)
    text = json.dumps(_plain(report), sort_keys=True, indent=1)
    print(text)
    if code == 2:
        print(f"error: {report['error']}", file=sys.stderr)
    elif args.out and args.command != "gen":
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
