"""Batch command-line front end.

Each command reads JSON inputs, runs seeded experiments over sampled
ball points, and writes a JSON report with residuals and verdicts.
Exit codes: 0 when all verdicts pass, 1 on a verdict failure, 2 on
malformed or invalid input.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from .charfn import char_fn, frostman_shift, popescu_char, weak_coincidence_fit
from .errors import NcdbrError
from .fock import model_verify
from .freepoly import eval_poly, format_poly, parse_poly
from .kernels import cp_check
from .ncspace import MatrixTuple, sample_ball_point
from .rowcontraction import (
    RowContraction,
    canonical_frames,
    defect_point,
    iso_pure_decompose,
    reconstruct,
)

DEFAULT_FOCK_N = {1: 8, 2: 6, 3: 4}


def _matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def _matrix_from_json(data):
    return np.array(
        [[complex(entry[0], entry[1]) for entry in row] for row in data], dtype=complex
    )


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _digest(obj):
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_tuple(path):
    data = _load_json(path)
    mats = [_matrix_from_json(m) for m in data["matrices"]]
    Z = MatrixTuple(tuple(mats))
    if Z.d != data.get("d", Z.d) or Z.n != data.get("n", Z.n):
        raise ValueError("declared (d, n) disagree with the matrix shapes")
    return Z, _digest(data)


def load_contraction(path):
    data = _load_json(path)
    ops = [_matrix_from_json(m) for m in data["ops"]]
    T = RowContraction(tuple(ops))
    if T.d != data.get("d", T.d) or T.m != data.get("m", T.m):
        raise ValueError("declared (d, m) disagree with the operator shapes")
    return T, _digest(data)


def _points(d, count, radius, seed):
    out = []
    for k in range(count):
        level = 1 + (k % 2)
        out.append(sample_ball_point(d, level, radius, seed + 1000 * k))
    return out


def cmd_cnc_check(args):
    T, digest = load_contraction(args.input)
    report = rowcontraction_cnc(T)
    return digest, report, {"informational": True}


def rowcontraction_cnc(T):
    from .rowcontraction import cnc_rank

    rep = cnc_rank(T)
    return {"dim": rep.dim, "is_cnc": rep.is_cnc, "stabilized_at": rep.stabilized_at}


def cmd_charfn(args):
    T, digest = load_contraction(args.input)
    B = char_fn(T)
    delta = defect_point(T)
    zero_gap = float(np.linalg.norm(B.at_zero() - delta, 2))
    results = []
    max_norm = 0.0
    for k, Z in enumerate(_points(T.d, args.points, args.radius, args.seed)):
        norm = float(np.linalg.norm(B(Z), 2))
        max_norm = max(max_norm, norm)
        results.append({"point": k, "level": Z.n, "norm": norm})
    verdicts = {
        "value_at_zero_is_defect_point": zero_gap <= 1e-10,
        "contractive": max_norm <= 1.0 + 1e-8,
    }
    report = {
        "defect_point_singular_values": [
            float(s) for s in np.linalg.svd(delta, compute_uv=False)
        ],
        "value_at_zero_gap": zero_gap,
        "points": results,
        "max_norm": max_norm,
    }
    return digest, report, verdicts


def cmd_compare_popescu(args):
    T, digest = load_contraction(args.input)
    fit = _points(T.d, args.points, args.radius, args.seed)
    holdout = _points(T.d, max(3, args.points // 2), args.radius, args.seed + 77)
    _, _, residual, verdict = weak_coincidence_fit(
        char_fn(T), popescu_char(T), fit, holdout, tol=args.tol
    )
    report = {"residual": residual, "fit_points": len(fit), "holdout_points": len(holdout)}
    return digest, report, {"weak_coincidence": verdict}


def cmd_kernel_psd(args):
    T, digest = load_contraction(args.input)
    B = char_fn(T)
    results = []
    all_psd = True
    for k, Z in enumerate(_points(T.d, args.points, args.radius, args.seed)):
        min_eig, psd = cp_check(B, Z)
        all_psd = all_psd and psd
        results.append({"point": k, "level": Z.n, "min_eig": min_eig, "psd": psd})
    return digest, {"points": results}, {"kernel_psd": all_psd}


def cmd_frostman(args):
    T, digest = load_contraction(args.input)
    B = char_fn(T)
    shifted = frostman_shift(B, B.at_zero())
    worst = 0.0
    for Z in _points(T.d, args.points, args.radius, args.seed):
        worst = max(worst, float(np.linalg.norm(B(Z) - shifted(Z), 2)))
    verdict = worst <= max(args.tol, 1e-9)
    return digest, {"fixed_point_residual": worst}, {"frostman_fixed_point": verdict}


def cmd_roundtrip(args):
    T, digest = load_contraction(args.input)
    V = iso_pure_decompose(T).V
    frames = canonical_frames(V)
    p = frames.gamma0.shape[1]
    q = frames.gammaInf.shape[1]
    rng = np.random.default_rng(args.seed)
    delta = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    if delta.size:
        delta *= 0.7 / max(np.linalg.norm(delta, 2), 1e-300)
    T2 = reconstruct(V, delta)
    residual = float(np.linalg.norm(defect_point(T2) - delta, 2)) if delta.size else 0.0
    report = {"delta_shape": [p, q], "roundtrip_residual": residual}
    return digest, report, {"defect_point_roundtrip": residual <= 1e-10}


def cmd_model_verify(args):
    T, digest = load_contraction(args.input)
    N = args.max_len if args.max_len is not None else DEFAULT_FOCK_N.get(T.d, 4)
    report = model_verify(T, N, seed=args.seed)
    worst = max(
        report["frame_residual"],
        report["intertwine_residual"],
        report["kernel_identity_residual"],
    )
    # truncation-limited sanity threshold, not the acceptance tolerance
    return digest, report, {"model_residuals_small": worst <= 1e-3}


def cmd_poly_eval(args):
    Z, digest = load_tuple(args.input)
    ast = parse_poly(args.expr)
    value = eval_poly(ast, Z)
    report = {
        "normal_form": format_poly(ast),
        "value": _matrix_to_json(value),
    }
    return digest, report, {"evaluated": True}


COMMANDS = {
    "cnc-check": cmd_cnc_check,
    "charfn": cmd_charfn,
    "compare-popescu": cmd_compare_popescu,
    "kernel-psd": cmd_kernel_psd,
    "frostman": cmd_frostman,
    "roundtrip": cmd_roundtrip,
    "model-verify": cmd_model_verify,
    "poly-eval": cmd_poly_eval,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ncdbr", description="Batch experiments for the NC model toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_tol = float(os.environ.get("NCDBR_TOL", "1e-8"))
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--points", type=int, default=10)
        p.add_argument("--radius", type=float, default=0.7)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--max-len", type=int, default=None)
        p.add_argument("--tol", type=float, default=default_tol)
        p.add_argument("--out", default=None)
        if name == "poly-eval":
            p.add_argument("--expr", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        digest, results, verdicts = COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError, NcdbrError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "inputs": {"path": args.input, "sha256": digest},
        "params": {
            "points": args.points,
            "radius": args.radius,
            "seed": args.seed,
            "max_len": args.max_len,
            "tol": args.tol,
        },
        "results": results,
        "verdicts": verdicts,
        "wall_time_ms": round(1000.0 * (time.monotonic() - start), 3),
    }
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if all(verdicts.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
