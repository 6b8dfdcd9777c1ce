"""Command-line front end.

Subcommands: ``kernel gen``, ``kernel verify``, ``composite verify``,
``wigner eval``, ``reconstruct``, ``moduli scan``.  Exit codes: 0 success,
1 well-formed input with a negative verdict, 2 usage or I/O error.  The
default seed is a fixed constant so documented invocations reproduce
byte-for-byte.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import composite, kernel, linalg, twoqubit

DEFAULT_SEED = 20210
DEFAULT_TOL = 1e-10

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _parse_dims(text: str) -> linalg.BipartiteDims:
    try:
        a, b = text.lower().split("x")
        return linalg.BipartiteDims(int(a), int(b))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(
            f"dims must look like 2x2, got {text!r}") from exc


def _parse_samples(text: str) -> list:
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"samples must be a comma-separated integer list, got {text!r}") from exc
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("samples must be positive integers")
    return values


def _parse_ranges(text: str):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"ranges must look like -3.14,3.14, got {text!r}") from exc
    if not hi > lo:
        raise argparse.ArgumentTypeError("ranges must satisfy lo < hi")
    return lo, hi


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _load_matrix_file(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return linalg.matrix_from_json(obj)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swphase",
        description="Stratonovich-Weyl kernels, composite admissibility and "
                    "the two-qubit moduli scan.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", help="generate or verify kernels")
    kernel_sub = p_kernel.add_subparsers(dest="kernel_command", required=True)

    p_gen = kernel_sub.add_parser("gen", help="generate a random kernel")
    p_gen.add_argument("--n", type=int, required=True, help="system dimension")
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--composite", action="store_true",
                       help="draw a composite-admissible kernel")
    p_gen.add_argument("--dims", type=_parse_dims, default=None,
                       help="bipartition AxB (required with --composite)")
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--format", choices=["json"], default="json")

    p_ver = kernel_sub.add_parser("verify", help="verify a kernel matrix file")
    p_ver.add_argument("input", help="matrix JSON file")
    p_ver.add_argument("--n", type=int, default=None)
    p_ver.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_ver.add_argument("--out", default=None)

    p_comp = sub.add_parser("composite", help="composite admissibility checks")
    comp_sub = p_comp.add_subparsers(dest="composite_command", required=True)
    p_cver = comp_sub.add_parser("verify", help="verify a composite kernel file")
    p_cver.add_argument("input", help="matrix JSON file")
    p_cver.add_argument("--dims", type=_parse_dims, required=True)
    p_cver.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_cver.add_argument("--out", default=None)

    p_wig = sub.add_parser("wigner", help="Wigner function values")
    wig_sub = p_wig.add_subparsers(dest="wigner_command", required=True)
    p_eval = wig_sub.add_parser("eval", help="pair a state file with a kernel file")
    p_eval.add_argument("state", help="density matrix JSON file")
    p_eval.add_argument("kernel", help="kernel matrix JSON file")
    p_eval.add_argument("--out", default=None)

    p_rec = sub.add_parser("reconstruct", help="orbit-integral reconstruction experiment")
    p_rec.add_argument("--n", type=int, required=True)
    p_rec.add_argument("--samples", type=_parse_samples, required=True,
                       help="comma-separated ladder, e.g. 1000,10000,100000")
    p_rec.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_rec.add_argument("--out", default=None)
    p_rec.add_argument("--format", choices=["json", "csv"], default="json")

    p_mod = sub.add_parser("moduli", help="two-qubit moduli bundle scan")
    mod_sub = p_mod.add_subparsers(dest="moduli_command", required=True)
    p_scan = mod_sub.add_parser("scan", help="random scan of the ellipsoid bundle")
    p_scan.add_argument("--n", type=int, required=True, help="number of records")
    p_scan.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_scan.add_argument("--zero-params", action="store_true",
                        help="evaluate every record at the origin")
    p_scan.add_argument("--ranges", type=_parse_ranges, default=(-np.pi, np.pi),
                        help="uniform parameter box lo,hi")
    p_scan.add_argument("--out", default=None)
    p_scan.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _cmd_kernel_gen(args) -> int:
    if args.composite:
        dims = args.dims
        if dims is None:
            print("error: --composite requires --dims AxB", file=sys.stderr)
            return EXIT_USAGE
        if dims.total != args.n:
            print(f"error: --dims {dims.n_a}x{dims.n_b} does not match --n {args.n}",
                  file=sys.stderr)
            return EXIT_USAGE
        if dims.n_a < 2 or dims.n_b < 2:
            print("error: composite kernels need subsystem dimensions >= 2",
                  file=sys.stderr)
            return EXIT_USAGE
        comp = composite.make_composite_kernel(dims, args.seed)
        report = composite.verify_composite_master(comp.mat, dims)
        payload = report.as_dict()
        payload.update({
            "n": args.n,
            "seed": args.seed,
            "spectrum": [float(v) for v in comp.kernel.spectrum],
            "matrix": linalg.matrix_to_json(comp.mat),
        })
        payload.update(kernel.verify_master(comp.mat, args.n).as_dict())
        _emit(_dump_json(payload), args.out)
        return EXIT_OK
    if args.n < 2:
        print(f"error: no kernel spectrum exists at n={args.n}", file=sys.stderr)
        return EXIT_USAGE
    spec = kernel.solve_kernel_spectrum(args.n, "random", seed=args.seed)
    u = linalg.haar_unitary(args.n, args.seed)
    ker = kernel.kernel_from_spectrum(spec, u)
    report = kernel.verify_master(ker.mat, args.n)
    payload = report.as_dict()
    payload.update({
        "n": args.n,
        "seed": args.seed,
        "spectrum": [float(v) for v in spec.pi],
        "matrix": linalg.matrix_to_json(ker.mat),
    })
    _emit(_dump_json(payload), args.out)
    return EXIT_OK


def _cmd_kernel_verify(args) -> int:
    try:
        mat = _load_matrix_file(args.input)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    n = mat.shape[0] if args.n is None else args.n
    if n != mat.shape[0]:
        print(f"error: --n {args.n} does not match file dimension {mat.shape[0]}",
              file=sys.stderr)
        return EXIT_USAGE
    report = kernel.verify_master(mat, n, args.tol)
    payload = report.as_dict()
    payload["n"] = n
    if report.hermitian:
        payload["spectrum"] = [float(v) for v in np.sort(np.linalg.eigvalsh(mat))[::-1]]
    _emit(_dump_json(payload), args.out)
    return EXIT_OK if report.ok(args.tol) else EXIT_FAIL


def _cmd_composite_verify(args) -> int:
    try:
        mat = _load_matrix_file(args.input)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.dims.check(mat.shape[0])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = composite.verify_composite_master(mat, args.dims, args.tol)
    _emit(_dump_json(report.as_dict()), args.out)
    return EXIT_OK if report.admissible(args.tol) else EXIT_FAIL


def _cmd_wigner_eval(args) -> int:
    try:
        state_mat = _load_matrix_file(args.state)
        kernel_mat = _load_matrix_file(args.kernel)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rho = linalg.DensityMatrix(state_mat)
        ker = kernel.SWKernel(kernel_mat, kernel_mat.shape[0])
        value = kernel.wigner_value(rho, ker)
    except ValueError as exc:
        print(f"error: invalid inputs: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(_dump_json({"w": value}), args.out)
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    if args.n < 2:
        print(f"error: no kernel spectrum exists at n={args.n}", file=sys.stderr)
        return EXIT_USAGE
    spec = kernel.solve_kernel_spectrum(args.n, "random", seed=args.seed)
    rho = linalg.random_density(args.n, args.seed + 1)
    exact = kernel.reconstruct_exact(rho, spec)
    exact_residual = float(np.linalg.norm(exact - rho.mat))
    ladder = []
    for rung, samples in enumerate(args.samples):
        estimate = kernel.reconstruct_mc(rho, spec, samples, (args.seed, rung))
        ladder.append({
            "samples": samples,
            "frobenius_error": float(np.linalg.norm(estimate - rho.mat)),
        })
    if args.format == "json":
        payload = {
            "n": args.n,
            "seed": args.seed,
            "exact_residual": exact_residual,
            "ladder": ladder,
        }
        _emit(_dump_json(payload), args.out)
    else:
        buf = io.StringIO()
        buf.write("samples,frobenius_error\n")
        for row in ladder:
            buf.write(f"{row['samples']},{row['frobenius_error']!r}\n")
        buf.write(f"exact,{exact_residual!r}\n")
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _cmd_moduli_scan(args) -> int:
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    records = twoqubit.moduli_scan(args.n, args.seed, ranges=args.ranges,
                                   zero_params=args.zero_params)
    if args.format == "csv":
        buf = io.StringIO()
        twoqubit.scan_to_csv(records, buf)
        text = buf.getvalue()
    else:
        text = _dump_json(twoqubit.scan_to_json(records))
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "kernel":
            if args.kernel_command == "gen":
                return _cmd_kernel_gen(args)
            return _cmd_kernel_verify(args)
        if args.command == "composite":
            return _cmd_composite_verify(args)
        if args.command == "wigner":
            return _cmd_wigner_eval(args)
        if args.command == "reconstruct":
            return _cmd_reconstruct(args)
        if args.command == "moduli":
            return _cmd_moduli_scan(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError("unreachable")


def entry():
    sys.exit(main())
