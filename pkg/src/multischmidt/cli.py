"""Command-line front end.

Exit codes: 0 success or decomposable, 2 a well-formed negative answer,
1 an operational error (bad input, I/O).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import serialize as ser
from .density import reduced_density, schmidt_number
from .errors import SchmidtError
from .linalg import DEFAULT_TOL
from .multipartite import ACCEPT_TOL, decompose
from .partition import PartitionInstance, max_schmidt_partition, solve_partition
from .purification import purify
from .state import random_decomposable, residual

OK, ERROR, NEGATIVE = 0, 1, 2
PLANTED_SUFFIX = ".planted.json"


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(args, doc: dict, text: str) -> None:
    if args.format == "machine":
        print(ser.dumps(doc))
    else:
        print(text)


def _fmt_complex_vec(v) -> str:
    return "[" + ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in v) + "]"


def _verdict_text(doc: dict, name: str | None = None) -> str:
    head = f"{name}: " if name else ""
    if doc["decomposable"]:
        lines = [f"{head}decomposable, rank {doc['rank']}, residual {doc['residual']:.3e}",
                 "coeffs: " + " ".join(f"{c:.10g}" for c in doc["coeffs"])]
        for k, group in enumerate(doc.get("vectors", [])):
            for j, v in enumerate(group):
                lines.append(f"  subsystem {k} vector {j}: {_fmt_complex_vec([complex(*p) for p in v])}")
        return "\n".join(lines)
    out = f"{head}not decomposable ({doc['reason']}), residual {doc['residual']:.3e}"
    if doc.get("detail"):
        out += f"\n  {doc['detail']}"
    return out


def _classify_file(path: str, tol: float, accept_tol: float, full: bool) -> tuple[int, dict]:
    try:
        psi = ser.load_state(_read(path), tol)
        v = decompose(psi, tol, accept_tol)
    except (SchmidtError, OSError, ValueError) as exc:
        return ERROR, {"file": path, "error": f"{type(exc).__name__}: {exc}"}
    doc = ser.verdict_doc(v)
    if not full:
        doc.pop("vectors", None)
    return (OK if v.decomposable else NEGATIVE), doc


def _expand(paths: list[str]) -> list[str]:
    out = []
    for p in paths:
        if p != "-" and Path(p).is_dir():
            out += sorted(str(f) for f in Path(p).glob("*.json") if not f.name.endswith(PLANTED_SUFFIX))
        else:
            out.append(p)
    return out


def _cmd_classify(args, full: bool) -> int:
    files = _expand(args.files)
    if not files:
        print("error: no state files found", file=sys.stderr)
        return ERROR
    jobs = [(f, args.tol, args.accept_tol, full) for f in files]
    if args.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_classify_file, *zip(*jobs)))
    else:
        results = [_classify_file(*j) for j in jobs]

    batch = len(files) > 1
    for f, (code, doc) in zip(files, results):
        if code == ERROR:
            print(f"error: {doc['error']}", file=sys.stderr)
            continue
        if batch:
            doc = {"file": f, **doc}
        if args.format == "machine":
            print(ser.dumps(doc))
        else:
            print(_verdict_text(doc, f if batch else None))
    codes = [c for c, _ in results]
    if ERROR in codes:
        return ERROR
    return NEGATIVE if NEGATIVE in codes else OK


def cmd_check(args) -> int:
    return _cmd_classify(args, full=False)


def cmd_decompose(args) -> int:
    return _cmd_classify(args, full=True)


def cmd_schmidt_number(args) -> int:
    psi = ser.load_state(_read(args.file), args.tol)
    k = schmidt_number(psi, args.keep, args.tol)
    _emit(args, {"keep": args.keep, "schmidt_number": k}, f"Schmidt number across {args.keep}: {k}")
    return OK


def cmd_reduced(args) -> int:
    psi = ser.load_state(_read(args.file), args.tol)
    rho = reduced_density(psi, args.keep, args.tol)
    text = np.array2string(rho.matrix, precision=6, suppress_small=True, max_line_width=120)
    _emit(args, ser.density_doc(rho), text)
    return OK


def cmd_purify(args) -> int:
    rho = ser.load_density(_read(args.file))
    ar = purify(rho, args.ancilla_dim, args.tol)
    _emit(args, ser.state_doc(ar), f"dims {list(ar.dims)}\n{np.array2string(ar.amps, precision=6)}")
    return OK


def cmd_partition(args) -> int:
    if args.max:
        bip, kstar = max_schmidt_partition(args.dims)
        doc = {"left": list(bip.left), "right": list(bip.right), "left_product": bip.left_product,
               "right_product": bip.right_product, "K_star": kstar}
        _emit(args, doc, f"K* = {kstar}: left {list(bip.left)} ({bip.left_product}) | "
                         f"right {list(bip.right)} ({bip.right_product})")
        return OK
    if args.k is None:
        raise argparse.ArgumentTypeError("partition needs --k or --max")
    bip = solve_partition(PartitionInstance(args.dims, args.k))
    if bip is None:
        _emit(args, {"K": args.k, "found": False}, f"no bipartition reaches K = {args.k}")
        return NEGATIVE
    doc = {"K": args.k, "found": True, "left": list(bip.left), "right": list(bip.right),
           "left_product": bip.left_product, "right_product": bip.right_product}
    _emit(args, doc, f"left {list(bip.left)} ({bip.left_product}) | right {list(bip.right)} ({bip.right_product})")
    return OK


def planted_path(out: str) -> Path:
    p = Path(out)
    stem = p.name[: -len(".json")] if p.name.endswith(".json") else p.name
    return p.with_name(stem + PLANTED_SUFFIX)


def cmd_gen(args) -> int:
    psi, decomp = random_decomposable(args.dims, args.rank, args.seed)
    Path(args.out).write_text(ser.dumps(ser.state_doc(psi)))
    side = planted_path(args.out)
    side.write_text(ser.dumps(ser.decomposition_doc(decomp, residual(psi, decomp))))
    _emit(args, {"state": args.out, "planted": str(side)}, f"wrote {args.out} and {side}")
    return OK


def cmd_verify(args) -> int:
    psi = ser.load_state(_read(args.state), args.tol)
    decomp = ser.load_decomposition(_read(args.decomposition))
    if decomp.dims != psi.dims:
        res = float("nan")
        ok = False
    else:
        res = residual(psi, decomp)
        ok = res <= args.accept_tol
    _emit(args, {"residual": res, "match": ok}, f"residual {res:.3e} ({'match' if ok else 'mismatch'})")
    return OK if ok else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multischmidt", description="Schmidt decomposition of multipartite pure states.")
    ap.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    ap.add_argument("--accept-tol", type=float, default=ACCEPT_TOL,
                    help="largest reconstruction residual of an emitted decomposition (default 1e-8)")
    ap.add_argument("--format", choices=("text", "machine"), default="machine")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("check", cmd_check, "decide decomposability"),
                               ("decompose", cmd_decompose, "decide and print the full decomposition")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("files", nargs="+", help="state files or directories of them ('-' for stdin)")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for batches")
        p.set_defaults(func=fn)

    p = sub.add_parser("schmidt-number", help="Schmidt number across a cut")
    p.add_argument("file")
    p.add_argument("--keep", type=_int_list, required=True, help="subsystems on one side, e.g. 0,2")
    p.set_defaults(func=cmd_schmidt_number)

    p = sub.add_parser("reduced", help="reduced density matrix")
    p.add_argument("file")
    p.add_argument("--keep", type=_int_list, required=True)
    p.set_defaults(func=cmd_reduced)

    p = sub.add_parser("purify", help="purify a density matrix")
    p.add_argument("file")
    p.add_argument("--ancilla-dim", type=int, required=True)
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("partition", help="balanced bipartition of subsystem dimensions")
    p.add_argument("--dims", type=_int_list, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--max", action="store_true")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("gen", help="write a planted decomposable state and its decomposition")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--out", required=True, help="state file; the sidecar gets a .planted.json suffix")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="residual of a decomposition against a state")
    p.add_argument("state")
    p.add_argument("decomposition")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchmidtError, OSError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
