"""Command-line front end.

    gsis decompose --circulant 8 1,2 --save c8.json
    gsis gft --load c8.json x.txt
    gsis frame --complete 4 --scale 0.7 Phi.txt
    gsis uncertainty --complete 4 --Y 0 --Omega 2

Vertex indices (``--Y``) are 0-based like the graph edge lists; frequency
indices (``--Omega``, report fields) are 1-based.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import fgsis, filters, io, rkhs, spaces, special, spectral, uncertainty
from .errors import GsisError, GsisWarning
from .shifts import joint_eigendecomposition, standard_shifts, validate_shifts
from .tolerances import ToleranceConfig


class UsageError(Exception):
    exit_code = 2
    code = "UsageError"


# ---------------------------------------------------------------- inputs


def _int_list(text: str, what: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected a comma list of integers, got '{text}'") from None


def _float_list(text: str, what: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected a comma list of numbers, got '{text}'") from None


def _load_decomposition(args, tol):
    """Build (sd, extras) from whichever shift source the user gave."""
    sources = [
        bool(getattr(args, "shift_files", None) or args.shift),
        bool(args.graph),
        args.complete is not None,
        args.circulant is not None,
        args.load is not None,
    ]
    if sum(sources) != 1:
        raise UsageError(
            "give exactly one shift source: shift files, --graph, --complete, --circulant or --load"
        )
    extras = {}
    if args.load is not None:
        try:
            data = json.loads(Path(args.load).read_text())
            sd = spectral.import_decomposition(data)
        except (OSError, ValueError, KeyError) as exc:
            raise io.ParseError(f"{args.load}: cannot read decomposition ({exc})") from None
    elif args.complete is not None:
        sd = special.complete_graph_decomposition(args.complete, tol)
        extras["source"] = f"complete:{args.complete}"
    elif args.circulant is not None:
        n_text, q_text = args.circulant
        try:
            n = int(n_text)
        except ValueError:
            raise UsageError(f"--circulant: N must be an integer, got '{n_text}'") from None
        spec = special.CirculantSpec(n, tuple(_int_list(q_text, "--circulant")))
        cd = special.circulant_decomposition(spec, tol)
        sd = cd.sd
        extras["source"] = f"circulant:{n}:{','.join(map(str, spec.q))}"
        extras["wavenumber_to_sorted"] = [m + 1 for m in cd.permutation]
        extras["distinct_spectrum"] = special.circulant_distinct_spectrum(spec)
    else:
        if args.graph:
            graphs = [io.read_graph(p) for p in args.graph]
            kinds = args.kind or ["sym_laplacian"]
            shifts = standard_shifts(graphs, kinds if len(kinds) > 1 else kinds[0], tol)
        else:
            paths = list(getattr(args, "shift_files", None) or []) + list(args.shift or [])
            support = io.read_graph(args.support) if args.support else None
            shifts = validate_shifts([io.read_matrix(p) for p in paths], support, tol)
        je = joint_eigendecomposition(shifts, tol, args.seed)
        sd = spectral.build_decomposition(je, tol=tol)
    if args.scale is not None:
        sd = sd.scaled(args.scale)
        extras["scale"] = args.scale
    if args.save:
        Path(args.save).write_text(io.dumps(spectral.export_decomposition(sd)))
    return sd, extras


def _signal(path, sd):
    x = io.read_signal(path)
    if x.size != sd.N:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"{path}: signal has length {x.size}, expected {sd.N}")
    return x


def _columns(path, sd):
    a = io.read_matrix(path, square=False)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] != sd.N:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"{path}: {a.shape[0]} rows, expected {sd.N}")
    return a


def _omega(args, sd) -> list:
    """1-based --Omega list to 0-based indices."""
    if args.Omega is None:
        return []
    om = _int_list(args.Omega, "--Omega")
    bad = [m for m in om if not 1 <= m <= sd.M]
    if bad:
        from .errors import BandOutOfRange

        raise BandOutOfRange(f"--Omega entries {bad} outside 1..{sd.M}")
    return [m - 1 for m in om]


# ---------------------------------------------------------------- commands


def _identity_residuals(sd) -> dict:
    n = sd.N
    ps = sd.projections
    total = sum(ps)
    idem = max(float(np.max(np.abs(p @ p - p))) for p in ps)
    eig = 0.0
    for l, s in enumerate(sd.shifts.shifts):
        for m, p in enumerate(ps):
            eig = max(eig, float(np.max(np.abs(s @ p - sd.frequencies[m, l] * p))))
    return {
        "eigen": sd.source.residual,
        "orthogonality": sd.source.orth_residual,
        "resolution_of_identity": float(np.max(np.abs(total - np.eye(n)))),
        "idempotence": idem,
        "eigenspace": eig,
    }


def cmd_decompose(args, tol):
    sd, extras = _load_decomposition(args, tol)
    report = {
        "N": sd.N,
        "d": sd.d,
        "M": sd.M,
        "frequencies": sd.frequencies,
        "multiplicities": list(sd.multiplicities),
        "residuals": _identity_residuals(sd),
        "seed": args.seed,
    }
    report.update(extras)
    if args.projections:
        report["projections"] = list(sd.projections)
    if args.figure:
        from .plots import spectrum_figure

        spectrum_figure(sd, args.figure)
    return report


def cmd_gft(args, tol):
    sd, extras = _load_decomposition(args, tol)
    x = _signal(args.signal, sd)
    xh = spectral.gft(sd, x)
    report = {
        "N": sd.N,
        "M": sd.M,
        "components": xh.components,
        "energies": xh.energies(),
        "parseval_residual": abs(float(xh.energies().sum()) - float(x @ x)),
        "inverse_residual": float(np.max(np.abs(spectral.igft(xh) - x))),
    }
    if args.lowpass is not None:
        lp = spectral.lowpass(sd, x, args.lowpass)
        report["lowpass"] = {"K": args.lowpass, "bound": lp.bound, "error": lp.actual_err, "x_K": lp.x_k}
    if args.components_out:
        io.write_matrix(args.components_out, xh.components)
    report.update(extras)
    if args.figure:
        from .plots import energy_figure

        energy_figure(xh.energies(), args.figure)
    return report


def cmd_filter(args, tol):
    sd, extras = _load_decomposition(args, tol)
    if args.multiplier is not None:
        h = filters.spectral_multiplier(sd, _float_list(args.multiplier, "--multiplier")).matrix
    elif args.power is not None:
        vals = _float_list(args.power, "--power")
        if len(vals) != 2 or not float(vals[0]).is_integer() or not 1 <= vals[0] <= sd.d:
            raise UsageError(f"--power expects 'l,t' with 1 <= l <= {sd.d}")
        h = filters.fractional_shift(sd, int(vals[0]) - 1, vals[1]).matrix
    elif args.matrix is not None:
        h = io.read_matrix(args.matrix)
    else:
        raise UsageError("give a filter matrix file, --multiplier or --power")
    f = filters.classify_filter(sd, h, tol)
    report = f.to_dict()
    if f.tag != filters.GENERAL:
        blocks, res = filters.si_decompose(sd, f.matrix, tol)
        report["block_residual"] = res
        w = filters.center_witness(sd, f.matrix, args.seed, tol)
        report["center_witness_found"] = w is not None
        if w is not None:
            report["center_witness_commutator"] = float(np.max(np.abs(f.matrix @ w - w @ f.matrix)))
    report["basis_invariance"] = filters.basis_invariance_check(sd, f.matrix, seed=args.seed, tol=tol)
    if args.write:
        io.write_matrix(args.write, f.matrix)
    report.update(extras)
    return report


def cmd_space(args, tol):
    sd, extras = _load_decomposition(args, tol)
    if args.Omega is not None:
        u = spaces.bandlimited_space(sd, _omega(args, sd), tol)
    else:
        if args.basis is None:
            raise UsageError("give a basis or generator file, or --Omega for a bandlimited space")
        v = _columns(args.basis, sd)
        if args.generators:
            u, _ = fgsis.generate_space(sd, v, args.seed, tol)
        else:
            _, res = spaces.shift_invariance_residual(sd, spaces.Subspace.span(v, tol).basis)
            try:
                u = spaces.analyze_space(sd, v, tol)
            except GsisError as exc:
                if exc.code != "NotShiftInvariant":
                    raise
                report = {
                    "dim": spaces.Subspace.span(v, tol).dim,
                    "shift_invariant": False,
                    "si_residual": res,
                    "kernel_tag": rkhs.subspace_kernel(sd, v, tol).tag,
                }
                report.update(extras)
                return report
    report = u.to_dict()
    band = spaces.bandlimited_test(u)
    report["bandlimited"] = band is not None
    report["band"] = [m + 1 for m in band] if band is not None else None
    report["super_shift_invariant"] = spaces.super_si_probe(u, args.probes, args.seed, tol)
    report["shifted_equality"] = spaces.shifted_equality_test(u, tol)
    report["maximal_invariant_dim"] = spaces.maximal_invariant_subspace(u, tol).dim
    length, gens = fgsis.length_and_minimal_generators(u, args.seed, tol)
    report["length"] = length
    kern = rkhs.kernel_from_gsis(u, tol)
    report["kernel_tag"] = kern.kernel.tag
    report["reproducing_residual"] = kern.reproducing_residual()
    if args.basis_out:
        io.write_matrix(args.basis_out, u.space.basis)
    if args.generators_out and length:
        io.write_matrix(args.generators_out, gens)
    if args.kernel_out:
        io.write_matrix(args.kernel_out, kern.kernel.matrix)
    report.update(extras)
    return report


def _complete_predicates(args, phi, tol):
    if args.complete is None:
        return None
    return special.complete_graph_frame_predicates(args.complete, phi, tol)


def cmd_frame(args, tol):
    sd, extras = _load_decomposition(args, tol)
    phi = _columns(args.generators, sd)
    report = fgsis.frame_report(sd, phi, args.seed, args.horizon, tol)
    report.pop("dual", None)
    report["riesz"] = fgsis.riesz_check(sd, phi, args.seed, tol).to_dict()
    pred = _complete_predicates(args, phi, tol)
    if pred is not None:
        report["complete_graph"] = pred
    report.update(extras)
    if args.figure:
        from .plots import matrix_figure

        matrix_figure(report["A"], args.figure, "A[m, m']")
    return report


def cmd_dual(args, tol):
    sd, extras = _load_decomposition(args, tol)
    phi = _columns(args.generators, sd)
    du = fgsis.dual_frame(sd, phi, args.seed, tol=tol)
    report = du.to_dict()
    pred = _complete_predicates(args, phi, tol)
    if pred is not None:
        report["complete_graph"] = pred
    if args.dual_out and du.exists:
        io.write_matrix(args.dual_out, du.dual)
    report.update(extras)
    return report


def cmd_uncertainty(args, tol):
    sd, extras = _load_decomposition(args, tol)
    report = {}
    if args.Y is not None or args.Omega is not None:
        y = _int_list(args.Y or "", "--Y")
        pair = uncertainty.alpha(sd, y, _omega(args, sd))
        report.update(pair.to_dict())
        report["strong_annihilating"] = pair.alpha < 1.0
        if args.signal and pair.alpha < 1.0:
            x = _signal(args.signal, sd)
            report["annihilation"] = uncertainty.annihilation_bound(pair, x)
        if args.signal:
            x = _signal(args.signal, sd)
            et = uncertainty.concentration(x, pair.y_set)
            ef = uncertainty.concentration_fourier(sd, x, pair.omega_set)
            report["eps_T"] = et
            report["eps_F"] = ef
            report["donoho_stark"] = uncertainty.donoho_stark_check(pair, et, ef)
    if args.signal:
        report["supports"] = uncertainty.support_uncertainty(sd, _signal(args.signal, sd))
    report["coherence"] = uncertainty.coherence_norms(sd, args.exhaustive_limit, seed=args.seed)
    report.update(extras)
    return report


def cmd_kernel(args, tol):
    sd, extras = _load_decomposition(args, tol)
    if args.blocks:
        try:
            spec = json.loads(Path(args.blocks).read_text())
        except (OSError, ValueError) as exc:
            raise io.ParseError(f"{args.blocks}: {exc}") from None
        blocks = {}
        base = Path(args.blocks).parent
        for key, val in spec.items():
            m = int(key) - 1
            blocks[m] = io.read_matrix(base / val) if isinstance(val, str) else float(val)
        h = rkhs.inner_product_assemble(sd, blocks, tol)
    elif args.Omega is not None:
        h = rkhs.bandlimited_kernel(sd, _omega(args, sd), tol)
    else:
        raise UsageError("give --blocks or --Omega")
    report = {
        "dim": h.space.dim,
        "dim_fn": list(h.space.dim_fn),
        "tag": h.kernel.tag,
        "mu": list(h.kernel.mu) if h.kernel.mu is not None else None,
        "standard_inner_product": h.standard,
        "reproducing_residual": h.reproducing_residual(),
    }
    if args.kernel_out:
        io.write_matrix(args.kernel_out, h.kernel.matrix)
    report.update(extras)
    return report


# ---------------------------------------------------------------- output


def _flatten(obj, prefix=""):
    obj = io.to_jsonable(obj)
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return io.dumps(report)
    rows = list(_flatten(report))
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, json.dumps(v) if not isinstance(v, str) else v])
        return buf.getvalue()
    return "".join(f"{k} = {json.dumps(v) if not isinstance(v, str) else v}\n" for k, v in rows)


# ---------------------------------------------------------------- parser


def _source_options(p, positional_shifts=False):
    g = p.add_argument_group("shift source (exactly one)")
    if positional_shifts:
        p.add_argument("shift_files", nargs="*", metavar="SHIFT", help="shift matrix files")
    g.add_argument("--shift", action="append", metavar="FILE", help="shift matrix file (repeat)")
    g.add_argument("--graph", action="append", metavar="FILE", help="edge-list graph (repeat)")
    g.add_argument("--kind", action="append", choices=["adjacency", "laplacian", "sym_laplacian"])
    g.add_argument("--support", metavar="FILE", help="graph whose edges must contain the shift support")
    g.add_argument("--complete", type=int, metavar="N", help="complete graph K_N")
    g.add_argument("--circulant", nargs=2, metavar=("N", "Q"), help="circulant graph, Q as q1,q2,...")
    g.add_argument("--load", metavar="CACHE", help="decomposition saved with --save")
    p.add_argument("--save", metavar="CACHE", help="write the decomposition for later --load")
    p.add_argument("--scale", type=float, help="multiply every shift by this factor")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("-o", "--output", metavar="FILE", help="report destination (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsis", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"gsis {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="joint spectral decomposition of the shifts")
    _source_options(p, positional_shifts=True)
    p.add_argument("--projections", action="store_true", help="include the P_m in the report")
    p.add_argument("--figure", metavar="PNG", help="plot the joint frequencies")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("gft", help="graph Fourier transform of a signal")
    _source_options(p)
    p.add_argument("signal")
    p.add_argument("--lowpass", type=int, metavar="K", help="keep the K lowest frequencies")
    p.add_argument("--components-out", metavar="FILE", help="write the M x N components")
    p.add_argument("--figure", metavar="PNG", help="plot energy per frequency")
    p.set_defaults(func=cmd_gft)

    p = sub.add_parser("filter", help="classify a filter as polynomial, shift-invariant or general")
    _source_options(p)
    p.add_argument("matrix", nargs="?")
    p.add_argument("--multiplier", metavar="V1,..,VM", help="build sum_m v_m P_m instead")
    p.add_argument("--power", metavar="L,T", help="build the fractional shift S_L^T instead")
    p.add_argument("--write", metavar="FILE", help="write the filter matrix")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("space", help="analyze a subspace or a generated space")
    _source_options(p)
    p.add_argument("basis", nargs="?", help="N x k matrix of spanning columns")
    p.add_argument("--generators", action="store_true", help="columns generate the space")
    p.add_argument("--Omega", metavar="M1,M2", help="use the bandlimited space on these frequencies")
    p.add_argument("--probes", type=int, default=200)
    p.add_argument("--basis-out", metavar="FILE")
    p.add_argument("--generators-out", metavar="FILE", help="write a minimal generator set")
    p.add_argument("--kernel-out", metavar="FILE", help="write the reproducing kernel")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("frame", help="frame bounds and frame operator of shifted generators")
    _source_options(p)
    p.add_argument("generators", help="N x r generator matrix")
    p.add_argument("--horizon", type=int, help="truncate shift powers at this order")
    p.add_argument("--figure", metavar="PNG", help="plot the A matrix")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("dual", help="shift-invariant dual frame")
    _source_options(p)
    p.add_argument("generators", help="N x r generator matrix")
    p.add_argument("--dual-out", metavar="FILE", help="write dual generators when they exist")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("uncertainty", help="alpha(Y, Omega), support bounds and coherence norms")
    _source_options(p)
    p.add_argument("signal", nargs="?")
    p.add_argument("--Y", metavar="V1,V2", help="vertex set, 0-based")
    p.add_argument("--Omega", metavar="M1,M2", help="frequency set, 1-based")
    p.add_argument("--exhaustive-limit", type=int, default=2**24)
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser("kernel", help="reproducing kernel from per-frequency inner products")
    _source_options(p)
    p.add_argument("--blocks", metavar="JSON", help="{m: matrix-file or scalar}, m 1-based")
    p.add_argument("--Omega", metavar="M1,M2", help="bandlimited kernel on these frequencies")
    p.add_argument("--kernel-out", metavar="FILE")
    p.set_defaults(func=cmd_kernel)
    return parser


def _fail(exc, fmt: str) -> int:
    code = getattr(exc, "code", type(exc).__name__)
    if fmt == "json":
        err = {"error": {"code": code, "message": str(exc)}}
        details = getattr(exc, "details", None)
        if details:
            err["error"]["details"] = details
        sys.stderr.write(io.dumps(err))
    else:
        sys.stderr.write(f"error: {code}: {exc}\n")
    return exc.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = ToleranceConfig.from_env()
    except (KeyError, ValueError) as exc:
        exc = UsageError(f"bad GSIS_TOL_OVERRIDE: {exc}")
        return _fail(exc, args.format)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = args.func(args, tol)
        notes = sorted({type(w.message).__name__ for w in caught if issubclass(w.category, GsisWarning)})
        if notes:
            report["warnings"] = notes
    except (GsisError, io.ParseError, UsageError) as exc:
        return _fail(exc, args.format)
    except OSError as exc:
        exc2 = UsageError(f"{exc.filename}: {exc.strerror}")
        exc2.code = "FileError"
        return _fail(exc2, args.format)
    text = render(report, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
