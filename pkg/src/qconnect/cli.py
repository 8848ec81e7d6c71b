"""Command-line interface.

Every invocation writes one JSON result document to standard output::

    {"command": [...], "parameters": {...}, "outputs": {...}, "diagnostics": {...}}

Complex numbers are ``[re, im]`` pairs and matrices nested lists of pairs.
With ``--csv`` point sweeps and scans are written as CSV instead.

Exit status: 0 on success, 1 for invalid input, 2 for numeric failure.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .confluence import (
    DEFAULT_TAU0,
    ConfluentFamily,
    char_limit_scan,
    connection_limit_scan,
    default_eps_list,
    local_gen_limit,
    log_limit_scan,
    rows_to_csv,
)
from .connection import (
    build_triple,
    connection_P,
    connection_group_sample,
    gamma_path,
    pbreve,
)
from .errors import ContractError, DomainError, NumericFailure, QConnectError
from .flatcat import (
    FlatObject,
    GaloisElement,
    act,
    hom_space,
    jordan_tensor_decompose,
    naturality_check,
)
from .matfun import dunford
from .qcore import CharacterSpec, QParameter
from .ratsys import (
    RationalFunction,
    RationalMatrix,
    is_strictly_fuchsian,
    normalize_nonresonant,
    resonance_classes,
    singular_locus,
    system_from_dict,
)
from .reduction import DEFAULT_K, eval_gauge, reduce_at_infty, reduce_at_zero
from .thetafn import SeriesTolerance, cocycle_phi, psi, qchar, qlog, theta

MAX_TERMS_ENV = "QCONNECT_MAX_TERMS"
# used when neither --q nor --tau is given
DEFAULT_Q = 2.0

CSV_HELP = """CSV columns:
  special:     z_re,z_im,value_re,value_im
  confluence:  eps,probe,error  (probe is the scan row: the z index, or the
               matrix index 0 = gamma1, 1 = gamma2 for localgen)
"""


# encoding ---------------------------------------------------------------

def encode(x):
    """Convert numbers and arrays to JSON-ready values with [re, im] pairs."""
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return encode(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        # adding 0.0 turns -0.0 into 0.0
        return [float(x.real) + 0.0, float(x.imag) + 0.0]
    if isinstance(x, (float, np.floating)):
        return float(x) + 0.0
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def decode_complex(obj):
    """Inverse of :func:`encode` for a (nested) list of [re, im] pairs."""
    a = np.asarray(obj, dtype=float)
    if a.shape[-1] != 2:
        raise DomainError("expected [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def parse_complex(s) -> complex:
    if isinstance(s, (list, tuple)):
        return complex(float(s[0]), float(s[1]))
    if isinstance(s, (int, float, complex)):
        return complex(s)
    t = str(s).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        parts = t.split(",")
        if len(parts) == 2:
            try:
                return complex(float(parts[0]), float(parts[1]))
            except ValueError:
                pass
    raise DomainError(f"cannot parse complex number {s!r}")


def parse_grid(spec: str) -> list:
    """``start,stop,count,log|linear`` into a list of points."""
    parts = spec.split(",")
    if len(parts) != 4:
        raise DomainError("grid must be start,stop,count,log|linear")
    a, b = parse_complex(parts[0]), parse_complex(parts[1])
    try:
        n = int(parts[2])
    except ValueError as exc:
        raise DomainError("grid count must be an integer") from exc
    if n < 1:
        raise DomainError("grid count must be positive")
    kind = parts[3].strip()
    t = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1)
    if kind == "linear":
        return [complex(a + (b - a) * s) for s in t]
    if kind == "log":
        if a == 0 or b == 0:
            raise DomainError("log grid endpoints must be nonzero")
        r = b / a
        return [complex(a * r ** s) for s in t]
    raise DomainError("grid spacing must be log or linear")


def parse_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"matrix is not valid JSON: {exc}") from exc
    rows = [[parse_complex(e) for e in row] for row in obj]
    M = np.array(rows, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("matrix must be square")
    return M


def _q_from_args(args) -> QParameter:
    if getattr(args, "tau", None) is not None:
        return QParameter.from_tau(parse_complex(args.tau))
    if getattr(args, "q", None) is not None:
        return QParameter.from_q(parse_complex(args.q))
    return QParameter.from_q(DEFAULT_Q)


def _tolerance(args) -> SeriesTolerance:
    max_terms = 200
    env = os.environ.get(MAX_TERMS_ENV)
    if env:
        try:
            max_terms = int(env)
        except ValueError as exc:
            raise DomainError(f"{MAX_TERMS_ENV} must be an integer") from exc
    return SeriesTolerance(target=args.tol, max_terms=max_terms)


def _points(args) -> list:
    pts = [parse_complex(z) for z in (args.z or [])]
    if getattr(args, "grid", None):
        pts += parse_grid(args.grid)
    if not pts:
        raise DomainError("no evaluation points given (use --z or --grid)")
    return pts


def _load_system(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read system file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"system file is not valid JSON: {exc}") from exc
    return system_from_dict(doc)


def _q_params(q: QParameter) -> dict:
    return {"tau": q.tau, "q": q.q}


# subcommands ------------------------------------------------------------

def cmd_special(args):
    q = _q_from_args(args)
    tol = _tolerance(args)
    pts = _points(args)
    fn = args.function
    c = parse_complex(args.c) if args.c is not None else None
    d = parse_complex(args.d) if args.d is not None else None
    if fn in ("qchar", "phi", "psi") and c is None:
        raise DomainError(f"{fn} needs --c")
    if fn == "phi" and d is None:
        raise DomainError("phi needs --d")
    vals = []
    for z in pts:
        if fn == "theta":
            v = theta(z, q, tol)
        elif fn == "qlog":
            v = qlog(z, q, tol)
        elif fn == "qchar":
            v = qchar(c, z, q, tol)
        elif fn == "phi":
            v = cocycle_phi(c, d, z, q, tol)
        else:
            # the points play the role of a
            v = psi(z, c, q, tol)
        vals.append(v)
    params = {"function": fn, **_q_params(q), "c": c, "d": d}
    return params, {"points": pts, "values": vals}, {"tol_target": tol.target, "max_terms": tol.max_terms}, \
        ("special", pts, vals)


def _series_report(s):
    res = s.recurrence_residuals()
    return {
        "base_point": str(s.base_point),
        "constant_form": s.A0.A,
        "K": s.K,
        "trust_radius": float(s.trust_radius) if np.isfinite(s.trust_radius) else None,
        "effective_radius": float(s.effective_radius()) if np.isfinite(s.effective_radius()) else None,
        "coefficient_norms": np.linalg.norm(s.coeffs, axis=(1, 2)),
        "max_recurrence_residual": float(res.max()),
    }


def cmd_reduce(args):
    A = _load_system(args.system)
    q = A.q
    fuchs = is_strictly_fuchsian(A)
    outputs = {"strictly_fuchsian": fuchs.ok}
    diags = {"fuchsian_diagnostics": list(fuchs.diagnostics), "K": args.K}
    ends = ["0", "inf"] if args.at == "both" else [args.at]
    for end in ends:
        pt = 0 if end == "0" else "inf"
        B = A
        if args.normalize:
            B, F = normalize_nonresonant(A, pt)
            outputs[f"gauge_{end}_at_probe"] = F(0.5 + 0.25j)
        M = B.at_zero() if pt == 0 else B.at_infinity()
        outputs[f"resonances_{end}"] = [list(r) for r in resonance_classes(M, q)]
        s = reduce_at_zero(B, args.K) if pt == 0 else reduce_at_infty(B, args.K)
        outputs[f"series_{end}"] = _series_report(s)
        if args.z or args.grid:
            pts = _points(args)
            outputs[f"gauge_{end}"] = {"points": pts, "values": [eval_gauge(s, z) for z in pts]}
    loc = singular_locus(A)
    outputs["singular_locus"] = {"points": list(loc.points), "at_zero": loc.at_zero, "at_infinity": loc.at_infinity}
    return {"system": args.system, **_q_params(q)}, outputs, diags, None


def cmd_connect(args):
    A = _load_system(args.system)
    q = A.q
    t = build_triple(A, args.K)
    pts = _points(args)
    out = {"A0": t.A0.A, "Ainf": t.Ainf.A, "normalized": t.gauge is not None}
    what = set(args.what.split(","))
    if "M" in what:
        out["M"] = [t.M(z) for z in pts]
    if "gamma" in what:
        out["gamma"] = [gamma_path(t, z) for z in pts]
    if "P" in what:
        P = [connection_P(t, z) for z in pts]
        out["P"] = P
        out["ellipticity_residuals"] = [
            float(np.linalg.norm(connection_P(t, q.q * z) - Pz)) for z, Pz in zip(pts, P)
        ]
    if "pbreve" in what:
        out["pbreve"] = [pbreve(t, z) for z in pts]
    if "sample" in what:
        out["samples"] = connection_group_sample(t, pts, twisted=args.twisted)
    out["intertwining_residuals"] = [t.intertwining_residual(z) for z in pts]
    params = {"system": args.system, **_q_params(q), "points": pts, "what": sorted(what)}
    return params, out, {"K": args.K, "unsafe_spiral_points": list(t.sigma_set)}, None


def cmd_flat(args):
    q = _q_from_args(args)
    params = {"op": args.op, **_q_params(q)}
    if args.op == "plethysm":
        return {**params, "n": args.n, "p": args.p}, {"blocks": jordan_tensor_decompose(args.n, args.p)}, {}, None
    if args.matrix is None:
        raise DomainError("--matrix is required")
    X = FlatObject.of(parse_matrix(args.matrix), q)
    params["matrix"] = X.A
    if args.op == "dunford":
        d = dunford(X.A)
        return params, {"s": d.s, "u": d.u}, {}, None
    g = GaloisElement(CharacterSpec(int(args.alpha), parse_complex(args.beta)), parse_complex(args.lam))
    params["galois"] = {"alpha": g.gamma.alpha, "beta": g.gamma.beta, "lambda": g.lam}
    if args.op == "act":
        return params, {"action": act(g, X, q), "gamma_of_q": g.at_q(q)}, {}, None
    if args.target is None:
        raise DomainError("--target is required for hom and naturality")
    Y = FlatObject.of(parse_matrix(args.target), q)
    params["target"] = Y.A
    basis = hom_space(X, Y, q)
    out = {"hom_basis": [{"degree": k, "coefficient": F} for h in basis for k, F in h.terms.items()]}
    if args.op == "naturality":
        z0 = parse_complex(args.z0)
        out["naturality_residuals"] = [naturality_check(g, h, z0, q) for h in basis]
    return params, out, {}, None


def _family(args, q0):
    z = RationalFunction([0.0, 1.0])
    if args.btilde:
        try:
            with open(args.btilde) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read Btilde file: {exc}") from exc
        doc = dict(doc)
        doc.setdefault("tau", [q0.tau.real, q0.tau.imag])
        return ConfluentFamily(q0, system_from_dict(doc).A)
    b = RationalFunction([0.5]) * z / ((z - 2j) * (z + 3))
    if args.family == "rank1":
        return ConfluentFamily(q0, RationalMatrix([[b]]))
    if args.family == "rank2":
        return ConfluentFamily(q0, RationalMatrix([[0, b], [0, 0]]))
    return ConfluentFamily(q0, RationalMatrix([[0.3, 0], [z, 0.1j]]))


def cmd_confluence(args):
    q0 = QParameter.from_tau(parse_complex(args.tau0))
    eps = [float(e) for e in args.eps.split(",")] if args.eps else default_eps_list()
    params = {"scan": args.scan, "tau0": q0.tau, "eps": eps}
    rows = []
    out = {}
    if args.scan in ("char", "log"):
        pts = _points(args)
        params["points"] = pts
        if args.scan == "char":
            gamma = parse_complex(args.gamma)
            params["gamma"] = gamma
            errs = [char_limit_scan(q0, gamma, z, eps) for z in pts]
        else:
            errs = [log_limit_scan(q0, z, eps) for z in pts]
        out["errors"] = errs
        rows = [(e, i, err) for i, es in enumerate(errs) for e, err in zip(eps, es)]
    elif args.scan == "localgen":
        fam = _family(args, q0)
        e1, e2 = local_gen_limit(fam, eps)
        out["gamma1_errors"], out["gamma2_errors"] = e1, e2
        rows = [(e, 0, x) for e, x in zip(eps, e1)] + [(e, 1, x) for e, x in zip(eps, e2)]
    else:
        fam = _family(args, q0)
        probes = []
        for spec in args.probe or []:
            parts = spec.split(";")
            if len(parts) != 3:
                raise DomainError("probe must be z1;z2;same|across")
            probes.append((parse_complex(parts[0]), parse_complex(parts[1]), parts[2] == "same"))
        if not probes:
            probes = [
                (cmath.exp(1j * math.pi / 4), 3 * cmath.exp(1j * math.pi / 3), True),
                (cmath.exp(1j * math.pi / 4), cmath.exp(3j * math.pi / 4), False),
            ]
        params["probes"] = [[p[0], p[1], p[2]] for p in probes]
        rows = connection_limit_scan(fam, eps, probes, K=args.K)
        out["rows"] = [list(r) for r in rows]
    return params, out, {"K": getattr(args, "K", None)}, ("confluence", rows)


def cmd_selftest(args):
    from . import selftest

    results = selftest.run(args.filter)
    if args.filter and not results:
        raise DomainError(f"unknown module {args.filter!r}; choose from {selftest.modules()}")
    out = {"checks": [{"module": r.module, "name": r.name, "value": r.value, "bound": r.bound, "ok": r.ok}
                      for r in results]}
    out["passed"] = all(r.ok for r in results)
    return {"filter": args.filter}, out, {}, None


# driver -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_q(p):
    p.add_argument("--q", help=f"q as a complex number, |q| > 1 (default {DEFAULT_Q})")
    p.add_argument("--tau", help="tau with Im(tau) > 0 (wins over --q)")


def _add_points(p):
    p.add_argument("--z", action="append", help="evaluation point (repeatable)")
    p.add_argument("--grid", help="start,stop,count,log|linear")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qconnect", description=__doc__, epilog=CSV_HELP,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--pretty", action="store_true", help="indented JSON output")
    p.add_argument("--csv", action="store_true", help="CSV output for sweeps and scans")
    # the output flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--csv", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    sp = sub.add_parser("special", help="theta, qlog, qchar, phi, psi")
    sp.add_argument("function", choices=["theta", "qlog", "qchar", "phi", "psi"])
    _add_q(sp)
    _add_points(sp)
    sp.add_argument("--c")
    sp.add_argument("--d")
    sp.add_argument("--tol", type=float, default=1e-15)
    sp.set_defaults(func=cmd_special)

    rp = sub.add_parser("reduce", help="local reduction at 0 and infinity")
    rp.add_argument("--system", required=True)
    rp.add_argument("--at", choices=["0", "inf", "both"], default="both")
    rp.add_argument("--K", type=int, default=DEFAULT_K)
    rp.add_argument("--normalize", action="store_true")
    _add_points(rp)
    rp.set_defaults(func=cmd_reduce)

    cp = sub.add_parser("connect", help="connection triple, P, Pbreve, samples")
    cp.add_argument("--system", required=True)
    cp.add_argument("--K", type=int, default=DEFAULT_K)
    cp.add_argument("--what", default="M,P", help="comma list of M,P,pbreve,gamma,sample")
    cp.add_argument("--twisted", action="store_true", help="samples from Pbreve")
    _add_points(cp)
    cp.set_defaults(func=cmd_connect)

    fp = sub.add_parser("flat", help="flat objects and the Galois action")
    fp.add_argument("op", choices=["dunford", "hom", "act", "plethysm", "naturality"])
    _add_q(fp)
    fp.add_argument("--matrix", help="JSON matrix, entries numbers or [re, im]")
    fp.add_argument("--target", help="JSON matrix of the target object")
    fp.add_argument("--alpha", type=int, default=0)
    fp.add_argument("--beta", default="0")
    fp.add_argument("--lam", default="0")
    fp.add_argument("--z0", default="1")
    fp.add_argument("--n", type=int, default=2)
    fp.add_argument("--p", type=int, default=2)
    fp.set_defaults(func=cmd_flat)

    fl = sub.add_parser("confluence", help="q -> 1 scans")
    fl.add_argument("scan", choices=["char", "log", "localgen", "connection"])
    fl.add_argument("--tau0", default=str(DEFAULT_TAU0))
    fl.add_argument("--eps", help="comma list; default 2^-k, k = 2..7")
    fl.add_argument("--gamma", default="0.3+0.1j")
    fl.add_argument("--family", choices=["rank1", "rank2", "diag"], default="rank1")
    fl.add_argument("--btilde", help="system file whose matrix is Btilde")
    fl.add_argument("--probe", action="append", help="z1;z2;same|across")
    fl.add_argument("--K", type=int, default=DEFAULT_K)
    _add_points(fl)
    fl.set_defaults(func=cmd_confluence)

    st = sub.add_parser("selftest", help="run built-in invariant checks")
    st.add_argument("--filter", help="restrict to one module")
    st.set_defaults(func=cmd_selftest)
    return p


def _write_csv(payload, stream):
    kind = payload[0]
    if kind == "confluence":
        stream.write(rows_to_csv(payload[1]))
        return
    _, pts, vals = payload
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["z_re", "z_im", "value_re", "value_im"])
    for z, v in zip(pts, vals):
        w.writerow([repr(z.real), repr(z.imag), repr(complex(v).real), repr(complex(v).imag)])


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params, outputs, diags, csv_payload = args.func(args)
    except np.linalg.LinAlgError as exc:
        sys.stderr.write(json.dumps({"error": "LinAlgError", "message": str(exc)}) + "\n")
        return 2
    except (DomainError, ContractError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except (NumericFailure, ArithmeticError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    if args.csv and csv_payload is not None:
        _write_csv(csv_payload, sys.stdout)
    else:
        doc = {"command": argv,
               "parameters": params, "outputs": outputs, "diagnostics": diags}
        json.dump(encode(doc), sys.stdout, indent=2 if args.pretty else None, sort_keys=True)
        sys.stdout.write("\n")
    if args.command == "selftest" and not outputs["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
