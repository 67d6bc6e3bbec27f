"""Command-line front end.

Exit codes: 0 finite, 3 infinite, 2 finiteness disagreement, 1 error.
Every output carries the run configuration and a sha256 of the inputs.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MixedFinitenessDisagreement, ZetaSizeError
from .estimator import ExponentPair, estimate, is_finite, openness_sigma
from .expr import ARPExpr, ratio_integrand
from .oracle import compare, integrate_disk, integrate_disk_mc
from .polynomial import ComplexPoly, roots

EXIT_FINITE, EXIT_ERROR, EXIT_DISAGREE, EXIT_INFINITE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tol: float | None = None
    rel_target: float = 1e-2
    tol_delta: float = 0.01
    d_cap: int = 4096
    out: str | None = None
    format: str = "json"
    params: dict = field(default_factory=dict)
    version: str = __version__


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def _read_arg(text: str) -> str:
    """Inline JSON, or @path to read it from a file."""
    if text.startswith("@"):
        return Path(text[1:]).read_text()
    return text


def _poly(text: str | None, default=None) -> ComplexPoly:
    if text is None:
        if default is None:
            raise ZetaSizeError("missing polynomial argument")
        return default
    return ComplexPoly.parse(_read_arg(text))


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ZetaSizeError(f"not a rational number: {text!r}") from exc


def _sha256(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(json.dumps(p, sort_keys=True, default=str).encode())
        h.update(b"\0")
    return h.hexdigest()


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    return x


def _emit(cfg: RunConfig, inputs: dict, payload: dict, csv_rows: list | None = None) -> None:
    header = {"config": asdict(cfg), "input_sha256": _sha256(inputs)}
    if cfg.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        buf.write("# " + json.dumps(header, default=str) + "\n")
        w = csv.writer(buf)
        for row in csv_rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps({**header, "result": payload}, indent=2, default=_json_default) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _config(args, **params) -> RunConfig:
    return RunConfig(command=args.command, seed=args.seed, tol=args.tol,
                     rel_target=getattr(args, "rel_target", 1e-2), out=args.out,
                     format=args.format, params=params)


def _finiteness_code(finite: bool) -> int:
    return EXIT_FINITE if finite else EXIT_INFINITE


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    P = _poly(args.P, ComplexPoly([1.0]))
    Q = _poly(args.Q)
    pair = ExponentPair(_rational(args.eps), _rational(args.delta))
    res = estimate(P, Q, pair, lam=args.lam, tol=args.tol)
    cfg = _config(args, eps=str(pair.eps), delta=str(pair.delta), lam=args.lam)
    rows = [["root_re", "root_im", "nu", "k", "phi", "contribution"]]
    for c in res.breakdown:
        r = c.root if c.root is not None else complex("nan")
        rows.append([r.real, r.imag, c.nu, c.k, _num(c.phi), _num(c.contribution)])
    _emit(cfg, {"P": P.to_json_obj(), "Q": Q.to_json_obj()}, res.to_json_obj(), rows)
    return _finiteness_code(res.finite)


def cmd_finiteness(args) -> int:
    P = _poly(args.P, ComplexPoly([1.0]))
    Q = _poly(args.Q)
    pair = ExponentPair(_rational(args.eps), _rational(args.delta))
    fin = is_finite(P, Q, pair, tol=args.tol)
    payload = {"finite": fin}
    if fin:
        payload["openness_sigma"] = str(openness_sigma(P, Q, pair, tol=args.tol))
    _emit(_config(args, eps=str(pair.eps), delta=str(pair.delta)),
          {"P": P.to_json_obj(), "Q": Q.to_json_obj()}, payload, [["finite"], [fin]])
    return _finiteness_code(fin)


def cmd_scales(args) -> int:
    from .scales import absolute_scales, scale_table

    Q = _poly(args.Q)
    rs = roots(Q, args.tol)
    table = scale_table(rs)
    payload = {"table": table.to_json_obj(), "absolute": absolute_scales(rs).values.tolist()}
    rows = [["root_re", "root_im"] + [f"L{k}" for k in range(rs.degree)]]
    for loc, row in zip(table.roots, table.scales):
        rows.append([loc.real, loc.imag] + list(map(float, row)))
    _emit(_config(args), {"Q": Q.to_json_obj()}, payload, rows)
    return EXIT_FINITE


def _family_instances(spec: dict, rng):
    """Instances from an explicit list or a generator: planted-gap sweeps or
    random coefficients."""
    pair = ExponentPair(_rational(str(spec.get("eps", "0"))), _rational(str(spec["delta"])))
    lam = float(spec.get("lambda", 1.0))
    out = []
    if "instances" in spec:
        for inst in spec["instances"]:
            P = ComplexPoly.from_json_obj(inst["P"]) if "P" in inst else ComplexPoly([1.0])
            out.append((P, ComplexPoly.from_json_obj(inst["Q"]), inst.get("sweep")))
    elif spec.get("generator") == "planted-gap":
        base = [complex(*r) if isinstance(r, list) else complex(r) for r in spec["roots"]]
        for t in spec["gaps"]:
            rts = base + [base[0] + float(t)]
            out.append((ComplexPoly([1.0]), ComplexPoly.from_roots(rts), float(t)))
    elif spec.get("generator") == "random-coefficient":
        N, M = int(spec["N"]), int(spec.get("M", 0))
        for _ in range(int(spec.get("count", 50))):
            qr = 0.45 * lam * np.sqrt(rng.random(N)) * np.exp(2j * np.pi * rng.random(N))
            pr = 0.45 * lam * np.sqrt(rng.random(M)) * np.exp(2j * np.pi * rng.random(M))
            P = ComplexPoly.from_roots(pr) if M else ComplexPoly([1.0])
            out.append((P, ComplexPoly.from_roots(qr), None))
    else:
        raise ZetaSizeError("family spec needs 'instances' or a known 'generator'")
    return pair, lam, out


def cmd_compare(args) -> int:
    spec = json.loads(_read_arg(args.family))
    rng = np.random.default_rng(args.seed)
    pair, lam, insts = _family_instances(spec, rng)
    if not insts:
        raise ZetaSizeError("empty family")
    family, sweep = [], []
    mc_rows = []
    for i, (P, Q, sw) in enumerate(insts):
        alg = estimate(P, Q, pair, lam=lam, tol=args.tol).value
        integ = ratio_integrand(P, Q, pair)
        det = integrate_disk(integ, lam, rel_target=args.rel_target)
        if args.mc_samples:
            mc = integrate_disk_mc(integ, lam, n_samples=args.mc_samples, seed=args.seed + i)
            mc_rows.append({"instance": i, "deterministic": _num(det.value), "mc": _num(mc.value),
                            "mc_stderr": mc.stderr})
        family.append((alg, det))
        sweep.append(sw if sw is not None else i + 1)
    has_sweep = any(sw is not None for *_, sw in insts)
    rep = compare(family, sweep if has_sweep else None)
    payload = {**rep.to_json_obj(), "spread": rep.spread, "mc_crosscheck": mc_rows}
    rows = [["instance_id", "algebraic", "oracle", "ratio", "sweep_param"]]
    rows += [[i, _num(a), _num(o), _num(r), s] for i, a, o, r, s in rep.samples]
    _emit(_config(args, eps=str(pair.eps), delta=str(pair.delta), lam=lam), spec, payload, rows)
    return EXIT_FINITE


def _germ(text: str):
    from .stability import Germ

    return Germ.from_json_obj(json.loads(_read_arg(text)))


def cmd_lct(args) -> int:
    from .stability import critical_exponent

    g = _germ(args.germ)
    bracket = tuple(float(_rational(x)) for x in args.bracket.split(",")) if args.bracket else None
    val = critical_exponent(g, bracket, tol_delta=args.tol_delta, seed=args.seed)
    payload = {"delta0": str(val) if isinstance(val, Fraction) else val,
               "lct": str(val / 2) if isinstance(val, Fraction) else val / 2}
    _emit(_config(args, bracket=args.bracket, tol_delta=args.tol_delta), g.to_json_obj(), payload,
          [["delta0"], [payload["delta0"]]])
    return EXIT_FINITE


def cmd_theta_sample(args) -> int:
    from .arp import sample_theta_integral

    P = _poly(args.P, ComplexPoly([1.0]))
    Qs = [ComplexPoly.from_json_obj(q) for q in json.loads(_read_arg(args.Qs))]
    pair = ExponentPair(_rational(args.eps), _rational(args.delta))
    res = sample_theta_integral(P, Qs, pair, lam=args.lam, d_cap=args.d_cap,
                                rel_target=args.rel_target, inner=args.inner)
    rows = [["theta", "value"]] + [[" ".join(map(str, t)), v] for t, v in res.profile]
    _emit(_config(args, eps=str(pair.eps), delta=str(pair.delta), lam=args.lam, d_cap=args.d_cap),
          {"P": P.to_json_obj(), "Qs": [q.to_json_obj() for q in Qs]}, res.to_json_obj(), rows)
    return _finiteness_code(math.isfinite(res.inf))


def cmd_regularize(args) -> int:
    from .arp import gate_report_markdown, regularize_integral, regularized_gate_report

    if args.gate_report:
        rep = regularized_gate_report()
        md = gate_report_markdown(rep)
        if args.out:
            Path(args.out).write_text(md)
        else:
            sys.stdout.write(md)
        return EXIT_FINITE
    P = _poly(args.P, ComplexPoly([1.0]))
    Qs = [ComplexPoly.from_json_obj(q) for q in json.loads(_read_arg(args.Qs))]
    pair = ExponentPair(_rational(args.eps), _rational(args.delta))
    mus = [float(x) for x in args.mus.split(",")]
    res = regularize_integral(ARPExpr((P,), tuple(Qs), pair), mus, lam=args.lam)
    rows = [["mu", "value", "abs_error"]] + [list(t) for t in res.trace]
    _emit(_config(args, eps=str(pair.eps), delta=str(pair.delta), mus=mus),
          {"P": P.to_json_obj(), "Qs": [q.to_json_obj() for q in Qs]}, res.to_json_obj(), rows)
    return _finiteness_code(not res.diverging)


def cmd_stability(args) -> int:
    from .stability import Germ, GermFamily, continuity_probe, perturbation_probe

    delta = _rational(args.delta)
    radii = [float(r) for r in args.radii.split(",")] if args.radii else None
    if args.family:
        fam = GermFamily.from_json_obj(json.loads(_read_arg(args.family)))
        grid = [float(x) for x in args.c_grid.split(",")]
        rep = continuity_probe(fam, delta, radii or [0.5] * fam.n, grid, args.samples, args.seed)
        inputs = fam.to_json_obj()
    else:
        g = _germ(args.germ)
        rhos = [float(x) for x in args.rhos.split(",")]
        rep = perturbation_probe([g], delta, rhos, seed=args.seed, radii=radii, n_samples=args.samples)
        inputs = g.to_json_obj()
    cfg = _config(args, delta=str(delta), radii=radii, samples=args.samples)
    _emit(cfg, inputs, rep.to_json_obj(), [["param", "value", "stderr", "verdict"]] + rep.rows)
    return EXIT_FINITE if rep.verdict == "PASS" else EXIT_DISAGREE


def cmd_distfn(args) -> int:
    from .stability import distribution_mu, germ_integral

    g = _germ(args.germ)
    alphas = [float(x) for x in args.alphas.split(",")]
    delta = _rational(args.delta) if args.delta else None
    I = None
    if delta is not None:
        I = germ_integral(g, delta, [args.radius] * g.n, n_samples=args.samples, seed=args.seed)
    rows = distribution_mu([g], alphas, args.radius, args.samples, args.seed, delta,
                           None if I is None or I.diverging else I.value,
                           0.0 if I is None else I.sigma())
    payload = {"rows": rows, "integral": None if I is None else _num(I.value)}
    keys = list(rows[0].keys())
    _emit(_config(args, alphas=alphas, radius=args.radius, delta=str(delta)), g.to_json_obj(), payload,
          [keys] + [[r[k] for k in keys] for r in rows])
    return EXIT_FINITE


def cmd_suite(args) -> int:
    from . import suites

    names = list(suites.SUITES) if args.name == "all" else [args.name]
    if any(n not in suites.SUITES for n in names):
        raise KeyError(args.name)
    results = []
    for n in names:
        r = suites.run(n, seed=args.seed, scale=args.scale)
        print(r.line(), file=sys.stderr)
        results.append(r)
    payload = {"results": [r.to_json_obj() for r in results],
               "passed": sum(r.passed for r in results), "total": len(results)}
    rows = [["number", "name", "passed", "summary", "seconds"]]
    rows += [[r.number, r.name, r.passed, r.summary, round(r.seconds, 3)] for r in results]
    _emit(_config(args, suite=args.name, scale=args.scale), {"suite": args.name}, payload, rows)
    return EXIT_FINITE if all(r.passed for r in results) else EXIT_DISAGREE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .suites import SUITES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="root clustering tolerance")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--rel-target", type=float, default=1e-2, dest="rel_target")

    pq = argparse.ArgumentParser(add_help=False)
    pq.add_argument("--P", default=None, help="numerator coefficients, ascending, JSON or @file")
    pq.add_argument("--eps", default="0", help="rational, e.g. 1/2")
    pq.add_argument("--delta", required=True, help="rational, e.g. 3/2")
    pq.add_argument("--lambda", type=float, default=1.0, dest="lam")

    ap = argparse.ArgumentParser(prog="zetasize", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("estimate", parents=[common, pq], help="root-scale size of int |P|^eps/|Q|^delta")
    s.add_argument("--Q", required=True)
    s.set_defaults(fn=cmd_estimate)

    s = sub.add_parser("finiteness", parents=[common, pq], help="exact finiteness test")
    s.add_argument("--Q", required=True)
    s.set_defaults(fn=cmd_finiteness)

    s = sub.add_parser("scales", parents=[common], help="cluster scale table of a polynomial's roots")
    s.add_argument("--Q", required=True)
    s.set_defaults(fn=cmd_scales)

    s = sub.add_parser("compare", parents=[common], help="estimator vs oracle over a family")
    s.add_argument("family", help="family spec JSON or @file")
    s.add_argument("--mc-samples", type=int, default=0, dest="mc_samples",
                   help="also run the Monte Carlo oracle with this many samples")
    s.set_defaults(fn=cmd_compare)

    s = sub.add_parser("lct", parents=[common], help="critical exponent of a germ")
    s.add_argument("--germ", required=True)
    s.add_argument("--bracket", default=None, help="lo,hi")
    s.add_argument("--tol-delta", type=float, default=0.01, dest="tol_delta")
    s.set_defaults(fn=cmd_lct)

    s = sub.add_parser("theta-sample", parents=[common, pq], help="theta-lattice infimum")
    s.add_argument("--Qs", required=True, help="JSON list of polynomials")
    s.add_argument("--d-cap", type=int, default=4096, dest="d_cap")
    s.add_argument("--inner", choices=("oracle", "estimator"), default="oracle")
    s.set_defaults(fn=cmd_theta_sample)

    s = sub.add_parser("regularize", parents=[common], help="mu-regularized integrals")
    s.add_argument("--P", default=None)
    s.add_argument("--Qs", default=None)
    s.add_argument("--eps", default="0")
    s.add_argument("--delta", default="1")
    s.add_argument("--lambda", type=float, default=1.0, dest="lam")
    s.add_argument("--mus", default="0.1,0.01,0.001,0.0001,0.00001,0.000001")
    s.add_argument("--gate-report", action="store_true", dest="gate_report",
                   help="write the validation report for the experimental regularized formula")
    s.set_defaults(fn=cmd_regularize)

    s = sub.add_parser("stability", parents=[common], help="continuity or perturbation probe")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--germ")
    g.add_argument("--family")
    s.add_argument("--delta", required=True)
    s.add_argument("--radii", default=None)
    s.add_argument("--c-grid", default="0,0.05,0.1,0.15,0.2", dest="c_grid")
    s.add_argument("--rhos", default="0.1,0.03,0.01,0.003")
    s.add_argument("--samples", type=int, default=100_000)
    s.set_defaults(fn=cmd_stability)

    s = sub.add_parser("distfn", parents=[common], help="sublevel-set volumes")
    s.add_argument("--germ", required=True)
    s.add_argument("--alphas", default="0.01,0.1,0.5")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--delta", default=None, help="also check the bound alpha^delta * I")
    s.add_argument("--samples", type=int, default=200_000)
    s.set_defaults(fn=cmd_distfn)

    s = sub.add_parser("suite", parents=[common], help="run an acceptance suite")
    s.add_argument("name", choices=list(SUITES) + ["all"])
    s.add_argument("--scale", type=float, default=1.0, help="fraction of the full instance counts")
    s.set_defaults(fn=cmd_suite)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:      # usage errors share the generic error code
        return EXIT_ERROR if exc.code else EXIT_FINITE
    try:
        return args.fn(args)
    except MixedFinitenessDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except (ZetaSizeError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
