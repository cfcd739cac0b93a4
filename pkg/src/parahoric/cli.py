"""Command line interface: one reproducible computation per subcommand, JSON on stdout."""
from __future__ import annotations

import functools
import json
import sys
from fractions import Fraction

import click

from .padic import INF, PadicNumber
from .weights import Weight, WeightError

SCHEMA_VERSION = 1
PREC_ENV = "PARAHORIC_PREC"


def fmt(x):
    """'u*p^v' with explicit absolute precision."""
    if isinstance(x, PadicNumber):
        return f"{x.compact()} + O(p^{x.prec})"
    return str(x)


def _num(x):
    if x == INF:
        return "inf"
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


def _library_errors():
    from .evalmaps import EvaluationError
    from .family import ChartError, FamilyError
    from .galdist import GaloisError
    from .modsym import SymbolError
    from .padic import PrecisionError
    from .pardist import DistributionError
    return (WeightError, SymbolError, EvaluationError, GaloisError, FamilyError, ChartError, DistributionError,
            PrecisionError)


def reported(fn):
    """Turn the package's own exceptions into a one-line CLI error."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _library_errors() as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}")
    return wrapper


def emit(payload):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))


def load_weight(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{path}: malformed JSON ({exc})")
    try:
        return Weight.from_json(data)
    except (WeightError, TypeError, ValueError) as exc:
        raise click.ClickException(f"{path}: schema error: {exc}")


def _stabilised(level, p, prec):
    from .modsym import hecke_classical, p_stabilise
    dec = hecke_classical(level)
    if not dec.rational:
        raise click.ClickException(f"no rational cuspidal eigensymbol at level {level}")
    sym = dec.rational[0]
    return sym, p_stabilise(sym, p, prec=prec)


@click.group()
@click.option("--prec", type=int, envvar=PREC_ENV, default=20, show_default=True,
              help=f"default p-adic precision N (also read from ${PREC_ENV})")
@click.pass_context
def main(ctx, prec):
    """p-adic computations for parahoric overconvergent cohomology."""
    if prec < 1:
        raise click.BadParameter("precision must be positive", param_hint="--prec")
    ctx.obj = {"prec": prec}


@main.command()
@reported
@click.option("--weight", "weight_path", required=True, type=click.Path(exists=True, dir_okay=False))
def crit(weight_path):
    """Critical integers, purity and regularity of a weight."""
    from .weights import contragredient, crit_range, regularity_flags
    lam = load_weight(weight_path)
    out = {"weight": lam.to_json(), "pure": lam.purity_weight() is not None}
    # both conventions, labelled: Crit of lam and of its contragredient
    out["crit"] = crit_range(lam) if out["pure"] else None
    out["crit_contragredient"] = crit_range(contragredient(lam)) if out["pure"] else None
    out.update(regularity_flags(lam))
    emit(out)


@main.command("slope-check")
@reported
@click.option("--weight", "weight_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", required=True, help="normalised eigenvalue, as an integer or 'u*p^e'")
@click.pass_obj
def slope_check(obj, weight_path, alpha):
    """Compare v_p of a normalised eigenvalue with the non-critical bound."""
    from .weights import non_q_critical_slope_check
    lam = load_weight(weight_path)
    try:
        a = PadicNumber.parse(alpha, lam.p, obj["prec"])
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--alpha")
    if a.is_zero():
        raise click.BadParameter("eigenvalue vanishes to the working precision", param_hint="--alpha")
    res = non_q_critical_slope_check(lam, {pr: a.val for pr in lam.primes})
    emit({"alpha": fmt(a), "slope": a.val,
          "primes": {pr: {"bound": b, "non_critical": ok} for pr, (ok, b) in res.items()}})


@main.command()
@reported
@click.option("--weight", "weight_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--j", "j", required=True, type=int)
@click.pass_obj
def branch(obj, weight_path, j):
    """Branching dimension at j and the coordinates of nu_{lam,j}."""
    from .reprs import branching_hom_dimension, build_irrep, nu_vector
    from .weights import crit_range
    lam = load_weight(weight_path)
    N = obj["prec"]
    dim = branching_hom_dimension(lam, j, N)
    out = {"j": j, "dimension": dim, "nu": None}
    if lam.d == 1 and j in crit_range(lam):
        nu = nu_vector(lam, j, N)
        rep = build_irrep(lam.lam[0], p=lam.p, N=nu.N)
        coords = rep.coords(nu.poly)
        out["nu"] = {"scale": f"p^-{nu.k}", "precision": nu.N,
                     "coordinates": [fmt(PadicNumber.from_residue(int(c), lam.p, nu.N)) for c in coords]}
    emit(out)


@main.command("up-slopes")
@reported
@click.option("--weight", "weight_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--M", "M", required=True, type=int)
def up_slopes(weight_path, M):
    """Newton polygon of the local U_p operator on the truncation at M moments."""
    from .pardist import DistributionModule, slopes
    lam = load_weight(weight_path)
    if M < 1:
        raise click.BadParameter("M must be at least 1", param_hint="--M")
    rep = slopes(DistributionModule(lam, M))
    mult = {}
    for s in rep["newton"].slopes:
        mult[s] = mult.get(s, 0) + 1
    rows = [{"slope": _num(s), "multiplicity": m, "trusted": s < M - 1} for s, m in sorted(mult.items())]
    table = ["slope      mult  trusted"] + [f"{str(r['slope']):<10} {r['multiplicity']:>4}  {r['trusted']}"
                                          for r in rows]
    emit({"M": M, "slopes": rows, "vertices": [[i, _num(v)] for i, v in rep["newton"].points],
          "table": table})


@main.command()
@reported
@click.option("--level", required=True, type=int)
@click.option("--p", "p", required=True, type=int)
@click.option("--M", "M", default=10, show_default=True, type=int)
def lift(level, p, M):
    """Overconvergent lift of the p-stabilised newform of the given level."""
    from .modsym import lift_noncritical
    sym, st = _stabilised(level, p, M + 5)
    defects = []
    Phi = lift_noncritical(st, M, report=defects)
    q = p**M
    spec_ok = all(int(a) % q == int(b) % q for a, b in zip(Phi.moment0_values(), st.values))
    U = Phi.space.up()
    eig = (Phi.space.apply(U, Phi) - Phi.scale(st.alpha)).min_scaled_valuation()
    emit({"level": st.N, "p": p, "M": M, "alpha": fmt(PadicNumber.from_residue(st.alpha % q, p, M)),
          "defect_valuations": defects, "specializes_to_classical": spec_ok,
          "eigen_defect_valuation": eig})


@main.command()
@reported
@click.option("--level", required=True, type=int)
@click.option("--p", "p", required=True, type=int)
@click.option("--beta", default=2, show_default=True, type=int)
@click.option("--M", "M", default=10, show_default=True, type=int)
def lp(level, p, beta, M):
    """Moment table of mu(Phi), admissibility and the beta-independence check."""
    from .evalmaps import padic_L_pipeline
    from .galdist import integral_normalization, is_h_admissible
    res = padic_L_pipeline(level, p, M=M, beta=beta)
    mu = res.mu
    hp = res.alpha.val
    norm, shift = integral_normalization(mu)
    ok, witness = is_h_admissible(norm, hp)
    table = {str(a): [fmt(x) for x in mu.comps[a]] for a in sorted(mu.comps)}
    rep = {k: v for k, v in res.report.items() if k in ("beta", "compared_with", "beta_independent", "lift_defects")}
    emit({"level": level, "p": p, "beta": beta, "M": M, "alpha": fmt(res.alpha), "moments": table,
          "admissibility": {"h": hp, "admissible": ok, "witness": _num(witness),
                            "normalization_shift": shift}, "report": rep})


@main.command()
@reported
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--h", "h", required=True, type=int)
@click.pass_obj
def reconstruct(obj, data_path, h):
    """Amice-Velu reconstruction from critical values, with a uniqueness certificate."""
    from .galdist import GaloisError, amice_velu_reconstruct, load_interpolation_data
    try:
        with open(data_path) as fh:
            doc = json.load(fh)
        p = int(doc["p"])
        crit_set = [int(j) for j in doc["crit"]]
        data = load_interpolation_data(doc["data"], p, obj["prec"] + 20)
        beta_out = int(doc.get("beta_out", 1))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise click.ClickException(f"{data_path}: schema error: {exc!r}")
    try:
        rec = amice_velu_reconstruct(data, h, crit_set, p, beta_out=beta_out)
    except GaloisError as exc:
        raise click.ClickException(str(exc))
    mu = rec.distribution
    emit({"p": p, "h": h, "precision": rec.precision,
          "moments": {str(a): [fmt(x) for x in mu.comps[a]] for a in sorted(mu.comps)},
          "is_zero": mu.is_zero(),
          "certificate": {k: _num(v) for k, v in rec.certificate.items()}})


@main.command("family-chart")
@reported
@click.option("--level", required=True, type=int)
@click.option("--p", "p", required=True, type=int)
@click.option("--D", "D", default=2, show_default=True, type=int)
@click.option("--h", "h", required=True, type=str, help="slope bound, e.g. 1/2")
@click.option("--M", "M", default=8, show_default=True, type=int)
def family_chart_cmd(level, p, D, h, M):
    """Local chart of the weight family through the ordinary p-stabilised newform."""
    from .family import ChartError, TruncatedAffinoid, family_chart, family_eigensymbol, specialization_check
    from .modsym import lift_noncritical
    try:
        hb = Fraction(h)
    except ValueError:
        raise click.BadParameter(f"cannot parse slope {h!r}", param_hint="--h")
    sym, st = _stabilised(level, p, M + 5)
    Phi0 = lift_noncritical(st, M)
    ring = TruncatedAffinoid(Weight.simple((0, 0), p), D=D, prec=M)
    fam = family_eigensymbol(st.N, ring, M, Phi0, st.alpha % p**M)
    try:
        chart = family_chart(fam, hb)
    except ChartError as exc:
        raise click.ClickException(str(exc))
    out = chart.to_json()
    out.update({"level": st.N, "p": p, "D": D, "h": str(hb), "precision": fam.precision,
                "specialization": specialization_check(fam)})
    emit(out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
