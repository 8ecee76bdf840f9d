"""Command-line interface: ``simulate``, ``estimate``, ``mc`` and ``score-demo``.

Series files are plain text with one observation per line; lines starting
with ``#`` are ignored.  ``--config FILE`` reads ``key=value`` lines that
act as default flags; flags given on the command line take precedence.
"""

import argparse
import sys

import numpy as np

from .adapt import FAMILIES, estimate, wald_test
from .innovations import KINDS, InnovationDist, stream
from .mc import McConfig, run_tables
from .model import ModelSpec, ThetaFull, simulate
from .residuals import trend_matrix
from .score import BasisConfig, eval_score, fit_score


def _floats(text):
    text = (text or "").strip()
    return tuple(float(v) for v in text.split(",")) if text else ()


def _ints(text):
    return tuple(int(v) for v in _floats(text))


def _model(text):
    """Parse ``farima:p,q`` into AR and MA orders."""
    if not text:
        return 0, 0
    kind, _, orders = text.partition(":")
    if kind != "farima":
        raise ValueError(f"unknown model {text!r}; expected farima:p,q")
    p, q = (int(v) for v in orders.split(","))
    return p, q


def read_series(path):
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                values.append(float(line))
    return np.array(values)


def write_series(path, x, header=()):
    with open(path, "w") as fh:
        for h in header:
            fh.write(f"# {h}\n")
        for v in x:
            fh.write(f"{v:.17g}\n")


def _config_args(argv):
    """Expand ``--config FILE`` into flags placed before the explicit ones."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            value = value.strip()
            if value.lower() in ("true", "yes"):
                extra.append(flag)
            elif value.lower() not in ("false", "no"):
                extra += [flag, value]
    # subcommand stays first so its parser sees the file flags
    return rest[:1] + extra + rest[1:]


def build_parser():
    p = argparse.ArgumentParser(prog="fracadapt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a FARIMA series with optional trend")
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--dist", choices=KINDS, default="gaussian")
    s.add_argument("--burn-in", type=int, default=5000)
    s.add_argument("--sigma2", type=float, default=1.0)
    s.add_argument("--model", default="farima:0,0")
    s.add_argument("--ar", default="", help="comma-separated AR coefficients")
    s.add_argument("--ma", default="", help="comma-separated MA coefficients")
    s.add_argument("--trend", default="", help="comma-separated trend exponents")
    s.add_argument("--mu", default="", help="comma-separated trend coefficients")

    e = sub.add_parser("estimate", help="initial and one-step estimates for a series file")
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--model", default="farima:0,0")
    e.add_argument("--trend", default="")
    e.add_argument("--phi", default="id", choices=("id", "identity", "bounded"))
    e.add_argument("--L", type=int, default=1)
    e.add_argument("--initial", default="css", choices=("whittle", "css"))
    e.add_argument("--grid-lo", type=float, default=-0.4)
    e.add_argument("--grid-hi", type=float, default=1.75)
    e.add_argument("--grid-step", type=float, default=0.01)
    e.add_argument("--taper-order", type=int, default=2)
    e.add_argument("--parametric", choices=sorted(FAMILIES), default=None)
    e.add_argument("--wald-xi", type=float, default=None, help="test xi equal to this value")
    e.add_argument("--one-sided", action="store_true")
    e.add_argument("--format", choices=("text", "csv"), default="text")

    m = sub.add_parser("mc", help="Monte Carlo relative-efficiency tables")
    m.add_argument("--table", type=int, choices=range(1, 6), default=None)
    m.add_argument("--dist", choices=KINDS, default=None)
    m.add_argument("--n", type=int, default=64)
    m.add_argument("--reps", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--xi0", default="", help="comma-separated true memory values")
    m.add_argument("--L", dest="L_list", default="", help="comma-separated L values")
    m.add_argument("--phi", dest="phi_list", default="", help="comma-separated phi kinds")
    m.add_argument("--initial", default="whittle", choices=("whittle", "css"))
    m.add_argument("--taper-order", type=int, default=2)
    m.add_argument("--burn-in", type=int, default=5000)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--out", default=None)
    m.add_argument("--format", choices=("text", "csv"), default="text")

    d = sub.add_parser("score-demo", help="series score fits on a simulated innovation sample")
    d.add_argument("--dist", choices=KINDS, default="gaussian")
    d.add_argument("--n", type=int, default=10000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--phi", default="id", choices=("id", "identity", "bounded"))
    d.add_argument("--L", type=int, default=4)

    for sp in (s, e, m, d):
        sp.add_argument("--config", default=None, help="key=value defaults file")
    return p


def _cmd_simulate(a, out):
    p, q = _model(a.model)
    spec = ModelSpec(p, q)
    nu = _floats(a.ar) + _floats(a.ma)
    if len(nu) != p + q:
        raise ValueError(f"model farima:{p},{q} needs {p + q} coefficients, got {len(nu)}")
    theta = ThetaFull(a.xi, nu, (), a.sigma2).validate(spec)
    rng = stream(a.seed, 0)
    eps = InnovationDist(a.dist).sample(a.n + a.burn_in, rng)
    x = simulate(theta, spec, a.n, eps, a.burn_in)
    tau, mu = _floats(a.trend), _floats(a.mu)
    if len(tau) != len(mu):
        raise ValueError("--trend and --mu need the same number of entries")
    if tau:
        x = x + trend_matrix(tau, a.n) @ np.array(mu)
    write_series(a.out, x, [f"simulate xi={a.xi} n={a.n} seed={a.seed} dist={a.dist} model={a.model}"])
    print(f"wrote {a.n} observations to {a.out}", file=out)


def _fmt(v):
    return np.array2string(np.atleast_1d(np.asarray(v, dtype=float)), precision=6, separator=", ")


def _cmd_estimate(a, out):
    y = read_series(a.infile)
    p, q = _model(a.model)
    tau = _floats(a.trend)
    spec = ModelSpec(p, q, tau)
    kw = dict(grid_lo=a.grid_lo, grid_hi=a.grid_hi, grid_step=a.grid_step)
    if a.initial == "whittle":
        kw["taper_order"] = a.taper_order
    res = estimate(y, spec, tau, a.initial, BasisConfig(a.phi, a.L), a.parametric, **kw)
    test = None
    if a.wald_xi is not None:
        R = np.zeros((1, spec.p1))
        R[0, 0] = 1.0
        test = wald_test(res, R, [a.wald_xi], "theta1", a.one_sided)
    init = res.init
    if a.format == "csv":
        print("quantity,index,value", file=out)
        rows = [("theta1_tilde", init.theta1_tilde), ("theta1_hat", res.theta1_hat),
                ("se1", res.se1), ("theta2_tilde", init.theta2_tilde),
                ("theta2_hat", res.theta2_hat), ("se2", res.se2)]
        for name, vals in rows:
            for i, v in enumerate(np.atleast_1d(vals)):
                print(f"{name},{i},{float(v)!r}", file=out)
        print(f"sigma2_tilde,0,{float(init.sigma2_tilde)!r}", file=out)
        print(f"J,0,{float(res.J_used)!r}", file=out)
        if test is not None:
            print(f"wald_statistic,0,{float(test.statistic)!r}", file=out)
            print(f"wald_p_value,0,{float(test.p_value)!r}", file=out)
        return
    label = f"parametric ({res.family})" if res.method == "parametric" else f"adaptive (phi={BasisConfig(a.phi).phi_kind}, L={a.L})"
    print(f"n = {res.n}, initial = {init.method}, one-step = {label}", file=out)
    print(f"theta1_tilde (xi, nu) = {_fmt(init.theta1_tilde)}", file=out)
    print(f"sigma2_tilde          = {init.sigma2_tilde:.6g}", file=out)
    if init.hit_boundary:
        print("note: initial memory estimate is on the search boundary", file=out)
    print(f"theta1_hat            = {_fmt(res.theta1_hat)}", file=out)
    print(f"se(theta1_hat)        = {_fmt(res.se1)}", file=out)
    print(f"cov(theta1_hat)       =\n{np.array2string(res.cov1, precision=6)}", file=out)
    if res.theta2_hat.size:
        print(f"theta2_tilde          = {_fmt(init.theta2_tilde)}", file=out)
        print(f"theta2_hat            = {_fmt(res.theta2_hat)}", file=out)
        print(f"se(theta2_hat)        = {_fmt(res.se2)}", file=out)
        print(f"D_n                   = {_fmt(res.dn)}", file=out)
    print(f"J                     = {res.J_used:.6g}", file=out)
    if res.theta3_hat is not None and res.theta3_hat.size:
        print(f"theta3_hat            = {_fmt(res.theta3_hat)}", file=out)
    if test is not None:
        kind = "one-sided z" if test.one_sided else f"chi2({test.df})"
        print(f"Wald test xi = {a.wald_xi}: {kind} statistic = {test.statistic:.6g}, "
              f"p-value = {test.p_value:.6g}", file=out)


def _cmd_mc(a, out):
    over = dict(n=a.n, reps=a.reps, base_seed=a.seed, initial=a.initial,
                taper_order=a.taper_order, burn_in=a.burn_in, threads=a.threads)
    if _floats(a.xi0):
        over["xi0_list"] = _floats(a.xi0)
    if _ints(a.L_list):
        over["L_list"] = _ints(a.L_list)
    if a.phi_list:
        over["phi_kinds"] = tuple(a.phi_list.split(","))
    if a.table is not None:
        if a.dist is not None:
            over["dist"] = a.dist
        cfg = McConfig.table(a.table, **{k: v for k, v in over.items() if k != "dist"})
        if "dist" in over:
            cfg = McConfig(**{**cfg.__dict__, "dist": over["dist"]})
    else:
        cfg = McConfig(dist=a.dist or "gaussian", **over)
    tables = run_tables(cfg)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(tables.to_csv())
    print(tables.to_csv() if a.format == "csv" else tables.to_text(), end="", file=out)


def _cmd_score_demo(a, out):
    eps = InnovationDist(a.dist).sample(a.n, stream(a.seed, 0))
    true_j = InnovationDist(a.dist).info()
    print(f"dist = {a.dist}, n = {a.n}, phi = {BasisConfig(a.phi).phi_kind}, true J = {true_j:.6g}", file=out)
    for L in range(1, a.L + 1):
        fit = fit_score(eps, BasisConfig(a.phi, L))
        psi = eval_score(fit, eps)
        print(f"L = {L}: J_L = {fit.J_L:.6g}, a_hat = {_fmt(fit.a_hat)}, "
              f"mean psi = {psi.mean():.2e}", file=out)


COMMANDS = {"simulate": _cmd_simulate, "estimate": _cmd_estimate, "mc": _cmd_mc,
            "score-demo": _cmd_score_demo}


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        argv = _config_args(argv)
    except (OSError, IndexError) as exc:
        print(f"fracadapt: error: cannot read config: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except OSError as exc:
        print(f"fracadapt: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"fracadapt: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
