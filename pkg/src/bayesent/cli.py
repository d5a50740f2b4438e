"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 infeasible model (no admissible
space size can explain the observed support).
"""

import argparse
import csv
import math
import sys

from . import estimators, likelihood, simulate, svg
from .model import (
    ExponentialSize,
    GeometricSize,
    InfeasibleModelError,
    LogUniformC,
    PointMassC,
    PointMassSize,
    UniformSize,
    read_counts,
    read_table,
)
from .quad import DEFAULT_NODES


class InputError(Exception):
    pass


def _fmt(x):
    return f"{x:.6f}"


def _add_c_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--c", type=float, help="fixed concentration")
    g.add_argument("--c-log-uniform", nargs=2, type=float, metavar=("MIN", "MAX"),
                   help="log-uniform prior on c (default 1e-3 1e3)")
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes in ln c")


def _add_m_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--m", type=int, help="fixed number of bins")
    g.add_argument("--m-uniform", type=int, metavar="MAX", help="uniform prior on 1..MAX")
    g.add_argument("--m-geometric", nargs=2, metavar=("GAMMA", "MAX"),
                   help="P(m) ~ GAMMA**m on 1..MAX")
    g.add_argument("--m-exp", type=float, metavar="ALPHA", help="P(m) ~ exp(-ALPHA m)")


def _c_prior(args):
    if args.c is not None:
        return PointMassC(args.c)
    if args.c_log_uniform:
        return LogUniformC(*args.c_log_uniform)
    return LogUniformC()


def _size_prior(args, default_m):
    if args.m is not None:
        return PointMassSize(args.m)
    if args.m_uniform is not None:
        return UniformSize(args.m_uniform)
    if args.m_geometric:
        return GeometricSize(float(args.m_geometric[0]), int(args.m_geometric[1]))
    if args.m_exp is not None:
        return ExponentialSize(args.m_exp)
    return PointMassSize(default_m)


def _size_flag_given(args):
    return any(v is not None for v in (args.m, args.m_uniform, args.m_geometric, args.m_exp))


def _load(reader, path):
    try:
        return reader(path)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_entropy(args, out):
    n = _load(read_counts, args.counts)
    try:
        config = estimators.EstimatorConfig(_c_prior(args), _size_prior(args, max(len(n), 1)),
                                            args.nodes)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.tsallis is not None:
        est = estimators.entropy_moments_full(n, config, functional=("tsallis", args.tsallis))
        label = f"tsallis(q={args.tsallis:g})"
    else:
        est = estimators.entropy_moments_full(n, config)
        label = "entropy"
    print(f"functional   {label}", file=out)
    print(f"mean         {_fmt(est.mean)}", file=out)
    if est.variance is not None:
        print(f"variance     {_fmt(est.variance)}", file=out)
        print(f"std          {_fmt(math.sqrt(est.variance))}", file=out)
    print(f"N            {n.N}", file=out)
    print(f"M            {n.M}", file=out)
    print(f"size_terms   {est.n_size_terms}", file=out)
    print(f"c_nodes      {est.n_c_nodes}", file=out)
    print(f"tail_bound   {est.tail_bound:.3g}", file=out)
    if args.csv:
        _write_csv(args.csv, ["functional", "mean", "second_moment", "variance", "size_terms",
                              "c_nodes", "tail_bound"],
                   [[label, repr(est.mean), repr(est.second_moment), repr(est.variance),
                     est.n_size_terms, est.n_c_nodes, repr(est.tail_bound)]])
    return est


def cmd_mi(args, out):
    table = _load(read_table, args.table)
    nx, ny = table.dims
    c_prior = _c_prior(args)

    def size(flag, default):
        return UniformSize(flag) if flag is not None else PointMassSize(default)

    try:
        cx = estimators.EstimatorConfig(c_prior, size(args.mx_uniform, nx), args.nodes)
        cy = estimators.EstimatorConfig(c_prior, size(args.my_uniform, ny), args.nodes)
        cxy = estimators.EstimatorConfig(c_prior, size(args.mxy_uniform, nx * ny), args.nodes)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    est = estimators.mi_mean_full(table, cxy, cx, cy)
    hx, hy = est.extras["marginals"]
    print(f"mi           {_fmt(est.mean)}", file=out)
    print(f"H_X          {_fmt(hx)}", file=out)
    print(f"H_Y          {_fmt(hy)}", file=out)
    print(f"H_XY         {_fmt(est.extras['joint'])}", file=out)
    print(f"N            {table.N}", file=out)
    if args.csv:
        _write_csv(args.csv, ["mi", "H_X", "H_Y", "H_XY"],
                   [[repr(est.mean), repr(hx), repr(hy), repr(est.extras["joint"])]])
    return est


def cmd_size_posterior(args, out):
    n = _load(read_counts, args.counts)
    c_spec = _c_prior(args)
    try:
        # default range: every labeled bin in the file may or may not exist
        if _size_flag_given(args):
            size_prior = _size_prior(args, None)
        else:
            size_prior = UniformSize(max(len(n), 1))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    post = likelihood.size_posterior(n, c_spec, size_prior, n_nodes=args.nodes)
    print(f"mean         {_fmt(post.mean)}", file=out)
    print(f"map          {post.map}", file=out)
    print(f"M            {n.M}", file=out)
    print(f"support      {int(post.m[0])}..{int(post.m[-1])}", file=out)
    if args.csv:
        _write_csv(args.csv, ["m", "prob"], [[m, repr(p)] for m, p in post.rows()])
    if args.plot:
        svg.line_chart({"P(m|n)": (post.m.tolist(), post.prob.tolist())}, args.plot,
                       xlabel="|Z|", ylabel="posterior probability",
                       title="Posterior over the number of bins")
    return post


# ------------------------------------------------------------ sweep config

_CONFIG_TYPES = {
    "family": str,
    "target": str,
    "grid": lambda s: tuple(float(v) for v in s.replace(",", " ").split()),
    "roster": lambda s: tuple(s.replace(",", " ").split()),
    "m": int,
    "N": int,
    "replicates": int,
    "seed": int,
    "c_min": float,
    "c_max": float,
    "m_max": int,
    "marginal_m_max": int,
    "nsb_k_max": int,
    "nsb_marginal_k_max": int,
    "n_nodes": int,
}


def parse_config(text, name="<config>"):
    """Line-oriented ``key = value`` pairs; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{name}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_TYPES:
            raise InputError(f"{name}:{lineno}: unknown key '{key}'")
        try:
            values[key] = _CONFIG_TYPES[key](val)
        except ValueError:
            raise InputError(f"{name}:{lineno}: bad value for key '{key}': {val!r}") from None
    for key in ("family", "grid"):
        if key not in values:
            raise InputError(f"{name}: missing required key '{key}'")
    try:
        return simulate.SweepSpec(**values)
    except ValueError as exc:
        raise InputError(f"{name}: {exc}") from exc


def cmd_sweep(args, out):
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    spec = parse_config(text, args.config)
    result = simulate.run_sweep(spec)
    text = result.to_csv()
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.plot:
        series = {}
        for name in spec.roster:
            xs = list(spec.grid)
            series[name] = (xs, [result.rms(name, x) for x in xs])
        logx = spec.family == "dirichlet"
        svg.line_chart(series, args.plot, logx=logx,
                       xlabel="c" if logx else "alpha", ylabel="RMS error",
                       title=f"RMS error, {spec.target}, m={spec.m}, N={spec.N}")
    return result


def cmd_cmax(args, out):
    m = args.m
    if m.lower() not in ("inf", "infinite", "infinity"):
        try:
            m = int(m)
        except ValueError:
            raise InputError(f"--m must be an integer or 'infinite', got {m!r}") from None
        if m < 2:
            raise InputError("--m must be at least 2")
    value = likelihood.c_max(m)
    print(f"{value:.4f}", file=out)
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="bayesent",
                                     description="Bayesian entropy and information estimates from counts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="posterior entropy moments of a counts file")
    p.add_argument("counts")
    _add_c_flags(p)
    _add_m_flags(p)
    p.add_argument("--tsallis", type=float, metavar="Q", help="Tsallis entropy of index Q instead")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("mi", help="posterior mutual information of a joint-count CSV")
    p.add_argument("table")
    _add_c_flags(p)
    p.add_argument("--mx-uniform", type=int, metavar="MAX")
    p.add_argument("--my-uniform", type=int, metavar="MAX")
    p.add_argument("--mxy-uniform", type=int, metavar="MAX")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("size-posterior", help="posterior over the number of bins")
    p.add_argument("counts")
    _add_c_flags(p)
    _add_m_flags(p)
    p.add_argument("--csv")
    p.add_argument("--plot", help="write an SVG of P(m|n)")
    p.set_defaults(func=cmd_size_posterior)

    p = sub.add_parser("sweep", help="RMS-error benchmark from a config file")
    p.add_argument("config")
    p.add_argument("--csv", help="write the result table here instead of stdout")
    p.add_argument("--plot", help="write an SVG of RMS curves")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cmax", help="concentration maximizing the prior entropy variance")
    p.add_argument("--m", required=True, help="number of bins, or 'infinite'")
    p.set_defaults(func=cmd_cmax)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleModelError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
