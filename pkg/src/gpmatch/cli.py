"""Command-line front end: generate, run, verify and benchmark."""
from __future__ import annotations

import csv
import json
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import deterministic, generators, intervals, randomized
from .core import (BAND, InputError, IntervalRelation, MatchRelation, MismatchTable,
                   as_symbols, brute_count, num_alignments)
from .discrepancy import SetSystem, build_partition, colour, random_set_system
from .io import read_relation, read_symbols, write_relation, write_symbols
from .superimposed import build_code, verify_code

REPORT_ALGOS = ("brute", "rand-d", "rand-s", "det-d", "det-s", "interval", "threshold")
COUNT_ALGOS = ("brute", "rand-count", "det-d", "det-s", "interval", "threshold")
ALL_ALGOS = tuple(dict.fromkeys(REPORT_ALGOS + COUNT_ALGOS))


class _Group(click.Group):
    """Maps input errors to exit status 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)


# -- shared option handling -------------------------------------------------------

def _eps(value):
    if value is None:
        return None
    try:
        e = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{value!r} is not a number") from None
    if not 0 < e < 1:
        raise click.BadParameter("eps must lie in (0, 1)")
    return e


def _check_flags(algo: str, eps, delta) -> None:
    if algo in ("rand-count", "det-d", "det-s") and eps is None:
        raise click.UsageError(f"--eps is required for --algo {algo}")
    if algo == "threshold" and delta is None:
        raise click.UsageError("--delta is required for --algo threshold")


def _as_interval(rel) -> IntervalRelation:
    return rel if isinstance(rel, IntervalRelation) else IntervalRelation.from_relation(rel)


def _as_graph(rel) -> MatchRelation:
    return rel.to_relation() if isinstance(rel, IntervalRelation) else rel


def _threshold_relation(T, P, delta, rel=None) -> IntervalRelation:
    sigma_t = rel.sigma_t if rel is not None else int(T.max()) + 1
    sigma_p = rel.sigma_p if rel is not None else int(P.max()) + 1
    return IntervalRelation.threshold(sigma_t, sigma_p, delta)


def run_count(algo, T, P, rel, eps=None, c=2, seed=0, delta=None) -> MismatchTable:
    cfg = randomized.MonteCarloConfig(c, seed)
    if algo == "brute":
        return brute_count(T, P, rel)
    if algo == "rand-count":
        return randomized.count_approx(T, P, _as_graph(rel), eps, cfg)
    if algo == "det-d":
        return deterministic.count_det_d(T, P, _as_graph(rel), eps)
    if algo == "det-s":
        return deterministic.count_det_s(T, P, _as_graph(rel), eps)
    if algo == "interval":
        return intervals.count_exact_i(T, P, _as_interval(rel))
    if algo == "threshold":
        return intervals.count_exact_i(T, P, _threshold_relation(T, P, delta, rel))
    raise click.UsageError(f"--algo {algo} does not count; choose from {', '.join(COUNT_ALGOS)}")


def run_report(algo, T, P, rel, c=2, seed=0, delta=None) -> list[int]:
    cfg = randomized.MonteCarloConfig(c, seed)
    half = Fraction(1, 2)
    if algo == "rand-d":
        return randomized.report_d(T, P, _as_graph(rel), cfg)
    if algo == "rand-s":
        return randomized.report_s(T, P, _as_graph(rel), cfg)
    if algo in ("det-d", "det-s", "brute", "interval", "threshold"):
        return run_count(algo, T, P, rel, half, c, seed, delta).zeros()
    raise click.UsageError(f"--algo {algo} does not report; choose from {', '.join(REPORT_ALGOS)}")


def _load(text, pattern, relation, need_relation=True):
    T = read_symbols(text)
    P = read_symbols(pattern)
    rel = read_relation(relation) if relation else None
    if rel is None and need_relation:
        raise click.UsageError("a relation file is required for this algorithm")
    if rel is not None:
        T = as_symbols(T, rel.sigma_t, "text")
        P = as_symbols(P, rel.sigma_p, "pattern")
    return T, P, rel


def _emit_report(alignments, fmt, zero_index):
    off = 1 if zero_index else 0
    out = []
    for i in alignments:
        out.append(json.dumps({"i": i - off}) if fmt == "json" else str(i - off))
    if out:
        click.echo("\n".join(out))


def _emit_counts(table: MismatchTable, fmt, zero_index):
    off = 1 if zero_index else 0
    rows = []
    if table.kind == BAND:
        lo, hi = table.bounds()
        for k, v in enumerate(table.values.tolist()):
            i = k + 1 - off
            if fmt == "json":
                rows.append(json.dumps({"i": i, "count": v, "lo": round(float(lo[k]), 6),
                                        "hi": round(float(hi[k]), 6), "w": table.w}))
            else:
                rows.append(f"{i} {v} {lo[k]:.6g} {hi[k]:.6g}")
    else:
        for k, v in enumerate(table.values.tolist()):
            i = k + 1 - off
            rows.append(json.dumps({"i": i, "count": v}) if fmt == "json" else f"{i} {v}")
    if rows:
        click.echo("\n".join(rows))


def _common(f):
    opts = [
        click.option("--eps", default=None, help="Approximation parameter in (0, 1), e.g. 0.25 or 1/4."),
        click.option("--c", "c", default=2, show_default=True, type=click.IntRange(min=1),
                     help="Error exponent of the Monte Carlo algorithms."),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option("--delta", default=None, type=click.IntRange(min=1), help="Threshold for --algo threshold."),
        click.option("--threads", default=1, show_default=True, type=click.IntRange(min=1)),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


_FORMAT = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
_ZERO = click.option("--zero-index", is_flag=True, help="Print 0-indexed alignments.")


@click.group(cls=_Group)
def main():
    """Generalised pattern matching: run, verify and benchmark the algorithms."""


# -- match / count ------------------------------------------------------------------

@main.command()
@click.argument("text", type=click.Path())
@click.argument("pattern", type=click.Path())
@click.argument("relation", type=click.Path(), required=False)
@click.option("--algo", type=click.Choice(REPORT_ALGOS), default="brute", show_default=True)
@_common
@_FORMAT
@_ZERO
def match(text, pattern, relation, algo, eps, c, seed, delta, threads, fmt, zero_index):
    """Report every alignment where the whole pattern matches."""
    # reporting through the deterministic counters always uses eps = 1/2
    _check_flags(algo, Fraction(1, 2), delta)
    T, P, rel = _load(text, pattern, relation, need_relation=algo != "threshold")
    _emit_report(run_report(algo, T, P, rel, c, seed, delta), fmt, zero_index)


@main.command()
@click.argument("text", type=click.Path())
@click.argument("pattern", type=click.Path())
@click.argument("relation", type=click.Path(), required=False)
@click.option("--algo", type=click.Choice(COUNT_ALGOS), default="brute", show_default=True)
@_common
@_FORMAT
@_ZERO
def count(text, pattern, relation, algo, eps, c, seed, delta, threads, fmt, zero_index):
    """Print the number of mismatching positions per alignment."""
    e = _eps(eps)
    _check_flags(algo, e, delta)
    T, P, rel = _load(text, pattern, relation, need_relation=algo != "threshold")
    _emit_counts(run_count(algo, T, P, rel, e, c, seed, delta), fmt, zero_index)


# -- gen ----------------------------------------------------------------------------

def _write_instance(out: Path, inst: generators.Instance) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_symbols(out / "text.txt", inst.T)
    write_symbols(out / "pattern.txt", inst.P)
    write_relation(out / "relation.txt", inst.rel)


def _print_params(inst):
    p = inst.params()
    click.echo(f"D={p['D']} S={p['S']} I={p['I']}")


@main.group()
def gen():
    """Write instance files (text.txt, pattern.txt, relation.txt) to a directory."""


@gen.command("random")
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--m", type=click.IntRange(min=1), required=True)
@click.option("--sigma-t", type=click.IntRange(min=1), required=True)
@click.option("--sigma-p", type=click.IntRange(min=1), required=True)
@click.option("--density", type=float, default=None)
@click.option("--degree-cap", type=int, default=None)
@click.option("--intervals", "intervals_per_char", type=int, default=None)
@click.option("--plant", is_flag=True, help="Plant one occurrence where the relation allows it.")
@click.option("--seed", default=0, type=int)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def gen_random(n, m, sigma_t, sigma_p, density, degree_cap, intervals_per_char, plant, seed, out):
    """Random instance in a density, degree-cap or intervals regime."""
    inst = generators.gen_random(n, m, sigma_t, sigma_p, density=density, degree_cap=degree_cap,
                                 intervals_per_char=intervals_per_char, seed=seed, plant=plant)
    _write_instance(Path(out), inst)
    _print_params(inst)


@gen.command("diagonal")
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--grant/--no-grant", default=False, help="Leave one diagonal all edges.")
@click.option("--seed", default=0, type=int)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def gen_diagonal(n, m, grant, seed, out):
    """Related-quadruple worst case: every character's degree is fixed."""
    inst = generators.gen_adversarial_diagonal(n, m, grant, seed)
    _write_instance(Path(out), inst)
    _print_params(inst)


def _read_matrix(path) -> np.ndarray:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        return np.array([[int(x) for x in r] for r in rows], dtype=np.int64)
    except ValueError:
        raise InputError(f"{path}: matrix rows must be equal-length 0/1 lists") from None


@gen.command("matrix")
@click.argument("a_file", type=click.Path(exists=True, dir_okay=False), required=False)
@click.argument("b_file", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--random", "shape", nargs=3, type=click.IntRange(min=1), default=None,
              help="Draw random x-by-y and y-by-z matrices instead of reading files.")
@click.option("--seed", default=0, type=int)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def gen_matrix(a_file, b_file, shape, seed, out):
    """Boolean matrix product reduction; also writes the designated alignments."""
    if shape:
        rng = np.random.default_rng(seed)
        x, y, z = shape
        A, B = rng.integers(0, 2, (x, y)), rng.integers(0, 2, (y, z))
    elif a_file and b_file:
        A, B = _read_matrix(a_file), _read_matrix(b_file)
    else:
        raise click.UsageError("give two matrix files or --random X Y Z")
    inst = generators.gen_matrix_reduction(A, B)
    out = Path(out)
    _write_instance(out, inst)
    al = inst.info["alignment"]
    prod = generators.boolean_product(A, B)
    rows = [f"{i + 1} {j + 1} {al[i, j]} {prod[i, j]}" for i in range(al.shape[0]) for j in range(al.shape[1])]
    (out / "alignments.txt").write_text("# row col alignment product\n" + "\n".join(rows) + "\n")
    _print_params(inst)


@gen.command("sys")
@click.option("--z", type=click.IntRange(min=1), required=True)
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--universe", type=click.IntRange(min=1), default=None, help="Defaults to z*k.")
@click.option("--seed", default=0, type=int)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen_sys(z, k, universe, seed, out):
    """Random set system: z sets of k elements each."""
    sys_ = random_set_system(z, k, universe or z * k, np.random.default_rng(seed))
    sys_.write(out)
    click.echo(f"z={sys_.z} k={sys_.k} U={sys_.universe_size}")


# -- verify -------------------------------------------------------------------------

def _dump(where: Path, T, P, rel, info: dict) -> None:
    where.mkdir(parents=True, exist_ok=True)
    write_symbols(where / "text.txt", T)
    write_symbols(where / "pattern.txt", P)
    write_relation(where / "relation.txt", rel)
    (where / "info.json").write_text(json.dumps(info, indent=2, default=str) + "\n")


def check_contract(algo, T, P, rel, eps, c, seed, delta, corrupt=False) -> tuple[bool, dict]:
    """Run ``algo`` and the brute oracle; return (contract holds, statistics)."""
    oracle_rel = _threshold_relation(T, P, delta, rel) if algo == "threshold" else rel
    h = brute_count(T, P, oracle_rel).values
    truth = [int(i) + 1 for i in np.flatnonzero(h == 0)]
    stats: dict = {}
    if algo in ("rand-d", "rand-s"):
        got = run_report(algo, T, P, rel, c, seed, delta)
        if corrupt and truth:
            got = got[1:]
        elif corrupt:
            got = got + [num_alignments(len(T), len(P)) + 1]
        missing = sorted(set(truth) - set(got))
        stats["false_positive"] = len(set(got) - set(truth)) > 0
        ok = not missing and set(got) <= set(range(1, len(h) + 1))
        if missing:
            stats["missing"] = missing[:10]
        return ok, stats
    table = run_count(algo, T, P, rel, eps, c, seed, delta)
    vals = table.values.copy()
    if corrupt and len(vals):
        vals[len(vals) // 2] += table.w * (len(P) + 1)
    if algo == "rand-count":
        bad = np.flatnonzero(vals > h)
        stats["covered"] = bool(np.all(vals >= (1 - eps) * h))
    elif table.kind == BAND:
        w, e = table.w, eps
        lo_ok = np.array([Fraction(int(v)) >= (1 - e) * w * int(x) for v, x in zip(vals, h)], dtype=bool)
        bad = np.flatnonzero(~lo_ok | (vals > w * h))
        rep = [int(i) + 1 for i in np.flatnonzero(vals == 0)]
        if rep != truth:
            bad = np.union1d(bad, np.flatnonzero((vals == 0) != (h == 0)))
    else:
        bad = np.flatnonzero(vals != h)
    if len(bad):
        k = int(bad[0])
        stats["alignment"] = k + 1
        stats["expected"] = int(h[k])
        stats["got"] = int(vals[k])
    return len(bad) == 0, stats


def _verify_instance(algo, n, m, sigma_t, sigma_p, degree_cap, ivl, seed):
    rng = np.random.default_rng(seed)
    plant = bool(rng.random() < 0.5)
    if algo in ("interval", "threshold"):
        return generators.gen_random(n, m, sigma_t, sigma_p, intervals_per_char=ivl, seed=seed, plant=plant)
    return generators.gen_random(n, m, sigma_t, sigma_p, degree_cap=degree_cap, seed=seed, plant=plant)


@main.command()
@click.argument("text", type=click.Path(), required=False)
@click.argument("pattern", type=click.Path(), required=False)
@click.argument("relation", type=click.Path(), required=False)
@click.option("--algo", type=click.Choice(ALL_ALGOS), required=True)
@_common
@click.option("--instances", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--n", default=300, show_default=True, type=click.IntRange(min=1))
@click.option("--m", default=16, show_default=True, type=click.IntRange(min=1))
@click.option("--sigma-t", default=32, show_default=True, type=click.IntRange(min=1))
@click.option("--sigma-p", default=32, show_default=True, type=click.IntRange(min=1))
@click.option("--degree-cap", default=3, show_default=True, type=click.IntRange(min=1))
@click.option("--intervals", "ivl", default=3, show_default=True, type=click.IntRange(min=1))
@click.option("--corrupt", is_flag=True, help="Negative control: tamper with the algorithm's output.")
@click.option("--dump", default="counterexample", show_default=True, type=click.Path(file_okay=False))
def verify(text, pattern, relation, algo, eps, c, seed, delta, threads, instances, n, m,
           sigma_t, sigma_p, degree_cap, ivl, corrupt, dump):
    """Check an algorithm against the brute oracle on given or random instances."""
    e = _eps(eps)
    if algo in ("rand-count", "det-d", "det-s") and e is None:
        e = Fraction(1, 4)
    if algo == "threshold" and delta is None:
        delta = 2
    if text:
        T, P, rel = _load(text, pattern, relation, need_relation=algo != "threshold")
        jobs = [(T, P, rel, seed)]
    else:
        jobs = []
        for k in range(instances):
            inst = _verify_instance(algo, n, m, sigma_t, sigma_p, degree_cap, ivl, seed + k)
            jobs.append((inst.T, inst.P, inst.rel, seed + k))

    def one(job):
        T, P, rel, s = job
        return check_contract(algo, T, P, rel, e, c, s, delta, corrupt)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(one, jobs))
    failures = [k for k, (ok, _) in enumerate(results) if not ok]
    line = f"algo={algo} instances={len(jobs)} failures={len(failures)}"
    if algo in ("rand-d", "rand-s"):
        fp = sum(st.get("false_positive", False) for _, st in results)
        line += f" false_positive_runs={fp}"
    if algo == "rand-count":
        cov = sum(st.get("covered", False) for _, st in results)
        line += f" coverage={cov}/{len(jobs)}"
    if failures:
        k = failures[0]
        T, P, rel, s = jobs[k]
        info = {"algo": algo, "seed": s, "eps": str(e), "c": c, "delta": delta, "corrupt": corrupt}
        info.update(results[k][1])
        _dump(Path(dump), T, P, rel if rel is not None else _threshold_relation(T, P, delta), info)
        click.echo(f"FAIL {line}")
        click.echo(f"counterexample: {json.dumps(info, default=str)} written to {dump}")
        sys.exit(1)
    click.echo(f"PASS {line}")


# -- bench --------------------------------------------------------------------------

def _int_list(value: str) -> list[int]:
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma separated list of integers") from None


@main.command()
@click.option("--algo", "algos", multiple=True, type=click.Choice(ALL_ALGOS), required=True)
@click.option("--n", "n_list", default="4096,8192,16384,32768,65536", show_default=True,
              help="Comma separated text lengths.")
@click.option("--m", default=32, show_default=True, type=click.IntRange(min=1))
@click.option("--sigma", default=64, show_default=True, type=click.IntRange(min=1))
@click.option("--degree-cap", default=4, show_default=True, type=click.IntRange(min=1))
@click.option("--intervals", "ivl", default=2, show_default=True, type=click.IntRange(min=1))
@click.option("--reps", default=3, show_default=True, type=click.IntRange(min=1))
@_common
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (default stdout).")
def bench(algos, n_list, m, sigma, degree_cap, ivl, reps, eps, c, seed, delta, threads, out):
    """Median wall-clock time per (algorithm, n) cell, as CSV."""
    e = _eps(eps) or Fraction(1, 4)
    delta = delta or 2
    rows = []
    for algo in algos:
        for n in _int_list(n_list):
            if algo in ("interval", "threshold"):
                inst = generators.gen_random(n, m, sigma, sigma, intervals_per_char=ivl, seed=seed)
            else:
                inst = generators.gen_random(n, m, sigma, sigma, degree_cap=degree_cap, seed=seed)
            p = inst.params()
            times = []
            for r in range(reps):
                t0 = time.perf_counter()
                if algo in ("rand-d", "rand-s"):
                    run_report(algo, inst.T, inst.P, inst.rel, c, seed + r, delta)
                else:
                    run_count(algo, inst.T, inst.P, inst.rel, e, c, seed + r, delta)
                times.append(time.perf_counter() - t0)
            rows.append({"algo": algo, "n": n, "m": m, "D": p["D"], "S": p["S"], "I": p["I"],
                         "eps": float(e), "threads": threads, "reps": reps,
                         "median_s": f"{statistics.median(times):.6f}"})
    fields = ["algo", "n", "m", "D", "S", "I", "eps", "threads", "reps", "median_s"]
    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            handle.close()


# -- discrepancy / codes ------------------------------------------------------------

@main.command()
@click.argument("system", type=click.Path())
@click.option("--partition", is_flag=True, help="Also build the recursive partition.")
def discrepancy(system, partition):
    """Colour a set-system file and audit the result."""
    sys_ = SetSystem.read(system)
    col = colour(sys_)
    bound = col.bound(sys_.k, sys_.z)
    verdict = {True: "PASS", False: "FAIL", None: "SKIPPED"}[col.audit_ok]
    click.echo(f"z={sys_.z} k={sys_.k} U={sys_.universe_size}")
    click.echo(f"max_discrepancy={col.max_discrepancy} alpha={col.alpha:.6f} bound={bound:.6f}")
    if col.G_audit is not None:
        click.echo(f"audit={verdict} G<={float(col.G_audit):.6g} limit={3 * sys_.z} retries={col.retries}")
    else:
        click.echo(f"audit={verdict} (k <= log2(3z): all +1 colouring)")
    if partition:
        f = build_partition(sys_)
        click.echo(f"partition iterations={f.iterations} labels={f.label_space} "
                   f"B={f.bound} limit={f.threshold:.6g}")


@main.command()
@click.argument("system", type=click.Path())
@click.option("--eps", default="1/2", show_default=True)
def codes(system, eps):
    """Build and verify a superimposed code for a set-system file."""
    e = _eps(eps)
    sys_ = SetSystem.read(system)
    code = build_code(sys_, e)
    rep = verify_code(code, sys_)
    click.echo(f"d={code.d} w={code.weight} l={code.length} B={code.bound} "
               f"degenerate={code.degenerate} min_surviving={rep.min_surviving} tau={float(rep.tau):.6g} "
               f"verdict={'PASS' if rep.ok else 'FAIL'}")
    if not rep.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
