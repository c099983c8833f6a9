"""Command-line front end: parsing, sweep orchestration, caching, CSV/JSON reports.

Exit codes: 0 success, 1 parse/config error, 2 bad curve (non-squarefree or
bad degree), 3 cap exceeded, 4 cache corruption.  Progress goes to stderr;
report data only to the output file (or stdout with ``--output -``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cache import CacheCorruptError, TraceCache
from .curves import (
    CapExceededError,
    CurveError,
    CurveSpec,
    TraceRecord,
    curve_from_poly,
    hyperelliptic_trace,
    l_polynomial_genus2,
    normalized_angle,
)
from .finite_field import primes_in
from .polynomials import IntPolynomial, ParseError, PolynomialError, parse_polynomial, poly_to_str
from .stats import (
    MEASURE_TAGS,
    empirical_moments,
    identify_st_class,
    ks_distance,
    moment_class,
    predict_rank,
    st_measure,
)
from .twist import (
    MobiusTransform,
    PetersonError,
    geometric_grid,
    nagao_series,
    peterson_D,
    twist_surface,
    verify_factorization,
    verify_mixed_factorization,
)

N_HARD_CAP = 10**7

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BAD_CURVE = 2
EXIT_CAP = 3
EXIT_CACHE = 4

_BLOCK = 128  # primes per worker block


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    f: str = ""
    D: str = ""
    sigma: str = ""
    N: int = 1000
    grid: str = "geometric:20"
    mode: str = "fast-twist"
    r: int = 2
    s_curves: list[str] = field(default_factory=list)
    threads: int = 1
    cache_dir: str | None = None
    output: str = "-"
    fmt: str = "csv"
    verify_cache: bool = False


def parse_mobius(text: str) -> MobiusTransform:
    """Parse "(a x + b)/(c x + d)" (shorthands like "1/x" and "-x" accepted)."""
    s = text.strip()
    if "/" in s:
        num_s, _, den_s = s.partition("/")
    else:
        num_s, den_s = s, "1"

    def linear(part: str, what: str) -> tuple[int, int]:
        part = part.strip()
        if part.startswith("(") and part.endswith(")"):
            part = part[1:-1]
        poly = parse_polynomial(part)
        if not poly.is_zero and poly.degree > 1:
            raise ParseError(f"{what} of a Moebius transform must be linear")
        c = poly.coeffs + (0, 0)
        return c[1], c[0]

    a, b = linear(num_s, "numerator")
    c, d = linear(den_s, "denominator")
    return MobiusTransform(a, b, c, d)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else str(v)


def _write_report(rows: list[dict], columns: list[str], cfg: ExperimentConfig) -> None:
    if cfg.fmt == "json":
        payload = [{k: row.get(k) for k in columns} for row in rows]
        text = json.dumps(payload, indent=2, default=_fmt) + "\n"
    else:
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row.get(k)) for k in columns) for row in rows]
        text = "\n".join(lines) + "\n"
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)


def _write_skipped(bad_polys: list[IntPolynomial], bad: set[int], n_max: int, cfg: ExperimentConfig) -> None:
    """Sidecar log of skipped bad primes with reasons (p=2 | lead | disc)."""
    if cfg.output == "-":
        return
    lines = []
    for p in sorted(q for q in bad if q <= n_max):
        if p == 2:
            reason = "p=2"
        elif any(f.lead % p == 0 for f in bad_polys):
            reason = "lead"
        else:
            reason = "disc"
        lines.append(f"{p},{reason}")
    with open(cfg.output + ".skipped", "w", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def _good_primes(bad: frozenset[int] | set[int], n_max: int) -> list[int]:
    return [p for p in primes_in(3, n_max + 1) if p not in bad]


def sweep_traces(
    f: IntPolynomial,
    primes: list[int],
    threads: int = 1,
    cache: TraceCache | None = None,
) -> list[tuple[int, int]]:
    """a_p(y^2 = f) for the given good primes, ascending; cache-aware.

    Workers compute disjoint prime blocks; the coordinator merges in ascending
    p and owns the single cache write, so output is independent of thread count.
    """
    need = [p for p in primes if cache is None or cache.get(p) is None]
    computed: dict[int, int] = {}
    if need:
        blocks = [need[i : i + _BLOCK] for i in range(0, len(need), _BLOCK)]

        def work(block: list[int]) -> list[tuple[int, int]]:
            return [(p, hyperelliptic_trace(f, p)) for p in block]

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(work, blocks))
        else:
            parts = [work(b) for b in blocks]
        for part in parts:
            computed.update(part)
        if cache is not None:
            cache.append(sorted(computed.items()))
    out = []
    for p in primes:
        a = computed.get(p)
        if a is None:
            a = cache.get(p)  # type: ignore[union-attr]
        out.append((p, a))
    return out


def run_verify_cache(f: IntPolynomial, cache: TraceCache) -> None:
    """Recompute every cached record; quarantine and fail on any disagreement."""
    for p, a in sorted(cache.records.items()):
        if hyperelliptic_trace(f, p) != a:
            cache._fail(f"cached a_p disagrees with recomputation at p={p}")


def _open_cache(cfg: ExperimentConfig, f: IntPolynomial) -> TraceCache | None:
    cache_dir = os.environ.get("NAGAOLAB_CACHE", cfg.cache_dir)
    if not cache_dir:
        return None
    cache = TraceCache(cache_dir, f)
    if cfg.verify_cache:
        run_verify_cache(f, cache)
    return cache


def _parse_grid(cfg: ExperimentConfig) -> list[int]:
    text = cfg.grid.strip()
    if text.startswith("geometric"):
        _, _, k = text.partition(":")
        points = int(k) if k else 20
        return geometric_grid(cfg.N, points)
    try:
        return sorted({int(v) for v in text.split(",")})
    except ValueError as e:
        raise ConfigError(f"bad grid {text!r}: {e}") from None


def _curve(cfg: ExperimentConfig) -> CurveSpec:
    if not cfg.f:
        raise ConfigError("--f is required")
    return curve_from_poly(parse_polynomial(cfg.f))


def _check_n(cfg: ExperimentConfig) -> None:
    if cfg.N > N_HARD_CAP:
        raise CapExceededError(f"N = {cfg.N} exceeds the hard cap {N_HARD_CAP}")


def cmd_trace(cfg: ExperimentConfig) -> None:
    _check_n(cfg)
    c = _curve(cfg)
    cache = _open_cache(cfg, c.f)
    traces = sweep_traces(c.f, _good_primes(c.bad_primes, cfg.N), cfg.threads, cache)
    rows = [{"p": p, "a": a} for p, a in traces]
    _write_report(rows, ["p", "a"], cfg)
    _write_skipped([c.f], set(c.bad_primes), cfg.N, cfg)


def cmd_lpoly(cfg: ExperimentConfig) -> None:
    _check_n(cfg)
    c = _curve(cfg)
    if c.genus != 2:
        raise CurveError("lpoly requires a genus-2 curve (degree 5 or 6)")
    rows = []
    for p in _good_primes(c.bad_primes, cfg.N):
        lp = l_polynomial_genus2(c, p)
        rows.append({"p": p, "a": lp.a, "b": lp.b})
    _write_report(rows, ["p", "a", "b"], cfg)
    _write_skipped([c.f], set(c.bad_primes), cfg.N, cfg)


def cmd_nagao(cfg: ExperimentConfig) -> None:
    _check_n(cfg)
    f = parse_polynomial(cfg.f) if cfg.f else None
    if f is None:
        raise ConfigError("--f is required")
    D = parse_polynomial(cfg.D) if cfg.D else f
    surface = twist_surface(f, D, cfg.mode)
    cache = _open_cache(cfg, f)
    traces = dict(
        sweep_traces(f, _good_primes(surface.bad_primes, cfg.N), cfg.threads, cache)
    )
    series = nagao_series(surface, cfg.N, _parse_grid(cfg), trace_provider=traces.__getitem__)
    rows = [
        {"N": n, "S1": s1, "S2": s2, "n_primes": k}
        for n, s1, s2, k in zip(series.n_grid, series.s1, series.s2, series.n_primes)
    ]
    _write_report(rows, ["N", "S1", "S2", "n_primes"], cfg)
    _write_skipped([f, D], set(surface.bad_primes), cfg.N, cfg)


def _moment_rows(cfg: ExperimentConfig) -> tuple[CurveSpec, list[TraceRecord], dict]:
    _check_n(cfg)
    c = _curve(cfg)
    cache = _open_cache(cfg, c.f)
    pairs = sweep_traces(c.f, _good_primes(c.bad_primes, cfg.N), cfg.threads, cache)
    traces = [TraceRecord(p, a, c.genus) for p, a in pairs]
    report = empirical_moments(traces, N=cfg.N)
    row = {
        "N": cfg.N,
        "second_moment": report.second_moment,
        "fourth_moment": report.fourth_moment,
        "zero_fraction": report.zero_fraction,
        "n_primes": report.n_primes,
    }
    if c.genus == 1:
        angles = [normalized_angle(t) for t in traces]
        for tag in MEASURE_TAGS:
            row["ks_" + tag.replace("-", "_")] = ks_distance(angles, st_measure(tag))
    else:
        for tag in MEASURE_TAGS:
            row["ks_" + tag.replace("-", "_")] = None
    return c, traces, row


_MOMENT_COLUMNS = [
    "N",
    "second_moment",
    "fourth_moment",
    "zero_fraction",
    "n_primes",
] + ["ks_" + t.replace("-", "_") for t in MEASURE_TAGS]


def cmd_moments(cfg: ExperimentConfig) -> None:
    c, _, row = _moment_rows(cfg)
    _write_report([row], _MOMENT_COLUMNS, cfg)
    _write_skipped([c.f], set(c.bad_primes), cfg.N, cfg)


def cmd_st_classify(cfg: ExperimentConfig) -> None:
    c, traces, row = _moment_rows(cfg)
    report = empirical_moments(traces, N=cfg.N)
    cls = moment_class(report.second_moment)
    candidates = identify_st_class(report) if cls is not None else []
    out = {
        "N": cfg.N,
        "second_moment": report.second_moment,
        "zero_fraction": report.zero_fraction,
        "moment_class": cls,
        "candidates": "|".join(r.name for r in candidates),
        "predicted_rank": predict_rank(c.f, cls) if cls is not None else None,
        "flag": "" if cls is not None else "no class within tolerance",
    }
    _write_report(
        [out],
        ["N", "second_moment", "zero_fraction", "moment_class", "candidates", "predicted_rank", "flag"],
        cfg,
    )
    _write_skipped([c.f], set(c.bad_primes), cfg.N, cfg)


def cmd_peterson(cfg: ExperimentConfig) -> None:
    if not cfg.f or not cfg.sigma:
        raise ConfigError("peterson requires --f and --sigma")
    f = parse_polynomial(cfg.f)
    sigma = parse_mobius(cfg.sigma)
    result = peterson_D(f, sigma)
    _write_report(
        [{"D": poly_to_str(result.D, "T"), "multiplier": result.multiplier}],
        ["D", "multiplier"],
        cfg,
    )


def cmd_factor_check(cfg: ExperimentConfig) -> None:
    _check_n(cfg)
    if not cfg.f:
        raise ConfigError("--f is required")
    f = parse_polynomial(cfg.f)
    if cfg.D == "auto-peterson":
        if not cfg.sigma:
            raise ConfigError("--D auto-peterson requires --sigma")
        D = peterson_D(f, parse_mobius(cfg.sigma)).D
    elif cfg.D:
        D = parse_polynomial(cfg.D)
    else:
        raise ConfigError("--D (a polynomial or 'auto-peterson') is required")
    if cfg.s_curves:
        e_curve = curve_from_poly(f)
        others = [curve_from_poly(parse_polynomial(s)) for s in cfg.s_curves]
        rep = verify_mixed_factorization(D, e_curve, cfg.r, others, cfg.N)
    else:
        rep = verify_factorization(D, f, cfg.r, cfg.N)
    _write_report(
        [
            {
                "passed": "pass" if rep.passed else "fail",
                "first_failing_prime": rep.first_failing_prime,
                "primes_checked": rep.primes_checked,
            }
        ],
        ["passed", "first_failing_prime", "primes_checked"],
        cfg,
    )


_COMMANDS = {
    "trace": cmd_trace,
    "lpoly": cmd_lpoly,
    "nagao": cmd_nagao,
    "moments": cmd_moments,
    "st-classify": cmd_st_classify,
    "peterson": cmd_peterson,
    "factor-check": cmd_factor_check,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute a command; returns the process exit code."""
    try:
        handler = _COMMANDS.get(cfg.command)
        if handler is None:
            raise ConfigError(f"unknown command {cfg.command!r}")
        if cfg.threads < 1:
            raise ConfigError("thread count must be >= 1")
        handler(cfg)
        return EXIT_OK
    except CacheCorruptError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CACHE
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except CurveError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_CURVE
    except (ConfigError, ParseError, PetersonError, PolynomialError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="nagaolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--f", default="", help="curve polynomial f(x)")
        p.add_argument("--D", default="", help="twisting polynomial D(T), or 'auto-peterson'")
        p.add_argument("--sigma", default="", help="Moebius transform, e.g. '(x+1)/(-3x+1)' or '1/x'")
        p.add_argument("--N", type=int, default=1000)
        p.add_argument("--grid", default="geometric:20", help="'geometric:k' or comma-separated cutoffs")
        p.add_argument("--mode", choices=["fast-twist", "fiberwise"], default="fast-twist")
        p.add_argument("--r", type=int, default=2)
        p.add_argument("--s-curves", default="", help="comma-separated genus-1 polynomials")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--cache-dir", default=None)
        p.add_argument("--output", default="-")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        p.add_argument("--verify-cache", action="store_true")
    return parser


def config_from_args(argv: list[str]) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    return ExperimentConfig(
        command=args.command,
        f=args.f,
        D=args.D,
        sigma=args.sigma,
        N=args.N,
        grid=args.grid,
        mode=args.mode,
        r=args.r,
        s_curves=[s for s in args.s_curves.split(",") if s.strip()],
        threads=args.threads,
        cache_dir=args.cache_dir,
        output=args.output,
        fmt=args.fmt,
        verify_cache=args.verify_cache,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except (ConfigError, ParseError, PolynomialError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
