import json
import os

import pytest

from nagaolab.cache import HEADER, TraceCache, cache_path, fingerprint
from nagaolab.cli import (
    EXIT_BAD_CURVE,
    EXIT_CACHE,
    EXIT_CAP,
    EXIT_CONFIG,
    EXIT_OK,
    ExperimentConfig,
    main,
    parse_mobius,
    run,
)
from nagaolab.polynomials import ParseError, PolynomialError, parse_polynomial


def cfg(command, **kw):
    return ExperimentConfig(command=command, **kw)


def test_parse_mobius_shorthand():
    m = parse_mobius("1/x")
    assert (m.a, m.b, m.c, m.d) == (0, 1, 1, 0)


def test_parse_mobius_general():
    m = parse_mobius("(x+1)/(-3x+1)")
    assert (m.a, m.b, m.c, m.d) == (1, 1, -3, 1)
    m2 = parse_mobius("-x")
    assert (m2.a, m2.b, m2.c, m2.d) == (-1, 0, 0, 1)


def test_parse_mobius_degenerate():
    with pytest.raises(PolynomialError):
        parse_mobius("(2x+2)/(x+1)")


def test_parse_mobius_rejects_quadratic():
    with pytest.raises(ParseError):
        parse_mobius("(x^2+1)/x")


def test_trace_command_csv(tmp_path):
    out = tmp_path / "t.csv"
    rc = run(cfg("trace", f="x^3+x", N=20, output=str(out)))
    assert rc == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "p,a"
    assert lines[1] == "3,0"
    assert lines[2] == "5,2"
    skipped = (tmp_path / "t.csv.skipped").read_text().splitlines()
    assert skipped == ["2,p=2"]


def test_lpoly_command(tmp_path):
    out = tmp_path / "l.csv"
    assert run(cfg("lpoly", f="x^5-x", N=10, output=str(out))) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "p,a,b"
    assert lines[1] == "3,0,-2"


def test_json_mirrors_csv_fields(tmp_path):
    out_c = tmp_path / "m.csv"
    out_j = tmp_path / "m.json"
    assert run(cfg("moments", f="x^3+x", N=200, output=str(out_c))) == EXIT_OK
    assert run(cfg("moments", f="x^3+x", N=200, output=str(out_j), fmt="json")) == EXIT_OK
    header = out_c.read_text().splitlines()[0].split(",")
    payload = json.loads(out_j.read_text())
    assert list(payload[0].keys()) == header


def test_nagao_csv_columns(tmp_path):
    out = tmp_path / "n.csv"
    assert run(cfg("nagao", f="T^3+T", N=300, grid="100,300", output=str(out))) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "N,S1,S2,n_primes"
    assert len(lines) == 3


def test_exit_code_parse_error(tmp_path):
    assert run(cfg("trace", f="x^^3", N=10, output="-")) == EXIT_CONFIG
    assert run(cfg("nagao", f="", N=10, output="-")) == EXIT_CONFIG
    assert main(["trace", "--badflag"]) == EXIT_CONFIG


def test_exit_code_bad_curve():
    assert run(cfg("trace", f="x^3-3*x+2", N=10, output="-")) == EXIT_BAD_CURVE
    assert run(cfg("trace", f="x^2+1", N=10, output="-")) == EXIT_BAD_CURVE


def test_exit_code_cap():
    assert run(cfg("nagao", f="T^3+T", N=10**7 + 1, output="-")) == EXIT_CAP


def test_st_classify_runs(tmp_path):
    out = tmp_path / "s.json"
    assert run(cfg("st-classify", f="x^5-x+1", N=3000, output=str(out), fmt="json")) == EXIT_OK
    (row,) = json.loads(out.read_text())
    assert row["moment_class"] in (1, 2, None)
    if row["moment_class"] == 1:
        assert row["predicted_rank"] == 1
        assert "USp(4)" in row["candidates"]


def test_peterson_and_factor_check_cli(tmp_path):
    out = tmp_path / "p.csv"
    quintic = "x^5+2*x^4+3*x^3+3*x^2+2*x+1"
    assert run(cfg("peterson", f=quintic, sigma="1/x", output=str(out))) == EXIT_OK
    header, row = out.read_text().splitlines()
    assert header == "D,multiplier"
    d_str, mult = row.rsplit(",", 1)
    assert mult == "1"
    assert parse_polynomial(d_str) == parse_polynomial("T^10+2*T^8+3*T^6+3*T^4+2*T^2+1")

    out2 = tmp_path / "fc.csv"
    rc = run(
        cfg("factor-check", f=quintic, D="auto-peterson", sigma="1/x", r=2, N=1000, output=str(out2))
    )
    assert rc == EXIT_OK
    assert out2.read_text().splitlines()[1].startswith("pass,")


def test_factor_check_failure_row(tmp_path):
    out = tmp_path / "fc.csv"
    rc = run(cfg("factor-check", f="x^3+x", D="x^6+2", r=2, N=100, output=str(out)))
    assert rc == EXIT_OK
    assert out.read_text().splitlines()[1] == "fail,5,0"


def test_peterson_error_exit_code():
    assert run(cfg("peterson", f="x^3-x", sigma="-x", output="-")) == EXIT_CONFIG


# -- cache behavior ----------------------------------------------------------


def test_cache_cold_warm_identical(tmp_path):
    cache = tmp_path / "cache"
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    base = dict(f="T^3+T", N=500, grid="100,500", cache_dir=str(cache))
    assert run(cfg("nagao", output=str(out1), **base)) == EXIT_OK
    assert run(cfg("nagao", output=str(out2), **base)) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    files = list(cache.glob("trace_*.txt"))
    assert len(files) == 1
    lines = files[0].read_text().splitlines()
    assert lines[0] == HEADER
    assert lines[1] == fingerprint(parse_polynomial("T^3+T"))
    ps = [int(line.split(",")[0]) for line in lines[2:]]
    assert ps == sorted(ps)


def test_cache_extended_not_rewritten(tmp_path):
    cache = tmp_path / "cache"
    f = parse_polynomial("x^3+x")
    run(cfg("trace", f="x^3+x", N=100, cache_dir=str(cache), output=str(tmp_path / "o1.csv")))
    path = cache_path(cache, f)
    before = path.read_text()
    run(cfg("trace", f="x^3+x", N=300, cache_dir=str(cache), output=str(tmp_path / "o2.csv")))
    after = path.read_text()
    assert after.startswith(before)  # append-only
    assert len(after) > len(before)


def test_cache_corruption_quarantined(tmp_path):
    cache = tmp_path / "cache"
    run(cfg("trace", f="x^3+x", N=100, cache_dir=str(cache), output=str(tmp_path / "o.csv")))
    path = cache_path(cache, parse_polynomial("x^3+x"))
    path.write_text("NOT A CACHE\n")
    rc = run(cfg("trace", f="x^3+x", N=100, cache_dir=str(cache), output=str(tmp_path / "o2.csv")))
    assert rc == EXIT_CACHE
    assert path.with_suffix(".txt.corrupt").exists()


def test_verify_cache_detects_bad_record(tmp_path):
    cache = tmp_path / "cache"
    run(cfg("trace", f="x^3+x", N=100, cache_dir=str(cache), output=str(tmp_path / "o.csv")))
    path = cache_path(cache, parse_polynomial("x^3+x"))
    lines = path.read_text().splitlines()
    p, a = lines[2].split(",")
    lines[2] = f"{p},{int(a) + 1}"
    path.write_text("\n".join(lines) + "\n")
    rc = run(
        cfg(
            "trace",
            f="x^3+x",
            N=100,
            cache_dir=str(cache),
            output=str(tmp_path / "o2.csv"),
            verify_cache=True,
        )
    )
    assert rc == EXIT_CACHE


def test_cache_env_var_overrides(tmp_path, monkeypatch):
    env_cache = tmp_path / "envcache"
    monkeypatch.setenv("NAGAOLAB_CACHE", str(env_cache))
    run(cfg("trace", f="x^3+x", N=50, cache_dir=str(tmp_path / "flagcache"), output=str(tmp_path / "o.csv")))
    assert env_cache.exists()
    assert not (tmp_path / "flagcache").exists()


def test_thread_count_determinism_small(tmp_path):
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"n{threads}.csv"
        assert (
            run(cfg("nagao", f="T^3+T", N=2000, grid="geometric:5", threads=threads, output=str(out)))
            == EXIT_OK
        )
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_fiberwise_mode_cli(tmp_path):
    out_fast = tmp_path / "fast.csv"
    out_fib = tmp_path / "fib.csv"
    assert run(cfg("nagao", f="T^3+T", D="T^3+T+1", N=200, grid="200", output=str(out_fast))) == EXIT_OK
    assert (
        run(
            cfg(
                "nagao",
                f="T^3+T",
                D="T^3+T+1",
                N=200,
                grid="200",
                mode="fiberwise",
                output=str(out_fib),
            )
        )
        == EXIT_OK
    )
    assert out_fast.read_bytes() == out_fib.read_bytes()
