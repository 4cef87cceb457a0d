import json

import pytest

from degseq.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def degfile(tmp_path):
    def make(text):
        p = tmp_path / f"d{abs(hash(text))}.txt"
        p.write_text(text)
        return p

    return make


@pytest.fixture
def dist(tmp_path):
    def make(family, **params):
        p = tmp_path / f"{family}.json"
        p.write_text(json.dumps({"family": family, "params": params}))
        return p

    return make


def test_check_examples(capsys, degfile):
    code, out, err = run(capsys, "check", degfile("1 1"))
    assert code == 0 and out.splitlines()[0] == "GRAPHICAL"
    assert "# resolved config:" in err
    code, out, _ = run(capsys, "check", degfile("3 3 1 1"))
    assert code == 1
    assert "NOT GRAPHICAL" in out and "violated at j=2: 6 > 4" in out
    code, out, _ = run(capsys, "check", degfile("1 1 1"))
    assert code == 1 and "odd total degree" in out


def test_check_input_errors(capsys, degfile, tmp_path):
    assert run(capsys, "check", degfile("1 x"))[0] == 2
    assert run(capsys, "check", tmp_path / "missing.txt")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "--bogus", "x"])
    assert exc.value.code == 2


def test_realize_examples(capsys, degfile, tmp_path):
    code, out, _ = run(capsys, "realize", degfile("2 2 2"))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# n=3 m=3" and lines[1:] == ["1 2", "1 3", "2 3"]
    dest = tmp_path / "k4.txt"
    code, _, _ = run(capsys, "realize", degfile("3 3 3 3"), "--out", dest, "--check-steps")
    assert code == 0
    assert len(dest.read_text().splitlines()) == 7
    code, out, _ = run(capsys, "realize", degfile("3 3 1 1"))
    assert code == 1 and "NOT GRAPHICAL" in out


def test_sample_deterministic(capsys, dist):
    g = dist("geometric", p=0.5)
    _, a, _ = run(capsys, "sample", "--dist", g, "--n", 5, "--trials", 4, "--seed", 42)
    _, b, _ = run(capsys, "sample", "--dist", g, "--n", 5, "--trials", 4, "--seed", 42)
    assert a == b
    lines = a.splitlines()
    assert lines[0].startswith("# config: ") and len(lines) == 5
    assert all(len(l.split()) == 5 for l in lines[1:])


def test_sample_renyi_sorted_and_seed_echo(capsys, dist):
    z = dist("zeta", beta=2.5)
    code, out, err = run(capsys, "sample", "--dist", z, "--n", 30, "--trials", 20, "--sampler", "renyi")
    assert code == 0 and "# generated seed:" in err
    for line in out.splitlines()[1:]:
        v = list(map(int, line.split()))
        assert v == sorted(v, reverse=True)


def test_sample_cap_noted(capsys, tmp_path):
    p = tmp_path / "capped.json"
    p.write_text(json.dumps({"family": "exact_c_over_n", "params": {"c": 1}, "support_max": 3}))
    code, out, _ = run(capsys, "sample", "--dist", p, "--n", 50, "--trials", 3, "--seed", 1)
    assert code == 0 and "CapExceeded" in out


def test_sample_bad_config(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"family": "nope"}')
    assert run(capsys, "sample", "--dist", p, "--n", 5, "--seed", 1)[0] == 2
    p.write_text("{not json")
    assert run(capsys, "sample", "--dist", p, "--n", 5, "--seed", 1)[0] == 2


def test_estimate_outputs(capsys, dist, tmp_path):
    e = dist("exact_c_over_n", c=1)
    stem = tmp_path / "est"
    code, out, _ = run(capsys, "estimate", "--dist", e, "--grid", "1000", "--trials", 10**4, "--seed", 3, "--out", stem)
    assert code == 0 and out.startswith("n=1000 ")
    rows = (tmp_path / "est.csv").read_text().splitlines()
    p_hat = float(rows[2].split(",")[5])
    assert 0 < p_hat < 0.5
    doc = json.loads((tmp_path / "est.json").read_text())
    assert doc["config"]["seed"] == 3


def test_estimate_power_law_near_zero(capsys, dist, tmp_path):
    p = dist("power_law", c=1, alpha=0.5)
    stem = tmp_path / "pl"
    run(capsys, "estimate", "--dist", p, "--grid", "100", "--trials", 10**4, "--seed", 8, "--out", stem, "--format", "csv")
    p_hat = float((tmp_path / "pl.csv").read_text().splitlines()[2].split(",")[5])
    assert p_hat <= 0.01
    assert not (tmp_path / "pl.json").exists()


def test_estimate_workers_identical(capsys, dist, tmp_path):
    e = dist("exact_c_over_n", c=1)
    texts = []
    for w in (1, 8):
        stem = tmp_path / f"w{w}"
        run(capsys, "estimate", "--dist", e, "--grid", "50,500", "--trials", 1000, "--seed", 6,
            "--workers", w, "--out", stem, "--format", "csv")
        texts.append((tmp_path / f"w{w}.csv").read_bytes())
    assert texts[0] == texts[1]


def test_estimate_config_errors(capsys, dist):
    e = dist("geometric", p=0.5)
    assert run(capsys, "estimate", "--dist", e, "--grid", "10,5", "--trials", 10, "--seed", 1)[0] == 2
    assert run(capsys, "estimate", "--dist", e, "--grid", "a,b", "--trials", 10, "--seed", 1)[0] == 2


@pytest.mark.parametrize(
    "family, params, label",
    [("exact_c_over_n", {"c": 2}, "c"), ("geometric", {"p": 0.5}, "d"), ("perturbed_c_over_n", {"c": 1}, "b")],
)
def test_classify(capsys, dist, family, params, label):
    code, out, _ = run(capsys, "classify", "--dist", dist(family, **params))
    assert code == 0
    rep = json.loads(out)
    assert rep["label"] == label
    assert rep["trace"] and rep["note"]


def test_classify_small_N(capsys, dist):
    assert run(capsys, "classify", "--dist", dist("geometric", p=0.5), "--N", 10)[0] == 2


def test_validate_sampler(capsys, dist):
    g = dist("geometric", p=0.5)
    code, out, _ = run(capsys, "validate-sampler", "--dist", g, "--seed", 5)
    assert code == 0, out
    assert out.count("PASS") == 3
    code2, out2, _ = run(capsys, "validate-sampler", "--dist", g, "--seed", 5)
    assert out2 == out
    z = dist("zeta", beta=2.5)
    code, out, _ = run(capsys, "validate-sampler", "--dist", g, "--seed", 5, "--debug-mismatch", z)
    assert code == 1 and "FAIL" in out


def test_validate_sampler_degenerate_parity(capsys, tmp_path):
    p = tmp_path / "pm.json"
    p.write_text(json.dumps({"family": "point_mass", "params": {"k": 2}}))
    code, out, _ = run(capsys, "validate-sampler", "--dist", p, "--seed", 1, "--draws", 2000)
    assert code == 0 and "parity: SKIP" in out


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    p = tmp_path / "d.txt"
    p.write_text("2 2 2\n")
    proc = subprocess.run([sys.executable, "-m", "degseq", "check", str(p)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("GRAPHICAL")
