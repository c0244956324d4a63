"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation -e crates/superfricke-py
then run:
    python python/smoke_test.py
"""

import pathlib
import sys

import superfricke

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "crates" / "superfricke" / "fixtures" / "pairs"


def fixture(name):
    return (FIXTURES / name).read_text()


def main():
    results = superfricke.verify(suite="osp", samples=4)
    assert results and all(r["passed"] for r in results), results

    rec = superfricke.normal_form(fixture("osp_planted.json"))
    assert set(rec["coords"]) == {"lambda", "mu", "kappa", "psi", "xi"}, rec["coords"].keys()

    sl2 = superfricke.normal_form(fixture("sl2_unipotent.json"))
    assert sl2["branch"] == "unipotent", sl2["branch"]

    try:
        superfricke.normal_form(fixture("central_a.json"))
    except ValueError as e:
        assert "central" in str(e), e
    else:
        raise AssertionError("central A was accepted")

    inv = superfricke.invariants(fixture("osp_raw_matrix.json"), ["AB", "A", "", "Bb"])
    assert list(inv) == ["AB", "A", "", "Bb"], list(inv)
    assert inv[""] == inv["Bb"]

    ident = superfricke.eval_word(fixture("osp_planted.json"))
    assert ident == superfricke.eval_word(fixture("osp_planted.json"), "ABba")

    report = superfricke.census(degree=2, samples=128, seed=7, n=4)
    assert report["count"] == {"total": 9, "ideal": 2, "quotient": 7}, report["count"]

    code, out, _ = superfricke.run_cli(["verify", "--suite", "grassmann", "--samples", "3"])
    assert code == 0 and "checks passed" in out, out
    code, _, err = superfricke.run_cli(["frobnicate"])
    assert code == 2 and err, err

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
