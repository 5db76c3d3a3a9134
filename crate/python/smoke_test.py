"""Smoke test for the confinv Python module.

Build and install with `maturin develop -m crates/python/Cargo.toml`, or copy
target/<profile>/libconfinv_py.so to confinv.so on PYTHONPATH, then run this file.
"""

import pathlib

import confinv

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def main():
    table = {n: [confinv.hilbert(n, k) for k in range(1, 5)] for n in (3, 4, 5)}
    assert table == {3: [0, 0, 1, 9], 4: [0, 3, 36, 91], 5: [0, 24, 135, 350]}, table
    assert confinv.trdeg(4, 3) == 39
    assert confinv.count(4, 4)["hilbert"] == 91
    print("P_4(z) =", confinv.poincare(4))

    try:
        confinv.hilbert(2, 3)
    except confinv.ConfinvError as e:
        reason, module, _ = e.args
        assert (reason, module) == ("DimensionTooSmall", "orbit_counting"), e.args
    else:
        raise AssertionError("n = 2 accepted")

    assert confinv.orbit_dim(3, 3, seed=7)["rank"] == 119

    report = confinv.invariants_from_file(str(DATA / "generic3.metric"), 3)
    third = [e for e in report["invariants"] if e["order"] == 3]
    assert len(third) == 1 and third[0]["backend"] == "exact", third
    print("Y_ratio =", third[0]["value"])

    text = (DATA / "s2xs2.metric").read_text()
    report = confinv.invariants(text, 3)
    assert all(r["value"] <= 1e-8 for r in report["residuals"]), report["residuals"]

    sample = confinv.invariance(4, 3, seed=1)
    assert sample["max_residual"] <= 1e-7 and not sample["unmatched"], sample

    assert confinv.independence(4, 2)["rank"] == 3
    assert confinv.verify("prolong", 4)["pass"]
    assert confinv.verify("spencer", 3, order=2)["pass"]
    print("ok")


if __name__ == "__main__":
    main()
