"""Smoke test for the pydsair extension module.

Build and install first:  maturin develop --release -m crates/py/Cargo.toml
"""

import math

import pydsair


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    race = pydsair.RaceParams(p_r=0.5)
    baseline = pydsair.Scenario("none")
    assert baseline.labels == ["AS", "AU"]

    m = pydsair.payoff_matrix(baseline, race)
    assert close(m[0][1], 0.6) and close(m[1][0], 76.2), m

    lower, upper = pydsair.zone_boundaries(1.5)
    assert close(lower, 1 / 3) and close(upper, 7 / 9)
    assert [pydsair.classify_zone(1.5, p) for p in (0.2, 0.6, 0.9)] == ["III", "II", "I"]
    assert pydsair.risk_dominant(baseline, race.with_risk(0.9), "AS", "AU")

    z = 10
    rho = pydsair.fixation_probability(1.0, 1.0, 1.0, 1.0, pydsair.EvoParams(population=z))
    assert close(rho, 1 / z)

    pp = pydsair.Scenario("peer", commitments=True)
    low = pydsair.analyse(pp, race.with_risk(0.1))
    assert math.isclose(sum(low["stationary"]), 1.0, abs_tol=1e-9)
    assert low["labels"][max(range(5), key=low["stationary"].__getitem__)] == "AU_out"
    assert '"PS" -> "AU_out"' in pydsair.transitions_dot(pp, race.with_risk(0.1))

    blocks = pydsair.sweep("regime = peer\ncommitments = true\ncompare = true\naxis1 = p_r:0:1:11\n")
    assert [b["scenario"] for b in blocks] == ["pp_commit", "pp"]
    assert len(blocks[0]["points"]) == 11

    sim = pydsair.abm(baseline, race.with_risk(0.1), pydsair.EvoParams(population=20),
                      steps=200_000, burn_in=1_000, seed=3)
    assert math.isclose(sum(sim["frequencies"]), 1.0, abs_tol=1e-9)

    try:
        pydsair.RaceParams(s=0.5)
    except pydsair.ModelError as err:
        assert "s must exceed 1" in str(err)
    else:
        raise AssertionError("invalid speed accepted")

    print("pydsair smoke test passed")


if __name__ == "__main__":
    main()
