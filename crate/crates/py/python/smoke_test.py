"""Smoke test for the compiled extension: python python/smoke_test.py"""

import cremona


def main():
    names = cremona.list_scenarios()
    assert names == ["sextic-ruled", "bordiga", "dp6", "family-open", "family-closed"], names
    for name in names:
        r = cremona.run_scenario(name)
        assert r.passed, name
        print(f"{name}: {r.verdict}")

    r = cremona.run_scenario("sextic-ruled")
    c = r.computed
    assert (c["degree"], c["deg_gamma"], c["gamma_w"]) == (6, 10, [4, 8])
    assert r.to_dict()["overall"] == "PASS"
    assert "e = -2 - b2" in r.to_markdown()

    sys = cremona.FeasibilitySystem.obstruction([6, 18, 24], [1, 1, 1], [4, 8, 12])
    cert = sys.solve(50)
    assert cert.status == "INFEASIBLE"
    cert.replay()
    print(cert)

    toy = cremona.FeasibilitySystem(["x", "y"], [([1, 2], 7), ([1, -1], 1)])
    w = toy.solve().witness
    assert w == [("x", 3), ("y", 2)], w

    sz = cremona.SZModel()
    assert sz.from_f0(1, 3) == [1, 3, 4]
    assert sz.is_st_pullback([1, 3, 4]) and not sz.is_st_pullback([1, 1, 1])

    p2 = cremona.Lattice.projective_plane()
    bl, m = p2.blow_up()
    assert bl.canonical == [-3, 1]
    assert m.pullback(p2, [4]) == [4, 0]
    assert p2.genus([4]) == 3
    try:
        cremona.Lattice(["L"], [[1]], [-2]).genus([1])
    except ValueError as e:
        assert "parity" in str(e)
    else:
        raise AssertionError("odd C.(C+K) accepted")

    assert cremona.negativity_certificate(6, 10)["verdict"] == "NEGATIVE_CERTIFIED"
    assert cremona.monoid_ce_predicate(6, 5)
    assert cremona.dominance_count([2] * 6 + [4], 3, 7)["lhs"] == 16
    assert cremona.grassmannian_dim(3, 7) == 16
    print("smoke test OK")


if __name__ == "__main__":
    main()
