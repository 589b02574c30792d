"""Smoke test for the gid extension module: python python/smoke_test.py"""

import gid


def main():
    a = gid.Matrix(2, [[1, 0, 1], [0, 1, 1]])
    t = gid.decompose(a, seed=1)
    assert t.verify(a)
    gis = gid.enumerate_gi(t)
    assert len(gis) == 4 and all(gid.is_gi(a, x) for x in gis)
    b = [1, 0]
    sols = sorted({tuple(x.mul_vec(b)) for x in gis})
    assert sols == sorted(tuple(x) for x in gid.enum_coset(a, b))

    inst, e = gid.gen_instance(40, 20, 3, 3, seed=5, mode="planted")
    assert inst.verify(e)
    for strategy in ["prange", "lee_brickell", "stern", "finiasz_sendrier"]:
        res = gid.solve_cwp(inst, strategy=strategy, seed=2)
        assert res.found, strategy
        assert inst.verify(res.x) and res.weight <= 3

    code = gid.gen_lwp_instance(14, 7, 2, 3, seed=3)
    d, cw = gid.brute_minsat(code.h)
    assert code.h.mul_vec(cw) == [0] * 7 and sum(cw) == d
    res = gid.solve_swp(gid.LwpInstance(code.h, d), strategy="leon", seed=4)
    assert res.found and res.weight == d

    assert gid.to_minsat(a, b).startswith("p affsat 1 3\n")
    assert 118 <= gid.gv_threshold(500, 250, 3) <= 128

    rep = gid.easy_weights(60, 30, 2, seed=1, iterations=3)
    lo, hi = rep["interval"]
    assert lo <= 15 and hi >= 45, rep["interval"]
    assert rep["csv"].splitlines()[1] == "decomp,iteration,weight,reached"

    again = gid.read_instance(inst.to_text())
    assert again.s == inst.s and again.h == inst.h
    try:
        gid.Matrix(4, [[1]])
    except ValueError:
        pass
    else:
        raise AssertionError("q=4 accepted")
    print("smoke test ok")


if __name__ == "__main__":
    main()
