"""Smoke test for the pring extension module.

Build and install first, e.g. ``maturin build --release -m crates/py/Cargo.toml``
followed by ``pip install target/wheels/pring-*.whl``.
"""

import json

import pring

A_THETA2 = [
    [0, 4, 4, 5, 6, 2],
    [3, 0, 6, 6, 4, 2],
    [3, 1, 0, 2, 2, 6],
    [2, 1, 5, 0, 3, 3],
    [1, 3, 5, 4, 0, 1],
    [5, 5, 1, 4, 6, 0],
]
J_THETA3_ROW0 = [0, 0, 1, 1, 0, 0]


def check_arithmetic():
    ctx = pring.PrimeCtx(5, 3)
    assert (ctx.r, ctx.omega, ctx.d) == (2, 57, 4)
    kappa = ctx.kappa_pow(1)
    assert ctx.theta() - ctx.int(1) == kappa
    assert (kappa + (-kappa)).val() is None
    assert (ctx.int(5) * kappa).val() == 5
    e = ctx.eigenvector(3)
    assert e.val() == 3
    assert e.galois(ctx.r) == ctx.int(pow(ctx.omega, 3, 125)) * e


def check_tables():
    g2 = pring.HomGamma.theta_a(7, 2)
    assert g2.a_table() == A_THETA2
    assert pring.HomGamma.theta_a(7, 3).j_table()[0] == J_THETA3_ROW0
    again = pring.HomGamma.from_json(g2.to_json())
    assert again.a_table() == A_THETA2


def check_lambda():
    r = pring.HomGamma.theta_a(7, 2, i=3).lambda_report()
    assert (r.lambda_, r.y_one_param, r.witness) == (14, 2, (3, 4, 5))
    assert r.to_dict()["y"] == 6
    rows = pring.survey(5, [2], list(range(6)))
    assert all(row["y"] == 0 for row in rows)
    try:
        pring.HomGamma.theta_a(7, 4)
    except ValueError:
        pass
    else:
        raise AssertionError("a = 4 is outside 2..(p-1)/2 for p = 7")
    # kappa * theta_2 misses the top layer of the target ideal.
    not_onto = {"p": 7, "precision": 6, "i": 0, "coeffs": {"2": {"shift": 1, "coeffs": [1, 0, 0, 0, 0, 0]}}}
    try:
        pring.HomGamma.from_json(json.dumps(not_onto)).lambda_report()
    except pring.PringError:
        pass
    else:
        raise AssertionError("non-surjective gamma accepted")


def check_lie_ring():
    g = pring.HomGamma.theta_a(5, 2, i=6)
    at = pring.LieRing(g)
    assert at.m == 21 and at.orders == [4, 4, 4, 3] and at.order_exponent == 15
    assert at.check_jacobi() is None
    orders, cls = at.lower_central_series()
    assert orders[0] == 15 and cls is not None and cls <= 4
    assert pring.LieRing(g, 22).check_jacobi() is not None
    x, y = [1, 2, 3, 4], [5, 6, 7, 8]
    assert at.bracket(x, x) == [0, 0, 0, 0]
    assert json.loads(at.to_json())["m"] == 21


def check_suites():
    for suite in ["bounds", "crosscheck", "liering"]:
        report = pring.verify(suite, trials=5, seed=1)
        assert report["passed"] == report["trials"] == 5, report
    k = pring.fg_constants(7, 3)
    assert k["f1"] == k["f1_closed"] == 2
    g = pring.HomGamma.random(11, 2, seed=7)
    assert 5 - 11 <= g.val() <= 0


if __name__ == "__main__":
    for check in [check_arithmetic, check_tables, check_lambda, check_lie_ring, check_suites]:
        check()
        print(f"ok  {check.__name__}")
