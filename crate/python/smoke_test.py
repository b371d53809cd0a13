"""Smoke test for the deltader extension module."""

import deltader


def main():
    thin = deltader.Algebra("thin")
    assert thin.bracket("e1", "e2") == "e3"

    fam = deltader.solve(deltader.Algebra("wittpos"), (1, 8), (1, 16))
    assert fam.dim == 9, fam.dim
    assert len(fam.basis) == 9

    cmp = deltader.compare(thin, (1, 10))
    assert cmp["expected_contained"] and cmp["solved_interior_contained"], cmp
    assert cmp["dim_solved"] == 11, cmp

    assert deltader.check_map(thin, "id", (1, 6), (1, 10)) == []
    assert deltader.check_map(thin, "id", (1, 6), (1, 10), delta="1") != []
    assert deltader.check_map(deltader.Algebra("wittz"), "shift:t=0,w=1", (-4, 4), (-8, 8)) == []

    half = deltader.solve(thin, (1, 10))
    ((x, ok, params),) = deltader.local("thin-delta", half, ["e1 + e3"])
    assert ok and params is not None, (x, ok, params)
    assert deltader.two_local("thin-nabla", half, "e1 + e2", "e2")[0]

    nonadd, lhs, rhs = deltader.certify_nonadditive("thin-nabla", "e1 + e2", "-e1 + e2")
    assert nonadd and lhs == "0" and rhs == "2*e2", (lhs, rhs)

    op = deltader.Operator("table:e2=e3")
    assert op.is_linear and op.evaluate("3*e2") == "3*e3"

    report = deltader.verify_all(quick=True)
    failing = [c["id"] for c in report["criteria"] if not c["passed"]]
    assert failing == [6], failing
    print("\n".join(report["lines"]))
    print("smoke test ok")


if __name__ == "__main__":
    main()
