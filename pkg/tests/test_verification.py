import pytest

from oscext import verification as V


@pytest.mark.parametrize("chk", V.REGISTRY, ids=lambda c: f"{c.module}.{c.name}")
def test_invariant(chk):
    res = V.run_check(chk)
    assert res.error is None, res.error
    assert res.passed, f"residual {res.residual:.3g} above {res.threshold:.3g}"


def test_every_module_has_checks():
    assert {c.module for c in V.REGISTRY} == set(V.MODULES)


def test_crash_counts_as_failure(monkeypatch):
    def boom():
        raise ZeroDivisionError("x")

    monkeypatch.setattr(V, "REGISTRY", [V.Check("series", "boom", boom, 1.0)])
    (res,) = V.run_checks()
    assert not res.passed and res.error.startswith("ZeroDivisionError")


def test_tol_is_a_floor(monkeypatch):
    monkeypatch.setattr(V, "REGISTRY", [V.Check("series", "loose", lambda: 1e-3, 1e-9)])
    assert not V.run_checks()[0].passed
    assert V.run_checks(tol=1e-2)[0].passed
    assert V.run_checks(tol=1e-12)[0].threshold == 1e-9


def test_unknown_module():
    with pytest.raises(ValueError):
        V.run_checks("nope")
