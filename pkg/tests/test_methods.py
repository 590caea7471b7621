"""Registry data, cost model, solve driver behavior."""
import numpy as np
import pytest

from abdsolve import (
    Dims,
    METHOD_IDS,
    assemble_dense,
    identity_system,
    random_system,
    solve,
)
from abdsolve.errors import (
    InadmissiblePivotingError,
    SingularSystemError,
    ZeroPivotError,
)
from abdsolve.methods import (
    common_mul,
    get_method,
    method_registry,
    predicted_mul,
    predicted_storage,
)
from abdsolve.oracle import max_rel_diff


def test_registry_shape():
    reg = method_registry()
    assert len(reg) == 21
    assert [d.id for d in reg] == list(METHOD_IDS)
    with pytest.raises(ValueError):
        get_method("COLROW")


def test_registry_examples():
    scsr = get_method("SCSR")
    assert scsr.module_kind == "A"
    assert scsr.fin_steps == ("A7", "A1b", "A17", "A11", "A13")
    dbtr = get_method("DBTR")
    assert dbtr.extraneous == frozenset({"Bne", "Bme"})
    assert get_method("BCBR").extra_mul(5, 3, 2) == 0
    assert get_method("ABTCt").extraneous == frozenset({"Cme", "Dme"})


def test_scalar_scalar_family_shares_step_lists():
    ss = [get_method(mid) for mid in ("SRSR", "SRSC", "SCSR", "SCSC")]
    assert len({d.stem_steps for d in ss}) == 1
    assert len({d.fin_steps for d in ss}) == 1
    assert len({d.head_steps for d in ss}) == 1
    modes = {(d.cm_mode, d.bn_mode) for d in ss}
    assert len(modes) == 4


def _tri(k, w, unit):
    return ((k * k - k) // 2 if unit else (k * k + k) // 2) * w


def _stem_cost(desc, m, n):
    """Charge the stem step tags with the method's unit-diagonal choices."""
    cm_u = desc.config.cm_rowcol == "col"  # upper factor of Cm unit
    bn_u = desc.config.bn_rowcol == "col"
    table = {
        "A5": (n ** 3 - n) // 3,
        "A6": (m ** 3 - m) // 3,
        "A9": _tri(m, n, cm_u),
        "A10": _tri(m, n, not cm_u),
        "A19": _tri(m, n, not cm_u),
        "A20": _tri(m, n, cm_u),
        "A2a": m * n * n,
        "A2b": m * n * n,
        "A2c": m * n * n,
        "A11": _tri(n, m, not bn_u),
        "A17": _tri(n, m, bn_u),
        "A18": _tri(n, m, not bn_u),
        "A3a": m * m * n,
        "A3b": m * m * n,
    }
    return sum(table[t] for t in desc.stem_steps)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (1, 3), (3, 2), (4, 4)])
def test_stem_steps_always_total_third_of_p_cubed(m, n):
    p = m + n
    for desc in method_registry():
        assert _stem_cost(desc, m, n) == (p ** 3 - p) // 3, desc.id


def test_predicted_mul_examples():
    d = Dims(1, 1, 5, 1)
    assert common_mul(d) == 14  # 2 + 4 + 8
    assert predicted_mul("SCSR", d)[0] == 14
    assert predicted_mul("SRSR", d)[0] == 15
    assert predicted_mul("DBTC", d)[0] == 16


def test_predicted_storage_examples():
    assert predicted_storage("DBTC", Dims(10, 1, 5, 1)) == 22  # pr + pn + 0
    d = Dims(2, 1, 5, 1)
    p = 3
    assert predicted_storage("BCBR", d) == p * 1 + p * 1 + p * 1  # entry pn
    assert predicted_storage("SRSR", d) == p + p + (p * p - 2)  # footnote a


def test_cost_ordering_bcbr_least_for_m_greater_n():
    non_bt = [mid for mid in METHOD_IDS if mid not in ("ABTR", "ABTCt", "ABTCe", "DBTR", "DBTC")]
    for m, n in [(2, 1), (3, 2), (5, 2), (10, 1)]:
        d = Dims(m, n, 4, 1)
        base = predicted_mul("BCBR", d)[0]
        for mid in non_bt:
            assert base <= predicted_mul(mid, d)[0], (mid, m, n)


def test_storage_minimum_dbtc():
    for m, n in [(1, 1), (2, 1), (1, 2), (3, 2), (10, 1)]:
        for r in (1, 3):
            d = Dims(m, n, 4, r)
            base = predicted_storage("DBTC", d)
            for mid in METHOD_IDS:
                assert base <= predicted_storage(mid, d), mid


def test_ledger_conformance_quick():
    d = Dims(2, 3, 5, 2)
    system, _ = random_system(d, seed=1)
    for mid in METHOD_IDS:
        _, st = solve(system, mid)
        per, total = predicted_mul(mid, d)
        assert st.mul_interior_module == per, mid
        assert st.mul_total == total, mid
        assert sum(st.mul_per_module) == st.mul_total, mid


def test_bcbr_full_module_example():
    # common term at m = n = r = 1 is 2 + 4 + 8 = 14, extra 0
    d = Dims(1, 1, 3, 1)
    system, _ = random_system(d, seed=4)
    _, st = solve(system, "BCBR")
    assert st.mul_interior_module == 14


def test_identity_system_solution_exact():
    d = Dims(2, 1, 3, 2)
    rhs = np.arange(float(d.n_unknowns * 2)).reshape(-1, 2)
    system = identity_system(d, rhs=rhs)
    for mid in METHOD_IDS:
        z, st = solve(system, mid, "none")
        assert np.array_equal(z, rhs), mid
        assert st.max_multiplier == 0.0, mid


def test_zero_pivot_raises_unpivoted():
    d = Dims(2, 1, 3, 1)
    system, _ = random_system(d, seed=3, conditioning=0.0)
    system.top[0, 0] = 0.0
    for mid in METHOD_IDS:
        with pytest.raises((ZeroPivotError, SingularSystemError)):
            solve(system, mid, "none")


def test_singular_system_detected_under_pivoting():
    d = Dims(2, 1, 3, 1)
    system, _ = random_system(d, seed=3)
    system.top[:, 0] = 0.0
    system.interior[0][:, 0] = 0.0  # grid-0 first column identically zero
    with pytest.raises(SingularSystemError):
        solve(system, "SCSR", "lam")
    with pytest.raises(SingularSystemError):
        solve(system, "SCSR", "local")


def test_inadmissible_pivoting_rejected():
    d = Dims(1, 1, 2, 1)
    system, _ = random_system(d, seed=0)
    with pytest.raises(InadmissiblePivotingError):
        solve(system, "SRSR", "lam")
    with pytest.raises(InadmissiblePivotingError):
        solve(system, "BRBC", "local")


def test_method_equivalence_quick():
    for seed in range(5):
        d = Dims(1 + seed % 3, 1 + (seed + 1) % 3, 4 + seed % 3, 1 + seed % 2)
        system, _ = random_system(d, seed=seed)
        sols = [solve(system, mid)[0] for mid in METHOD_IDS]
        for z in sols[1:]:
            assert max_rel_diff(sols[0], z) <= 1e-8


def test_original_system_untouched():
    d = Dims(2, 2, 3, 1)
    system, _ = random_system(d, seed=9)
    top = system.top.copy()
    inter = system.interior.copy()
    rhs = system.rhs.copy()
    solve(system, "SCSR", "lam")
    assert np.array_equal(system.top, top)
    assert np.array_equal(system.interior, inter)
    assert np.array_equal(system.rhs, rhs)
