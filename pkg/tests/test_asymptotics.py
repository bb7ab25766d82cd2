import math

import pytest
from scipy.integrate import quad

from primepartitions import (
    AsymptoticLaw,
    AsymptoticReport,
    exp_prime_sum_ratio,
    goldbach_sum_ratio,
    hardy_ramanujan_ratio,
    hl_prediction,
    mpart_sum_ratio,
    q2_table,
    q_total_table,
    qm_table_dp,
    sieve_upto,
    twin_prime_constant,
)
from primepartitions.asymptotics import (
    C2_REFERENCE,
    _li2,
    check_exp_prime_sum,
    check_goldbach_sum,
    write_report_csv,
    write_report_json,
)


@pytest.fixture(scope="module")
def table_20k():
    return sieve_upto(20_002)


@pytest.fixture(scope="module")
def conv_10k(table_20k):
    return q2_table(table_20k, 10_000)


def test_law_template_validation():
    with pytest.raises(ValueError):
        AsymptoticLaw(rho=1)
    with pytest.raises(ValueError):
        AsymptoticLaw(rho=9)
    law = AsymptoticLaw(rho=3)
    assert law.gamma_factor == 6
    assert law.coefficient_sum_estimate(100) == pytest.approx(
        100**3 / (6 * math.log(100) ** 3)
    )


def test_law_template_tracks_ordered_pair_sums(table_20k, conv_10k):
    # cumulative ordered-pair counts against the rho=2 template: the ratio
    # is O(1/log n) above 1 and falls as n grows
    law = AsymptoticLaw(rho=2)
    ratios = []
    for n in (2_000, 20_000):
        unordered = int(conv_10k.prefix[n])
        diagonal = sum(1 for s in range(6, n + 1, 2) if table_20k.is_prime[s // 2])
        ordered = 2 * unordered - diagonal
        ratios.append(ordered / law.coefficient_sum_estimate(n))
    assert ratios[1] < ratios[0]
    assert 1.0 < ratios[1] < 2.0


def test_goldbach_sum_ratio_frozen(conv_10k):
    assert goldbach_sum_ratio(conv_10k, 10_000) == pytest.approx(1.219717, abs=1e-6)
    with pytest.raises(ValueError):
        goldbach_sum_ratio(conv_10k, 10_001)  # 2n beyond the table
    with pytest.raises(ValueError):
        goldbach_sum_ratio(conv_10k, 8)  # below the documented floor


def test_mpart_sum_ratio_frozen(table_20k):
    counts = qm_table_dp(table_20k, 3, 1_000)
    assert mpart_sum_ratio(counts, 1_000) == pytest.approx(2.339513, abs=1e-6)


def test_mpart_two_part_delegation(conv_10k):
    direct = goldbach_sum_ratio(conv_10k, 10_000)
    assert mpart_sum_ratio(conv_10k, 20_000) == direct
    with pytest.raises(ValueError):
        mpart_sum_ratio(conv_10k, 19_999)  # odd range cannot split evenly


def test_exp_prime_sum_ratio_frozen():
    table = sieve_upto(40_000)
    assert exp_prime_sum_ratio(table, 1e-2) == pytest.approx(1.061651340665, abs=1e-9)
    with pytest.raises(ValueError):
        exp_prime_sum_ratio(table, 0.5)  # above 1/e
    with pytest.raises(ValueError):
        exp_prime_sum_ratio(table, 1e-4)  # cutoff beyond the table


def test_twin_prime_partial_products_decrease(table_20k):
    v1, t1 = twin_prime_constant(table_20k, 1_000)
    v2, t2 = twin_prime_constant(table_20k, 10_000)
    assert v1 > v2 > C2_REFERENCE
    assert t1 == pytest.approx(2 / 999) and t2 < t1
    assert v2 - t2 <= C2_REFERENCE <= v2  # bracket holds already at small P
    with pytest.raises(ValueError):
        twin_prime_constant(table_20k, 100)
    with pytest.raises(ValueError):
        twin_prime_constant(table_20k, 30_000)


def test_li2_against_quadrature():
    for n in (100, 10_000, 200_000):
        reference, err = quad(lambda u: 1 / math.log(u) ** 2, 2, n, limit=200)
        assert _li2(n) == pytest.approx(reference, rel=1e-6)


def test_hl_prediction_structure(table_20k):
    c2 = 0.66
    power_of_two = hl_prediction(table_20k, 1024, c2)
    assert power_of_two.singular_factor == 1.0  # no odd prime divisors
    n6 = hl_prediction(table_20k, 6, c2)
    assert n6.singular_factor == pytest.approx(2.0)  # (3-1)/(3-2)
    assert n6.predicted == pytest.approx(2 * c2 * 2.0 * n6.li2_integral)
    with pytest.raises(ValueError):
        hl_prediction(table_20k, 1001, c2)  # odd
    with pytest.raises(ValueError):
        hl_prediction(table_20k, 4, c2)


def test_hardy_ramanujan_ratio(table_20k):
    qt = q_total_table(table_20k, 101)
    expected = math.log(5127) / (2 * math.pi * math.sqrt(100 / (3 * math.log(100))))
    assert hardy_ramanujan_ratio(qt, 100) == pytest.approx(expected)
    with pytest.raises(ValueError):
        hardy_ramanujan_ratio(qt, 4)  # Q(4) = 0
    with pytest.raises(ValueError):
        hardy_ramanujan_ratio(qt, 500)


def test_report_builder_and_writers(tmp_path, table_20k, conv_10k):
    report = check_goldbach_sum([1_000, 10_000], counts=conv_10k)
    assert [row[0] for row in report.rows] == [1_000, 10_000]
    assert report.ratios()[1] == pytest.approx(1.219717, abs=1e-6)
    assert report.rows[0][1] == 26550  # frozen cumulative count at 2n = 2000

    again = check_goldbach_sum([1_000, 10_000], counts=conv_10k)
    assert again.provenance == report.provenance  # params-addressed, not time

    csv_path = tmp_path / "r.csv"
    write_report_csv(report, str(csv_path))
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "scale,computed,predicted,ratio"
    assert lines[1].startswith("1000,26550,")

    json_path = tmp_path / "r.json"
    write_report_json(report, str(json_path))
    import json

    doc = json.loads(json_path.read_text())
    assert doc["check"] == "theorem1"
    assert doc["rows"][1][0] == 10_000
    assert doc["provenance"] == report.provenance


def test_exp_prime_sum_report_orders_toward_limit():
    report = check_exp_prime_sum([1e-2, 1e-3])
    assert [row[0] for row in report.rows] == [1e-2, 1e-3]
    assert report.ratios()[0] == pytest.approx(1.061651340665, abs=1e-9)
    assert report.ratios()[1] == pytest.approx(1.099142118179, abs=1e-9)


def test_report_rejects_nonpositive_prediction():
    report = AsymptoticReport("x", {})
    with pytest.raises(ValueError):
        report.add(1, 1, 0.0)
