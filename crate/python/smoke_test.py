"""Smoke test for the pyk3moduli extension module.

Run after building the module (see README), with it importable:

    PYTHONPATH=<dir containing pyk3moduli.so> python3 python/smoke_test.py
"""

import json
import sys

import pyk3moduli as k3


def units_squaring_to_minus_one(m):
    if m == 1:
        return 1
    roots = sum(1 for u in range(m) if (u * u + 1) % m == 0)
    return roots if m == 2 else roots // 2


def main():
    rad = k3.enumerate_rad()
    assert len(rad) == 75, len(rad)
    assert (10, 10, 0) in rad and (10, 10, 1) in rad
    assert k3.validate_rad(10, 10, 1)
    assert not k3.validate_rad(10, 0, 1)

    inv = k3.GenusInvariants(20, 2, 1, n=130, delta_P=0, delta_phiP=1)
    assert inv.validate()[0], inv.validate()
    assert k3.count_components(inv) == units_squaring_to_minus_one(65) == 2
    assert k3.GenusInvariants.from_json(inv.to_json()) == inv

    bad = k3.GenusInvariants(20, 2, 1, n=6, delta_P=0, delta_phiP=1)
    valid, violated = k3.validate_full(bad)
    assert not valid and any(cid == "I.19" for cid, _ in violated)
    try:
        k3.count_components(bad)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid invariants accepted")

    small = k3.GenusInvariants(19, 1, 1, n=4, delta_P=1, delta_phiP=1)
    assert k3.is_deformation_of_hyperelliptic(small) == (True, "i", None)

    comps = k3.list_components(k3.GenusInvariants(19, 1, 1, n=128, delta_P=1, delta_phiP=1))
    assert sum(c.is_standard for c in comps) == 1
    over2 = sum(c.is_over2 for c in comps)
    assert over2 <= 4
    for c in comps:
        assert json.loads(c.to_json())["standard"] == c.is_standard

    f = k3.BinaryForm(1, 0, -5)
    assert f.disc() == 20
    reduced, t = f.reduce()
    a, b, c = reduced.coefficients
    assert 0 < b * b < 20 and b * b - 4 * a * c == 20
    big = k3.BinaryForm(10**30, 1, -(10**30))
    assert big.disc() == 1 + 4 * 10**60

    lat = k3.EvenLattice([[2, 1], [1, -8]])
    q = lat.discriminant_form()
    assert lat.det() == -17 and q.orders == [17] and q.kind == "quadratic"
    assert k3.FiniteForm.from_json(q.to_json()) == q
    assert q.negate().is_isometric(k3.EvenLattice([[-2, -1], [-1, 8]]).discriminant_form())

    cases = json.loads(k3.case_table(12))
    assert [row["tag"] for row in cases] == ["F4_1", "F4_2", "H1", "F0_2", "F2"]
    inv12 = k3.build_involution("F4_1", 12)
    g = inv12.invariants
    assert (g.r, g.a, g.delta_phi, g.n) == (19, 1, 1, 12)
    assert all(holds for _, holds in inv12.checks())
    assert len(inv12.lattice_gram()) == 22
    assert k3.component_label("F4_1", 12).is_standard

    print("pyk3moduli smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
