//! One function per acceptance criterion. Each returns a short detail line
//! on success and a description of the first failures otherwise.

use std::collections::BTreeSet;

use k3moduli::deformation::{build_involution, component_label, hyp_case};
use k3moduli::finite_form::{FormKind, DEFAULT_GROUP_BOUND};
use k3moduli::invariants::min_k;
use k3moduli::lattice::{EvenLattice, IntegralLattice};
use k3moduli::linalg::IntMatrix;
use k3moduli::moduli::{component_data, minus_on_two_part, same_component, two_part_isometries};
use k3moduli::{
    count_components, enumerate_full, enumerate_rad, genus_deformable, is_deformation_of_hyperelliptic,
    list_components, over2_component_bound, validate_full, CaseTag, ComponentDescriptor, FormIsometry,
    GenusInvariants, HypTag,
};
use num_bigint::BigInt;
use num_traits::Signed;

use super::{figure1, literal_valid, r202_unit_count, remark_order_b, remark_order_q};

pub type Outcome = Result<String, String>;

fn fail_if(errors: Vec<String>, ok: String) -> Outcome {
    if errors.is_empty() {
        Ok(ok)
    } else {
        let total = errors.len();
        let shown: Vec<String> = errors.into_iter().take(8).collect();
        Err(format!("{total} failures: {}", shown.join("; ")))
    }
}

fn valid_with(n: u64, rad: (u32, u32, u8), pred: impl Fn(&GenusInvariants) -> bool) -> Vec<GenusInvariants> {
    enumerate_full(n)
        .unwrap()
        .into_iter()
        .filter(|i| i.triple() == rad && pred(i))
        .collect()
}

pub fn ac1_figure1() -> Outcome {
    let got: BTreeSet<(u32, u32, u8)> = enumerate_rad().into_iter().collect();
    let want = figure1();
    let missing: Vec<String> = want.difference(&got).map(|p| format!("missing {p:?}")).collect();
    let extra: Vec<String> = got.difference(&want).map(|p| format!("extra {p:?}")).collect();
    let both10 = got.contains(&(10, 10, 0)) && got.contains(&(10, 10, 1));
    let mut errors: Vec<String> = missing.into_iter().chain(extra).collect();
    if !both10 {
        errors.push("(10,10) lacks one of its two marks".into());
    }
    fail_if(errors, format!("{} points, both marks at (10,10)", got.len()))
}

pub fn ac2_conditions() -> Outcome {
    let mut errors = Vec::new();
    let mut checked = 0usize;
    for n in (2..=64u64).step_by(2) {
        for r in 0..=22u32 {
            for a in 0..=22u32 {
                for dphi in 0..=1u8 {
                    for dp in 0..=1u8 {
                        for dphip in 0..=1u8 {
                            let inv = GenusInvariants::new(r, a, dphi, min_k(n), n, dp, dphip);
                            let ours = validate_full(&inv).valid;
                            let oracle =
                                literal_valid(r as i64, a as i64, dphi as i64, n as i64, dp as i64, dphip as i64);
                            checked += 1;
                            if ours != oracle {
                                errors.push(format!("{r},{a},{dphi},n={n},{dp},{dphip}: ours {ours} oracle {oracle}"));
                            }
                        }
                    }
                }
            }
        }
    }
    fail_if(errors, format!("{checked} tuples, 0 disagreements"))
}

pub fn two_part_order_q(n: u64) -> usize {
    let l = EvenLattice::new(IntMatrix::diagonal(&[BigInt::from(2), -BigInt::from(n)])).unwrap();
    let form = l.discriminant_form().form.p_component(2);
    form.orthogonal_group(DEFAULT_GROUP_BOUND).unwrap().len()
}

pub fn two_part_order_b(n: u64) -> usize {
    let l = IntegralLattice::new(IntMatrix::diagonal(&[-BigInt::from(n / 2)])).unwrap();
    let form = l.discriminant(FormKind::Bilinear).unwrap().form.p_component(2);
    form.orthogonal_group(DEFAULT_GROUP_BOUND).unwrap().len()
}

pub fn ac3_two_part_orders() -> Outcome {
    let mut errors = Vec::new();
    for n in (2..=256u64).step_by(2) {
        let (q, b) = (two_part_order_q(n), two_part_order_b(n));
        if q != remark_order_q(n) {
            errors.push(format!("q n={n}: {q} vs {}", remark_order_q(n)));
        }
        if b != remark_order_b(n) {
            errors.push(format!("b n={n}: {b} vs {}", remark_order_b(n)));
        }
    }
    fail_if(errors, "128 degrees, both families".into())
}

pub fn ac4_single_component() -> Outcome {
    let mut errors = Vec::new();
    let mut checked = 0;
    let mut expect_one = |invs: Vec<GenusInvariants>, what: &str, n: u64| {
        if invs.is_empty() {
            errors.push(format!("{what} n={n}: no valid invariants"));
        }
        for inv in invs {
            checked += 1;
            let c = count_components(&inv).unwrap();
            if c.total != 1 {
                errors.push(format!("{what} n={n}: {} components", c.total));
            }
        }
    };
    for n in [2u64, 4, 6, 8] {
        expect_one(valid_with(n, (19, 1, 1), |i| i.delta_p == 1), "(19,1,1) dP=1", n);
        expect_one(valid_with(n, (19, 3, 1), |i| i.delta_phi_p == 1), "(19,3,1) dphiP=1", n);
    }
    expect_one(valid_with(2, (19, 1, 1), |i| i.delta_p == 0), "(19,1,1) dP=0", 2);
    expect_one(valid_with(2, (19, 3, 1), |i| i.delta_phi_p == 0), "(19,3,1) dphiP=0", 2);
    fail_if(errors, format!("{checked} invariant sets, each one component"))
}

/// `2^max(0, m−1)` with `m` the number of odd primes dividing `n`.
pub fn r202_closed_form(n: u64) -> usize {
    let mut m = 0;
    let mut x = n;
    while x % 2 == 0 {
        x /= 2;
    }
    let mut p = 3;
    while x > 1 {
        if x % p == 0 {
            m += 1;
            while x % p == 0 {
                x /= p;
            }
        }
        p += 2;
    }
    1 << (m.max(1) - 1)
}

pub fn ac5_r202() -> Outcome {
    let mut errors = Vec::new();
    let mut details = Vec::new();
    for n in [2u64, 4, 10, 20, 26, 50, 100, 130, 290] {
        let invs = valid_with(n, (20, 2, 1), |_| true);
        if invs.is_empty() {
            details.push(format!("{n}:excluded"));
            continue;
        }
        for inv in invs {
            let got = count_components(&inv).unwrap().total;
            let formula = r202_closed_form(n);
            let brute = r202_unit_count(n);
            if got != formula || got != brute {
                errors.push(format!("n={n}: {got} vs formula {formula} brute {brute}"));
            }
            details.push(format!("{n}:{got}"));
        }
    }
    fail_if(errors, details.join(" "))
}

pub fn ac6_over2_bounds() -> Outcome {
    let mut errors = Vec::new();
    let mut worst = 0;
    let mut checked = 0;
    for n in (2..=128u64).step_by(2) {
        for inv in enumerate_full(n).unwrap() {
            let tag = k3moduli::moduli::case_of(&inv).unwrap();
            if !matches!(tag, CaseTag::R1911 | CaseTag::R1931) {
                continue;
            }
            checked += 1;
            let list = list_components(&inv).unwrap();
            let over2 = list.iter().filter(|d| d.is_over2).count();
            let bound = over2_component_bound(&inv).unwrap();
            worst = worst.max(over2);
            if over2 > bound {
                errors.push(format!("{tag} n={n}: {over2} > {bound}"));
            }
            if list.iter().filter(|d| d.is_standard).count() != 1 {
                errors.push(format!("{tag} n={n}: standard descriptor not unique"));
            }
        }
    }
    fail_if(errors, format!("{checked} invariant sets, max over-2 count {worst}"))
}

/// Expected component label of a case, checked against its twist.
pub fn expected_label(tag: HypTag, n: u64, d: &ComponentDescriptor, twist: &FormIsometry) -> Result<(), String> {
    let case = d.case_tag;
    let form = component_data(case, n).unwrap().form;
    let same = |y: &FormIsometry| same_component(case, n, twist, y, DEFAULT_GROUP_BOUND).unwrap();
    match tag {
        HypTag::F4_1 | HypTag::H1 | HypTag::F1_19_3 | HypTag::F0_2 | HypTag::F2 => {
            if !d.is_standard {
                return Err(format!("{tag} n={n}: not standard"));
            }
        }
        HypTag::F4_2 => {
            if !d.is_over2 || !same(&minus_on_two_part(&form)) {
                return Err(format!("{tag} n={n}: not the -1 twist over 2"));
            }
        }
        HypTag::F1_19_1 => {
            if n % 8 == 2 {
                if !d.is_standard {
                    return Err(format!("{tag} n={n}: not standard"));
                }
            } else {
                let two = two_part_isometries(&form, DEFAULT_GROUP_BOUND).unwrap();
                if two.len() != 2 || !d.is_over2 || !same(&two[1]) {
                    return Err(format!("{tag} n={n}: not the nontrivial twist over 2"));
                }
            }
        }
    }
    Ok(())
}

pub fn audit_case(tag: HypTag, n: u64) -> Result<(), String> {
    let inv = build_involution(tag, n).map_err(|e| format!("{tag} n={n}: {e}"))?;
    let l = inv.lattice.as_integral();
    if !l.is_even() || !l.det().abs().eq(&BigInt::from(1)) || l.signature() != (3, 19) {
        return Err(format!("{tag} n={n}: lattice is not even unimodular (3,19)"));
    }
    let g = &inv.invariants;
    let (r, a, dphi, dp, dphip) = tag.target(n);
    if (g.r, g.a, g.delta_phi, g.delta_p, g.delta_phi_p) != (r, a, dphi, dp, dphip) || g.n != n {
        return Err(format!("{tag} n={n}: invariants {g:?}"));
    }
    if let Some(c) = inv.checks.iter().find(|c| !c.holds) {
        return Err(format!("{tag} n={n}: {}", c.statement));
    }
    let d = component_label(tag, n).map_err(|e| format!("{tag} n={n}: {e}"))?;
    expected_label(tag, n, &d, &inv.twist)
}

pub fn ac7_constructions() -> Outcome {
    let mut errors = Vec::new();
    let mut built = 0;
    for n in (2..=64u64).step_by(2) {
        for tag in HypTag::ALL {
            if !tag.admissible(n) {
                continue;
            }
            built += 1;
            if let Err(e) = audit_case(tag, n) {
                errors.push(e);
            }
        }
    }
    fail_if(errors, format!("{built} constructions"))
}

pub fn ac8_final_theorem() -> Outcome {
    let mut errors = Vec::new();
    let mut checked = 0;
    for n in (2..=32u64).step_by(2) {
        for inv in enumerate_full(n).unwrap() {
            let genus = genus_deformable(&inv).unwrap();
            let mut any = false;
            for d in list_components(&inv).unwrap() {
                any |= is_deformation_of_hyperelliptic(&inv, Some(d.flags())).unwrap().deformable;
            }
            checked += 1;
            if genus != any {
                errors.push(format!("{inv:?}: genus {genus} components {any}"));
            }
        }
    }
    fail_if(errors, format!("{checked} invariant sets"))
}

/// Every built case is certified deformable on its own component.
pub fn realizability(max_n: u64) -> Outcome {
    let mut errors = Vec::new();
    for n in (2..=max_n).step_by(2) {
        for tag in HypTag::ALL {
            if !tag.admissible(n) {
                continue;
            }
            let inv = build_involution(tag, n).unwrap().invariants;
            let d = component_label(tag, n).unwrap();
            let v = is_deformation_of_hyperelliptic(&inv, Some(d.flags())).unwrap();
            if !v.deformable {
                errors.push(format!("{tag} n={n}"));
            }
        }
    }
    fail_if(errors, "all cases deformable".into())
}

/// The F2 construction reproduces the invariants and flags of H1.
pub fn f2_matches_h1(max_n: u64) -> Outcome {
    let mut errors = Vec::new();
    for n in (8..=max_n).step_by(4) {
        let f2 = build_involution(HypTag::F2, n).unwrap();
        let h1 = build_involution(HypTag::H1, n).unwrap();
        let (d2, d1) = (component_label(HypTag::F2, n).unwrap(), component_label(HypTag::H1, n).unwrap());
        if f2.invariants != h1.invariants || d2.flags() != d1.flags() {
            errors.push(format!("n={n}"));
        }
        if hyp_case(HypTag::F2, n).unwrap().folds_into != Some(HypTag::H1) {
            errors.push(format!("n={n}: fold tag"));
        }
    }
    fail_if(errors, "F2 and H1 agree".into())
}
