mod common;

use common::checks;
use k3moduli::deformation::{build_involution, case_table, component_label, hyp_case};
use k3moduli::{
    genus_deformable, is_deformation_of_hyperelliptic, Clause, ComponentFlags, Error, GenusInvariants, HypTag,
};

fn inv(r: u32, a: u32, dphi: u8, n: u64, dp: u8, dphip: u8) -> GenusInvariants {
    GenusInvariants::new(r, a, dphi, 1, n, dp, dphip).with_min_k()
}

const STANDARD: ComponentFlags = ComponentFlags {
    standard: true,
    over2: true,
};
const OVER2: ComponentFlags = ComponentFlags {
    standard: false,
    over2: true,
};
const OTHER: ComponentFlags = ComponentFlags {
    standard: false,
    over2: false,
};

#[test]
fn constructions_match_targets_and_labels() {
    checks::ac7_constructions().unwrap();
}

#[test]
fn built_cases_are_certified() {
    checks::realizability(64).unwrap();
}

#[test]
fn f2_reproduces_h1() {
    checks::f2_matches_h1(32).unwrap();
}

#[test]
fn genus_level_agrees_with_component_level() {
    checks::ac8_final_theorem().unwrap();
}

#[test]
fn small_degrees_use_clause_one() {
    for i in k3moduli::enumerate_full(4).unwrap() {
        let v = is_deformation_of_hyperelliptic(&i, None).unwrap();
        assert!(v.deformable);
        assert_eq!(v.clause, Clause::I);
    }
}

#[test]
fn r202_above_four_is_not_deformable() {
    let i = inv(20, 2, 1, 10, 0, 1);
    let v = is_deformation_of_hyperelliptic(&i, None).unwrap();
    assert!(!v.deformable);
    assert_eq!(v.clause, Clause::None);
    assert!(!genus_deformable(&i).unwrap());
}

#[test]
fn f4_first_case_witnesses_clause_three() {
    let i = inv(19, 1, 1, 12, 1, 1);
    let v = is_deformation_of_hyperelliptic(&i, Some(STANDARD)).unwrap();
    assert!(v.deformable);
    assert_eq!(v.clause, Clause::III);
    assert_eq!(v.witness_case, Some(HypTag::F4_1));
}

#[test]
fn clause_three_splits_by_degree() {
    for (n, dp) in [(16u64, 1u8), (18, 0), (20, 1), (22, 1)] {
        let i = inv(19, 1, 1, n, dp, dp);
        assert!(k3moduli::validate_full(&i).valid, "n={n}");
        let over2 = is_deformation_of_hyperelliptic(&i, Some(OVER2)).unwrap().deformable;
        assert_eq!(over2, n % 8 == 4 || n % 8 == 6, "n={n}");
        assert!(is_deformation_of_hyperelliptic(&i, Some(STANDARD)).unwrap().deformable);
        assert!(!is_deformation_of_hyperelliptic(&i, Some(OTHER)).unwrap().deformable);
    }
}

#[test]
fn clause_four_needs_standard() {
    let i = inv(19, 3, 1, 16, 0, 1);
    assert!(is_deformation_of_hyperelliptic(&i, Some(STANDARD)).unwrap().deformable);
    assert!(!is_deformation_of_hyperelliptic(&i, Some(OVER2)).unwrap().deformable);
    assert_eq!(
        is_deformation_of_hyperelliptic(&i, Some(STANDARD)).unwrap().witness_case,
        Some(HypTag::H1)
    );
}

#[test]
fn flags_are_required_for_nineteen() {
    let i = inv(19, 3, 1, 16, 0, 1);
    assert!(matches!(
        is_deformation_of_hyperelliptic(&i, None),
        Err(Error::MissingFlags(19, 3))
    ));
}

#[test]
fn boundary_spheres_with_p_class_excluded() {
    let bad = k3moduli::enumerate_full(10)
        .unwrap()
        .into_iter()
        .find(|i| i.r + i.a == 22 && i.delta_phi_p == 0 && i.r < 19)
        .expect("some boundary triple at n=10");
    let v = is_deformation_of_hyperelliptic(&bad, None).unwrap();
    assert!(!v.deformable);
}

#[test]
fn involution_structure_at_twelve() {
    for tag in [HypTag::F4_1, HypTag::F4_2, HypTag::H1, HypTag::F0_2] {
        let b = build_involution(tag, 12).unwrap();
        assert_eq!(b.fixed_lattice.signature().0, 1, "{tag}");
        assert_eq!(b.fixed_basis.len() + b.anti_basis.len(), 22, "{tag}");
        assert_eq!(b.fixed_invariants.r as usize, b.fixed_basis.len(), "{tag}");
        let d = component_label(tag, 12).unwrap();
        assert!(d.is_standard, "{tag}");
    }
}

#[test]
fn case_table_rows() {
    assert!(matches!(case_table(7), Err(Error::OddDegree(7))));
    let t = case_table(20).unwrap();
    let tags: Vec<HypTag> = t.iter().map(|c| c.tag).collect();
    assert_eq!(tags, vec![HypTag::F4_1, HypTag::F4_2, HypTag::H1, HypTag::F0_2, HypTag::F2]);
    let f2 = hyp_case(HypTag::F2, 20).unwrap();
    assert_eq!(f2.folds_into, Some(HypTag::H1));
    let v = serde_json::to_value(&f2).unwrap();
    assert_eq!(v["delta_P"], 0);
    assert_eq!(v["delta_phiP"], 1);
}

#[test]
fn inadmissible_degree_is_an_error() {
    assert!(build_involution(HypTag::F4_2, 10).is_err());
    assert!(build_involution(HypTag::H1, 6).is_err());
}
