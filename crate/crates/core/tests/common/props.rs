//! Property suites run through an explicit `TestRunner` so the acceptance
//! harness and the ordinary test targets share them.

use std::collections::{BTreeSet, HashSet};

use k3moduli::binary::{cycle, proper_classes, reduce, reduced_forms, BinaryForm};
use k3moduli::finite_form::{subgroup_closure, DEFAULT_GROUP_BOUND};
use k3moduli::lattice::EvenLattice;
use k3moduli::linalg::{hermite_normal_form, lattice_membership, rat_int, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use super::checks::Outcome;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map(|_| format!("{cases} cases"))
        .map_err(|e| e.to_string())
}

fn int_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-12i64..=12, r * c).prop_map(move |v| {
            IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn rational_row(row: &[BigInt]) -> Vec<BigRational> {
    row.iter().cloned().map(rat_int).collect()
}

fn same_row_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    let gens = |m: &IntMatrix| (0..m.rows()).map(|i| rational_row(m.row(i))).collect::<Vec<_>>();
    let (ga, gb) = (gens(a), gens(b));
    let inside = |gs: &[Vec<BigRational>], other: &[Vec<BigRational>]| {
        gs.iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .all(|v| lattice_membership(v, other).unwrap())
    };
    inside(&ga, &gb) && inside(&gb, &ga)
}

pub fn snf_identities(cases: u32) -> Outcome {
    run(cases, int_matrix(), |m| {
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.u.det().unwrap().abs().is_one());
        prop_assert!(s.v.det().unwrap().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        let h = hermite_normal_form(&m);
        prop_assert_eq!(h.rows(), s.rank());
        let mut last = None;
        for i in 0..h.rows() {
            let p = (0..h.cols()).find(|&j| !h.get(i, j).is_zero()).unwrap();
            prop_assert!(last.map_or(true, |l| p > l));
            prop_assert!(h.get(i, p).is_positive());
            for k in 0..i {
                prop_assert!(!h.get(k, p).is_negative() && h.get(k, p) < h.get(i, p));
            }
            last = Some(p);
        }
        prop_assert!(same_row_lattice(&m, &h));
        Ok(())
    })
}

/// Small even lattices of rank 1 or 2 with `|det| ≤ 60`.
fn small_even_lattice() -> impl Strategy<Value = EvenLattice> {
    let rank1 = (-15i64..=15)
        .prop_filter("nonzero", |a| *a != 0)
        .prop_map(|a| EvenLattice::from_i64(&[&[2 * a]]).unwrap());
    let rank2 = (-5i64..=5, -6i64..=6, -5i64..=5)
        .prop_filter("nondegenerate, small det", |(a, b, c)| {
            let det = 4 * a * c - b * b;
            det != 0 && det.abs() <= 60
        })
        .prop_map(|(a, b, c)| EvenLattice::from_i64(&[&[2 * a, b], &[b, 2 * c]]).unwrap());
    prop_oneof![rank1, rank2]
}

pub fn discriminant_sum_negation(cases: u32) -> Outcome {
    run(cases, (small_even_lattice(), small_even_lattice()), |(l1, l2)| {
        let (q1, q2) = (l1.discriminant_form().form, l2.discriminant_form().form);
        let sum = l1.orthogonal_sum(&l2).discriminant_form().form;
        prop_assert_eq!(sum.order(), q1.order() * q2.order());
        let direct = q1.direct_sum(&q2).unwrap();
        prop_assert!(sum.find_isometry(&direct, DEFAULT_GROUP_BOUND).unwrap().is_some());
        let neg = l1.rescale(&-BigRational::one()).unwrap().discriminant_form().form;
        prop_assert!(neg.find_isometry(&q1.negate(), DEFAULT_GROUP_BOUND).unwrap().is_some());
        prop_assert_eq!(BigInt::from(q1.order()), l1.det().abs());
        Ok(())
    })
}

pub fn orthogonal_group_closure(cases: u32) -> Outcome {
    let strategy = (small_even_lattice(), prop::collection::vec(any::<prop::sample::Index>(), 0..3));
    run(cases, strategy, |(l, picks)| {
        let q = l.discriminant_form().form;
        let o = q.orthogonal_group(DEFAULT_GROUP_BOUND).unwrap();
        prop_assert!(o[0].is_identity());
        let set: HashSet<_> = o.iter().cloned().collect();
        prop_assert_eq!(set.len(), o.len());
        for g in &o {
            prop_assert!(g.is_isometry(&q, &q));
            prop_assert!(set.contains(&g.inverse(q.group()).unwrap()));
            for h in &o {
                prop_assert!(set.contains(&g.compose(h)));
            }
        }
        let gens: Vec<_> = picks.iter().map(|i| o[i.index(o.len())].clone()).collect();
        let sub = subgroup_closure(q.group(), &gens);
        let subset: HashSet<_> = sub.iter().cloned().collect();
        prop_assert!(o.len() % sub.len() == 0);
        for g in &sub {
            prop_assert!(set.contains(g));
            for h in &sub {
                prop_assert!(subset.contains(&g.compose(h)));
            }
        }
        Ok(())
    })
}

fn is_square(d: &BigInt) -> bool {
    !d.is_negative() && d.sqrt().pow(2) == *d
}

fn sl2_word() -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((any::<bool>(), -3i64..=3), 0..6).prop_map(|steps| {
        let mut m = IntMatrix::identity(2);
        for (upper, k) in steps {
            let e = if upper {
                IntMatrix::from_i64(&[&[1, k], &[0, 1]])
            } else {
                IntMatrix::from_i64(&[&[1, 0], &[k, 1]])
            };
            m = m.mul(&e).unwrap();
        }
        m
    })
}

pub fn reduction_soundness(cases: u32) -> Outcome {
    let form = (-40i64..=40, -40i64..=40, -40i64..=40)
        .prop_map(|(a, b, c)| BinaryForm::new(a, b, c))
        .prop_filter("indefinite, nonsquare", |f| f.disc().is_positive() && !is_square(&f.disc()));
    run(cases, (form, sl2_word()), |(f, m)| {
        let red = reduce(&f).unwrap();
        prop_assert!(red.form.is_reduced());
        prop_assert_eq!(f.transform(&red.transform), red.form.clone());
        prop_assert!(red.transform.det().unwrap().is_one());
        let g = f.transform(&m);
        let other = reduce(&g).unwrap().form;
        let (cyc, _) = cycle(&red.form);
        prop_assert!(cyc.contains(&other), "{} and {} reduce to different cycles", f, g);
        Ok(())
    })
}

/// Proper cycles partition the reduced forms of every discriminant up to `max_d`.
pub fn cycle_partition(max_d: i64) -> Outcome {
    let mut forms = 0usize;
    for d in 1..=max_d {
        let big = BigInt::from(d);
        let all: BTreeSet<BinaryForm> = reduced_forms(&big).unwrap().into_iter().collect();
        if let Some(f) = all.iter().find(|f| f.disc() != big) {
            return Err(format!("disc {d}: {f} has the wrong discriminant"));
        }
        let mut seen = BTreeSet::new();
        for c in proper_classes(&big).unwrap() {
            if c.representative != c.forms[0] {
                return Err(format!("disc {d}: representative is not the first cycle member"));
            }
            for f in &c.forms {
                if !all.contains(f) || !seen.insert(f.clone()) {
                    return Err(format!("disc {d}: {f} is foreign or in two cycles"));
                }
            }
            if !is_square(&big) {
                let (cyc, m) = cycle(&c.representative);
                if cyc.len() != c.forms.len()
                    || c.representative.transform(&m) != c.representative
                    || !m.det().unwrap().is_one()
                {
                    return Err(format!("disc {d}: cycle of {} is not closed", c.representative));
                }
            }
        }
        if seen != all {
            return Err(format!("disc {d}: cycles miss reduced forms"));
        }
        forms += all.len();
    }
    Ok(format!("{forms} reduced forms, disc 1..={max_d}"))
}
