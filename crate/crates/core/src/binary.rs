//! Indefinite binary quadratic forms `A x² + B xy + C y²`, identified with the
//! even lattices of Gram matrix `[[2A, B], [B, 2C]]`.
//!
//! Matrices act on coordinate columns: `f∘M` is the form `(x,y) ↦ f(M·(x,y))`,
//! whose Gram matrix is `Mᵀ G M`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::finite_form::{subgroup_closure, FormIsometry};
use crate::lattice::{DiscriminantData, EvenLattice};
use crate::linalg::{IntMatrix, QVec};

pub use crate::finite_form::count_cosets;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

fn mat2(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> IntMatrix {
    IntMatrix::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2")
}

fn m(i: usize, j: usize, x: &IntMatrix) -> &BigInt {
    x.get(i, j)
}

/// Inverse of a 2×2 integer matrix of determinant ±1.
fn inv2(x: &IntMatrix) -> IntMatrix {
    let det = x.det().expect("square");
    debug_assert!(det.abs().is_one());
    let s = det;
    mat2(
        m(1, 1, x) * &s,
        -m(0, 1, x) * &s,
        -m(1, 0, x) * &s,
        m(0, 0, x) * &s,
    )
}

fn mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    x.mul(y).expect("2x2 product")
}

impl BinaryForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn gram(&self) -> IntMatrix {
        mat2(
            BigInt::from(2) * &self.a,
            self.b.clone(),
            self.b.clone(),
            BigInt::from(2) * &self.c,
        )
    }

    /// The form of an even rank-2 Gram matrix.
    pub fn from_gram(g: &IntMatrix) -> Result<Self> {
        if g.rows() != 2 || g.cols() != 2 {
            return Err(Error::WrongRank(g.rows()));
        }
        if !g.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        for i in 0..2 {
            if g.get(i, i).is_odd() {
                return Err(Error::OddLattice(g.get(i, i).to_string()));
            }
        }
        Ok(Self::new(g.get(0, 0) / 2, g.get(0, 1).clone(), g.get(1, 1) / 2))
    }

    pub fn lattice(&self) -> Result<EvenLattice> {
        EvenLattice::new(self.gram())
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn primitive_part(&self) -> BinaryForm {
        let g = self.content();
        Self::new(&self.a / &g, &self.b / &g, &self.c / &g)
    }

    /// `(A, −B, C)`, the form composed with `diag(1, −1)`.
    pub fn mirror(&self) -> BinaryForm {
        Self::new(self.a.clone(), -&self.b, self.c.clone())
    }

    /// `f∘M`.
    pub fn transform(&self, t: &IntMatrix) -> BinaryForm {
        let g = t.transpose().mul(&self.gram()).and_then(|x| x.mul(t)).expect("2x2");
        Self::from_gram(&g).expect("congruent Gram stays even")
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    fn sqrt_disc(&self) -> Option<BigInt> {
        let d = self.disc();
        let s = d.sqrt();
        (&s * &s == d).then_some(s)
    }

    /// Reducedness for nonsquare positive discriminant:
    /// `0 < B < √D` and `√D − B < 2|A| < √D + B`.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if !d.is_positive() || self.sqrt_disc().is_some() {
            return false;
        }
        let two_a = BigInt::from(2) * self.a.abs();
        if !self.b.is_positive() || &self.b * &self.b >= d {
            return false;
        }
        let lower = &two_a + &self.b;
        let upper = &two_a - &self.b;
        lower.clone() * &lower > d && (!upper.is_positive() || &upper * &upper < d)
    }
}

/// A reduced form with the unimodular matrix `T` satisfying `f∘T = form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub form: BinaryForm,
    pub transform: IntMatrix,
}

/// One reduction step `ρ` with its matrix `[[0, −1], [1, t]]`.
fn rho(f: &BinaryForm) -> (BinaryForm, IntMatrix) {
    let d = f.disc();
    let s = d.sqrt();
    let c_abs = f.c.abs();
    let two_c = BigInt::from(2) * &c_abs;
    let r = if &f.c * &f.c > d {
        &c_abs - (&c_abs + &f.b).mod_floor(&two_c)
    } else {
        &s - (&s + &f.b).mod_floor(&two_c)
    };
    let t = (&r + &f.b) / (BigInt::from(2) * &f.c);
    let next = BinaryForm::new(f.c.clone(), r.clone(), (&r * &r - &d) / (BigInt::from(4) * &f.c));
    let step = mat2(BigInt::zero(), -BigInt::one(), BigInt::one(), t);
    debug_assert_eq!(f.transform(&step), next);
    (next, step)
}

/// Reduces an indefinite form. For square discriminant `k²` the result is the
/// canonical `(a, k, 0)` with `0 ≤ a < k`.
pub fn reduce(f: &BinaryForm) -> Result<Reduction> {
    let d = f.disc();
    if d.is_negative() {
        return Err(Error::DefiniteForm);
    }
    if d.is_zero() {
        return Err(Error::ZeroDisc);
    }
    if let Some(k) = f.sqrt_disc() {
        return Ok(reduce_square(f, &k));
    }
    let mut form = f.clone();
    let mut t = IntMatrix::identity(2);
    while !form.is_reduced() {
        let (next, step) = rho(&form);
        t = mul(&t, &step);
        form = next;
    }
    Ok(Reduction { form, transform: t })
}

/// The two primitive isotropic vectors of a form with square discriminant.
fn isotropic_lines(f: &BinaryForm, k: &BigInt) -> [(BigInt, BigInt); 2] {
    let prim = |x: BigInt, y: BigInt| {
        let g = x.gcd(&y);
        let (mut x, mut y) = (x / &g, y / &g);
        if y.is_negative() || (y.is_zero() && x.is_negative()) {
            x = -x;
            y = -y;
        }
        (x, y)
    };
    if f.a.is_zero() {
        // A = 0: lines y = 0 and B x + C y = 0
        [prim(BigInt::one(), BigInt::zero()), prim(-&f.c, f.b.clone())]
    } else {
        // x/y = (−B ± k) / 2A
        let two_a = BigInt::from(2) * &f.a;
        [prim(-&f.b + k, two_a.clone()), prim(-&f.b - k, two_a)]
    }
}

fn reduce_square(f: &BinaryForm, k: &BigInt) -> Reduction {
    for (p, q) in isotropic_lines(f, k) {
        // complete (p, q) to a matrix [[r, p], [s, q]] of determinant 1
        let e = p.extended_gcd(&q);
        // e.x·p + e.y·q = 1, so r = e.y, s = −e.x
        let (r, s) = (e.y.clone(), -e.x.clone());
        let t = mat2(r, p.clone(), s, q.clone());
        let g = f.transform(&t);
        debug_assert!(g.c.is_zero());
        if &g.b == k {
            // shift x ↦ x, y ↦ y + j x to bring A into [0, k)
            let j = -(g.a.div_floor(k));
            let shift = mat2(BigInt::one(), BigInt::zero(), j, BigInt::one());
            let total = mul(&t, &shift);
            let form = f.transform(&total);
            debug_assert!(!form.a.is_negative() && &form.a < k && &form.b == k && form.c.is_zero());
            return Reduction { form, transform: total };
        }
    }
    unreachable!("one isotropic line gives middle coefficient +k")
}

/// The `ρ`-cycle of a reduced form, starting at `f`, and the product of the
/// step matrices around it (an automorph of `f`).
pub fn cycle(f: &BinaryForm) -> (Vec<BinaryForm>, IntMatrix) {
    assert!(f.is_reduced(), "cycle of a non-reduced form");
    let mut out = vec![f.clone()];
    let mut t = IntMatrix::identity(2);
    let mut g = f.clone();
    loop {
        let (next, step) = rho(&g);
        t = mul(&t, &step);
        if next == *f {
            return (out, t);
        }
        out.push(next.clone());
        g = next;
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            small.push(i.clone());
            let j = n / &i;
            if j != i {
                large.push(j);
            }
        }
        i += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// All reduced forms of a positive discriminant, sorted. For a square
/// discriminant `k²` these are the canonical forms `(a, k, 0)`, `0 ≤ a < k`.
pub fn reduced_forms(d: &BigInt) -> Result<Vec<BinaryForm>> {
    if d.is_negative() {
        return Err(Error::DefiniteForm);
    }
    if d.is_zero() {
        return Err(Error::ZeroDisc);
    }
    let s = d.sqrt();
    if &s * &s == *d {
        let mut a = BigInt::zero();
        let mut out = Vec::new();
        while a < s {
            out.push(BinaryForm::new(a.clone(), s.clone(), 0));
            a += 1;
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    let four = BigInt::from(4);
    let mut b = BigInt::one();
    while b <= s {
        let num = d - &b * &b;
        if (&num % &four).is_zero() {
            let m = num / &four;
            for x in divisors(&m) {
                let f = BinaryForm::new(x.clone(), b.clone(), -(&m / &x));
                if f.is_reduced() {
                    out.push(f);
                }
                let g = BinaryForm::new(-&x, b.clone(), &m / &x);
                if g.is_reduced() {
                    out.push(g);
                }
            }
        }
        b += 1;
    }
    out.sort();
    Ok(out)
}

/// A proper (SL₂) equivalence class: its reduced forms, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperClass {
    pub representative: BinaryForm,
    pub forms: Vec<BinaryForm>,
}

/// Partition of all reduced forms of discriminant `d` into proper classes,
/// sorted by representative (the least reduced form of the class).
pub fn proper_classes(d: &BigInt) -> Result<Vec<ProperClass>> {
    let all = reduced_forms(d)?;
    let s = d.sqrt();
    if &s * &s == *d {
        return Ok(all
            .into_iter()
            .map(|f| ProperClass {
                representative: f.clone(),
                forms: vec![f],
            })
            .collect());
    }
    let mut remaining: BTreeSet<BinaryForm> = all.into_iter().collect();
    let mut out = Vec::new();
    while let Some(f) = remaining.iter().next().cloned() {
        let (cyc, _) = cycle(&f);
        let mut forms = cyc;
        forms.sort();
        for g in &forms {
            remaining.remove(g);
        }
        out.push(ProperClass {
            representative: forms[0].clone(),
            forms,
        });
    }
    out.sort_by(|x, y| x.representative.cmp(&y.representative));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// SL₂(ℤ)-equivalence.
    Proper,
    /// GL₂(ℤ)-equivalence, i.e. lattice isomorphism.
    Improper,
}

/// An equivalence class of binary lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryClass {
    pub representative: BinaryForm,
    /// Reduced forms of the proper class of the representative.
    pub cycle: Vec<BinaryForm>,
    /// Reduced forms of the mirrored proper class when it differs (improper classes only).
    pub mirror_cycle: Vec<BinaryForm>,
    /// True when the class admits an improper automorphism.
    pub ambiguous: bool,
}

impl BinaryClass {
    /// True iff `f` is in this class.
    pub fn contains(&self, f: &BinaryForm) -> Result<bool> {
        let r = reduce(f)?.form;
        Ok(self.cycle.contains(&r) || self.mirror_cycle.contains(&r))
    }
}

fn proper_class_of<'a>(classes: &'a [ProperClass], f: &BinaryForm) -> Result<&'a ProperClass> {
    let r = reduce(f)?.form;
    Ok(classes
        .iter()
        .find(|c| c.forms.contains(&r))
        .expect("reduced forms are partitioned by the classes"))
}

/// Representatives of the classes in the genus of `l0` (an even lattice of
/// signature `(1,1)`), sorted by representative.
pub fn classes_in_genus(l0: &EvenLattice, equivalence: Equivalence, bound: usize) -> Result<Vec<BinaryClass>> {
    if l0.rank() != 2 {
        return Err(Error::WrongRank(l0.rank()));
    }
    let (p, q) = l0.signature();
    if (p, q) != (1, 1) {
        return Err(Error::WrongSignature(p, q));
    }
    let f0 = BinaryForm::from_gram(l0.gram())?;
    let target = l0.discriminant_form().form;
    let classes = proper_classes(&f0.disc())?;
    let mut in_genus = Vec::new();
    for c in &classes {
        let data = c.representative.lattice()?.discriminant_form();
        if data.form.find_isometry(&target, bound)?.is_some() {
            in_genus.push(c);
        }
    }
    let mut out: Vec<BinaryClass> = Vec::new();
    let mut used: BTreeSet<BinaryForm> = BTreeSet::new();
    for c in in_genus {
        if used.contains(&c.representative) {
            continue;
        }
        let mirror = proper_class_of(&classes, &c.representative.mirror())?;
        let ambiguous = mirror.representative == c.representative;
        match equivalence {
            Equivalence::Proper => out.push(BinaryClass {
                representative: c.representative.clone(),
                cycle: c.forms.clone(),
                mirror_cycle: Vec::new(),
                ambiguous,
            }),
            Equivalence::Improper => {
                used.insert(mirror.representative.clone());
                let representative = c.representative.clone().min(mirror.representative.clone());
                out.push(BinaryClass {
                    representative,
                    cycle: c.forms.clone(),
                    mirror_cycle: if ambiguous { Vec::new() } else { mirror.forms.clone() },
                    ambiguous,
                });
            }
        }
        used.insert(c.representative.clone());
    }
    out.sort_by(|x, y| x.representative.cmp(&y.representative));
    Ok(out)
}

/// The least solution `(t, u)`, `t, u > 0`, of `t² − D'u² = 4` for the
/// primitive part of `f` (discriminant `D'`), together with the automorph
/// `[[(t − B'u)/2, −C'u], [A'u, (t + B'u)/2]]` of `f`.
pub fn fundamental_solution(f: &BinaryForm) -> Result<(BigInt, BigInt, IntMatrix)> {
    let d = f.disc();
    if d.is_negative() {
        return Err(Error::DefiniteForm);
    }
    if d.is_zero() {
        return Err(Error::ZeroDisc);
    }
    if f.sqrt_disc().is_some() {
        return Err(Error::SquareDisc(d.to_string()));
    }
    let p = f.primitive_part();
    let red = reduce(&p)?;
    let (_, around) = cycle(&red.form);
    let r = &red.transform;
    let mut aut = mul(&mul(r, &around), &inv2(r));
    let trace = m(0, 0, &aut) + m(1, 1, &aut);
    if trace.is_negative() {
        aut = aut.scale(&-BigInt::one());
    }
    let u_of = |x: &IntMatrix| {
        if !p.a.is_zero() {
            m(1, 0, x) / &p.a
        } else {
            -(m(0, 1, x) / &p.c)
        }
    };
    if u_of(&aut).is_negative() {
        aut = inv2(&aut);
    }
    let t = m(0, 0, &aut) + m(1, 1, &aut);
    let u = u_of(&aut);
    debug_assert_eq!(f.transform(&aut), *f);
    Ok((t, u, aut))
}

/// The fundamental automorph of `f` (see [`fundamental_solution`]).
pub fn fundamental_automorph(f: &BinaryForm) -> Result<IntMatrix> {
    Ok(fundamental_solution(f)?.2)
}

/// An automorph of determinant −1 when one exists.
pub fn improper_automorph(f: &BinaryForm) -> Result<Option<IntMatrix>> {
    let j = mat2(BigInt::one(), BigInt::zero(), BigInt::zero(), -BigInt::one());
    if let Some(k) = f.sqrt_disc() {
        let _ = k;
        return Ok(square_automorphisms(f)?
            .into_iter()
            .find(|x| x.det().expect("2x2").is_negative()));
    }
    let fbar = f.mirror();
    let r1 = reduce(f)?;
    let r2 = reduce(&fbar)?;
    let mut g = r1.form.clone();
    let mut w = IntMatrix::identity(2);
    loop {
        if g == r2.form {
            let t = mul(&mul(&r1.transform, &w), &inv2(&r2.transform));
            let sigma = mul(&t, &j);
            debug_assert_eq!(f.transform(&sigma), *f);
            return Ok(Some(sigma));
        }
        let (next, step) = rho(&g);
        w = mul(&w, &step);
        g = next;
        if g == r1.form {
            return Ok(None);
        }
    }
}

/// All automorphisms of a form with square discriminant.
pub fn square_automorphisms(f: &BinaryForm) -> Result<Vec<IntMatrix>> {
    let k = f.sqrt_disc().ok_or_else(|| Error::InvalidForm("discriminant is not a square".into()))?;
    if k.is_zero() {
        return Err(Error::ZeroDisc);
    }
    let id = IntMatrix::identity(2);
    let minus = id.scale(&-BigInt::one());
    let mut out = vec![id, minus];
    let [(x1, y1), (x2, y2)] = isotropic_lines(f, &k);
    let v = mat2(x1.clone(), x2.clone(), y1.clone(), y2.clone());
    let w = mat2(x2, x1, y2, y1);
    let vinv = v.to_rational().inverse()?;
    if let Some(s) = w.to_rational().mul(&vinv)?.to_integer() {
        if f.transform(&s) == *f {
            out.push(s.scale(&-BigInt::one()));
            out.push(s);
        }
    }
    out.sort_by_key(|x| x.to_rows());
    Ok(out)
}

/// Generators of the automorphism group of the lattice of `f`: `−1`, the
/// fundamental automorph (or all automorphisms for square discriminant) and
/// an improper automorph when one exists.
pub fn automorphism_generators(f: &BinaryForm) -> Result<Vec<IntMatrix>> {
    if f.sqrt_disc().is_some() {
        return square_automorphisms(f);
    }
    let mut gens = vec![IntMatrix::identity(2).scale(&-BigInt::one()), fundamental_automorph(f)?];
    if let Some(s) = improper_automorph(f)? {
        gens.push(s);
    }
    Ok(gens)
}

/// Image in `O(A_L)` of a lattice automorphism `M` (acting on coordinate
/// columns), for discriminant data computed from a Gram matrix preserved by `M`.
pub fn induced_isometry(mat: &IntMatrix, data: &DiscriminantData) -> Result<FormIsometry> {
    let images = data
        .lifts
        .iter()
        .map(|lift| {
            let moved: QVec = mat.apply(lift);
            data.coordinates(&moved)
        })
        .collect::<Result<Vec<_>>>()?;
    let iso = FormIsometry::from_images(images, data.form.group());
    debug_assert!(iso.is_isometry(&data.form, &data.form));
    Ok(iso)
}

/// Subgroup of `O(A_L)` generated by the images of the lattice automorphisms
/// of `f`, listed identity first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutImage {
    pub form: BinaryForm,
    pub elements: Vec<FormIsometry>,
}

/// Image of `O(L_f)` on the discriminant described by `data`, which may be
/// computed from any rescaling of the Gram matrix of `f`.
pub fn aut_image(f: &BinaryForm, data: &DiscriminantData, bound: usize) -> Result<AutImage> {
    let order = data.form.order();
    if order > bound as u128 {
        return Err(Error::GroupTooLarge { order, bound });
    }
    let gens = automorphism_generators(f)?
        .iter()
        .map(|x| induced_isometry(x, data))
        .collect::<Result<Vec<_>>>()?;
    Ok(AutImage {
        form: f.clone(),
        elements: subgroup_closure(data.form.group(), &gens),
    })
}

/// Image of `{±1}` for a rank-one lattice.
pub fn aut_image_rank1(data: &DiscriminantData) -> Vec<FormIsometry> {
    let minus = IntMatrix::identity(1).scale(&-BigInt::one());
    let g = induced_isometry(&minus, data).expect("−1 preserves every lattice");
    subgroup_closure(data.form.group(), &[g])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_form::DEFAULT_GROUP_BOUND;

    fn bf(a: i64, b: i64, c: i64) -> BinaryForm {
        BinaryForm::new(a, b, c)
    }

    #[test]
    fn reduction_fixes_reduced_forms() {
        for f in reduced_forms(&BigInt::from(12)).unwrap() {
            assert_eq!(reduce(&f).unwrap().form, f);
        }
        let r = reduce(&bf(1, 0, -3)).unwrap();
        assert!(reduced_forms(&BigInt::from(12)).unwrap().contains(&r.form));
        assert_eq!(bf(1, 0, -3).transform(&r.transform), r.form);
    }

    #[test]
    fn square_reduction() {
        let r = reduce(&bf(1, 2, 0)).unwrap();
        assert_eq!(r.form.b, BigInt::from(2));
        assert!(r.form.c.is_zero());
        assert_eq!(bf(1, 2, 0).transform(&r.transform), r.form);
        assert!(matches!(reduce(&bf(1, 0, 1)), Err(Error::DefiniteForm)));
        assert!(matches!(reduce(&bf(1, 2, 1)), Err(Error::ZeroDisc)));
    }

    #[test]
    fn automorph_of_x2_minus_2y2() {
        let (t, u, mat) = fundamental_solution(&bf(1, 0, -2)).unwrap();
        assert_eq!((t, u), (BigInt::from(6), BigInt::from(2)));
        assert_eq!(mat, IntMatrix::from_i64(&[&[3, 4], &[2, 3]]));
        assert!(matches!(fundamental_automorph(&bf(1, 2, 0)), Err(Error::SquareDisc(_))));
    }

    #[test]
    fn diagonal_forms_are_ambiguous() {
        let f = bf(1, 0, -3);
        let s = improper_automorph(&f).unwrap().unwrap();
        assert_eq!(f.transform(&s), f);
        assert_eq!(s.det().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn genus_contains_itself() {
        let l = EvenLattice::new(IntMatrix::diagonal(&[2, -6])).unwrap();
        let classes = classes_in_genus(&l, Equivalence::Improper, DEFAULT_GROUP_BOUND).unwrap();
        assert!(classes.iter().any(|c| c.contains(&bf(1, 0, -3)).unwrap()));
        let definite = EvenLattice::new(IntMatrix::diagonal(&[2, 6])).unwrap();
        assert!(matches!(
            classes_in_genus(&definite, Equivalence::Improper, DEFAULT_GROUP_BOUND),
            Err(Error::WrongSignature(2, 0))
        ));
        let rank3 = EvenLattice::new(IntMatrix::diagonal(&[2, -6, 2])).unwrap();
        assert!(matches!(
            classes_in_genus(&rank3, Equivalence::Improper, DEFAULT_GROUP_BOUND),
            Err(Error::WrongRank(3))
        ));
    }
}
