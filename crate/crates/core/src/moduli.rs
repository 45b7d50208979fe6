//! Connected components of moduli for given genus invariants.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::binary::{aut_image, aut_image_rank1, classes_in_genus, BinaryForm, Equivalence};
use crate::error::{Error, Result};
use crate::finite_form::{
    double_coset_representatives, prime_factors, split_prime, FiniteForm, FormIsometry, FormKind, DEFAULT_GROUP_BOUND,
};
use crate::invariants::{validate_full, GenusInvariants};
use crate::lattice::{DiscriminantData, EvenLattice, IntegralLattice};
use crate::linalg::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    R1911,
    R1910,
    R1931,
    R1930,
    R202,
    #[serde(rename = "UNIQUE")]
    Unique,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::R1911 => "R1911",
            CaseTag::R1910 => "R1910",
            CaseTag::R1931 => "R1931",
            CaseTag::R1930 => "R1930",
            CaseTag::R202 => "R202",
            CaseTag::Unique => "UNIQUE",
        };
        f.write_str(s)
    }
}

/// The lattice `L_{φ,P}` of a component: a binary class or the rank-one `⟨n⟩`.
/// Serialized as its display string, `"(a,b,c)"` or `"<n>"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LatticeClass {
    Binary(BinaryForm),
    RankOne(BigInt),
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeClass::Binary(b) => write!(f, "{b}"),
            LatticeClass::RankOne(n) => write!(f, "<{n}>"),
        }
    }
}

impl From<LatticeClass> for String {
    fn from(c: LatticeClass) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for LatticeClass {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let bad = || Error::InvalidForm(format!("lattice class {s:?}"));
        let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
        if let Some(inner) = s.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            return Ok(LatticeClass::RankOne(int(inner)?));
        }
        let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let parts = inner.split(',').map(int).collect::<Result<Vec<_>>>()?;
        match <[BigInt; 3]>::try_from(parts) {
            Ok([a, b, c]) => Ok(LatticeClass::Binary(BinaryForm::new(a, b, c))),
            Err(_) => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentFlags {
    pub standard: bool,
    pub over2: bool,
}

/// JSON keys: `case_tag`, `lattice_class`, `label`, `standard`, `over2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    pub case_tag: CaseTag,
    /// `None` when the genus invariants determine the component.
    pub lattice_class: Option<LatticeClass>,
    /// Lexicographically least element of the coset of `τ`.
    pub label: Option<FormIsometry>,
    #[serde(rename = "standard")]
    pub is_standard: bool,
    #[serde(rename = "over2")]
    pub is_over2: bool,
}

impl ComponentDescriptor {
    pub fn flags(&self) -> ComponentFlags {
        ComponentFlags {
            standard: self.is_standard,
            over2: self.is_over2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub lattice_class: Option<LatticeClass>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCount {
    pub total: usize,
    pub per_class: Vec<ClassCount>,
    pub method: CaseTag,
}

/// Which classification applies to valid invariants.
pub fn case_of(inv: &GenusInvariants) -> Result<CaseTag> {
    match (inv.r, inv.a, inv.delta_phi) {
        (r, _, _) if r <= 18 => Ok(CaseTag::Unique),
        (19, 1, 1) => Ok(if inv.delta_p == 1 { CaseTag::R1911 } else { CaseTag::R1910 }),
        (19, 3, 1) => Ok(if inv.delta_phi_p == 1 { CaseTag::R1931 } else { CaseTag::R1930 }),
        (20, 2, 1) => Ok(CaseTag::R202),
        (r, a, d) => Err(Error::WrongCase(format!("({r},{a},{d})"))),
    }
}

fn checked(inv: &GenusInvariants) -> Result<CaseTag> {
    let report = validate_full(inv);
    if !report.valid {
        return Err(Error::InvalidInvariants(report));
    }
    case_of(inv)
}

/// Reference lattice of a binary case: `⟨2⟩⊕⟨−n⟩` or the case's genus matrix.
pub fn reference_form(tag: CaseTag, n: u64) -> Result<BinaryForm> {
    let n = BigInt::from(n);
    match tag {
        CaseTag::R1911 | CaseTag::R1931 => Ok(BinaryForm::new(1i64, 0i64, -(n / BigInt::from(2)))),
        // [[2, 1], [1, (2 − n)/4]]
        CaseTag::R1910 => Ok(BinaryForm::new(1i64, 1i64, (BigInt::from(2) - n) / 8)),
        // [[8, 2], [2, (2 − n)/4]]
        CaseTag::R1930 => Ok(BinaryForm::new(4i64, 2i64, (BigInt::from(2) - n) / 8)),
        other => Err(Error::WrongCase(other.to_string())),
    }
}

fn form_kind(tag: CaseTag) -> FormKind {
    match tag {
        CaseTag::R1911 | CaseTag::R1910 => FormKind::Quadratic,
        _ => FormKind::Bilinear,
    }
}

/// Discriminant data on which `τ` lives: `q_L`, or `b_{L(1/2)}` in the
/// bilinear cases.
fn class_data(f: &BinaryForm, kind: FormKind) -> Result<DiscriminantData> {
    match kind {
        FormKind::Quadratic => Ok(f.lattice()?.discriminant_form()),
        FormKind::Bilinear => IntegralLattice::new(f.gram())?
            .rescale(&BigRational::new(BigInt::from(1), BigInt::from(2)))?
            .discriminant(FormKind::Bilinear),
    }
}

fn fixes_odd_part(g: &FormIsometry, odd: &[Vec<u64>]) -> bool {
    odd.iter().all(|x| g.apply(x) == *x)
}

/// Discriminant data of the reference lattice of a binary case, in the
/// coordinates of its Gram matrix.
pub fn component_data(tag: CaseTag, n: u64) -> Result<DiscriminantData> {
    class_data(&reference_form(tag, n)?, form_kind(tag))
}

/// Image of the automorphisms of the reference lattice in its own
/// orthogonal group.
fn reference_image(tag: CaseTag, n: u64, bound: usize) -> Result<(DiscriminantData, Vec<FormIsometry>)> {
    let reference = reference_form(tag, n)?;
    let data = class_data(&reference, form_kind(tag))?;
    let image = aut_image(&reference, &data, bound)?.elements;
    Ok((data, image))
}

fn flags_in_coset(label: &FormIsometry, image: &[FormIsometry], odd: &[Vec<u64>]) -> (bool, bool) {
    let is_standard = image.contains(label);
    let is_over2 = image.iter().any(|a| fixes_odd_part(&label.compose(a), odd));
    (is_standard, is_over2)
}

fn coset_min(g: &FormIsometry, image: &[FormIsometry]) -> FormIsometry {
    image
        .iter()
        .map(|a| g.compose(a))
        .min()
        .expect("image contains the identity")
}

/// Descriptor of the component whose lattice is the reference lattice and
/// whose `τ` is `twist`, an isometry of the reference discriminant data.
pub fn classify_twist(tag: CaseTag, n: u64, twist: &FormIsometry, bound: usize) -> Result<ComponentDescriptor> {
    let (data, image) = reference_image(tag, n, bound)?;
    if !twist.is_isometry(&data.form, &data.form) {
        return Err(Error::InvariantMismatch("twist is not an isometry".into()));
    }
    let reference = reference_form(tag, n)?;
    let genus = EvenLattice::new(reference.gram())?;
    let class = classes_in_genus(&genus, Equivalence::Improper, bound)?
        .into_iter()
        .find(|c| c.contains(&reference).unwrap_or(false))
        .expect("the reference lattice lies in its genus");
    let label = coset_min(twist, &image);
    let (is_standard, is_over2) = flags_in_coset(&label, &image, &data.form.odd_part_generators());
    Ok(ComponentDescriptor {
        case_tag: tag,
        lattice_class: Some(LatticeClass::Binary(class.representative)),
        label: Some(label),
        is_standard,
        is_over2,
    })
}

/// True iff `x` and `y` label the same component of the reference lattice.
pub fn same_component(tag: CaseTag, n: u64, x: &FormIsometry, y: &FormIsometry, bound: usize) -> Result<bool> {
    let (_, image) = reference_image(tag, n, bound)?;
    Ok(coset_min(x, &image) == coset_min(y, &image))
}

/// The isometry acting as `−1` on the 2-primary part and as the identity on
/// the odd part.
pub fn minus_on_two_part(form: &FiniteForm) -> FormIsometry {
    let g = form.group();
    let images = (0..g.rank())
        .map(|i| {
            let d = g.orders()[i];
            let (two, odd) = split_prime(d, 2);
            // e₂ + e_odd = 1 with e₂ ≡ 1 mod 2^k, e₂ ≡ 0 mod odd
            let e2 = (0..two).map(|s| s * odd % d).find(|&x| x % two == 1 % two).unwrap_or(0);
            let x = g.basis_vector(i);
            let x2 = g.scale(&x, e2);
            let xodd = g.add(&x, &g.neg(&x2));
            g.add(&g.neg(&x2), &xodd)
        })
        .collect();
    FormIsometry::from_images(images, g)
}

/// Elements of `O(form)` acting trivially on the odd part, identity first.
pub fn two_part_isometries(form: &FiniteForm, bound: usize) -> Result<Vec<FormIsometry>> {
    let odd = form.odd_part_generators();
    Ok(form
        .orthogonal_group(bound)?
        .into_iter()
        .filter(|g| fixes_odd_part(g, &odd))
        .collect())
}

fn binary_components(tag: CaseTag, n: u64, bound: usize) -> Result<Vec<ComponentDescriptor>> {
    let kind = form_kind(tag);
    let reference = reference_form(tag, n)?;
    let (ref_data, ref_image) = reference_image(tag, n, bound)?;
    let target = &ref_data.form;
    let group = target.orthogonal_group(bound)?;
    let id = vec![group[0].clone()];
    let odd = target.odd_part_generators();
    let genus = EvenLattice::new(reference.gram())?;
    let mut out = Vec::new();
    for class in classes_in_genus(&genus, Equivalence::Improper, bound)? {
        let is_ref = class.contains(&reference)?;
        let image = if is_ref {
            ref_image.clone()
        } else {
            let form = class.representative.clone();
            let data = class_data(&form, kind)?;
            let psi = data
                .form
                .find_isometry(target, bound)?
                .ok_or_else(|| Error::InvariantMismatch(format!("class {form} is not in the genus")))?;
            let psi_inv = psi.inverse(data.form.group())?;
            aut_image(&form, &data, bound)?
                .elements
                .iter()
                .map(|a| psi.compose(&a.compose(&psi_inv)))
                .collect()
        };
        for label in double_coset_representatives(&group, &id, &image)? {
            let (is_standard, is_over2) = if is_ref {
                flags_in_coset(&label, &image, &odd)
            } else {
                (false, false)
            };
            out.push(ComponentDescriptor {
                case_tag: tag,
                lattice_class: Some(LatticeClass::Binary(class.representative.clone())),
                label: Some(label),
                is_standard,
                is_over2,
            });
        }
    }
    Ok(out)
}

/// `b_{⟨n/2⟩}`.
fn half_rank_one_data(n: u64) -> Result<DiscriminantData> {
    IntegralLattice::new(IntMatrix::diagonal(&[n / 2]))?.discriminant(FormKind::Bilinear)
}

fn minus_identity(form: &FiniteForm) -> FormIsometry {
    let g = form.group();
    let images = (0..g.rank()).map(|i| g.neg(&g.basis_vector(i))).collect();
    FormIsometry::from_images(images, g)
}

fn r202_components(n: u64, bound: usize) -> Result<Vec<ComponentDescriptor>> {
    let data = half_rank_one_data(n)?;
    let b = &data.form;
    let minus = minus_identity(b);
    debug_assert_eq!(aut_image_rank1(&data).len(), if b.order() > 2 { 2 } else { 1 });
    let mut labels: Vec<FormIsometry> = b
        .all_isometries(&b.negate(), bound)?
        .into_iter()
        .map(|t| {
            let other = t.compose(&minus);
            t.min(other)
        })
        .collect();
    labels.sort();
    labels.dedup();
    Ok(labels
        .into_iter()
        .map(|label| ComponentDescriptor {
            case_tag: CaseTag::R202,
            lattice_class: Some(LatticeClass::RankOne(BigInt::from(n))),
            label: Some(label),
            is_standard: false,
            is_over2: false,
        })
        .collect())
}

/// `2^{max(0, m−1)}` with `m` the number of odd primes dividing `n`.
pub fn r202_formula(n: u64) -> usize {
    let m = prime_factors(n).into_iter().filter(|&p| p != 2).count() as u32;
    1usize << m.saturating_sub(1)
}

pub fn list_components(inv: &GenusInvariants) -> Result<Vec<ComponentDescriptor>> {
    list_components_with(inv, DEFAULT_GROUP_BOUND)
}

/// One descriptor per component, grouped by lattice class.
pub fn list_components_with(inv: &GenusInvariants, bound: usize) -> Result<Vec<ComponentDescriptor>> {
    match checked(inv)? {
        CaseTag::Unique => Ok(vec![ComponentDescriptor {
            case_tag: CaseTag::Unique,
            lattice_class: None,
            label: None,
            is_standard: false,
            is_over2: false,
        }]),
        CaseTag::R202 => r202_components(inv.n, bound),
        tag => binary_components(tag, inv.n, bound),
    }
}

pub fn count_components(inv: &GenusInvariants) -> Result<ComponentCount> {
    count_components_with(inv, DEFAULT_GROUP_BOUND)
}

pub fn count_components_with(inv: &GenusInvariants, bound: usize) -> Result<ComponentCount> {
    let method = checked(inv)?;
    let list = list_components_with(inv, bound)?;
    let mut per_class: Vec<ClassCount> = Vec::new();
    for d in &list {
        match per_class.last_mut() {
            Some(last) if last.lattice_class == d.lattice_class => last.count += 1,
            _ => per_class.push(ClassCount {
                lattice_class: d.lattice_class.clone(),
                count: 1,
            }),
        }
    }
    Ok(ComponentCount {
        total: list.len(),
        per_class,
        method,
    })
}

/// The standard component of a binary case.
pub fn standard_component(inv: &GenusInvariants) -> Result<ComponentDescriptor> {
    match checked(inv)? {
        CaseTag::R202 => Err(Error::NoStandard),
        CaseTag::Unique => Err(Error::WrongCase(CaseTag::Unique.to_string())),
        _ => list_components(inv)?
            .into_iter()
            .find(|d| d.is_standard)
            .ok_or_else(|| Error::InvariantMismatch("no standard descriptor".into())),
    }
}

/// Upper bound on components different from the standard only over 2, from
/// the order of the 2-component of the orthogonal group.
pub fn over2_component_bound(inv: &GenusInvariants) -> Result<usize> {
    let n = inv.n;
    match case_of(inv)? {
        CaseTag::R1911 => Ok(if n % 8 == 2 {
            1
        } else if n % 16 == 0 {
            4
        } else {
            2
        }),
        CaseTag::R1931 => Ok(if n % 4 == 2 || n % 8 == 4 {
            1
        } else if n % 16 == 8 {
            2
        } else {
            4
        }),
        other => Err(Error::WrongCase(other.to_string())),
    }
}
