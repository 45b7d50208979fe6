//! Hyper-elliptic cases: explicit integral polarized involutions and the
//! deformability classifier.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_form::{FormIsometry, DEFAULT_GROUP_BOUND};
use crate::invariants::{validate_full, GenusInvariants};
use crate::lattice::{
    e8_gram, overlattice_from_glue_with_basis, two_elementary_invariants, u_gram, EvenLattice, GlueGroup,
    TwoElementaryInvariants,
};
use crate::linalg::{common_denominator, left_kernel, rat, rat_int, IntMatrix, QVec, RatMatrix};
use crate::moduli::{classify_twist, component_data, CaseTag, ComponentDescriptor, ComponentFlags};

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HypTag {
    F4_1,
    F4_2,
    F1_19_1,
    H1,
    F1_19_3,
    F0_2,
    F2,
}

impl HypTag {
    pub const ALL: [HypTag; 7] = [
        HypTag::F4_1,
        HypTag::F4_2,
        HypTag::F1_19_1,
        HypTag::H1,
        HypTag::F1_19_3,
        HypTag::F0_2,
        HypTag::F2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HypTag::F4_1 => "F4_1",
            HypTag::F4_2 => "F4_2",
            HypTag::F1_19_1 => "F1_19_1",
            HypTag::H1 => "H1",
            HypTag::F1_19_3 => "F1_19_3",
            HypTag::F0_2 => "F0_2",
            HypTag::F2 => "F2",
        }
    }

    pub fn admissible(self, n: u64) -> bool {
        match self {
            HypTag::F4_1 => n % 2 == 0 && n >= 6,
            HypTag::F4_2 => n % 8 == 4 && n >= 12,
            HypTag::F1_19_1 | HypTag::F1_19_3 => n % 4 == 2 && n >= 6,
            HypTag::H1 | HypTag::F0_2 => n % 4 == 0 && n >= 4,
            HypTag::F2 => n % 4 == 0 && n >= 8,
        }
    }

    /// Target `(r, a, δφ, δP, δφP)`.
    pub fn target(self, n: u64) -> (u32, u32, u8, u8, u8) {
        match self {
            HypTag::F4_1 | HypTag::F4_2 => (19, 1, 1, 1, 1),
            HypTag::F1_19_1 => {
                let d = u8::from(n % 8 != 2);
                (19, 1, 1, d, d)
            }
            HypTag::H1 | HypTag::F1_19_3 | HypTag::F0_2 | HypTag::F2 => (19, 3, 1, 0, 1),
        }
    }

    /// The case whose polarized involution this one reproduces.
    pub fn folds_into(self) -> Option<HypTag> {
        match self {
            HypTag::F2 => Some(HypTag::H1),
            _ => None,
        }
    }

    /// Symbolic data of the double-scroll side, carried verbatim.
    pub fn scroll_data(self) -> &'static str {
        match self {
            HypTag::F4_1 => "((F4)^(1); r=19, a=1, H=0, delta_phiS=1)",
            HypTag::F4_2 => "((F4)^(2); r=19, a=1, H=0, delta_phiS=1)",
            HypTag::F1_19_1 => "(F1; r=19, a=1, H=[h], delta_phiS=0, v=h)",
            HypTag::H1 => "(H_(1); r=19, a=3, H=[e1,e2], delta_phiS=1)",
            HypTag::F1_19_3 => "(F1; r=19, a=3, H=[h,e], delta_phiS=1)",
            HypTag::F0_2 => "((F0)_(2); r=19, a=3, H=[e1,e2], delta_phiS=1)",
            HypTag::F2 => "(F2; r=19, a=3, H=[c,e], delta_phiS=1)",
        }
    }
}

impl fmt::Display for HypTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypCase {
    pub tag: HypTag,
    pub n: u64,
    /// Coefficients of `P` in the named generators.
    pub recipe: Vec<(String, i64)>,
    pub r: u32,
    pub a: u32,
    pub delta_phi: u8,
    #[serde(rename = "delta_P")]
    pub delta_p: u8,
    #[serde(rename = "delta_phiP")]
    pub delta_phi_p: u8,
    pub folds_into: Option<HypTag>,
    pub scroll_data: String,
}

fn recipe(tag: HypTag, n: i64) -> Vec<(&'static str, i64)> {
    match tag {
        HypTag::F4_1 => vec![("C", n / 2 + 1), ("E", 1)],
        HypTag::F4_2 => vec![("C", n / 4 + 2), ("E", 2)],
        HypTag::F1_19_1 | HypTag::F1_19_3 => vec![("h", (n + 2) / 4), ("e", (2 - n) / 4)],
        HypTag::H1 => vec![("e1", n / 4), ("e2", 1)],
        HypTag::F0_2 => vec![("e1", 1), ("e2", n / 4)],
        // n₁c + e with c = e1, e = e2 − e1, n₁ = n/4 + 1
        HypTag::F2 => vec![("e1", n / 4), ("e2", 1)],
    }
}

/// The vector `Q` spanning `L_{φ,P}` together with the positive generator.
fn partner(tag: HypTag, n: i64) -> Vec<(&'static str, i64)> {
    match tag {
        HypTag::F4_1 => vec![("C", n / 2 - 1), ("E", -1)],
        HypTag::F4_2 => vec![("C", n / 4 - 2), ("E", -2)],
        HypTag::F1_19_1 | HypTag::F1_19_3 => vec![("h", (n - 2) / 4), ("e", -(n + 2) / 4)],
        HypTag::H1 | HypTag::F2 => vec![("e1", n / 4), ("e2", -1)],
        HypTag::F0_2 => vec![("e1", 1), ("e2", -(n / 4))],
    }
}

pub fn hyp_case(tag: HypTag, n: u64) -> Result<HypCase> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddDegree(n));
    }
    if !tag.admissible(n) {
        return Err(Error::WrongCase(format!("{tag} at n={n}")));
    }
    let (r, a, delta_p, delta_phi_p) = {
        let t = tag.target(n);
        (t.0, t.1, t.3, t.4)
    };
    Ok(HypCase {
        tag,
        n,
        recipe: recipe(tag, n as i64).into_iter().map(|(s, c)| (s.to_string(), c)).collect(),
        r,
        a,
        delta_phi: 1,
        delta_p,
        delta_phi_p,
        folds_into: tag.folds_into(),
        scroll_data: tag.scroll_data().to_string(),
    })
}

/// All cases admissible at degree `n`.
pub fn case_table(n: u64) -> Result<Vec<HypCase>> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddDegree(n));
    }
    HypTag::ALL
        .iter()
        .filter(|t| t.admissible(n))
        .map(|&t| hyp_case(t, n))
        .collect()
}

/// Named generators with their Gram matrix and the sign of `φ` on each.
struct Block {
    names: Vec<&'static str>,
    gram: IntMatrix,
    signs: Vec<i8>,
}

impl Block {
    fn new(names: &[&'static str], gram: IntMatrix, signs: &[i8]) -> Self {
        Self {
            names: names.to_vec(),
            gram,
            signs: signs.to_vec(),
        }
    }
}

enum Piece {
    Plain(Block),
    Glued { left: Block, right: Block, glue: Vec<(QVec, QVec)> },
}

fn halves(v: &[i64]) -> QVec {
    v.iter().map(|&x| rat(x, 2)).collect()
}

fn e8_block(name: &'static str) -> Block {
    Block {
        names: vec![name; 8],
        gram: e8_gram(),
        signs: vec![1; 8],
    }
}

fn pieces(tag: HypTag) -> Vec<Piece> {
    let d = |v: &[i64]| IntMatrix::diagonal(v);
    match tag {
        HypTag::F4_1 | HypTag::F4_2 => vec![
            Piece::Plain(Block::new(&["C", "E"], IntMatrix::from_i64(&[&[0, 1], &[1, -2]]), &[-1, -1])),
            Piece::Glued {
                left: Block::new(&["g1"], d(&[2]), &[-1]),
                right: Block::new(&["g2"], d(&[-2]), &[1]),
                glue: vec![(halves(&[1]), halves(&[1]))],
            },
            Piece::Plain(Block::new(&["u1", "u2"], u_gram(), &[1, 1])),
            Piece::Plain(e8_block("E8a")),
            Piece::Plain(e8_block("E8b")),
        ],
        HypTag::F1_19_1 => vec![
            Piece::Glued {
                left: Block::new(&["h", "e"], d(&[2, -2]), &[-1, -1]),
                right: Block::new(&["g1", "g2"], d(&[2, -2]), &[-1, 1]),
                // (h + g2)/2, (e + g1)/2
                glue: vec![(halves(&[1, 0]), halves(&[0, 1])), (halves(&[0, 1]), halves(&[1, 0]))],
            },
            Piece::Plain(Block::new(&["u1", "u2"], u_gram(), &[1, 1])),
            Piece::Plain(e8_block("E8a")),
            Piece::Plain(e8_block("E8b")),
        ],
        HypTag::H1 | HypTag::F0_2 | HypTag::F2 => vec![
            Piece::Glued {
                left: Block::new(&["e1", "e2"], IntMatrix::from_i64(&[&[0, 2], &[2, 0]]), &[-1, -1]),
                right: Block::new(&["e1'", "e2'"], IntMatrix::from_i64(&[&[0, -2], &[-2, 0]]), &[1, 1]),
                glue: vec![(halves(&[1, 0]), halves(&[1, 0])), (halves(&[0, 1]), halves(&[0, 1]))],
            },
            Piece::Glued {
                left: Block::new(&["g"], d(&[2]), &[-1]),
                right: Block::new(&["g'"], d(&[-2]), &[1]),
                glue: vec![(halves(&[1]), halves(&[1]))],
            },
            Piece::Plain(e8_block("E8a")),
            Piece::Plain(e8_block("E8b")),
        ],
        HypTag::F1_19_3 => vec![
            Piece::Glued {
                left: Block::new(&["h", "e"], d(&[2, -2]), &[-1, -1]),
                right: Block::new(&["h'", "e'"], d(&[-2, 2]), &[1, 1]),
                glue: vec![(halves(&[1, 0]), halves(&[1, 0])), (halves(&[0, 1]), halves(&[0, 1]))],
            },
            Piece::Glued {
                left: Block::new(&["g"], d(&[2]), &[-1]),
                right: Block::new(&["g'"], d(&[-2]), &[1]),
                glue: vec![(halves(&[1]), halves(&[1]))],
            },
            Piece::Plain(e8_block("E8a")),
            Piece::Plain(e8_block("E8b")),
        ],
    }
}

/// A membership statement from the derivation of the component label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperCheck {
    pub statement: String,
    pub holds: bool,
}

/// An integral polarized involution `(L, φ, P)` with `L` given by a basis in
/// ambient coordinates (the named generators).
#[derive(Clone, Debug)]
pub struct PolarizedInvolution {
    pub case: HypTag,
    pub n: u64,
    pub generator_names: Vec<String>,
    /// Gram matrix of the named generators.
    pub ambient_gram: IntMatrix,
    /// Sign of `φ` on each named generator.
    pub phi_signs: Vec<i8>,
    /// Basis of `L`, rows in ambient coordinates.
    pub basis: Vec<QVec>,
    pub lattice: EvenLattice,
    /// Basis of `L^φ`, rows in ambient coordinates.
    pub fixed_basis: Vec<QVec>,
    pub fixed_lattice: EvenLattice,
    /// Basis of `L_φ`.
    pub anti_basis: Vec<QVec>,
    pub p: QVec,
    pub q: QVec,
    pub fixed_invariants: TwoElementaryInvariants,
    pub invariants: GenusInvariants,
    pub moduli_case: CaseTag,
    /// `τ` as an isometry of the reference discriminant data.
    pub twist: FormIsometry,
    pub checks: Vec<PaperCheck>,
}

struct Ambient {
    names: Vec<&'static str>,
    gram: IntMatrix,
    signs: Vec<i8>,
    basis: Vec<QVec>,
}

fn assemble(pieces: Vec<Piece>) -> Result<Ambient> {
    let mut names = Vec::new();
    let mut signs = Vec::new();
    let mut grams = Vec::new();
    let mut local_bases: Vec<Vec<QVec>> = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Plain(b) => {
                let k = b.names.len();
                local_bases.push(
                    (0..k)
                        .map(|i| (0..k).map(|j| rat_int(i64::from(i == j))).collect())
                        .collect(),
                );
                names.extend(b.names);
                signs.extend(b.signs);
                grams.push(b.gram);
            }
            Piece::Glued { left, right, glue } => {
                let group = GlueGroup {
                    left: EvenLattice::new(left.gram.clone())?,
                    right: EvenLattice::new(right.gram.clone())?,
                    glue,
                };
                let ov = overlattice_from_glue_with_basis(&group).map_err(|e| Error::GlueRejected(e.to_string()))?;
                local_bases.push(ov.basis);
                names.extend(left.names);
                names.extend(right.names);
                signs.extend(left.signs);
                signs.extend(right.signs);
                grams.push(left.gram);
                grams.push(right.gram);
            }
        }
    }
    let gram = IntMatrix::block_diag(&grams.iter().collect::<Vec<_>>());
    let dim = gram.rows();
    let mut basis = Vec::new();
    let mut offset = 0;
    for local in local_bases {
        let k = local.len();
        for row in local {
            let mut v = vec![BigRational::zero(); dim];
            for (j, x) in row.into_iter().enumerate() {
                v[offset + j] = x;
            }
            basis.push(v);
        }
        offset += k;
    }
    Ok(Ambient {
        names,
        gram,
        signs,
        basis,
    })
}

fn dot(g: &IntMatrix, x: &[BigRational], y: &[BigRational]) -> BigRational {
    g.bilinear(x, y)
}

fn gram_of(g: &IntMatrix, rows: &[QVec]) -> Result<IntMatrix> {
    let entries: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|x| {
            rows.iter()
                .map(|y| {
                    let v = dot(g, x, y);
                    if v.is_integer() {
                        Ok(v.to_integer())
                    } else {
                        Err(Error::NotIntegral)
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    IntMatrix::from_rows(&entries)
}

fn is_even(x: &BigRational) -> bool {
    x.is_integer() && x.to_integer().is_even()
}

struct Membership {
    inverse: RatMatrix,
}

impl Membership {
    fn new(basis: &[QVec]) -> Result<Self> {
        Ok(Self {
            inverse: RatMatrix::from_rows(basis)?.inverse()?,
        })
    }

    /// Coordinates of `x` in the basis.
    fn coords(&self, x: &[BigRational]) -> Result<QVec> {
        let row = RatMatrix::from_rows(&[x.to_vec()])?;
        Ok(row.mul(&self.inverse)?.row(0).to_vec())
    }

    fn contains(&self, x: &[BigRational]) -> Result<bool> {
        Ok(self.coords(x)?.iter().all(|c| c.is_integer()))
    }
}

/// Saturated sublattice of vectors of `L` vanishing on the coordinates where
/// `keep(sign)` fails.
fn eigen_sublattice(basis: &[QVec], signs: &[i8], zero_where: i8) -> Result<Vec<QVec>> {
    let cols: Vec<usize> = (0..signs.len()).filter(|&j| signs[j] == zero_where).collect();
    let restricted: Vec<QVec> = basis.iter().map(|b| cols.iter().map(|&j| b[j].clone()).collect()).collect();
    let denom = common_denominator(restricted.iter().flatten());
    let int_rows: Vec<Vec<BigInt>> = restricted
        .iter()
        .map(|r| r.iter().map(|x| (x * &denom).to_integer()).collect())
        .collect();
    let kernel = left_kernel(&IntMatrix::from_rows(&int_rows)?);
    let dim = basis[0].len();
    Ok((0..kernel.rows())
        .map(|i| {
            let mut v = vec![BigRational::zero(); dim];
            for (c, b) in kernel.row(i).iter().zip(basis) {
                if c.is_zero() {
                    continue;
                }
                for (o, x) in v.iter_mut().zip(b) {
                    *o += x * c;
                }
            }
            v
        })
        .collect())
}

fn named(names: &[&'static str], terms: &[(&str, BigRational)]) -> QVec {
    let mut v = vec![BigRational::zero(); names.len()];
    for (name, c) in terms {
        let j = names.iter().position(|x| x == name).expect("known generator");
        v[j] += c.clone();
    }
    v
}

fn int_terms(terms: &[(&'static str, i64)]) -> Vec<(&'static str, BigRational)> {
    terms.iter().map(|&(s, c)| (s, rat_int(c))).collect()
}

fn add(x: &[BigRational], y: &[BigRational]) -> QVec {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scale(x: &[BigRational], c: &BigRational) -> QVec {
    x.iter().map(|a| a * c).collect()
}

fn moduli_case(tag: HypTag, n: u64) -> CaseTag {
    match tag {
        HypTag::F4_1 | HypTag::F4_2 => CaseTag::R1911,
        HypTag::F1_19_1 if n % 8 == 2 => CaseTag::R1910,
        HypTag::F1_19_1 => CaseTag::R1911,
        _ => CaseTag::R1931,
    }
}

/// Builds the involution of a case at degree `n` and verifies it.
pub fn build_involution(tag: HypTag, n: u64) -> Result<PolarizedInvolution> {
    hyp_case(tag, n)?;
    let amb = assemble(pieces(tag))?;
    let names = &amb.names;
    let g = &amb.gram;
    let lattice = EvenLattice::new(gram_of(g, &amb.basis)?)?;
    if lattice.det().abs() != BigInt::one() || lattice.signature() != (3, 19) {
        return Err(Error::InvariantMismatch(format!(
            "L has det {} and signature {:?}",
            lattice.det(),
            lattice.signature()
        )));
    }
    let member = Membership::new(&amb.basis)?;
    let ni = n as i64;
    let p = named(names, &int_terms(&recipe(tag, ni)));
    let q = named(names, &int_terms(&partner(tag, ni)));
    let phi = |x: &[BigRational]| -> QVec { x.iter().zip(&amb.signs).map(|(v, &s)| v * BigInt::from(s)).collect() };

    // P: primitive, P² = n, φ(P) = −P
    let pc = member.coords(&p)?;
    if !pc.iter().all(|c| c.is_integer()) {
        return Err(Error::InvariantMismatch("P is not in L".into()));
    }
    let content = pc.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&c.to_integer()));
    if !content.is_one() {
        return Err(Error::InvariantMismatch("P is not primitive".into()));
    }
    if dot(g, &p, &p) != rat_int(ni) || phi(&p) != scale(&p, &rat_int(-1)) {
        return Err(Error::InvariantMismatch("P² ≠ n or φ(P) ≠ −P".into()));
    }
    if dot(g, &q, &q) != rat_int(-ni) || !dot(g, &p, &q).is_zero() {
        return Err(Error::InvariantMismatch("Q² ≠ −n or P·Q ≠ 0".into()));
    }

    let fixed_basis = eigen_sublattice(&amb.basis, &amb.signs, -1)?;
    let anti_basis = eigen_sublattice(&amb.basis, &amb.signs, 1)?;
    let fixed_lattice = EvenLattice::new(gram_of(g, &fixed_basis)?)?;
    let (pos, _) = fixed_lattice.signature();
    if pos != 1 {
        return Err(Error::InvariantMismatch("L^φ is not hyperbolic".into()));
    }
    let fixed_invariants = two_elementary_invariants(&fixed_lattice)?;

    // δφ, δφP on a basis of L (both sides are additive mod 2); δP on L_φ
    let delta_phi = u8::from(amb.basis.iter().any(|x| !is_even(&dot(g, x, &phi(x)))));
    let delta_phi_p = u8::from(amb.basis.iter().any(|x| !is_even(&(dot(g, x, &phi(x)) - dot(g, x, &p)))));
    let delta_p = u8::from(anti_basis.iter().any(|y| !is_even(&dot(g, &p, y))));
    let invariants = GenusInvariants::new(
        fixed_invariants.r as u32,
        fixed_invariants.a as u32,
        delta_phi,
        1,
        n,
        delta_p,
        delta_phi_p,
    )
    .with_min_k();
    let (r, a, dphi, dp, dphip) = tag.target(n);
    if (invariants.r, invariants.a, invariants.delta_phi, invariants.delta_p, invariants.delta_phi_p)
        != (r, a, dphi, dp, dphip)
        || fixed_invariants.delta != dphi
    {
        return Err(Error::InvariantMismatch(format!("{tag} at n={n} gives {invariants}")));
    }
    let report = validate_full(&invariants);
    if !report.valid {
        return Err(Error::InvalidInvariants(report));
    }

    let moduli_case = moduli_case(tag, n);
    let twist = compute_twist(tag, n, moduli_case, names, g, &member, &p, &q)?;
    let checks = paper_checks(tag, n, names, &member, &p, &q)?;
    if let Some(c) = checks.iter().find(|c| !c.holds) {
        return Err(Error::GlueRejected(format!("fails: {}", c.statement)));
    }
    Ok(PolarizedInvolution {
        case: tag,
        n,
        generator_names: names.iter().map(|s| s.to_string()).collect(),
        ambient_gram: g.clone(),
        phi_signs: amb.signs.clone(),
        basis: amb.basis,
        lattice,
        fixed_basis,
        fixed_lattice,
        anti_basis,
        p,
        q,
        fixed_invariants,
        invariants,
        moduli_case,
        twist,
        checks,
    })
}

/// Bases `w` of `L_{φ,P}` matching the reference Gram matrix and `v` of the
/// glued partner, so that a glue element reads `Σ cᵢwᵢ + Σ yᵢvᵢ`.
fn glue_frames(tag: HypTag, n: u64, names: &[&'static str], p: &QVec, q: &QVec) -> (Vec<QVec>, Vec<QVec>) {
    let half = rat(1, 2);
    let gen = |s: &str| named(names, &[(s, rat_int(1))]);
    match moduli_case(tag, n) {
        CaseTag::R1911 => (vec![gen("g1"), q.clone()], vec![gen("g2"), p.clone()]),
        CaseTag::R1910 => (
            vec![gen("g1"), scale(&add(&gen("g1"), q), &half)],
            vec![gen("g2"), scale(&add(&gen("g2"), p), &half)],
        ),
        _ => (vec![gen("g"), q.clone()], vec![vec![BigRational::zero(); names.len()], p.clone()]),
    }
}

#[allow(clippy::too_many_arguments)]
fn compute_twist(
    tag: HypTag,
    n: u64,
    case: CaseTag,
    names: &[&'static str],
    g: &IntMatrix,
    member: &Membership,
    p: &QVec,
    q: &QVec,
) -> Result<FormIsometry> {
    let data = component_data(case, n)?;
    let (w, v) = glue_frames(tag, n, names, p, q);
    let reference = crate::moduli::reference_form(case, n)?;
    if gram_of(g, &w)? != reference.gram() {
        return Err(Error::InvariantMismatch("L_{φ,P} frame does not match the reference lattice".into()));
    }
    let group = data.form.group().clone();
    let elements = group.elements(DEFAULT_GROUP_BOUND)?;
    let combine = |frame: &[QVec], coeffs: &[BigRational]| -> QVec {
        let mut out = vec![BigRational::zero(); names.len()];
        for (c, f) in coeffs.iter().zip(frame) {
            out = add(&out, &scale(f, c));
        }
        out
    };
    let mut images = Vec::with_capacity(group.rank());
    for lift in &data.lifts {
        let x = combine(&w, lift);
        let mut found = Vec::new();
        for y in &elements {
            let z = add(&x, &combine(&v, &data.lift(y)));
            if member.contains(&z)? {
                found.push(y.clone());
            }
        }
        if found.len() != 1 {
            return Err(Error::GlueRejected(format!(
                "{tag} at n={n}: {} partners for a generator",
                found.len()
            )));
        }
        images.push(found.remove(0));
    }
    let twist = FormIsometry::from_images(images, &group);
    if !twist.is_isometry(&data.form, &data.form) {
        return Err(Error::GlueRejected(format!("{tag} at n={n}: glue map is not an isometry")));
    }
    Ok(twist)
}

fn paper_checks(
    tag: HypTag,
    n: u64,
    names: &[&'static str],
    member: &Membership,
    p: &QVec,
    q: &QVec,
) -> Result<Vec<PaperCheck>> {
    let ni = n as i64;
    let gen = |s: &str| named(names, &[(s, rat_int(1))]);
    let mut out = Vec::new();
    let mut check = |statement: &str, x: QVec| -> Result<()> {
        out.push(PaperCheck {
            statement: statement.to_string(),
            holds: member.contains(&x)?,
        });
        Ok(())
    };
    let sum_over = |k: i64| scale(&add(p, q), &rat(1, k));
    let diff_over = |k: i64| scale(&add(p, &scale(q, &rat_int(-1))), &rat(1, k));
    match tag {
        HypTag::F4_1 => {
            check("P/n + Q/n = C", sum_over(ni))?;
            check("(g1 + g2)/2", scale(&add(&gen("g1"), &gen("g2")), &rat(1, 2)))?;
        }
        HypTag::F4_2 => {
            check("P/(n/2) + Q/(n/2) = C", sum_over(ni / 2))?;
            check("P/4 - Q/4 = C + E", diff_over(4))?;
        }
        HypTag::F1_19_1 => {
            check("P/(n/2) + Q/(n/2) = h - e", sum_over(ni / 2))?;
            if n % 8 == 6 {
                // −(n/2)(g2/2) + ((n−2)/4)(Q/2)
                let x = add(
                    &scale(&gen("g2"), &rat(-ni, 4)),
                    &scale(q, &BigRational::new(BigInt::from(ni - 2), BigInt::from(8))),
                );
                check("-(n/2)(g2/2) + ((n-2)/4)(Q/2)", x)?;
            }
        }
        HypTag::H1 | HypTag::F2 => check("Q/(n/2) + P/(n/2) = e1", sum_over(ni / 2))?,
        HypTag::F1_19_3 => check("Q/(n/2) + P/(n/2) = h - e", sum_over(ni / 2))?,
        HypTag::F0_2 => check("P/(n/2) - Q/(n/2) = e2", diff_over(ni / 2))?,
    }
    Ok(out)
}

/// Component descriptor of the involution built for a case.
pub fn component_label(tag: HypTag, n: u64) -> Result<ComponentDescriptor> {
    let inv = build_involution(tag, n)?;
    classify_twist(inv.moduli_case, n, &inv.twist, DEFAULT_GROUP_BOUND)
}

fn checked(inv: &GenusInvariants) -> Result<()> {
    let report = validate_full(inv);
    if report.valid {
        Ok(())
    } else {
        Err(Error::InvalidInvariants(report))
    }
}

/// Genus-level deformability: `n ≤ 4` whenever `(r,a) = (20,2)` or
/// `r + a = 22` with `δφP = 0`.
pub fn genus_deformable(inv: &GenusInvariants) -> Result<bool> {
    checked(inv)?;
    let boundary = (inv.r, inv.a) == (20, 2) || (inv.r + inv.a == 22 && inv.delta_phi_p == 0);
    Ok(!(boundary && inv.n > 4))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    I,
    II,
    III,
    IV,
    None,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub deformable: bool,
    pub clause: Clause,
    pub witness_case: Option<HypTag>,
}

/// Whether the component with these invariants and flags is a deformation of
/// a real hyper-elliptically polarized K3 surface.
pub fn is_deformation_of_hyperelliptic(inv: &GenusInvariants, flags: Option<ComponentFlags>) -> Result<Verdict> {
    checked(inv)?;
    let verdict = |ok: bool, clause: Clause, witness: Option<HypTag>| Verdict {
        deformable: ok,
        clause: if ok { clause } else { Clause::None },
        witness_case: if ok { witness } else { None },
    };
    let n = inv.n;
    if n == 2 || n == 4 {
        return Ok(verdict(true, Clause::I, None));
    }
    match (inv.r, inv.a, inv.delta_phi) {
        (19, 1, 1) => {
            let f = flags.ok_or(Error::MissingFlags(19, 1))?;
            let ok = if n % 8 == 0 || n % 8 == 2 { f.standard } else { f.over2 };
            let witness = if f.standard {
                if inv.delta_p == 1 {
                    HypTag::F4_1
                } else {
                    HypTag::F1_19_1
                }
            } else if n % 8 == 4 {
                HypTag::F4_2
            } else {
                HypTag::F1_19_1
            };
            Ok(verdict(ok, Clause::III, Some(witness)))
        }
        (19, 3, 1) => {
            let f = flags.ok_or(Error::MissingFlags(19, 3))?;
            let ok = inv.delta_phi_p == 1 && f.standard;
            let witness = if n % 4 == 0 { HypTag::H1 } else { HypTag::F1_19_3 };
            Ok(verdict(ok, Clause::IV, Some(witness)))
        }
        (20, 2, _) => Ok(verdict(false, Clause::None, None)),
        _ => {
            let ok = !(inv.r + inv.a == 22 && inv.delta_phi_p == 0);
            Ok(verdict(ok, Clause::II, None))
        }
    }
}
