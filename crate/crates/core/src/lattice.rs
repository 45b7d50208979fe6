//! Integral lattices given by Gram matrices: discriminant forms, rescaling,
//! standard building blocks, overlattices and 2-elementary invariants.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_form::{FiniteAbelianGroup, FiniteForm, FormKind};
use crate::linalg::{
    common_denominator, hermite_normal_form, signature, smith_normal_form, IntMatrix, QVec,
};

/// A nondegenerate integral lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralLattice {
    gram: IntMatrix,
    det: BigInt,
    signature: (usize, usize),
}

impl IntegralLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("Gram matrix is not square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let det = gram.det()?;
        if det.is_zero() {
            return Err(Error::DegenerateMatrix);
        }
        let signature = signature(&gram)?;
        Ok(Self { gram, det, signature })
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    /// Inner product of rational coordinate vectors.
    pub fn dot(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        self.gram.bilinear(x, y)
    }

    /// Gram matrix scaled by `m`, required to stay integral.
    pub fn rescale(&self, m: &BigRational) -> Result<IntegralLattice> {
        if m.is_zero() {
            return Err(Error::DegenerateMatrix);
        }
        let rows: Vec<Vec<BigInt>> = self
            .gram
            .to_rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let v = BigRational::from_integer(x.clone()) * m;
                        if v.is_integer() {
                            Ok(v.to_integer())
                        } else {
                            Err(Error::NotIntegral)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IntegralLattice::new(IntMatrix::from_rows(&rows)?)
    }

    pub fn orthogonal_sum(&self, other: &IntegralLattice) -> IntegralLattice {
        let gram = IntMatrix::block_diag(&[&self.gram, &other.gram]);
        IntegralLattice::new(gram).expect("sum of nondegenerate lattices")
    }

    /// True iff `x` lies in the dual lattice.
    pub fn in_dual(&self, x: &[BigRational]) -> bool {
        self.gram.left_apply(x).iter().all(|v| v.is_integer())
    }

    /// Discriminant group `L*/L` with values of the given kind: `x²` mod 2ℤ for
    /// the quadratic form (even lattices only) or `x·y` mod ℤ for the bilinear one.
    pub fn discriminant(&self, kind: FormKind) -> Result<DiscriminantData> {
        if kind == FormKind::Quadratic && !self.is_even() {
            return Err(Error::OddLattice("quadratic discriminant form of an odd lattice".into()));
        }
        let snf = smith_normal_form(&self.gram);
        let diag = snf.diagonal();
        let keep: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
        let orders: Vec<u64> = keep
            .iter()
            .map(|&i| diag[i].to_u64().ok_or_else(|| Error::Overflow(diag[i].to_string())))
            .collect::<Result<_>>()?;
        let lifts: Vec<QVec> = keep
            .iter()
            .map(|&i| {
                snf.u
                    .row(i)
                    .iter()
                    .map(|x| BigRational::new(x.clone(), diag[i].clone()))
                    .collect()
            })
            .collect();
        let gram: Vec<Vec<BigRational>> = lifts
            .iter()
            .map(|x| lifts.iter().map(|y| self.dot(x, y)).collect())
            .collect();
        let group = FiniteAbelianGroup::new(orders)?;
        let form = FiniteForm::new(kind, group, gram)?;
        Ok(DiscriminantData {
            form,
            lifts,
            gram: self.gram.clone(),
            v: snf.v,
            keep,
        })
    }
}

/// An even lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenLattice(IntegralLattice);

impl EvenLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        Self::from_integral(IntegralLattice::new(gram)?)
    }

    pub fn from_integral(l: IntegralLattice) -> Result<Self> {
        if let Some(i) = (0..l.rank()).find(|&i| l.gram.get(i, i).is_odd()) {
            return Err(Error::OddLattice(l.gram.get(i, i).to_string()));
        }
        Ok(Self(l))
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn as_integral(&self) -> &IntegralLattice {
        &self.0
    }

    pub fn gram(&self) -> &IntMatrix {
        self.0.gram()
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn det(&self) -> &BigInt {
        self.0.det()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.0.signature()
    }

    pub fn orthogonal_sum(&self, other: &EvenLattice) -> EvenLattice {
        EvenLattice(self.0.orthogonal_sum(&other.0))
    }

    /// `L(m)`: the form multiplied by `m`; the result must be even.
    pub fn rescale(&self, m: &BigRational) -> Result<EvenLattice> {
        let l = self.0.rescale(m)?;
        if !l.is_even() {
            return Err(Error::OddResult);
        }
        Ok(EvenLattice(l))
    }

    pub fn discriminant_form(&self) -> DiscriminantData {
        self.0
            .discriminant(FormKind::Quadratic)
            .expect("even nondegenerate lattice")
    }
}

/// Discriminant form with rational lifts of its generators.
#[derive(Clone, Debug)]
pub struct DiscriminantData {
    pub form: FiniteForm,
    /// Coordinates (in the lattice basis) of a dual vector lifting each generator.
    pub lifts: Vec<QVec>,
    gram: IntMatrix,
    v: IntMatrix,
    keep: Vec<usize>,
}

impl DiscriminantData {
    /// Group coordinates of a dual vector.
    pub fn coordinates(&self, x: &[BigRational]) -> Result<Vec<u64>> {
        let xg = self.gram.left_apply(x);
        if xg.iter().any(|v| !v.is_integer()) {
            return Err(Error::InvalidForm("vector is not in the dual lattice".into()));
        }
        let y = self.v.left_apply(&xg);
        let picked: Vec<BigInt> = self.keep.iter().map(|&i| y[i].to_integer()).collect();
        Ok(self.form.group().reduce_big(&picked))
    }

    /// Rational vector lifting the element with group coordinates `c`.
    pub fn lift(&self, c: &[u64]) -> QVec {
        let dim = self.gram.rows();
        let mut out = vec![BigRational::zero(); dim];
        for (ci, l) in c.iter().zip(&self.lifts) {
            for (o, x) in out.iter_mut().zip(l) {
                *o += x * BigInt::from(*ci);
            }
        }
        out
    }
}

/// Named standard lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum StandardLattice {
    U,
    E8,
    /// `⟨n₁⟩ ⊕ ⟨n₂⟩ ⊕ …`
    Diag { entries: Vec<i64> },
    /// `[[a, b], [b, c]]`
    Gram2x2 { a: i64, b: i64, c: i64 },
}

/// Gram matrix of E8 (negative definite): −2 on the diagonal and +1 on the
/// edges of the Dynkin diagram, a chain 0–…–6 with node 7 attached to node 4.
pub fn e8_gram() -> IntMatrix {
    let mut m = IntMatrix::diagonal(&[-2i64; 8]);
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    for (i, j) in edges {
        m.set(i, j, BigInt::one());
        m.set(j, i, BigInt::one());
    }
    m
}

pub fn u_gram() -> IntMatrix {
    IntMatrix::from_i64(&[&[0, 1], &[1, 0]])
}

pub fn standard_lattice(which: &StandardLattice) -> Result<EvenLattice> {
    match which {
        StandardLattice::U => EvenLattice::new(u_gram()),
        StandardLattice::E8 => EvenLattice::new(e8_gram()),
        StandardLattice::Diag { entries } => EvenLattice::new(IntMatrix::diagonal(entries)),
        StandardLattice::Gram2x2 { a, b, c } => EvenLattice::from_i64(&[&[*a, *b], &[*b, *c]]),
    }
}

/// Result of adjoining glue vectors to a lattice.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: EvenLattice,
    /// Basis rows in the coordinates of the original lattice.
    pub basis: Vec<QVec>,
    /// Index of the original lattice in the overlattice.
    pub index: BigInt,
}

/// Even overlattice generated by `base` and `glue` (rational coordinates in
/// the basis of `base`). Every glue vector must lie in the dual, pair
/// integrally with the other glue vectors and have even square.
pub fn overlattice(base: &EvenLattice, glue: &[QVec]) -> Result<Overlattice> {
    let dim = base.rank();
    let l = base.as_integral();
    for (i, g) in glue.iter().enumerate() {
        if g.len() != dim {
            return Err(Error::DimensionMismatch(format!("glue vector of length {}", g.len())));
        }
        if !l.in_dual(g) {
            return Err(Error::NotIsotropic(format!("glue vector {i} is not in the dual lattice")));
        }
        let sq = l.dot(g, g);
        if !sq.is_integer() || sq.to_integer().is_odd() {
            return Err(Error::NotIsotropic(format!("glue vector {i} has square {sq}")));
        }
        for (j, h) in glue.iter().enumerate().take(i) {
            if !l.dot(g, h).is_integer() {
                return Err(Error::NotIsotropic(format!("glue vectors {j} and {i} pair non-integrally")));
            }
        }
    }
    let mut generators: Vec<QVec> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    generators.extend(glue.iter().cloned());
    let denom = common_denominator(generators.iter().flatten());
    let scaled: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| g.iter().map(|x| (x * &denom).to_integer()).collect())
        .collect();
    let hnf = hermite_normal_form(&IntMatrix::from_rows(&scaled)?);
    let basis: Vec<QVec> = hnf
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|x| BigRational::new(x.clone(), denom.clone())).collect())
        .collect();
    let rows: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|x| {
            basis
                .iter()
                .map(|y| {
                    let v = l.dot(x, y);
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    let lattice = EvenLattice::new(IntMatrix::from_rows(&rows)?)?;
    let ratio = BigRational::new(base.det().clone(), lattice.det().clone());
    if !ratio.is_integer() {
        return Err(Error::NotIntegral);
    }
    let index = ratio.to_integer().abs().sqrt();
    Ok(Overlattice { lattice, basis, index })
}

/// Two lattices and glue vectors `(x₊, x₋)` with `x₊ ∈ L₁*` and `x₋ ∈ L₂*`.
#[derive(Clone, Debug)]
pub struct GlueGroup {
    pub left: EvenLattice,
    pub right: EvenLattice,
    pub glue: Vec<(QVec, QVec)>,
}

/// Overlattice of `L₁ ⊕ L₂` generated by the glue. The glue must be isotropic
/// and its image in `A₁ ⊕ A₂` must be the graph of an isomorphism between
/// subgroups of the two discriminant groups.
pub fn overlattice_from_glue(glue: &GlueGroup) -> Result<EvenLattice> {
    Ok(overlattice_from_glue_with_basis(glue)?.lattice)
}

pub fn overlattice_from_glue_with_basis(glue: &GlueGroup) -> Result<Overlattice> {
    let (l1, l2) = (glue.left.as_integral(), glue.right.as_integral());
    let d1 = l1.discriminant(FormKind::Quadratic)?;
    let d2 = l2.discriminant(FormKind::Quadratic)?;
    let mut pairs = Vec::with_capacity(glue.glue.len());
    for (i, (xp, xm)) in glue.glue.iter().enumerate() {
        if xp.len() != l1.rank() || xm.len() != l2.rank() {
            return Err(Error::DimensionMismatch(format!("glue vector {i}")));
        }
        if !l1.in_dual(xp) || !l2.in_dual(xm) {
            return Err(Error::NotIsotropic(format!("glue vector {i} is not in the dual lattice")));
        }
        let sq = l1.dot(xp, xp) + l2.dot(xm, xm);
        if !sq.is_integer() || sq.to_integer().is_odd() {
            return Err(Error::NotIsotropic(format!("glue vector {i} has square {sq}")));
        }
        pairs.push((d1.coordinates(xp)?, d2.coordinates(xm)?));
    }
    // subgroup generated by the glue pairs
    let (g1, g2) = (d1.form.group(), d2.form.group());
    let zero = (g1.zero(), g2.zero());
    let mut seen: HashSet<(Vec<u64>, Vec<u64>)> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some((a, b)) = queue.pop_front() {
        for (p, q) in &pairs {
            let next = (g1.add(&a, p), g2.add(&b, q));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let left: HashSet<&Vec<u64>> = seen.iter().map(|(a, _)| a).collect();
    let right: HashSet<&Vec<u64>> = seen.iter().map(|(_, b)| b).collect();
    if left.len() != seen.len() || right.len() != seen.len() {
        return Err(Error::NotAGraph);
    }
    let ambient = glue.left.orthogonal_sum(&glue.right);
    let vectors: Vec<QVec> = glue
        .glue
        .iter()
        .map(|(xp, xm)| xp.iter().chain(xm).cloned().collect())
        .collect();
    let result = overlattice(&ambient, &vectors)?;
    debug_assert_eq!(result.index, BigInt::from(seen.len()));
    Ok(result)
}

/// `(r, a, δ)` of a 2-elementary lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoElementaryInvariants {
    pub r: usize,
    pub a: usize,
    pub delta: u8,
}

pub fn two_elementary_invariants(l: &EvenLattice) -> Result<TwoElementaryInvariants> {
    let data = l.discriminant_form();
    let group = data.form.group();
    if group.orders().iter().any(|&d| d != 2) {
        return Err(Error::NotTwoElementary);
    }
    let delta = if (0..group.rank()).all(|i| data.form.value(&group.basis_vector(i)).is_integer()) {
        0
    } else {
        1
    };
    Ok(TwoElementaryInvariants {
        r: l.rank(),
        a: group.rank(),
        delta,
    })
}
