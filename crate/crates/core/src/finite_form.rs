//! Finite quadratic and bilinear forms on finite abelian groups.
//!
//! A quadratic form takes values in ℚ/2ℤ and a bilinear form in ℚ/ℤ. Both
//! are stored on an invariant-factor presentation `ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with
//! `d₁ | d₂ | …`, as a symmetric matrix of values on the generators. For a
//! quadratic form the diagonal holds `q(gᵢ) ∈ [0,2)`; every other entry is
//! `b(gᵢ,gⱼ) ∈ [0,1)`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{common_denominator, smith_normal_form, IntMatrix};

/// Default upper bound on group orders for exhaustive enumeration.
pub const DEFAULT_GROUP_BOUND: usize = 20000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Quadratic,
    Bilinear,
}

impl FormKind {
    /// The modulus of the value group: 2 for quadratic, 1 for bilinear.
    fn diagonal_modulus(self) -> i64 {
        match self {
            FormKind::Quadratic => 2,
            FormKind::Bilinear => 1,
        }
    }
}

/// `x mod m` in `[0, m)` for a positive integer modulus.
pub fn rat_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let q = (x / &m).floor();
    x - q * m
}

/// A finite abelian group in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::InvalidForm("cyclic factors must have order at least 2".into()));
        }
        if orders.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidForm(format!("{orders:?} is not a divisibility chain")));
        }
        Ok(Self { orders })
    }

    pub fn trivial() -> Self {
        Self { orders: Vec::new() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut x = self.zero();
        x[i] = 1;
        x
    }

    pub fn reduce_signed(&self, x: &[i128]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&xi, &d)| xi.rem_euclid(d as i128) as u64)
            .collect()
    }

    pub fn reduce_big(&self, x: &[BigInt]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(xi, &d)| xi.mod_floor(&BigInt::from(d)).to_u64().expect("reduced residue"))
            .collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((&a, &b), &d)| ((a as u128 + b as u128) % d as u128) as u64)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| (d - a) % d)
            .collect()
    }

    pub fn scale(&self, x: &[u64], k: u64) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| ((a as u128 * k as u128) % d as u128) as u64)
            .collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&a, &d)| acc.lcm(&(d / a.gcd(&d))))
    }

    /// Position of `x` in lexicographic order (first coordinate most significant).
    pub fn index_of(&self, x: &[u64]) -> usize {
        x.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&a, &d)| acc * d as usize + a as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> Vec<u64> {
        let mut x = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.orders[i] as usize;
            x[i] = (idx % d) as u64;
            idx /= d;
        }
        x
    }

    /// All elements in lexicographic order; fails beyond `bound`.
    pub fn elements(&self, bound: usize) -> Result<Vec<Vec<u64>>> {
        let order = self.order();
        if order > bound as u128 {
            return Err(Error::GroupTooLarge { order, bound });
        }
        Ok((0..order as usize).map(|i| self.element_at(i)).collect())
    }
}

/// A finite quadratic or bilinear form. JSON: `{"kind", "orders", "gram"}`
/// with values written as decimal fractions `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "FormJson", try_from = "FormJson")]
pub struct FiniteForm {
    kind: FormKind,
    group: FiniteAbelianGroup,
    gram: Vec<Vec<BigRational>>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    kind: FormKind,
    orders: Vec<u64>,
    gram: Vec<Vec<String>>,
}

impl From<FiniteForm> for FormJson {
    fn from(f: FiniteForm) -> Self {
        FormJson {
            kind: f.kind,
            orders: f.group.orders.clone(),
            gram: f.gram.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }
}

impl TryFrom<FormJson> for FiniteForm {
    type Error = Error;

    fn try_from(j: FormJson) -> Result<Self> {
        let gram = j
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.parse::<BigRational>().map_err(|_| Error::InvalidForm(format!("value {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteForm::from_generators(j.kind, &j.orders, gram)
    }
}

impl FiniteForm {
    /// Builds a form on an invariant-factor presentation, reducing the values
    /// and checking the compatibility conditions with the cyclic orders.
    pub fn new(kind: FormKind, group: FiniteAbelianGroup, gram: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = group.rank();
        if gram.len() != k || gram.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("value matrix does not match the group".into()));
        }
        for i in 0..k {
            for j in 0..i {
                if rat_mod(&(&gram[i][j] - &gram[j][i]), 1) != BigRational::zero() {
                    return Err(Error::InvalidForm("values are not symmetric".into()));
                }
            }
        }
        let mut reduced = gram.clone();
        for (i, row) in reduced.iter_mut().enumerate() {
            for (j, value) in row.iter_mut().enumerate() {
                let m = if i == j { kind.diagonal_modulus() } else { 1 };
                *value = rat_mod(value, m);
            }
        }
        let form = Self { kind, group, gram: reduced };
        for i in 0..k {
            let d = BigRational::from_integer(BigInt::from(form.group.orders[i]));
            for j in 0..k {
                if !(&d * form.b_gen(i, j)).is_integer() {
                    return Err(Error::InvalidForm(format!(
                        "order {} generator pairs to a non-multiple of 1/{}",
                        form.group.orders[i], form.group.orders[i]
                    )));
                }
            }
            if kind == FormKind::Quadratic {
                let q = &d * &d * &form.gram[i][i];
                if !q.is_integer() || q.to_integer().is_odd() {
                    return Err(Error::InvalidForm(format!(
                        "q(d·g) is not 0 mod 2 for the generator of order {}",
                        form.group.orders[i]
                    )));
                }
            }
        }
        Ok(form)
    }

    /// Builds a form from generators of arbitrary cyclic orders `cᵢ ≥ 1`
    /// (the group `⊕ ℤ/cᵢ`) and normalizes it to invariant-factor form.
    pub fn from_generators(kind: FormKind, orders: &[u64], gram: Vec<Vec<BigRational>>) -> Result<Self> {
        Ok(Self::normalize(kind, orders, gram)?.0)
    }

    /// Normalization that also returns the coordinate change: an element with
    /// coordinates `x` in the old generators has new coordinates `x · v`.
    pub(crate) fn normalize(
        kind: FormKind,
        orders: &[u64],
        gram: Vec<Vec<BigRational>>,
    ) -> Result<(Self, IntMatrix)> {
        let k = orders.len();
        if gram.len() != k || gram.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("value matrix does not match the orders".into()));
        }
        if orders.iter().any(|&c| c == 0) {
            return Err(Error::InvalidForm("cyclic order 0".into()));
        }
        let relations = IntMatrix::diagonal(orders);
        let snf = smith_normal_form(&relations);
        let vinv = snf.v.inverse_unimodular()?;
        let diag = snf.diagonal();
        let keep: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
        let new_orders: Vec<u64> = keep.iter().map(|&i| diag[i].to_u64().expect("order fits u64")).collect();
        let gens: Vec<Vec<BigInt>> = keep.iter().map(|&i| vinv.row(i).to_vec()).collect();
        let mut new_gram = vec![vec![BigRational::zero(); keep.len()]; keep.len()];
        for a in 0..keep.len() {
            for b in 0..keep.len() {
                new_gram[a][b] = if a == b && kind == FormKind::Quadratic {
                    quadratic_value(&gram, &gens[a])
                } else {
                    bilinear_value(&gram, &gens[a], &gens[b])
                };
            }
        }
        let form = Self::new(kind, FiniteAbelianGroup::new(new_orders)?, new_gram)?;
        let cols: Vec<Vec<BigInt>> = (0..k)
            .map(|r| keep.iter().map(|&c| snf.v.get(r, c).clone()).collect())
            .collect();
        let change = if keep.is_empty() {
            IntMatrix::zeros(k, 0)
        } else {
            IntMatrix::from_rows(&cols)?
        };
        Ok((form, change))
    }

    pub fn trivial(kind: FormKind) -> Self {
        Self {
            kind,
            group: FiniteAbelianGroup::trivial(),
            gram: Vec::new(),
        }
    }

    /// Cyclic form on ℤ/d with generator value `value`.
    pub fn cyclic(kind: FormKind, d: u64, value: BigRational) -> Result<Self> {
        Self::from_generators(kind, &[d], vec![vec![value]])
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    fn b_gen(&self, i: usize, j: usize) -> BigRational {
        if i == j {
            rat_mod(&self.gram[i][i], 1)
        } else {
            self.gram[i][j].clone()
        }
    }

    /// Bilinear value `b(x,y)` in `[0,1)`.
    pub fn b(&self, x: &[u64], y: &[u64]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    acc += self.b_gen(i, j) * BigInt::from(xi) * BigInt::from(yj);
                }
            }
        }
        rat_mod(&acc, 1)
    }

    /// The value on the diagonal: `q(x)` in `[0,2)` for quadratic forms,
    /// `b(x,x)` in `[0,1)` for bilinear ones.
    pub fn value(&self, x: &[u64]) -> BigRational {
        match self.kind {
            FormKind::Bilinear => self.b(x, x),
            FormKind::Quadratic => {
                let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                rat_mod(&quadratic_value(&self.gram, &xs), 2)
            }
        }
    }

    /// Pointwise negation of all values.
    pub fn negate(&self) -> Self {
        let gram = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let m = if i == j { self.kind.diagonal_modulus() } else { 1 };
                        rat_mod(&-v, m)
                    })
                    .collect()
            })
            .collect();
        Self {
            kind: self.kind,
            group: self.group.clone(),
            gram,
        }
    }

    /// Orthogonal direct sum, renormalized to invariant factors.
    pub fn direct_sum(&self, other: &FiniteForm) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch);
        }
        let (k1, k2) = (self.group.rank(), other.group.rank());
        let mut gram = vec![vec![BigRational::zero(); k1 + k2]; k1 + k2];
        for i in 0..k1 {
            for j in 0..k1 {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                gram[k1 + i][k1 + j] = other.gram[i][j].clone();
            }
        }
        let orders: Vec<u64> = self.group.orders.iter().chain(&other.group.orders).copied().collect();
        Self::from_generators(self.kind, &orders, gram)
    }

    /// Restriction to the `p`-Sylow subgroup.
    pub fn p_component(&self, p: u64) -> Self {
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        for (i, &d) in self.group.orders.iter().enumerate() {
            let (pe, m) = split_prime(d, p);
            if pe > 1 {
                orders.push(pe);
                gens.push((i, m));
            }
        }
        let gram = gens
            .iter()
            .map(|&(i, mi)| {
                gens.iter()
                    .map(|&(j, mj)| {
                        let v = if i == j && self.kind == FormKind::Quadratic {
                            &self.gram[i][i] * BigInt::from(mi) * BigInt::from(mi)
                        } else {
                            self.b_gen(i, j) * BigInt::from(mi) * BigInt::from(mj)
                        };
                        v
                    })
                    .collect()
            })
            .collect();
        Self::new(self.kind, FiniteAbelianGroup { orders }, gram).expect("Sylow restriction is a valid form")
    }

    /// Generators of the odd-order part of the group, in this form's coordinates.
    pub fn odd_part_generators(&self) -> Vec<Vec<u64>> {
        self.group
            .orders
            .iter()
            .enumerate()
            .filter_map(|(i, &d)| {
                let (two, odd) = split_prime(d, 2);
                (odd > 1).then(|| self.group.scale(&self.group.basis_vector(i), two))
            })
            .collect()
    }

    /// Primes dividing the group order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let top = self.group.orders.last().copied().unwrap_or(1);
        prime_factors(top)
    }

    fn tables(&self, denom: u128) -> ValueTables {
        let k = self.group.rank();
        let scale = |v: &BigRational, m: u128| -> u128 {
            let x = (v * BigInt::from(denom)).to_integer();
            x.mod_floor(&BigInt::from(m)).to_u128().expect("fits")
        };
        let qmod = denom * self.kind.diagonal_modulus() as u128;
        let diag = (0..k).map(|i| scale(&self.gram[i][i], qmod)).collect();
        let b = (0..k)
            .map(|i| (0..k).map(|j| scale(&self.b_gen(i, j), denom)).collect())
            .collect();
        ValueTables {
            kind: self.kind,
            denom,
            diag,
            b,
        }
    }

    fn denominator(&self) -> u128 {
        common_denominator(self.gram.iter().flatten())
            .to_u128()
            .expect("denominator fits u128")
    }

    /// All isometries `self → other`, sorted lexicographically by generator images.
    pub fn all_isometries(&self, other: &FiniteForm, bound: usize) -> Result<Vec<FormIsometry>> {
        let mut out = Vec::new();
        self.search_isometries(other, bound, false, &mut out)?;
        out.sort();
        Ok(out)
    }

    /// Some isometry `self → other`, or `None`. When both forms are equal the
    /// identity is returned.
    pub fn find_isometry(&self, other: &FiniteForm, bound: usize) -> Result<Option<FormIsometry>> {
        check_bound(self, bound)?;
        check_bound(other, bound)?;
        if self == other {
            return Ok(Some(FormIsometry::identity(&self.group)));
        }
        let mut out = Vec::new();
        self.search_isometries(other, bound, true, &mut out)?;
        Ok(out.into_iter().next())
    }

    /// The orthogonal group, identity first and the rest in lexicographic order.
    pub fn orthogonal_group(&self, bound: usize) -> Result<Vec<FormIsometry>> {
        let mut all = self.all_isometries(self, bound)?;
        let id = FormIsometry::identity(&self.group);
        let pos = all.iter().position(|g| *g == id).expect("identity is an isometry");
        let id = all.remove(pos);
        all.insert(0, id);
        Ok(all)
    }

    fn search_isometries(
        &self,
        other: &FiniteForm,
        bound: usize,
        first_only: bool,
        out: &mut Vec<FormIsometry>,
    ) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch);
        }
        check_bound(self, bound)?;
        check_bound(other, bound)?;
        if self.group.orders != other.group.orders {
            return Ok(());
        }
        let k = self.group.rank();
        if k == 0 {
            out.push(FormIsometry::identity(&other.group));
            return Ok(());
        }
        let denom = self.denominator().lcm(&other.denominator());
        let src = self.tables(denom);
        let dst = other.tables(denom);
        let elements = other.group.elements(bound)?;
        let generator_values: Vec<u128> = (0..k).map(|i| src.diag[i]).collect();
        let candidates: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                let d = self.group.orders[i];
                (0..elements.len())
                    .filter(|&e| {
                        other.group.element_order(&elements[e]) == d
                            && dst.diagonal_value(&elements[e]) == generator_values[i]
                    })
                    .collect()
            })
            .collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        let mut stack: Vec<usize> = vec![0];
        // iterative backtracking over candidate positions
        while let Some(pos) = stack.last_mut() {
            let level = chosen.len();
            if *pos >= candidates[level].len() {
                stack.pop();
                chosen.pop();
                continue;
            }
            let cand = candidates[level][*pos];
            *pos += 1;
            let y = &elements[cand];
            let compatible = (0..level).all(|j| dst.b_value(y, &elements[chosen[j]]) == src.b[level][j]);
            if !compatible {
                continue;
            }
            chosen.push(cand);
            if chosen.len() == k {
                let images: Vec<Vec<u64>> = chosen.iter().map(|&c| elements[c].clone()).collect();
                let iso = FormIsometry {
                    images,
                    target: other.group.orders.clone(),
                };
                if k == 1 || iso.is_bijective(&self.group) {
                    out.push(iso);
                    if first_only {
                        return Ok(());
                    }
                }
                chosen.pop();
            } else {
                stack.push(0);
            }
        }
        Ok(())
    }
}

fn check_bound(f: &FiniteForm, bound: usize) -> Result<()> {
    let order = f.order();
    if order > bound as u128 {
        return Err(Error::GroupTooLarge { order, bound });
    }
    Ok(())
}

/// Integer-numerator value tables over a common denominator.
struct ValueTables {
    kind: FormKind,
    denom: u128,
    diag: Vec<u128>,
    b: Vec<Vec<u128>>,
}

impl ValueTables {
    fn diagonal_value(&self, x: &[u64]) -> u128 {
        match self.kind {
            FormKind::Bilinear => self.b_value(x, x),
            FormKind::Quadratic => {
                let m = 2 * self.denom;
                let mut acc = 0u128;
                for i in 0..x.len() {
                    let xi = x[i] as u128;
                    if xi == 0 {
                        continue;
                    }
                    acc = (acc + (xi * xi % m) * self.diag[i]) % m;
                    for j in i + 1..x.len() {
                        let xj = x[j] as u128;
                        acc = (acc + 2 * ((xi * xj % m) * self.b[i][j] % m)) % m;
                    }
                }
                acc
            }
        }
    }

    fn b_value(&self, x: &[u64], y: &[u64]) -> u128 {
        let m = self.denom;
        let mut acc = 0u128;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                acc = (acc + (x[i] as u128 * y[j] as u128 % m) * self.b[i][j]) % m;
            }
        }
        acc
    }
}

/// `q(x) = Σ xᵢ² qᵢ + 2 Σ_{i<j} xᵢ xⱼ bᵢⱼ` for a quadratic value matrix.
fn quadratic_value(gram: &[Vec<BigRational>], x: &[BigInt]) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..x.len() {
        if x[i].is_zero() {
            continue;
        }
        acc += &gram[i][i] * (&x[i] * &x[i]);
        for j in i + 1..x.len() {
            acc += &gram[i][j] * (&x[i] * &x[j]) * BigInt::from(2);
        }
    }
    acc
}

fn bilinear_value(gram: &[Vec<BigRational>], x: &[BigInt], y: &[BigInt]) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            if !x[i].is_zero() && !y[j].is_zero() {
                acc += &gram[i][j] * (&x[i] * &y[j]);
            }
        }
    }
    acc
}

/// Splits `d = p^e · m` with `p ∤ m`, returning `(p^e, m)`.
pub fn split_prime(mut d: u64, p: u64) -> (u64, u64) {
    let mut pe = 1;
    while d % p == 0 {
        d /= p;
        pe *= p;
    }
    (pe, d)
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A homomorphism of finite abelian groups given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormIsometry {
    images: Vec<Vec<u64>>,
    target: Vec<u64>,
}

impl FormIsometry {
    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        Self {
            images: (0..group.rank()).map(|i| group.basis_vector(i)).collect(),
            target: group.orders.clone(),
        }
    }

    /// Wraps raw generator images; validity as an isometry is checked by
    /// [`FormIsometry::is_isometry`].
    pub fn from_images(images: Vec<Vec<u64>>, target: &FiniteAbelianGroup) -> Self {
        Self {
            images,
            target: target.orders.clone(),
        }
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.target.len()];
        for (xi, img) in x.iter().zip(&self.images) {
            if *xi == 0 {
                continue;
            }
            for (o, (&v, &d)) in out.iter_mut().zip(img.iter().zip(&self.target)) {
                *o = ((*o as u128 + *xi as u128 * v as u128) % d as u128) as u64;
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FormIsometry) -> FormIsometry {
        FormIsometry {
            images: other.images.iter().map(|y| self.apply(y)).collect(),
            target: self.target.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, y)| y.iter().enumerate().all(|(j, &v)| v == u64::from(i == j)))
    }

    fn is_bijective(&self, source: &FiniteAbelianGroup) -> bool {
        let tgt = FiniteAbelianGroup {
            orders: self.target.clone(),
        };
        if source.order() != tgt.order() {
            return false;
        }
        let n = source.order() as usize;
        let mut seen = vec![false; n];
        for idx in 0..n {
            let y = self.apply(&source.element_at(idx));
            let j = tgt.index_of(&y);
            if seen[j] {
                return false;
            }
            seen[j] = true;
        }
        true
    }

    /// Inverse of a bijective map from `source`.
    pub fn inverse(&self, source: &FiniteAbelianGroup) -> Result<FormIsometry> {
        let tgt = FiniteAbelianGroup {
            orders: self.target.clone(),
        };
        let mut preimage: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
        for idx in 0..source.order() as usize {
            let x = source.element_at(idx);
            preimage.insert(self.apply(&x), x);
        }
        let images = (0..tgt.rank())
            .map(|i| preimage.get(&tgt.basis_vector(i)).cloned().ok_or(Error::NotSubgroup))
            .collect::<Result<Vec<_>>>()?;
        Ok(FormIsometry {
            images,
            target: source.orders.clone(),
        })
    }

    /// True iff this is a well-defined bijective map `source → target`
    /// preserving all values.
    pub fn is_isometry(&self, source: &FiniteForm, target: &FiniteForm) -> bool {
        let k = source.group.rank();
        if self.images.len() != k || self.target != target.group.orders {
            return false;
        }
        let tgrp = &target.group;
        for i in 0..k {
            let d = source.group.orders[i];
            if tgrp.scale(&self.images[i], d) != tgrp.zero() {
                return false;
            }
            if target.value(&self.images[i]) != source.value(&source.group.basis_vector(i)) {
                return false;
            }
            for j in 0..i {
                if target.b(&self.images[i], &self.images[j]) != source.b_gen(i, j) {
                    return false;
                }
            }
        }
        self.is_bijective(&source.group)
    }
}

/// Closure of `generators` inside the orthogonal group of a form on `group`:
/// identity first, then lexicographic.
pub fn subgroup_closure(group: &FiniteAbelianGroup, generators: &[FormIsometry]) -> Vec<FormIsometry> {
    let id = FormIsometry::identity(group);
    let mut seen: HashSet<FormIsometry> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id.clone()]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    let mut rest: Vec<FormIsometry> = seen.into_iter().filter(|g| *g != id).collect();
    rest.sort();
    let mut out = vec![id];
    out.extend(rest);
    out
}

/// Number of double cosets `A \ G / B` by orbit counting.
pub fn count_cosets(g: &[FormIsometry], a: &[FormIsometry], b: &[FormIsometry]) -> Result<usize> {
    Ok(double_coset_representatives(g, a, b)?.len())
}

/// One canonical representative per double coset `A g B`: the lexicographic
/// minimum of its elements. Sorted.
pub fn double_coset_representatives(
    g: &[FormIsometry],
    a: &[FormIsometry],
    b: &[FormIsometry],
) -> Result<Vec<FormIsometry>> {
    let index: HashMap<&FormIsometry, usize> = g.iter().enumerate().map(|(i, x)| (x, i)).collect();
    if a.iter().chain(b).any(|x| !index.contains_key(x)) {
        return Err(Error::NotSubgroup);
    }
    let mut visited = vec![false; g.len()];
    let mut reps = Vec::new();
    for start in 0..g.len() {
        if visited[start] {
            continue;
        }
        let mut min = g[start].clone();
        for x in a {
            let xg = x.compose(&g[start]);
            for y in b {
                let h = xg.compose(y);
                let j = *index.get(&h).ok_or(Error::NotSubgroup)?;
                visited[j] = true;
                if h < min {
                    min = h;
                }
            }
        }
        reps.push(min);
    }
    reps.sort();
    Ok(reps)
}

/// Convenience: the rational `n/d`.
pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// True iff the value is `0` in ℚ/ℤ.
pub fn is_integral(x: &BigRational) -> bool {
    x.is_integer()
}

/// True iff `x ≡ 0 mod 2`.
pub fn is_even_integer(x: &BigRational) -> bool {
    x.is_integer() && x.to_integer().is_even()
}

/// Sign-normalized absolute value helper used by callers that store orders.
pub fn abs_u64(x: &BigInt) -> Result<u64> {
    x.abs().to_u64().ok_or_else(|| Error::Overflow(x.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_diag(entries: &[i64]) -> FiniteForm {
        // discriminant form of the diagonal lattice ⊕⟨eᵢ⟩: generator eᵢ/|eᵢ|, value 1/eᵢ
        let orders: Vec<u64> = entries.iter().map(|e| e.unsigned_abs()).collect();
        let k = entries.len();
        let mut gram = vec![vec![BigRational::zero(); k]; k];
        for (i, &e) in entries.iter().enumerate() {
            gram[i][i] = frac(1, e);
        }
        FiniteForm::from_generators(FormKind::Quadratic, &orders, gram).unwrap()
    }

    #[test]
    fn direct_sum_examples() {
        let q2 = q_diag(&[2]);
        assert_eq!(q2.direct_sum(&FiniteForm::trivial(FormKind::Quadratic)).unwrap(), q2);
        let s = q2.direct_sum(&q_diag(&[-6])).unwrap();
        assert_eq!(s.group().orders(), &[2, 6]);
        assert!(matches!(
            q2.direct_sum(&FiniteForm::trivial(FormKind::Bilinear)),
            Err(Error::KindMismatch)
        ));
    }

    #[test]
    fn cyclic_normalization() {
        // ⟨2⟩⊕⟨3⟩-style sum collapses to one cyclic factor of order 6
        let f = FiniteForm::from_generators(
            FormKind::Quadratic,
            &[2, 3],
            vec![vec![frac(1, 2), frac(0, 1)], vec![frac(0, 1), frac(2, 3)]],
        )
        .unwrap();
        assert_eq!(f.group().orders(), &[6]);
        assert_eq!(f.value(&[1]), rat_mod(&(frac(1, 2) * BigInt::from(9) + frac(2, 3) * BigInt::from(4)), 2));
    }

    #[test]
    fn negation() {
        let q2 = q_diag(&[2]);
        assert_eq!(q2.negate(), q_diag(&[-2]));
        assert_eq!(q2.negate().negate(), q2);
        let t = FiniteForm::trivial(FormKind::Quadratic);
        assert_eq!(t.negate(), t);
    }

    #[test]
    fn orthogonal_groups_small() {
        let q5 = FiniteForm::cyclic(FormKind::Quadratic, 5, frac(2, 5)).unwrap();
        let o = q5.orthogonal_group(DEFAULT_GROUP_BOUND).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o[0].is_identity());
        assert_eq!(q_diag(&[2]).orthogonal_group(DEFAULT_GROUP_BOUND).unwrap().len(), 1);
    }

    #[test]
    fn isometry_search() {
        let q2 = q_diag(&[2]);
        assert!(q2.find_isometry(&q_diag(&[-2]), 100).unwrap().is_none());
        assert!(q2.find_isometry(&q2, 100).unwrap().unwrap().is_identity());
        let b5 = FiniteForm::cyclic(FormKind::Bilinear, 5, frac(1, 5)).unwrap();
        let iso = b5.find_isometry(&b5.negate(), 100).unwrap().unwrap();
        assert!(iso.is_isometry(&b5, &b5.negate()));
        assert_eq!(iso.images()[0], vec![2]);
    }

    #[test]
    fn group_bound_enforced() {
        let big = q_diag(&[2, -30000]);
        assert!(matches!(
            big.orthogonal_group(1000),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn sylow_components() {
        let f = q_diag(&[2]).direct_sum(&q_diag(&[-6])).unwrap();
        let f3 = f.p_component(3);
        assert_eq!(f3.group().orders(), &[3]);
        assert!(FiniteForm::trivial(FormKind::Quadratic).p_component(5).is_trivial());
        let back = f.p_component(2).direct_sum(&f3).unwrap();
        assert!(back.find_isometry(&f, 100).unwrap().is_some());
    }

    #[test]
    fn coset_counting_trivial_cases() {
        let f = q_diag(&[2, -16]);
        let g = f.orthogonal_group(1000).unwrap();
        let id = vec![g[0].clone()];
        assert_eq!(count_cosets(&g, &g, &g).unwrap(), 1);
        assert_eq!(count_cosets(&g, &id, &id).unwrap(), g.len());
        let foreign = FormIsometry::from_images(vec![vec![1, 3], vec![0, 5]], f.group());
        assert!(matches!(count_cosets(&g, &[foreign], &id), Err(Error::NotSubgroup)));
    }
}
