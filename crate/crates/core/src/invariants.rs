//! Genus invariants `(r, a, δφ; k, n, δP, δφP)` of integral polarized
//! involutions, their validity conditions and the real-locus topology.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The full invariant record. JSON keys: `r`, `a`, `delta_phi`, `k`, `n`,
/// `delta_P`, `delta_phiP`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenusInvariants {
    pub r: u32,
    pub a: u32,
    pub delta_phi: u8,
    pub k: u64,
    pub n: u64,
    #[serde(rename = "delta_P")]
    pub delta_p: u8,
    #[serde(rename = "delta_phiP")]
    pub delta_phi_p: u8,
}

impl GenusInvariants {
    pub fn new(r: u32, a: u32, delta_phi: u8, k: u64, n: u64, delta_p: u8, delta_phi_p: u8) -> Self {
        Self {
            r,
            a,
            delta_phi,
            k,
            n,
            delta_p,
            delta_phi_p,
        }
    }

    /// Same invariants with the smallest admissible `k` (3 when `n = 2`, else 1).
    pub fn with_min_k(mut self) -> Self {
        self.k = min_k(self.n);
        self
    }

    pub fn triple(&self) -> (u32, u32, u8) {
        (self.r, self.a, self.delta_phi)
    }
}

impl fmt::Display for GenusInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{};{},{},{},{})",
            self.r, self.a, self.delta_phi, self.k, self.n, self.delta_p, self.delta_phi_p
        )
    }
}

pub fn min_k(n: u64) -> u64 {
    if n == 2 {
        3
    } else {
        1
    }
}

/// One violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub id: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violated: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violated: Vec<Violation>) -> Self {
        Self {
            valid: violated.is_empty(),
            violated,
        }
    }

    pub fn ids(&self) -> Vec<&str> {
        self.violated.iter().map(|v| v.id.as_str()).collect()
    }

    pub fn summary(&self) -> String {
        if self.valid {
            "valid".to_string()
        } else {
            format!("violates {}", self.ids().join(", "))
        }
    }
}

struct Checker {
    violated: Vec<Violation>,
}

impl Checker {
    fn new() -> Self {
        Self { violated: Vec::new() }
    }

    /// Records `id` when the implication `premise ⇒ conclusion` fails.
    fn implies(&mut self, id: &str, text: &str, premise: bool, conclusion: bool) {
        if premise && !conclusion {
            self.violated.push(Violation {
                id: id.to_string(),
                text: text.to_string(),
            });
        }
    }

    fn require(&mut self, id: &str, text: &str, holds: bool) {
        self.implies(id, text, true, holds);
    }
}

fn rad_conditions(c: &mut Checker, r: u32, a: u32, d: u8) {
    if d > 1 {
        c.require("domain", "delta_phi is 0 or 1", false);
        return;
    }
    let (r, a) = (r as i64, a as i64);
    c.require(
        "0.1",
        "1 <= r <= 20, 0 <= a <= min(r, 22-r)",
        (1..=20).contains(&r) && a <= r.min(22 - r),
    );
    c.require("0.2", "r+a = 0 mod 2", (r + a) % 2 == 0);
    c.implies("0.2", "if delta_phi = 0, then r = 2 mod 4", d == 0, r.rem_euclid(4) == 2);
    c.implies(
        "0.3",
        "if a = 0, then delta_phi = 0 and r = 2 mod 8",
        a == 0,
        d == 0 && r.rem_euclid(8) == 2,
    );
    c.implies("0.4", "if a = 1, then r = 1,3 mod 8", a == 1, matches!(r.rem_euclid(8), 1 | 3));
    c.implies(
        "0.5",
        "if (a = 2, r = 6 mod 8), then delta_phi = 0",
        a == 2 && r.rem_euclid(8) == 6,
        d == 0,
    );
    c.implies(
        "0.6",
        "if (a = r, delta_phi = 0), then r = 2 mod 8",
        a == r && d == 0,
        r.rem_euclid(8) == 2,
    );
    c.implies(
        "0.7",
        "if (a = 22-r, delta_phi = 0), then r = 2 mod 8",
        a == 22 - r && d == 0,
        r.rem_euclid(8) == 2,
    );
}

/// Checks the conditions on `(r, a, δφ)` alone.
pub fn validate_rad(r: u32, a: u32, delta_phi: u8) -> ValidationReport {
    let mut c = Checker::new();
    rad_conditions(&mut c, r, a, delta_phi);
    ValidationReport::from_violations(c.violated)
}

/// All valid `(r, a, δφ)`, sorted.
pub fn enumerate_rad() -> Vec<(u32, u32, u8)> {
    let mut out = Vec::new();
    for r in 1..=20 {
        for a in 0..=22 {
            for d in 0..=1 {
                if validate_rad(r, a, d).valid {
                    out.push((r, a, d));
                }
            }
        }
    }
    out
}

/// True iff `n = 2^ε · ∏ pᵢ^αᵢ` with `ε ≤ 2` and every odd `pᵢ ≡ 1 mod 4`.
pub fn admissible_for_r20(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut eps = 0;
    while m % 2 == 0 {
        m /= 2;
        eps += 1;
    }
    eps <= 2 && crate::finite_form::prime_factors(m).iter().all(|p| p % 4 == 1)
}

/// Checks every condition on the full invariant record. When a condition on
/// `(r, a, δφ)` fails, only those failures are reported.
pub fn validate_full(inv: &GenusInvariants) -> ValidationReport {
    let mut c = Checker::new();
    rad_conditions(&mut c, inv.r, inv.a, inv.delta_phi);
    if !c.violated.is_empty() {
        return ValidationReport::from_violations(c.violated);
    }
    if inv.delta_p > 1 || inv.delta_phi_p > 1 {
        c.require("domain", "delta_P and delta_phiP are 0 or 1", false);
        return ValidationReport::from_violations(c.violated);
    }
    c.require("K.1", "k >= 1", inv.k >= 1);
    c.implies("K.2", "if n = 2, then k >= 3", inv.n == 2, inv.k >= 3);

    let (r, a) = (inv.r as i64, inv.a as i64);
    let dphi = inv.delta_phi;
    let dp = inv.delta_p;
    let dphip = inv.delta_phi_p;
    let n = inv.n;
    c.require("I.1", "n > 0 and n = 0 mod 2", n > 0 && n % 2 == 0);
    if n == 0 || n % 2 == 1 {
        return ValidationReport::from_violations(c.violated);
    }
    let n8 = n % 8;
    let half = (n / 2) as i64;
    let r4 = r.rem_euclid(4);
    let r8 = r.rem_euclid(8);

    c.implies(
        "I.2",
        "if (n = 2 mod 4, delta_P = 0), then delta_phi = 1",
        n % 4 == 2 && dp == 0,
        dphi == 1,
    );
    c.implies(
        "I.3",
        "if delta_phiP = 0, then (delta_P = 0, delta_phi = 1, r = 2+n/2 mod 4)",
        dphip == 0,
        dp == 0 && dphi == 1 && r4 == (2 + half).rem_euclid(4),
    );
    c.implies("I.4", "if a = 22-r, then delta_P = 0", a == 22 - r, dp == 0);
    c.implies(
        "I.5",
        "if (a = 22-r, delta_phiP = 0), then r = 2+n/2 mod 8",
        a == 22 - r && dphip == 0,
        r8 == (2 + half).rem_euclid(8),
    );
    c.implies(
        "I.6",
        "if (a = 20-r, n = 0 mod 4, delta_P = 1, delta_phi = 0), then r = 2 mod 8",
        a == 20 - r && n % 4 == 0 && dp == 1 && dphi == 0,
        r8 == 2,
    );
    c.implies("I.7", "if a = 0, then delta_P = 1", a == 0, dp == 1);
    c.implies("I.8", "if (a = 1, n = 0 mod 4), then delta_P = 1", a == 1 && n % 4 == 0, dp == 1);
    c.implies(
        "I.9",
        "if (a = 1, delta_P = 0, n = ±2 mod 8), then r = 2±1 mod 8",
        a == 1 && dp == 0 && (n8 == 2 || n8 == 6),
        if n8 == 2 { r8 == 3 } else { r8 == 1 },
    );
    c.implies(
        "I.10",
        "if (a = 2, delta_P = 0, n = ±2 mod 8), then r = 2, 2±2 mod 8",
        a == 2 && dp == 0 && (n8 == 2 || n8 == 6),
        if n8 == 2 { matches!(r8, 2 | 4) } else { matches!(r8, 2 | 0) },
    );
    c.implies(
        "I.11",
        "if (a = 2, delta_P = 0, n = 0 mod 8), then r = 2 mod 8",
        a == 2 && dp == 0 && n8 == 0,
        r8 == 2,
    );
    c.implies(
        "I.12",
        "if (a = 3, delta_P = 0, n = 0 mod 8), then r = 1,3 mod 8",
        a == 3 && dp == 0 && n8 == 0,
        matches!(r8, 1 | 3),
    );
    c.implies(
        "I.13",
        "if (a = 2, delta_P = 0, n = 4 mod 8, r = 2 mod 8), then delta_phi = 0",
        a == 2 && dp == 0 && n8 == 4 && r8 == 2,
        dphi == 0,
    );
    c.implies("I.14", "if (a = 1, delta_P = 0), then delta_phiP = 0", a == 1 && dp == 0, dphip == 0);
    c.implies(
        "I.15",
        "if (a = 2, delta_P = 0, n = 4 mod 8, r = 0 mod 4), then delta_phiP = 0",
        a == 2 && dp == 0 && n8 == 4 && r4 == 0,
        dphip == 0,
    );
    c.implies(
        "I.16",
        "if (a = 3, delta_P = 0, n = ±2 mod 8, r = 2±5 mod 8), then delta_phiP = 0",
        a == 3 && dp == 0 && ((n8 == 2 && r8 == 7) || (n8 == 6 && r8 == 5)),
        dphip == 0,
    );
    c.implies(
        "I.17",
        "if (a = 2, delta_P = 0, n = 0 mod 8, r = 2 mod 8, delta_phi = 1), then delta_phiP = 0",
        a == 2 && dp == 0 && n8 == 0 && r8 == 2 && dphi == 1,
        dphip == 0,
    );
    c.implies(
        "I.18",
        "if (a = 4, delta_P = 0, n = 0 mod 8, r = 6 mod 8, delta_phi = 1), then delta_phiP = 0",
        a == 4 && dp == 0 && n8 == 0 && r8 == 6 && dphi == 1,
        dphip == 0,
    );
    c.implies(
        "I.19",
        "if r = 20, then n = 2^e p1^a1 ... pm^am with e <= 2, pi prime, pi = 1 mod 4",
        r == 20,
        admissible_for_r20(n),
    );
    ValidationReport::from_violations(c.violated)
}

/// All valid invariants of primitive degree `n`, with `k` at its minimum,
/// sorted by `(r, a, δφ, δP, δφP)`.
pub fn enumerate_full(n: u64) -> Result<Vec<GenusInvariants>> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddDegree(n));
    }
    let mut out = Vec::new();
    for (r, a, d) in enumerate_rad() {
        for dp in 0..=1 {
            for dphip in 0..=1 {
                let inv = GenusInvariants::new(r, a, d, min_k(n), n, dp, dphip);
                if validate_full(&inv).valid {
                    out.push(inv);
                }
            }
        }
    }
    Ok(out)
}

/// Topological type of the real locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceTopology {
    Empty,
    TwoTori,
    /// `T_genus ⊔ (T₀)^spheres`.
    Components { genus: u32, spheres: u32 },
}

impl fmt::Display for SurfaceTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceTopology::Empty => write!(f, "empty"),
            SurfaceTopology::TwoTori => write!(f, "T1+T1"),
            SurfaceTopology::Components { genus, spheres } => write!(f, "T{genus}+{spheres}T0"),
        }
    }
}

pub fn topology_of(r: u32, a: u32, delta_phi: u8) -> Result<SurfaceTopology> {
    if !validate_rad(r, a, delta_phi).valid {
        return Err(Error::InvalidTriple(r, a, delta_phi));
    }
    Ok(match (r, a, delta_phi) {
        (10, 10, 0) => SurfaceTopology::Empty,
        (10, 8, 0) => SurfaceTopology::TwoTori,
        _ => SurfaceTopology::Components {
            genus: (22 - r - a) / 2,
            spheres: (r - a) / 2,
        },
    })
}

pub fn topology(inv: &GenusInvariants) -> Result<SurfaceTopology> {
    topology_of(inv.r, inv.a, inv.delta_phi)
}

/// `(X(ℝ) ~ 0 mod 2, X(ℝ) ~ P mod 2)`.
pub fn mod2_classes(inv: &GenusInvariants) -> Result<(bool, bool)> {
    if !validate_rad(inv.r, inv.a, inv.delta_phi).valid {
        return Err(Error::InvalidTriple(inv.r, inv.a, inv.delta_phi));
    }
    Ok((inv.delta_phi == 0, inv.delta_phi_p == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rad_examples() {
        assert!(validate_rad(10, 10, 0).valid);
        assert!(validate_rad(20, 2, 0).ids().contains(&"0.2"));
        assert!(validate_rad(2, 0, 0).valid);
        assert!(validate_rad(2, 0, 1).ids().contains(&"0.3"));
        assert_eq!(validate_rad(2, 0, 5).ids(), vec!["domain"]);
    }

    #[test]
    fn rad_enumeration_facts() {
        let all = enumerate_rad();
        assert!(all.contains(&(10, 8, 0)));
        assert!(all.contains(&(10, 10, 0)) && all.contains(&(10, 10, 1)));
        assert!(all.iter().all(|&(r, a, _)| (r + a) % 2 == 0));
        assert_eq!(all.len(), 75);
    }

    #[test]
    fn full_examples() {
        assert!(validate_full(&GenusInvariants::new(19, 1, 1, 3, 10, 0, 0)).valid);
        assert!(validate_full(&GenusInvariants::new(20, 2, 1, 1, 6, 0, 1)).ids().contains(&"I.19"));
        assert!(validate_full(&GenusInvariants::new(19, 1, 1, 1, 4, 0, 0)).ids().contains(&"I.8"));
        assert_eq!(validate_full(&GenusInvariants::new(19, 1, 1, 1, 2, 1, 1)).ids(), vec!["K.2"]);
        // fail fast: a bad triple hides every other clause
        assert_eq!(validate_full(&GenusInvariants::new(21, 1, 1, 0, 3, 0, 0)).ids(), vec!["0.1", "0.4"]);
    }

    #[test]
    fn full_enumeration() {
        let two = enumerate_full(2).unwrap();
        assert!(two.contains(&GenusInvariants::new(19, 3, 1, 3, 2, 0, 0)));
        assert!(enumerate_full(6).unwrap().iter().all(|i| i.triple() != (20, 2, 1)));
        assert!(matches!(enumerate_full(7), Err(Error::OddDegree(7))));
    }

    #[test]
    fn topology_examples() {
        assert_eq!(topology_of(10, 10, 0).unwrap(), SurfaceTopology::Empty);
        assert_eq!(topology_of(10, 8, 0).unwrap(), SurfaceTopology::TwoTori);
        assert_eq!(
            topology_of(19, 3, 1).unwrap(),
            SurfaceTopology::Components { genus: 0, spheres: 8 }
        );
        assert_eq!(
            topology_of(20, 2, 1).unwrap(),
            SurfaceTopology::Components { genus: 0, spheres: 9 }
        );
        assert_eq!(
            topology_of(19, 1, 1).unwrap(),
            SurfaceTopology::Components { genus: 1, spheres: 9 }
        );
        assert!(matches!(topology_of(20, 2, 0), Err(Error::InvalidTriple(20, 2, 0))));
    }

    #[test]
    fn json_keys() {
        let inv = GenusInvariants::new(19, 1, 1, 1, 6, 1, 1);
        let s = serde_json::to_string(&inv).unwrap();
        assert_eq!(
            s,
            r#"{"r":19,"a":1,"delta_phi":1,"k":1,"n":6,"delta_P":1,"delta_phiP":1}"#
        );
    }
}
