#![allow(dead_code)]

use std::collections::BTreeSet;

/// Figure 1 as transcribed into the golden file.
pub fn figure1() -> BTreeSet<(u32, u32, u8)> {
    let text = include_str!("../golden/figure1.tsv");
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

fn m8(x: i64) -> i64 {
    x.rem_euclid(8)
}

fn m4(x: i64) -> i64 {
    x.rem_euclid(4)
}

fn r20_degree(n: i64) -> bool {
    let mut m = n;
    let mut e = 0;
    while m % 2 == 0 {
        m /= 2;
        e += 1;
    }
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            if p % 4 != 1 {
                return false;
            }
            m /= p;
        } else {
            p += 2;
        }
    }
    e <= 2 && (m == 1 || m % 4 == 1)
}

/// Literal reading of conditions 0.(1)–(7) and I.(1)–(19), written
/// clause by clause as "premise implies conclusion".
pub fn literal_valid(r: i64, a: i64, dphi: i64, n: i64, dp: i64, dphip: i64) -> bool {
    let imp = |p: bool, c: bool| !p || c;
    let zero = [
        (1..=20).contains(&r) && 0 <= a && a <= r.min(22 - r),
        (r + a) % 2 == 0 && imp(dphi == 0, m4(r) == 2),
        imp(a == 0, dphi == 0 && m8(r) == 2),
        imp(a == 1, m8(r) == 1 || m8(r) == 3),
        imp(a == 2 && m8(r) == 6, dphi == 0),
        imp(a == r && dphi == 0, m8(r) == 2),
        imp(a == 22 - r && dphi == 0, m8(r) == 2),
    ];
    if !zero.iter().all(|&b| b) {
        return false;
    }
    let n8 = m8(n);
    let plus2 = n8 == 2;
    let minus2 = n8 == 6;
    let conds = [
        n > 0 && n % 2 == 0,
        imp(n % 4 == 2 && dp == 0, dphi == 1),
        imp(dphip == 0, dp == 0 && dphi == 1 && m4(r) == m4(2 + n / 2)),
        imp(a == 22 - r, dp == 0),
        imp(a == 22 - r && dphip == 0, m8(r) == m8(2 + n / 2)),
        imp(a == 20 - r && n % 4 == 0 && dp == 1 && dphi == 0, m8(r) == 2),
        imp(a == 0, dp == 1),
        imp(a == 1 && n % 4 == 0, dp == 1),
        imp(a == 1 && dp == 0 && plus2, m8(r) == m8(2 + 1)),
        imp(a == 1 && dp == 0 && minus2, m8(r) == m8(2 - 1)),
        imp(a == 2 && dp == 0 && plus2, m8(r) == 2 || m8(r) == m8(2 + 2)),
        imp(a == 2 && dp == 0 && minus2, m8(r) == 2 || m8(r) == m8(2 - 2)),
        imp(a == 2 && dp == 0 && n8 == 0, m8(r) == 2),
        imp(a == 3 && dp == 0 && n8 == 0, m8(r) == 1 || m8(r) == 3),
        imp(a == 2 && dp == 0 && n8 == 4 && m8(r) == 2, dphi == 0),
        imp(a == 1 && dp == 0, dphip == 0),
        imp(a == 2 && dp == 0 && n8 == 4 && m4(r) == 0, dphip == 0),
        imp(a == 3 && dp == 0 && plus2 && m8(r) == m8(2 + 5), dphip == 0),
        imp(a == 3 && dp == 0 && minus2 && m8(r) == m8(2 - 5), dphip == 0),
        imp(a == 2 && dp == 0 && n8 == 0 && m8(r) == 2 && dphi == 1, dphip == 0),
        imp(a == 4 && dp == 0 && n8 == 0 && m8(r) == 6 && dphi == 1, dphip == 0),
        imp(r == 20, r20_degree(n)),
    ];
    conds.iter().all(|&b| b)
}

/// Order of the 2-component of `O(q⟨2⟩ ⊕ q⟨−n⟩)` as stated in the remark
/// after the `(19,1,1)`, `δP = 1` classification.
pub fn remark_order_q(n: u64) -> usize {
    if n % 8 == 2 {
        1
    } else if n % 16 == 0 {
        4
    } else {
        2
    }
}

/// Order of `O(b⟨−n/2⟩₂)` as stated in the remark after the `(19,3,1)`,
/// `δφP = 1` classification.
pub fn remark_order_b(n: u64) -> usize {
    if n % 4 == 2 || n % 8 == 4 {
        1
    } else if n % 16 == 8 {
        2
    } else {
        4
    }
}

/// Isomorphisms `b⟨n/2⟩ → −b⟨n/2⟩` up to sign, counted as units `u` mod
/// `n/2` with `u² ≡ −1`.
pub fn r202_unit_count(n: u64) -> usize {
    let m = n / 2;
    if m == 1 {
        return 1;
    }
    let roots = (0..m).filter(|&u| (u * u + 1) % m == 0).count();
    if m == 2 {
        roots
    } else {
        roots / 2
    }
}

pub mod checks;
pub mod props;
