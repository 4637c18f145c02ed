//! Bigraded Hilbert tables of symmetric algebras on generators (h|i|j), where h indexes
//! the E_r-degree 2h and (i, j) runs over the pairs attached to the group.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spf_core::combinatorics::multisets;
use spf_core::field::Prime;
use spf_core::polyrep::{exterior_power, standard, symmetric_power, PolyRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Sp,
    O,
}

impl Group {
    pub fn parse(s: &str) -> Option<Group> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Some(Group::Sp),
            "o" => Some(Group::O),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Sp => "sp",
            Group::O => "o",
        }
    }

    /// Index pairs (i, j): i < j for Sp, i ≤ j for O.
    pub fn pairs(self, l: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=l {
            for j in i..=l {
                if i < j || self == Group::O {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// X_G: Λ² for Sp, S² for O.
    pub fn x_g(self, v: &PolyRep) -> PolyRep {
        match self {
            Group::Sp => exterior_power(v, 2),
            Group::O => symmetric_power(v, 2),
        }
    }

    pub fn x_g_standard(self, p: Prime, m: usize) -> PolyRep {
        self.x_g(&standard(p, m))
    }
}

/// (polynomial degree d, cohomological degree) ↦ dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertTable {
    pub rows: BTreeMap<u32, BTreeMap<u32, u64>>,
}

impl HilbertTable {
    pub fn row(&self, d: u32) -> BTreeMap<u32, u64> {
        self.rows.get(&d).cloned().unwrap_or_default()
    }

    pub fn total(&self, d: u32) -> u64 {
        self.row(d).values().sum()
    }
}

/// Cohomological degrees of the generators: 2h for each h < p^r and each pair.
pub fn generator_degrees(g: Group, p: Prime, r: u32, l: usize) -> Vec<u32> {
    let q = p.get().pow(r);
    let mut out = Vec::new();
    for _ in g.pairs(l) {
        for h in 0..q {
            out.push(2 * h);
        }
    }
    out
}

/// Coefficients of Π (1 − t^{c} s)^{-1} up to s^{d_max}.
pub fn closed_form(degrees: &[u32], d_max: u32) -> HilbertTable {
    let mut rows: Vec<BTreeMap<u32, u64>> = vec![BTreeMap::new(); d_max as usize + 1];
    rows[0].insert(0, 1);
    for &c in degrees {
        // multiply by the geometric series: new_d = old_d + t^c · new_{d-1}
        for d in 1..=d_max as usize {
            let prev: Vec<(u32, u64)> = rows[d - 1].iter().map(|(&k, &v)| (k, v)).collect();
            for (k, v) in prev {
                *rows[d].entry(k + c).or_insert(0) += v;
            }
        }
    }
    HilbertTable { rows: rows.into_iter().enumerate().map(|(d, r)| (d as u32, r)).collect() }
}

/// The same table by listing monomials.
pub fn enumerate_monomials(degrees: &[u32], d_max: u32) -> HilbertTable {
    let mut t = HilbertTable::default();
    for d in 0..=d_max {
        let mut row = BTreeMap::new();
        if degrees.is_empty() {
            if d == 0 {
                row.insert(0, 1);
            }
        } else {
            for m in multisets(degrees.len(), d as usize) {
                let deg: u32 = m.iter().map(|&i| degrees[i as usize]).sum();
                *row.entry(deg).or_insert(0) += 1;
            }
        }
        t.rows.insert(d, row);
    }
    t
}

pub fn hilbert_table(g: Group, p: Prime, r: u32, l: usize, d_max: u32) -> HilbertTable {
    closed_form(&generator_degrees(g, p, r, l), d_max)
}
