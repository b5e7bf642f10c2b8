//! Linear complexity of vector sequences over `F_p`.
//!
//! `L(N)` is the smallest `L` for which vectors `c_0, ..., c_L` in `F_p^m`,
//! `c_L != 0`, satisfy `sum_h c_h . u_{n+h} = 0` for every window
//! `n = 0, ..., N - L - 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::Prime;
use crate::{Error, Result};

/// Coefficient vectors `c_0, ..., c_L` of a linear relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWitness {
    pub coeffs: Vec<Vec<u64>>,
}

impl RelationWitness {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Checks the relation on every full window of `seq` and that `c_L != 0`.
    pub fn verify(&self, seq: &[Vec<u64>], p: Prime) -> bool {
        let l = self.order();
        if self.coeffs[l].iter().all(|&x| x == 0) {
            return false;
        }
        (0..seq.len().saturating_sub(l)).all(|n| {
            self.coeffs.iter().enumerate().fold(0, |acc, (h, c)| {
                c.iter()
                    .zip(&seq[n + h])
                    .fold(acc, |a, (&ci, &ui)| p.add(a, p.mul(ci, ui)))
            }) == 0
        })
    }
}

/// Dense matrix over `F_p` reduced in place to row echelon form.
struct Echelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn reduce(mut rows: Vec<Vec<u64>>, cols: usize, p: Prime) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..cols {
            let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(r, found);
            let inv = p.inv(rows[r][col]).expect("pivot is nonzero");
            for x in rows[r].iter_mut() {
                *x = p.mul(*x, inv);
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[col] != 0 {
                    let f = row[col];
                    for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x = p.sub(*x, p.mul(f, y));
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel vector obtained by setting free column `free` to 1.
    fn kernel_vector(&self, free: usize, cols: usize, p: Prime) -> Vec<u64> {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            v[pc] = p.neg(row[free]);
        }
        v
    }
}

fn window_matrix(seq: &[Vec<u64>], l: usize, blocks: usize) -> Vec<Vec<u64>> {
    let m = seq[0].len();
    (0..seq.len() - l)
        .map(|n| {
            let mut row = Vec::with_capacity(m * blocks);
            for h in 0..blocks {
                row.extend_from_slice(&seq[n + h]);
            }
            row
        })
        .collect()
}

/// `L(N)` for `N = seq.len()` together with a relation attaining it.
///
/// For each candidate `L` the relation is a homogeneous system in `m(L + 1)`
/// unknowns. A solution with `c_L != 0` exists exactly when dropping the
/// columns of `c_L` lowers the rank by less than `m`.
pub fn linear_complexity(seq: &[Vec<u64>], p: Prime) -> Result<(usize, RelationWitness)> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::InvalidArgument("linear complexity needs N >= 2".into()));
    }
    let m = seq[0].len();
    if m == 0 {
        return Err(Error::InvalidArgument("sequence vectors are empty".into()));
    }
    for u in seq {
        if u.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: u.len() });
        }
        if let Some(&x) = u.iter().find(|&&x| x >= p.get()) {
            return Err(Error::InvalidArgument(alloc::format!("{x} is not reduced mod {}", p.get())));
        }
    }
    for l in 0..=n {
        let cols = m * (l + 1);
        let full = Echelon::reduce(window_matrix(seq, l, l + 1), cols, p);
        let head = Echelon::reduce(window_matrix(seq, l, l), m * l, p);
        if full.rank() - head.rank() >= m {
            continue;
        }
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; cols];
            for &c in &full.pivots {
                s[c] = true;
            }
            s
        };
        // a free column inside the last block gives c_L != 0 directly; otherwise
        // some kernel basis vector still reaches the last block through pivots
        let witness = (0..cols)
            .rev()
            .filter(|&c| !pivot_set[c])
            .map(|c| full.kernel_vector(c, cols, p))
            .find(|v| v[m * l..].iter().any(|&x| x != 0))
            .expect("rank test guarantees a kernel vector with c_L != 0");
        let mut coeffs: Vec<Vec<u64>> = witness.chunks(m).map(|c| c.to_vec()).collect();
        normalize(&mut coeffs, p);
        return Ok((l, RelationWitness { coeffs }));
    }
    unreachable!("L = N leaves no windows, so any c_L works")
}

// Scale so the first nonzero entry of c_L is 1.
fn normalize(coeffs: &mut [Vec<u64>], p: Prime) {
    let last = coeffs.last().expect("L + 1 >= 1 blocks");
    let lead = *last.iter().find(|&&x| x != 0).expect("c_L != 0");
    let inv = p.inv(lead).expect("nonzero");
    for block in coeffs.iter_mut() {
        for x in block.iter_mut() {
            *x = p.mul(*x, inv);
        }
    }
}

/// `L(n)` for every prefix length `n = 2..=seq.len()`.
pub fn complexity_profile(seq: &[Vec<u64>], p: Prime) -> Result<Vec<(usize, usize)>> {
    (2..=seq.len())
        .map(|n| linear_complexity(&seq[..n], p).map(|(l, _)| (n, l)))
        .collect()
}

/// `L` next to the lower-bound shape `N^{1/m} / p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub l: usize,
    pub n: usize,
    pub scale: f64,
    pub ratio: f64,
    pub note: Option<String>,
}

pub fn lower_bound_report(l: usize, n: usize, p: Prime, m: usize) -> LowerBoundReport {
    let scale = libm::pow(n as f64, 1.0 / m.max(1) as f64) / p.get() as f64;
    let note = if l == 0 {
        Some("L = 0: a single vector annihilates the whole sequence".into())
    } else {
        None
    };
    LowerBoundReport {
        l,
        n,
        scale,
        ratio: l as f64 / scale,
        note,
    }
}
