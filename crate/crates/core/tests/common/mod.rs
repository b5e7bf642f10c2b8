#![allow(dead_code)]

use std::collections::HashSet;

use polyiter_core::space;
use polyiter_core::stats::{box_deviation, PointSet};
use polyiter_core::{MultiPoly, Prime, ShapeMatrix, TriangularSystem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

/// Upper triangular shape with unit diagonal and entries above it drawn from `entries`.
pub fn random_shape(rng: &mut impl Rng, m: usize, entries: &[u64]) -> ShapeMatrix {
    let n = m + 1;
    let mut rows = vec![vec![0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1;
        for x in row.iter_mut().skip(i + 1) {
            *x = entries[rng.gen_range(0..entries.len())];
        }
    }
    ShapeMatrix::new(rows).unwrap()
}

fn random_exponents(rng: &mut impl Rng, shape: &ShapeMatrix, i: usize, inclusive: bool) -> Vec<u32> {
    let n = shape.m() + 1;
    let mut e = vec![0u32; n];
    for (j, x) in e.iter_mut().enumerate().skip(i + 1) {
        let s = shape.entry(i, j) as u32;
        let top = if inclusive { s + 1 } else { s };
        *x = if top == 0 { 0 } else { rng.gen_range(0..top) };
    }
    e
}

/// A system satisfying every membership condition for `shape`: the leading
/// monomial of `G_i` is `prod X_j^{s_ij}`, other `G_i` terms stay strictly
/// below it in every variable, and `H_i` stays at or below it.
pub fn random_valid_system(rng: &mut impl Rng, shape: &ShapeMatrix, p: Prime) -> TriangularSystem {
    let m = shape.m();
    let n = m + 1;
    let q = p.get() as i64;
    let mut g = Vec::with_capacity(m);
    let mut h = Vec::with_capacity(m);
    for i in 0..m {
        let lead: Vec<u32> = (0..n)
            .map(|j| if j > i { shape.entry(i, j) as u32 } else { 0 })
            .collect();
        let mut terms = vec![(lead, rng.gen_range(1..q))];
        let room = (i + 1..n).all(|j| shape.entry(i, j) > 0);
        if room {
            for _ in 0..rng.gen_range(0..4) {
                terms.push((random_exponents(rng, shape, i, false), rng.gen_range(0..q)));
            }
        }
        g.push(MultiPoly::from_terms(p, n, terms).unwrap());
        let hterms: Vec<_> = (0..rng.gen_range(0..5))
            .map(|_| (random_exponents(rng, shape, i, true), rng.gen_range(0..q)))
            .collect();
        h.push(MultiPoly::from_terms(p, n, hterms).unwrap());
    }
    let sys = TriangularSystem::new(
        shape.clone(),
        p,
        g,
        h,
        rng.gen_range(1..p.get()),
        rng.gen_range(0..p.get()),
    )
    .unwrap();
    assert!(sys.validate().is_ok(), "{}", sys.validate());
    sys
}

/// A permutation system whose shape rows are either all 2 or all 0 above the
/// diagonal. An all-2 row gets `G_i = a T^2 + b T + c` with `T = X_{i+1} ... X_m`
/// and no root in `T`; an all-0 row gets a nonzero constant. A zero entry
/// forces the lower part of `G_i` to vanish, so mixed rows would leave a bare
/// monomial, which has zeros.
pub fn random_permutation_system(rng: &mut impl Rng, p: Prime, m: usize, gm: Option<u64>) -> TriangularSystem {
    let n = m + 1;
    let full: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.8)).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j {
                    _ if j == i => 1,
                    _ if j > i && full[i] => 2,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    let shape = ShapeMatrix::new(rows).unwrap();
    let q = p.get();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for (i, &full_row) in full.iter().enumerate() {
        if full_row {
            let t_pow = |e: u32| (0..n).map(|j| if j > i { e } else { 0 }).collect::<Vec<u32>>();
            let (a, b, c) = loop {
                let (a, b, c) = (rng.gen_range(1..q), rng.gen_range(0..q), rng.gen_range(0..q));
                if (0..q).all(|x| (a * x * x + b * x + c) % q != 0) {
                    break (a, b, c);
                }
            };
            let terms = [(t_pow(2), a as i64), (t_pow(1), b as i64), (t_pow(0), c as i64)];
            g.push(MultiPoly::from_terms(p, n, terms).unwrap());
        } else {
            g.push(MultiPoly::constant(p, n, rng.gen_range(1..q)));
        }
        let hterms: Vec<_> = (0..rng.gen_range(0..5))
            .map(|_| (random_exponents(rng, &shape, i, true), rng.gen_range(0..q) as i64))
            .collect();
        h.push(MultiPoly::from_terms(p, n, hterms).unwrap());
    }
    let gm = gm.unwrap_or_else(|| rng.gen_range(1..q));
    let sys = TriangularSystem::new(shape, p, g, h, gm, rng.gen_range(0..q)).unwrap();
    assert!(sys.validate().is_ok(), "{}", sys.validate());
    sys
}

/// Applies the map to every point and checks that no image repeats.
pub fn bijective_by_enumeration(sys: &TriangularSystem) -> bool {
    let p = sys.modulus().get();
    let mut seen = HashSet::new();
    space::points(p, sys.arity()).all(|w| seen.insert(sys.apply(&w)))
}

#[derive(Clone, Copy)]
struct Face {
    lo: f64,
    lo_closed: bool,
    hi: f64,
    hi_closed: bool,
}

impl Face {
    fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

// Every interval with ends in {0, 1} and the coordinates of dimension d, in
// all four open/closed variants. Closed ends stand for limits of half-open boxes.
fn faces(ps: &PointSet, d: usize) -> Vec<Face> {
    let mut ends: Vec<f64> = ps.points().iter().map(|p| p[d]).chain([0.0, 1.0]).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut out = Vec::new();
    for (a, &lo) in ends.iter().enumerate() {
        for &hi in &ends[a..] {
            for lo_closed in [false, true] {
                for hi_closed in [false, true] {
                    out.push(Face { lo, lo_closed, hi, hi_closed });
                }
            }
        }
    }
    out
}

fn for_each_box(ps: &PointSet, mut visit: impl FnMut(&[Face])) {
    let per_dim: Vec<Vec<Face>> = (0..ps.dim()).map(|d| faces(ps, d)).collect();
    let mut idx = vec![0usize; ps.dim()];
    let mut current: Vec<Face> = per_dim.iter().map(|f| f[0]).collect();
    loop {
        visit(&current);
        let mut d = 0;
        loop {
            if d == idx.len() {
                return;
            }
            idx[d] += 1;
            if idx[d] < per_dim[d].len() {
                current[d] = per_dim[d][idx[d]];
                break;
            }
            idx[d] = 0;
            current[d] = per_dim[d][0];
            d += 1;
        }
    }
}

fn volume(faces: &[Face]) -> f64 {
    faces.iter().fold(1.0, |v, f| v * (f.hi - f.lo))
}

/// Extreme discrepancy by visiting every candidate box and counting points one by one.
pub fn discrepancy_by_loop(ps: &PointSet) -> f64 {
    let n = ps.len();
    let mut best = 0.0f64;
    for_each_box(ps, |faces| {
        let count = ps
            .points()
            .iter()
            .filter(|pt| faces.iter().zip(pt.iter()).all(|(f, &x)| f.contains(x)))
            .count();
        best = best.max(box_deviation(count, volume(faces), n));
    });
    best
}

/// The same enumeration for `s <= 2`, with counts read from a prefix grid over coordinate ranks.
pub fn discrepancy_by_grid(ps: &PointSet) -> f64 {
    assert!(ps.dim() <= 2);
    let n = ps.len();
    let ranks: Vec<Vec<f64>> = (0..ps.dim())
        .map(|d| {
            let mut v: Vec<f64> = ps.points().iter().map(|p| p[d]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let rank_of = |d: usize, x: f64| ranks[d].partition_point(|&y| y < x);
    let k0 = ranks[0].len();
    let k1 = if ps.dim() == 2 { ranks[1].len() } else { 1 };
    // prefix[i][j] = points with rank0 < i and rank1 < j
    let mut prefix = vec![vec![0usize; k1 + 1]; k0 + 1];
    for pt in ps.points() {
        let r0 = rank_of(0, pt[0]);
        let r1 = if ps.dim() == 2 { rank_of(1, pt[1]) } else { 0 };
        prefix[r0 + 1][r1 + 1] += 1;
    }
    for i in 1..=k0 {
        for j in 1..=k1 {
            prefix[i][j] += prefix[i - 1][j] + prefix[i][j - 1] - prefix[i - 1][j - 1];
        }
    }
    let range = |d: usize, f: &Face| -> (usize, usize) {
        let r = &ranks[d];
        let start = if f.lo_closed {
            r.partition_point(|&y| y < f.lo)
        } else {
            r.partition_point(|&y| y <= f.lo)
        };
        let end = if f.hi_closed {
            r.partition_point(|&y| y <= f.hi)
        } else {
            r.partition_point(|&y| y < f.hi)
        };
        (start, end.max(start))
    };
    let mut best = 0.0f64;
    for_each_box(ps, |faces| {
        let (a0, b0) = range(0, &faces[0]);
        let (a1, b1) = if ps.dim() == 2 { range(1, &faces[1]) } else { (0, 1) };
        let count = prefix[b0][b1] + prefix[a0][a1] - prefix[a0][b1] - prefix[b0][a1];
        best = best.max(box_deviation(count, volume(faces), n));
    });
    best
}

/// Point set of `n` points in `[0,1)^s` drawn from one of three styles: a
/// coarse dyadic grid (many ties), multiples of `1/p`, or uniform doubles.
pub fn random_point_set(rng: &mut impl Rng, s: usize, n: usize, style: usize) -> PointSet {
    let points = (0..n)
        .map(|_| {
            (0..s)
                .map(|_| match style % 3 {
                    0 => rng.gen_range(0..16) as f64 / 16.0,
                    1 => rng.gen_range(0..13) as f64 / 13.0,
                    _ => rng.gen::<f64>(),
                })
                .collect()
        })
        .collect();
    PointSet::new(points).unwrap()
}

/// Smallest `L <= max_l` admitting a relation, found by trying every
/// coefficient tuple; `None` if there is none up to `max_l`.
pub fn linear_complexity_by_search(seq: &[Vec<u64>], p: u64, max_l: usize) -> Option<usize> {
    let m = seq[0].len();
    let n = seq.len();
    for l in 0..=max_l {
        let unknowns = m * (l + 1);
        let total = (p as u128).pow(unknowns as u32) as u64;
        let mut c = vec![0u64; unknowns];
        for idx in 0..total {
            space::point_at(idx, p, &mut c);
            if c[m * l..].iter().all(|&x| x == 0) {
                continue;
            }
            let holds = (0..n.saturating_sub(l)).all(|w| {
                let mut acc = 0u64;
                for h in 0..=l {
                    for k in 0..m {
                        acc = (acc + c[h * m + k] * seq[w + h][k]) % p;
                    }
                }
                acc == 0
            });
            if holds {
                return Some(l);
            }
        }
    }
    None
}

/// The same system with its last row replaced by `X_m -> gm X_m + hm`.
pub fn with_last_row(sys: &TriangularSystem, gm: u64, hm: u64) -> TriangularSystem {
    let m = sys.m();
    TriangularSystem::new(
        sys.shape().clone(),
        sys.modulus(),
        (0..m).map(|i| sys.g(i).clone()).collect(),
        (0..m).map(|i| sys.h(i).clone()).collect(),
        gm,
        hm,
    )
    .unwrap()
}
