//! Exponential sums along orbits, their second moments over all initial
//! vectors, box discrepancy and the Erdos-Turan-Koksma bound.
//!
//! Character arguments are formed exactly in `F_p` (or `Z/M`) before the
//! complex exponential is taken, and every accumulation goes through
//! [`CompensatedSum`], so results are reproducible for fixed inputs.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::field::{CharTable, Prime, TABLE_LIMIT};
use crate::orbit::{self, OrbitState};
use crate::space;
use crate::system::SystemFamily;
use crate::{Error, Result};

/// Default cap on `p^{m+1} * N` for the averaged sums.
pub const DEFAULT_SWEEP_BUDGET: u128 = 100_000_000;

/// Kahan-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        let (re, cre) = kahan(self.sum.re, self.carry.re, z.re);
        let (im, cim) = kahan(self.sum.im, self.carry.im, z.im);
        self.sum = Complex64::new(re, im);
        self.carry = Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

#[inline]
fn kahan(sum: f64, carry: f64, x: f64) -> (f64, f64) {
    let y = x - carry;
    let t = sum + y;
    (t, (t - sum) - y)
}

fn compensated_real(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(Complex64::new(v, 0.0));
    }
    acc.value().re
}

/// A complex character sum over `n` unit-modulus terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: Complex64,
    pub n: usize,
}

impl SumResult {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// The trivial bound `|value| <= n`.
    pub fn trivial_bound(&self) -> f64 {
        self.n as f64
    }
}

fn char_table(modulus: u64, uses: usize) -> CharTable {
    if modulus <= TABLE_LIMIT && modulus <= 4 * uses as u64 + 64 {
        CharTable::new(modulus)
    } else {
        // the table stays empty and roots are computed on demand
        CharTable::new_direct(modulus)
    }
}

fn reduce_coeffs(p: Prime, coeffs: &[i64]) -> Vec<u64> {
    coeffs.iter().map(|&c| p.reduce_i64(c)).collect()
}

#[inline]
fn dot(p: Prime, coeffs: &[u64], w: &[u64]) -> u64 {
    coeffs
        .iter()
        .zip(w)
        .fold(0, |acc, (&c, &x)| p.add(acc, p.mul(c, x)))
}

fn linear_sum(states: &[OrbitState], coeffs: &[i64], n: usize, p: Prime, width: usize) -> Result<SumResult> {
    if n > states.len() {
        return Err(Error::LengthShortfall {
            available: states.len(),
            requested: n,
        });
    }
    if let Some(s) = states.first() {
        if coeffs.len() != width.min(s.w.len()) || (width < s.w.len() && width + 1 != s.w.len()) {
            return Err(Error::ArityMismatch {
                expected: if width < s.w.len() { s.w.len() - 1 } else { s.w.len() },
                got: coeffs.len(),
            });
        }
    }
    let c = reduce_coeffs(p, coeffs);
    let table = char_table(p.get(), n);
    let mut acc = CompensatedSum::new();
    for s in &states[..n] {
        acc.add(table.at_residue(dot(p, &c, &s.w)).as_complex());
    }
    Ok(SumResult { value: acc.value(), n })
}

/// `S_a(N) = sum_{n<N} e_p(a_0 u_{n,0} + ... + a_{m-1} u_{n,m-1})` over the
/// truncated vectors.
pub fn sum_s(states: &[OrbitState], a: &[i64], n: usize, p: Prime) -> Result<SumResult> {
    let m = states.first().map_or(a.len(), |s| s.w.len() - 1);
    linear_sum(states, a, n, p, m)
}

/// `T_b(N)`: as [`sum_s`] over all `m + 1` coordinates.
pub fn sum_t(states: &[OrbitState], b: &[i64], n: usize, p: Prime) -> Result<SumResult> {
    let width = states.first().map_or(b.len(), |s| s.w.len());
    linear_sum(states, b, n, p, width)
}

/// `|S| / (N^{1 - beta} p^alpha)`, for inspecting measured sums against a
/// bound shape. Nothing is asserted about its size.
pub fn bound_ratio(sum: &SumResult, p: Prime, alpha: f64, beta: f64) -> f64 {
    let scale = libm::pow(sum.n as f64, 1.0 - beta) * libm::pow(p.get() as f64, alpha);
    sum.modulus() / scale
}

/// Which averaged sum: `U` over the first `m` coordinates, `V` over all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AvgKind {
    U,
    V,
}

/// Parameters of `U_{a,c}(M, N)` or `V_{b,c}(M, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvgSumSpec {
    pub kind: AvgKind,
    pub coeffs: Vec<i64>,
    pub c: i64,
    pub big_m: u64,
    pub n: usize,
}

impl AvgSumSpec {
    fn full_coeffs(&self, family: &SystemFamily) -> Result<Vec<u64>> {
        let arity = family.arity();
        let want = match self.kind {
            AvgKind::U => arity - 1,
            AvgKind::V => arity,
        };
        if self.coeffs.len() != want {
            return Err(Error::ArityMismatch {
                expected: want,
                got: self.coeffs.len(),
            });
        }
        if self.big_m == 0 || self.n == 0 {
            return Err(Error::InvalidArgument("M and N must be positive".into()));
        }
        let mut c = reduce_coeffs(family.modulus(), &self.coeffs);
        c.resize(arity, 0);
        Ok(c)
    }

    /// Checks `p^{m+1} * N <= budget` and returns the number of initial vectors.
    pub fn check_budget(&self, family: &SystemFamily, budget: u128) -> Result<u64> {
        let vectors = space::size(family.modulus().get(), family.arity()).unwrap_or(u128::MAX);
        let work = vectors.saturating_mul(self.n as u128);
        if work > budget {
            return Err(Error::GuardExceeded { size: work, guard: budget });
        }
        Ok(vectors as u64)
    }
}

/// Precomputed pieces shared by all initial vectors of one averaged sum.
#[derive(Debug, Clone)]
pub struct AvgSumKernel<'a> {
    family: &'a SystemFamily,
    coeffs: Vec<u64>,
    twist: Vec<Complex64>,
    table: CharTable,
}

impl<'a> AvgSumKernel<'a> {
    pub fn new(family: &'a SystemFamily, spec: &AvgSumSpec) -> Result<Self> {
        let coeffs = spec.full_coeffs(family)?;
        if family.cycle_len().is_none() {
            // explicit schedules must cover steps 1..N-1
            family.member_index(spec.n.saturating_sub(1).max(1) as u64)?;
        }
        let m_table = CharTable::new_direct(spec.big_m);
        let twist = (0..spec.n)
            .map(|n| {
                let r = ((spec.c as i128) * (n as i128)).rem_euclid(spec.big_m as i128) as u64;
                m_table.at_residue(r).as_complex()
            })
            .collect();
        Ok(AvgSumKernel {
            family,
            coeffs,
            twist,
            table: CharTable::new(family.modulus().get()),
        })
    }

    /// `|sum_{n<N} e_p(b . F^{(n)}(v)) e_M(c n)|^2` for the initial vector with index `idx`.
    pub fn term(&self, idx: u64) -> f64 {
        let p = self.family.modulus();
        let arity = self.family.arity();
        let mut w = vec![0u64; arity];
        let mut next = vec![0u64; arity];
        space::point_at(idx, p.get(), &mut w);
        let mut acc = CompensatedSum::new();
        for (n, tw) in self.twist.iter().enumerate() {
            if n > 0 {
                let sys = self
                    .family
                    .member_for_step(n as u64)
                    .expect("schedule checked at construction");
                sys.apply_into(&w, &mut next);
                core::mem::swap(&mut w, &mut next);
            }
            let e = self.table.at_residue(dot(p, &self.coeffs, &w)).as_complex();
            acc.add(e * tw);
        }
        acc.value().norm_sqr()
    }

}

/// Reduction used for every averaged sum: compensated, in index order.
pub fn reduce_terms(terms: &[f64]) -> f64 {
    compensated_real(terms.iter().copied())
}

/// `U_{a,c}(M, N)` or `V_{b,c}(M, N)` by running the orbit from every initial vector.
pub fn avg_sum(family: &SystemFamily, spec: &AvgSumSpec, budget: u128) -> Result<f64> {
    let vectors = spec.check_budget(family, budget)?;
    let kernel = AvgSumKernel::new(family, spec)?;
    let terms: Vec<f64> = (0..vectors).map(|i| kernel.term(i)).collect();
    Ok(reduce_terms(&terms))
}

pub fn sum_u(family: &SystemFamily, a: &[i64], c: i64, big_m: u64, n: usize, budget: u128) -> Result<f64> {
    let spec = AvgSumSpec {
        kind: AvgKind::U,
        coeffs: a.to_vec(),
        c,
        big_m,
        n,
    };
    avg_sum(family, &spec, budget)
}

pub fn sum_v(family: &SystemFamily, b: &[i64], c: i64, big_m: u64, n: usize, budget: u128) -> Result<f64> {
    let spec = AvgSumSpec {
        kind: AvgKind::V,
        coeffs: b.to_vec(),
        c,
        big_m,
        n,
    };
    avg_sum(family, &spec, budget)
}

/// `X[k][n] = sum_{v in F_p^{m+1}} e_p(b . (F^{(k)}(v) - F^{(n)}(v)))` for `k, n < N`.
pub fn cross_sums(family: &SystemFamily, b: &[i64], n: usize, budget: u128) -> Result<Vec<Vec<Complex64>>> {
    let spec = AvgSumSpec {
        kind: AvgKind::V,
        coeffs: b.to_vec(),
        c: 0,
        big_m: 1,
        n,
    };
    let vectors = spec.check_budget(family, budget)?;
    let coeffs = spec.full_coeffs(family)?;
    let p = family.modulus();
    let table = CharTable::new(p.get());
    let mut acc = vec![vec![CompensatedSum::new(); n]; n];
    let mut w0 = vec![0u64; family.arity()];
    let mut forms = vec![0u64; n];
    for idx in 0..vectors {
        space::point_at(idx, p.get(), &mut w0);
        let orbit = orbit::generate(family, &w0, n)?;
        for (slot, s) in forms.iter_mut().zip(&orbit) {
            *slot = dot(p, &coeffs, &s.w);
        }
        for k in 0..n {
            for j in 0..n {
                acc[k][j].add(table.at_residue(p.sub(forms[k], forms[j])).as_complex());
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.value()).collect())
        .collect())
}

/// `sum_{k,n} e_M(c (k - n)) X[k][n]`, which equals `V_{b,c}(M, N)` after
/// expanding the square.
pub fn avg_sum_from_cross(cross: &[Vec<Complex64>], c: i64, big_m: u64) -> f64 {
    let table = CharTable::new_direct(big_m);
    let mut acc = CompensatedSum::new();
    for (k, row) in cross.iter().enumerate() {
        for (n, x) in row.iter().enumerate() {
            let d = (c as i128) * (k as i128 - n as i128);
            let r = d.rem_euclid(big_m as i128) as u64;
            acc.add(table.at_residue(r).as_complex() * x);
        }
    }
    acc.value().re
}

/// `V_{b,c}(M, N)` for `b = (0, ..., 0, b_m)` rebuilt from the last row alone.
///
/// With a shared `g_m`, `F_m^{(k)} - F_m^{(n)} = (g_m^k - g_m^n) X_m + d_k - d_n`,
/// so a cross pair sums to `p^{m+1} e_p(b_m (d_k - d_n))` when
/// `k = n (mod t)`, `t` the order of `g_m`, and to zero otherwise.
pub fn last_row_reconstruction(family: &SystemFamily, b_m: i64, c: i64, big_m: u64, n: usize) -> Result<f64> {
    let gm = family
        .shared_gm()
        .ok_or_else(|| Error::InvalidArgument("members do not share g_m".into()))?;
    let p = family.modulus();
    let t = p.mult_order(gm)? as usize;
    let b = p.reduce_i64(b_m);
    // d_k = F_m^{(k)}(0)
    let mut d = Vec::with_capacity(n);
    let mut cur = 0u64;
    for k in 0..n {
        if k > 0 {
            let sys = family.member_for_step(k as u64)?;
            cur = p.add(p.mul(sys.gm(), cur), sys.hm());
        }
        d.push(cur);
    }
    let volume = space::size(p.get(), family.arity()).unwrap_or(u128::MAX) as f64;
    let ep = CharTable::new_direct(p.get());
    let em = CharTable::new_direct(big_m);
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        for j in (k % t..n).step_by(t) {
            let twist = ((c as i128) * (k as i128 - j as i128)).rem_euclid(big_m as i128) as u64;
            let phase = p.mul(b, p.sub(d[k], d[j]));
            acc.add(em.at_residue(twist).as_complex() * ep.at_residue(phase).as_complex());
        }
    }
    Ok(volume * acc.value().re)
}

/// Number of pairs `0 <= k, n < N` with `k = n (mod t)`.
pub fn matching_pairs(n: usize, t: usize) -> usize {
    (0..t.min(n))
        .map(|r| {
            let cnt = (n - r).div_ceil(t);
            cnt * cnt
        })
        .sum()
}

/// `N` points in `[0, 1)^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    s: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("point set is empty".into()));
        };
        let s = first.len();
        if s == 0 {
            return Err(Error::InvalidArgument("points have dimension 0".into()));
        }
        for pt in &points {
            if pt.len() != s {
                return Err(Error::ArityMismatch {
                    expected: s,
                    got: pt.len(),
                });
            }
            if pt.iter().any(|x| !(0.0..1.0).contains(x)) {
                return Err(Error::InvalidArgument("coordinate outside [0, 1)".into()));
            }
        }
        Ok(PointSet { s, points })
    }

    /// The chosen coordinates of each state, scaled by `1/p`.
    pub fn from_orbit(states: &[OrbitState], coords: &[usize], p: Prime) -> Result<Self> {
        let scale = p.get() as f64;
        let mut points = Vec::with_capacity(states.len());
        for st in states {
            let mut pt = Vec::with_capacity(coords.len());
            for &j in coords {
                let x = *st.w.get(j).ok_or(Error::VariableOutOfRange {
                    index: j,
                    arity: st.w.len(),
                })?;
                pt.push(x as f64 / scale);
            }
            points.push(pt);
        }
        Self::new(points)
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Largest dimension and size accepted by [`discrepancy_exact`].
pub const DISCREPANCY_MAX_DIM: usize = 3;
pub const DISCREPANCY_MAX_POINTS: usize = 512;

/// `|count - N * volume| / N`: the deviation of a box, in the form shared with
/// every other discrepancy routine so equal boxes give identical values.
#[inline]
pub fn box_deviation(count: usize, volume: f64, n: usize) -> f64 {
    (count as f64 - n as f64 * volume).abs() / n as f64
}

/// Extreme discrepancy `sup_B |#(B)/N - vol(B)|` over boxes
/// `[a_1, b_1) x ... x [a_s, b_s)` in `[0, 1)^s`.
///
/// Over-counts are maximised over boxes closed on point coordinates (the limit
/// of half-open boxes shrinking onto points); under-counts over boxes open on
/// point coordinates or on `0`, `1`. The outer dimensions are enumerated, the
/// last one is an O(K) sweep.
pub fn discrepancy_exact(ps: &PointSet) -> Result<f64> {
    if ps.dim() > DISCREPANCY_MAX_DIM || ps.len() > DISCREPANCY_MAX_POINTS {
        return Err(Error::GuardExceeded {
            size: (ps.dim() as u128) << 32 | ps.len() as u128,
            guard: (DISCREPANCY_MAX_DIM as u128) << 32 | DISCREPANCY_MAX_POINTS as u128,
        });
    }
    let last = ps.dim() - 1;
    let mut pts: Vec<&[f64]> = ps.points().iter().map(|p| &p[..]).collect();
    pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut best = Best::default();
    over_count(&pts, 0, 1.0, ps.len(), &mut best);
    under_count(&pts, 0, 1.0, ps.len(), &mut best);
    Ok(best.value)
}

#[derive(Default)]
struct Best {
    value: f64,
}

impl Best {
    fn offer(&mut self, count: usize, volume: f64, n: usize) {
        let v = box_deviation(count, volume, n);
        if v > self.value {
            self.value = v;
        }
    }
}

fn distinct_sorted(pts: &[&[f64]], dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = pts.iter().map(|p| p[dim]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

// Boxes closed on both sides at coordinates of the current points.
fn over_count(pts: &[&[f64]], dim: usize, volume: f64, n: usize, best: &mut Best) {
    if pts.is_empty() {
        return;
    }
    let s = pts[0].len();
    if dim + 1 == s {
        // pts is sorted by the last coordinate
        let (vals, counts) = runs(pts, dim);
        let mut before = Vec::with_capacity(vals.len() + 1);
        before.push(0usize);
        for &c in &counts {
            before.push(before.last().copied().unwrap_or(0) + c);
        }
        // closed [vals[a], vals[b]] holds before[b + 1] - before[a] points
        let scale = n as f64 * volume;
        let mut lows = LowEnds::new(n);
        for b in 0..vals.len() {
            lows.offer(b, before[b] as f64 - scale * vals[b]);
            for &a in lows.candidates() {
                best.offer(before[b + 1] - before[a], volume * (vals[b] - vals[a]), n);
            }
        }
        return;
    }
    let vals = distinct_sorted(pts, dim);
    for (a, &lo) in vals.iter().enumerate() {
        for &hi in &vals[a..] {
            let inside: Vec<&[f64]> = pts
                .iter()
                .copied()
                .filter(|p| lo <= p[dim] && p[dim] <= hi)
                .collect();
            over_count(&inside, dim + 1, volume * (hi - lo), n, best);
        }
    }
}

// Boxes open on both sides, with ends at 0, 1 or coordinates of the current points.
fn under_count(pts: &[&[f64]], dim: usize, volume: f64, n: usize, best: &mut Best) {
    let s = match pts.first() {
        Some(p) => p.len(),
        None => {
            best.offer(0, volume, n);
            return;
        }
    };
    if dim + 1 == s {
        let (vals, counts) = runs(pts, dim);
        let mut ends = Vec::with_capacity(vals.len() + 2);
        ends.push(0.0);
        ends.extend_from_slice(&vals);
        ends.push(1.0);
        // at_most[j] points lie at or below ends[j] (ends[0] = 0 counts as empty)
        let mut at_most = vec![0usize; ends.len()];
        for j in 1..ends.len() - 1 {
            at_most[j] = at_most[j - 1] + counts[j - 1];
        }
        let last = ends.len() - 1;
        at_most[last] = at_most[last - 1];
        // open (ends[a], ends[b]) holds at_most[b - 1] - at_most[a] points
        let scale = n as f64 * volume;
        let mut lows = LowEnds::new(n);
        for b in 1..ends.len() {
            lows.offer(b - 1, scale * ends[b - 1] - at_most[b - 1] as f64);
            for &a in lows.candidates() {
                best.offer(at_most[b - 1] - at_most[a], volume * (ends[b] - ends[a]), n);
            }
        }
        return;
    }
    let vals = distinct_sorted(pts, dim);
    let mut lows = vec![0.0];
    lows.extend_from_slice(&vals);
    let mut highs = vals.clone();
    highs.push(1.0);
    for &lo in &lows {
        for &hi in highs.iter().filter(|&&h| h > lo) {
            let inside: Vec<&[f64]> = pts
                .iter()
                .copied()
                .filter(|p| lo < p[dim] && p[dim] < hi)
                .collect();
            under_count(&inside, dim + 1, volume * (hi - lo), n, best);
        }
    }
}

// Lower ends minimising a sweep key. Keys within rounding of the minimum are
// all kept so the final comparison happens on the exact box deviation.
struct LowEnds {
    min: f64,
    tol: f64,
    idx: Vec<usize>,
}

impl LowEnds {
    fn new(n: usize) -> Self {
        LowEnds {
            min: f64::INFINITY,
            tol: 64.0 * f64::EPSILON * (n as f64 + 1.0),
            idx: Vec::new(),
        }
    }

    fn offer(&mut self, i: usize, key: f64) {
        if key < self.min - self.tol {
            self.idx.clear();
            self.idx.push(i);
            self.min = key;
        } else if key <= self.min + self.tol {
            self.idx.push(i);
            self.min = self.min.min(key);
        }
    }

    fn candidates(&self) -> &[usize] {
        &self.idx
    }
}

// Distinct values of a sorted coordinate with multiplicities.
fn runs(pts: &[&[f64]], dim: usize) -> (Vec<f64>, Vec<usize>) {
    let mut vals: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for p in pts {
        match vals.last() {
            Some(&v) if v == p[dim] => *counts.last_mut().expect("parallel") += 1,
            _ => {
                vals.push(p[dim]);
                counts.push(1);
            }
        }
    }
    (vals, counts)
}

/// `sum_n exp(2 pi i h . gamma_n)`.
pub fn weyl_sum(ps: &PointSet, h: &[i64]) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for pt in ps.points() {
        let mut turns = 0.0;
        for (&hj, &x) in h.iter().zip(pt) {
            turns += hj as f64 * x;
        }
        turns -= libm::floor(turns);
        acc.add(crate::field::UnitComplex::from_turns(turns).as_complex());
    }
    acc.value()
}

/// `(3/2)^s`, the default constant for [`etk_bound`].
pub fn default_etk_constant(s: usize) -> f64 {
    libm::pow(1.5, s as f64)
}

/// `C_s (1/H + (1/N) sum_{0 < |h|_inf <= H} prod_j (|h_j| + 1)^{-1} |sum_n e(h . gamma_n)|)`.
pub fn etk_bound(ps: &PointSet, big_h: u32, c_s: f64) -> Result<f64> {
    if big_h < 2 {
        return Err(Error::InvalidArgument("H must be at least 2".into()));
    }
    let s = ps.dim();
    let side = 2 * big_h as u64 + 1;
    let total = space::size(side, s).ok_or(Error::Overflow("etk frequency count"))? as u64;
    let mut h = vec![0i64; s];
    let mut digits = vec![0u64; s];
    let mut acc = CompensatedSum::new();
    for idx in 0..total {
        space::point_at(idx, side, &mut digits);
        for (hj, &d) in h.iter_mut().zip(&digits) {
            *hj = d as i64 - big_h as i64;
        }
        if h.iter().all(|&x| x == 0) {
            continue;
        }
        let weight: f64 = h.iter().map(|&x| 1.0 / (x.unsigned_abs() as f64 + 1.0)).product();
        acc.add(Complex64::new(weight * weyl_sum(ps, &h).norm(), 0.0));
    }
    Ok(c_s * (1.0 / big_h as f64 + acc.value().re / ps.len() as f64))
}
