//! Triangular polynomial systems, their families, and symbolic iteration.
//!
//! A system of shape `S` has components
//!
//! ```text
//! F_i = X_i * G_i(X_{i+1}, ..., X_m) + H_i(X_{i+1}, ..., X_m),   0 <= i < m
//! F_m = g_m * X_m + h_m,                                          g_m != 0
//! ```
//!
//! where `G_i` carries the leading monomial `X_{i+1}^{s_{i,i+1}} ... X_m^{s_{i,m}}`,
//! every other term of `G_i` has `deg_{X_j} < s_{i,j}` for all `j`, and
//! `deg_{X_j} H_i <= s_{i,j}`. Under these conditions the degrees of the iterates
//! follow `(1 + deg G~_{k,i})_i = S^k * (1, ..., 1)` exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::Prime;
use crate::poly::{Degree, MultiPoly};
use crate::space;
use crate::{Error, Result};

/// Default term cap for symbolic iteration.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Default cap on `p^{m+1}` for exhaustive permutation checks.
pub const DEFAULT_PERMUTATION_GUARD: u128 = 10_000_000;

/// Unit upper triangular exponent matrix of size `(m+1) x (m+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShapeMatrix {
    rows: Vec<Vec<u64>>,
}

impl ShapeMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidShape("matrix is empty".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidShape(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row[i] != 1 {
                return Err(Error::InvalidShape(format!("diagonal entry {i} is {}", row[i])));
            }
            if let Some(j) = (0..i).find(|&j| row[j] != 0) {
                return Err(Error::InvalidShape(format!(
                    "entry ({i},{j}) below the diagonal is nonzero"
                )));
            }
        }
        Ok(ShapeMatrix { rows })
    }

    /// Shape with the given superdiagonal and zeros elsewhere above it.
    pub fn bidiagonal(superdiag: &[u64]) -> Self {
        let n = superdiag.len() + 1;
        let mut rows = vec![vec![0; n]; n];
        for i in 0..n {
            rows[i][i] = 1;
            if i + 1 < n {
                rows[i][i + 1] = superdiag[i];
            }
        }
        ShapeMatrix { rows }
    }

    pub fn m(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `s_{0,1} * s_{1,2} * ... * s_{m-1,m}`.
    pub fn superdiagonal_product(&self) -> u128 {
        (0..self.m()).map(|i| self.rows[i][i + 1] as u128).product()
    }

    /// `S^k * (1, ..., 1)`: the predicted `1 + deg G~_{k,i}` for each `i`.
    pub fn predicted_degrees(&self, k: u64) -> Result<Vec<u128>> {
        let n = self.rows.len();
        let mut d = vec![1u128; n];
        for _ in 0..k {
            let mut next = vec![0u128; n];
            for (i, out) in next.iter_mut().enumerate() {
                let mut acc = 0u128;
                for (j, &dj) in d.iter().enumerate().skip(i) {
                    let t = (self.rows[i][j] as u128)
                        .checked_mul(dj)
                        .ok_or(Error::Overflow("predicted degrees"))?;
                    acc = acc.checked_add(t).ok_or(Error::Overflow("predicted degrees"))?;
                }
                *out = acc;
            }
            d = next;
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    G,
    H,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::G => "G",
            Part::H => "H",
        })
    }
}

/// A single failed membership condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    /// `G_i` or `H_i` involves `X_var` with `var <= i`.
    Support { level: usize, part: Part, var: usize },
    /// The leading monomial of `G_i` has coefficient zero.
    MissingLeadingMonomial { level: usize },
    /// A non-leading term of `G_i` reaches `deg_{X_var} >= s_{i,var}`.
    LeadingNotUnique {
        level: usize,
        var: usize,
        degree: u64,
        bound: u64,
    },
    /// `deg_{X_var} H_i > s_{i,var}`.
    HDegree {
        level: usize,
        var: usize,
        degree: u64,
        bound: u64,
    },
    ZeroLastCoefficient,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Support { level, part, var } => write!(
                f,
                "support: {part}_{level} involves X{var}, only X{} and later are allowed",
                level + 1
            ),
            Violation::MissingLeadingMonomial { level } => write!(
                f,
                "leading monomial: G_{level} lacks its leading monomial (g_{level} = 0)"
            ),
            Violation::LeadingNotUnique {
                level,
                var,
                degree,
                bound,
            } => write!(
                f,
                "unique leading monomial: a lower term of G_{level} has deg_X{var} = {degree} >= s_{{{level},{var}}} = {bound}"
            ),
            Violation::HDegree {
                level,
                var,
                degree,
                bound,
            } => write!(
                f,
                "H degree bound: deg_X{var} H_{level} = {degree} > s_{{{level},{var}}} = {bound}"
            ),
            Violation::ZeroLastCoefficient => f.write_str("last row: g_m must be nonzero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// One system `(F_0, ..., F_m)` stored as its constituents `G_i`, `H_i`,
/// `g_m`, `h_m`. Construction checks only structure; class membership is
/// reported by [`validate`](TriangularSystem::validate).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangularSystem {
    shape: ShapeMatrix,
    modulus: Prime,
    g: Vec<MultiPoly>,
    h: Vec<MultiPoly>,
    gm: u64,
    hm: u64,
}

impl TriangularSystem {
    pub fn new(
        shape: ShapeMatrix,
        modulus: Prime,
        g: Vec<MultiPoly>,
        h: Vec<MultiPoly>,
        gm: u64,
        hm: u64,
    ) -> Result<Self> {
        let m = shape.m();
        if g.len() != m || h.len() != m {
            return Err(Error::InvalidSystem(format!(
                "expected {m} G and H polynomials, got {} and {}",
                g.len(),
                h.len()
            )));
        }
        for poly in g.iter().chain(&h) {
            if poly.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), poly.modulus().get()));
            }
            if poly.arity() != m + 1 {
                return Err(Error::ArityMismatch {
                    expected: m + 1,
                    got: poly.arity(),
                });
            }
        }
        Ok(TriangularSystem {
            shape,
            modulus,
            g,
            h,
            gm: gm % modulus.get(),
            hm: hm % modulus.get(),
        })
    }

    /// Convenience constructor from polynomial text, one `G_i` and `H_i` per level.
    pub fn parse(
        shape: ShapeMatrix,
        modulus: Prime,
        g: &[&str],
        h: &[&str],
        gm: u64,
        hm: u64,
    ) -> Result<Self> {
        let arity = shape.m() + 1;
        let parse_all = |texts: &[&str]| -> Result<Vec<MultiPoly>> {
            texts
                .iter()
                .map(|t| MultiPoly::parse(t, modulus, arity))
                .collect()
        };
        let g = parse_all(g)?;
        let h = parse_all(h)?;
        Self::new(shape, modulus, g, h, gm, hm)
    }

    pub fn m(&self) -> usize {
        self.shape.m()
    }

    pub fn arity(&self) -> usize {
        self.shape.m() + 1
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn shape(&self) -> &ShapeMatrix {
        &self.shape
    }

    pub fn g(&self, i: usize) -> &MultiPoly {
        &self.g[i]
    }

    pub fn h(&self, i: usize) -> &MultiPoly {
        &self.h[i]
    }

    pub fn gm(&self) -> u64 {
        self.gm
    }

    pub fn hm(&self) -> u64 {
        self.hm
    }

    fn leading_exponents(&self, i: usize) -> Vec<u32> {
        let mut e = vec![0u32; self.arity()];
        for (j, slot) in e.iter_mut().enumerate().skip(i + 1) {
            *slot = self.shape.entry(i, j) as u32;
        }
        e
    }

    /// The coefficient `g_i` of the leading monomial of `G_i`.
    pub fn leading_coefficient(&self, i: usize) -> u64 {
        self.g[i].coeff(&self.leading_exponents(i))
    }

    /// `F_i` as a polynomial in `X_0, ..., X_m`.
    pub fn component(&self, i: usize) -> MultiPoly {
        let p = self.modulus;
        let arity = self.arity();
        let xi = MultiPoly::var(p, arity, i).expect("index in range");
        if i == self.m() {
            return xi
                .scale(self.gm)
                .add(&MultiPoly::constant(p, arity, self.hm))
                .expect("same ring");
        }
        xi.mul(&self.g[i])
            .and_then(|t| t.add(&self.h[i]))
            .expect("same ring")
    }

    pub fn components(&self) -> Vec<MultiPoly> {
        (0..self.arity()).map(|i| self.component(i)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let m = self.m();
        for i in 0..m {
            for (part, poly) in [(Part::G, &self.g[i]), (Part::H, &self.h[i])] {
                for var in 0..=i {
                    if poly.uses_var(var) {
                        violations.push(Violation::Support {
                            level: i,
                            part,
                            var,
                        });
                    }
                }
            }
            let lead = self.leading_exponents(i);
            if self.g[i].coeff(&lead) == 0 {
                violations.push(Violation::MissingLeadingMonomial { level: i });
            }
            for j in i + 1..=m {
                let bound = self.shape.entry(i, j);
                let lower = self.g[i]
                    .terms()
                    .filter(|(mono, _)| mono.exponents() != &lead[..])
                    .map(|(mono, _)| mono.exponents()[j] as u64)
                    .max();
                if let Some(degree) = lower.filter(|&d| d >= bound) {
                    violations.push(Violation::LeadingNotUnique {
                        level: i,
                        var: j,
                        degree,
                        bound,
                    });
                }
                if let Degree::Finite(degree) = self.h[i].degree_in(j) {
                    if degree > bound {
                        violations.push(Violation::HDegree {
                            level: i,
                            var: j,
                            degree,
                            bound,
                        });
                    }
                }
            }
        }
        if self.gm == 0 {
            violations.push(Violation::ZeroLastCoefficient);
        }
        ValidationReport { violations }
    }

    /// `(F_0(w), ..., F_m(w))`.
    pub fn apply(&self, w: &[u64]) -> Vec<u64> {
        let mut out = vec![0; w.len()];
        self.apply_into(w, &mut out);
        out
    }

    pub fn apply_into(&self, w: &[u64], out: &mut [u64]) {
        debug_assert_eq!(w.len(), self.arity());
        let p = self.modulus;
        let m = self.m();
        for i in 0..m {
            let g = self.g[i].eval_unchecked(w);
            let h = self.h[i].eval_unchecked(w);
            out[i] = p.add(p.mul(w[i], g), h);
        }
        out[m] = p.add(p.mul(self.gm, w[m]), self.hm);
    }

    /// Bijectivity of `w -> F(w)` on `F_p^{m+1}`.
    ///
    /// Uses the triangular criterion (`g_m != 0` and no `G_i` vanishes on
    /// `F_p^{m-i}`), then searches for a colliding pair when it fails.
    pub fn is_permutation(&self, guard: u128) -> Result<PermutationReport> {
        space::guarded_size(self.modulus.get(), self.arity(), guard)?;
        if self.triangular_criterion() {
            return Ok(PermutationReport {
                bijective: true,
                witness: None,
            });
        }
        let witness = find_collision(self, guard)?;
        Ok(PermutationReport {
            bijective: false,
            witness,
        })
    }

    fn triangular_criterion(&self) -> bool {
        if self.gm == 0 {
            return false;
        }
        let p = self.modulus.get();
        let arity = self.arity();
        let mut w = vec![0u64; arity];
        for i in 0..self.m() {
            let tail = arity - i - 1;
            let total = space::size(p, tail).expect("guarded") as u64;
            for idx in 0..total {
                space::point_at(idx, p, &mut w[i + 1..]);
                if self.g[i].eval_unchecked(&w) == 0 {
                    return false;
                }
            }
            w.iter_mut().for_each(|x| *x = 0);
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationReport {
    pub bijective: bool,
    /// Two distinct points with the same image, when not bijective.
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
}

/// Exhaustive injectivity check: the first pair of points (in enumeration
/// order) sharing an image, or `None` if the map is a bijection.
pub fn find_collision(sys: &TriangularSystem, guard: u128) -> Result<Option<(Vec<u64>, Vec<u64>)>> {
    let p = sys.modulus().get();
    let arity = sys.arity();
    let total = space::guarded_size(p, arity, guard)?;
    let mut seen: Vec<u64> = vec![u64::MAX; total as usize];
    let mut w = vec![0u64; arity];
    let mut img = vec![0u64; arity];
    for idx in 0..total {
        space::point_at(idx, p, &mut w);
        sys.apply_into(&w, &mut img);
        let slot = &mut seen[space::index_of(&img, p) as usize];
        if *slot != u64::MAX {
            let mut first = vec![0; arity];
            space::point_at(*slot, p, &mut first);
            return Ok(Some((first, w)));
        }
        *slot = idx;
    }
    Ok(None)
}

/// Rule choosing the member applied at step `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Member 0 at every step.
    Constant,
    /// Member `(k - 1) mod len` at step `k`.
    Cyclic,
    /// Member `list[k - 1]` at step `k`; undefined past the end.
    Explicit(Vec<usize>),
}

/// Members sharing shape and modulus, plus the schedule that sequences them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFamily {
    members: Vec<TriangularSystem>,
    schedule: Schedule,
}

impl SystemFamily {
    /// Fails with [`Error::InvalidSystem`] if a member is not in the class.
    pub fn new(members: Vec<TriangularSystem>, schedule: Schedule) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidSystem("family has no members".into()));
        };
        for (idx, sys) in members.iter().enumerate() {
            if sys.shape() != first.shape() || sys.modulus() != first.modulus() {
                return Err(Error::InvalidSystem(format!(
                    "member {idx} differs in shape or modulus from member 0"
                )));
            }
            let report = sys.validate();
            if !report.is_ok() {
                return Err(Error::InvalidSystem(format!("member {idx}: {report}")));
            }
        }
        if let Schedule::Explicit(list) = &schedule {
            if let Some(&bad) = list.iter().find(|&&i| i >= members.len()) {
                return Err(Error::InvalidSystem(format!(
                    "schedule refers to member {bad}, family has {}",
                    members.len()
                )));
            }
        }
        Ok(SystemFamily { members, schedule })
    }

    pub fn constant(sys: TriangularSystem) -> Result<Self> {
        Self::new(vec![sys], Schedule::Constant)
    }

    pub fn with_schedule(&self, schedule: Schedule) -> Result<Self> {
        Self::new(self.members.clone(), schedule)
    }

    pub fn members(&self) -> &[TriangularSystem] {
        &self.members
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn shape(&self) -> &ShapeMatrix {
        self.members[0].shape()
    }

    pub fn modulus(&self) -> Prime {
        self.members[0].modulus()
    }

    pub fn m(&self) -> usize {
        self.members[0].m()
    }

    pub fn arity(&self) -> usize {
        self.members[0].arity()
    }

    /// Index of the member used at step `k >= 1`.
    pub fn member_index(&self, k: u64) -> Result<usize> {
        debug_assert!(k >= 1);
        match &self.schedule {
            Schedule::Constant => Ok(0),
            Schedule::Cyclic => Ok(((k - 1) % self.members.len() as u64) as usize),
            Schedule::Explicit(list) => usize::try_from(k - 1)
                .ok()
                .and_then(|i| list.get(i).copied())
                .ok_or(Error::ScheduleExhausted(k)),
        }
    }

    pub fn member_for_step(&self, k: u64) -> Result<&TriangularSystem> {
        Ok(&self.members[self.member_index(k)?])
    }

    /// Steps after which the schedule repeats; `None` for explicit lists.
    pub fn cycle_len(&self) -> Option<usize> {
        match self.schedule {
            Schedule::Constant => Some(1),
            Schedule::Cyclic => Some(self.members.len()),
            Schedule::Explicit(_) => None,
        }
    }

    /// The common `g_m`, if all members agree on it.
    pub fn shared_gm(&self) -> Option<u64> {
        let gm = self.members[0].gm();
        self.members.iter().all(|s| s.gm() == gm).then_some(gm)
    }

    pub fn all_permutations(&self, guard: u128) -> Result<bool> {
        for sys in &self.members {
            if !sys.is_permutation(guard)?.bijective {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The iterates `F^{(k)}` together with their split
/// `F_i^{(k)} = X_i * G~_{k,i} + H~_{k,i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterateSet {
    pub k: u64,
    pub polys: Vec<MultiPoly>,
    pub split: Vec<(MultiPoly, MultiPoly)>,
}

impl IterateSet {
    pub fn g_tilde(&self, i: usize) -> &MultiPoly {
        &self.split[i].0
    }

    pub fn h_tilde(&self, i: usize) -> &MultiPoly {
        &self.split[i].1
    }
}

/// Incremental symbolic iteration of a family.
#[derive(Debug, Clone)]
pub struct SymbolicIterator<'a> {
    family: &'a SystemFamily,
    polys: Vec<MultiPoly>,
    k: u64,
    cap: usize,
}

impl<'a> SymbolicIterator<'a> {
    pub fn new(family: &'a SystemFamily, cap: usize) -> Self {
        SymbolicIterator {
            family,
            polys: MultiPoly::identity_tuple(family.modulus(), family.arity()),
            k: 0,
            cap,
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    /// `F_i^{(k+1)} = F_{k+1,i}(F_0^{(k)}, ..., F_m^{(k)})`.
    pub fn advance(&mut self) -> Result<()> {
        let step = self.k + 1;
        let sys = self.family.member_for_step(step)?;
        let cap_err = |e| match e {
            Error::TermCap { cap, .. } => Error::TermCap {
                cap,
                k: step as usize,
            },
            other => other,
        };
        let mut next = Vec::with_capacity(self.polys.len());
        for comp in sys.components() {
            let f = comp.compose_capped(&self.polys, self.cap).map_err(cap_err)?;
            if f.num_terms() > self.cap {
                return Err(Error::TermCap {
                    cap: self.cap,
                    k: step as usize,
                });
            }
            next.push(f);
        }
        self.polys = next;
        self.k = step;
        Ok(())
    }

    pub fn snapshot(&self) -> Result<IterateSet> {
        let split = self
            .polys
            .iter()
            .enumerate()
            .map(|(i, f)| f.split_linear(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(IterateSet {
            k: self.k,
            polys: self.polys.clone(),
            split,
        })
    }
}

/// `F^{(k)}` for the family's schedule, failing if any iterate exceeds `cap` terms.
pub fn iterate_symbolic(family: &SystemFamily, k: u64, cap: usize) -> Result<IterateSet> {
    let mut it = SymbolicIterator::new(family, cap);
    for _ in 0..k {
        it.advance()?;
    }
    it.snapshot()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRow {
    pub k: u64,
    pub i: usize,
    /// `1 + deg G~_{k,i}` from the symbolic iterate.
    pub observed: Degree,
    /// `(S^k * 1)_i`.
    pub predicted: u128,
}

impl DegreeRow {
    pub fn agrees(&self) -> bool {
        self.observed == Degree::Finite(self.predicted as u64)
    }
}

/// Fit of `deg G~_{k,0}` against `k^m * prod(s) / m!`, kept in integers by
/// scaling with `m!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingFit {
    pub superdiagonal_product: u128,
    pub m_factorial: u128,
    /// `m! * deg G~_{k,0} - prod(s) * k^m` for `k = 1..=k_max`.
    pub scaled_residuals: Vec<i128>,
    /// Degree in `k` of the residual, when the data pins it down.
    pub residual_degree: Option<Degree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeLawReport {
    pub rows: Vec<DegreeRow>,
    pub leading_fit: Option<LeadingFit>,
}

impl DegreeLawReport {
    pub fn first_discrepancy(&self) -> Option<&DegreeRow> {
        self.rows.iter().find(|r| !r.agrees())
    }

    pub fn all_agree(&self) -> bool {
        self.first_discrepancy().is_none()
    }
}

/// Compares the observed degrees of `G~_{k,i}` for `k = 1..=k_max` with `S^k * 1`.
pub fn check_degree_law(family: &SystemFamily, k_max: u64, cap: usize) -> Result<DegreeLawReport> {
    let shape = family.shape();
    let m = shape.m();
    let mut it = SymbolicIterator::new(family, cap);
    let mut rows = Vec::new();
    let mut deg0 = Vec::new();
    for k in 1..=k_max {
        it.advance()?;
        let set = it.snapshot()?;
        let predicted = shape.predicted_degrees(k)?;
        for (i, &predicted) in predicted.iter().enumerate() {
            let observed = match set.g_tilde(i).total_degree() {
                Degree::Finite(d) => Degree::Finite(d + 1),
                Degree::NegInfinity => Degree::NegInfinity,
            };
            if i == 0 {
                deg0.push(set.g_tilde(0).total_degree());
            }
            rows.push(DegreeRow {
                k,
                i,
                observed,
                predicted,
            });
        }
    }
    let prod = shape.superdiagonal_product();
    let leading_fit = (m >= 1 && prod != 0)
        .then(|| leading_fit(&deg0, m, prod))
        .transpose()?;
    Ok(DegreeLawReport { rows, leading_fit })
}

fn leading_fit(deg0: &[Degree], m: usize, prod: u128) -> Result<LeadingFit> {
    let overflow = Error::Overflow("degree fit");
    let m_factorial = (1..=m as u128).product::<u128>();
    let mut scaled_residuals = Vec::with_capacity(deg0.len());
    for (idx, d) in deg0.iter().enumerate() {
        let k = (idx + 1) as i128;
        let Some(d) = d.finite() else {
            return Err(Error::InvalidSystem("an iterate has G~_{k,0} = 0".into()));
        };
        let lead = i128::try_from(prod)
            .ok()
            .and_then(|pr| pr.checked_mul(k.checked_pow(m as u32)?))
            .ok_or(overflow.clone())?;
        let scaled = (m_factorial as i128)
            .checked_mul(d as i128)
            .ok_or(overflow.clone())?;
        scaled_residuals.push(scaled - lead);
    }
    let residual_degree = polynomial_degree(&scaled_residuals);
    Ok(LeadingFit {
        superdiagonal_product: prod,
        m_factorial,
        scaled_residuals,
        residual_degree,
    })
}

// Degree of the polynomial sampled at consecutive integers, via forward
// differences. `None` if no difference order vanishes with at least one check.
fn polynomial_degree(values: &[i128]) -> Option<Degree> {
    if values.is_empty() {
        return None;
    }
    if values.iter().all(|&v| v == 0) {
        return Some(Degree::NegInfinity);
    }
    let mut diff: Vec<i128> = values.to_vec();
    let mut d = 0u64;
    // diff holds the d-th differences; test whether the (d+1)-th vanish
    loop {
        if diff.len() < 3 {
            return None;
        }
        let next: Vec<i128> = diff.windows(2).map(|w| w[1] - w[0]).collect();
        if next.iter().all(|&v| v == 0) {
            return Some(Degree::Finite(d));
        }
        diff = next;
        d += 1;
    }
}
