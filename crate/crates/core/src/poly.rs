//! Sparse multivariate polynomials over `F_p` in variables `X_0, ..., X_{arity-1}`.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`] under graded
//! lexicographic order, so two equal polynomials always have identical term
//! lists. Zero coefficients are never stored.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::field::{FieldElement, Prime};
use crate::{Error, Result};

/// Exponent vector; entry `j` is the exponent of `X_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree of a polynomial, with a separate value for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    modulus: Prime,
    arity: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl MultiPoly {
    pub fn zero(modulus: Prime, arity: usize) -> Self {
        MultiPoly {
            modulus,
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: Prime, arity: usize, c: u64) -> Self {
        let mut f = Self::zero(modulus, arity);
        f.add_term(Monomial::one(arity), c % modulus.get());
        f
    }

    /// The variable `X_j`.
    pub fn var(modulus: Prime, arity: usize, j: usize) -> Result<Self> {
        if j >= arity {
            return Err(Error::VariableOutOfRange { index: j, arity });
        }
        let mut e = vec![0; arity];
        e[j] = 1;
        let mut f = Self::zero(modulus, arity);
        f.add_term(Monomial(e), 1);
        Ok(f)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; duplicate
    /// monomials are merged and coefficients reduced mod `p`.
    pub fn from_terms<I>(modulus: Prime, arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, i64)>,
    {
        let mut f = Self::zero(modulus, arity);
        for (exps, c) in terms {
            if exps.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: exps.len(),
                });
            }
            f.add_term(Monomial(exps), modulus.reduce_i64(c));
        }
        Ok(f)
    }

    /// The identity tuple `(X_0, ..., X_{arity-1})`.
    pub fn identity_tuple(modulus: Prime, arity: usize) -> Vec<MultiPoly> {
        (0..arity)
            .map(|j| Self::var(modulus, arity, j).expect("index in range"))
            .collect()
    }

    fn add_term(&mut self, mono: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let p = self.modulus;
        match self.terms.entry(mono) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = p.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, exponents: &[u32]) -> u64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    /// Constant term if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, &c) = self.terms.iter().next()?;
                m.is_one().then_some(c)
            }
            _ => None,
        }
    }

    pub fn degree_in(&self, j: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| m.0.get(j).copied().unwrap_or(0) as u64)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn total_degree(&self) -> Degree {
        // the largest key in graded order has the largest total degree
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |m| Degree::Finite(m.total_degree()))
    }

    /// Whether `X_j` occurs in some term.
    pub fn uses_var(&self, j: usize) -> bool {
        self.terms.keys().any(|m| m.0.get(j).is_some_and(|&e| e > 0))
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let mut raw = Vec::with_capacity(point.len());
        for x in point {
            if x.modulus() != self.modulus {
                return Err(Error::ModulusMismatch(
                    self.modulus.get(),
                    x.modulus().get(),
                ));
            }
            raw.push(x.value());
        }
        Ok(self.modulus.elem(self.eval(&raw)?))
    }

    /// Evaluation at canonical residues.
    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[u64]) -> u64 {
        let p = self.modulus;
        let mut acc = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (&x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = p.mul(t, p.pow(x, e as u64));
                }
            }
            acc = p.add(acc, t);
        }
        acc
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let p = self.modulus;
        MultiPoly {
            modulus: p,
            arity: self.arity,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), p.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> MultiPoly {
        let p = self.modulus;
        let c = c % p.get();
        if c == 0 {
            return Self::zero(p, self.arity);
        }
        MultiPoly {
            modulus: p,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), p.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let p = self.modulus;
        let mut out = Self::zero(p, self.arity);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.times(mb), p.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut acc = Self::constant(self.modulus, self.arity, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// `f(subs[0], ..., subs[arity-1])`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        self.compose_capped(subs, usize::MAX)
    }

    /// Like [`compose`](Self::compose), failing with [`Error::TermCap`] (with
    /// `k = 0`) as soon as an intermediate result holds more than `cap` terms.
    pub fn compose_capped(&self, subs: &[MultiPoly], cap: usize) -> Result<MultiPoly> {
        if subs.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: subs.len(),
            });
        }
        let Some(first) = subs.first() else {
            // zero variables: f is a constant
            return Ok(self.clone());
        };
        for s in subs {
            if s.modulus != self.modulus {
                return Err(Error::ModulusMismatch(self.modulus.get(), s.modulus.get()));
            }
            if s.arity != first.arity {
                return Err(Error::ArityMismatch {
                    expected: first.arity,
                    got: s.arity,
                });
            }
        }
        let terms: Vec<(&[u32], u64)> = self.terms.iter().map(|(m, &c)| (&m.0[..], c)).collect();
        horner(&terms, self.arity, subs, self.modulus, first.arity, cap)
    }

    /// Splits `f = X_i * g + h` with `g`, `h` free of `X_i`.
    pub fn split_linear(&self, i: usize) -> Result<(MultiPoly, MultiPoly)> {
        if i >= self.arity {
            return Err(Error::VariableOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        let mut g = Self::zero(self.modulus, self.arity);
        let mut h = Self::zero(self.modulus, self.arity);
        for (m, &c) in &self.terms {
            match m.0[i] {
                0 => {
                    h.terms.insert(m.clone(), c);
                }
                1 => {
                    let mut e = m.0.clone();
                    e[i] = 0;
                    g.terms.insert(Monomial(e), c);
                }
                d => return Err(Error::NotLinearIn { var: i, degree: d }),
            }
        }
        Ok((g, h))
    }

    /// Parses the text form produced by `Display`, e.g. `2*X0*X1^2 + X1 + 1`.
    /// Subtraction and a leading minus are accepted as well.
    pub fn parse(text: &str, modulus: Prime, arity: usize) -> Result<MultiPoly> {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            modulus,
            arity,
        }
        .poly()
    }
}

// Expands sum_e X_v^e * f_e(X_0..X_{v-1}) by Horner's rule in subs[v], recursing
// into the coefficients f_e on the remaining variables.
fn horner(
    terms: &[(&[u32], u64)],
    nvars: usize,
    subs: &[MultiPoly],
    p: Prime,
    out_arity: usize,
    cap: usize,
) -> Result<MultiPoly> {
    if terms.is_empty() {
        return Ok(MultiPoly::zero(p, out_arity));
    }
    if nvars == 0 {
        let c = terms.iter().fold(0, |acc, &(_, c)| p.add(acc, c));
        return Ok(MultiPoly::constant(p, out_arity, c));
    }
    let v = nvars - 1;
    let mut by_exp: BTreeMap<u32, Vec<(&[u32], u64)>> = BTreeMap::new();
    for &(e, c) in terms {
        by_exp.entry(e[v]).or_default().push((e, c));
    }
    if by_exp.len() == 1 && by_exp.contains_key(&0) {
        return horner(terms, v, subs, p, out_arity, cap);
    }
    let s = &subs[v];
    let mut acc: Option<MultiPoly> = None;
    let mut prev = 0u32;
    for (&e, group) in by_exp.iter().rev() {
        let coeff = horner(group, v, subs, p, out_arity, cap)?;
        acc = Some(match acc {
            None => coeff,
            Some(a) => {
                let shifted = mul_pow_capped(&a, s, prev - e, cap)?;
                shifted.add(&coeff)?
            }
        });
        prev = e;
    }
    let acc = acc.expect("non-empty");
    mul_pow_capped(&acc, s, prev, cap)
}

fn mul_pow_capped(a: &MultiPoly, s: &MultiPoly, times: u32, cap: usize) -> Result<MultiPoly> {
    let mut out = a.clone();
    for _ in 0..times {
        out = out.mul(s)?;
        if out.num_terms() > cap {
            return Err(Error::TermCap { cap, k: 0 });
        }
    }
    Ok(out)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, &c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (j, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(alloc::format!("X{j}")),
                    _ => factors.push(alloc::format!("X{j}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    modulus: Prime,
    arity: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::PolyParse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match digits.parse::<u64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("number out of range")
            }
        }
    }

    fn poly(&mut self) -> Result<MultiPoly> {
        let p = self.modulus;
        let mut out = MultiPoly::zero(p, self.arity);
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        loop {
            let (mono, c) = self.term()?;
            out.add_term(mono, if negate { p.neg(c) } else { c });
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Monomial, u64)> {
        let p = self.modulus;
        let mut exps = vec![0u32; self.arity];
        let mut c = 1u64;
        loop {
            match self.peek() {
                Some(b'X') => {
                    self.pos += 1;
                    let at = self.pos;
                    let j = self.number()? as usize;
                    if j >= self.arity {
                        self.pos = at;
                        return self.err("variable index out of range");
                    }
                    let mut e = 1u64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.number()?;
                    }
                    let Some(sum) = u32::try_from(e).ok().and_then(|e| exps[j].checked_add(e)) else {
                        return self.err("exponent too large");
                    };
                    exps[j] = sum;
                }
                Some(b'0'..=b'9') => {
                    let v = self.number()?;
                    c = p.mul(c, v % p.get());
                }
                _ => return self.err("expected a coefficient or variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((Monomial(exps), c));
            }
        }
    }
}
