//! Prime-field arithmetic and additive characters.
//!
//! Residues are kept canonical in `[0, p)` so equality is value equality.
//! [`Prime`] carries the raw-residue kernels used by the polynomial and orbit
//! code; [`FieldElement`] is the checked wrapper that refuses to mix moduli.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// A modulus verified prime at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Number of bits needed to write `p` in binary.
    pub fn bit_len(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    pub fn elem(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.0,
            modulus: self,
        }
    }

    #[inline]
    pub fn reduce_i64(self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.0 as i128);
        r as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.0 && b < self.0);
        let p = self.0;
        if a >= p - b {
            a - (p - b)
        } else {
            a + b
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.0 && b < self.0);
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.0)
    }

    pub fn pow(self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.0)
    }

    /// Inverse via Fermat's little theorem.
    pub fn inv(self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.0) {
            return Err(Error::ZeroElement);
        }
        Ok(pow_mod(a, self.0 - 2, self.0))
    }

    /// Smallest `t >= 1` with `g^t = 1`.
    pub fn mult_order(self, g: u64) -> Result<u64> {
        let g = g % self.0;
        if g == 0 {
            return Err(Error::ZeroElement);
        }
        let mut t = self.0 - 1;
        for (q, _) in factorize(self.0 - 1) {
            while t.is_multiple_of(q) && pow_mod(g, t / q, self.0) == 1 {
                t /= q;
            }
        }
        Ok(t)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A residue modulo a [`Prime`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: Prime,
}

impl FieldElement {
    pub fn new(value: u64, modulus: Prime) -> Self {
        modulus.elem(value)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    fn same_modulus(&self, other: &Self) -> Result<Prime> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.0, other.modulus.0));
        }
        Ok(self.modulus)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let p = self.same_modulus(other)?;
        Ok(FieldElement {
            value: p.add(self.value, other.value),
            modulus: p,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let p = self.same_modulus(other)?;
        Ok(FieldElement {
            value: p.sub(self.value, other.value),
            modulus: p,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let p = self.same_modulus(other)?;
        Ok(FieldElement {
            value: p.mul(self.value, other.value),
            modulus: p,
        })
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        FieldElement {
            value: self.modulus.pow(self.value, exp),
            modulus: self.modulus,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(FieldElement {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn mult_order(&self) -> Result<u64> {
        self.modulus.mult_order(self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A complex number on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitComplex(Complex64);

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex(Complex64::new(1.0, 0.0));

    pub fn new(re: f64, im: f64) -> Option<Self> {
        if (re * re + im * im - 1.0).abs() <= 1e-12 {
            Some(UnitComplex(Complex64::new(re, im)))
        } else {
            None
        }
    }

    /// `exp(2 pi i * turns)`.
    pub fn from_turns(turns: f64) -> Self {
        let (s, c) = libm::sincos(2.0 * PI * turns);
        UnitComplex(Complex64::new(c, s))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn as_complex(&self) -> Complex64 {
        self.0
    }
}

/// `exp(2 pi i c / modulus)`.
pub fn char_ep(c: i64, modulus: u64) -> UnitComplex {
    assert!(modulus >= 1, "character modulus must be positive");
    let r = (c as i128).rem_euclid(modulus as i128) as u64;
    root_of_unity(r, modulus)
}

fn root_of_unity(r: u64, modulus: u64) -> UnitComplex {
    // fold into [-M/2, M/2] so the angle stays small
    let signed = if r > modulus / 2 {
        -((modulus - r) as f64)
    } else {
        r as f64
    };
    UnitComplex::from_turns(signed / modulus as f64)
}

/// Largest modulus for which [`CharTable`] precomputes all roots.
pub const TABLE_LIMIT: u64 = 1_000_000;

/// Additive character `e_M` with a precomputed table of roots for small `M`.
#[derive(Debug, Clone)]
pub struct CharTable {
    modulus: u64,
    roots: Vec<UnitComplex>,
}

impl CharTable {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1, "character modulus must be positive");
        let roots = if modulus <= TABLE_LIMIT {
            (0..modulus).map(|r| root_of_unity(r, modulus)).collect()
        } else {
            Vec::new()
        };
        CharTable { modulus, roots }
    }

    /// A table that computes every root on demand.
    pub fn new_direct(modulus: u64) -> Self {
        assert!(modulus >= 1, "character modulus must be positive");
        CharTable {
            modulus,
            roots: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Character at a residue already reduced into `[0, modulus)`.
    #[inline]
    pub fn at_residue(&self, r: u64) -> UnitComplex {
        debug_assert!(r < self.modulus);
        if self.roots.is_empty() {
            root_of_unity(r, self.modulus)
        } else {
            self.roots[r as usize]
        }
    }

    pub fn at(&self, c: i64) -> UnitComplex {
        self.at_residue((c as i128).rem_euclid(self.modulus as i128) as u64)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut rest = n;
    for q in [2u64, 3, 5] {
        while rest.is_multiple_of(q) {
            primes.push(q);
            rest /= q;
        }
    }
    // wheel over 6k +- 1 for small factors
    let mut q = 7u64;
    let mut step = 4;
    while q <= 1 << 16 && q * q <= rest {
        while rest.is_multiple_of(q) {
            primes.push(q);
            rest /= q;
        }
        q += step;
        step = 6 - step;
    }
    if rest > 1 {
        split_large(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let mut c = 1;
    loop {
        let d = pollard_brent(n, c);
        if d != n {
            split_large(d, out);
            split_large(n / d, out);
            return;
        }
        c += 1;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_brent(n: u64, c: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    const BATCH: u64 = 64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn add_examples() {
        let f5 = p(5);
        assert_eq!(f5.elem(3).add(&f5.elem(4)).unwrap().value(), 2);
        assert_eq!(f5.elem(0).add(&f5.elem(3)).unwrap().value(), 3);
        assert_eq!(f5.elem(4).add(&f5.elem(1)).unwrap().value(), 0);
    }

    #[test]
    fn mul_examples() {
        let f7 = p(7);
        assert_eq!(f7.elem(3).mul(&f7.elem(5)).unwrap().value(), 1);
        assert_eq!(f7.elem(1).mul(&f7.elem(6)).unwrap().value(), 6);
        assert_eq!(f7.elem(6).mul(&f7.elem(6)).unwrap().value(), 1);
        let big = p((1u64 << 61) - 1);
        let m1 = big.elem(big.get() - 1);
        assert_eq!(m1.mul(&m1).unwrap().value(), 1);
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = p(5).elem(1);
        let b = p(7).elem(1);
        assert_eq!(a.add(&b), Err(Error::ModulusMismatch(5, 7)));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p(7).elem(3).inv().unwrap().value(), 5);
        assert_eq!(p(7).elem(1).inv().unwrap().value(), 1);
        // oracle: exhaustive search
        let want = (1..101).find(|b| (2 * b) % 101 == 1).unwrap();
        assert_eq!(want, 51);
        assert_eq!(p(101).elem(2).inv().unwrap().value(), want);
        assert_eq!(p(7).elem(0).inv(), Err(Error::ZeroElement));
    }

    #[test]
    fn order_examples() {
        assert_eq!(p(5).elem(1).mult_order().unwrap(), 1);
        assert_eq!(p(5).elem(2).mult_order().unwrap(), 4);
        assert_eq!(p(5).elem(4).mult_order().unwrap(), 2);
        assert_eq!(p(5).elem(0).mult_order(), Err(Error::ZeroElement));
    }

    #[test]
    fn exhaustive_inverse_and_order_small_primes() {
        for q in (2..=101).filter(|&q| is_prime(q)) {
            let f = p(q);
            for a in 1..q {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1);
                let t = f.mult_order(a).unwrap();
                assert_eq!((q - 1) % t, 0);
                // brute-force order
                let mut x = a;
                let mut bt = 1;
                while x != 1 {
                    x = f.mul(x, a);
                    bt += 1;
                }
                assert_eq!(t, bt, "order of {a} mod {q}");
            }
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000u64 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), naive, "{n}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(Prime::new(1).is_err());
    }

    #[test]
    fn factorize_large() {
        let n = 18446744073709551556u64; // p - 1 for the largest 64-bit prime
        let fs = factorize(n);
        let back = fs
            .iter()
            .fold(1u128, |acc, &(q, e)| acc * (q as u128).pow(e));
        assert_eq!(back, n as u128);
        assert!(fs.iter().all(|&(q, _)| is_prime(q)));
        let big = p(18446744073709551557);
        let t = big.mult_order(2).unwrap();
        assert_eq!(big.pow(2, t), 1);
    }

    #[test]
    fn character_examples() {
        let one = char_ep(0, 7);
        assert_eq!((one.re(), one.im()), (1.0, 0.0));
        let per = char_ep(7, 7);
        assert!((per.re() - 1.0).abs() < 1e-12 && per.im().abs() < 1e-12);
        let q = char_ep(1, 4);
        assert!(q.re().abs() < 1e-12 && (q.im() - 1.0).abs() < 1e-12);
        let neg = char_ep(-1, 4);
        assert!(neg.re().abs() < 1e-12 && (neg.im() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_character_sums() {
        for q in (2..=101u64).filter(|&q| is_prime(q)) {
            let table = CharTable::new(q);
            for c in 0..(2 * q as i64) {
                let s: Complex64 = (1..=q as i64)
                    .map(|u| table.at(c * u).as_complex())
                    .sum();
                if c % q as i64 == 0 {
                    assert!((s.norm() - q as f64).abs() <= 1e-9);
                } else {
                    assert!(s.norm() <= 1e-9, "p={q} c={c} |s|={}", s.norm());
                }
            }
        }
    }

    #[test]
    fn unit_complex_invariant() {
        assert!(UnitComplex::new(0.6, 0.8).is_some());
        assert!(UnitComplex::new(1.0, 0.1).is_none());
    }
}
