//! Orbits `w_0 = v, w_n = F_n(w_{n-1})` of a family, period detection and the
//! closed form of the last coordinate.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{factorize, Prime};
use crate::space;
use crate::system::SystemFamily;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitState {
    pub n: u64,
    pub w: Vec<u64>,
}

impl OrbitState {
    /// `u_n`: the state without its last coordinate.
    pub fn truncated(&self) -> &[u64] {
        &self.w[..self.w.len() - 1]
    }

    pub fn last(&self) -> u64 {
        self.w[self.w.len() - 1]
    }
}

fn check_initial(family: &SystemFamily, v: &[u64]) -> Result<()> {
    if v.len() != family.arity() {
        return Err(Error::ArityMismatch {
            expected: family.arity(),
            got: v.len(),
        });
    }
    let p = family.modulus().get();
    if let Some(x) = v.iter().find(|&&x| x >= p) {
        return Err(Error::InvalidArgument(alloc::format!(
            "initial coordinate {x} is not a residue mod {p}"
        )));
    }
    Ok(())
}

pub fn step(family: &SystemFamily, state: &OrbitState) -> Result<OrbitState> {
    let sys = family.member_for_step(state.n + 1)?;
    Ok(OrbitState {
        n: state.n + 1,
        w: sys.apply(&state.w),
    })
}

/// The first `count` states `w_0, ..., w_{count-1}` starting from `v`.
pub fn generate(family: &SystemFamily, v: &[u64], count: usize) -> Result<Vec<OrbitState>> {
    check_initial(family, v)?;
    if count == 0 {
        return Err(Error::InvalidArgument("orbit length must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    out.push(OrbitState { n: 0, w: v.to_vec() });
    for _ in 1..count {
        let next = step(family, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Eventual periodicity: `w_{n+tau} = w_n` for all `n >= tail`, both minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Period {
    pub tail: u64,
    pub tau: u64,
}

/// Default bound on map applications for [`find_period`].
pub fn default_period_guard(family: &SystemFamily) -> u128 {
    let states = space::size(family.modulus().get(), family.arity()).unwrap_or(u128::MAX);
    let cycle = family.cycle_len().unwrap_or(1) as u128;
    states.saturating_mul(cycle).saturating_mul(4).saturating_add(16)
}

// Runs the sequence (w_n, n mod L) one step at a time.
struct Runner<'a> {
    family: &'a SystemFamily,
    cycle: u64,
    n: u64,
    w: Vec<u64>,
    scratch: Vec<u64>,
}

impl<'a> Runner<'a> {
    fn new(family: &'a SystemFamily, v: &[u64]) -> Self {
        Runner {
            family,
            cycle: family.cycle_len().unwrap_or(1) as u64,
            n: 0,
            w: v.to_vec(),
            scratch: vec![0; v.len()],
        }
    }

    fn phase(&self) -> u64 {
        self.n % self.cycle
    }

    fn advance(&mut self) {
        let sys = self
            .family
            .member_for_step(self.n + 1)
            .expect("periodic schedules cover every step");
        sys.apply_into(&self.w, &mut self.scratch);
        core::mem::swap(&mut self.w, &mut self.scratch);
        self.n += 1;
    }

    fn advance_by(&mut self, k: u64) {
        for _ in 0..k {
            self.advance();
        }
    }

    fn same_state(&self, other: &Runner<'_>) -> bool {
        self.phase() == other.phase() && self.w == other.w
    }
}

/// Tail and period of the orbit from `v` by Brent's cycle detection, in O(1)
/// memory. Only constant and cyclic schedules are autonomous; explicit lists
/// are rejected.
pub fn find_period(family: &SystemFamily, v: &[u64], guard: u128) -> Result<Period> {
    check_initial(family, v)?;
    if family.cycle_len().is_none() {
        return Err(Error::UnsupportedSchedule);
    }
    let exceeded = |used: u128| Error::GuardExceeded { size: used, guard };

    // Brent on (w_n, n mod L): find the cycle length lam of the augmented state.
    let mut used: u128 = 0;
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = Runner::new(family, v);
    let mut hare = Runner::new(family, v);
    hare.advance();
    while !hare.same_state(&tortoise) {
        if power == lam {
            tortoise.w.clone_from(&hare.w);
            tortoise.n = hare.n;
            power *= 2;
            lam = 0;
        }
        hare.advance();
        lam += 1;
        used += 1;
        if used > guard {
            return Err(exceeded(used));
        }
    }

    // mu: first index where the augmented sequence enters the cycle
    let mut tortoise = Runner::new(family, v);
    let mut hare = Runner::new(family, v);
    hare.advance_by(lam);
    let mut mu = 0u64;
    while !hare.same_state(&tortoise) {
        tortoise.advance();
        hare.advance();
        mu += 1;
        used += 1;
        if used > guard {
            return Err(exceeded(used));
        }
    }

    if family.cycle_len() == Some(1) {
        return Ok(Period { tail: mu, tau: lam });
    }

    // The w-sequence alone may repeat sooner: its minimal period divides lam.
    let tau = divisors(lam)
        .into_iter()
        .find(|&d| d == lam || repeats_with(family, v, mu, lam, d))
        .expect("lam divides itself");
    let mut tail = 0;
    let mut a = Runner::new(family, v);
    let mut b = Runner::new(family, v);
    b.advance_by(tau);
    for n in 0..mu {
        if a.w != b.w {
            tail = n + 1;
        }
        a.advance();
        b.advance();
    }
    Ok(Period { tail, tau })
}

fn repeats_with(family: &SystemFamily, v: &[u64], start: u64, window: u64, d: u64) -> bool {
    let mut a = Runner::new(family, v);
    a.advance_by(start);
    let mut b = Runner::new(family, v);
    b.advance_by(start + d);
    for _ in 0..window {
        if a.w != b.w {
            return false;
        }
        a.advance();
        b.advance();
    }
    true
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(n) {
        let len = out.len();
        let mut pow = 1u64;
        for _ in 0..e {
            pow *= q;
            for i in 0..len {
                out.push(out[i] * pow);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Cycle lengths of a constant family whose member is a permutation, one
/// entry per cycle, found by walking every point once.
pub fn cycle_lengths(family: &SystemFamily, guard: u128) -> Result<Vec<u64>> {
    if family.cycle_len() != Some(1) {
        return Err(Error::UnsupportedSchedule);
    }
    let sys = &family.members()[0];
    let p = family.modulus().get();
    let total = space::guarded_size(p, family.arity(), guard)?;
    let mut seen = vec![false; total as usize];
    let mut w = vec![0u64; family.arity()];
    let mut next = w.clone();
    let mut out = Vec::new();
    for start in 0..total {
        if seen[start as usize] {
            continue;
        }
        space::point_at(start, p, &mut w);
        let mut len = 0u64;
        loop {
            let idx = space::index_of(&w, p) as usize;
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            len += 1;
            sys.apply_into(&w, &mut next);
            core::mem::swap(&mut w, &mut next);
        }
        if space::index_of(&w, p) != start {
            return Err(Error::InvalidArgument("member is not a permutation".into()));
        }
        out.push(len);
    }
    Ok(out)
}

/// `u_{n,m}` for the affine last row `X_m -> g X_m + h` started at `u0`:
/// `g^n u0 + h (g^n - 1)/(g - 1)` when `g != 1`, `u0 + n h` when `g = 1`.
pub fn last_coordinate_closed_form(p: Prime, g: u64, h: u64, u0: u64, n: u64) -> u64 {
    let (g, h, u0) = (g % p.get(), h % p.get(), u0 % p.get());
    if g == 1 {
        let n = n % p.get();
        return p.add(u0, p.mul(n, h));
    }
    let gn = p.pow(g, n);
    let ratio = p.mul(p.sub(gn, 1), p.inv(p.sub(g, 1)).expect("g != 1"));
    p.add(p.mul(gn, u0), p.mul(ratio, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Schedule, ShapeMatrix, TriangularSystem};

    fn family(q: u64, g0: &str, h0: &str, gm: u64, hm: u64) -> SystemFamily {
        let s01 = if g0.contains("X1^2") { 2 } else { 1 };
        let sys = TriangularSystem::parse(
            ShapeMatrix::bidiagonal(&[s01]),
            Prime::new(q).unwrap(),
            &[g0],
            &[h0],
            gm,
            hm,
        )
        .unwrap();
        SystemFamily::constant(sys).unwrap()
    }

    fn perm3() -> SystemFamily {
        family(3, "X1^2 + 1", "0", 1, 1)
    }

    #[test]
    fn step_examples() {
        let fam = perm3();
        let s = |w: [u64; 2]| OrbitState { n: 0, w: w.to_vec() };
        assert_eq!(step(&fam, &s([1, 0])).unwrap().w, [1, 1]);
        assert_eq!(step(&fam, &s([1, 1])).unwrap().w, [2, 2]);
        assert_eq!(step(&fam, &s([2, 2])).unwrap().w, [1, 0]);
    }

    #[test]
    fn generate_examples() {
        let fam = perm3();
        let one = generate(&fam, &[1, 0], 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].w, [1, 0]);
        let four: Vec<Vec<u64>> = generate(&fam, &[1, 0], 4)
            .unwrap()
            .into_iter()
            .map(|s| s.w)
            .collect();
        assert_eq!(four, [[1, 0], [1, 1], [2, 2], [1, 0]]);
        let orbit = generate(&fam, &[1, 0], 3).unwrap();
        let truncated: Vec<&[u64]> = orbit.iter().map(|s| s.truncated()).collect();
        assert_eq!(truncated, [&[1][..], &[1], &[2]]);
        assert!(generate(&fam, &[3, 0], 2).is_err());
        assert!(generate(&fam, &[1], 2).is_err());
        assert!(generate(&fam, &[1, 0], 0).is_err());
    }

    #[test]
    fn period_examples() {
        let fam = perm3();
        let guard = default_period_guard(&fam);
        assert_eq!(find_period(&fam, &[1, 0], guard).unwrap(), Period { tail: 0, tau: 3 });
        for v in space::points(3, 2) {
            let per = find_period(&fam, &v, guard).unwrap();
            assert_eq!(per.tail, 0);
            assert!(per.tau as u128 <= 9);
        }
        let ex = fam.with_schedule(Schedule::Explicit(alloc::vec![0, 0])).unwrap();
        assert_eq!(find_period(&ex, &[1, 0], guard), Err(Error::UnsupportedSchedule));
    }

    #[test]
    fn period_with_transient() {
        // G_0 = X1 vanishes at X1 = 0, so some orbits have a tail
        let fam = family(5, "X1", "X1", 2, 0);
        let guard = default_period_guard(&fam);
        for v in space::points(5, 2) {
            let per = find_period(&fam, &v, guard).unwrap();
            // oracle: store the orbit and look for the first repeat
            let states = generate(&fam, &v, 60).unwrap();
            let (mut tail, mut tau) = (0, 0);
            'outer: for j in 1..60 {
                for i in 0..j {
                    if states[i].w == states[j].w {
                        tail = i as u64;
                        tau = (j - i) as u64;
                        break 'outer;
                    }
                }
            }
            assert_eq!(per, Period { tail, tau }, "v = {v:?}");
        }
    }

    #[test]
    fn cyclic_schedule_period() {
        // two identical members: the w-sequence repeats sooner than (w, phase)
        let fam = perm3();
        let sys = fam.members()[0].clone();
        let cyc = SystemFamily::new(alloc::vec![sys.clone(), sys], Schedule::Cyclic).unwrap();
        let guard = default_period_guard(&cyc);
        assert_eq!(find_period(&cyc, &[1, 0], guard).unwrap(), Period { tail: 0, tau: 3 });

        let a = family(5, "X1 + 1", "0", 2, 1).members()[0].clone();
        let b = family(5, "X1", "3", 2, 4).members()[0].clone();
        let cyc = SystemFamily::new(alloc::vec![a, b], Schedule::Cyclic).unwrap();
        let guard = default_period_guard(&cyc);
        for v in space::points(5, 2) {
            let per = find_period(&cyc, &v, guard).unwrap();
            let states = generate(&cyc, &v, 400).unwrap();
            let holds = |tail: u64, tau: u64| {
                (tail as usize..states.len() - tau as usize)
                    .all(|n| states[n].w == states[n + tau as usize].w)
            };
            assert!(holds(per.tail, per.tau), "v = {v:?} {per:?}");
            assert!(per.tail == 0 || !holds(per.tail - 1, per.tau));
            assert!((1..per.tau).all(|t| !holds(per.tail + 60, t)));
        }
    }

    #[test]
    fn guard_is_enforced() {
        let fam = perm3();
        assert!(matches!(
            find_period(&fam, &[1, 0], 1),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn cycles_partition_the_space() {
        let fam = perm3();
        let lens = cycle_lengths(&fam, 1000).unwrap();
        assert_eq!(lens.iter().sum::<u64>(), 9);
        let not_perm = family(3, "X1", "0", 1, 1);
        assert!(cycle_lengths(&not_perm, 1000).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p5 = Prime::new(5).unwrap();
        assert_eq!(last_coordinate_closed_form(p5, 2, 1, 3, 1), 2);
        assert_eq!(last_coordinate_closed_form(p5, 2, 1, 3, 2), 0);
        assert_eq!(last_coordinate_closed_form(p5, 1, 2, 0, 7), 4);
        assert_eq!(last_coordinate_closed_form(p5, 3, 4, 2, 0), 2);
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), [1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), [1]);
    }
}
