//! Enumeration of `F_p^d` in a fixed order (coordinate 0 varies fastest).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// `p^dims`, or `None` on overflow.
pub fn size(p: u64, dims: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..dims {
        acc = acc.checked_mul(p as u128)?;
    }
    Some(acc)
}

/// `p^dims` if it is at most `guard`.
pub fn guarded_size(p: u64, dims: usize, guard: u128) -> Result<u64> {
    match size(p, dims) {
        Some(n) if n <= guard && n <= u64::MAX as u128 => Ok(n as u64),
        Some(n) => Err(Error::GuardExceeded { size: n, guard }),
        None => Err(Error::GuardExceeded {
            size: u128::MAX,
            guard,
        }),
    }
}

pub fn point_at(mut index: u64, p: u64, out: &mut [u64]) {
    for x in out.iter_mut() {
        *x = index % p;
        index /= p;
    }
}

pub fn index_of(point: &[u64], p: u64) -> u64 {
    point.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// All points of `F_p^dims`, in index order.
pub fn points(p: u64, dims: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = size(p, dims).expect("space too large to enumerate") as u64;
    (0..total).map(move |i| {
        let mut pt = vec![0; dims];
        point_at(i, p, &mut pt);
        pt
    })
}
