//! Valuation oracle independent of the digit formula: `𝔭^t + p^N O` as an
//! integer lattice in the κ-basis, echelonized over Z, with membership by
//! back-substitution.

use num_bigint::BigInt;
use pring_core::{KElem, PrimeCtx};

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, j| acc * BigInt::from(n - j) / BigInt::from(j + 1))
}

pub struct Oracle {
    d: usize,
    /// `κ^d = Σ tail[k] κ^k`.
    tail: Vec<BigInt>,
    modulus: BigInt,
    /// Echelon bases of `𝔭^t + p^N O` for `t = 0..=M`.
    lattices: Vec<Vec<(usize, Vec<BigInt>)>>,
    capacity: i64,
}

impl Oracle {
    pub fn new(ctx: &PrimeCtx) -> Self {
        let (p, d) = (ctx.p(), ctx.d());
        let tail = (0..d as u64).map(|k| -binomial(p, k + 1)).collect();
        let modulus = BigInt::from(p).pow(ctx.precision());
        let mut o = Oracle { d, tail, modulus, lattices: Vec::new(), capacity: ctx.capacity() };
        let mut power = o.unit_vec(0);
        let mut powers = Vec::new();
        for _ in 0..(o.capacity as usize + d) {
            powers.push(power.clone());
            power = o.times_kappa(&power);
        }
        for t in 0..=o.capacity as usize {
            let mut gens: Vec<Vec<BigInt>> = powers[t..t + d].to_vec();
            gens.extend((0..d).map(|j| {
                let mut e = o.unit_vec(j);
                e[j] = o.modulus.clone();
                e
            }));
            o.lattices.push(echelon(gens, d));
        }
        o
    }

    fn unit_vec(&self, j: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::from(0); self.d];
        v[j] = BigInt::from(1);
        v
    }

    fn times_kappa(&self, v: &[BigInt]) -> Vec<BigInt> {
        let top = v[self.d - 1].clone();
        let mut out = vec![BigInt::from(0); self.d];
        out[1..].clone_from_slice(&v[..self.d - 1]);
        for (o, t) in out.iter_mut().zip(&self.tail) {
            *o += &top * t;
        }
        out
    }

    /// Exact κ-basis vector of an element with nonnegative shift.
    pub fn vector(&self, a: &KElem) -> Vec<BigInt> {
        assert!(a.shift() >= 0);
        let mut v: Vec<BigInt> = a.coeffs().iter().map(|&c| BigInt::from(c)).collect();
        for _ in 0..a.shift() {
            v = self.times_kappa(&v);
        }
        v
    }

    pub fn member(&self, v: &[BigInt], t: i64) -> bool {
        let mut x = v.to_vec();
        for (c, row) in &self.lattices[t as usize] {
            let q = &x[*c] / &row[*c];
            if &q * &row[*c] != x[*c] {
                return false;
            }
            for (xi, ri) in x.iter_mut().zip(row) {
                *xi -= &q * ri;
            }
        }
        x.iter().all(|e| *e == BigInt::from(0))
    }

    /// `Some(t)` with `t < M` the exact valuation, `None` when the element
    /// lies in `p^N O`.
    pub fn val(&self, a: &KElem) -> Option<i64> {
        let v = self.vector(a);
        (0..self.capacity).find(|&t| !self.member(&v, t + 1))
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }
}

/// Row echelon form over Z with pivots in increasing column order.
fn echelon(mut rows: Vec<Vec<BigInt>>, n: usize) -> Vec<(usize, Vec<BigInt>)> {
    let zero = BigInt::from(0);
    let mut out = Vec::new();
    for c in 0..n {
        loop {
            rows.retain(|r| r.iter().any(|e| *e != zero));
            let live: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][c] != zero).collect();
            if live.len() <= 1 {
                if let Some(&r) = live.first() {
                    let mut row = rows.swap_remove(r);
                    if row[c] < zero {
                        row.iter_mut().for_each(|e| *e = -e.clone());
                    }
                    out.push((c, row));
                }
                break;
            }
            let piv = *live.iter().min_by_key(|&&r| rows[r][c].magnitude().clone()).unwrap();
            let prow = rows[piv].clone();
            for &r in &live {
                if r != piv {
                    let q = &rows[r][c] / &prow[c];
                    for (e, pe) in rows[r].iter_mut().zip(&prow) {
                        *e -= &q * pe;
                    }
                }
            }
        }
    }
    out
}
