//! Howell normal form for submodules of `(Z/p^e)^n`.
//!
//! Over the chain ring `Z/p^e` every entry is a unit times a power of p, so
//! elimination never needs Bezout steps. The Howell property is enforced by
//! feeding `p^{e-a}·row` back into the pool whenever a pivot `p^a` is fixed.

use crate::padic::Zmod;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellForm {
    p: u64,
    e: u32,
    rows: Vec<Vec<u64>>,
    /// `(column, a)` with pivot entry `p^a`.
    pivots: Vec<(usize, u32)>,
}

fn vp(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let (mut x, mut v) = (x, 0);
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl HowellForm {
    pub fn new(gens: &[Vec<u64>], ncols: usize, p: u64, e: u32) -> Self {
        let zm = Zmod::new(p.pow(e));
        let mut pool: Vec<Vec<u64>> = gens
            .iter()
            .map(|g| g.iter().map(|&x| x % zm.modulus()).collect())
            .filter(|g: &Vec<u64>| g.iter().any(|&x| x != 0))
            .collect();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..ncols {
            let best = pool.iter().enumerate().filter(|(_, r)| r[col] != 0).min_by_key(|(_, r)| vp(r[col], p, e));
            let Some((idx, _)) = best else { continue };
            let mut row = pool.swap_remove(idx);
            let a = vp(row[col], p, e);
            let pa = p.pow(a);
            let unit_inv = Zmod::new(p.pow(e - a)).inv(row[col] / pa).expect("cofactor is a unit");
            row.iter_mut().for_each(|x| *x = zm.mul(*x, unit_inv));
            for r in pool.iter_mut() {
                if r[col] != 0 {
                    let f = r[col] / pa;
                    for c in col..ncols {
                        r[c] = zm.sub(r[c], zm.mul(f, row[c]));
                    }
                }
            }
            if a > 0 {
                let ann: Vec<u64> = row.iter().map(|&x| zm.mul(x, p.pow(e - a))).collect();
                pool.push(ann);
            }
            pool.retain(|r| r.iter().any(|&x| x != 0));
            for prev in rows.iter_mut() {
                let f = prev[col] / pa;
                if f != 0 {
                    for c in col..ncols {
                        prev[c] = zm.sub(prev[c], zm.mul(f, row[c]));
                    }
                }
            }
            rows.push(row);
            pivots.push((col, a));
        }
        HowellForm { p, e, rows, pivots }
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// `log_p` of the submodule order.
    pub fn order_exponent(&self) -> u32 {
        self.pivots.iter().map(|&(_, a)| self.e - a).sum()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let zm = Zmod::new(self.p.pow(self.e));
        let mut v: Vec<u64> = v.iter().map(|&x| x % zm.modulus()).collect();
        for (row, &(col, a)) in self.rows.iter().zip(&self.pivots) {
            let pa = self.p.pow(a);
            if !v[col].is_multiple_of(pa) {
                return false;
            }
            let f = v[col] / pa;
            for c in col..v.len() {
                v[c] = zm.sub(v[c], zm.mul(f, row[c]));
            }
        }
        v.iter().all(|&x| x == 0)
    }
}
