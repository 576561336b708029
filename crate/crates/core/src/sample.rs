//! Seeded random elements and random surjective homomorphisms.
//!
//! All randomness flows from `ChaCha8Rng::seed_from_u64`, so a seed
//! reproduces the same stream on every platform.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hom::{theta_a_eval, HomGamma};
use crate::padic::{KElem, PrimeCtx};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform element of `κ^shift · O` modulo the working precision.
pub fn random_element<R: Rng>(ctx: &PrimeCtx, shift: i64, rng: &mut R) -> KElem {
    let m = ctx.modulus();
    let coeffs: Vec<i64> = (0..ctx.d()).map(|_| rng.random_range(0..m) as i64).collect();
    ctx.from_coeffs(shift, &coeffs).expect("residues are in range")
}

/// Uniform unit of O.
pub fn random_unit<R: Rng>(ctx: &PrimeCtx, rng: &mut R) -> KElem {
    let (m, p) = (ctx.modulus(), ctx.p());
    let mut coeffs: Vec<i64> = (0..ctx.d()).map(|_| rng.random_range(0..m) as i64).collect();
    coeffs[0] = (rng.random_range(0..m / p) * p + rng.random_range(1..p)) as i64;
    ctx.from_coeffs(0, &coeffs).expect("residues are in range")
}

/// Basis of the right null space of `rows` over F_p.
pub fn nullspace_mod_p(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).expect("p is prime");
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let s = inv(m[r][c]);
        m[r].iter_mut().for_each(|x| *x = *x * s % p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; ncols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[row][f]) % p;
            }
            v
        })
        .collect()
}

/// Draws surjective `γ ∈ Ĥ_i` with coefficients spread over the whole
/// admissible valuation range `5 - p ..= 3`.
///
/// Writing `c_a = κ^{5-p} b_a`, the condition `γ(𝔭^i ∧ 𝔭^i) ⊆ 𝔭^{2i+1}`
/// only involves `b_a mod p` and is F_p-linear there. Coefficients with
/// negative valuation are drawn from that kernel; a third of the draws
/// use unit multiples of `κ^{v_a}` with `0 <= v_a <= 3` instead.
pub struct GammaSampler {
    ctx: Arc<PrimeCtx>,
    level: i64,
    indices: Vec<i64>,
    kernel: Vec<Vec<u64>>,
}

impl GammaSampler {
    pub fn new(ctx: Arc<PrimeCtx>, level: i64) -> Result<Self> {
        if level < 0 {
            return Err(Error::InvalidGamma(format!("level {level} is negative")));
        }
        let (p, d) = (ctx.p(), ctx.di());
        let indices: Vec<i64> = (2..=(p as i64 - 1) / 2).collect();
        let ncols = indices.len() * d as usize;
        let shift = 5 - p as i64;
        let mut rows = Vec::new();
        for j in level..level + d {
            for k in j + 1..level + d {
                let need = 2 * level + 1 - (j + k + shift);
                if need <= 0 {
                    continue;
                }
                let digits: Vec<_> = indices
                    .iter()
                    .map(|&a| {
                        let w = theta_a_eval(&ctx, a, &ctx.kappa_pow(j), &ctx.kappa_pow(k))?;
                        ctx.kappa_digits(&w, j + k + need)
                    })
                    .collect::<Result<_>>()?;
                for t in 0..need {
                    let mut row = vec![0; ncols];
                    for (ai, dg) in digits.iter().enumerate() {
                        for s in 0..=t {
                            row[ai * d as usize + s as usize] = dg.digit(j + k + t - s);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let kernel = nullspace_mod_p(&rows, ncols, p);
        Ok(GammaSampler { ctx, level, indices, kernel })
    }

    pub fn ctx(&self) -> &Arc<PrimeCtx> {
        &self.ctx
    }

    /// Rejection loop around [`Self::draw`]; returns the first surjective map.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<HomGamma> {
        for _ in 0..10_000 {
            let g = self.draw(rng)?;
            if g.check_surjective()? {
                return Ok(g);
            }
        }
        Err(Error::InvalidGamma("no surjective draw after 10000 attempts".into()))
    }

    /// One candidate, not necessarily surjective.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<HomGamma> {
        let ctx = &*self.ctx;
        let mut coeffs = BTreeMap::new();
        if rng.random_range(0..3) == 0 {
            for &a in &self.indices {
                let v = rng.random_range(0..=3);
                let c = ctx.mul(&ctx.kappa_pow(v), &random_unit(ctx, rng))?;
                coeffs.insert(a, c);
            }
        } else {
            let (p, d) = (ctx.p(), ctx.d());
            let mut b = vec![0u64; self.indices.len() * d];
            for v in &self.kernel {
                if rng.random_bool(0.5) {
                    let f = rng.random_range(1..p);
                    b.iter_mut().zip(v).for_each(|(x, y)| *x = (*x + f * y) % p);
                }
            }
            let shift = 5 - p as i64;
            for (ai, &a) in self.indices.iter().enumerate() {
                let lift: Vec<i64> = b[ai * d..(ai + 1) * d].iter().map(|&x| x as i64).collect();
                let tail = ctx.scale(&random_element(ctx, 0, rng), p)?;
                let c = ctx.add(&ctx.from_coeffs(0, &lift)?, &tail)?;
                coeffs.insert(a, ctx.mul(&ctx.kappa_pow(shift), &c)?);
            }
        }
        HomGamma::new(self.ctx.clone(), self.level, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_small() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let ker = nullspace_mod_p(&rows, 3, 7);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert_eq!((v[0] + 2 * v[1] + 3 * v[2]) % 7, 0);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let ctx = PrimeCtx::new(7, 4).unwrap();
        let a = random_element(&ctx, 1, &mut rng_from_seed(9));
        let b = random_element(&ctx, 1, &mut rng_from_seed(9));
        assert_eq!((a.shift(), a.coeffs()), (b.shift(), b.coeffs()));
        assert_eq!(ctx.val(&random_unit(&ctx, &mut rng_from_seed(3))).finite(), Some(0));
    }

    #[test]
    fn sampler_reaches_negative_valuation() {
        for p in [7u64, 11, 13] {
            let ctx = Arc::new(PrimeCtx::for_level(p, 2).unwrap());
            let s = GammaSampler::new(ctx, 2).unwrap();
            let mut rng = rng_from_seed(p);
            let vals: Vec<i64> = (0..20).map(|_| s.sample(&mut rng).unwrap().val()).collect();
            assert!(vals.iter().all(|&v| (5 - p as i64..=0).contains(&v)), "{vals:?}");
            assert!(vals.iter().any(|&v| v < 0), "p={p}: {vals:?}");
        }
    }
}
