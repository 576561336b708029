//! The finite Lie rings `L_{i,m}(γ) = 𝔭^i / 𝔭^m` with bracket
//! `[x + 𝔭^m, y + 𝔭^m] = γ(x ∧ y) + 𝔭^m`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::HomGamma;
use crate::howell::HowellForm;
use crate::padic::{KElem, PrimeCtx, Valuation};

/// Element of L in generator coordinates, `x_j` reduced mod `p^{o_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LElem(pub Vec<u64>);

impl LElem {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiCheck {
    Pass,
    /// Generator indices `j < k < l` whose Jacobi sum is nonzero.
    Fail([usize; 3]),
}

impl JacobiCheck {
    pub fn passed(self) -> bool {
        self == JacobiCheck::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralSeries {
    /// `log_p |L_n|` for `n = 1, 2, ...` until the series reaches zero or
    /// stops shrinking.
    pub orders: Vec<u32>,
    /// `None` when the series stabilizes at a nonzero term.
    pub class: Option<usize>,
}

/// Presentation on generators `g_j = κ^{i+j} + 𝔭^m`, `0 <= j < d`.
#[derive(Clone, Debug)]
pub struct LieRingPresentation {
    ctx: Arc<PrimeCtx>,
    i: i64,
    m: i64,
    orders: Vec<u32>,
    moduli: Vec<u64>,
    /// `brackets[j][k]` are the coordinates of `[g_j, g_k]`.
    brackets: Vec<Vec<LElem>>,
}

#[derive(Serialize)]
struct ExportSchema<'a> {
    p: u64,
    i: i64,
    m: i64,
    orders: &'a [u32],
    brackets: BTreeMap<String, &'a [u64]>,
}

impl LieRingPresentation {
    pub fn build(g: &HomGamma, m: i64) -> Result<Self> {
        let ctx = g.ctx_arc().clone();
        let (i, d, p) = (g.level(), g.d(), ctx.p());
        if m <= i {
            return Err(Error::InvalidGamma(format!("need m > i, got m = {m}, i = {i}")));
        }
        if m - i > ctx.capacity() {
            return Err(Error::exhausted(format!("m - i = {} exceeds capacity {}", m - i, ctx.capacity())));
        }
        let orders: Vec<u32> = (0..d).map(|j| ((m - i - j).max(0) as u32).div_ceil(d as u32)).collect();
        let moduli: Vec<u64> = orders.iter().map(|&o| p.pow(o)).collect();
        let mut brackets = vec![vec![LElem(vec![0; d as usize]); d as usize]; d as usize];
        for j in 0..d {
            for k in j + 1..d {
                let y = g.eval(&ctx.kappa_pow(i + j), &ctx.kappa_pow(i + k))?;
                if y.abs_prec() < m {
                    return Err(Error::exhausted(format!("[g_{j}, g_{k}] known only to 𝔭^{}", y.abs_prec())));
                }
                // p^{o_j} g_j = 0 must force p^{o_j}[g_j, g_k] = 0, likewise for k.
                if let Valuation::Finite(v) = ctx.val(&y) {
                    let o = orders[j as usize].min(orders[k as usize]) as i64;
                    if v + d * o < m {
                        return Err(Error::NotWellDefined(format!(
                            "p^{o}·γ(κ^{} ∧ κ^{}) has valuation {} < m = {m}",
                            i + j,
                            i + k,
                            v + d * o
                        )));
                    }
                }
                let c = ctx.coords(&y, i)?;
                let x = LElem(c.iter().zip(&moduli).map(|(&c, &q)| c % q).collect());
                let neg = LElem(x.0.iter().zip(&moduli).map(|(&c, &q)| (q - c) % q).collect());
                brackets[j as usize][k as usize] = x;
                brackets[k as usize][j as usize] = neg;
            }
        }
        Ok(LieRingPresentation { ctx, i, m, orders, moduli, brackets })
    }

    pub fn ctx(&self) -> &PrimeCtx {
        &self.ctx
    }

    pub fn level(&self) -> i64 {
        self.i
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// `log_p |L|`.
    pub fn order_exponent(&self) -> u32 {
        self.orders.iter().sum()
    }

    pub fn structure_constant(&self, j: usize, k: usize) -> &LElem {
        &self.brackets[j][k]
    }

    pub fn elem(&self, coords: &[i64]) -> LElem {
        LElem(coords.iter().zip(&self.moduli).map(|(&x, &q)| x.rem_euclid(q as i64) as u64).collect())
    }

    pub fn generator(&self, j: usize) -> LElem {
        let mut v = vec![0; self.dim()];
        v[j] = 1;
        self.elem(&v)
    }

    /// Image of `x + 𝔭^m` for `x ∈ 𝔭^i`.
    pub fn from_kelem(&self, x: &KElem) -> Result<LElem> {
        if x.abs_prec() < self.m {
            return Err(Error::exhausted(format!("element known only to 𝔭^{}", x.abs_prec())));
        }
        let c = self.ctx.coords(x, self.i)?;
        Ok(LElem(c.iter().zip(&self.moduli).map(|(&c, &q)| c % q).collect()))
    }

    pub fn to_kelem(&self, x: &LElem) -> KElem {
        let coords: Vec<i64> = x.0.iter().map(|&c| c as i64).collect();
        self.ctx.from_coeffs(self.i, &coords).expect("coordinates are reduced")
    }

    pub fn add(&self, x: &LElem, y: &LElem) -> LElem {
        LElem(x.0.iter().zip(&y.0).zip(&self.moduli).map(|((&a, &b), &q)| (a + b) % q).collect())
    }

    pub fn neg(&self, x: &LElem) -> LElem {
        LElem(x.0.iter().zip(&self.moduli).map(|(&a, &q)| (q - a) % q).collect())
    }

    pub fn bracket(&self, x: &LElem, y: &LElem) -> LElem {
        let zm = self.ctx.zmod();
        let n = self.dim();
        let mut acc = vec![0u64; n];
        for (j, &xj) in x.0.iter().enumerate() {
            if xj == 0 {
                continue;
            }
            for (k, &yk) in y.0.iter().enumerate() {
                if yk == 0 || j == k {
                    continue;
                }
                let f = zm.mul(xj, yk);
                for (t, &b) in self.brackets[j][k].0.iter().enumerate() {
                    acc[t] = zm.add(acc[t], zm.mul(f, b));
                }
            }
        }
        LElem(acc.iter().zip(&self.moduli).map(|(&a, &q)| a % q).collect())
    }

    fn jacobi_sum(&self, x: &LElem, y: &LElem, z: &LElem) -> LElem {
        let a = self.bracket(&self.bracket(x, y), z);
        let b = self.bracket(&self.bracket(y, z), x);
        let c = self.bracket(&self.bracket(z, x), y);
        self.add(&self.add(&a, &b), &c)
    }

    /// Jacobi identity on generator triples; the sum is alternating and
    /// trilinear, so `j < k < l` suffices. Returns the first violation.
    pub fn check_jacobi(&self) -> JacobiCheck {
        let n = self.dim();
        let g: Vec<LElem> = (0..n).map(|j| self.generator(j)).collect();
        for j in 0..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    if !self.jacobi_sum(&g[j], &g[k], &g[l]).is_zero() {
                        return JacobiCheck::Fail([j, k, l]);
                    }
                }
            }
        }
        JacobiCheck::Pass
    }

    /// Embeds `L` into `(Z/p^E)^d`, `E = max o_j`, via `x_j ↦ p^{E-o_j} x_j`.
    fn embed(&self, x: &LElem) -> Vec<u64> {
        let e = self.orders.iter().copied().max().unwrap_or(0);
        let p = self.ctx.p();
        x.0.iter().zip(&self.orders).map(|(&c, &o)| c * p.pow(e - o)).collect()
    }

    fn unembed(&self, v: &[u64]) -> LElem {
        let e = self.orders.iter().copied().max().unwrap_or(0);
        let p = self.ctx.p();
        LElem(v.iter().zip(&self.orders).zip(&self.moduli).map(|((&c, &o), &q)| (c / p.pow(e - o)) % q).collect())
    }

    /// Span of the given elements as a Howell form in the embedding.
    pub fn span(&self, gens: &[LElem]) -> HowellForm {
        let e = self.orders.iter().copied().max().unwrap_or(0);
        let rows: Vec<Vec<u64>> = gens.iter().map(|x| self.embed(x)).collect();
        HowellForm::new(&rows, self.dim(), self.ctx.p(), e)
    }

    /// `L_1 = L`, `L_{n+1} = [L_n, L]`. The series is cut off after `p`
    /// steps; a nonzero `L_{p+1}` is reported as an error.
    pub fn lower_central_series(&self) -> Result<CentralSeries> {
        let n = self.dim();
        let gens: Vec<LElem> = (0..n).map(|j| self.generator(j)).collect();
        let mut current = self.span(&gens);
        let mut orders = Vec::new();
        // Each term lies in the previous one, so equal orders mean the series is stuck.
        while !current.is_zero() {
            let order = current.order_exponent();
            if orders.last() == Some(&order) {
                return Ok(CentralSeries { orders, class: None });
            }
            orders.push(order);
            let layer: Vec<LElem> = current.rows().iter().map(|r| self.unembed(r)).collect();
            let next: Vec<LElem> =
                layer.iter().flat_map(|x| gens.iter().map(move |g| (x, g))).map(|(x, g)| self.bracket(x, g)).collect();
            current = self.span(&next);
        }
        let class = Some(orders.len());
        Ok(CentralSeries { orders, class })
    }

    /// Multiplication by θ on `𝔭^i/𝔭^m`, as an endomorphism of L.
    pub fn theta_map(&self, x: &LElem) -> Result<LElem> {
        self.from_kelem(&self.ctx.mul(&self.ctx.theta(), &self.to_kelem(x))?)
    }

    /// Checks `θ[g_j, g_k] = [θg_j, θg_k]` on all generator pairs.
    pub fn theta_is_automorphism(&self) -> Result<bool> {
        let n = self.dim();
        for j in 0..n {
            for k in j + 1..n {
                let (gj, gk) = (self.generator(j), self.generator(k));
                let lhs = self.theta_map(&self.bracket(&gj, &gk))?;
                let rhs = self.bracket(&self.theta_map(&gj)?, &self.theta_map(&gk)?);
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let brackets = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .map(|(j, k)| (format!("{j},{k}"), self.brackets[j][k].0.as_slice()))
            .collect();
        let schema = ExportSchema { p: self.ctx.p(), i: self.i, m: self.m, orders: &self.orders, brackets };
        serde_json::to_string(&schema).expect("plain data serializes")
    }
}
