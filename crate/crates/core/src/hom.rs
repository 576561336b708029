//! θ-equivariant alternating maps `γ = Σ c_a ϑ_a` from `𝔭^i ∧ 𝔭^i` to
//! `𝔭^{2i+1}`, their offset ρ(γ) and the mod-p coefficient table a(j,k).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ElementLiteral, KElem, PrimeCtx, Valuation};

/// `ϑ_a(x ∧ y) = σ_a(x)σ_{1-a}(y) - σ_{1-a}(x)σ_a(y)`.
pub fn theta_a_eval(ctx: &PrimeCtx, a: i64, x: &KElem, y: &KElem) -> Result<KElem> {
    check_index(ctx, a)?;
    let b = 1 - a;
    let t1 = ctx.mul(&ctx.galois(a, x)?, &ctx.galois(b, y)?)?;
    let t2 = ctx.mul(&ctx.galois(b, x)?, &ctx.galois(a, y)?)?;
    ctx.sub(&t1, &t2)
}

fn check_index(ctx: &PrimeCtx, a: i64) -> Result<()> {
    let hi = (ctx.p() as i64 - 1) / 2;
    if !(2..=hi).contains(&a) {
        return Err(Error::IndexOutOfRange { index: a, lo: 2, hi });
    }
    Ok(())
}

/// A homomorphism γ ∈ Ĥ_i in coefficient form.
#[derive(Clone, Debug)]
pub struct HomGamma {
    ctx: Arc<PrimeCtx>,
    level: i64,
    coeffs: BTreeMap<i64, KElem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Surjectivity {
    pub surjective: bool,
    /// Minimal valuation of `γ(κ^j ∧ κ^k)` over the window.
    pub min_val: i64,
}

impl HomGamma {
    /// Zero coefficients are dropped; every remaining `c_a` must have
    /// valuation at least `5 - p`.
    pub fn new(ctx: Arc<PrimeCtx>, level: i64, coeffs: BTreeMap<i64, KElem>) -> Result<Self> {
        if level < 0 {
            return Err(Error::InvalidGamma(format!("level {level} is negative")));
        }
        let floor = 5 - ctx.p() as i64;
        let mut kept = BTreeMap::new();
        for (a, c) in coeffs {
            check_index(&ctx, a)?;
            ctx.check(&c)?;
            match ctx.val(&c) {
                Valuation::Infinite => continue,
                Valuation::Finite(v) if v < floor => {
                    return Err(Error::InvalidGamma(format!("val(c_{a}) = {v} is below 5 - p = {floor}")))
                }
                Valuation::Finite(_) => {
                    kept.insert(a, c);
                }
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidGamma("all coefficients vanish".into()));
        }
        Ok(HomGamma { ctx, level, coeffs: kept })
    }

    pub fn theta_a(ctx: Arc<PrimeCtx>, level: i64, a: i64) -> Result<Self> {
        let one = ctx.one();
        Self::one_param(ctx, level, a, one)
    }

    pub fn one_param(ctx: Arc<PrimeCtx>, level: i64, a: i64, c: KElem) -> Result<Self> {
        check_index(&ctx, a)?;
        Self::new(ctx, level, BTreeMap::from([(a, c)]))
    }

    pub fn ctx(&self) -> &PrimeCtx {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> &Arc<PrimeCtx> {
        &self.ctx
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, KElem> {
        &self.coeffs
    }

    pub fn d(&self) -> i64 {
        self.ctx.di()
    }

    /// `val(γ) = min_a val(c_a)`.
    pub fn val(&self) -> i64 {
        self.coeffs.values().filter_map(|c| self.ctx.val(c).finite()).min().expect("nonzero coefficient")
    }

    /// `Some((a, c))` when γ = c·ϑ_a for a unit c.
    pub fn one_param_form(&self) -> Option<(i64, &KElem)> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (&a, c) = self.coeffs.iter().next()?;
        (self.ctx.val(c) == Valuation::Finite(0)).then_some((a, c))
    }

    /// Same γ considered at another level.
    pub fn at_level(&self, level: i64) -> Result<Self> {
        Self::new(self.ctx.clone(), level, self.coeffs.clone())
    }

    /// `c·γ`.
    pub fn scaled(&self, c: &KElem) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|(&a, x)| Ok((a, self.ctx.mul(x, c)?))).collect::<Result<_>>()?;
        Self::new(self.ctx.clone(), self.level, coeffs)
    }

    /// `γ(x ∧ y) = Σ_a c_a ϑ_a(x ∧ y)`.
    pub fn eval(&self, x: &KElem, y: &KElem) -> Result<KElem> {
        let ctx = &*self.ctx;
        let mut acc: Option<KElem> = None;
        for (&a, c) in &self.coeffs {
            let term = ctx.mul(c, &theta_a_eval(ctx, a, x, y)?)?;
            acc = Some(match acc {
                None => term,
                Some(s) => ctx.add(&s, &term)?,
            });
        }
        Ok(acc.expect("nonzero coefficient"))
    }

    /// `γ(κ^j ∧ κ^k)` for all j, k in the window `[i, i+d)`.
    pub fn window_images(&self) -> Result<WindowImages> {
        let d = self.d();
        let i = self.level;
        let ctx = &*self.ctx;
        let mut images = vec![ctx.zero(); (d * d) as usize];
        for j in 0..d {
            for k in j + 1..d {
                let y = self.eval(&ctx.kappa_pow(i + j), &ctx.kappa_pow(i + k))?;
                images[(k * d + j) as usize] = ctx.neg(&y)?;
                images[(j * d + k) as usize] = y;
            }
        }
        Ok(WindowImages { base: i, d, images })
    }

    pub fn surjectivity(&self) -> Result<Surjectivity> {
        self.window_images()?.surjectivity(&self.ctx)
    }

    pub fn check_surjective(&self) -> Result<bool> {
        Ok(self.surjectivity()?.surjective)
    }

    pub fn offset(&self) -> Result<i64> {
        self.window_images()?.offset(&self.ctx)
    }

    pub fn coeff_table(&self) -> Result<CoeffTable> {
        CoeffTable::from_images(&self.ctx, &self.window_images()?)
    }

    /// `a(j,k)` recomputed from `γ(κ^j ∧ κ^k)` for arbitrary `j, k >= i`,
    /// without any period reduction.
    pub fn raw_coeff(&self, rho: i64, j: i64, k: i64) -> Result<u64> {
        let ctx = &*self.ctx;
        let y = self.eval(&ctx.kappa_pow(j), &ctx.kappa_pow(k))?;
        ctx.leading_coeff(&y, j + k + rho)
    }

    pub fn to_file(&self) -> GammaFile {
        GammaFile {
            p: self.ctx.p(),
            precision: self.ctx.precision(),
            i: self.level,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.to_string(), self.ctx.to_literal(c))).collect(),
        }
    }

    pub fn from_file(file: &GammaFile) -> Result<Self> {
        let ctx = Arc::new(PrimeCtx::new(file.p, file.precision)?);
        Self::from_file_in(ctx, file)
    }

    /// Reads the coefficients into an existing context of the same prime.
    pub fn from_file_in(ctx: Arc<PrimeCtx>, file: &GammaFile) -> Result<Self> {
        if ctx.p() != file.p {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = BTreeMap::new();
        for (key, lit) in &file.coeffs {
            let a: i64 = key.parse().map_err(|_| Error::Parse(format!("coefficient key `{key}` is not an index")))?;
            coeffs.insert(a, ctx.from_literal(lit)?);
        }
        Self::new(ctx, file.i, coeffs)
    }
}

/// On-disk form of γ:
/// `{"p":…, "precision":…, "i":…, "coeffs": {"2": <element literal>, …}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaFile {
    pub p: u64,
    pub precision: u32,
    pub i: i64,
    pub coeffs: BTreeMap<String, ElementLiteral>,
}

/// Images of the basis pairs of one d-window.
#[derive(Clone, Debug)]
pub struct WindowImages {
    base: i64,
    d: i64,
    images: Vec<KElem>,
}

impl WindowImages {
    pub fn base(&self) -> i64 {
        self.base
    }

    /// `γ(κ^j ∧ κ^k)` for absolute indices j, k in the window.
    pub fn get(&self, j: i64, k: i64) -> &KElem {
        let (j, k) = (j - self.base, k - self.base);
        assert!((0..self.d).contains(&j) && (0..self.d).contains(&k));
        &self.images[(j * self.d + k) as usize]
    }

    fn pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (i, d) = (self.base, self.d);
        (i..i + d).flat_map(move |j| (j + 1..i + d).map(move |k| (j, k)))
    }

    /// Minimum of `val(image) - shift(j,k)` over the window pairs, refusing
    /// to answer when an image vanishing to precision could undercut it.
    fn certified_min(&self, ctx: &PrimeCtx, shift: impl Fn(i64, i64) -> i64) -> Result<i64> {
        let mut best: Option<i64> = None;
        let mut unknown_floor = i64::MAX;
        for (j, k) in self.pairs() {
            let y = self.get(j, k);
            match ctx.val(y) {
                Valuation::Finite(v) => {
                    let s = v - shift(j, k);
                    best = Some(best.map_or(s, |b| b.min(s)));
                }
                Valuation::Infinite => unknown_floor = unknown_floor.min(y.abs_prec() - shift(j, k)),
            }
        }
        match best {
            Some(b) if b < unknown_floor => Ok(b),
            Some(_) => Err(Error::exhausted("a window image vanishes only to working precision")),
            None => Err(Error::InvalidGamma("γ vanishes on the window to working precision".into())),
        }
    }

    pub fn surjectivity(&self, ctx: &PrimeCtx) -> Result<Surjectivity> {
        let min_val = self.certified_min(ctx, |_, _| 0)?;
        Ok(Surjectivity { surjective: min_val == 2 * self.base + 1, min_val })
    }

    /// `ρ(γ) = min (val γ(κ^j ∧ κ^k) - j - k)` over the window.
    pub fn offset(&self, ctx: &PrimeCtx) -> Result<i64> {
        let s = self.surjectivity(ctx)?;
        if !s.surjective {
            return Err(Error::NotSurjective { min_val: s.min_val, expected: 2 * self.base + 1 });
        }
        self.certified_min(ctx, |j, k| j + k)
    }
}

/// The table of leading digits `a(j,k)` on one d-window, with ρ(γ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub p: u64,
    pub d: i64,
    pub rho: i64,
    pub window_base: i64,
    /// Row-major `a(j,k)` for `j, k ∈ [base, base+d)`.
    pub entries: Vec<u64>,
}

impl CoeffTable {
    pub fn from_images(ctx: &PrimeCtx, images: &WindowImages) -> Result<Self> {
        let rho = images.offset(ctx)?;
        let (i, d) = (images.base, images.d);
        let mut entries = vec![0; (d * d) as usize];
        for j in i..i + d {
            for k in i..i + d {
                if j != k {
                    entries[((j - i) * d + (k - i)) as usize] = ctx.leading_coeff(images.get(j, k), j + k + rho)?;
                }
            }
        }
        Ok(CoeffTable { p: ctx.p(), d, rho, window_base: i, entries })
    }

    /// Index reduced into the window by period d.
    pub fn reduce(&self, j: i64) -> i64 {
        self.window_base + (j - self.window_base).rem_euclid(self.d)
    }

    /// True when the index lies below the window base, i.e. the lookup
    /// relies on extending `a` by periodicity.
    pub fn is_extension(&self, j: i64) -> bool {
        j < self.window_base
    }

    /// `a(j,k)` for arbitrary integers, by period-d reduction.
    pub fn get(&self, j: i64, k: i64) -> u64 {
        let (j, k) = (self.reduce(j) - self.window_base, self.reduce(k) - self.window_base);
        self.entries[(j * self.d + k) as usize]
    }

    /// `c(k) = a(k+1, k)`.
    pub fn c(&self, k: i64) -> u64 {
        self.get(k + 1, k)
    }

    pub fn row(&self, j: i64) -> Vec<u64> {
        (0..self.d).map(|k| self.get(j, self.window_base + k)).collect()
    }
}
