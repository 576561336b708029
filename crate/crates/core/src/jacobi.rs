//! Jacobi defects `J_γ`, their mod-p shadows `J(j,k,l)`, and the invariant
//! λ(γ) with `J(γ) = 𝔭^λ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::{CoeffTable, HomGamma, WindowImages};
use crate::padic::{KElem, Valuation};

/// `J_γ(u,v,w) = γ(γ(u∧v)∧w) + γ(γ(v∧w)∧u) + γ(γ(w∧u)∧v)`.
pub fn jacobi_value(g: &HomGamma, u: &KElem, v: &KElem, w: &KElem) -> Result<KElem> {
    let ctx = g.ctx();
    let t1 = g.eval(&g.eval(u, v)?, w)?;
    let t2 = g.eval(&g.eval(v, w)?, u)?;
    let t3 = g.eval(&g.eval(w, u)?, v)?;
    ctx.add(&ctx.add(&t1, &t2)?, &t3)
}

/// Same as [`jacobi_value`] on basis powers, reusing precomputed images.
fn jacobi_on_basis(g: &HomGamma, images: &WindowImages, j: i64, k: i64, l: i64) -> Result<KElem> {
    let ctx = g.ctx();
    let t1 = g.eval(images.get(j, k), &ctx.kappa_pow(l))?;
    let t2 = g.eval(images.get(k, l), &ctx.kappa_pow(j))?;
    let t3 = g.eval(images.get(l, j), &ctx.kappa_pow(k))?;
    ctx.add(&ctx.add(&t1, &t2)?, &t3)
}

/// `J(j,k,l) = a(j,k)a(j+k+ρ,l) + a(k,l)a(k+l+ρ,j) + a(l,j)a(l+j+ρ,k) mod p`,
/// with all indices reduced by period d.
pub fn j_value(t: &CoeffTable, j: i64, k: i64, l: i64) -> u64 {
    let p = t.p;
    let r = t.rho;
    let s = t.get(j, k) * t.get(j + k + r, l) + t.get(k, l) * t.get(k + l + r, j) + t.get(l, j) * t.get(l + j + r, k);
    s % p
}

/// `J(j,k,l)` over one d-window, computed from the mod-p table alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JTable {
    pub p: u64,
    pub d: i64,
    pub rho: i64,
    pub window_base: i64,
    entries: Vec<u64>,
    /// Some lookup `a(j+k+ρ, ·)` fell below the window base and used the
    /// periodic extension.
    pub extended_lookups: bool,
}

impl JTable {
    pub fn new(t: &CoeffTable) -> Self {
        let (i, d) = (t.window_base, t.d);
        let mut entries = Vec::with_capacity((d * d * d) as usize);
        let mut extended = false;
        for j in i..i + d {
            for k in i..i + d {
                for l in i..i + d {
                    entries.push(j_value(t, j, k, l));
                    extended |= [j + k, k + l, l + j].iter().any(|&s| t.is_extension(s + t.rho));
                }
            }
        }
        JTable { p: t.p, d, rho: t.rho, window_base: i, entries, extended_lookups: extended }
    }

    pub fn get(&self, j: i64, k: i64, l: i64) -> u64 {
        let red = |x: i64| (x - self.window_base).rem_euclid(self.d);
        self.entries[((red(j) * self.d + red(k)) * self.d + red(l)) as usize]
    }

    /// Row `j` of the displayed array `J(j, j+1, l)`, l over the window.
    pub fn display_row(&self, j: i64) -> Vec<u64> {
        (0..self.d).map(|l| self.get(j, j + 1, self.window_base + l)).collect()
    }
}

pub fn j_table(g: &HomGamma) -> Result<JTable> {
    Ok(JTable::new(&g.coeff_table()?))
}

/// λ(γ) with a witness triple and the bounds it was certified against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaReport {
    pub p: u64,
    pub i: i64,
    pub rho: i64,
    pub v: i64,
    pub lambda: i64,
    /// `λ - (3i + 13 - 2p)`.
    #[serde(rename = "y")]
    pub y_main: i64,
    pub witness: [i64; 3],
    /// `3i + 3 + 2v`.
    #[serde(skip)]
    pub lower_bound: i64,
    /// `3i + 3d - 6 + 2ρ`.
    #[serde(skip)]
    pub upper_bound: i64,
}

impl LambdaReport {
    /// `λ - (3i + 3)`, the exponent offset for one-parameter γ.
    pub fn y_one_param(&self) -> i64 {
        self.lambda - (3 * self.i + 3)
    }
}

/// Computes λ(γ) as the least valuation of `J_γ(κ^j, κ^k, κ^l)` over
/// strictly increasing triples of one window.
///
/// `J_γ` is alternating and Z_p-trilinear and `{κ^j : i <= j < i+d}` is a
/// Z_p-basis of `𝔭^i`, so these values generate `J(γ)` as an ideal.
/// Triples with `J(j,k,l) ≠ 0` have valuation exactly `j+k+l+2ρ`; only the
/// vanishing ones need full evaluation.
pub fn lambda(g: &HomGamma) -> Result<LambdaReport> {
    let ctx = g.ctx();
    let (i, d) = (g.level(), g.d());
    let images = g.window_images()?;
    let table = CoeffTable::from_images(ctx, &images)?;
    let rho = table.rho;
    let v = g.val();
    let lower_bound = 3 * i + 3 + 2 * v;
    let upper_bound = 3 * i + 3 * d - 6 + 2 * rho;
    if ctx.capacity() <= upper_bound + d {
        return Err(Error::exhausted(format!(
            "capacity {} must exceed the upper bound {} plus d",
            ctx.capacity(),
            upper_bound
        )));
    }

    let mut best: Option<(i64, [i64; 3])> = None;
    let mut unknown_floor = i64::MAX;
    for j in i..i + d {
        for k in j + 1..i + d {
            for l in k + 1..i + d {
                let level = j + k + l + 2 * rho;
                if j_value(&table, j, k, l) != 0 {
                    if best.is_none_or(|(b, _)| level < b) {
                        best = Some((level, [j, k, l]));
                    }
                    continue;
                }
                // Value lies in 𝔭^{level+1}; it cannot beat an equal or
                // smaller minimum found at a lexicographically earlier triple.
                if best.is_some_and(|(b, _)| b <= level + 1) {
                    continue;
                }
                let jv = jacobi_on_basis(g, &images, j, k, l)?;
                match ctx.val(&jv) {
                    Valuation::Finite(x) => {
                        if best.is_none_or(|(b, _)| x < b) {
                            best = Some((x, [j, k, l]));
                        }
                    }
                    Valuation::Infinite => unknown_floor = unknown_floor.min(jv.abs_prec()),
                }
            }
        }
    }
    let (lam, witness) = match best {
        Some((b, w)) if b < unknown_floor => (b, w),
        Some(_) => return Err(Error::exhausted("a Jacobi value vanishes only to working precision")),
        None => {
            return Err(Error::BoundViolation(
                "all Jacobi values vanish to working precision; λ would be infinite".into(),
            ))
        }
    };
    let report = LambdaReport {
        p: ctx.p(),
        i,
        rho,
        v,
        lambda: lam,
        y_main: lam - (3 * i + 13 - 2 * ctx.p() as i64),
        witness,
        lower_bound,
        upper_bound,
    };
    if !(lower_bound <= lam && lam <= upper_bound) {
        return Err(Error::BoundViolation(format!("λ = {lam} outside [{lower_bound}, {upper_bound}]")));
    }
    if report.y_main < 0 {
        return Err(Error::BoundViolation(format!("y = {} is negative", report.y_main)));
    }
    Ok(report)
}

/// `y = λ - (3i + 3)` for γ = c·ϑ_a with c a unit; checked to lie in
/// {0, 1, 2}, and to vanish for p = 5.
pub fn y_one_param(g: &HomGamma) -> Result<i64> {
    g.one_param_form().ok_or(Error::NotOneParameter)?;
    let y = lambda(g)?.y_one_param();
    if !(0..=2).contains(&y) {
        return Err(Error::BoundViolation(format!("one-parameter y = {y} outside {{0,1,2}}")));
    }
    if g.ctx().p() == 5 && y != 0 {
        return Err(Error::BoundViolation(format!("p = 5 but y = {y}")));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeCtx;
    use std::sync::Arc;

    fn theta(p: u64, i: i64, a: i64) -> HomGamma {
        let ctx = Arc::new(PrimeCtx::for_level(p, i).unwrap());
        HomGamma::theta_a(ctx, i, a).unwrap()
    }

    #[test]
    fn jacobi_is_alternating() {
        let g = theta(7, 1, 2);
        let c = g.ctx();
        let u = c.from_coeffs(1, &[1, 2, 3]).unwrap();
        let v = c.from_coeffs(1, &[4, 0, 1, 1]).unwrap();
        let w = c.from_coeffs(2, &[5, 3]).unwrap();
        assert!(c.is_zero(&jacobi_value(&g, &u, &u, &w).unwrap()));
        let s = c.add(&jacobi_value(&g, &u, &v, &w).unwrap(), &jacobi_value(&g, &v, &u, &w).unwrap()).unwrap();
        assert!(c.is_zero(&s));
    }

    #[test]
    fn p7_leading_digit_matches_table() {
        let g = theta(7, 0, 2);
        let c = g.ctx();
        let jv = jacobi_value(&g, &c.kappa_pow(0), &c.kappa_pow(1), &c.kappa_pow(2)).unwrap();
        assert_eq!(c.leading_coeff(&jv, 3).unwrap(), 4);
    }

    #[test]
    fn p7_jtable_entries() {
        let t2 = j_table(&theta(7, 0, 2)).unwrap();
        assert_eq!((t2.get(0, 1, 2), t2.get(0, 1, 5)), (4, 5));
        let t3 = j_table(&theta(7, 0, 3)).unwrap();
        assert_eq!((t3.get(3, 4, 0), t3.get(0, 1, 2)), (6, 1));
        for j in 0..6 {
            for l in 0..6 {
                assert_eq!(t2.get(j, j, l), 0);
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let r = lambda(&theta(5, 0, 2)).unwrap();
        assert_eq!((r.lambda, r.y_main), (3, 0));
        let r = lambda(&theta(7, 0, 2)).unwrap();
        assert_eq!(r.lambda, 3);
        assert_eq!(r.witness, [0, 1, 2]);
        assert_eq!(lambda(&theta(7, 3, 2)).unwrap().lambda, 14);
        let json = serde_json::to_string(&lambda(&theta(7, 3, 2)).unwrap()).unwrap();
        assert!(json.starts_with(r#"{"p":7,"i":3,"rho":0,"v":0,"lambda":14,"y":"#));
    }

    #[test]
    fn one_parameter_y() {
        for i in 0..12 {
            assert_eq!(y_one_param(&theta(5, i, 2)).unwrap(), 0);
        }
        assert_eq!(y_one_param(&theta(13, 8, 4)).unwrap(), 2);
        assert_eq!(y_one_param(&theta(11, 10, 4)).unwrap(), 2);
        let g = theta(7, 0, 2);
        let scaled = g.scaled(&g.ctx().kappa_pow(0)).unwrap();
        assert!(y_one_param(&scaled).is_ok());
        let two = HomGamma::new(g.ctx_arc().clone(), 0, [(2, g.ctx().one()), (3, g.ctx().one())].into_iter().collect())
            .unwrap();
        assert_eq!(y_one_param(&two).unwrap_err(), Error::NotOneParameter);
    }
}
