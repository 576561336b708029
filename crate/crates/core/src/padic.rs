//! Truncated arithmetic in `O = Z_p[θ]` and `K = Q_p(θ)` for a primitive
//! p-th root of unity θ.
//!
//! Elements are stored in the basis of powers of the uniformizer `κ = θ - 1`:
//! an element is `κ^shift · Σ_{t<d} c_t κ^t` with residues `c_t mod p^N`.
//! Since `p^N O = 𝔭^{dN}`, the coefficient vector represents `O / 𝔭^{dN}`
//! exactly, and reading valuations off the coefficients is a single pass.
//!
//! Every element carries a relative precision: the unit part is known modulo
//! `𝔭^prec`, so the element itself is known modulo `𝔭^{shift + prec}`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residue arithmetic modulo `m < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zmod {
    m: u64,
}

impl Zmod {
    pub fn new(m: u64) -> Self {
        assert!((2..(1 << 62)).contains(&m));
        Zmod { m }
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.m
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn from_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }

    /// Symmetric representative in `(-m/2, m/2]`.
    pub fn to_i64(self, a: u64) -> i64 {
        if a > self.m / 2 {
            a as i64 - self.m as i64
        } else {
            a as i64
        }
    }

    pub fn pow(self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u64) -> Option<u64> {
        let (mut r0, mut r1) = (self.m as i128, (a % self.m) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return None;
        }
        Some(s0.rem_euclid(self.m as i128) as u64)
    }
}

/// p-adic valuation of a residue modulo `p^n`; `n` for zero.
fn vp(mut c: u64, p: u64, n: u32) -> u32 {
    if c == 0 {
        return n;
    }
    let mut e = 0;
    while c.is_multiple_of(p) {
        c /= p;
        e += 1;
    }
    e
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Multiplicative order of `g` modulo the prime `p`, by brute force.
fn order_mod(g: u64, p: u64) -> u64 {
    let mut x = g % p;
    let mut k = 1;
    while x != 1 {
        x = x * g % p;
        k += 1;
    }
    k
}

/// Valuation of an element of `K`; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct CtxTag {
    p: u64,
    n: u32,
}

/// An element `κ^shift · Σ c_t κ^t` of `K`, known modulo `𝔭^{shift + prec}`.
///
/// The representation is not canonical; compare elements with
/// [`PrimeCtx::eq_within`].
#[derive(Clone, Debug)]
pub struct KElem {
    tag: CtxTag,
    shift: i64,
    coeffs: Vec<u64>,
    prec: i64,
}

impl KElem {
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Precision of the unit part, in κ-digits.
    pub fn rel_prec(&self) -> i64 {
        self.prec
    }

    /// The element is known modulo `𝔭^{abs_prec}`.
    pub fn abs_prec(&self) -> i64 {
        self.shift + self.prec
    }
}

/// JSON literal for an element: `{"shift": s, "coeffs": [c_0, ..., c_{d-1}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementLiteral {
    pub shift: i64,
    pub coeffs: Vec<i64>,
}

/// Canonical κ-adic digits `b_n ∈ {0..p-1}` for positions `start..start+len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaDigits {
    pub start: i64,
    pub digits: Vec<u64>,
}

impl KappaDigits {
    pub fn digit(&self, n: i64) -> u64 {
        if n < self.start {
            return 0;
        }
        self.digits.get((n - self.start) as usize).copied().unwrap_or(0)
    }
}

struct GaloisData {
    /// Row t holds the coefficients of `σ_j(κ^t)` for `t < d`.
    matrix: Vec<u64>,
    /// `σ_j(κ) / κ` and its inverse.
    eps: Vec<u64>,
    eps_inv: Vec<u64>,
}

/// Immutable arithmetic context for one prime and one working precision.
pub struct PrimeCtx {
    p: u64,
    d: usize,
    n: u32,
    zm: Zmod,
    r: u64,
    omega: u64,
    /// `φ_0..φ_d`: coefficients of `((1+x)^p - 1)/x`, so `φ_t = binom(p, t+1)`.
    min_poly: Vec<u64>,
    galois: Vec<OnceLock<GaloisData>>,
}

impl fmt::Debug for PrimeCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeCtx")
            .field("p", &self.p)
            .field("precision", &self.n)
            .field("r", &self.r)
            .field("omega", &self.omega)
            .finish()
    }
}

/// Binomial coefficients `binom(n, 0..=n)` modulo `zm`.
fn binomials(n: u64, zm: Zmod) -> Vec<u64> {
    let mut row = vec![1 % zm.modulus()];
    for _ in 0..n {
        let mut next = vec![1 % zm.modulus(); row.len() + 1];
        for t in 1..row.len() {
            next[t] = zm.add(row[t - 1], row[t]);
        }
        row = next;
    }
    row
}

impl PrimeCtx {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n < 2 {
            return Err(Error::PrecisionTooSmall(n));
        }
        let mut modulus: u64 = 1;
        for _ in 0..n {
            modulus = modulus.checked_mul(p).filter(|&m| m < (1 << 62)).ok_or(Error::PrecisionTooLarge { p, n })?;
        }
        let zm = Zmod::new(modulus);
        let d = (p - 1) as usize;
        let r = (2..p).find(|&g| order_mod(g, p) == p - 1).expect("primitive root exists");
        // Teichmüller lift: iterate x -> x^p until it stabilises mod p^N.
        let mut omega = r;
        loop {
            let next = zm.pow(omega, p);
            if next == omega {
                break;
            }
            omega = next;
        }
        let binom = binomials(p, zm);
        let min_poly = (0..=d).map(|t| binom[t + 1]).collect();
        let galois = (0..p).map(|_| OnceLock::new()).collect();
        Ok(PrimeCtx { p, d, n, zm, r, omega, min_poly, galois })
    }

    /// Context with the default working precision for level `i`.
    pub fn for_level(p: u64, i: i64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Self::new(p, default_precision(p, i))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn di(&self) -> i64 {
        self.d as i64
    }

    /// p-adic precision N: coefficients are residues mod `p^N`.
    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.zm.modulus()
    }

    pub fn zmod(&self) -> Zmod {
        self.zm
    }

    /// κ-adic capacity `M = dN`.
    pub fn capacity(&self) -> i64 {
        self.d as i64 * self.n as i64
    }

    /// Least primitive root modulo p.
    pub fn r(&self) -> u64 {
        self.r
    }

    /// Teichmüller lift of r: `ω^{p-1} = 1`, `ω ≡ r mod p`.
    pub fn omega(&self) -> u64 {
        self.omega
    }

    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }

    fn tag(&self) -> CtxTag {
        CtxTag { p: self.p, n: self.n }
    }

    pub fn check(&self, a: &KElem) -> Result<()> {
        if a.tag != self.tag() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn elem(&self, shift: i64, coeffs: Vec<u64>, prec: i64) -> KElem {
        KElem { tag: self.tag(), shift, coeffs, prec: prec.min(self.capacity()) }
    }

    // ---- constructors ----

    pub fn zero(&self) -> KElem {
        self.elem(0, vec![0; self.d], self.capacity())
    }

    pub fn int(&self, x: i64) -> KElem {
        let mut c = vec![0; self.d];
        c[0] = self.zm.from_i64(x);
        self.elem(0, c, self.capacity())
    }

    pub fn one(&self) -> KElem {
        self.int(1)
    }

    pub fn kappa_pow(&self, e: i64) -> KElem {
        let mut c = vec![0; self.d];
        c[0] = 1;
        self.elem(e, c, self.capacity())
    }

    pub fn kappa(&self) -> KElem {
        self.kappa_pow(1)
    }

    pub fn theta(&self) -> KElem {
        let mut c = vec![0; self.d];
        c[0] = 1;
        c[1] = 1;
        self.elem(0, c, self.capacity())
    }

    /// `κ^shift · Σ coeffs[t] κ^t`; at most d coefficients, missing ones are zero.
    pub fn from_coeffs(&self, shift: i64, coeffs: &[i64]) -> Result<KElem> {
        if coeffs.len() > self.d {
            return Err(Error::Parse(format!("element has {} coefficients, at most {} allowed", coeffs.len(), self.d)));
        }
        let mut c = vec![0; self.d];
        for (slot, &x) in c.iter_mut().zip(coeffs) {
            *slot = self.zm.from_i64(x);
        }
        Ok(self.elem(shift, c, self.capacity()))
    }

    /// Element given in the θ-power basis: `Σ b_t θ^t`.
    pub fn from_theta(&self, coeffs: &[i64]) -> KElem {
        let mut acc = self.zero();
        let mut power = self.one();
        let theta = self.theta();
        for &b in coeffs {
            acc = self.add_unchecked(&acc, &self.scale_unchecked(&power, self.zm.from_i64(b)));
            power = self.mul_unchecked(&power, &theta);
        }
        acc
    }

    pub fn from_literal(&self, lit: &ElementLiteral) -> Result<KElem> {
        self.from_coeffs(lit.shift, &lit.coeffs)
    }

    pub fn to_literal(&self, a: &KElem) -> ElementLiteral {
        ElementLiteral { shift: a.shift, coeffs: a.coeffs.iter().map(|&c| c as i64).collect() }
    }

    // ---- coefficient-vector kernels ----

    fn mul_kappa_once(&self, c: &mut [u64]) {
        let d = self.d;
        let top = c[d - 1];
        for t in (1..d).rev() {
            c[t] = c[t - 1];
        }
        c[0] = 0;
        if top != 0 {
            for (x, &m) in c.iter_mut().zip(&self.min_poly) {
                *x = self.zm.sub(*x, self.zm.mul(top, m));
            }
        }
    }

    /// Exact division by κ; requires `c_0 ≡ 0 mod p`. Uses `p = -κ·Σ φ_{s+1} κ^s`.
    fn div_kappa_once(&self, c: &mut [u64]) {
        debug_assert_eq!(c[0] % self.p, 0);
        let d = self.d;
        let q = c[0] / self.p;
        for t in 0..d - 1 {
            c[t] = c[t + 1];
        }
        c[d - 1] = 0;
        if q != 0 {
            for (x, &m) in c.iter_mut().zip(&self.min_poly[1..]) {
                *x = self.zm.sub(*x, self.zm.mul(q, m));
            }
        }
    }

    fn mul_coeffs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let d = self.d;
        let zm = self.zm;
        let mut prod = vec![0u64; 2 * d - 1];
        for (s, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if y != 0 {
                    prod[s + t] = zm.add(prod[s + t], zm.mul(x, y));
                }
            }
        }
        for k in (d..2 * d - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for t in 0..d {
                let idx = k - d + t;
                prod[idx] = zm.sub(prod[idx], zm.mul(top, self.min_poly[t]));
            }
        }
        prod.truncate(d);
        prod
    }

    /// `min_t (d·v_p(c_t) + t)`, or `None` when every coefficient vanishes.
    fn rel_val(&self, c: &[u64]) -> Option<i64> {
        c.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(t, &x)| self.d as i64 * vp(x, self.p, self.n) as i64 + t as i64)
            .min()
    }

    fn rel_val_or_prec(&self, a: &KElem) -> i64 {
        self.rel_val(&a.coeffs).map_or(a.prec, |v| v.min(a.prec))
    }

    /// Unit part multiplied by `κ^t`, `t >= 0`.
    fn raise(&self, c: &[u64], t: i64) -> Vec<u64> {
        if t >= self.capacity() {
            return vec![0; self.d];
        }
        let mut out = c.to_vec();
        for _ in 0..t {
            self.mul_kappa_once(&mut out);
        }
        out
    }

    fn unit_inverse(&self, u: &[u64]) -> Vec<u64> {
        let c0inv = self.zm.inv(u[0]).expect("unit has invertible constant term");
        let mut x = vec![0; self.d];
        x[0] = c0inv;
        let mut two = vec![0; self.d];
        two[0] = 2 % self.modulus();
        let mut known = 1;
        while known < self.capacity() {
            let ux = self.mul_coeffs(u, &x);
            let corr: Vec<u64> = two.iter().zip(&ux).map(|(&a, &b)| self.zm.sub(a, b)).collect();
            x = self.mul_coeffs(&x, &corr);
            known *= 2;
        }
        x
    }

    fn pow_coeffs(&self, base: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = vec![0; self.d];
        acc[0] = 1;
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_coeffs(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_coeffs(&b, &b);
            }
        }
        acc
    }

    // ---- ring operations ----

    fn add_unchecked(&self, a: &KElem, b: &KElem) -> KElem {
        let s = a.shift.min(b.shift);
        let ca = self.raise(&a.coeffs, a.shift - s);
        let cb = self.raise(&b.coeffs, b.shift - s);
        let prec = (a.abs_prec().min(b.abs_prec()) - s).min(self.capacity());
        let c = ca.iter().zip(&cb).map(|(&x, &y)| self.zm.add(x, y)).collect();
        self.elem(s, c, prec)
    }

    pub fn add(&self, a: &KElem, b: &KElem) -> Result<KElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn neg(&self, a: &KElem) -> Result<KElem> {
        self.check(a)?;
        let c = a.coeffs.iter().map(|&x| self.zm.neg(x)).collect();
        Ok(self.elem(a.shift, c, a.prec))
    }

    pub fn sub(&self, a: &KElem, b: &KElem) -> Result<KElem> {
        self.add(a, &self.neg(b)?)
    }

    fn mul_unchecked(&self, a: &KElem, b: &KElem) -> KElem {
        let prec = (a.prec + self.rel_val_or_prec(b)).min(b.prec + self.rel_val_or_prec(a));
        let c = self.mul_coeffs(&a.coeffs, &b.coeffs);
        self.elem(a.shift + b.shift, c, prec)
    }

    pub fn mul(&self, a: &KElem, b: &KElem) -> Result<KElem> {
        self.check(a)?;
        self.check(b)?;
        let out = self.mul_unchecked(a, b);
        if out.prec <= 0 {
            return Err(Error::exhausted("product is known to no κ-digit"));
        }
        Ok(out)
    }

    fn scale_unchecked(&self, a: &KElem, k: u64) -> KElem {
        let e = vp(k % self.modulus(), self.p, self.n) as i64;
        let c = a.coeffs.iter().map(|&x| self.zm.mul(x, k)).collect();
        self.elem(a.shift, c, a.prec + self.di() * e)
    }

    /// Multiply by the p-adic integer represented by `k mod p^N`.
    pub fn scale(&self, a: &KElem, k: u64) -> Result<KElem> {
        self.check(a)?;
        Ok(self.scale_unchecked(a, k))
    }

    pub fn scale_i64(&self, a: &KElem, k: i64) -> Result<KElem> {
        self.scale(a, self.zm.from_i64(k))
    }

    /// Multiplicative inverse in K.
    pub fn inverse(&self, a: &KElem) -> Result<KElem> {
        let u = self.normalized(a)?;
        if self.rel_val(&u.coeffs) != Some(0) || u.prec <= 0 {
            return Err(Error::exhausted("cannot invert an element that is zero to working precision"));
        }
        let c = self.unit_inverse(&u.coeffs);
        Ok(self.elem(-u.shift, c, u.prec))
    }

    pub fn pow(&self, a: &KElem, e: i64) -> Result<KElem> {
        self.check(a)?;
        let base = if e < 0 { self.inverse(a)? } else { a.clone() };
        let mut acc = self.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b)?;
            }
            k >>= 1;
            if k > 0 {
                b = self.mul(&b, &b)?;
            }
        }
        Ok(acc)
    }

    // ---- valuation and digits ----

    pub fn val(&self, a: &KElem) -> Valuation {
        match self.rel_val(&a.coeffs) {
            Some(v) if v < a.prec => Valuation::Finite(a.shift + v),
            _ => Valuation::Infinite,
        }
    }

    /// True when the element vanishes to its known precision.
    pub fn is_zero(&self, a: &KElem) -> bool {
        self.val(a).is_infinite()
    }

    /// Equality up to the smaller of the two known precisions.
    pub fn eq_within(&self, a: &KElem, b: &KElem) -> Result<bool> {
        Ok(self.is_zero(&self.sub(a, b)?))
    }

    /// Semantic value `a·κ^{-t}`.
    pub fn div_kappa(&self, a: &KElem, t: i64) -> Result<KElem> {
        self.check(a)?;
        let mut out = a.clone();
        out.shift -= t;
        Ok(out)
    }

    pub fn mul_kappa(&self, a: &KElem, t: i64) -> Result<KElem> {
        self.div_kappa(a, -t)
    }

    /// Same element with the valuation moved into the shift, so the unit
    /// part has valuation zero. Zero-to-precision elements are returned as is.
    pub fn normalized(&self, a: &KElem) -> Result<KElem> {
        self.check(a)?;
        let v = match self.rel_val(&a.coeffs) {
            Some(v) if v < a.prec => v,
            _ => return Ok(a.clone()),
        };
        let mut c = a.coeffs.clone();
        for _ in 0..v {
            self.div_kappa_once(&mut c);
        }
        Ok(self.elem(a.shift + v, c, a.prec - v))
    }

    /// Coordinates `x_t` with `a = κ^base Σ_{t<d} x_t κ^t`, residues mod p^N.
    /// Requires `val(a) >= base`; a zero-to-precision element maps to zeros.
    pub fn coords(&self, a: &KElem, base: i64) -> Result<Vec<u64>> {
        let w = self.normalized(a)?;
        if self.is_zero(&w) {
            return Ok(vec![0; self.d]);
        }
        if w.shift < base {
            return Err(Error::ValuationBelow { val: w.shift, t: base });
        }
        Ok(self.raise(&w.coeffs, w.shift - base))
    }

    /// Canonical digits `b_n` with `a ≡ Σ b_n κ^n mod 𝔭^upto`, starting at
    /// position `min(0, shift)`.
    pub fn kappa_digits(&self, a: &KElem, upto: i64) -> Result<KappaDigits> {
        self.check(a)?;
        if upto > a.abs_prec() {
            return Err(Error::exhausted(format!("digits requested up to {upto}, element known to {}", a.abs_prec())));
        }
        let start = a.shift.min(0);
        let len = (upto - start).max(0) as usize;
        let mut digits = vec![0; len];
        let w = self.normalized(a)?;
        if self.is_zero(&w) {
            return Ok(KappaDigits { start, digits });
        }
        let mut c = w.coeffs.clone();
        for pos in w.shift..upto {
            let b = c[0] % self.p;
            digits[(pos - start) as usize] = b;
            c[0] = self.zm.sub(c[0], b);
            self.div_kappa_once(&mut c);
        }
        Ok(KappaDigits { start, digits })
    }

    /// Digit of `a` at position `t`, given `val(a) >= t`.
    pub fn leading_coeff(&self, a: &KElem, t: i64) -> Result<u64> {
        self.check(a)?;
        if a.abs_prec() <= t {
            return Err(Error::exhausted(format!("digit {t} requested, element known to {}", a.abs_prec())));
        }
        match self.val(a) {
            Valuation::Infinite => Ok(0),
            Valuation::Finite(v) if v < t => Err(Error::ValuationBelow { val: v, t }),
            Valuation::Finite(v) if v > t => Ok(0),
            Valuation::Finite(v) => {
                // The minimum d·e + t0 is attained by exactly one coefficient
                // c_{t0} = p^e·w, and p^e ≡ (-1)^e κ^{de} modulo higher terms.
                let rel = v - a.shift;
                let t0 = rel.rem_euclid(self.di()) as usize;
                let e = rel.div_euclid(self.di());
                let mut w = a.coeffs[t0];
                for _ in 0..e {
                    w /= self.p;
                }
                let w = w % self.p;
                Ok(if e % 2 == 0 { w } else { (self.p - w) % self.p })
            }
        }
    }

    // ---- Galois action ----

    fn galois_data(&self, j: u64) -> &GaloisData {
        self.galois[j as usize].get_or_init(|| {
            let d = self.d;
            let binom = binomials(j, self.zm);
            let mut eps = vec![0; d];
            eps[..j as usize].copy_from_slice(&binom[1..=j as usize]);
            let mut sk = eps.clone();
            self.mul_kappa_once(&mut sk);
            let mut matrix = vec![0; d * d];
            let mut row = vec![0; d];
            row[0] = 1;
            for t in 0..d {
                matrix[t * d..(t + 1) * d].copy_from_slice(&row);
                row = self.mul_coeffs(&row, &sk);
            }
            let eps_inv = self.unit_inverse(&eps);
            GaloisData { matrix, eps, eps_inv }
        })
    }

    /// `σ_j`: the automorphism `θ ↦ θ^j`.
    pub fn galois(&self, j: i64, a: &KElem) -> Result<KElem> {
        self.check(a)?;
        let jr = j.rem_euclid(self.p as i64) as u64;
        if jr == 0 {
            return Err(Error::NotCoprime { j, p: self.p });
        }
        if jr == 1 {
            return Ok(a.clone());
        }
        let gd = self.galois_data(jr);
        let d = self.d;
        let mut out = vec![0u64; d];
        for (t, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let row = &gd.matrix[t * d..(t + 1) * d];
            for s in 0..d {
                out[s] = self.zm.add(out[s], self.zm.mul(x, row[s]));
            }
        }
        if a.shift != 0 {
            let base = if a.shift > 0 { &gd.eps } else { &gd.eps_inv };
            let e = self.pow_coeffs(base, a.shift.unsigned_abs());
            out = self.mul_coeffs(&out, &e);
        }
        Ok(self.elem(a.shift, out, a.prec))
    }

    /// Eigenvector `e_x` of `σ = σ_r` with eigenvalue `ω^x`, valuation x and
    /// leading digit 1, obtained by projecting `κ^x` onto the `ω^x`-eigenspace.
    pub fn eigenvector(&self, x: i64) -> Result<KElem> {
        if x < 0 || x >= self.capacity() - self.di() {
            return Err(Error::exhausted(format!("eigenvector e_{x} needs capacity above {}", x + self.di())));
        }
        let base = self.kappa_pow(x);
        let mut acc = self.mul_kappa(&self.zero(), x)?;
        let mut j = 1u64;
        for m in 0..self.di() {
            let term = self.galois(j as i64, &base)?;
            let w = self.zm.pow(self.omega, (-x * m).rem_euclid(self.di()) as u64);
            acc = self.add(&acc, &self.scale(&term, w)?)?;
            j = j * self.r % self.p;
        }
        let dinv = self.zm.inv(self.d as u64 % self.modulus()).expect("d is a unit");
        self.scale(&acc, dinv)
    }
}

/// Default working precision N for level i: κ-capacity beyond the upper
/// bound `3i + 3d - 6 + 2ρ` with slack.
pub fn default_precision(p: u64, i: i64) -> u32 {
    let d = p as i64 - 1;
    let need = 3 * (i.max(0) + d) + 3 * d + 6;
    ((need + d - 1) / d + 2) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PrimeCtx {
        PrimeCtx::new(p, n).unwrap()
    }

    #[test]
    fn context_constants() {
        let c = ctx(5, 3);
        assert_eq!(c.r(), 2);
        assert_eq!(c.omega(), 57);
        assert_eq!(c.zmod().pow(57, 2), 124);
        assert_eq!(ctx(7, 3).r(), 3);
        assert_eq!(c.min_poly(), &[5, 10, 10, 5, 1]);
        for p in [5u64, 7, 11, 13, 31] {
            let c = ctx(p, 4);
            assert_eq!(c.zmod().pow(c.omega(), p - 1), 1);
            assert_eq!(c.omega() % p, c.r());
            assert_eq!(c.min_poly()[0], p);
            assert_eq!(*c.min_poly().last().unwrap(), 1);
        }
    }

    #[test]
    fn context_errors() {
        assert_eq!(PrimeCtx::new(9, 3).unwrap_err(), Error::NotPrime(9));
        assert_eq!(PrimeCtx::new(3, 3).unwrap_err(), Error::NotPrime(3));
        assert_eq!(PrimeCtx::new(5, 1).unwrap_err(), Error::PrecisionTooSmall(1));
        assert!(matches!(PrimeCtx::new(5, 40), Err(Error::PrecisionTooLarge { .. })));
    }

    #[test]
    fn additive_examples() {
        let c = ctx(5, 4);
        let k = c.kappa();
        let z = c.add(&k, &c.neg(&k).unwrap()).unwrap();
        assert_eq!(c.val(&z), Valuation::Infinite);
        let t = c.sub(&c.theta(), &c.one()).unwrap();
        assert!(c.eq_within(&t, &k).unwrap());
        let lhs = c.add(&c.from_coeffs(0, &[0, 1, 1]).unwrap(), &k).unwrap();
        assert!(c.eq_within(&lhs, &c.from_coeffs(0, &[0, 2, 1]).unwrap()).unwrap());
    }

    #[test]
    fn mul_reduces_by_minimal_polynomial() {
        let c = ctx(5, 4);
        let prod = c.mul(&c.kappa(), &c.kappa_pow(3)).unwrap();
        // rebase the shift-4 product onto shift 0 by adding zero
        let rebased = c.add(&prod, &c.zero()).unwrap();
        assert_eq!(rebased.shift(), 0);
        let m = c.modulus() as i64;
        let want: Vec<u64> = [-5i64, -10, -10, -5].iter().map(|&x| x.rem_euclid(m) as u64).collect();
        assert_eq!(rebased.coeffs(), &want[..]);
        let s = c.add(&c.kappa_pow(4), &c.int(5)).unwrap();
        assert!(c.val(&s) >= Valuation::Finite(5));
        let x = c.from_coeffs(2, &[3, 1, 4, 1]).unwrap();
        assert!(c.eq_within(&c.mul(&c.one(), &x).unwrap(), &x).unwrap());
    }

    #[test]
    fn valuations() {
        let c = ctx(7, 3);
        for j in 0..c.capacity() {
            assert_eq!(c.val(&c.kappa_pow(j)), Valuation::Finite(j));
        }
        assert_eq!(c.val(&c.int(7)), Valuation::Finite(6));
        assert_eq!(c.val(&c.zero()), Valuation::Infinite);
    }

    #[test]
    fn kappa_division() {
        let c = ctx(5, 4);
        let k = c.div_kappa(&c.kappa_pow(3), 2).unwrap();
        assert!(c.eq_within(&k, &c.kappa()).unwrap());
        let u = c.div_kappa(&c.int(5), 4).unwrap();
        let u = c.normalized(&u).unwrap();
        assert_eq!(c.val(&u), Valuation::Finite(0));
        assert_eq!(c.leading_coeff(&u, 0).unwrap(), 4);
        let x = c.from_coeffs(1, &[2, 3]).unwrap();
        assert!(c.eq_within(&c.div_kappa(&x, 0).unwrap(), &x).unwrap());
    }

    #[test]
    fn digits() {
        let c = ctx(5, 4);
        let dg = c.kappa_digits(&c.kappa_pow(2), 8).unwrap();
        assert_eq!(dg.digits, vec![0, 0, 1, 0, 0, 0, 0, 0]);
        let dg = c.kappa_digits(&c.int(5), 8).unwrap();
        assert_eq!(&dg.digits[..5], &[0, 0, 0, 0, 4]);
        assert_eq!(c.leading_coeff(&c.int(5), 4).unwrap(), 4);
        let dg = c.kappa_digits(&c.zero(), 6).unwrap();
        assert!(dg.digits.iter().all(|&b| b == 0));
        assert!(c.kappa_digits(&c.one(), 100).is_err());
        assert_eq!(c.leading_coeff(&c.kappa(), 3).unwrap_err(), Error::ValuationBelow { val: 1, t: 3 });
    }

    #[test]
    fn digits_reconstruct_element() {
        let c = ctx(7, 3);
        let x = c.from_coeffs(0, &[12, 40, 301, 5, 0, 77]).unwrap();
        let dg = c.kappa_digits(&x, c.capacity()).unwrap();
        let mut acc = c.zero();
        for (n, &b) in dg.digits.iter().enumerate() {
            acc = c.add(&acc, &c.scale(&c.kappa_pow(n as i64), b).unwrap()).unwrap();
        }
        assert!(c.eq_within(&acc, &x).unwrap());
        assert!(dg.digits.iter().all(|&b| b < 7));
    }

    #[test]
    fn galois_examples() {
        let c = ctx(5, 4);
        let x = c.from_coeffs(1, &[3, 1, 4, 1]).unwrap();
        assert!(c.eq_within(&c.galois(1, &x).unwrap(), &x).unwrap());
        let g = c.galois(2, &c.kappa()).unwrap();
        assert!(c.eq_within(&g, &c.from_coeffs(0, &[0, 2, 1]).unwrap()).unwrap());
        for j in 1..5 {
            for k in 1..5 {
                let lhs = c.galois(j, &c.galois(k, &x).unwrap()).unwrap();
                let rhs = c.galois(j * k, &x).unwrap();
                assert!(c.eq_within(&lhs, &rhs).unwrap());
            }
        }
        assert!(matches!(c.galois(10, &x), Err(Error::NotCoprime { .. })));
        let neg = c.from_coeffs(-3, &[2, 1]).unwrap();
        let back = c.galois(3, &c.galois(2, &neg).unwrap()).unwrap();
        assert!(c.eq_within(&back, &c.galois(6, &neg).unwrap()).unwrap());
    }

    #[test]
    fn inverse_and_pow() {
        let c = ctx(7, 4);
        let x = c.from_coeffs(-2, &[3, 1, 4, 1, 5, 9]).unwrap();
        let xi = c.inverse(&x).unwrap();
        assert!(c.eq_within(&c.mul(&x, &xi).unwrap(), &c.one()).unwrap());
        let p7 = c.int(7);
        let inv = c.inverse(&p7).unwrap();
        assert_eq!(c.val(&inv), Valuation::Finite(-6));
        let cube = c.pow(&x, 3).unwrap();
        let manual = c.mul(&x, &c.mul(&x, &x).unwrap()).unwrap();
        assert!(c.eq_within(&cube, &manual).unwrap());
        assert!(c.inverse(&c.zero()).is_err());
    }

    #[test]
    fn eigenvectors() {
        for p in [5u64, 7] {
            let c = ctx(p, 5);
            let e0 = c.eigenvector(0).unwrap();
            assert!(c.eq_within(&e0, &c.one()).unwrap());
            for x in 0..6 {
                let e = c.eigenvector(x).unwrap();
                assert_eq!(c.val(&e), Valuation::Finite(x));
                assert_eq!(c.leading_coeff(&e, x).unwrap(), 1);
                let lhs = c.galois(c.r() as i64, &e).unwrap();
                let w = c.zmod().pow(c.omega(), x as u64);
                let rhs = c.scale(&e, w).unwrap();
                assert!(c.eq_within(&lhs, &rhs).unwrap());
            }
        }
        let c = ctx(5, 3);
        assert!(c.eigenvector(c.capacity()).is_err());
    }

    #[test]
    fn theta_literal_conversion() {
        let c = ctx(7, 3);
        let t2 = c.from_theta(&[0, 0, 1]);
        let want = c.mul(&c.theta(), &c.theta()).unwrap();
        assert!(c.eq_within(&t2, &want).unwrap());
        let lit = c.to_literal(&want);
        let back = c.from_literal(&lit).unwrap();
        assert!(c.eq_within(&back, &want).unwrap());
        let json = serde_json::to_string(&lit).unwrap();
        assert_eq!(json, r#"{"shift":0,"coeffs":[1,2,1,0,0,0]}"#);
    }

    #[test]
    fn context_mismatch() {
        let a = ctx(5, 3);
        let b = ctx(7, 3);
        assert_eq!(a.add(&a.one(), &b.one()).unwrap_err(), Error::ContextMismatch);
    }

    #[test]
    fn default_precision_formula() {
        // ceil((3(i+d)+3d+6)/d) + 2
        assert_eq!(default_precision(5, 0), 10);
        assert_eq!(default_precision(13, 13), 12);
        assert_eq!(default_precision(5, 11), 18);
    }
}
