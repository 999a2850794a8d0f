//! Exact ground ring: rationals, Gaussian rationals and polynomials in a
//! formal Planck parameter `h`.
//!
//! Every structure in the crate is computed over `Q(i)[h]`. Nothing is ever
//! evaluated at a numeric `h`; coefficients are compared order by order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational in canonical form.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// An element `re + im*i` of `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*i", self.re, self.im)
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s
            .strip_suffix("*i")
            .ok_or_else(|| Error::Parse(format!("missing imaginary part in {s:?}")))?;
        // The real part may itself be negative, so split at the last " + ".
        let (re, im) = body
            .rsplit_once(" + ")
            .ok_or_else(|| Error::Parse(format!("expected 're + im*i', got {s:?}")))?;
        Ok(Self { re: parse_rational(re)?, im: parse_rational(im)? })
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// A polynomial in the formal parameter `h` with `Q(i)` coefficients.
///
/// Zero coefficients are never stored, so structural equality is ring
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HScalar {
    coeffs: BTreeMap<u32, GaussianRational>,
}

impl HScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::constant(GaussianRational::real(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// The imaginary unit as a constant.
    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    /// The formal parameter `h` itself.
    pub fn hbar() -> Self {
        Self::monomial(1, GaussianRational::one())
    }

    pub fn monomial(order: u32, c: GaussianRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(order, c);
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power of `h` present; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// The coefficient of `h^k`, zero when absent.
    pub fn coeff_at_order(&self, k: u32) -> GaussianRational {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &GaussianRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Constant term as a real rational, if the value is one.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => {
                let c = self.coeffs.get(&0)?;
                c.im.is_zero().then(|| c.re.clone())
            }
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.degree() {
            None => Some(GaussianRational::zero()),
            Some(0) => Some(self.coeff_at_order(0)),
            _ => None,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.scale(r))).collect() }
    }

    pub fn scale_gauss(&self, g: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.coeffs {
            out.add_term(*k, &(c * g));
        }
        out
    }

    /// `self += r * other`.
    pub fn add_scaled(&mut self, other: &Self, r: &Rational) {
        if r.is_zero() {
            return;
        }
        for (k, c) in &other.coeffs {
            self.add_term(*k, &c.scale(r));
        }
    }

    fn add_term(&mut self, k: u32, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Exact polynomial division, `None` unless `other` divides `self`.
    pub fn exact_div(&self, other: &Self) -> Option<Self> {
        let lead_k = other.degree()?;
        let lead_inv = other.coeff_at_order(lead_k).inv()?;
        let low = *other.coeffs.keys().next()?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(top) = rem.degree() {
            if top < lead_k {
                return None;
            }
            let q = &rem.coeff_at_order(top) * &lead_inv;
            let shift = top - lead_k;
            quot.add_term(shift, &q);
            for (k, c) in &other.coeffs {
                rem.add_term(k + shift, &-(&(c * &q)));
            }
            if rem.degree().is_some_and(|d| d < low) {
                return None;
            }
        }
        Some(quot)
    }
}

impl From<Rational> for HScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for HScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl Add for &HScalar {
    type Output = HScalar;
    fn add(self, o: &HScalar) -> HScalar {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Add for HScalar {
    type Output = HScalar;
    fn add(mut self, o: HScalar) -> HScalar {
        self += &o;
        self
    }
}

impl Sub for &HScalar {
    type Output = HScalar;
    fn sub(self, o: &HScalar) -> HScalar {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Sub for HScalar {
    type Output = HScalar;
    fn sub(mut self, o: HScalar) -> HScalar {
        self -= &o;
        self
    }
}

impl Mul for &HScalar {
    type Output = HScalar;
    fn mul(self, o: &HScalar) -> HScalar {
        let mut out = HScalar::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &o.coeffs {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }
}

impl Mul for HScalar {
    type Output = HScalar;
    fn mul(self, o: HScalar) -> HScalar {
        &self * &o
    }
}

impl Neg for &HScalar {
    type Output = HScalar;
    fn neg(self) -> HScalar {
        HScalar { coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for HScalar {
    type Output = HScalar;
    fn neg(self) -> HScalar {
        -&self
    }
}

impl AddAssign<&HScalar> for HScalar {
    fn add_assign(&mut self, o: &HScalar) {
        for (k, c) in &o.coeffs {
            self.add_term(*k, c);
        }
    }
}

impl SubAssign<&HScalar> for HScalar {
    fn sub_assign(&mut self, o: &HScalar) {
        for (k, c) in &o.coeffs {
            self.add_term(*k, &-c);
        }
    }
}

impl fmt::Display for HScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *k > 0 {
                write!(f, "*h^{k}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for HScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut rest = s;
        loop {
            let body_start = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
            let close = body_start
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
            let coeff: GaussianRational = body_start[..close].parse()?;
            let mut tail = &body_start[close + 1..];
            let mut order = 0u32;
            if let Some(t) = tail.strip_prefix("*h^") {
                let end = t.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(t.len());
                order = t[..end]
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad h order in {s:?}: {e}")))?;
                tail = &t[end..];
            }
            out.add_term(order, &coeff);
            if tail.is_empty() {
                return Ok(out);
            }
            rest = tail
                .strip_prefix(" + ")
                .ok_or_else(|| Error::Parse(format!("expected ' + ' in {s:?}")))?;
        }
    }
}

/// `(-1)^n` as a rational sign.
pub fn sign_rational(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn is_odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// `1/k!` as a rational.
pub fn inv_factorial(k: u32) -> Rational {
    let mut f = BigInt::one();
    for j in 2..=k {
        f *= BigInt::from(j);
    }
    Rational::new(BigInt::one(), f)
}

pub fn binomial(n: u32, k: u32) -> Rational {
    inv_factorial(k) * inv_factorial(n - k) / inv_factorial(n)
}

pub fn abs_rational(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h() -> HScalar {
        HScalar::hbar()
    }

    #[test]
    fn difference_of_squares() {
        let one = HScalar::one();
        let lhs = &(&one + &h()) * &(&one - &h());
        let rhs = &one - &(&h() * &h());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&HScalar::i() * &HScalar::i(), HScalar::from_int(-1));
    }

    #[test]
    fn h_parts_cancel() {
        let a = &HScalar::from_rational(rat(1, 2)) + &h().scale(&rat(3, 4));
        let b = &HScalar::from_rational(rat(1, 2)) - &h().scale(&rat(3, 4));
        assert_eq!(&a + &b, HScalar::one());
    }

    #[test]
    fn coefficient_extraction() {
        let a = &HScalar::from_int(2) + &(&HScalar::i() * &h());
        assert_eq!(a.coeff_at_order(1), GaussianRational::i());
        assert_eq!(a.coeff_at_order(5), GaussianRational::zero());
        let sq = (&HScalar::one() + &h()).pow(2);
        assert_eq!(sq.coeff_at_order(1), GaussianRational::real(rat_int(2)));
    }

    #[test]
    fn self_difference_is_empty() {
        let a = &HScalar::from_rational(rat(-7, 3)) + &h().pow(3).scale_gauss(&GaussianRational::i());
        let d = &a - &a;
        assert!(d.is_zero());
        assert_eq!(d.degree(), None);
    }

    #[test]
    fn exact_division() {
        let a = &HScalar::one() + &h();
        let b = &HScalar::one() - &h();
        assert_eq!((&a * &b).exact_div(&b), Some(a.clone()));
        assert_eq!(a.exact_div(&b), None);
    }

    #[test]
    fn display_format() {
        let a = &HScalar::from_rational(rat(1, 2)) + &h().scale_gauss(&GaussianRational::new(rat(0, 1), rat(-3, 4)));
        assert_eq!(a.to_string(), "(1/2 + 0*i) + (0 + -3/4*i)*h^1");
        assert_eq!(HScalar::zero().to_string(), "0");
    }

    fn arb_gauss() -> impl Strategy<Value = GaussianRational> {
        (-6i64..6, 1i64..5, -6i64..6, 1i64..5).prop_map(|(a, b, c, d)| GaussianRational::new(rat(a, b), rat(c, d)))
    }

    fn arb_h() -> impl Strategy<Value = HScalar> {
        proptest::collection::vec((0u32..4, arb_gauss()), 0..4).prop_map(|terms| {
            let mut s = HScalar::zero();
            for (k, c) in terms {
                s.add_term(k, &c);
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_h(), b in arb_h(), c in arb_h()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn text_round_trip(a in arb_h()) {
            let back: HScalar = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
