//! Quotients of Laurent polynomials.

use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_traits::Signed;

use super::gcd::{div_exact, gcd, remove_integer_content};
use super::poly::Poly;
use super::ExactError;

/// `numerator / denominator` with a nonzero denominator.
///
/// Arithmetic returns normalized values. Equality is decided by
/// cross-multiplication, so unnormalized values built with
/// [`RationalFunction::new`] compare correctly too.
#[derive(Clone)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: i64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::new(Poly::constant(n), Poly::constant(d)).expect("nonzero denominator").normalize()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Fully reduced representative: monomial and polynomial common factors
    /// cancelled, integer content removed, denominator leading coefficient
    /// positive, and all exponents nonnegative except for a monomial factor
    /// kept in the numerator.
    pub fn normalize(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.den.as_constant() {
            return self.with_constant_den(c);
        }
        let (mn, pn) = split(&self.num);
        let (md, pd) = split(&self.den);
        let g = gcd(&pn, &pd);
        let mut n = div_exact(&pn, &g).expect("gcd divides numerator");
        let mut d = div_exact(&pd, &g).expect("gcd divides denominator");
        // Monomial ratio mn/md goes to the numerator for positive
        // exponents and to the denominator otherwise.
        let mut up: Vec<(String, i32)> = Vec::new();
        let mut down: Vec<(String, i32)> = Vec::new();
        let mut names: Vec<&String> = mn.iter().map(|(k, _)| k).chain(md.iter().map(|(k, _)| k)).collect();
        names.sort();
        names.dedup();
        for k in names {
            let a = mn.iter().find(|(x, _)| x == k).map(|(_, e)| *e).unwrap_or(0);
            let b = md.iter().find(|(x, _)| x == k).map(|(_, e)| *e).unwrap_or(0);
            let e = a - b;
            if e > 0 {
                up.push((k.clone(), e));
            } else if e < 0 {
                down.push((k.clone(), -e));
            }
        }
        if !up.is_empty() {
            let p: Vec<(&str, i32)> = up.iter().map(|(k, e)| (k.as_str(), *e)).collect();
            n = n.shift(&p);
        }
        if !down.is_empty() {
            let p: Vec<(&str, i32)> = down.iter().map(|(k, e)| (k.as_str(), *e)).collect();
            d = d.shift(&p);
        }
        let (n, d) = remove_integer_content(&n, &d);
        RationalFunction { num: n, den: d }
    }

    fn with_constant_den(&self, c: BigInt) -> Self {
        let (n, d) = remove_integer_content(&self.num, &Poly::from_bigint(c));
        RationalFunction { num: n, den: d }
    }

    /// The polynomial value, if the denominator divides the numerator.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.den.is_one() {
            return Some(self.num.clone());
        }
        div_exact(&self.num, &self.den)
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return RationalFunction { num: self.num.add(&other.num), den: self.den.clone() }
                .normalize();
        }
        if self.den.as_constant().is_some() || other.den.as_constant().is_some() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            return RationalFunction { num, den: self.den.mul(&other.den) }.normalize();
        }
        let g = gcd(&self.den, &other.den);
        let a = div_exact(&self.den, &g).expect("gcd divides");
        let b = div_exact(&other.den, &g).expect("gcd divides");
        let num = self.num.mul(&b).add(&other.num.mul(&a));
        RationalFunction { num, den: a.mul(&other.den) }.normalize()
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
            .normalize()
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        if p.is_zero() || self.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.mul(p), den: self.den.clone() }.normalize()
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.num.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(RationalFunction { num: self.den.clone(), den: self.num.clone() }.normalize())
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn div_poly(&self, p: &Poly) -> Result<Self, ExactError> {
        if p.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(RationalFunction { num: self.num.clone(), den: self.den.mul(p) }.normalize())
    }

    /// Apply a substitution to numerator and denominator.
    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<String, Poly>,
    ) -> Result<Self, ExactError> {
        let n = self.num.substitute(bindings)?;
        let d = self.den.substitute(bindings)?;
        Ok(Self::new(n, d)?.normalize())
    }

    pub fn subs(&self, bindings: &[(&str, Poly)]) -> Result<Self, ExactError> {
        let map = bindings.iter().map(|(n, p)| ((*n).to_string(), p.clone())).collect();
        self.substitute(&map)
    }
}

/// Split a Laurent polynomial into its monomial content and the rest.
fn split(p: &Poly) -> (Vec<(String, i32)>, Poly) {
    let m = p.min_exponents();
    let names: Vec<(String, i32)> =
        p.vars().iter().cloned().zip(m.iter().copied()).filter(|(_, e)| *e != 0).collect();
    if names.is_empty() {
        return (names, p.clone());
    }
    let neg: Vec<i32> = m.iter().map(|x| -x).collect();
    (names, p.shift_exponents(&neg))
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunction {}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

macro_rules! forward_rf {
    ($tr:ident, $m:ident) => {
        impl ops::$tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                RationalFunction::$m(self, rhs)
            }
        }
    };
}
forward_rf!(Add, add);
forward_rf!(Sub, sub);
forward_rf!(Mul, mul);

impl ops::Div<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::div(self, rhs).expect("division by zero rational function")
    }
}

impl ops::Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.len() > 1 || p.leading().is_some_and(|(_, c)| c.is_negative()) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}
