//! Dense univariate Laurent polynomials, used in the hot loops of the Φ
//! engine and the coefficient extractors.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;

/// `Σ coeffs[k] · t^(low + k)`, trimmed so that the first and last stored
/// coefficients are nonzero. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    low: i32,
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, e: i32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly { low: e, coeffs: vec![c] }
    }

    pub fn from_coeffs(low: i32, coeffs: Vec<BigInt>) -> Self {
        let mut p = UPoly { low, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.low = 0;
            return;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i32;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        let k = e - self.low;
        if k < 0 || k as usize >= self.coeffs.len() {
            return BigInt::zero();
        }
        self.coeffs[k as usize].clone()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![BigInt::zero(); (high - low + 1) as usize];
        for (k, x) in self.coeffs.iter().enumerate() {
            c[(self.low - low) as usize + k] += x;
        }
        for (k, x) in o.coeffs.iter().enumerate() {
            c[(o.low - low) as usize + k] += x;
        }
        UPoly::from_coeffs(low, c)
    }

    pub fn add_assign(&mut self, o: &UPoly) {
        *self = self.add(o);
    }

    pub fn neg(&self) -> UPoly {
        UPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in o.coeffs.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        UPoly { low: self.low + o.low, coeffs: c }
    }

    pub fn scale(&self, k: &BigInt) -> UPoly {
        if k.is_zero() {
            return UPoly::zero();
        }
        UPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Multiply by t^e.
    pub fn shift(&self, e: i32) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        UPoly { low: self.low + e, coeffs: self.coeffs.clone() }
    }

    /// As a [`Poly`] in the symbol `var`.
    pub fn to_poly(&self, var: &str) -> Poly {
        let v = [var.to_string()];
        Poly::from_terms(
            &v,
            self.coeffs.iter().enumerate().map(|(k, c)| (vec![self.low + k as i32], c.clone())),
        )
    }

    /// From a polynomial in at most the one symbol `var`.
    pub fn from_poly(p: &Poly, var: &str) -> Option<UPoly> {
        if p.vars().iter().any(|v| v != var) {
            return None;
        }
        let mut out = UPoly::zero();
        for (e, c) in p.terms() {
            out = out.add(&UPoly::monomial(c.clone(), e.first().copied().unwrap_or(0)));
        }
        Some(out)
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({})", self.to_poly("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb() -> impl Strategy<Value = UPoly> {
        (-3i32..3, prop::collection::vec(-5i64..5, 0..6))
            .prop_map(|(l, c)| UPoly::from_coeffs(l, c.into_iter().map(BigInt::from).collect()))
    }

    proptest! {
        #[test]
        fn matches_sparse_arithmetic(a in arb(), b in arb()) {
            let (pa, pb) = (a.to_poly("t"), b.to_poly("t"));
            prop_assert_eq!(a.mul(&b).to_poly("t"), pa.mul(&pb));
            prop_assert_eq!(a.add(&b).to_poly("t"), pa.add(&pb));
            prop_assert_eq!(a.sub(&b).to_poly("t"), pa.sub(&pb));
            prop_assert_eq!(UPoly::from_poly(&pa, "t").unwrap(), a.clone());
            prop_assert_eq!(a.shift(2).to_poly("t"), pa.shift(&[("t", 2)]));
        }
    }
}
