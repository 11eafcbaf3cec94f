//! Gaussian binomials, Pochhammer symbols, the hook products c, c', b and
//! the fusion normalizer C_J.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;
use parking_lot::RwLock;
use thiserror::Error;

use crate::combinat::Partition;
use crate::exactalg::upoly::UPoly;
use crate::exactalg::{one_minus, Poly, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("Pochhammer length must be nonnegative, got {0}")]
    NegativeLength(i64),
    #[error("colour multiplicities sum to {sum}, which exceeds J = {j}")]
    NegativeLambdaZero { j: usize, sum: usize },
}

/// Memo table of Gaussian binomials in t, filled row by row with
/// binom(a, b) = binom(a-1, b-1) + t^b binom(a-1, b).
#[derive(Default)]
pub struct QBinomialTable {
    rows: Vec<Vec<Arc<UPoly>>>,
}

impl QBinomialTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn grow(&mut self, a: usize) {
        while self.rows.len() <= a {
            let r = self.rows.len();
            let row: Vec<Arc<UPoly>> = if r == 0 {
                vec![Arc::new(UPoly::one())]
            } else {
                let prev = &self.rows[r - 1];
                (0..=r)
                    .map(|b| {
                        let left = if b == 0 { UPoly::zero() } else { (*prev[b - 1]).clone() };
                        let right = if b == r { UPoly::zero() } else { prev[b].shift(b as i32) };
                        Arc::new(left.add(&right))
                    })
                    .collect()
            };
            self.rows.push(row);
        }
    }

    /// binom(a, b)_t, zero unless a ≥ b ≥ 0.
    pub fn get(&mut self, a: i64, b: i64) -> Arc<UPoly> {
        if !(a >= b && b >= 0) {
            return Arc::new(UPoly::zero());
        }
        self.grow(a as usize);
        self.rows[a as usize][b as usize].clone()
    }

    fn peek(&self, a: i64, b: i64) -> Option<Arc<UPoly>> {
        if !(a >= b && b >= 0) {
            return Some(Arc::new(UPoly::zero()));
        }
        self.rows.get(a as usize).map(|r| r[b as usize].clone())
    }
}

fn shared_table() -> &'static RwLock<QBinomialTable> {
    static T: OnceLock<RwLock<QBinomialTable>> = OnceLock::new();
    T.get_or_init(|| RwLock::new(QBinomialTable::new()))
}

/// Dense Gaussian binomial from the shared table.
pub fn binom_dense(a: i64, b: i64) -> Arc<UPoly> {
    if let Some(v) = shared_table().read().peek(a, b) {
        return v;
    }
    shared_table().write().get(a, b)
}

/// Gaussian binomial binom(a, b) as a polynomial in `t`.
pub fn gauss_binomial(a: i64, b: i64) -> Poly {
    binom_dense(a, b).to_poly("t")
}

/// Gaussian binomial in an arbitrary base symbol.
pub fn gauss_binomial_in(a: i64, b: i64, var: &str) -> Poly {
    binom_dense(a, b).to_poly(var)
}

/// (w; q)_k = Π_{i<k} (1 − w q^i).
pub fn pochhammer(w: &Poly, q: &str, k: i64) -> Result<Poly, QSeriesError> {
    if k < 0 {
        return Err(QSeriesError::NegativeLength(k));
    }
    let mut out = Poly::one();
    for i in 0..k {
        out = out.mul(&one_minus(&w.shift(&[(q, i as i32)])));
    }
    Ok(out)
}

/// (w; q, t)_λ = Π_i (w t^{1−i}; q)_{λ_i}, Laurent in t.
pub fn pochhammer_qt_partition(w: &Poly, lambda: &Partition) -> Poly {
    let mut out = Poly::one();
    for (i, &p) in lambda.parts().iter().enumerate() {
        let wi = w.shift(&[("t", -(i as i32))]);
        out = out.mul(&pochhammer(&wi, "q", p as i64).expect("nonnegative part"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFunctions {
    pub c: Poly,
    pub cprime: Poly,
    pub b: RationalFunction,
}

fn hook_product(lambda: &Partition, f: impl Fn(usize, usize) -> (i32, i32)) -> Poly {
    let conj = lambda.conjugate();
    let mut out = Poly::one();
    for (i, j) in lambda.cells() {
        let a = lambda.part(i) - j;
        let l = conj.part(j) - i;
        let (eq, et) = f(a, l);
        out = out.mul(&one_minus(&Poly::monomial(BigInt::one(), &[("q", eq), ("t", et)])));
    }
    out
}

/// c_λ = Π(1 − q^a t^{l+1}).
pub fn c_lambda(lambda: &Partition) -> Poly {
    hook_product(lambda, |a, l| (a as i32, l as i32 + 1))
}

/// c'_λ = Π(1 − q^{a+1} t^l).
pub fn cprime_lambda(lambda: &Partition) -> Poly {
    hook_product(lambda, |a, l| (a as i32 + 1, l as i32))
}

pub fn c_functions(lambda: &Partition) -> CFunctions {
    let c = c_lambda(lambda);
    let cprime = cprime_lambda(lambda);
    let b = RationalFunction::new(c.clone(), cprime.clone()).expect("c' is nonzero").normalize();
    CFunctions { c, cprime, b }
}

/// C_J(λ) = Π_{m=1}^{n} t^{−λ_m(λ_0+…+λ_{m−1})} binom(λ_0+…+λ_m, λ_m) with
/// λ_0 = J − Σλ.
pub fn fusion_normalizer(j: usize, lambda: &[usize]) -> Result<Poly, QSeriesError> {
    let sum: usize = lambda.iter().sum();
    if sum > j {
        return Err(QSeriesError::NegativeLambdaZero { j, sum });
    }
    let mut acc = j - sum;
    let mut out = UPoly::one();
    for &l in lambda {
        let b = binom_dense((acc + l) as i64, l as i64);
        out = out.mul(&b.shift(-((l * acc) as i32)));
        acc += l;
    }
    Ok(out.to_poly("t"))
}

/// Swap the roles of two symbols.
pub fn swap_symbols(p: &Poly, a: &str, b: &str) -> Poly {
    p.subs(&[(a, Poly::var(b)), (b, Poly::var(a))]).expect("monomial bindings are units")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{colour_content, inversion_number};

    fn t(e: i32) -> Poly {
        Poly::monomial(BigInt::one(), &[("t", e)])
    }

    fn tsum(es: &[i32]) -> Poly {
        Poly::sum(&es.iter().map(|&e| t(e)).collect::<Vec<_>>())
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(gauss_binomial(3, 1), tsum(&[0, 1, 2]));
        assert!(gauss_binomial(2, 5).is_zero());
        assert!(gauss_binomial(-1, 0).is_zero());
        assert!(gauss_binomial(3, -1).is_zero());
        assert_eq!(gauss_binomial(4, 0), Poly::one());
        // (1 − t^3)/(1 − t)
        let r = RationalFunction::new(one_minus(&t(3)), one_minus(&t(1))).unwrap();
        assert_eq!(r.to_poly().unwrap(), gauss_binomial(3, 1));
    }

    #[test]
    fn binomial_matches_pochhammer_ratio() {
        let tt = Poly::var("t");
        for a in 0..=8i64 {
            for b in 0..=a {
                let num = pochhammer(&tt, "t", a).unwrap();
                let den = pochhammer(&tt, "t", b).unwrap().mul(&pochhammer(&tt, "t", a - b).unwrap());
                assert_eq!(gauss_binomial(a, b).mul(&den), num, "{a} {b}");
                assert!(gauss_binomial(a, b).is_nonnegative());
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        let z = Poly::var("z");
        assert_eq!(pochhammer(&z, "t", 0).unwrap(), Poly::one());
        let want = Poly::sum(&[
            Poly::one(),
            Poly::monomial(BigInt::from(-1), &[("z", 1)]),
            Poly::monomial(BigInt::from(-1), &[("z", 1), ("t", 1)]),
            Poly::monomial(BigInt::one(), &[("z", 2), ("t", 1)]),
        ]);
        assert_eq!(pochhammer(&z, "t", 2).unwrap(), want);
        let tt = Poly::var("t");
        assert_eq!(
            pochhammer(&tt, "t", 3).unwrap(),
            one_minus(&t(1)).mul(&one_minus(&t(2))).mul(&one_minus(&t(3)))
        );
        assert_eq!(pochhammer(&z, "t", -1), Err(QSeriesError::NegativeLength(-1)));
    }

    #[test]
    fn pochhammer_partition_examples() {
        let w = Poly::var("w");
        assert_eq!(pochhammer_qt_partition(&w, &Partition::empty()), Poly::one());
        assert_eq!(pochhammer_qt_partition(&w, &"1".parse().unwrap()), one_minus(&w));
        let wt = Poly::monomial(BigInt::one(), &[("w", 1), ("t", -1)]);
        assert_eq!(pochhammer_qt_partition(&w, &"1,1".parse().unwrap()), one_minus(&w).mul(&one_minus(&wt)));
    }

    #[test]
    fn c_examples() {
        let q = |e: i32| Poly::monomial(BigInt::one(), &[("q", e)]);
        let qt = |a: i32, b: i32| Poly::monomial(BigInt::one(), &[("q", a), ("t", b)]);
        let cf = c_functions(&"1".parse().unwrap());
        assert_eq!(cf.c, one_minus(&t(1)));
        assert_eq!(cf.cprime, one_minus(&q(1)));
        let cf = c_functions(&"2".parse().unwrap());
        assert_eq!(cf.c, one_minus(&qt(1, 1)).mul(&one_minus(&t(1))));
        assert_eq!(cf.cprime, one_minus(&q(2)).mul(&one_minus(&q(1))));
        assert_eq!(cf.b, RationalFunction::new(cf.c.clone(), cf.cprime.clone()).unwrap());
    }

    #[test]
    fn hook_identities() {
        for w in 0..=8 {
            for l in Partition::all(w) {
                let lc = l.conjugate();
                // c'_λ(t,q) = c_{λ'}(q,t)
                assert_eq!(swap_symbols(&cprime_lambda(&l), "q", "t"), c_lambda(&lc), "{l:?}");
                // c_λ(q,t) = (−t)^{|λ|} t^{n(λ)} q^{n(λ')} c_λ(1/q,1/t)
                let inv = c_lambda(&l)
                    .subs(&[("q", Poly::monomial(BigInt::one(), &[("q", -1)])), ("t", t(-1))])
                    .unwrap();
                let sign = if w % 2 == 0 { 1 } else { -1 };
                let pref = Poly::monomial(
                    BigInt::from(sign),
                    &[("t", (w + l.n()) as i32), ("q", lc.n() as i32)],
                );
                assert_eq!(c_lambda(&l), pref.mul(&inv), "{l:?}");
                // b_λ(q,t) b_{λ'}(t,q) = 1
                let b = c_functions(&l).b;
                let bc = c_functions(&lc).b;
                let swapped = RationalFunction::new(
                    swap_symbols(bc.numerator(), "q", "t"),
                    swap_symbols(bc.denominator(), "q", "t"),
                )
                .unwrap();
                assert_eq!(b.mul(&swapped), RationalFunction::one(), "{l:?}");
            }
        }
    }

    #[test]
    fn binomial_identities() {
        let b = |a: i64, c: i64| gauss_binomial(a, c);
        for a in 0..=8i64 {
            for c in 0..=8i64 {
                // symmetry and the two Pascal rules
                assert_eq!(b(a + c, a), b(a + c, c));
                if a >= 1 {
                    assert_eq!(b(a, c), b(a - 1, c - 1).add(&b(a - 1, c).mul(&t(c as i32))));
                    assert_eq!(b(a, c), b(a - 1, c).add(&b(a - 1, c - 1).mul(&t((a - c) as i32))));
                }
            }
        }
    }

    #[test]
    fn truncated_infinite_binomial() {
        // Σ_{s≤D} w^s binom(s+a, s) · (w;t)_{a+1} = 1 + O(w^{D+1})
        let w = Poly::var("w");
        for a in 0..=5i64 {
            let d = a + 6;
            let mut s = Poly::zero();
            for k in 0..=d {
                s = s.add(&gauss_binomial(k + a, k).shift(&[("w", k as i32)]));
            }
            let prod = s.mul(&pochhammer(&w, "t", a + 1).unwrap());
            for (deg, c) in prod.coefficients_in("w") {
                if deg == 0 {
                    assert_eq!(c, Poly::one());
                } else if deg <= d as i32 {
                    assert!(c.is_zero(), "a={a} deg={deg}");
                }
            }
        }
    }

    #[test]
    fn pochhammer_concatenation() {
        let w = Poly::var("w");
        for a in 0..=6i64 {
            for b in 0..=6i64 {
                let lhs = pochhammer(&w.shift(&[("t", a as i32)]), "t", b)
                    .unwrap()
                    .mul(&pochhammer(&w, "t", a).unwrap());
                assert_eq!(lhs, pochhammer(&w, "t", a + b).unwrap());
            }
        }
    }

    /// Σ over words with colour content λ of t^{−I(i)}.
    fn normalizer_by_words(j: usize, lambda: &[usize]) -> Poly {
        let n = lambda.len();
        let mut total = Poly::zero();
        let mut word = vec![0; j];
        fn rec(pos: usize, word: &mut Vec<usize>, n: usize, lambda: &[usize], total: &mut Poly) {
            if pos == word.len() {
                if colour_content(word, n) == lambda {
                    *total = total.add(&Poly::monomial(BigInt::one(), &[("t", -(inversion_number(word) as i32))]));
                }
                return;
            }
            for c in 0..=n {
                word[pos] = c;
                rec(pos + 1, word, n, lambda, total);
            }
        }
        rec(0, &mut word, n, lambda, &mut total);
        total
    }

    #[test]
    fn normalizer_examples() {
        assert_eq!(fusion_normalizer(2, &[1]).unwrap(), Poly::one().add(&t(-1)));
        assert_eq!(fusion_normalizer(1, &[0, 0, 0]).unwrap(), Poly::one());
        assert_eq!(
            fusion_normalizer(1, &[1, 1]),
            Err(QSeriesError::NegativeLambdaZero { j: 1, sum: 2 })
        );
        for j in 0..=4 {
            for n in 0..=2 {
                let mut all: Vec<Vec<usize>> = vec![vec![]];
                for _ in 0..n {
                    all = all
                        .into_iter()
                        .flat_map(|v| {
                            (0..=j).map(move |x| {
                                let mut w = v.clone();
                                w.push(x);
                                w
                            })
                        })
                        .collect();
                }
                for lam in all.into_iter().filter(|l| l.iter().sum::<usize>() <= j) {
                    assert_eq!(fusion_normalizer(j, &lam).unwrap(), normalizer_by_words(j, &lam), "J={j} {lam:?}");
                }
            }
        }
    }
}
