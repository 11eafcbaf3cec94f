//! Acceptance suite: twelve exact checks, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use qtlattice::combinat::{Partition, SequencePair};
use qtlattice::lattice::{self, FaceState, FusedWeightParams};
use qtlattice::modmac::{self, CauchyIdentity, HRoute};
use qtlattice::phi::{self, GForm, Route};
use qtlattice::qseries::gauss_binomial;
use qtlattice::symoracle;
use qtlattice::Poly;

type Outcome = Result<String, String>;

fn v(s: &str) -> Poly {
    Poly::var(s)
}

fn c(k: i64) -> Poly {
    Poly::constant(k)
}

fn partitions_up_to(w: usize) -> Vec<Partition> {
    (1..=w).flat_map(Partition::all).collect()
}

fn contained(s: &SequencePair) -> bool {
    s.nu_slice().iter().zip(s.nutilde_slice()).all(|(a, b)| a <= b)
}

/// Run `check` on every item in parallel; report the first failure.
fn all_of<T: Sync + std::fmt::Debug>(items: &[T], check: impl Fn(&T) -> Result<(), String> + Sync) -> Outcome {
    let bad: Vec<String> = items.par_iter().filter_map(|x| check(x).err()).collect();
    match bad.into_iter().next() {
        None => Ok(format!("{} cases", items.len())),
        Some(e) => Err(e),
    }
}

fn criterion_1() -> Outcome {
    let (t, z) = (v("t"), v("z"));
    let t2 = t.pow(2);
    let one_t = c(1).add(&t);
    let one_t_t2 = c(1).add(&t).add(&t2);
    let want = t
        .pow(8)
        .mul(&z.pow(3))
        .add(&c(2).mul(&one_t).mul(&one_t_t2).mul(&t.pow(4)).mul(&z.pow(2)))
        .add(&one_t_t2.mul(&c(1).add(&c(3).mul(&t)).add(&t2)).mul(&t).mul(&z))
        .add(&one_t);
    let s = SequencePair::new(vec![1, 3, 4, 5], vec![2, 3, 5, 5]).map_err(|e| e.to_string())?;
    for r in [Route::Series, Route::Finite, Route::Positive] {
        let got = phi::phi(&s, r).map_err(|e| e.to_string())?.value;
        if got != want {
            return Err(format!("{r}: {got}"));
        }
    }
    Ok("three forms equal the reference polynomial".into())
}

fn criterion_2() -> Outcome {
    let pairs: Vec<SequencePair> = (1..=4).flat_map(|n| SequencePair::all(n, 6)).filter(contained).collect();
    all_of(&pairs, |s| {
        let a = phi::phi(s, Route::Series).map_err(|e| e.to_string())?.value;
        let b = phi::phi(s, Route::Finite).map_err(|e| e.to_string())?.value;
        let p = phi::phi(s, Route::Positive).map_err(|e| e.to_string())?.value;
        if a != b || a != p {
            return Err(format!("{s:?}: forms disagree"));
        }
        if !a.is_nonnegative() {
            return Err(format!("{s:?}: negative coefficient"));
        }
        Ok(())
    })
}

/// (z;t)_{ν̃^N+1} Σ_s z^s Π_k binom(ν̃^k − ν^k + s, ν̃^{k−1} − ν^k + s),
/// truncated above the known z-degree.
fn phi_prime_direct(s: &SequencePair) -> Poly {
    let (t, z) = (v("t"), v("z"));
    let cutoff = 2 * s.top() + 4;
    let mut sum = Poly::zero();
    for k in 0..=cutoff {
        let mut term = z.pow(k as u32);
        for j in 1..=s.len() {
            let a = s.nutilde(j) as i64 - s.nu(j) as i64 + k as i64;
            let b = s.nutilde(j - 1) as i64 - s.nu(j) as i64 + k as i64;
            term = term.mul(&gauss_binomial(a, b));
        }
        sum = sum.add(&term);
    }
    let mut poch = Poly::one();
    for i in 0..=s.top() {
        poch = poch.mul(&c(1).sub(&z.mul(&t.pow(i as u32))));
    }
    qtlattice::symoracle::frac::truncate(&poch.mul(&sum), &["z".to_string()], s.top() as i32)
}

fn criterion_3() -> Outcome {
    let pairs: Vec<SequencePair> = (1..=3).flat_map(|n| SequencePair::all(n, 4)).collect();
    all_of(&pairs, |s| {
        let base = phi::phi_series(s).map_err(|e| e.to_string())?;
        for k in 1..=s.len() {
            let (r, shift) = phi::rotate(s, k).map_err(|e| e.to_string())?;
            let rotated = phi::phi_series(&r).map_err(|e| e.to_string())?.shift(&[("z", shift as i32)]);
            if rotated != base {
                return Err(format!("{s:?}: rotation k={k}"));
            }
        }
        if phi::phi_prime(s).map_err(|e| e.to_string())? != phi_prime_direct(s) {
            return Err(format!("{s:?}: Φ′ relation"));
        }
        Ok(())
    })
}

/// Σ_k v^k binom(m,k) (v;t)_{m−k} Π_i binom(k + a_i, b_i), expanded directly.
fn g_direct(m: i64, a: &[i64], b: &[i64]) -> Poly {
    let (t, vv) = (v("t"), v("v"));
    let mut out = Poly::zero();
    for k in 0..=m {
        let mut term = vv.pow(k as u32).mul(&gauss_binomial(m, k));
        for i in 0..m - k {
            term = term.mul(&c(1).sub(&vv.mul(&t.pow(i as u32))));
        }
        for (ai, bi) in a.iter().zip(b) {
            term = term.mul(&gauss_binomial(k + ai, *bi));
        }
        out = out.add(&term);
    }
    out
}

fn criterion_4() -> Outcome {
    let mut cases: Vec<(i64, Vec<i64>, Vec<i64>)> = Vec::new();
    for m in 0..=3i64 {
        for n in 0..=3u32 {
            for code in 0..25i64.pow(n) {
                let mut x = code;
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for _ in 0..n {
                    a.push(x % 5);
                    b.push((x / 5) % 5);
                    x /= 25;
                }
                cases.push((m, a, b));
            }
        }
    }
    all_of(&cases, |(m, a, b)| {
        let s = phi::g_poly(*m, a, b, GForm::Sum).map_err(|e| e.to_string())?;
        let p = phi::g_poly(*m, a, b, GForm::Positive).map_err(|e| e.to_string())?;
        if s != p || s != g_direct(*m, a, b) {
            return Err(format!("g m={m} a={a:?} b={b:?}: forms disagree"));
        }
        if !p.is_nonnegative() {
            return Err(format!("g m={m} a={a:?} b={b:?}: negative"));
        }
        Ok(())
    })
}

fn criterion_5() -> Outcome {
    let mut faces = Vec::new();
    for j in 1..=3usize {
        for n in 1..=2 {
            for f in FaceState::all(n, 2) {
                if f.sigma.iter().sum::<usize>() <= j && f.sigmatilde.iter().sum::<usize>() <= j {
                    faces.push((j, f));
                }
            }
        }
    }
    let x = v("x");
    all_of(&faces, |(j, f)| {
        let z = x.mul(&v("t").pow(*j as u32)).neg();
        let brute = lattice::fused_vertex_bruteforce(*j, &f.sigma, &f.sigmatilde, &f.rho, &f.rhotilde, &x)
            .map_err(|e| e.to_string())?;
        if brute != lattice::weight_fused(f, &FusedWeightParams { x: x.clone(), z }) {
            return Err(format!("J={j} {f:?}"));
        }
        Ok(())
    })
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for n in 1..=2 {
        let r = lattice::rll_check(n, 3);
        if !r.ok {
            return Err(format!("n={n}: {}", r.witness.unwrap_or_default()));
        }
        checked += r.checked;
    }
    Ok(format!("{checked} matrix elements"))
}

fn criterion_7() -> Outcome {
    all_of(&partitions_up_to(6), |lam| {
        let n = lam.weight();
        let oracle = modmac::modified_h(lam, Some(n), HRoute::Oracle).map_err(|e| e.to_string())?;
        for r in [HRoute::LatticeX, HRoute::LatticeDual] {
            let got = modmac::modified_h(lam, Some(n), r).map_err(|e| e.to_string())?;
            if got.coeffs != oracle.coeffs {
                return Err(format!("{lam}: {r} differs from the oracle"));
            }
        }
        if oracle.coeffs.values().any(|p| !p.is_nonnegative()) {
            return Err(format!("{lam}: negative coefficient"));
        }
        Ok(())
    })
}

fn criterion_8() -> Outcome {
    all_of(&partitions_up_to(6), |lam| {
        let n = lam.weight();
        let h = modmac::modified_h(lam, Some(n), HRoute::LatticeX).map_err(|e| e.to_string())?;
        let at0: BTreeMap<Partition, Poly> = h
            .coeffs
            .iter()
            .map(|(k, p)| (k.clone(), p.subs(&[("q", Poly::zero())]).unwrap()))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        let flags = modmac::modified_hl(lam, Some(n)).map_err(|e| e.to_string())?;
        if at0 != flags {
            return Err(format!("{lam}: q=0 differs from the flag sum"));
        }
        Ok(())
    })
}

fn criterion_9() -> Outcome {
    all_of(&partitions_up_to(4), |lam| {
        let r = symoracle::w_reductions(lam, lam.weight()).map_err(|e| e.to_string())?;
        match r.iter().position(|ok| !ok) {
            None => Ok(()),
            Some(k) => Err(format!("{lam}: {} fails", ["z=-tx", "z=0", "x=0", "x=-qz"][k])),
        }
    })
}

fn criterion_10() -> Outcome {
    all_of(&partitions_up_to(5), |lam| {
        for r in [HRoute::LatticeX, HRoute::Oracle] {
            if !modmac::duality_check(lam, r).map_err(|e| e.to_string())? {
                return Err(format!("{lam}: fails on {r}"));
            }
        }
        Ok(())
    })
}

fn criterion_11() -> Outcome {
    let mut cases = Vec::new();
    for id in CauchyIdentity::ALL {
        for nx in 1..=2 {
            for ny in 1..=2 {
                cases.push((id, nx, ny));
            }
        }
    }
    all_of(&cases, |(id, nx, ny)| match modmac::cauchy_check(*id, *nx, *ny, 3) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{id} nx={nx} ny={ny}: sides differ")),
        Err(e) => Err(e.to_string()),
    })
}

fn criterion_12() -> Outcome {
    all_of(&partitions_up_to(6), |lam| {
        let k = modmac::kostka_qt(lam, HRoute::LatticeX).map_err(|e| e.to_string())?;
        if k.values().any(|p| !p.is_nonnegative()) {
            return Err(format!("{lam}: negative K"));
        }
        let zero = [("q", Poly::zero()), ("t", Poly::zero())];
        for (nu, p) in &k {
            let at = p.subs(&zero).unwrap();
            let val = if at.is_zero() { 0 } else if at.is_one() { 1 } else { return Err(format!("K[{nu},{lam}](0,0) = {at}")) };
            if val == 1 && !nu.dominates(lam) {
                return Err(format!("K[{nu},{lam}](0,0) = 1 off the dominance triangle"));
            }
            if nu == lam && val != 1 {
                return Err(format!("K[{lam},{lam}](0,0) != 1"));
            }
        }
        if !k.contains_key(lam) {
            return Err(format!("K[{lam},{lam}] missing"));
        }
        Ok(())
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("phi reference value", criterion_1, 1),
        ("phi forms agree and are positive", criterion_2, 120),
        ("rotation and phi-prime relation", criterion_3, 60),
        ("g polynomial forms and positivity", criterion_4, 60),
        ("fusion identification", criterion_5, 120),
        ("RLL relation", criterion_6, 120),
        ("H from both lattice formulas equals the oracle", criterion_7, 600),
        ("Hall-Littlewood collapse at q=0", criterion_8, 120),
        ("W reduction square", criterion_9, 180),
        ("q,t inversion duality", criterion_10, 120),
        ("Cauchy identities", criterion_11, 300),
        ("(q,t)-Kostka positivity and triangularity", criterion_12, 180),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let dt = start.elapsed();
        let slow = if dt > Duration::from_secs(*budget) { format!(" [over {budget}s budget]") } else { String::new() };
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m} ({:.2}s){slow}", i + 1, dt.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m} ({:.2}s){slow}", i + 1, dt.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
