//! Command-line front end.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::combinat::{Partition, SequencePair};
use crate::exactalg::{poly_to_json, Poly};
use crate::lattice::{self, FaceState, Formula, FusedWeightParams, LatticeError};
use crate::modmac::{self, table_json, CauchyIdentity, HRoute, ModmacError};
use crate::phi::{self, PhiError, Route};
use crate::symoracle::{self, SymError};

#[derive(Parser, Debug)]
#[command(name = "qtlattice", version, about = "Modified Macdonald polynomials from coloured lattice paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cap on parallel workers.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct OutputFormat {
    /// Emit the JSON polynomial format.
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    /// Emit human-readable text (default).
    #[arg(long)]
    pub text: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate Φ_{ν|ν̃}(z; t).
    Phi {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        nutilde: String,
        #[arg(long, value_enum, default_value_t = PhiForm::Series)]
        form: PhiForm,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// Monomial expansion of H_λ(x; q, t).
    Hpoly {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value = "lattice")]
        route: String,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// Monomial expansion of the modified Hall–Littlewood polynomial.
    Hl {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// Schur coefficients K_{ν,λ}(q,t), or K_{ν,λ}(t) with --hl.
    Kostka {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value = "lattice")]
        route: String,
        #[arg(long)]
        hl: bool,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// One coefficient of x^μ in H_λ; μ may be any composition.
    Coeff {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "lattice")]
        route: String,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// Run verification sweeps.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        max_weight: usize,
        #[command(flatten)]
        out: OutputFormat,
    },
    /// Compare both sides of a Cauchy identity as truncated series.
    Cauchy {
        #[arg(long)]
        identity: String,
        #[arg(long, default_value_t = 1)]
        nx: usize,
        #[arg(long, default_value_t = 1)]
        ny: usize,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        out: OutputFormat,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiForm {
    Series,
    Finite,
    Positive,
    Prime,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Phi,
    Lattice,
    Routes,
    Reductions,
    Hl,
    Duality,
    Cauchy,
    Kostka,
}

impl Suite {
    const EACH: [Suite; 8] = [
        Suite::Phi,
        Suite::Lattice,
        Suite::Routes,
        Suite::Reductions,
        Suite::Hl,
        Suite::Duality,
        Suite::Cauchy,
        Suite::Kostka,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Phi => "phi",
            Suite::Lattice => "lattice",
            Suite::Routes => "routes",
            Suite::Reductions => "reductions",
            Suite::Hl => "hl",
            Suite::Duality => "duality",
            Suite::Cauchy => "cauchy",
            Suite::Kostka => "kostka",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit status 2.
    Usage(String),
    /// A failed internal assertion or verification; exit status 1.
    Internal(String),
}

impl From<PhiError> for CliError {
    fn from(e: PhiError) -> Self {
        match e {
            PhiError::TruncationResidual { .. } => CliError::Internal(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::InsufficientVariables { .. } | LatticeError::LengthMismatch => CliError::Usage(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<SymError> for CliError {
    fn from(e: SymError) -> Self {
        match e {
            SymError::TooFewVariables { .. } => CliError::Usage(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ModmacError> for CliError {
    fn from(e: ModmacError) -> Self {
        match e {
            ModmacError::InsufficientVariables { .. } | ModmacError::TruncationTooSmall => {
                CliError::Usage(e.to_string())
            }
            ModmacError::Lattice(e) => e.into(),
            ModmacError::Sym(e) => e.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<usize>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("--{flag}: bad entry {x:?}"))))
        .collect()
}

fn parse_partition(flag: &str, s: &str) -> Result<Partition, CliError> {
    let parts = parse_list(flag, s)?;
    if parts.windows(2).any(|w| w[0] < w[1]) {
        return Err(CliError::Usage(format!("--{flag}: {s:?} is not weakly decreasing")));
    }
    Partition::new(parts).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn parse_route(s: &str) -> Result<HRoute, CliError> {
    s.parse().map_err(CliError::Usage)
}

/// `m[2]: 1; m[1,1]: 1+q`, largest partition first.
pub fn table_text(prefix: &str, t: &BTreeMap<Partition, Poly>) -> String {
    t.iter().rev().map(|(k, v)| format!("{prefix}[{k}]: {v}")).collect::<Vec<_>>().join("; ")
}

fn emit(out: OutputFormat, text: String, json: Value) -> String {
    if out.json {
        serde_json::to_string(&json).expect("serializable")
    } else {
        text
    }
}

/// Execute a parsed command and return what goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Phi { nu, nutilde, form, out } => {
            let sp = SequencePair::new(parse_list("nu", nu)?, parse_list("nutilde", nutilde)?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let v = match form {
                PhiForm::Series => phi::phi(&sp, Route::Series)?.value,
                PhiForm::Finite => phi::phi(&sp, Route::Finite)?.value,
                PhiForm::Positive => phi::phi(&sp, Route::Positive)?.value,
                PhiForm::Prime => phi::phi_prime(&sp)?,
            };
            Ok(emit(*out, v.to_text(), poly_to_json(&v)))
        }
        Command::Hpoly { lambda, route, vars, out } => {
            let lam = parse_partition("lambda", lambda)?;
            let h = modmac::modified_h(&lam, *vars, parse_route(route)?)?;
            Ok(emit(*out, table_text("m", &h.coeffs), h.to_json()))
        }
        Command::Hl { lambda, vars, out } => {
            let lam = parse_partition("lambda", lambda)?;
            let t = modmac::modified_hl(&lam, *vars)?;
            let j = json!({"lambda": lam.to_string(), "coeffs": table_json(&t)});
            Ok(emit(*out, table_text("m", &t), j))
        }
        Command::Kostka { lambda, route, hl, out } => {
            let lam = parse_partition("lambda", lambda)?;
            let k = if *hl { modmac::kostka_t(&lam)? } else { modmac::kostka_qt(&lam, parse_route(route)?)? };
            let j = json!({"lambda": lam.to_string(), "coeffs": table_json(&k)});
            Ok(emit(*out, table_text("s", &k), j))
        }
        Command::Coeff { lambda, mu, route, vars, out } => {
            let lam = parse_partition("lambda", lambda)?;
            let mut alpha = parse_list("mu", mu)?;
            let route = parse_route(route)?;
            let n = vars.unwrap_or_else(|| modmac::default_vars(&lam).max(alpha.len()));
            if alpha.len() > n {
                return Err(CliError::Usage(format!("--mu has {} entries but only {n} variables", alpha.len())));
            }
            alpha.resize(n, 0);
            let v = match route {
                HRoute::LatticeX | HRoute::LatticeDual => {
                    let needed = lam.len().max(lam.largest());
                    if n < needed {
                        return Err(ModmacError::InsufficientVariables { needed, got: n }.into());
                    }
                    let f = if route == HRoute::LatticeX { Formula::X } else { Formula::Z };
                    lattice::coefficient(&lam, n, f, &alpha)?
                }
                HRoute::Oracle => {
                    let mut sorted = alpha.clone();
                    sorted.sort_unstable_by(|a, b| b.cmp(a));
                    let key = Partition::new(sorted).map_err(|e| CliError::Usage(e.to_string()))?;
                    modmac::modified_h(&lam, Some(n), route)?.coeffs.get(&key).cloned().unwrap_or_default()
                }
            };
            Ok(emit(*out, v.to_text(), poly_to_json(&v)))
        }
        Command::Verify { suite, max_weight, out } => {
            let suites: Vec<Suite> = if *suite == Suite::All { Suite::EACH.to_vec() } else { vec![*suite] };
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            let mut failed = false;
            for s in suites {
                let r = run_suite(s, *max_weight);
                failed |= r.failure.is_some();
                lines.push(match &r.failure {
                    None => format!("{}: PASS ({} checks)", s.name(), r.checked),
                    Some(w) => format!("{}: FAIL ({} checks): {w}", s.name(), r.checked),
                });
                rows.push(json!({"suite": s.name(), "pass": r.failure.is_none(), "checks": r.checked, "failure": r.failure}));
            }
            let text = emit(*out, lines.join("\n"), Value::Array(rows));
            if failed {
                Err(CliError::Internal(text))
            } else {
                Ok(text)
            }
        }
        Command::Cauchy { identity, nx, ny, degree, out } => {
            let id: CauchyIdentity = identity.parse().map_err(CliError::Usage)?;
            if *nx == 0 || *ny == 0 {
                return Err(CliError::Usage("alphabets need at least one letter".into()));
            }
            let ok = modmac::cauchy_check(id, *nx, *ny, *degree)?;
            let text = format!("{id} nx={nx} ny={ny} degree={degree}: {}", if ok { "equal" } else { "DIFFERENT" });
            let j = json!({"identity": id.to_string(), "nx": nx, "ny": ny, "degree": degree, "equal": ok});
            let s = emit(*out, text, j);
            if ok {
                Ok(s)
            } else {
                Err(CliError::Internal(s))
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub checked: usize,
    pub failure: Option<String>,
}

fn sweep<T: Sync>(items: &[T], check: impl Fn(&T) -> Result<(), String> + Sync) -> SuiteReport {
    let failures: Vec<String> = items.par_iter().filter_map(|x| check(x).err()).collect();
    SuiteReport { checked: items.len(), failure: failures.into_iter().next() }
}

fn partitions_up_to(w: usize) -> Vec<Partition> {
    (1..=w).flat_map(Partition::all).collect()
}

/// One verification sweep, bounded by `max_weight`.
pub fn run_suite(suite: Suite, max_weight: usize) -> SuiteReport {
    let w = max_weight.max(1);
    match suite {
        Suite::All => {
            let mut total = SuiteReport::default();
            for s in Suite::EACH {
                let r = run_suite(s, w);
                total.checked += r.checked;
                total.failure = total.failure.or(r.failure);
            }
            total
        }
        Suite::Phi => {
            let pairs: Vec<SequencePair> = (1..=3)
                .flat_map(|n| SequencePair::all(n, w))
                .filter(|s| s.nu_slice().iter().zip(s.nutilde_slice()).all(|(a, b)| a <= b))
                .collect();
            sweep(&pairs, |s| {
                let a = phi::phi(s, Route::Series).map_err(|e| e.to_string())?.value;
                let b = phi::phi(s, Route::Finite).map_err(|e| e.to_string())?.value;
                let c = phi::phi(s, Route::Positive).map_err(|e| e.to_string())?.value;
                if a != b || a != c {
                    return Err(format!("{s:?}: routes disagree"));
                }
                if !a.is_nonnegative() {
                    return Err(format!("{s:?}: negative coefficient"));
                }
                Ok(())
            })
        }
        Suite::Lattice => {
            let mut r = SuiteReport::default();
            for (n, levels) in [(1, w.min(3)), (2, 2)] {
                let rep = lattice::rll_check(n, levels);
                r.checked += rep.checked;
                if !rep.ok {
                    r.failure = Some(format!("RLL n={n}: {}", rep.witness.unwrap_or_default()));
                }
            }
            let xv = Poly::var("x");
            let mut faces = Vec::new();
            for j in 1..=w.min(3) {
                for n in 1..=2 {
                    for f in FaceState::all(n, 2) {
                        if f.sigma.iter().sum::<usize>() <= j && f.sigmatilde.iter().sum::<usize>() <= j {
                            faces.push((j, f));
                        }
                    }
                }
            }
            let fr = sweep(&faces, |(j, f)| {
                let z = xv.mul(&Poly::var("t").pow(*j as u32)).neg();
                let brute = lattice::fused_vertex_bruteforce(*j, &f.sigma, &f.sigmatilde, &f.rho, &f.rhotilde, &xv)
                    .map_err(|e| e.to_string())?;
                if brute != lattice::weight_fused(f, &FusedWeightParams { x: xv.clone(), z }) {
                    return Err(format!("fusion J={j} {f:?}"));
                }
                Ok(())
            });
            r.checked += fr.checked;
            r.failure = r.failure.or(fr.failure);
            r
        }
        Suite::Routes => sweep(&partitions_up_to(w), |lam| {
            let n = lam.weight();
            let want = modmac::modified_h(lam, Some(n), HRoute::Oracle).map_err(|e| e.to_string())?;
            for r in [HRoute::LatticeX, HRoute::LatticeDual] {
                let got = modmac::modified_h(lam, Some(n), r).map_err(|e| e.to_string())?;
                if got.coeffs != want.coeffs {
                    return Err(format!("{lam}: {r} differs from oracle"));
                }
            }
            Ok(())
        }),
        Suite::Reductions => sweep(&partitions_up_to(w.min(4)), |lam| {
            let r = symoracle::w_reductions(lam, lam.weight()).map_err(|e| e.to_string())?;
            match r.iter().position(|ok| !ok) {
                None => Ok(()),
                Some(k) => Err(format!("{lam}: reduction {} fails", ["z=-tx", "z=0", "x=0", "x=-qz"][k])),
            }
        }),
        Suite::Hl => sweep(&partitions_up_to(w), |lam| {
            let n = lam.weight();
            let h = modmac::modified_h(lam, Some(n), HRoute::LatticeX).map_err(|e| e.to_string())?;
            let at0: BTreeMap<Partition, Poly> = h
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v.subs(&[("q", Poly::zero())]).expect("polynomial")))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            let hl = modmac::modified_hl(lam, Some(n)).map_err(|e| e.to_string())?;
            if at0 != hl {
                return Err(format!("{lam}: q=0 table differs from the flag sum"));
            }
            Ok(())
        }),
        Suite::Duality => sweep(&partitions_up_to(w), |lam| match modmac::duality_check(lam, HRoute::Oracle) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!("{lam}: duality fails")),
            Err(e) => Err(e.to_string()),
        }),
        Suite::Cauchy => {
            let d = w.min(3);
            sweep(&CauchyIdentity::ALL, |id| match modmac::cauchy_check(*id, 1, 1, d) {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("{id}: sides differ at degree {d}")),
                Err(e) => Err(e.to_string()),
            })
        }
        Suite::Kostka => sweep(&partitions_up_to(w), |lam| {
            modmac::kostka_qt(lam, HRoute::Oracle).map(|_| ()).map_err(|e| e.to_string())
        }),
    }
}

/// Binary entry point.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match run(&cli) {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal assertion failed:\n{m}");
            ExitCode::from(1)
        }
    }
}
