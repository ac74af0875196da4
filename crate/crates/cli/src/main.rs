//! `trisum`: exact couplings of decreasing distributions, the growth
//! constant and max-entropy distribution around them, a transportation-slice
//! feasibility oracle, and sum-free system verifiers.
//!
//! Exit codes: 0 success/feasible/valid, 1 infeasible or invalid instance,
//! 2 usage or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trisum_core::constants::{lambda_prime, ln_theta, psi, psi_rational, rho, theta};
use trisum_core::couple::{couple, verify_coupling};
use trisum_core::decompose::simple_decompose;
use trisum_core::dist::{Dist, PrecisionParam, Rat};
use trisum_core::io::{
    self, format_rat, parse_coupling, parse_dists, parse_trisystem, write_coupling, write_dists,
};
use trisum_core::oracle::{compatible_oracle, FeasibilityResult};
use trisum_core::real::decimal_string;
use trisum_core::sumfree::verify_trisystem;

#[derive(Parser)]
#[command(
    name = "trisum",
    version,
    about = "Exact couplings and bound constants for constant-sum triples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the growth constant theta_p and its minimiser.
    Theta {
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 12)]
        digits: u32,
    },
    /// Print the geometric parameter rho with mean (p-1)/3.
    Rho {
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 12)]
        digits: u32,
    },
    /// Print the max-entropy distribution psi (decimals), or emit the exact
    /// rational surrogate as a .dist file with --rational.
    Psi {
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 12)]
        digits: u32,
        #[arg(long)]
        rational: bool,
        /// Output file (stdout if omitted).
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Couple the three distributions of a .dist file into a .cpl coupling.
    Couple {
        #[arg(short)]
        input: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Print the simple convex decomposition of the distributions in a file.
    Decompose {
        #[arg(short)]
        input: PathBuf,
    },
    /// Decide whether the three distributions admit a coupling with constant
    /// sum s; print a witness or an infeasibility certificate.
    Oracle {
        #[arg(short)]
        input: PathBuf,
        #[arg(short)]
        s: usize,
        /// Witness output file (stdout if omitted).
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Check a .cpl coupling exactly against the marginals in a .dist file.
    VerifyCoupling {
        #[arg(short)]
        input: PathBuf,
        #[arg(long)]
        against: PathBuf,
    },
    /// Check the sum-free condition of a .tri triple system.
    SumfreeVerify {
        #[arg(short)]
        input: PathBuf,
    },
    /// End-to-end run at one p: build psi, couple it with two copies of
    /// itself, verify, and compare its entropy with ln(theta_p).
    Demo {
        #[arg(short)]
        p: usize,
        #[arg(long, default_value_t = 12)]
        digits: u32,
    },
}

/// Command outcomes that are not plain success.
enum Failure {
    /// Structurally fine input describing an instance that fails
    /// (not decreasing, infeasible, invalid coupling, ...).
    Instance(String),
    /// Malformed files or flags.
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Instance(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let msg = match &f {
                Failure::Instance(m) | Failure::Usage(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_dists(path: &Path) -> Result<Vec<Dist>, Failure> {
    parse_dists(&read_file(path)?).map_err(io_failure)
}

fn io_failure(e: io::IoError) -> Failure {
    match e {
        io::IoError::Malformed { .. } => Failure::Usage(e.to_string()),
        io::IoError::BadDist { .. } => Failure::Instance(e.to_string()),
    }
}

fn load_triple(path: &Path) -> Result<[Dist; 3], Failure> {
    let dists = load_dists(path)?;
    <[Dist; 3]>::try_from(dists).map_err(|v: Vec<Dist>| {
        Failure::Usage(format!("expected 3 distributions, found {}", v.len()))
    })
}

fn precision(digits: u32) -> Result<PrecisionParam, Failure> {
    if digits == 0 {
        return Err(Failure::Usage("--digits must be at least 1".into()));
    }
    Ok(PrecisionParam::new(digits))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Theta { p, digits } => {
            if p == 0 {
                return Err(Failure::Usage("p must be positive".into()));
            }
            let prec = precision(digits)?;
            let result = theta(p, prec);
            println!("theta({p}) = {}", decimal_string(&result.theta(), digits));
            println!(
                "beta_star({p}) = {}",
                decimal_string(&result.beta_star(), digits)
            );
            Ok(0)
        }
        Command::Rho { p, digits } => {
            let prec = precision(digits)?;
            let result = rho(p, prec).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("rho({p}) = {}", decimal_string(&result.rho(), digits));
            Ok(0)
        }
        Command::Psi {
            p,
            digits,
            rational,
            output,
        } => {
            let prec = precision(digits)?;
            if rational {
                let d = psi_rational(p, prec).map_err(|e| Failure::Usage(e.to_string()))?;
                emit(output.as_deref(), &write_dists(&[d]))?;
            } else {
                let components = psi(p, prec).map_err(|e| Failure::Usage(e.to_string()))?;
                let mut text = String::new();
                for (j, c) in components.iter().enumerate() {
                    text.push_str(&format!("psi({j}) = {}\n", decimal_string(c, digits)));
                }
                emit(output.as_deref(), &text)?;
            }
            Ok(0)
        }
        Command::Couple { input, output } => {
            let [d1, d2, d3] = load_triple(&input)?;
            let c = couple(&d1, &d2, &d3).map_err(|e| Failure::Instance(e.to_string()))?;
            emit(output.as_deref(), &write_coupling(&c))?;
            Ok(0)
        }
        Command::Decompose { input } => {
            let dists = load_dists(&input)?;
            if dists.is_empty() {
                return Err(Failure::Usage("file contains no distributions".into()));
            }
            let dec = simple_decompose(&dists);
            println!("terms = {}", dec.terms().len());
            println!("expect_sum = {}", format_rat(dec.expect_sum()));
            for (idx, (w, tuple)) in dec.terms().iter().enumerate() {
                println!("term {}: weight {}", idx + 1, format_rat(w));
                for d in tuple.components() {
                    let row: Vec<String> = d.masses().iter().map(format_rat).collect();
                    println!("  {}", row.join(" "));
                }
            }
            Ok(0)
        }
        Command::Oracle { input, s, output } => {
            let [d1, d2, d3] = load_triple(&input)?;
            let result =
                compatible_oracle(&d1, &d2, &d3, s).map_err(|e| Failure::Usage(e.to_string()))?;
            match result {
                FeasibilityResult::Feasible { witness } => {
                    println!("FEASIBLE");
                    emit(output.as_deref(), &write_coupling(&witness))?;
                    Ok(0)
                }
                FeasibilityResult::Infeasible { certificate } => {
                    println!("INFEASIBLE");
                    print!("{certificate}");
                    Ok(1)
                }
            }
        }
        Command::VerifyCoupling { input, against } => {
            let c = parse_coupling(&read_file(&input)?).map_err(io_failure)?;
            let [d1, d2, d3] = load_triple(&against)?;
            let report = verify_coupling(&c, &d1, &d2, &d3);
            println!("mass_total_ok = {}", report.mass_total_ok);
            println!("support_on_plane = {}", report.support_on_plane);
            println!("masses_positive = {}", report.masses_positive);
            for (i, ok) in report.marginals_ok.iter().enumerate() {
                println!("marginal{} = {ok}", i + 1);
            }
            if report.pass() {
                println!("PASS");
                Ok(0)
            } else {
                println!("FAIL");
                Ok(1)
            }
        }
        Command::SumfreeVerify { input } => {
            let ts = parse_trisystem(&read_file(&input)?).map_err(io_failure)?;
            let report = verify_trisystem(&ts);
            if report.ok {
                println!("VALID ({} triples)", ts.len());
                Ok(0)
            } else {
                let (i, j, k) = report.violation.unwrap();
                println!("INVALID violation=({i},{j},{k})");
                Ok(1)
            }
        }
        Command::Demo { p, digits } => {
            let prec = precision(digits)?;
            if p < 2 {
                return Err(Failure::Usage("demo needs p >= 2".into()));
            }
            let d = psi_rational(p, prec).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("psi_rational(p={p}):");
            print!("{}", write_dists(std::slice::from_ref(&d)));
            println!("mean = {} (exact)", format_rat(&d.mean()));

            let c = couple(&d, &d, &d).map_err(|e| Failure::Instance(e.to_string()))?;
            let report = verify_coupling(&c, &d, &d, &d);
            println!(
                "coupling: {} entries on the plane a+b+c = {}",
                c.entries().len(),
                c.s()
            );
            println!("verify: {}", if report.pass() { "PASS" } else { "FAIL" });

            let eta = lambda_prime(p, prec);
            let log_theta = ln_theta(p, prec);
            let diff: Rat = if eta >= log_theta {
                &eta - &log_theta
            } else {
                &log_theta - &eta
            };
            println!("eta(psi)      = {}", decimal_string(&eta, digits));
            println!("ln(theta_{p}) = {}", decimal_string(&log_theta, digits));
            println!("|difference|  = {}", decimal_string(&diff, digits + 4));
            Ok(if report.pass() { 0 } else { 1 })
        }
    }
}
