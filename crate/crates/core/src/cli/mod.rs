//! The `apgeo` command line.

mod cache;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use cache::{gamma_hash, CacheEntry, CachedN, CACHE_ENV, DEFAULT_CACHE_PATH};

use crate::exact::IntMatrix;
use crate::filtration::{kernel_order_check, n_of_brute, DirectN, KernelMode, NFunction};
use crate::geodesics::{abs_prim_root, classify, is_absolutely_primitive, is_primitive, length_class, Classification};
use crate::numeric::LENGTH_DIGITS;
use crate::progressions::{
    a1_element, build_progression, build_progression_containing, prime_density_report, verify_witness, BuildOptions,
    ProgressionError, ProgressionWitness,
};
use crate::ramsey::{transfer_witness, vdw_number, TransferMap, VdwOutcome};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "apgeo", version, about = "Certified arithmetic progressions of primitive geodesic lengths")]
struct Cli {
    /// Compute every n-value afresh instead of using the cache file.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct BuildArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, allow_hyphen_values = true)]
    gamma: IntMatrix,
    #[arg(long, default_value_t = 10_000)]
    prime_bound: u64,
    #[arg(long, default_value_t = 200_000)]
    max_digits: u64,
    #[arg(long, default_value_t = 8)]
    radius_cap: u32,
    /// Write the witness here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BuildArgs {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            prime_bound: self.prime_bound,
            max_digits: self.max_digits,
            radius_cap: self.radius_cap,
            ..BuildOptions::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a k-term progression over an absolutely primitive element.
    Progression(BuildArgs),
    /// Build a k-term progression containing the length of a primitive element.
    Contains(BuildArgs),
    /// Re-check a witness file.
    Verify { file: PathBuf },
    /// Classify an element and report its primitivity data.
    Absprim {
        #[arg(long, allow_hyphen_values = true)]
        gamma: IntMatrix,
    },
    /// n(gamma, eta_p^r) for the A1 element at p.
    Nfun {
        #[arg(long, allow_hyphen_values = true)]
        gamma: IntMatrix,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        r: u32,
        /// Plain iteration instead of the lifting algorithm.
        #[arg(long)]
        brute: bool,
    },
    /// Check the kernel-layer order lemmas.
    KernelCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i: u32,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Van der Waerden number by exhaustive search.
    Vdw {
        #[arg(long)]
        colors: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cap: usize,
    },
    /// Move a progression across a commensurability given by a divisor-pair map.
    Transfer {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        dm: u64,
        #[arg(long)]
        dmp: u64,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 40)]
        n_cap: usize,
        #[arg(long, default_value_t = 200_000)]
        max_digits: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Share of primes splitting in Q(sqrt(D0)).
    Density {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        bound: u64,
    },
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Progression(p) if p.is_cap() => EXIT_CAP,
        Error::Progression(ProgressionError::Inconsistent(_)) => EXIT_FAILED,
        Error::Ramsey(r) if r.is_cap() => EXIT_CAP,
        Error::Ramsey(crate::ramsey::RamseyError::Build(ProgressionError::Inconsistent(_))) => EXIT_FAILED,
        Error::Filtration(crate::filtration::FiltrationError::CapExceeded { .. })
        | Error::Filtration(crate::filtration::FiltrationError::NotStable { .. }) => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

fn cache_path() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_PATH))
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, dest: Option<&Path>, text: &str, summary: &str) -> Result<(), Error> {
    match dest {
        Some(p) => {
            std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            writeln!(out, "{summary}").map_err(|e| Error::Io(e.to_string()))
        }
        None => writeln!(out, "{text}").map_err(|e| Error::Io(e.to_string())),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn summary(w: &ProgressionWitness) -> String {
    format!("C = {}, primes {:?}, multipliers {:?}", w.c, w.primes, w.multipliers())
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let cached;
    let nf: &dyn NFunction = if cli.no_cache {
        &DirectN
    } else {
        cached = CachedN::open(&cache_path());
        &cached
    };
    match dispatch(cli.command, nf, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, nf: &dyn NFunction, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match cmd {
        Command::Progression(a) => {
            let w = build_progression(nf, &a.gamma, a.k, &a.options())?;
            emit(out, a.out.as_deref(), &w.to_json(), &summary(&w))?;
            Ok(EXIT_OK)
        }
        Command::Contains(a) => {
            let w = build_progression_containing(nf, &a.gamma, a.k, &a.options())?;
            emit(out, a.out.as_deref(), &w.to_json(), &summary(&w))?;
            Ok(EXIT_OK)
        }
        Command::Verify { file } => {
            let w = ProgressionWitness::from_json(&read_file(&file)?).map_err(|e| Error::Json(e.to_string()))?;
            let rep = verify_witness(&w);
            writeln!(out, "{}", pretty(&rep)).map_err(io)?;
            if rep.passed() {
                Ok(EXIT_OK)
            } else {
                for c in rep.failures() {
                    writeln!(err, "FAILED {}: {}", c.name, c.detail).map_err(io)?;
                }
                Ok(EXIT_FAILED)
            }
        }
        Command::Absprim { gamma } => {
            let report = match classify(&gamma)? {
                Classification::Hyperbolic(h) => {
                    let lc = length_class(&h)?;
                    let (root, j) = abs_prim_root(&h)?;
                    json!({
                        "gamma": gamma.to_string(),
                        "classification": "hyperbolic",
                        "trace": h.trace().to_string(),
                        "d0": h.d0(),
                        "primitive": is_primitive(&h)?,
                        "absolutely_primitive": is_absolutely_primitive(&h)?,
                        "j": j.to_string(),
                        "root": root.matrix().to_string(),
                        "length": lc,
                        "length_value": lc.numeric(LENGTH_DIGITS).to_string(),
                    })
                }
                other => json!({
                    "gamma": gamma.to_string(),
                    "classification": other.name(),
                    "trace": gamma.trace().to_string(),
                }),
            };
            writeln!(out, "{}", pretty(&report)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Nfun { gamma, prime, r, brute } => {
            let eta = a1_element(prime)?;
            let n = if brute { n_of_brute(&gamma, &eta, r, None)? } else { nf.n_value(&gamma, &eta, r)? };
            writeln!(out, "{n}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::KernelCheck {
            n,
            p,
            i,
            exhaustive,
            samples,
            seed,
        } => {
            let mode = match (exhaustive, samples) {
                (true, _) => KernelMode::Exhaustive,
                (false, Some(count)) => KernelMode::Sampled { count, seed },
                (false, None) => KernelMode::Sampled { count: 500, seed },
            };
            let rep = kernel_order_check(n, p, i, mode)?;
            writeln!(out, "{}", pretty(&rep)).map_err(io)?;
            Ok(if rep.passed() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Vdw { colors, k, cap } => {
            let outcome = vdw_number(colors, k, cap)?;
            writeln!(out, "{}", pretty(&outcome)).map_err(io)?;
            Ok(match outcome {
                VdwOutcome::Exact { .. } => EXIT_OK,
                VdwOutcome::AboveCap { .. } => EXIT_CAP,
            })
        }
        Command::Transfer {
            witness,
            dm,
            dmp,
            map,
            k,
            n_cap,
            max_digits,
            out: dest,
        } => {
            let w = ProgressionWitness::from_json(&read_file(&witness)?).map_err(|e| Error::Json(e.to_string()))?;
            let mut tm: TransferMap =
                serde_json::from_str(&read_file(&map)?).map_err(|e| Error::Json(e.to_string()))?;
            tm.d_m = dm;
            tm.d_mp = dmp;
            let opts = BuildOptions {
                max_digits,
                ..BuildOptions::default()
            };
            let t = transfer_witness(nf, &w, &tm, k, n_cap, &opts)?;
            let block = t.transfer.as_ref().expect("transfer block");
            let line = format!("D = {}, transferred multipliers {:?}", block.big_d, block.multipliers);
            emit(out, dest.as_deref(), &t.to_json(), &line)?;
            Ok(EXIT_OK)
        }
        Command::Density { disc, bound } => {
            let rep = prime_density_report(disc, bound)?;
            writeln!(out, "{}", pretty(&rep)).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}
