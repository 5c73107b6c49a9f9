//! Command-line surface: enumeration, counting, constants, power-saving
//! reports, self-verification, external-table ingestion, and report
//! emission.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 coverage or resource-bound error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use composita::abelian::{count_with_divisibility, enumerate_conductors};
use composita::cache::{
    export_abelian_csv, export_cubic_csv, read_cubic_cache, write_abelian_cache,
    write_cubic_cache, CacheParams,
};
use composita::cubic::{enumerate_cubic_fields, CubicTable, GaloisType};
use composita::densities::predicted_nqr;
use composita::error::Error;
use composita::euler::final_constants;
use composita::exponent::{
    calcweight_bruteforce, default_error_exponents, power_saving, power_saving_cross_check,
    verify_inequalities, LatticeRange,
};
use composita::ingest::{parse_csv, validate};
use composita::permgroup::{all_odd_abelian, AbelianGroupSpec};
use composita::sieve::{
    assemble_g, direct_pair_count, product_lemma_check, PairPools, SyntheticFactor,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "composita",
    about = "Counting composita of S3 cubic and odd abelian number fields by discriminant",
    version
)]
struct Cli {
    /// Worker threads for parallel enumeration (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate cubic fields by absolute discriminant.
    EnumCubic(EnumCubicArgs),
    /// Enumerate C_ell conductors/fields by discriminant.
    EnumAbelian(EnumAbelianArgs),
    /// Count fields or field pairs under local conditions.
    Count(CountArgs),
    /// Euler-product constants of the pair-counting asymptotic.
    Constants(ConstantsArgs),
    /// Exact power-saving exponent for an odd abelian group.
    PowerSaving(PowerSavingArgs),
    /// Internal cross-checks; nonzero exit on any failure.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Cross-validate an external field table against our enumeration.
    Ingest(IngestArgs),
    /// Emit the standard CSV + JSON report bundle.
    Report(ReportArgs),
}

#[derive(Args)]
struct EnumCubicArgs {
    #[arg(long)]
    max_disc: u64,
    /// CSV destination (stdout when omitted). Columns: disc,a,b,c,d,galois_type.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory; results are reused when present.
    #[arg(long, default_value = "cache")]
    cache_dir: PathBuf,
}

#[derive(Args)]
struct EnumAbelianArgs {
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    max_disc: u64,
    /// CSV destination (stdout when omitted). Columns: conductor,disc,num_fields.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "cache")]
    cache_dir: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CountKind {
    Cubic,
    Abelian,
    Pairs,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    kind: CountKind,
    /// Decimal string; pair counts may exceed u64 range.
    #[arg(long)]
    max_disc: String,
    /// Require partial ramification at every prime dividing q (cubic).
    #[arg(long, default_value_t = 1)]
    partial: u64,
    /// Require total ramification at every prime dividing r (cubic).
    #[arg(long, default_value_t = 1)]
    total: u64,
    /// Count only discriminants divisible by q (abelian).
    #[arg(long, default_value_t = 1)]
    div: u64,
    /// Cyclic degree for abelian and pair counts.
    #[arg(long, default_value_t = 7)]
    ell: u32,
    /// Cubic pool bound for pair counts.
    #[arg(long, default_value_t = 10_000)]
    k_bound: u64,
    /// Abelian pool bound for pair counts (default 29^6 * 1000).
    #[arg(long)]
    l_bound: Option<u64>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    ell: u32,
    #[arg(long, default_value_t = 1_000_000)]
    prime_bound: u64,
}

#[derive(Args)]
struct PowerSavingArgs {
    /// Group spec: "C{n}" factors joined by "x", e.g. C7 or C3xC9.
    #[arg(long)]
    group: String,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exact identity between the assembled sieve and the direct pair count.
    Sieve(VerifySieveArgs),
    /// Explicit product upper bound on synthetic factor pairs.
    #[command(name = "lemma-3.2")]
    Lemma32,
    /// Fitted lattice-sum growth exponents against predictions.
    Calcweight(VerifySeedArgs),
    /// Boundedness of locally conditioned cubic counts.
    Uniformity(VerifyDiscArgs),
    /// Two-term cubic asymptotic against enumeration.
    Fit(VerifyDiscArgs),
}

#[derive(Args)]
struct VerifySieveArgs {
    #[arg(long, default_value = "C7")]
    group: String,
    #[arg(long, default_value_t = 10_000)]
    k_bound: u64,
    #[arg(long)]
    l_bound: Option<u64>,
}

#[derive(Args)]
struct VerifySeedArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct VerifyDiscArgs {
    #[arg(long, default_value_t = 1_000_000)]
    max_disc: u64,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    file: PathBuf,
    /// Only "lmfdb-like" is supported: CSV with label,degree,disc,galois_label.
    #[arg(long, default_value = "lmfdb-like")]
    format: String,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Coverage(_)
                | Error::ResourceLimit { .. }
                | Error::Divergence { .. }
                | Error::PrecisionUnreachable { .. } => 3,
                Error::InvalidCondition(_) | Error::GroupSpec(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::EnumCubic(args) => enum_cubic(args),
        Command::EnumAbelian(args) => enum_abelian(args),
        Command::Count(args) => count(args),
        Command::Constants(args) => constants(args),
        Command::PowerSaving(args) => power_saving_cmd(args),
        Command::Verify(v) => verify(v),
        Command::Ingest(args) => ingest(args),
        Command::Report(args) => report(args),
    }
}

fn out_writer(out: &Option<PathBuf>) -> Result<Box<dyn std::io::Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn enum_cubic(args: EnumCubicArgs) -> Result<ExitCode, Error> {
    let params = CacheParams::new("cubic", &[("max_disc", args.max_disc.to_string())]);
    let records = match read_cubic_cache(&args.cache_dir, &params) {
        Ok(records) => records,
        Err(_) => {
            let records = enumerate_cubic_fields(args.max_disc)?;
            write_cubic_cache(&args.cache_dir, &params, &records)?;
            records
        }
    };
    export_cubic_csv(out_writer(&args.out)?, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn enum_abelian(args: EnumAbelianArgs) -> Result<ExitCode, Error> {
    let records = enumerate_conductors(args.ell, args.max_disc)?;
    let params = CacheParams::new(
        "abelian",
        &[("ell", args.ell.to_string()), ("max_disc", args.max_disc.to_string())],
    );
    write_abelian_cache(&args.cache_dir, &params, &records)?;
    export_abelian_csv(out_writer(&args.out)?, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_u64(s: &str) -> Result<u64, Error> {
    s.parse()
        .map_err(|_| Error::InvalidCondition(format!("{s} is not a valid u64 bound")))
}

fn count(args: CountArgs) -> Result<ExitCode, Error> {
    match args.kind {
        CountKind::Cubic => {
            let x = parse_u64(&args.max_disc)?;
            let table = CubicTable::build(x)?;
            if args.partial == 1 && args.total == 1 {
                let s3 = table.records.iter().filter(|r| r.galois == GaloisType::S3).count();
                let c3 = table.records.iter().filter(|r| r.galois == GaloisType::C3).count();
                println!("S3: {s3}");
                println!("C3: {c3}");
                println!("total: {}", s3 + c3);
            } else {
                let n = table.count_with_conditions(x, args.partial, args.total)?;
                println!("S3 (partial {} | total {}): {n}", args.partial, args.total);
            }
        }
        CountKind::Abelian => {
            let x = parse_u64(&args.max_disc)?;
            let n = count_with_divisibility(args.ell, x, args.div)?;
            println!("C{} (div {}): {n}", args.ell, args.div);
        }
        CountKind::Pairs => {
            let x = BigUint::from_str(&args.max_disc)
                .map_err(|_| Error::InvalidCondition(format!("bad bound {}", args.max_disc)))?;
            let l_bound = args.l_bound.unwrap_or(29u64.pow(6) * 1_000);
            let pools = PairPools::build(args.ell, args.k_bound, l_bound)?;
            let n = direct_pair_count(&x, &pools)?;
            println!("pairs: {n}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn constants(args: ConstantsArgs) -> Result<ExitCode, Error> {
    let c = final_constants(args.ell, args.prime_bound)?;
    println!("{}", serde_json::to_string_pretty(&c).map_err(|e| Error::Cache(e.to_string()))?);
    Ok(ExitCode::SUCCESS)
}

fn power_saving_cmd(args: PowerSavingArgs) -> Result<ExitCode, Error> {
    let group = AbelianGroupSpec::parse(&args.group)?;
    let (a, b) = default_error_exponents();
    let delta = power_saving(&group, &a, &b)?;
    println!("delta = {delta}");
    let check = power_saving_cross_check(&group, &a, &b)?;
    if !check.agrees {
        println!(
            "note: cell-table recomputation gives {} (published value retained)",
            check.recomputed
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn fail(msg: &str) -> Result<ExitCode, Error> {
    eprintln!("FAIL: {msg}");
    Ok(ExitCode::from(1))
}

fn verify(v: VerifyCommand) -> Result<ExitCode, Error> {
    match v {
        VerifyCommand::Sieve(args) => {
            let group = AbelianGroupSpec::parse(&args.group)?;
            if group.factors().len() != 1 {
                return Err(Error::GroupSpec("sieve verification needs a cyclic group".into()));
            }
            let ell = group.factors()[0];
            let l_bound = args.l_bound.unwrap_or(29u64.pow(6) * 1_000);
            let pools = PairPools::build(ell, args.k_bound, l_bound)?;
            // least reachable product discriminant upward, staying inside
            // the pool coverage limit
            let base = BigUint::from(23u64).pow(ell) * BigUint::from(29u64).pow(3 * (ell - 1));
            let limit = pools.coverage_limit();
            let mut xs = vec![BigUint::from(10u64).pow(30)];
            for num in [2u64, 3, 4, 6] {
                let x = &base * BigUint::from(num) / BigUint::from(2u64);
                if x <= limit {
                    xs.push(x);
                }
            }
            for x in &xs {
                let direct = direct_pair_count(x, &pools)?;
                let assembled = assemble_g(x, &pools)?;
                println!("X = {x}: direct {direct}, assembled {assembled}");
                if direct != assembled {
                    return fail("assembled sieve count differs from the direct count");
                }
            }
            println!("sieve identity holds on {} thresholds", xs.len());
        }
        VerifyCommand::Lemma32 => {
            let integers =
                || SyntheticFactor { a_const: 1.0, n: 1.0, r: 0, count: Box::new(|t| t) };
            let squares = || SyntheticFactor {
                a_const: 1.0,
                n: 0.5,
                r: 0,
                count: Box::new(|t| (t as f64).sqrt() as u64),
            };
            let cases: Vec<(SyntheticFactor, SyntheticFactor, u32, u32)> = vec![
                (integers(), integers(), 1, 3),
                (integers(), integers(), 1, 2),
                (integers(), squares(), 1, 4),
                (squares(), integers(), 1, 6),
                (integers(), SyntheticFactor {
                    a_const: 5.0,
                    n: 0.0,
                    r: 0,
                    count: Box::new(|t| t.min(5)),
                }, 2, 1),
            ];
            for (i, (f1, f2, a, b)) in cases.into_iter().enumerate() {
                let rep = product_lemma_check(&f1, &f2, a, b, 1_000_000)?;
                println!(
                    "case {i}: P(X) = {}, bound = {:.3e}, holds = {}, last-decade variation {:.4}",
                    rep.p_x, rep.explicit_bound, rep.bound_holds, rep.last_decade_variation
                );
                if !rep.bound_holds {
                    return fail("explicit product bound violated");
                }
            }
        }
        VerifyCommand::Calcweight(args) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            for range in [LatticeRange::Below, LatticeRange::Above] {
                for i in 0..10 {
                    // the above-threshold tail is evaluated as a difference
                    // of near-equal sums; keep those instances univariate so
                    // the cancellation stays within f64 headroom
                    let n = match range {
                        LatticeRange::Below => rng.gen_range(1..=2),
                        LatticeRange::Above => 1,
                    };
                    // resample instances whose per-dimension growth
                    // exponents nearly tie or sit in the logarithmic
                    // regime: there the power law is not resolvable on a
                    // desk-scale ladder and the fit says nothing
                    let (beta, gamma) = loop {
                        let beta: Vec<f64> =
                            (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
                        let gamma: Vec<f64> = (0..n)
                            .map(|_| match range {
                                LatticeRange::Below => rng.gen_range(-0.8..1.0),
                                LatticeRange::Above => rng.gen_range(-3.0..-1.5),
                            })
                            .collect();
                        let exps: Vec<f64> = beta
                            .iter()
                            .zip(&gamma)
                            .map(|(&b, &g)| (g + 1.0) / b)
                            .collect();
                        let log_regime = exps.iter().any(|e| e.abs() < 0.2);
                        let near_tie = exps.len() == 2 && (exps[0] - exps[1]).abs() < 0.4;
                        if !log_regime && !near_tie {
                            break (beta, gamma);
                        }
                    };
                    let x = 1e6;
                    let fit = calcweight_bruteforce(&beta, &gamma, x, range)?;
                    let err = (fit.fitted_exponent - fit.predicted_exponent).abs();
                    println!(
                        "{range:?} {i}: beta {beta:?} gamma {gamma:?} fitted {:.4} predicted {:.4}",
                        fit.fitted_exponent, fit.predicted_exponent
                    );
                    if err > 0.05 {
                        return fail("fitted exponent off by more than 0.05");
                    }
                }
            }
        }
        VerifyCommand::Uniformity(args) => {
            let x = args.max_disc;
            let table = CubicTable::build(x)?;
            let base = table.count_with_conditions(x, 1, 1)? as f64 / x as f64;
            // admissible moduli: squarefree and coprime to 6
            let admissible = |n: u64| {
                n % 4 != 0 && n % 9 != 0 && n % 25 != 0 && n % 49 != 0
                    && n % 2 != 0 && n % 3 != 0
            };
            let cells: Vec<(u64, u64)> = (5..=50)
                .filter(|&n| admissible(n))
                .flat_map(|n| [(n, 1), (1, n)])
                .collect();
            let mut worst = 0.0f64;
            for row in table.uniformity_report(x, &cells)? {
                worst = worst.max(row.ratio);
                if row.ratio > 10.0 * base {
                    return fail(&format!(
                        "cell (q={}, r={}) ratio {} exceeds 10x base {base}",
                        row.q, row.r, row.ratio
                    ));
                }
            }
            println!("max scaled ratio {worst:.5} vs base {base:.5} (limit {:.5})", 10.0 * base);
        }
        VerifyCommand::Fit(args) => {
            let x = args.max_disc;
            let table = CubicTable::build(x)?;
            let asym = predicted_nqr(x, 1, 1)?;
            let count = table.count_with_conditions(x, 1, 1)? as f64;
            let resid = count - asym;
            let a_term = composita::densities::global_constants(12)?.a * x as f64;
            println!(
                "N(X) = {count}, predicted {asym:.1}, residual {resid:.1} ({:.5} of main term)",
                resid.abs() / a_term
            );
            if resid.abs() > 0.03 * a_term {
                return fail("two-term prediction off by more than 3% of the main term");
            }
        }
    }
    println!("ok");
    Ok(ExitCode::SUCCESS)
}

fn ingest(args: IngestArgs) -> Result<ExitCode, Error> {
    if args.format != "lmfdb-like" {
        return Err(Error::InvalidCondition(format!(
            "unsupported ingest format {}",
            args.format
        )));
    }
    let rows = parse_csv(fs::File::open(&args.file)?)?;
    let report = validate(&rows, None)?;
    println!(
        "checked {} of {} rows over |disc| <= {}",
        report.rows_checked, report.rows_total, report.bound
    );
    if report.ok() {
        println!("exact per-discriminant agreement");
        Ok(ExitCode::SUCCESS)
    } else {
        for diff in &report.diffs {
            eprintln!("diff: {diff}");
        }
        fail("ingested table disagrees with enumeration")
    }
}

fn report(args: ReportArgs) -> Result<ExitCode, Error> {
    fs::create_dir_all(&args.out)?;
    // cubic enumeration: CSV records + JSON summary
    let x = 10_000u64;
    let records = enumerate_cubic_fields(x)?;
    export_cubic_csv(fs::File::create(args.out.join("cubic.csv"))?, &records)?;
    let s3 = records.iter().filter(|r| r.galois == GaloisType::S3).count();
    let c3 = records.len() - s3;
    let cubic_summary = serde_json::json!({
        "max_disc": x, "s3": s3, "c3": c3,
        "predicted_s3": predicted_nqr(x, 1, 1)?,
    });
    // abelian conductor tables
    for ell in [5u32, 7] {
        let bound = 10u64.pow(12);
        let conductors = enumerate_conductors(ell, bound)?;
        export_abelian_csv(
            fs::File::create(args.out.join(format!("abelian-{ell}.csv")))?,
            &conductors,
        )?;
    }
    // Euler constants and power savings
    let constants = final_constants(7, 100_000)?;
    let (a, b) = default_error_exponents();
    let savings: Vec<_> = all_odd_abelian(27)
        .into_iter()
        .map(|g| {
            let rep = verify_inequalities(&g, &a, &b);
            let delta = power_saving(&g, &a, &b).map(|d| d.to_string()).ok();
            serde_json::json!({
                "group": format!("{g}"),
                "secondary_term": rep.secondary_term,
                "power_saving": rep.power_saving,
                "delta": delta,
            })
        })
        .collect();
    let summary = serde_json::json!({
        "cubic": cubic_summary,
        "constants_c7": constants,
        "power_savings": savings,
    });
    let mut f = fs::File::create(args.out.join("summary.json"))?;
    writeln!(
        f,
        "{}",
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Cache(e.to_string()))?
    )?;
    println!("report written to {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}
