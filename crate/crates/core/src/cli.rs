//! Batch command-line front end.
//!
//! Every subcommand writes one artifact (JSON or CSV) to `--output` or stdout and
//! returns an exit code: 0 pass, 1 usage, 2 capacity, 3 missing input, 4 check failure.

use crate::bethe::{self, FixtureTable, BetheRootSet};
use crate::error::{Error, Result};
use crate::operators::{self, build_hamiltonian, SectorBasis};
use crate::rate::Rates;
use crate::scaling::{self, GapMethod};
use crate::sectors::{self, Sector};
use crate::spectra::{self, GenuineMethod, Spectrum, SpectrumTable, Tolerance};
use crate::C64;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_MISSING: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "masep", version, about = "Multi-species ASEP on a ring: spectra, sector checks and Bethe ansatz")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Largest dense dimension; also read from MASEP_CAPACITY.
    #[arg(long, global = true)]
    capacity: Option<usize>,
    /// Acknowledge a capacity above the default.
    #[arg(long, global = true)]
    allow_large: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_abs: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rel: f64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads across sectors or sizes.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct RateArgs {
    #[arg(long, default_value = "2/3")]
    p: String,
    #[arg(long, default_value = "1/3")]
    q: String,
}

#[derive(Args, Debug, Clone)]
struct SectorArgs {
    /// Ring length; checked against the sector.
    #[arg(long = "L")]
    l: Option<usize>,
    /// Multiplicities `2,1,3,1` or subset form `s:2,3,6`.
    #[arg(long)]
    sector: String,
    #[command(flatten)]
    rates: RateArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum of one sector.
    Spectrum {
        #[command(flatten)]
        at: SectorArgs,
        /// Only the eigenvalues born in this sector.
        #[arg(long)]
        genuine: bool,
        /// Append the next-leading pairs E±_j.
        #[arg(long)]
        next_leading: bool,
        /// Also export the Markov matrix (exact entries) as JSON.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Genuine spectrum, by the kernel and the Möbius routes.
    Genuine {
        #[command(flatten)]
        at: SectorArgs,
    },
    /// Spectral duality between complementary sectors.
    Duality {
        #[arg(long = "L")]
        l: usize,
        /// One sector; all basic sectors when omitted.
        #[arg(long)]
        sector: Option<String>,
        #[command(flatten)]
        rates: RateArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long = "L")]
        l: Option<usize>,
        #[command(flatten)]
        rates: RateArgs,
        /// Fixture file for the Bethe suite; the bundled table when omitted.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Random points for the sampled suites.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Relaxation-gap scan over doubling ring sizes and exponent fit.
    Scan {
        #[arg(long = "Lmin")]
        lmin: usize,
        #[arg(long = "Lmax")]
        lmax: usize,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value = "0.8")]
        p: String,
        #[arg(long, default_value = "0.2")]
        q: String,
        #[arg(long, default_value = "bethe")]
        method: GapMethod,
        /// Where to write the fit report when the samples go out as CSV.
        #[arg(long)]
        fit_out: Option<PathBuf>,
    },
    /// Bethe ansatz tools.
    Bethe {
        #[command(subcommand)]
        command: BetheCommand,
    },
    /// Hasse diagram of the basic sectors.
    Hasse {
        #[arg(long = "L")]
        l: usize,
    },
    /// Stationary distribution of one sector.
    Stationary {
        #[command(flatten)]
        at: SectorArgs,
    },
}

#[derive(Subcommand, Debug)]
enum BetheCommand {
    /// Check a root-set file, or the fixture table.
    Verify {
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// A single root set as JSON.
        #[arg(long)]
        roots: Option<PathBuf>,
        #[arg(long, default_value_t = bethe::ROOT_TOLERANCE)]
        tol: f64,
    },
    /// Solve the one-species equations for given quantum numbers.
    Solve1 {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0.8")]
        p: String,
        #[arg(long, default_value = "0.2")]
        q: String,
        /// Comma-separated quantum numbers; the second-largest state when omitted.
        #[arg(long, allow_hyphen_values = true)]
        qn: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Duality,
    Inclusion,
    GapConjecture,
    Ybe,
    BetheFixtures,
    Stationary,
    Structural,
}

/// Output of one command: the artifact and whether its checks passed.
struct Outcome {
    json: Value,
    csv: String,
    passed: bool,
}

impl Outcome {
    fn ok(json: Value, csv: String) -> Self {
        Self { json, csv, passed: true }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::MissingInput(_) => EXIT_MISSING,
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => EXIT_MISSING,
        _ => EXIT_CHECK,
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("masep: check failed");
            EXIT_CHECK
        }
        Err(e) => {
            eprintln!("masep: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    if let Some(c) = g.capacity {
        if c > crate::DEFAULT_CAPACITY && !g.allow_large {
            return Err(Error::InvalidArgument(format!(
                "--capacity {c} exceeds the default {}; pass --allow-large to acknowledge the memory cost",
                crate::DEFAULT_CAPACITY
            )));
        }
        crate::set_capacity(c);
    }
    let outcome = match &cli.command {
        Command::Spectrum { at, genuine, next_leading, matrix_out } => cmd_spectrum(g, at, *genuine, *next_leading, matrix_out.as_deref())?,
        Command::Genuine { at } => cmd_genuine(g, at)?,
        Command::Duality { l, sector, rates } => cmd_duality(g, *l, sector.as_deref(), rates)?,
        Command::Verify { suite, l, rates, fixtures, samples } => cmd_verify(g, *suite, *l, rates, fixtures.as_deref(), *samples)?,
        Command::Scan { lmin, lmax, rho, p, q, method, fit_out } => cmd_scan(g, *lmin, *lmax, *rho, p, q, *method, fit_out.as_deref())?,
        Command::Bethe { command: BetheCommand::Verify { fixtures, roots, tol } } => cmd_bethe_verify(fixtures.as_deref(), roots.as_deref(), *tol)?,
        Command::Bethe { command: BetheCommand::Solve1 { l, n, p, q, qn } } => cmd_solve1(*l, *n, p, q, qn.as_deref())?,
        Command::Hasse { l } => cmd_hasse(*l)?,
        Command::Stationary { at } => cmd_stationary(at)?,
    };
    emit(g, &outcome)?;
    Ok(outcome.passed)
}

fn emit(g: &Global, o: &Outcome) -> Result<()> {
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&o.json)? + "\n",
        Format::Csv => o.csv.clone(),
    };
    write_out(g.output.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush().map_err(Error::from)
        }
    }
}

fn tolerance(g: &Global) -> Tolerance {
    Tolerance::new(g.tol_abs, g.tol_rel)
}

fn parse_rates(r: &RateArgs) -> Result<Rates> {
    Rates::parse(&r.p, &r.q)
}

fn parse_sector(at: &SectorArgs) -> Result<(Sector, Rates)> {
    Ok((Sector::parse(&at.sector, at.l)?, parse_rates(&at.rates)?))
}

fn with_tol(mut s: Spectrum, tol: Tolerance) -> Spectrum {
    s.tol = tol;
    s
}

/// Ordered parallel map over `items` with at most `workers` threads.
fn par_map<T: Sync, U: Send>(items: &[T], workers: Option<usize>, f: impl Fn(&T) -> Result<U> + Sync) -> Result<Vec<U>> {
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |v| v.get())).clamp(1, items.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<U>>>> = items.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|sc| {
        for _ in 0..n {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                *slots[i].lock().expect("slot") = Some(f(&items[i]));
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot").expect("every item ran")).collect()
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_spectrum(g: &Global, at: &SectorArgs, genuine: bool, next_leading: bool, matrix_out: Option<&Path>) -> Result<Outcome> {
    let (s, rates) = parse_sector(at)?;
    let table = SpectrumTable::new(&rates);
    let spec = if genuine {
        spectra::genuine_spectrum_with(&s, &table, GenuineMethod::Kernel)?
    } else {
        (*table.get(&s)?).clone()
    };
    let spec = with_tol(spec, tolerance(g));
    if let Some(path) = matrix_out {
        let basis = SectorBasis::with_limit(&s, crate::capacity())?;
        let h = build_hamiltonian::<BigRational>(&basis, &rates).with_sectors(Some(s.clone()), Some(s.clone()));
        let labels = basis.labels();
        let env = h.envelope(&rates.p, &rates.q, &labels, &labels);
        std::fs::write(path, serde_json::to_string_pretty(&env)? + "\n")?;
    }
    let mut json = spec.to_json();
    json["genuine"] = json!(genuine);
    json["count"] = json!(spec.len());
    let mut csv = spec.to_csv();
    if next_leading {
        let nl = spectra::next_leading_with(&s, &table)?;
        json["next_leading"] = json!(nl.iter().map(|e| json!({"plus": pair(e.plus), "minus": pair(e.minus)})).collect::<Vec<_>>());
        csv.push_str("\nj,plus_re,plus_im,minus_re,minus_im\n");
        for (j, e) in nl.iter().enumerate() {
            csv.push_str(&format!("{},{},{},{},{}\n", j + 1, e.plus.re, e.plus.im, e.minus.re, e.minus.im));
        }
    }
    Ok(Outcome::ok(json, csv))
}

fn cmd_genuine(g: &Global, at: &SectorArgs) -> Result<Outcome> {
    let (s, rates) = parse_sector(at)?;
    let table = SpectrumTable::new(&rates);
    let kernel = with_tol(spectra::genuine_spectrum_with(&s, &table, GenuineMethod::Kernel)?, tolerance(g));
    let mobius = spectra::genuine_spectrum_with(&s, &table, GenuineMethod::Mobius)?;
    let agree = kernel.equals(&mobius);
    let dim = s.genuine_dimension();
    let count_ok = dim == (kernel.len() as i64).into();
    let mut json = kernel.to_json();
    json["genuine_dimension"] = json!(dim.to_string());
    json["methods_agree"] = json!(agree.contained);
    json["worst_distance"] = json!(agree.worst);
    Ok(Outcome { json, csv: kernel.to_csv(), passed: agree.contained && count_ok })
}

fn cmd_duality(g: &Global, l: usize, sector: Option<&str>, r: &RateArgs) -> Result<Outcome> {
    let rates = parse_rates(r)?;
    let list = match sector {
        Some(t) => vec![Sector::parse(t, l)?],
        None => sectors::enumerate_basic_sectors(l)?,
    };
    let table = SpectrumTable::new(&rates);
    let reports = par_map(&list, g.workers, |s| spectra::check_spectral_duality_with(s, &table))?;
    let passed = reports.iter().all(|r| r.passed);
    let mut csv = String::from("sector,complement,passed,worst,omega_rank,omega_expected_rank\n");
    for r in &reports {
        csv.push_str(&format!("{},{},{},{},{},{}\n", r.sector, r.complement, r.passed, r.spectral.worst, r.omega_rank, r.omega_expected_rank));
    }
    let json = json!({"L": l, "p": rates.p.to_string(), "q": rates.q.to_string(), "passed": passed, "reports": reports});
    Ok(Outcome { json, csv, passed })
}

#[derive(Serialize)]
struct Assertion {
    name: String,
    passed: bool,
    residual: f64,
}

impl Assertion {
    fn new(name: impl Into<String>, passed: bool, residual: f64) -> Self {
        Self { name: name.into(), passed, residual }
    }
}

fn suite_outcome(suite: Suite, l: usize, rates: Option<&Rates>, list: Vec<Assertion>) -> Outcome {
    let passed = list.iter().all(|a| a.passed);
    let mut csv = String::from("assertion,passed,residual\n");
    for a in &list {
        csv.push_str(&format!("\"{}\",{},{:e}\n", a.name.replace('"', "'"), a.passed, a.residual));
    }
    let json = json!({
        "suite": format!("{suite:?}"),
        "L": l,
        "p": rates.map(|r| r.p.to_string()),
        "q": rates.map(|r| r.q.to_string()),
        "passed": passed,
        "assertions": list,
    });
    Outcome { json, csv, passed }
}

/// Resolve a fixture path; a bare name also falls back to the bundled fixtures directory.
fn resolve_fixture(path: &Path) -> Result<FixtureTable> {
    if !path.exists() {
        let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(path);
        if path.components().count() == 1 && bundled.exists() {
            return FixtureTable::load(&bundled);
        }
        return Err(Error::MissingInput(format!("fixture file {} not found", path.display())));
    }
    FixtureTable::load(path)
}

fn cmd_verify(g: &Global, suite: Suite, l: Option<usize>, r: &RateArgs, fixtures: Option<&Path>, samples: usize) -> Result<Outcome> {
    let tol = tolerance(g);
    if suite == Suite::BetheFixtures {
        let table = match fixtures {
            Some(p) => resolve_fixture(p)?,
            None => FixtureTable::bundled(),
        };
        return Ok(suite_outcome(suite, table.l, Some(&table.rates), fixture_assertions(&table, bethe::ROOT_TOLERANCE)?));
    }
    let rates = parse_rates(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let l = l.unwrap_or(4);
    if l == 0 {
        return Err(Error::InvalidArgument("L must be positive".into()));
    }
    let all = sectors::enumerate_basic_sectors(l)?;
    let table = SpectrumTable::new(&rates);
    let mut list = Vec::new();
    match suite {
        Suite::Duality => {
            for d in par_map(&all, g.workers, |s| spectra::check_spectral_duality_with(s, &table))? {
                list.push(Assertion::new(format!("duality {} / {}", d.sector, d.complement), d.passed, d.spectral.worst));
            }
        }
        Suite::Inclusion => {
            let mut pairs = Vec::new();
            for t in &all {
                for s in &all {
                    if s != t && s.is_subset_of(t) {
                        pairs.push((s.clone(), t.clone()));
                    }
                }
            }
            for ((s, t), c) in pairs.iter().zip(par_map(&pairs, g.workers, |(s, t)| {
                Ok(spectra::multiset_contains(table.get(t)?.values(), table.get(s)?.values(), tol))
            })?) {
                list.push(Assertion::new(format!("Spec{s} in Spec{t}"), c.contained, c.worst));
            }
        }
        Suite::GapConjecture => {
            let small: Vec<Sector> = all.iter().filter(|s| s.dimension_usize().is_some_and(|d| d < 5000)).cloned().collect();
            for rep in par_map(&small, g.workers, |s| spectra::check_gap_conjecture_with(s, &table))? {
                let excess = rep.violation.map_or(0.0, |(re, _)| re - rep.threshold);
                list.push(Assertion::new(format!("gap {}", rep.sector), rep.holds && rep.next_leading_embedded, excess));
            }
        }
        Suite::Ybe => list.extend(ybe_assertions(l.max(2), &rates, samples, &mut rng)),
        Suite::Stationary => list.extend(stationary_assertions(&all, &rates, g.workers)?),
        Suite::Structural => {
            for rep in par_map(&all, g.workers, |s| operators::check_structural_identities(s, &rates))? {
                for id in rep.identities {
                    list.push(Assertion::new(format!("{}: {}", rep.sector, id.name), id.holds, if id.holds { 0.0 } else { 1.0 }));
                }
            }
            list.extend(ybe_assertions(l.max(2), &rates, samples, &mut rng));
        }
        Suite::BetheFixtures => unreachable!(),
    }
    Ok(suite_outcome(suite, l, Some(&rates), list))
}

fn fixture_assertions(table: &FixtureTable, tol: f64) -> Result<Vec<Assertion>> {
    let mut list = Vec::new();
    for c in bethe::verify_table(table, tol)? {
        let worst = c.residuals.max_backward_error.max(c.polynomial_error).max(c.energy_error);
        list.push(Assertion::new(format!("{} row {} set {}", c.sector, c.row, c.set), c.passed, worst));
    }
    for s in table.sectors() {
        let roots: Vec<BetheRootSet> = table.sector_rows(&s).flat_map(|r| r.root_sets.iter().cloned()).collect();
        let rep = bethe::verify_completeness(&s, &table.rates, &roots)?;
        list.push(Assertion::new(format!("{} regular sets match genuine spectrum", rep.sector), rep.count_matches && rep.spectrum_matches, 0.0));
    }
    Ok(list)
}

fn ybe_assertions(n: usize, rates: &Rates, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Assertion> {
    let (p, q) = (rates.p(), rates.q());
    let mut list = Vec::new();
    for k in 0..samples {
        let l1 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let l2 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let res = operators::ybe_residual(&l1, &l2, &C64::from(p), &C64::from(q), n);
        list.push(Assertion::new(format!("YBE sample {k}, N = {n}"), res < 1e-12, res));
    }
    let (l1, l2) = (BigRational::new(2.into(), 7.into()), BigRational::new((-3).into(), 5.into()));
    let res = operators::ybe_residual(&l1, &l2, rates.p.exact(), rates.q.exact(), n);
    list.push(Assertion::new(format!("YBE exact, N = {n}"), res == 0.0, res));
    list
}

fn stationary_assertions(all: &[Sector], rates: &Rates, workers: Option<usize>) -> Result<Vec<Assertion>> {
    let (p, q) = (rates.p(), rates.q());
    let checks = par_map(all, workers, |s| -> Result<Vec<Assertion>> {
        let mut out = Vec::new();
        let v = spectra::stationary_vector(s, rates)?;
        if s.species() == 1 || rates.is_symmetric() {
            let u = 1.0 / v.len() as f64;
            let dev = v.iter().map(|x| (x - u).abs()).fold(0.0, f64::max);
            out.push(Assertion::new(format!("{s} stationary vector uniform"), dev < 1e-10, dev));
        }
        let mut counts = s.parts().to_vec();
        counts.resize(s.l(), 0);
        let predicted = bethe::stationary_eigen_polynomial(s.l(), p, q, &counts)?;
        let polys = bethe::extract_eigen_polynomials(s, rates)?;
        let dev = polys
            .iter()
            .filter(|e| e.energy().norm() < 1e-8)
            .map(|e| e.max_abs_diff(&predicted))
            .fold(f64::INFINITY, f64::min);
        out.push(Assertion::new(format!("{s} stationary eigen-polynomial"), dev < 1e-9, dev));
        Ok(out)
    })?;
    Ok(checks.into_iter().flatten().collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(g: &Global, lmin: usize, lmax: usize, rho: f64, p: &str, q: &str, method: GapMethod, fit_out: Option<&Path>) -> Result<Outcome> {
    let rates = Rates::parse(p, q)?;
    if lmin == 0 || lmin > lmax {
        return Err(Error::InvalidArgument(format!("empty size range {lmin}..{lmax}")));
    }
    let mut ls = Vec::new();
    let mut l = lmin;
    while l <= lmax {
        match scaling::particles(l, rho) {
            Some(n) if n > 0 && n < l => ls.push(l),
            _ => eprintln!("masep: warning: density {rho} not representable at L = {l}; skipped"),
        }
        l *= 2;
    }
    if ls.is_empty() {
        return Err(Error::InvalidArgument(format!("no size in {lmin}..{lmax} admits density {rho}")));
    }
    let samples = scaling::gap_scan(&ls, rho, rates.p(), rates.q(), method)?;
    let fit = scaling::fit_exponent(&samples);
    let fit_json = match &fit {
        Ok(f) => serde_json::to_value(f)?,
        Err(e) => json!({"error": e.to_string()}),
    };
    if g.format == Format::Csv {
        if let Some(path) = fit_out {
            std::fs::write(path, serde_json::to_string_pretty(&fit_json)? + "\n")?;
        }
    }
    let json = json!({"rho": rho, "p": rates.p.to_string(), "q": rates.q.to_string(), "method": method.to_string(), "samples": samples, "fit": fit_json});
    Ok(Outcome::ok(json, scaling::samples_to_csv(&samples)))
}

fn cmd_bethe_verify(fixtures: Option<&Path>, roots: Option<&Path>, tol: f64) -> Result<Outcome> {
    if let Some(path) = roots {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        let rs: BetheRootSet = serde_json::from_str(&text)?;
        let report = bethe::bethe_residuals(&rs)?;
        let energy = bethe::energy_from_roots(&rs)?;
        let poly = bethe::eigen_polynomial_from_roots(&rs)?;
        let passed = report.passes(tol);
        let mut csv = String::from("level,index,backward_error,joint\n");
        for e in &report.equations {
            csv.push_str(&format!("{},{},{:e},{}\n", e.level, e.index, e.backward_error, e.joint));
        }
        let json = json!({
            "passed": passed,
            "regular": report.regular,
            "energy": pair(energy),
            "polynomial": poly.coefficients.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "residuals": report,
        });
        return Ok(Outcome { json, csv, passed });
    }
    let table = match fixtures {
        Some(p) => resolve_fixture(p)?,
        None => FixtureTable::bundled(),
    };
    Ok(suite_outcome(Suite::BetheFixtures, table.l, Some(&table.rates), fixture_assertions(&table, tol)?))
}

fn cmd_solve1(l: usize, n: usize, p: &str, q: &str, qn: Option<&str>) -> Result<Outcome> {
    let rates = Rates::parse(p, q)?;
    let qn: Vec<f64> = match qn {
        Some(t) => t
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad quantum number '{x}'"))))
            .collect::<Result<_>>()?,
        None => bethe::second_largest_quantum_numbers(n),
    };
    let sol = bethe::solve_one_species(l, n, rates.p(), rates.q(), &qn, None)?;
    let mut csv = String::from("j,quantum_number,x_re,x_im\n");
    for (j, (i, x)) in sol.quantum_numbers.iter().zip(&sol.x).enumerate() {
        csv.push_str(&format!("{j},{i},{},{}\n", x.re, x.im));
    }
    Ok(Outcome::ok(serde_json::to_value(&sol)?, csv))
}

fn cmd_hasse(l: usize) -> Result<Outcome> {
    let nodes: Vec<Value> = sectors::enumerate_basic_sectors(l)?
        .iter()
        .map(|s| json!({"sector": s.text(), "subset": s.subset(), "dimension": s.dimension().to_string(), "genuine_dimension": s.genuine_dimension().to_string()}))
        .collect();
    let edges = sectors::hasse_cover_edges(l)?;
    let mut csv = String::from("lower,upper\n");
    for e in &edges {
        csv.push_str(&format!("\"{}\",\"{}\"\n", e.lower.text(), e.upper.text()));
    }
    let edges: Vec<Value> = edges.iter().map(|e| json!({"lower": e.lower.text(), "upper": e.upper.text()})).collect();
    Ok(Outcome::ok(json!({"L": l, "sectors": nodes, "edges": edges}), csv))
}

fn cmd_stationary(at: &SectorArgs) -> Result<Outcome> {
    let (s, rates) = parse_sector(at)?;
    let basis = SectorBasis::with_limit(&s, crate::capacity())?;
    let v = spectra::stationary_vector(&s, &rates)?;
    let labels = basis.labels();
    let mut csv = String::from("state,probability\n");
    for (k, x) in labels.iter().zip(&v) {
        csv.push_str(&format!("{k},{x}\n"));
    }
    let json = json!({"sector": s.text(), "p": rates.p.to_string(), "q": rates.q.to_string(), "basis": labels, "probabilities": v});
    Ok(Outcome::ok(json, csv))
}
