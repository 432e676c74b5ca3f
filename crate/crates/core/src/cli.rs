//! Command-line front end.
//!
//! Exit codes: 0 success or pass, 1 usage or parse error, 2 search budget
//! exceeded, 3 negative verdict (failed check, ambiguous or inconsistent
//! reconstruction, unverified instance).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsums;
use crate::field::{ceil_div, odd_primes_in, Poly, PrimeField};
use crate::reconstruct;
use crate::schemes::{
    leak_transcript, trivial_repair_bits, DecodingScheme, LeakageScheme, RepairScheme, Scheme,
    Transcript,
};
use crate::verify::{
    check_window_condition, GammaRule, SearchConfig, Strategy, Verdict, WindowProblem,
};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

/// Attacks run the verifier first by default below this modulus.
pub const CHECK_BY_DEFAULT_BELOW: u64 = 10_000;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SearchBudgetExceeded { .. } => EXIT_BUDGET,
        Error::InconsistentTranscript
        | Error::AmbiguousRepair
        | Error::AmbiguousDecoding
        | Error::UnverifiedInstance
        | Error::NoInjectiveFamilyFound { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rsrepair", version, about = "Low-bandwidth Reed-Solomon repair and decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Leakage attack on 3-out-of-n Shamir sharing
    Attack(AttackArgs),
    /// Check repair or decoding conditions
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Recover the polynomial from a transcript file
    Decode { file: PathBuf },
    /// Recover the target symbol from a transcript file
    Repair { file: PathBuf },
    /// Produce a transcript for a polynomial
    #[command(subcommand)]
    Leak(LeakCommand),
    /// Exponential sums
    #[command(subcommand)]
    Sums(SumsCommand),
    /// Time the main searches
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct AttackArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    secret: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Node holding the secret
    #[arg(long, default_value_t = 0)]
    ell: u64,
    /// Verify the instance before attacking (default: on below p = 10^4)
    #[arg(long)]
    check: Option<bool>,
    /// Write the leaked transcript to this file
    #[arg(long)]
    emit_transcript: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RepairGamma {
    /// gamma_i = i - ell
    Shift,
    /// gamma_i = (i - ell)^-1
    Inverse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecodeGamma {
    /// gamma_i = prod_j (i - l_j)^-1
    Weil,
    /// gamma_i = i^-1
    Inverse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Window,
    Exhaustive,
    Lattice,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Window => Strategy::Window,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Lattice => Strategy::Lattice,
        }
    }
}

/// Code length: a number or `sqrt` for `floor(sqrt p)`.
#[derive(Debug, Clone, Copy)]
enum LengthSpec {
    Fixed(u64),
    Sqrt,
}

impl FromStr for LengthSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "sqrt" {
            return Ok(LengthSpec::Sqrt);
        }
        s.parse().map(LengthSpec::Fixed).map_err(|_| format!("expected an integer or 'sqrt', got {s:?}"))
    }
}

impl LengthSpec {
    fn resolve(self, p: u64) -> u64 {
        match self {
            LengthSpec::Fixed(n) => n,
            LengthSpec::Sqrt => (p as f64).sqrt().floor() as u64,
        }
    }
}

/// Inclusive prime range `LO..HI`.
#[derive(Debug, Clone, Copy)]
struct PrimeRange(u64, u64);

impl FromStr for PrimeRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
        let lo = lo.trim().parse().map_err(|_| format!("bad lower end {lo:?}"))?;
        let hi = hi.trim().parse().map_err(|_| format!("bad upper end {hi:?}"))?;
        Ok(PrimeRange(lo, hi))
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    /// Append JSON-lines reports to this file as well as stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig> {
        let mut cfg = SearchConfig::from_env()?.with_strategy(self.strategy.into());
        if let Some(b) = self.budget {
            cfg = cfg.with_budget(b);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Repair condition on the points 0..=n
    Repair {
        #[arg(long, conflicts_with = "p_range")]
        p: Option<u64>,
        /// Sweep all odd primes in LO..HI
        #[arg(long)]
        p_range: Option<PrimeRange>,
        /// Largest evaluation point, or `sqrt`; full length when omitted
        #[arg(long)]
        n: Option<LengthSpec>,
        #[arg(long, default_value_t = 0)]
        ell: u64,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Window half-width (default ceil(p/8))
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, value_enum, default_value = "shift")]
        gamma: RepairGamma,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decoding condition on all of F_p minus the missing set
    Decode {
        #[arg(long)]
        p: u64,
        /// Bits per node; sets t = ceil(p/2^B)
        #[arg(long = "B")]
        bits: Option<u32>,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        missing: Vec<u64>,
        /// Window half-width (overrides B)
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, value_enum, default_value = "weil")]
        gamma: DecodeGamma,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Args)]
struct PolyArgs {
    /// Coefficients, constant term first
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "random")]
    poly: Vec<i64>,
    /// Use a random polynomial of degree < k
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum LeakCommand {
    Kloosterman {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        ell: u64,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        poly: PolyArgs,
    },
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long = "B")]
        bits: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        missing: Vec<u64>,
        #[command(flatten)]
        poly: PolyArgs,
    },
}

#[derive(Debug, Subcommand)]
enum SumsCommand {
    /// sum over F_p of e_p(f(x))
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        poly: Vec<i64>,
    },
    /// sum_{nu=1}^{N} e_p(a/nu + b nu)
    Kloosterman {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 0)]
        b: u64,
        #[arg(long = "N")]
        len: Option<u64>,
    },
    /// Korolev's bound next to the largest short sum
    Korolev {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        /// Skip the brute-force maximum over a
        #[arg(long)]
        no_brute: bool,
    },
    /// e_p(x)
    Char {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: i64,
    },
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 101)]
    p: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Attack(a) => cmd_attack(&a, out, err),
        Command::Verify(v) => cmd_verify(v, out),
        Command::Decode { file } => cmd_decode(&file, out),
        Command::Repair { file } => cmd_repair(&file, out),
        Command::Leak(l) => cmd_leak(l, out),
        Command::Sums(s) => cmd_sums(s, out),
        Command::Bench(b) => cmd_bench(&b, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{v}").map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("i/o: {e}"))
}

fn coeffs(f: &Poly, k: usize) -> Vec<u64> {
    f.padded(k.max(f.trimmed().len()))
}

fn verdict_json(v: &Verdict, k: usize) -> Value {
    json!({
        "passed": v.passed,
        "counterexample": v.counterexample.as_ref().map(|f| coeffs(f, k)),
        "partner": v.partner.as_ref().map(|f| coeffs(f, k)),
        "work": v.work,
        "method": v.method,
    })
}

fn random_poly(field: PrimeField, k: usize, rng: &mut ChaCha8Rng) -> Poly {
    let p = field.modulus();
    Poly::new(field, (0..k).map(|_| rng.gen_range(0..p)).collect())
}

/// The attack's outcome, also printed as JSON.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AttackReport {
    pub p: u64,
    pub n: u64,
    pub ell: u64,
    pub seed: u64,
    pub secret: u64,
    pub recovered: u64,
    pub success: bool,
    pub bits_per_party: u32,
    pub total_bits: u64,
    pub trivial_bits: u64,
    pub candidates: u64,
    pub checked: bool,
    pub in_theorem_range: bool,
    pub version: &'static str,
}

/// Deals `secret` with a random quadratic, leaks three bits per party and
/// recovers the secret from the leakage alone.
pub fn attack(
    p: u64,
    n: u64,
    ell: u64,
    secret: u64,
    seed: u64,
    check: bool,
    cfg: &SearchConfig,
) -> Result<(AttackReport, Transcript)> {
    let scheme = RepairScheme::kloosterman(p, n, ell)?;
    let field = scheme.field();
    if secret >= p {
        return Err(Error::Parse(format!("secret {secret} is not a residue mod {p}")));
    }
    if check {
        let v = check_window_condition(&WindowProblem::for_repair_scheme(&scheme), cfg)?;
        if !v.passed {
            return Err(Error::UnverifiedInstance);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c1 = rng.gen_range(0..p);
    let c2 = rng.gen_range(0..p);
    // f(ell) = secret
    let c0 = field.sub(secret, field.add(field.mul(c1, ell), field.mul(c2, field.mul(ell, ell))));
    let f = Poly::new(field, vec![c0, c1, c2]);
    let transcript = leak_transcript(&scheme, &f)?;
    let outcome = reconstruct::repair_detailed(&scheme, &transcript)?;
    let recovered = outcome.value.value();
    Ok((
        AttackReport {
            p,
            n,
            ell,
            seed,
            secret,
            recovered,
            success: recovered == secret,
            bits_per_party: scheme.bits_per_node(),
            total_bits: scheme.bandwidth(),
            trivial_bits: trivial_repair_bits(field, scheme.dimension()),
            candidates: outcome.candidates,
            checked: check,
            in_theorem_range: scheme.in_theorem_range(),
            version: VERSION,
        },
        transcript,
    ))
}

fn cmd_attack(a: &AttackArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let check = a.check.unwrap_or(a.p < CHECK_BY_DEFAULT_BELOW);
    if !check {
        let _ = writeln!(err, "warning: attacking without verifying the instance");
    }
    let mut cfg = SearchConfig::from_env()?;
    if let Some(b) = a.budget {
        cfg = cfg.with_budget(b);
    }
    let (report, transcript) = attack(a.p, a.n, a.ell, a.secret, a.seed, check, &cfg)?;
    if let Some(path) = &a.emit_transcript {
        write_json_file(path, &transcript)?;
    }
    emit(out, &serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?)?;
    Ok(if report.success { EXIT_OK } else { EXIT_NEGATIVE })
}

fn write_json_file<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(io_err)
}

struct Reporter {
    file: Option<fs::File>,
}

impl Reporter {
    fn new(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => Some(fs::File::create(p).map_err(io_err)?),
            None => None,
        };
        Ok(Reporter { file })
    }

    fn line(&mut self, out: &mut dyn Write, v: &Value) -> Result<()> {
        emit(out, v)?;
        if let Some(f) = &mut self.file {
            writeln!(f, "{v}").map_err(io_err)?;
        }
        Ok(())
    }
}

/// Runs one check and folds the result into a report line and exit code.
fn run_check(problem: &WindowProblem, cfg: &SearchConfig, mut line: Value) -> (Value, i32) {
    let start = Instant::now();
    let result = check_window_condition(problem, cfg);
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let obj = line.as_object_mut().expect("object");
    obj.insert("wall_ms".into(), json!(wall));
    obj.insert("version".into(), json!(VERSION));
    obj.insert("seed".into(), Value::Null);
    match result {
        Ok(v) => {
            if let Value::Object(m) = verdict_json(&v, problem.k) {
                obj.extend(m);
            }
            (line, if v.passed { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Err(e) => {
            obj.insert("passed".into(), Value::Null);
            obj.insert("error".into(), json!(e.to_string()));
            (line, exit_code(&e))
        }
    }
}

fn worst(a: i32, b: i32) -> i32 {
    // budget and usage errors outrank negative verdicts
    let rank = |c: i32| match c {
        EXIT_OK => 0,
        EXIT_NEGATIVE => 1,
        EXIT_BUDGET => 2,
        _ => 3,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn cmd_verify(cmd: VerifyCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        VerifyCommand::Repair {
            p,
            p_range,
            n,
            ell,
            k,
            t,
            gamma,
            search,
        } => {
            let cfg = search.config()?;
            let primes = match (p, p_range) {
                (Some(p), None) => vec![p],
                (None, Some(PrimeRange(lo, hi))) => odd_primes_in(lo, hi),
                _ => return Err(Error::Parse("give either --p or --p-range".into())),
            };
            let mut reporter = Reporter::new(search.out.as_deref())?;
            let mut code = EXIT_OK;
            for p in primes {
                let field = PrimeField::new(p)?;
                let n = n.map(|s| s.resolve(p)).unwrap_or(p - 1);
                if n >= p {
                    return Err(Error::BadLength { len: n + 1, p });
                }
                if ell > n {
                    return Err(Error::BadIndex { ell, n });
                }
                let t = t.unwrap_or(ceil_div(p, 8));
                let points: Vec<u64> = (0..=n).collect();
                let rule = match gamma {
                    RepairGamma::Shift => GammaRule::Shift,
                    RepairGamma::Inverse => GammaRule::Inverse,
                };
                let problem = WindowProblem::repair_with_rule(field, &points, ell as usize, rule, k, t)?;
                let line = json!({
                    "kind": "repair", "p": p, "n": n, "ell": ell, "k": k, "t": t,
                    "gamma": rule,
                });
                let (line, c) = run_check(&problem, &cfg, line);
                reporter.line(out, &line)?;
                code = worst(code, c);
            }
            Ok(code)
        }
        VerifyCommand::Decode {
            p,
            bits,
            k,
            missing,
            t,
            gamma,
            search,
        } => {
            let cfg = search.config()?;
            let field = PrimeField::new(p)?;
            let t = match (t, bits) {
                (Some(t), _) => t,
                (None, Some(b)) if b < 3 => return Err(Error::BadBitBudget(b)),
                (None, Some(b)) if b >= 64 => 1,
                (None, Some(b)) => ceil_div(p, 1u64 << b),
                (None, None) => return Err(Error::Parse("give --B or --t".into())),
            };
            let problem = match gamma {
                DecodeGamma::Weil => {
                    WindowProblem::for_decoding_scheme(&DecodingScheme::with_width(field, k, &missing, t)?)
                }
                DecodeGamma::Inverse => {
                    let constraints = field
                        .residues()
                        .filter(|i| !missing.contains(i))
                        .map(|i| Ok((i, field.inv(i)?)))
                        .collect::<Result<Vec<_>>>()?;
                    WindowProblem::decoding(field, k, constraints, t)?
                }
            };
            let mut reporter = Reporter::new(search.out.as_deref())?;
            let line = json!({
                "kind": "decode", "p": p, "B": bits, "k": k, "t": t, "missing": missing,
                "gamma": match gamma { DecodeGamma::Weil => "weil", DecodeGamma::Inverse => "inverse" },
            });
            let (line, code) = run_check(&problem, &cfg, line);
            reporter.line(out, &line)?;
            Ok(code)
        }
    }
}

fn read_transcript(path: &Path) -> Result<Transcript> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn cmd_decode(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let transcript = read_transcript(path)?;
    let scheme = Scheme::from_descriptor(&transcript.scheme)?;
    let set = reconstruct::enumerate_consistent_limited(&scheme, &transcript, 2)?;
    let f = match set.candidates.len() {
        0 => return Err(Error::InconsistentTranscript),
        1 => &set.candidates[0],
        _ => return Err(Error::AmbiguousDecoding),
    };
    let k = scheme.dimension();
    let codeword: Vec<u64> = scheme.field().residues().map(|x| f.eval(x)).collect();
    let codeword = match &scheme {
        Scheme::Decoding(_) => Some(codeword),
        Scheme::Repair(r) => Some(codeword[..=r.n() as usize].to_vec()),
    };
    emit(
        out,
        &json!({
            "coefficients": coeffs(f, k),
            "codeword": codeword,
            "candidates": set.candidates.len(),
            "interpolations": set.interpolations,
            "version": VERSION,
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_repair(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let transcript = read_transcript(path)?;
    let scheme = match Scheme::from_descriptor(&transcript.scheme)? {
        Scheme::Repair(s) => s,
        Scheme::Decoding(_) => {
            return Err(Error::Parse("repair needs a kloosterman transcript; use decode".into()))
        }
    };
    let outcome = reconstruct::repair_detailed(&scheme, &transcript)?;
    emit(
        out,
        &json!({
            "node": scheme.target(),
            "value": outcome.value.value(),
            "candidates": outcome.candidates,
            "interpolations": outcome.interpolations,
            "version": VERSION,
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_leak(cmd: LeakCommand, out: &mut dyn Write) -> Result<i32> {
    let (scheme, poly): (Box<dyn LeakageScheme>, PolyArgs) = match cmd {
        LeakCommand::Kloosterman { p, n, ell, k, poly } => {
            (Box::new(RepairScheme::kloosterman(p, n, ell)?.with_dimension(k)), poly)
        }
        LeakCommand::Weil {
            p,
            bits,
            k,
            missing,
            poly,
        } => (Box::new(DecodingScheme::weil(p, bits, k, &missing)?), poly),
    };
    let field = scheme.field();
    let f = if poly.random {
        random_poly(field, scheme.dimension(), &mut ChaCha8Rng::seed_from_u64(poly.seed))
    } else {
        Poly::from_i64(field, &poly.poly)
    };
    let transcript = leak_transcript(scheme.as_ref(), &f)?;
    match &poly.out {
        Some(path) => write_json_file(path, &transcript)?,
        None => emit(out, &serde_json::to_value(&transcript).map_err(|e| Error::Parse(e.to_string()))?)?,
    }
    Ok(EXIT_OK)
}

fn sum_json(kind: &str, p: u64, params: Value, s: &expsums::SumResult, bound: Value, vacuous: Value) -> Value {
    json!({
        "kind": kind, "p": p, "params": params,
        "re": s.re, "im": s.im, "magnitude": s.magnitude,
        "bound": bound, "vacuous": vacuous, "version": VERSION,
    })
}

fn cmd_sums(cmd: SumsCommand, out: &mut dyn Write) -> Result<i32> {
    let v = match cmd {
        SumsCommand::Weil { p, poly } => {
            let field = PrimeField::new(p)?;
            let f = Poly::from_i64(field, &poly);
            let r = expsums::weil_sum(&f)?;
            sum_json(
                "weil",
                p,
                json!({ "poly": f.trimmed(), "degree": r.degree, "within": r.within }),
                &r.sum,
                json!(r.bound),
                json!(r.bound >= p as f64),
            )
        }
        SumsCommand::Kloosterman { p, a, b, len } => {
            let field = PrimeField::new(p)?;
            let len = len.unwrap_or(p - 1);
            let r = expsums::kloosterman_sum(field, a, b, len)?;
            sum_json("kloosterman", p, json!({ "a": a, "b": b, "N": len }), &r, Value::Null, Value::Null)
        }
        SumsCommand::Korolev { p, n, no_brute } => {
            let field = PrimeField::new(p)?;
            if n < 2 {
                return Err(Error::RangeTooLong { len: n, max: p - 1 });
            }
            let k = expsums::korolev_bound(p, n);
            let brute = if no_brute {
                None
            } else {
                Some(expsums::max_short_kloosterman(field, n)?)
            };
            let zero = expsums::SumResult {
                re: f64::NAN,
                im: f64::NAN,
                magnitude: brute.map_or(f64::NAN, |b| b.1),
                terms: n,
            };
            let mut v = sum_json(
                "korolev",
                p,
                json!({
                    "n": n, "D": k.d, "bound_twisted": k.bound_twisted,
                    "in_range": k.in_range, "argmax_a": brute.map(|b| b.0),
                }),
                &zero,
                json!(k.bound_plain),
                json!(k.vacuous),
            );
            // only the magnitude of the maximal sum is meaningful here
            v["re"] = Value::Null;
            v["im"] = Value::Null;
            if brute.is_none() {
                v["magnitude"] = Value::Null;
            }
            v
        }
        SumsCommand::Char { p, x } => {
            let field = PrimeField::new(p)?;
            let z = expsums::additive_char(field, field.reduce_i64(x));
            let s = expsums::SumResult {
                re: z.re,
                im: z.im,
                magnitude: z.norm(),
                terms: 1,
            };
            sum_json("char", p, json!({ "x": x }), &s, Value::Null, Value::Null)
        }
    };
    emit(out, &v)?;
    Ok(EXIT_OK)
}

fn cmd_bench(b: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let p = b.p;
    let cfg = SearchConfig::from_env()?;
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);

    let dec = DecodingScheme::weil(p, 3, admissible_k(p)?, &[0, 1])?;
    let start = Instant::now();
    let v = check_window_condition(&WindowProblem::for_decoding_scheme(&dec), &cfg)?;
    emit(
        out,
        &json!({
            "bench": "decode-condition", "p": p, "k": dec.dimension(), "passed": v.passed,
            "work": v.work, "wall_ms": start.elapsed().as_secs_f64() * 1e3, "seed": b.seed,
        }),
    )?;

    let start = Instant::now();
    let mut work = 0u64;
    for _ in 0..b.trials {
        let f = random_poly(dec.field(), dec.dimension(), &mut rng);
        let tr = leak_transcript(&dec, &f)?;
        let set = reconstruct::enumerate_consistent_limited(&dec, &tr, 2)?;
        work += set.interpolations;
    }
    emit(
        out,
        &json!({
            "bench": "decode", "p": p, "trials": b.trials, "interpolations": work,
            "wall_ms": start.elapsed().as_secs_f64() * 1e3, "seed": b.seed,
        }),
    )?;

    let n = ((p as f64).sqrt() as u64).max(3);
    let rep = RepairScheme::kloosterman(p, n, 0)?;
    let start = Instant::now();
    let mut work = 0u64;
    for _ in 0..b.trials {
        let f = random_poly(rep.field(), rep.dimension(), &mut rng);
        let tr = leak_transcript(&rep, &f)?;
        // ambiguous instances still cost a full search
        match reconstruct::repair_detailed(&rep, &tr) {
            Ok(o) => work += o.interpolations,
            Err(Error::AmbiguousRepair) => {}
            Err(e) => return Err(e),
        }
    }
    emit(
        out,
        &json!({
            "bench": "repair", "p": p, "n": n, "trials": b.trials, "interpolations": work,
            "wall_ms": start.elapsed().as_secs_f64() * 1e3, "seed": b.seed, "version": VERSION,
        }),
    )?;
    Ok(EXIT_OK)
}

fn admissible_k(p: u64) -> Result<usize> {
    crate::schemes::admissible_dimension(p, 3, 2)
}
