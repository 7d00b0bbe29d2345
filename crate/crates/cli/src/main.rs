use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use regsets::classify::{auto_classify, classify_standard, enumerate, enumerate_by_lines};
use regsets::codes::{
    code_from_set, code_report, enumerator_divisibility_check, expected_reduction, reduce_mod, weights_from_enumerator,
    CodeFamily,
};
use regsets::constructions::{
    complement, curve_scan_exhaustive, curve_scan_sampled, gamma_a, hermitian_unital, lift, oval_set, power_class,
    touching_union, OvalVariant, TraceNorm,
};
use regsets::galois::{Field, FieldElement};
use regsets::plane::Plane;
use regsets::pointset::PointSet;
use regsets::scan::{conjecture, scan_f, ScanBreadth};
use regsets::verify::{gamma_types, touching_v, verify, Suite, VerifyOptions, DEFAULT_SEED};

/// Regular point sets of pointed type in PG(2,q), trace-norm curves and
/// their projective codes.
#[derive(Parser)]
#[command(name = "regsets", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report (or point set) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a point set and write it in the text (or JSON) format.
    Construct(ConstructArgs),
    /// Classify a point set at ((∞), ℓ∞) or at every tangent frame.
    Classify {
        input: PathBuf,
        /// Try every member with every tangent through it.
        #[arg(long)]
        auto: bool,
    },
    /// Line-intersection enumerator of a point set.
    Spectrum {
        input: PathBuf,
        /// Include the size profile of every parallel class.
        #[arg(long)]
        directions: bool,
        /// Cross-check against a line-by-line count.
        #[arg(long)]
        check: bool,
    },
    /// Projective code of a point set.
    Code {
        input: PathBuf,
        /// Family tag for the congruence checks, e.g. `trace-norm:9`.
        #[arg(long)]
        family: Option<String>,
        /// Also reduce the weight enumerator modulo this.
        #[arg(long)]
        modulus: Option<u64>,
        /// Write the generator matrix here.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Intersection counts of the Hermitian curve with y = a x^√q + m x + d.
    HermitianScan {
        #[arg(long)]
        q: u64,
        /// Sample this many triples instead of scanning all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run a reproduction battery; exit 1 on any mismatch.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Classify Tr(y + f(x)) = N(x) over additive maps f.
    ScanF {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        breadth: Option<Breadth>,
        /// Omit the per-map entries.
        #[arg(long)]
        summary: bool,
    },
    /// Check that y = a x^p + m x + d meets the Hermitian curve in 1 mod p points.
    Conjecture {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Breadth {
    Full,
    Binomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gamma,
    Hermitian,
    Touching,
    Oval,
    Lift,
    Complement,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Field order of the base plane (the plane is PG(2,q^2) for gamma and hermitian).
    #[arg(long)]
    q: Option<u64>,
    /// Element index of a.
    #[arg(long)]
    a: Option<u32>,
    /// Comma-separated element indices of B.
    #[arg(long = "B", value_delimiter = ',')]
    b: Option<Vec<u32>>,
    /// Power for B = {v u^s}, or lifted subspace dimension.
    #[arg(long)]
    s: Option<u32>,
    /// Extension degree of the lift.
    #[arg(long)]
    h: Option<u32>,
    /// Oval variant 1-4.
    #[arg(long)]
    variant: Option<u8>,
    /// Base set for lift and complement.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Exit status 1: a check failed.
struct Mismatch;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Mismatch)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Option<Mismatch>> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Construct(args) => {
            let set = construct(args)?;
            let text = match args.format {
                Format::Text => set.to_text(),
                Format::Json => set.to_json() + "\n",
            };
            emit_text(out, &text)?;
            Ok(None)
        }
        Command::Classify { input, auto } => {
            let x = read_set(input)?;
            let e = enumerate(&x);
            let value = if *auto {
                serde_json::to_value(auto_classify(&x, &e))?
            } else {
                let r = classify_standard(&x, &e)?;
                let mut v = serde_json::to_value(&r)?;
                v["bracket"] = json!(r.bracket());
                v
            };
            emit(out, &value)?;
            Ok(None)
        }
        Command::Spectrum { input, directions, check } => {
            let x = read_set(input)?;
            let e = enumerate(&x);
            let mut v = serde_json::to_value(e.report(*directions))?;
            let identities = e.check_identities();
            v["identities"] = json!(identities.clone().err().unwrap_or_else(|| "ok".into()));
            let mut agree = true;
            if *check {
                agree = enumerate_by_lines(&x) == e.line_counts();
                v["line_scan_agrees"] = json!(agree);
            }
            emit(out, &v)?;
            Ok((identities.is_err() || !agree).then_some(Mismatch))
        }
        Command::Code { input, family, modulus, matrix } => {
            let x = read_set(input)?;
            let e = enumerate(&x);
            let g = code_from_set(&x)?;
            if let Some(path) = matrix {
                fs::write(path, g.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            let report = code_report(&x, &e)?;
            let w = weights_from_enumerator(&x, &e)?;
            let mut v = serde_json::to_value(&report)?;
            v["parameters"] = json!(report.parameters());
            if let Some(m) = modulus {
                let r = reduce_mod(&w, *m)?;
                v["reduction"] = json!({ "modulus": m, "nonnegative": r.render(), "signed": r.render_signed() });
            }
            let mut failed = false;
            if let Some(tag) = family {
                let fam: CodeFamily = tag.parse()?;
                let check = enumerator_divisibility_check(&e, fam);
                let expected = expected_reduction(fam, x.len());
                let got = reduce_mod(&w, expected.modulus)?;
                failed = !check.pass || got != expected;
                v["congruences"] = serde_json::to_value(&check)?;
                v["family_reduction"] = json!({
                    "modulus": expected.modulus,
                    "expected": expected.render_signed(),
                    "computed": got.render_signed(),
                    "pass": got == expected,
                });
            }
            emit(out, &v)?;
            Ok(failed.then_some(Mismatch))
        }
        Command::HermitianScan { q, sample, seed } => {
            let field = Field::of_order(q * q)?;
            if field.degree() % 4 != 0 {
                bail!("q = {q} is not a square");
            }
            let tn = TraceNorm::new(field.clone())?;
            let j = field.degree() / 4;
            let scan = match sample {
                Some(n) => curve_scan_sampled(&tn, j, *n, *seed).0,
                None => curve_scan_exhaustive(&tn, j),
            };
            let allowed = gamma_types(*q);
            let pass = scan.histogram.keys().all(|k| allowed.contains(k));
            let mut v = serde_json::to_value(&scan)?;
            v["expected_counts"] = json!(allowed);
            v["pass"] = json!(pass);
            emit(out, &v)?;
            Ok((!pass).then_some(Mismatch))
        }
        Command::Verify { suite, q, seed } => {
            let suite: Suite = suite.parse()?;
            let report = verify(suite, &VerifyOptions { q: *q, seed: *seed })?;
            emit(out, &serde_json::to_value(&report)?)?;
            for c in report.failures() {
                eprintln!("mismatch: {}", c.name);
            }
            Ok((!report.pass).then_some(Mismatch))
        }
        Command::ScanF { q, breadth, summary } => {
            let breadth = match breadth {
                Some(Breadth::Full) => ScanBreadth::Full,
                Some(Breadth::Binomial) => ScanBreadth::Binomial,
                None => ScanBreadth::default_for(*q),
            };
            let mut report = scan_f(*q, breadth)?;
            if *summary {
                report.entries.clear();
            }
            emit(out, &serde_json::to_value(&report)?)?;
            Ok(None)
        }
        Command::Conjecture { p, h, sample, seed } => {
            let report = conjecture(*p, *h, *sample, *seed)?;
            emit(out, &serde_json::to_value(&report)?)?;
            for c in &report.counterexamples {
                eprintln!("counterexample: a={} m={} d={} count={}", c.a, c.m, c.d, c.count);
            }
            Ok((!report.all_congruent).then_some(Mismatch))
        }
    }
}

fn construct(args: &ConstructArgs) -> Result<PointSet> {
    let need_q = || args.q.ok_or_else(|| anyhow!("--q is required for this family"));
    Ok(match args.family {
        Family::Gamma => {
            let q = need_q()?;
            let plane = Plane::shared(Field::of_order(q * q)?);
            let a = args.a.ok_or_else(|| anyhow!("--a is required for gamma"))?;
            gamma_a(&plane, plane.field().element(a)?)?
        }
        Family::Hermitian => {
            let q = need_q()?;
            hermitian_unital(&Plane::shared(Field::of_order(q * q)?))?
        }
        Family::Touching => {
            let q = need_q()?;
            let plane = Plane::shared(Field::of_order(q)?);
            let f = plane.field().clone();
            let b: Vec<FieldElement> = match (&args.b, args.s) {
                (Some(list), _) => list.iter().map(|&i| f.element(i)).collect::<Result<_, _>>()?,
                (None, Some(s)) => power_class(&f, touching_v(&f), s),
                (None, None) => bail!("touching needs --B or --s"),
            };
            touching_union(&plane, &b)?
        }
        Family::Oval => {
            let q = need_q()?;
            let variant = OvalVariant::try_from(args.variant.unwrap_or(1))?;
            oval_set(&Plane::shared(Field::of_order(q)?), variant)?
        }
        Family::Lift => {
            let base = read_set(args.input.as_deref().ok_or_else(|| anyhow!("lift needs --input"))?)?;
            let h = args.h.ok_or_else(|| anyhow!("lift needs --h"))?;
            let s = args.s.unwrap_or(h - 1);
            lift(&base, h, None, s)?.set
        }
        Family::Complement => {
            let base = read_set(args.input.as_deref().ok_or_else(|| anyhow!("complement needs --input"))?)?;
            complement(&base)?
        }
    })
}

fn read_set(path: &Path) -> Result<PointSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PointSet::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, value: &Value) -> Result<()> {
    emit_text(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
