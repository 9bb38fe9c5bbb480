use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqcount_core::constants::{constant_cam, constant_cq, constant_cq_big, constant_cq_prime, constant_kq};
use fqcount_core::estimator::{divisor_range_check, family_estimator, EstimateOptions};
use fqcount_core::poly::{parse_monic, parse_poly};
use fqcount_core::semigroup::oracle_count;
use fqcount_core::verify::{run_suite, Suite};
use fqcount_core::{
    build_field, count, estimate_coefficient, field_of_size, Error, FamilySpec, FieldSpec, LPolynomial,
};
use num_bigint::BigInt;
use serde_json::{json, Value};

const POLY_HELP: &str = "Polynomials (--m, --a) are written in T, e.g. \"T^2+2T+1\" or \"T^3-T\". \
Coefficients are element codes in 0..q-1; over F_p these are the residues themselves.\n\
Exit codes: 0 success, 1 oracle or verification mismatch, 2 bad parameters or violated hypotheses, 3 resource cap.";

#[derive(Parser)]
#[command(
    name = "fqcount",
    version,
    about = "Exact counts and certified asymptotics for multiplicative families in F_q[T]"
)]
#[command(after_help = POLY_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// write the output to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact count table n -> f_n
    Count(CountArgs),
    /// Limiting constants by several formulas
    Constants(ConstantArgs),
    /// Main term and error bounds for one coefficient
    Estimate(EstimateArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    /// f = A^2 + T B^2 (q odd)
    Landau,
    /// odd-degree primes to even powers
    S1,
    /// only even-degree primes
    S2,
    /// squarefree, only even-degree primes
    S3,
    /// effective divisors on places of degree divisible by r (bounded with --ell)
    Divisors,
    /// every prime factor congruent to a mod m
    Arith,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct FieldArgs {
    /// field size q (a prime power)
    #[arg(long)]
    q: Option<u64>,
    /// characteristic, with --k
    #[arg(long)]
    p: Option<u64>,
    /// extension degree, with --p
    #[arg(long)]
    k: Option<u32>,
    /// defining polynomial of F_{p^k} as comma-separated coefficients, low to high
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(value_enum, required_unless_present = "family_flag")]
    family: Option<FamilyName>,
    /// same as the positional family
    #[arg(long = "family", value_enum, conflicts_with = "family")]
    family_flag: Option<FamilyName>,
    #[command(flatten)]
    field: FieldArgs,
    /// r for the divisor families
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// multiplicity bound for the divisor family
    #[arg(long)]
    ell: Option<u32>,
    /// L-polynomial file, e.g. {"q": 5, "coefficients": [1, -2, 5]}; rational function field if absent
    #[arg(long)]
    l_poly: Option<std::path::PathBuf>,
    /// modulus m of the progression family
    #[arg(long)]
    m: Option<String>,
    /// residue a of the progression family
    #[arg(long)]
    a: Option<String>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    params: FamilyArgs,
    /// largest table index
    #[arg(long)]
    max_n: Option<usize>,
    /// largest index for the even-degree families (index n counts degree 2n)
    #[arg(long)]
    max_half_degree: Option<usize>,
    /// also count by exhaustive factorization where within the cap
    #[arg(long)]
    oracle: bool,
    /// enumeration cap (overrides FQT_CAP)
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstantName {
    Kq,
    Cq1,
    Cq2,
    Cq3,
    /// second-order constant of the sums-of-squares count
    Cq,
    /// second-order constant of the even-multiplicity count
    CqPrime,
    Cam,
}

#[derive(Args)]
struct ConstantArgs {
    name: ConstantName,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    a: Option<String>,
    /// decimal digits
    #[arg(long, default_value_t = 30)]
    digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    params: FamilyArgs,
    #[arg(long)]
    n: u64,
    /// expansion order m of the main term
    #[arg(long, default_value_t = 0)]
    order: usize,
    #[arg(long, default_value_t = 30)]
    digits: u32,
    /// constant used for the (uncertified) m >= 1 bound
    #[arg(long, default_value_t = 24)]
    m_constant: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

enum Failure {
    Core(Error),
    Usage(String),
    /// Output is still printed; the message goes to stderr.
    Mismatch(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::ResourceLimit { .. }) => 3,
            Failure::Core(_) | Failure::Usage(_) => 2,
            Failure::Mismatch(..) => 1,
        }
    }
}

type Outcome = Result<String, Failure>;

fn make_field(f: &FieldArgs) -> Result<FieldSpec, Failure> {
    match (f.q, f.p, f.k) {
        (Some(q), None, None) if f.modulus.is_none() => Ok(field_of_size(q)?),
        (q, Some(p), k) => {
            let k = k.unwrap_or(1);
            let field = build_field(p, k, f.modulus.as_deref())?;
            if q.is_some_and(|q| q != field.q()) {
                return Err(Failure::Usage(format!("--q disagrees with p^k = {}", field.q())));
            }
            Ok(field)
        }
        (Some(_), None, _) => Err(Failure::Usage("--modulus and --k need --p".into())),
        _ => Err(Failure::Usage("give --q or --p/--k".into())),
    }
}

fn field_q(f: &FieldArgs) -> Result<u64, Failure> {
    match (f.q, f.p, f.k) {
        (Some(q), None, None) if f.modulus.is_none() => Ok(q),
        _ => Ok(make_field(f)?.q()),
    }
}

fn family_spec(a: &FamilyArgs) -> Result<FamilySpec, Failure> {
    let name = a.family.or(a.family_flag).ok_or_else(|| Failure::Usage("no family given".into()))?;
    let spec = match name {
        FamilyName::Landau => FamilySpec::Landau { q: field_q(&a.field)? },
        FamilyName::S1 => FamilySpec::EvenMultiplicity { q: field_q(&a.field)? },
        FamilyName::S2 => FamilySpec::EvenDegree { q: field_q(&a.field)? },
        FamilyName::S3 => FamilySpec::EvenDegreeSquarefree { q: field_q(&a.field)? },
        FamilyName::Divisors => {
            let l = match &a.l_poly {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                    let l = LPolynomial::from_json(&text)?;
                    if a.field.q.is_some_and(|q| q != l.q()) {
                        return Err(Failure::Usage("--q disagrees with the L-polynomial file".into()));
                    }
                    l
                }
                None => LPolynomial::rational(field_q(&a.field)?)?,
            };
            match a.ell {
                Some(ell) => FamilySpec::BoundedDivisors { l, r: a.r, ell },
                None => FamilySpec::Divisors { l, r: a.r },
            }
        }
        FamilyName::Arith => {
            let field = make_field(&a.field)?;
            let m = parse_monic(&field, a.m.as_deref().ok_or_else(|| Failure::Usage("arith needs --m".into()))?)?;
            let res = parse_poly(&field, a.a.as_deref().unwrap_or("1"))?;
            FamilySpec::Arith { field, a: res, m }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn cap_of(cap: Option<u64>) -> u64 {
    cap.unwrap_or_else(FieldSpec::default_cap)
}

fn cmd_count(args: &CountArgs) -> Outcome {
    let spec = family_spec(&args.params)?;
    let even = matches!(
        spec,
        FamilySpec::EvenMultiplicity { .. } | FamilySpec::EvenDegree { .. } | FamilySpec::EvenDegreeSquarefree { .. }
    );
    let order = match (args.max_n, args.max_half_degree) {
        (Some(n), None) => n,
        (None, Some(h)) if even => h,
        (None, Some(_)) => return Err(Failure::Usage("--max-half-degree applies to s1, s2 and s3".into())),
        (Some(_), Some(_)) => return Err(Failure::Usage("give only one of --max-n and --max-half-degree".into())),
        (None, None) => return Err(Failure::Usage("give --max-n".into())),
    };
    let table = count(&spec, order)?;

    let mut matches: Vec<Option<bool>> = vec![None; order + 1];
    if args.oracle {
        let cap = cap_of(args.cap);
        let field = match &spec {
            FamilySpec::Arith { field, .. } => Some(field.clone()),
            FamilySpec::Divisors { l, .. } | FamilySpec::BoundedDivisors { l, .. } if l.genus() > 0 => None,
            _ => Some(field_of_size(spec.q())?),
        };
        if let Some(field) = field {
            for (n, slot) in matches.iter_mut().enumerate() {
                match oracle_count(&field, &spec, n as u64, cap) {
                    Ok(v) => *slot = Some(v == table.values[n]),
                    Err(Error::ResourceLimit { .. }) => break,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        if matches.iter().all(Option::is_none) {
            return Err(Error::ResourceLimit { what: "oracle enumeration".into(), needed: "1".into(), cap }.into());
        }
    }

    let mut out = String::new();
    match args.format {
        Format::Csv => {
            out.push_str("index,degree,count,method,oracle_match\n");
            for (n, v) in table.values.iter().enumerate() {
                let m = matches[n].map_or(String::new(), |b| b.to_string());
                writeln!(out, "{n},{},{v},{},{m}", spec.degree_of_index(n as u64), table.method.tag()).unwrap();
            }
        }
        Format::Json => {
            let mut j = table.to_json();
            if args.oracle {
                let col: Vec<Value> = matches.iter().map(|m| m.map_or(Value::Null, Value::Bool)).collect();
                j.as_object_mut().unwrap().insert("oracle_match".into(), Value::Array(col));
            }
            out = serde_json::to_string_pretty(&j).unwrap() + "\n";
        }
    }
    if matches.contains(&Some(false)) {
        let first = matches.iter().position(|m| *m == Some(false)).unwrap();
        return Err(Failure::Mismatch(out, format!("oracle disagrees with the series at index {first}")));
    }
    Ok(out)
}

fn cmd_constants(args: &ConstantArgs) -> Outcome {
    let q = || field_q(&args.field);
    let report = match args.name {
        ConstantName::Kq => constant_kq(q()?, args.digits)?,
        ConstantName::Cq1 => constant_cq_big(q()?, 1, args.digits)?,
        ConstantName::Cq2 => constant_cq_big(q()?, 2, args.digits)?,
        ConstantName::Cq3 => constant_cq_big(q()?, 3, args.digits)?,
        ConstantName::Cq => constant_cq(q()?, args.digits)?,
        ConstantName::CqPrime => constant_cq_prime(q()?, args.digits)?,
        ConstantName::Cam => {
            let field = make_field(&args.field)?;
            let m = parse_monic(&field, args.m.as_deref().ok_or_else(|| Failure::Usage("cam needs --m".into()))?)?;
            let a = parse_poly(&field, args.a.as_deref().unwrap_or("1"))?;
            constant_cam(&field, &a, &m, args.digits)?
        }
    };
    let j = report.to_json();
    Ok(match args.format {
        Format::Csv => {
            let mut out = String::from("name,method,value,tail_bound\n");
            for m in &report.methods {
                writeln!(out, "{},{},{},{}", report.name, m.tag, m.value.to_sci(args.digits), m.tail_bound.to_sci(4))
                    .unwrap();
            }
            writeln!(out, "{},consensus,{},", report.name, j["consensus"].as_str().unwrap()).unwrap();
            out
        }
        Format::Json => serde_json::to_string_pretty(&j).unwrap() + "\n",
    })
}

/// Exact counts up to this index are computed for the comparison column.
const EXACT_LIMIT: u64 = 3000;

fn cmd_estimate(args: &EstimateArgs) -> Outcome {
    let spec = family_spec(&args.params)?;
    let est_spec = family_estimator(&spec, args.order, args.digits, None)?;
    let opts = EstimateOptions { digits: args.digits, m_constant: BigInt::from(args.m_constant).into() };
    let est = estimate_coefficient(&est_spec, args.n, &opts)?;
    let mut j = est.to_json(args.digits.min(20));
    let obj = j.as_object_mut().unwrap();
    obj.insert("family".into(), json!(spec.id()));
    obj.insert("params".into(), spec.params_json());
    if let FamilySpec::Divisors { l, r } | FamilySpec::BoundedDivisors { l, r, .. } = &spec {
        let ell = if let FamilySpec::BoundedDivisors { ell, .. } = &spec { Some(*ell) } else { None };
        obj.insert("divisor_range_ok".into(), json!(divisor_range_check(l, *r, ell, args.n)));
    }
    if !est.certified {
        obj.insert("warning".into(), json!("error_bound for m >= 1 uses a configurable constant and is not certified"));
    }
    if args.n <= EXACT_LIMIT {
        let exact = BigInt::from(count(&spec, args.n as usize)?.values[args.n as usize].clone());
        let dev = est.deviation(&exact);
        let p = fqcount_core::real::bits_for_digits(args.digits);
        let devr = fqcount_core::Real::from_rational(&dev, p);
        obj.insert("exact".into(), json!(exact.to_string()));
        obj.insert("observed_deviation".into(), json!(devr.to_sci(6)));
        obj.insert("within_error_bound".into(), json!(devr <= est.error_bound.add(&est.eval_tail_bound)));
        if est.in_range {
            obj.insert("within_corollary_bound".into(), json!(devr <= est.corollary_radius()));
        }
    }
    Ok(match args.format {
        Format::Csv => {
            let mut out = String::new();
            let keys: Vec<&String> = obj.keys().filter(|k| !obj[k.as_str()].is_object()).collect();
            writeln!(out, "{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",")).unwrap();
            let vals: Vec<String> = keys
                .iter()
                .map(|k| match &obj[k.as_str()] {
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                })
                .collect();
            writeln!(out, "{}", vals.join(",")).unwrap();
            out
        }
        Format::Json => serde_json::to_string_pretty(&j).unwrap() + "\n",
    })
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let suites = if args.suite == "all" { Suite::ALL.to_vec() } else { vec![Suite::parse(&args.suite)?] };
    let cap = cap_of(args.cap);
    let mut out = String::new();
    let mut failed = false;
    let mut reports = Vec::new();
    for s in suites {
        let rep = run_suite(s, args.seed, cap)?;
        failed |= !rep.passed();
        match args.format {
            ReportFormat::Text => out.push_str(&rep.to_text()),
            ReportFormat::Csv => {
                if out.is_empty() {
                    out.push_str("suite,check,anchor,passed,informational,detail\n");
                }
                for c in &rep.checks {
                    writeln!(
                        out,
                        "{},\"{}\",\"{}\",{},{},\"{}\"",
                        s.name(),
                        c.name,
                        c.anchor,
                        c.passed,
                        c.informational,
                        c.detail.replace('"', "'")
                    )
                    .unwrap();
                }
            }
            ReportFormat::Json => reports.push(rep.to_json()),
        }
    }
    if args.format == ReportFormat::Json {
        out = serde_json::to_string_pretty(&Value::Array(reports)).unwrap() + "\n";
    }
    if failed {
        Err(Failure::Mismatch(out, "verification failed".into()))
    } else {
        Ok(out)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Constants(a) => cmd_constants(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    let emit = |out: &str| -> std::io::Result<()> {
        match &cli.output {
            Some(path) => std::fs::write(path, out),
            None => std::io::stdout().write_all(out.as_bytes()),
        }
    };
    match result {
        Ok(out) => match emit(&out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(2)
            }
        },
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Mismatch(out, msg) => {
                    let _ = emit(&out);
                    eprintln!("error: {msg}");
                }
            }
            ExitCode::from(code)
        }
    }
}
