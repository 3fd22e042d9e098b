//! Command-line front end: loads JSON data, dispatches to the engine, and
//! emits reports as text or JSON.
//!
//! Exit codes: 0 for success/descend-style verdicts, 1 for violation or
//! not-descend verdicts, 2 for input errors.

use clap::{Args, Parser, Subcommand};
use seidel_core::data;
use seidel_core::descent::{
    asymptotic_valuation, descent_verdict, diameter_certificate, ostrover_growth,
    DiameterCertificate, Outcome,
};
use seidel_core::fibration::{fibration_from_json, lp_residual, AlphaClass, LPInstance};
use seidel_core::gallery::{run_example, GalleryParams, GALLERY_NAMES};
use seidel_core::morse::{complex_from_json, cycle_from_json, morse_to_spectral, spectral_number};
use seidel_core::novikov::NovikovScalar;
use seidel_core::qring::{
    invert_unit, manifold_from_json, quantum_product, ManifoldData, QElementRepr,
};
use seidel_core::rat::{fmt_rat, parse_rat, Rat};
use seidel_core::report::{Report, WitnessRow};
use seidel_core::seidel::{classify_form, SeidelContext, SeidelElement};
use std::fs;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "seidel",
    about = "Exact quantum homology over Novikov coefficients: products, Seidel elements, descent verdicts, Morse spectral numbers, fibration checks",
    version
)]
struct Cli {
    /// Emit the authoritative JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Valuation of a Novikov scalar.
    Nu(NuArgs),
    /// Quantum product of two elements over a manifold table.
    Product(ProductArgs),
    /// Invert a unit of the quantum ring.
    Invert(InvertArgs),
    /// Check a Seidel element against the structural classifier.
    Classify(ClassifyArgs),
    /// Descent verdicts for a set of loop elements.
    Descent(DescentCmd),
    /// Certified asymptotic valuation of a unit.
    Asymptotic(AsymptoticArgs),
    /// Filtered Morse spectral numbers.
    Morse(MorseCmd),
    /// Displacement growth table and diameter certificate.
    Ostrover(OstroverArgs),
    /// Consistency checks for a fibration file.
    #[command(name = "fibration-check", alias = "fibration")]
    FibrationCheck(FibrationArgs),
    /// Run a bundled end-to-end example.
    Examples(ExamplesArgs),
}

#[derive(Args)]
struct NuArgs {
    /// Scalar as JSON (array of {"eps","coef"} or {"terms":…,"floor":…}).
    #[arg(long)]
    scalar: String,
}

#[derive(Args)]
struct ProductArgs {
    /// Manifold JSON file, or a bundled name (cp1, cp2, …).
    #[arg(long)]
    manifold: String,
    /// First factor as element JSON.
    #[arg(long)]
    a: String,
    /// Second factor as element JSON.
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long)]
    manifold: String,
    /// Element JSON (inline or @file).
    #[arg(long)]
    element: String,
    /// Truncation floor for series inversion.
    #[arg(long, default_value = "-100")]
    floor: String,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    manifold: String,
    #[arg(long)]
    element: String,
    #[arg(long, default_value = "γ")]
    label: String,
}

#[derive(Args)]
struct DescentCmd {
    #[command(subcommand)]
    cmd: DescentSub,
}

#[derive(Subcommand)]
enum DescentSub {
    /// Decide spectral and asymptotic descent for an element file.
    Check(DescentArgs),
}

#[derive(Args)]
struct DescentArgs {
    #[arg(long)]
    manifold: String,
    /// JSON file {"elements":[{"label","element"}]}.
    #[arg(long)]
    elements: String,
    #[arg(long, default_value_t = 50)]
    kmax: u32,
    #[arg(long, default_value = "-100")]
    floor: String,
}

#[derive(Args)]
struct AsymptoticArgs {
    #[arg(long)]
    manifold: String,
    #[arg(long)]
    element: String,
    #[arg(long, default_value_t = 50)]
    kmax: u32,
    #[arg(long, default_value = "-100")]
    floor: String,
}

#[derive(Args)]
struct MorseCmd {
    #[command(subcommand)]
    cmd: MorseSub,
}

#[derive(Subcommand)]
enum MorseSub {
    /// Spectral number of a cycle in a filtered complex.
    Spectral(MorseArgs),
}

#[derive(Args)]
struct MorseArgs {
    /// Complex JSON file.
    #[arg(long)]
    complex: String,
    /// Cycle JSON file.
    #[arg(long)]
    cycle: String,
    /// Interpret the complex as a generating function and use its negation.
    #[arg(long)]
    negate: bool,
}

#[derive(Args)]
struct OstroverArgs {
    /// Morse complex of the generating function H.
    #[arg(long)]
    complex: String,
    /// JSON file [{"label","degree","terms":[{"gen","coef"}]}] of cycles in
    /// the negated complex.
    #[arg(long)]
    cycles: String,
    /// Integral I of the displacing bump function.
    #[arg(long, default_value = "1")]
    interval: String,
    /// Number of grid points s = 0, 1, …
    #[arg(long, default_value_t = 10)]
    steps: u32,
}

#[derive(Args)]
struct FibrationArgs {
    /// Fibration JSON file, or bundled name (blowup_cp2, blowup_t4).
    #[arg(long)]
    file: String,
    /// Run every check (pairing, dimension filter, reductions, divisor
    /// axiom, splitting identity).
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ExamplesArgs {
    /// One of the bundled scenarios, or nothing with --all.
    name: Option<String>,
    #[arg(long)]
    all: bool,
    /// Blow-up size δ.
    #[arg(long, default_value = "1/10")]
    delta: String,
    #[arg(long, default_value_t = 50)]
    kmax: u32,
    #[arg(long, default_value = "-100")]
    floor: String,
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn read_arg(text_or_file: &str) -> Result<String, CliError> {
    if let Some(path) = text_or_file.strip_prefix('@') {
        return fs::read_to_string(path).map_err(|e| CliError(format!("{path}: {e}")));
    }
    // inline JSON starts with a brace or bracket
    let t = text_or_file.trim();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(t.to_string())
    } else {
        fs::read_to_string(text_or_file).map_err(|e| CliError(format!("{text_or_file}: {e}")))
    }
}

fn load_manifold(spec: &str) -> Result<ManifoldData, CliError> {
    if std::path::Path::new(spec).exists() {
        let text = fs::read_to_string(spec).map_err(|e| CliError(format!("{spec}: {e}")))?;
        return Ok(manifold_from_json(&text)?);
    }
    if let Some(text) = data::bundled_json(spec) {
        // blow-up bundles are fibration files; take the fiber
        if spec.starts_with("blowup") {
            return Ok(fibration_from_json(text)?.fiber);
        }
        return Ok(manifold_from_json(text)?);
    }
    Err(CliError(format!(
        "`{spec}` is neither a file nor a bundled manifold ({})",
        data::BUNDLED_MANIFOLDS.join(", ")
    )))
}

fn parse_element(
    text_or_file: &str,
    m: &ManifoldData,
) -> Result<seidel_core::QElement, CliError> {
    let text = read_arg(text_or_file)?;
    let repr: QElementRepr = serde_json::from_str(&text)?;
    Ok(repr.resolve(m)?)
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Descend => "descend",
        Outcome::NotDescend => "not_descend",
        Outcome::Undetermined => "undetermined",
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Nu(args) => {
            let text = read_arg(&args.scalar)?;
            let scalar: NovikovScalar = serde_json::from_str(&text)?;
            let mut rep = Report::new("valuation");
            rep.verdict("nu", scalar.nu().to_string());
            rep.verdict("scalar", scalar.to_string());
            Ok(rep)
        }
        Command::Product(args) => {
            let m = load_manifold(&args.manifold)?;
            let a = parse_element(&args.a, &m)?;
            let b = parse_element(&args.b, &m)?;
            let p = quantum_product(&a, &b, &m);
            let mut rep = Report::new("quantum product");
            rep.verdict("a", a.render(&m));
            rep.verdict("b", b.render(&m));
            rep.verdict("a*b", p.render(&m));
            rep.verdict("nu(a*b)", p.nu().to_string());
            Ok(rep)
        }
        Command::Invert(args) => {
            let m = load_manifold(&args.manifold)?;
            let u = parse_element(&args.element, &m)?;
            let floor = parse_rat(&args.floor).map_err(CliError)?;
            let inv = invert_unit(&u, &m, &floor)?;
            let mut rep = Report::new("inverse");
            rep.verdict("u", u.render(&m));
            rep.verdict("u^-1", inv.render(&m));
            rep.note("verified: u * u^-1 = 1 above the floor");
            Ok(rep)
        }
        Command::Classify(args) => {
            let m = load_manifold(&args.manifold)?;
            let el = parse_element(&args.element, &m)?;
            let s = SeidelElement { element: el, loop_label: args.label.clone() };
            let ctx = SeidelContext::from_manifold(&m);
            let report = classify_form(&s, &ctx, &m);
            let mut rep = Report::new("classifier");
            rep.verdict("conforms", report.conforms.to_string());
            rep.verdict("applicable cases", format!("{:?}", report.applicable));
            for v in &report.violations {
                rep.witnesses.push(WitnessRow { label: s.loop_label.clone(), reason: v.clone() });
            }
            rep.exit_code = if report.conforms { 0 } else { 1 };
            Ok(rep)
        }
        Command::Descent(DescentCmd { cmd: DescentSub::Check(args) }) => {
            let m = load_manifold(&args.manifold)?;
            let text = read_arg(&args.elements)?;
            #[derive(serde::Deserialize)]
            struct ElementsFile {
                elements: Vec<LabeledElement>,
            }
            #[derive(serde::Deserialize)]
            struct LabeledElement {
                label: String,
                element: QElementRepr,
            }
            let file: ElementsFile = serde_json::from_str(&text)?;
            let mut elements = Vec::new();
            for le in &file.elements {
                elements.push(SeidelElement {
                    element: le.element.resolve(&m)?,
                    loop_label: le.label.clone(),
                });
            }
            let floor = parse_rat(&args.floor).map_err(CliError)?;
            let (verdict, estimates) = descent_verdict(&elements, &m, args.kmax, &floor)?;
            let mut rep = Report::new("descent verdict");
            rep.verdict("spectral", outcome_str(verdict.spectral));
            rep.verdict("asymptotic", outcome_str(verdict.asymptotic));
            for w in &verdict.witnesses {
                rep.witnesses
                    .push(WitnessRow { label: w.loop_label.clone(), reason: w.reason.clone() });
            }
            rep.table(
                "asymptotic estimates".to_string(),
                vec!["loop".into(), "lower".into(), "upper".into(), "exact".into()],
                estimates
                    .iter()
                    .map(|(l, e)| {
                        vec![
                            l.clone(),
                            e.lower.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into()),
                            fmt_rat(&e.upper),
                            e.exact.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into()),
                        ]
                    })
                    .collect(),
            );
            rep.exit_code = match (verdict.spectral, verdict.asymptotic) {
                (_, Outcome::NotDescend) | (Outcome::NotDescend, _) => 1,
                _ => 0,
            };
            Ok(rep)
        }
        Command::Asymptotic(args) => {
            let m = load_manifold(&args.manifold)?;
            let u = parse_element(&args.element, &m)?;
            let floor = parse_rat(&args.floor).map_err(CliError)?;
            let (est, trace) = asymptotic_valuation(&u, &m, args.kmax, &floor)?;
            let mut rep = Report::new("asymptotic valuation");
            rep.verdict(
                "lower",
                est.lower.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into()),
            );
            rep.verdict("upper", fmt_rat(&est.upper));
            rep.verdict(
                "exact",
                est.exact.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into()),
            );
            if let Some(c) = &trace.certificate {
                rep.note(format!("certificate: {c}"));
            }
            if let Some(n) = &trace.inverse_note {
                rep.warnings.push(n.clone());
            }
            rep.table(
                "power valuations".to_string(),
                vec!["k".into(), "nu(u^k)".into()],
                trace
                    .nus
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![(i + 1).to_string(), fmt_rat(v)])
                    .collect(),
            );
            Ok(rep)
        }
        Command::Morse(MorseCmd { cmd: MorseSub::Spectral(args) }) => {
            let complex = complex_from_json(&read_arg(&args.complex)?)?;
            let target = if args.negate {
                seidel_core::morse::negated_complex(&complex)
            } else {
                complex.clone()
            };
            let cycle = cycle_from_json(&read_arg(&args.cycle)?, &target)?;
            let value = if args.negate {
                morse_to_spectral(&cycle, &complex)?
            } else {
                spectral_number(&cycle, &complex)?
            };
            let mut rep = Report::new("Morse spectral number");
            rep.verdict("c_M(a)", fmt_rat(&value));
            Ok(rep)
        }
        Command::Ostrover(args) => {
            let complex = complex_from_json(&read_arg(&args.complex)?)?;
            let neg = seidel_core::morse::negated_complex(&complex);
            #[derive(serde::Deserialize)]
            struct CyclesFile(Vec<LabeledCycle>);
            #[derive(serde::Deserialize)]
            struct LabeledCycle {
                label: String,
                degree: i64,
                terms: Vec<CycleTerm>,
            }
            #[derive(serde::Deserialize)]
            struct CycleTerm {
                gen: String,
                coef: String,
            }
            let cf: CyclesFile = serde_json::from_str(&read_arg(&args.cycles)?)?;
            let mut values = Vec::new();
            for lc in &cf.0 {
                let mut cycle = Vec::new();
                for t in &lc.terms {
                    let g = neg.generator_index(&t.gen).ok_or_else(|| {
                        CliError(format!("unknown generator `{}`", t.gen))
                    })?;
                    cycle.push((g, parse_rat(&t.coef).map_err(CliError)?));
                }
                let spec = seidel_core::morse::HomologyClassSpec::new(cycle, lc.degree);
                values.push((lc.label.clone(), morse_to_spectral(&spec, &complex)?));
            }
            let interval = parse_rat(&args.interval).map_err(CliError)?;
            let grid: Vec<Rat> = (0..args.steps)
                .map(|i| Rat::from_integer((i as i64).into()))
                .collect();
            let rows = ostrover_growth(&values, &interval, &grid)?;
            let mut rep = Report::new("displacement growth");
            rep.table(
                "c(a, path_s)".to_string(),
                vec!["s".into(), "class".into(), "value".into()],
                rows.iter()
                    .map(|r| vec![fmt_rat(&r.s), r.class.clone(), fmt_rat(&r.value)])
                    .collect(),
            );
            let verdict = seidel_core::descent::DescentVerdict {
                spectral: Outcome::Descend,
                asymptotic: Outcome::Descend,
                witnesses: vec![],
            };
            match diameter_certificate(&verdict, &rows) {
                DiameterCertificate::Issued { slope, steps } => {
                    rep.verdict("certificate slope", fmt_rat(&slope));
                    for s in steps {
                        rep.note(s);
                    }
                }
                DiameterCertificate::Declined { reason } => {
                    rep.verdict("certificate", format!("declined: {reason}"));
                }
            }
            rep.note("the certificate assumes a descending invariant; pair with `descent check`");
            Ok(rep)
        }
        Command::FibrationCheck(args) => {
            let text = if std::path::Path::new(&args.file).exists() {
                fs::read_to_string(&args.file).map_err(|e| CliError(e.to_string()))?
            } else if let Some(t) = data::bundled_json(&args.file) {
                t.to_string()
            } else {
                return Err(CliError(format!("`{}` not found", args.file)));
            };
            let f = fibration_from_json(&text)?;
            let mut rep = Report::new(format!("fibration checks: {}", f.name));
            let structural = f.validate();
            rep.verdict(
                "pairing + dimension filter + stored-cap consistency",
                if structural.is_empty() { "ok".to_string() } else { structural.join("; ") },
            );
            let reductions = f.fiber_reduction_report();
            rep.verdict(
                "fiber-class reductions",
                if reductions.is_empty() { "ok".to_string() } else { reductions.join("; ") },
            );
            let div = f.divisor_axiom_report();
            rep.verdict(
                "divisor axiom",
                if div.is_empty() { "ok".to_string() } else { div.join("; ") },
            );
            let mut bad = !structural.is_empty() || !reductions.is_empty() || !div.is_empty();
            if args.all {
                // splitting-identity instance: H = the σ₀-orthogonal ω-dual
                // extension, u = w = the fiber cycle, v = σ₀, α = σ₀
                let h_fiber = seidel_core::qring::omega_dual_divisor(&f.fiber)?;
                let (h, warns) = f.s_map(&h_fiber)?;
                for w in warns {
                    rep.warnings.push(w);
                }
                let mut m_vec = vec![Rat::from_integer(0.into()); f.ext_size()];
                m_vec[f.m_class()] = Rat::from_integer(1.into());
                let inst = LPInstance {
                    h,
                    u: m_vec.clone(),
                    v: f.sigma0_class.clone(),
                    w: m_vec,
                    alpha: AlphaClass::Section(vec![0; f.fiber.h2_rank]),
                };
                match lp_residual(&inst, &f) {
                    Ok((residual, warns)) => {
                        for w in warns {
                            rep.warnings.push(w);
                        }
                        rep.verdict("splitting-identity residual", fmt_rat(&residual));
                        if residual != seidel_core::rat::rat_i64(0) {
                            bad = true;
                        }
                    }
                    Err(e) => {
                        rep.verdict("splitting-identity residual", format!("skipped: {e}"));
                    }
                }
            }
            rep.exit_code = if bad { 1 } else { 0 };
            Ok(rep)
        }
        Command::Examples(args) => {
            let floor = parse_rat(&args.floor).map_err(CliError)?;
            let delta = parse_rat(&args.delta).map_err(CliError)?;
            let params = GalleryParams { delta, k_max: args.kmax, floor, ..Default::default() };
            if args.all {
                let mut rep = Report::new("bundled example gallery");
                let mut worst = 0;
                for name in GALLERY_NAMES {
                    let r = run_example(name, &params)?;
                    worst = worst.max(r.exit_code);
                    rep.verdict(name, format!("{} (exit {})", r.title, r.exit_code));
                }
                rep.exit_code = worst;
                return Ok(rep);
            }
            let name = args
                .name
                .as_deref()
                .ok_or_else(|| CliError("pass an example name or --all".into()))?;
            Ok(run_example(name, &params)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            if cli.json {
                println!("{}", rep.to_json());
            } else {
                print!("{}", rep.render_text());
            }
            ExitCode::from(rep.exit_code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
    }
}
