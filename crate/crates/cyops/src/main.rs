//! cyops: decide CY-type properties of differential operators and compute
//! their local invariants.

use clap::{Parser, Subcommand};
use cyops::corpus::{corpus_get, corpus_names, corpus_source, parse_corpus_text};
use cyops::error::CyError;
use cyops::frobenius::{local_structure, mum_flag};
use cyops::galois::galois_classify;
use cyops::normal_form::{lambert_coefficients, normal_form_data, special_normal_form_equal};
use cyops::operator::{indicial, DOperator, Point};
use cyops::parse::parse_operator;
use cyops::poly::rat_to_text;
use cyops::report::{build_report, SeriesDoc};
use cyops::series::Series;
use cyops::{rat, Rat};
use num_traits::Zero;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cyops",
    version,
    about = "Exact-arithmetic analysis of Calabi-Yau type differential operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Series truncation order.
    #[arg(long, global = true, default_value_t = 50)]
    truncation: i64,
    /// Depth of the N-integrality checks and Lambert tables.
    #[arg(long, global = true, default_value_t = 200)]
    depth: usize,
    /// Largest denominator prime accepted by N-integrality.
    #[arg(long = "prime-bound", global = true, default_value_t = 1_000_000)]
    prime_bound: u64,
    /// Lambert weight.
    #[arg(long, global = true, default_value_t = 3)]
    ell: u32,
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Emit human-readable text (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Exit with status 1 when the principal check fails.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: properties (P)(M)(N)(Q)(S), normal form, Galois class.
    Analyze {
        source: Option<String>,
        /// Analyze the whole corpus.
        #[arg(long)]
        all: bool,
    },
    /// The dual operator, in both presentations.
    Dual { source: String },
    /// Exponents at the singular points (or at --point).
    Exponents {
        source: String,
        /// A rational point p, or `inf`.
        #[arg(long)]
        point: Option<String>,
    },
    /// The Frobenius flag at the MUM point.
    Flag { source: String },
    /// The special coordinate q.
    Qcoord { source: String },
    /// The Y-invariants.
    Yinv { source: String },
    /// Lambert coefficients N_d of Y_1.
    Lambert { source: String },
    /// n-th symmetric power of an order-2 operator.
    Sympow {
        source: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Reconstruct the order-2 symmetric root.
    Symroot { source: String },
    /// Differential Galois group classification.
    Galois { source: String },
    /// Decide equality of special local normal forms.
    Equiv { a: String, b: String },
    /// List the named corpus.
    Corpus,
}

fn resolve_source(text: &str) -> Result<DOperator, CyError> {
    if corpus_names().contains(&text) {
        return corpus_get(text);
    }
    let path = std::path::Path::new(text);
    if path.exists() {
        let body = std::fs::read_to_string(path)
            .map_err(|e| CyError::Domain(format!("cannot read {text}: {e}")))?;
        return parse_corpus_text(&body);
    }
    parse_operator(text)
}

fn parse_point(text: &str) -> Result<Point, CyError> {
    if text == "inf" || text == "infinity" {
        return Ok(Point::Infinity);
    }
    let mut parts = text.splitn(2, '/');
    let num: cyops::Int = parts
        .next()
        .unwrap()
        .parse()
        .map_err(|_| CyError::Domain(format!("bad point {text}")))?;
    let den: cyops::Int = match parts.next() {
        Some(d) => d.parse().map_err(|_| CyError::Domain(format!("bad point {text}")))?,
        None => 1.into(),
    };
    Ok(Point::Finite(Rat::new(num, den)))
}

fn emit<T: serde::Serialize>(cli: &Cli, value: &T, text: String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value).expect("serialize"));
    } else {
        println!("{text}");
    }
}

fn series_line(s: &Series, up_to: i64) -> String {
    let t = s.truncation().min(up_to);
    let mut parts = Vec::new();
    let mut k = s.valuation().min(t);
    while k < t {
        let c = s.coeff(k);
        if !c.is_zero() {
            parts.push(format!("{}*z^{}", rat_to_text(&c), k));
        }
        k += 1;
    }
    if parts.is_empty() {
        parts.push("0".into());
    }
    format!("{} + O(z^{})", parts.join(" + "), t)
}

fn run(cli: &Cli) -> Result<u8, CyError> {
    match &cli.command {
        Command::Analyze { source, all } => {
            let sources: Vec<(Option<String>, DOperator)> = if *all {
                corpus_names()
                    .into_iter()
                    .map(|n| Ok((Some(n.to_string()), corpus_get(n)?)))
                    .collect::<Result<_, CyError>>()?
            } else {
                let s = source
                    .as_ref()
                    .ok_or_else(|| CyError::Domain("analyze needs a source or --all".into()))?;
                let name = corpus_names().contains(&s.as_str()).then(|| s.clone());
                vec![(name, resolve_source(s)?)]
            };
            let mut failures = 0;
            let mut docs = Vec::new();
            for (name, op) in sources {
                let doc = build_report(
                    name,
                    &op,
                    cli.truncation,
                    cli.depth,
                    cli.prime_bound,
                    cli.ell,
                )?;
                if !doc.verdict.overall {
                    failures += 1;
                }
                docs.push(doc);
            }
            if cli.json {
                if docs.len() == 1 {
                    println!("{}", serde_json::to_string_pretty(&docs[0]).expect("serialize"));
                } else {
                    println!("{}", serde_json::to_string_pretty(&docs).expect("serialize"));
                }
            } else {
                for doc in &docs {
                    print_report_text(doc);
                }
            }
            Ok(if cli.strict && failures > 0 { 1 } else { 0 })
        }
        Command::Dual { source } => {
            let op = resolve_source(source)?;
            let dual = op.dual();
            let body = format!(
                "d-form coefficients (low to high):\n  {}\ntheta form:\n  {}",
                dual.coeffs()
                    .iter()
                    .map(|c| c.render())
                    .collect::<Vec<_>>()
                    .join("\n  "),
                dual.to_theta_form().render()
            );
            #[derive(serde::Serialize)]
            struct DualDoc {
                d_form: Vec<String>,
                theta_form: String,
            }
            let doc = DualDoc {
                d_form: dual.coeffs().iter().map(|c| c.render()).collect(),
                theta_form: dual.to_theta_form().render(),
            };
            emit(cli, &doc, body);
            Ok(0)
        }
        Command::Exponents { source, point } => {
            let op = resolve_source(source)?;
            let theta = op.to_theta_form();
            let points = match point {
                Some(p) => vec![parse_point(p)?],
                None => {
                    let (mut pts, residual) = op.singular_points();
                    if !residual.is_constant() {
                        eprintln!(
                            "note: irrational singular points at roots of {}",
                            residual.render("z")
                        );
                    }
                    if !pts.contains(&Point::Finite(rat(0))) {
                        pts.insert(0, Point::Finite(rat(0)));
                    }
                    pts
                }
            };
            #[derive(serde::Serialize)]
            struct PointDoc {
                point: String,
                exponents: Vec<String>,
                multiplicities: Vec<usize>,
                residual_factor: String,
                log_blocks: Vec<Vec<usize>>,
            }
            let mut docs = Vec::new();
            let mut lines = Vec::new();
            for pt in &points {
                let ind = indicial(&theta, pt)?;
                let ls = local_structure(&theta, pt, cli.truncation.min(30))?;
                let blocks: Vec<Vec<usize>> =
                    ls.classes.iter().map(|c| c.block_sizes.clone()).collect();
                lines.push(format!(
                    "z = {}: exponents {}{}  log blocks {:?}",
                    pt,
                    ind.rational_roots
                        .iter()
                        .map(|(r, m)| format!("{}^{}", rat_to_text(r), m))
                        .collect::<Vec<_>>()
                        .join(", "),
                    if ind.residual_factor.is_constant() {
                        String::new()
                    } else {
                        format!("  residual {}", ind.residual_factor.render("T"))
                    },
                    blocks
                ));
                docs.push(PointDoc {
                    point: pt.to_string(),
                    exponents: ind
                        .rational_roots
                        .iter()
                        .map(|(r, _)| rat_to_text(r))
                        .collect(),
                    multiplicities: ind.rational_roots.iter().map(|(_, m)| *m).collect(),
                    residual_factor: ind.residual_factor.render("T"),
                    log_blocks: blocks,
                });
            }
            emit(cli, &docs, lines.join("\n"));
            Ok(0)
        }
        Command::Flag { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let flag = mum_flag(&op, cli.truncation)?;
            #[derive(serde::Serialize)]
            struct FlagDoc {
                mum_exponent: i64,
                f: Vec<SeriesDoc>,
            }
            let doc = FlagDoc {
                mum_exponent: flag.mum_exponent,
                f: (0..flag.order())
                    .map(|k| SeriesDoc::new(&flag.f(k), cli.truncation))
                    .collect(),
            };
            let text = (0..flag.order())
                .map(|k| format!("f_{} = {}", k, series_line(&flag.f(k), cli.truncation.min(12))))
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                cli,
                &doc,
                format!("mum_exponent r = {}\n{}", flag.mum_exponent, text),
            );
            Ok(0)
        }
        Command::Qcoord { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let flag = mum_flag(&op, cli.truncation)?;
            let q = cyops::normal_form::q_coordinate(&flag)?;
            emit(
                cli,
                &SeriesDoc::new(&q, cli.truncation),
                format!("q = {}", series_line(&q, cli.truncation)),
            );
            Ok(0)
        }
        Command::Yinv { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let flag = mum_flag(&op, cli.truncation)?;
            let data = normal_form_data(&flag)?;
            let docs: Vec<SeriesDoc> = data
                .y_invariants
                .iter()
                .map(|y| SeriesDoc::new(y, cli.truncation))
                .collect();
            let text = data
                .y_invariants
                .iter()
                .enumerate()
                .map(|(i, y)| format!("Y_{} = {}", i + 1, series_line(y, cli.truncation.min(12))))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli, &docs, text);
            Ok(0)
        }
        Command::Lambert { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let trunc = cli.truncation.max(cli.depth.min(64) as i64 + 2);
            let flag = mum_flag(&op, trunc)?;
            let data = normal_form_data(&flag)?;
            if data.y_invariants.is_empty() {
                return Err(CyError::OrderTooSmall(flag.order()));
            }
            let depth = cli.depth.min((data.y_invariants[0].truncation() - 1) as usize);
            let exp = lambert_coefficients(&data.y_invariants[0], cli.ell, depth)?;
            #[derive(serde::Serialize)]
            struct LambertOut {
                ell: u32,
                coefficients: Vec<String>,
            }
            let doc = LambertOut {
                ell: exp.ell,
                coefficients: exp.coefficients.iter().map(rat_to_text).collect(),
            };
            let text = exp
                .coefficients
                .iter()
                .enumerate()
                .map(|(d, c)| format!("N_{} = {}", d + 1, rat_to_text(c)))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli, &doc, text);
            Ok(0)
        }
        Command::Sympow { source, n } => {
            let op = resolve_source(source)?;
            let sym = cyops::annihilator::sym_power_order2(&op, *n)?;
            let theta = sym.to_theta_form();
            #[derive(serde::Serialize)]
            struct SymDoc {
                order: usize,
                theta_form: String,
            }
            emit(
                cli,
                &SymDoc { order: sym.order(), theta_form: theta.render() },
                theta.render(),
            );
            Ok(0)
        }
        Command::Symroot { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let p = cyops::galois::reconstruct_sym_root(&op, cli.truncation)?;
            #[derive(serde::Serialize)]
            struct RootDoc {
                d_form: Vec<String>,
                theta_form: String,
            }
            let doc = RootDoc {
                d_form: p.coeffs().iter().map(|c| c.render()).collect(),
                theta_form: p.to_theta_form().render(),
            };
            let text = doc.theta_form.clone();
            emit(cli, &doc, text);
            Ok(0)
        }
        Command::Galois { source } => {
            let op = resolve_source(source)?.to_theta_form();
            let verdict = galois_classify(&op, cli.truncation)?;
            let doc = cyops::report::GaloisDoc::from(&verdict);
            let text = format!(
                "ambient: {}\nclassification: {}\nevidence:\n  {}",
                verdict.ambient,
                verdict.classification.label(),
                verdict.evidence.join("\n  ")
            );
            emit(cli, &doc, text);
            Ok(0)
        }
        Command::Equiv { a, b } => {
            let oa = resolve_source(a)?.to_theta_form();
            let ob = resolve_source(b)?.to_theta_form();
            let equal = special_normal_form_equal(&oa, &ob, cli.truncation)?;
            #[derive(serde::Serialize)]
            struct EquivDoc {
                equal: bool,
                truncation: i64,
            }
            emit(
                cli,
                &EquivDoc { equal, truncation: cli.truncation },
                format!("special local normal forms equal: {equal}"),
            );
            Ok(if cli.strict && !equal { 1 } else { 0 })
        }
        Command::Corpus => {
            #[derive(serde::Serialize)]
            struct CorpusDoc {
                name: String,
                source: String,
                expression: String,
            }
            let docs: Vec<CorpusDoc> = corpus_names()
                .into_iter()
                .map(|n| CorpusDoc {
                    name: n.to_string(),
                    source: corpus_source(n).unwrap_or("").to_string(),
                    expression: corpus_get(n).expect("corpus parses").to_theta_form().render(),
                })
                .collect();
            let text = docs
                .iter()
                .map(|d| format!("{:8} {}\n         {}", d.name, d.source, d.expression))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli, &docs, text);
            Ok(0)
        }
    }
}

fn print_report_text(doc: &cyops::report::ReportDocument) {
    let name = doc.operator.name.clone().unwrap_or_else(|| "operator".into());
    println!("== {name} (order {}) ==", doc.verdict.order);
    println!("theta form: {}", doc.operator.theta_form);
    let prop = |label: &str, p: &cyops::report::PropDoc| {
        println!(
            "  ({label}) {}  {}{}",
            if p.pass { "pass" } else { "FAIL" },
            p.witness.clone().map(|w| format!("witness: {w}; ")).unwrap_or_default(),
            p.note
        );
    };
    prop("P", &doc.verdict.property_p);
    prop("M", &doc.verdict.property_m);
    prop("N", &doc.verdict.property_n);
    prop("Q", &doc.verdict.property_q);
    prop("S", &doc.verdict.property_s);
    println!("  irreducibility: {}", doc.verdict.irreducibility);
    println!(
        "  overall CY-type: {}",
        if doc.verdict.overall { "pass" } else { "FAIL" }
    );
    if let Some(nf) = &doc.normal_form {
        let head = |s: &cyops::report::SeriesDoc, k: usize| -> String {
            s.coefficients
                .iter()
                .take(k)
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        };
        println!("  q coefficients (from z^{}): {}", nf.q.valuation, head(&nf.q, 6));
        for (i, y) in nf.y_invariants.iter().enumerate() {
            println!("  Y_{} coefficients: {}", i + 1, head(y, 6));
        }
    }
    for lam in &doc.lambert {
        println!(
            "  Lambert(Y_{}, ell={}) N_d: {}",
            lam.y_index,
            lam.ell,
            lam.coefficients.iter().take(6).cloned().collect::<Vec<_>>().join(", ")
        );
    }
    if let Some(g) = &doc.galois {
        println!("  galois: {} in {}", g.classification, g.ambient);
        for e in &g.evidence {
            println!("    - {e}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
