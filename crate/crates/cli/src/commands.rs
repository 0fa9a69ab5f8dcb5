use std::fs;
use std::io::Read as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use ybx_core::abd::{AbdJson, AbdStructure};
use ybx_core::bundle::BundleData;
use ybx_core::catalog::CatalogEntry;
use ybx_core::jet::LaurentJet;
use ybx_core::massey::{massey_tensor, novikov_check};
use ybx_core::perm::Permutation;
use ybx_core::report::{CheckReport, Format, Report};
use ybx_core::sample::{rng_for, sample_map};
use ybx_core::scalar::{to_text, Backend, Field, Fp};
use ybx_core::suite::{
    bundle_chain_check, bundle_checks, isomorphism_oracle, mutation_entry, novikov_points,
    novikov_report, run_suite, surface_check, SuiteConfig,
};
use ybx_core::surface::SquareTiledSurface;
use ybx_core::trig::{
    check_aybe, check_cybe, check_hat_hat, check_qybe_unitarity, check_residues, check_skew,
    eval_r, Evaluator, Hat, Mutated, QybeReading, TrigSolution,
};

use crate::args::{Cli, Command, Mutation, Reading, StructureArgs};

const TASK_POINT: u64 = 14;

/// What to print and whether it counts as success.
pub struct Output {
    pub text: String,
    pub pass: bool,
}

impl Output {
    fn report(r: &Report, format: Format) -> Self {
        Output {
            text: r.emit(format),
            pass: r.pass,
        }
    }

    fn single(c: CheckReport, format: Format) -> Self {
        let pass = c.pass;
        let text = match format {
            Format::Json => serde_json::to_string(&c).expect("report serializes"),
            Format::Text => Report::new(vec![c]).emit(Format::Text),
        };
        Output { text, pass }
    }

    fn value(v: Value, pass: bool, format: Format) -> Self {
        let text = match format {
            Format::Json => serde_json::to_string_pretty(&v).expect("json value"),
            Format::Text => text_lines(&v, ""),
        };
        Output { text, pass }
    }
}

fn text_lines(v: &Value, prefix: &str) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                match x {
                    Value::Object(_) => text_lines(x, &key),
                    _ => format!("{key}: {}\n", scalar_text(x)),
                }
            })
            .collect(),
        other => format!("{}\n", scalar_text(other)),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => xs
            .iter()
            .map(|x| format!("\n  {}", serde_json::to_string(x).expect("json value")))
            .collect(),
        other => other.to_string(),
    }
}

/// Runs `$body` with `$one` bound to the unit of the selected field.
macro_rules! with_field {
    ($backend:expr, |$one:ident| $body:expr) => {
        match $backend {
            Backend::Rational => {
                let $one = &BigRational::one();
                $body
            }
            Backend::Prime(p) => {
                let $one = &Fp::new(1, p);
                $body
            }
        }
    };
}

pub fn run(cli: &Cli) -> Result<Output> {
    let cfg = config(cli)?;
    let format = cli.format;
    match &cli.command {
        Command::Validate { structure, perm } => {
            if let Some(text) = perm {
                let n = structure.n.unwrap_or_else(|| largest_point(text));
                let p = Permutation::parse_cycles(text, n)?;
                let v = json!({
                    "n": n,
                    "images": p.images(),
                    "cycles": p.to_cycle_string(),
                    "transitive": p.is_transitive_cycle(),
                });
                return Ok(Output::value(v, true, format));
            }
            let abd = load_structure(structure)?;
            let report = abd.validate();
            let v = json!({
                "structure": abd.to_string(),
                "valid": report.is_valid(),
                "violations": report.violations,
            });
            Ok(Output::value(v, report.is_valid(), format))
        }
        Command::Surface { structure } => {
            let abd = valid_structure(structure)?;
            let s = SquareTiledSurface::build(&abd)?;
            let check = surface_check(&abd);
            let mut v = serde_json::to_value(s.summary())?;
            v["structure"] = json!(abd.to_string());
            Ok(Output::value(v, check.pass, format))
        }
        Command::BuildR { structure, qu, qv } => {
            let abd = valid_structure(structure)?;
            with_field!(cli.field, |one| build_r(
                &abd, one, qu, qv, cli.seed, format
            ))
        }
        Command::CheckAybe { structure }
        | Command::CheckSkew { structure }
        | Command::Residues { structure }
        | Command::Cybe { structure }
        | Command::Qybe { structure, .. }
        | Command::Hat { structure } => {
            let abd = valid_structure(structure)?;
            let sol = TrigSolution::new(abd.clone())?;
            let mut cfg = cfg;
            if let Command::Qybe { reading, .. } = &cli.command {
                cfg.qybe = qybe_reading(*reading);
            }
            let checks = match cli.mutate {
                Some(Mutation::OneCoefficient) => {
                    let m = Mutated {
                        inner: &sol,
                        entry: mutation_entry(abd.n(), cli.seed),
                    };
                    with_field!(cli.field, |one| single_checks(&cli.command, &m, one, &cfg))?
                }
                None => with_field!(cli.field, |one| single_checks(
                    &cli.command,
                    &sol,
                    one,
                    &cfg
                ))?,
            };
            let checks: Vec<CheckReport> = checks
                .into_iter()
                .map(|c| c.with_structure(abd.to_string()))
                .collect();
            if checks.len() == 1 {
                let c = checks.into_iter().next().expect("one check");
                Ok(Output::single(c, format))
            } else {
                Ok(Output::report(&Report::new(checks), format))
            }
        }
        Command::Massey {
            structure,
            point_seed,
            compare,
        } => {
            let abd = valid_structure(structure)?;
            let seed = point_seed.unwrap_or(cli.seed);
            with_field!(cli.field, |one| massey(&abd, one, seed, *compare, format))
        }
        Command::Novikov { u, v, terms } => novikov(u.as_deref(), v.as_deref(), *terms, format),
        Command::Bundle {
            input,
            emit_abd,
            check,
        } => {
            let b: BundleData = serde_json::from_str(&read_input(input)?)
                .with_context(|| format!("reading bundle from {}", input.display()))?;
            bundle(&b, *emit_abd, *check, &cfg, format)
        }
        Command::AbdIso {
            abd,
            other,
            pairs,
            max_n,
        } => match (abd, other) {
            (Some(a), Some(b)) => {
                let (x, y) = (read_structure(a)?, read_structure(b)?);
                let iso = x.isomorphism_to(&y);
                let v = json!({
                    "isomorphic": iso.is_some(),
                    "sigma": iso.map(|s| s.to_cycle_string()),
                });
                Ok(Output::value(v, true, format))
            }
            _ => Ok(Output::single(
                isomorphism_oracle(*pairs, *max_n, cli.seed),
                format,
            )),
        },
        Command::Suite {
            structures,
            max_n,
            reading,
            bundles,
        } => {
            let mut cfg = cfg;
            cfg.qybe = qybe_reading(*reading);
            cfg.bundles = *bundles;
            cfg.structures = if structures.is_empty() {
                Some(ybx_core::catalog::corpus(*max_n))
            } else {
                let entries = structures
                    .iter()
                    .map(|p| {
                        let abd = read_structure(p)?;
                        ensure_valid(&abd)?;
                        Ok(CatalogEntry {
                            label: abd.to_string(),
                            abd,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(entries)
            };
            let report = run_suite(&cfg)?;
            Ok(Output::report(&report, format))
        }
    }
}

fn config(cli: &Cli) -> Result<SuiteConfig> {
    let cfg = SuiteConfig {
        backend: cli.field,
        points: cli.points,
        seed: cli.seed,
        jet_order: cli.jet_order,
        structures: None,
        mutate: cli.mutate.is_some(),
        qybe: QybeReading::FixedU,
        bundles: 0,
        timing: cli.timing,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn qybe_reading(r: Reading) -> QybeReading {
    match r {
        Reading::FixedU => QybeReading::FixedU,
        Reading::FixedV => QybeReading::FixedV,
    }
}

fn single_checks<F: Field, E>(
    cmd: &Command,
    e: &E,
    one: &F,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>>
where
    E: Evaluator<F> + Evaluator<LaurentJet<F>>,
{
    let (pts, seed, order) = (cfg.points, cfg.seed, cfg.jet_order);
    let renamed = |mut c: CheckReport, name: &str| {
        c.check = name.to_string();
        c
    };
    Ok(match cmd {
        Command::CheckAybe { .. } => vec![check_aybe(e, one, pts, seed)?],
        Command::CheckSkew { .. } => vec![check_skew(e, one, pts, seed)?],
        Command::Residues { .. } => vec![check_residues(e, one, pts, seed, order)?],
        Command::Cybe { .. } => vec![check_cybe(e, one, pts, seed, order)?],
        Command::Qybe { .. } => {
            let (u, q) = check_qybe_unitarity(e, one, pts, seed, cfg.qybe)?;
            vec![u, q]
        }
        Command::Hat { .. } => {
            let hat = Hat(e);
            vec![
                renamed(check_aybe(&hat, one, pts, seed)?, "hat_aybe"),
                renamed(check_skew(&hat, one, pts, seed)?, "hat_skew"),
                check_hat_hat(e, one, pts, seed)?,
            ]
        }
        _ => unreachable!("not a single-structure check"),
    })
}

fn build_r<F: Field>(
    abd: &AbdStructure,
    one: &F,
    qu: &Option<String>,
    qv: &Option<String>,
    seed: u64,
    format: Format,
) -> Result<Output> {
    let (qu, qv, r) = match (qu, qv) {
        (Some(a), Some(b)) => {
            let (qu, qv) = (one.parse_like(a)?, one.parse_like(b)?);
            let Some(r) = eval_r(abd, &qu, &qv) else {
                bail!("({a}, {b}) is a pole of r");
            };
            (qu, qv, r)
        }
        _ => {
            let mut rng = rng_for(seed, TASK_POINT);
            sample_map(one, &mut rng, 2, |q| {
                Some((q[0].clone(), q[1].clone(), eval_r(abd, &q[0], &q[1])?))
            })?
        }
    };
    let v = json!({
        "structure": abd.to_string(),
        "field": one.backend().to_string(),
        "qu": to_text(&qu),
        "qv": to_text(&qv),
        "nnz": r.nnz(),
        "entries": r.to_entries(),
    });
    Ok(Output::value(v, true, format))
}

fn massey<F: Field>(
    abd: &AbdStructure,
    one: &F,
    seed: u64,
    compare: bool,
    format: Format,
) -> Result<Output> {
    let s = SquareTiledSurface::build(abd)?;
    let mut rng = rng_for(seed, TASK_POINT);
    let (qu, qv, m, r) = sample_map(one, &mut rng, 2, |q| {
        let m = massey_tensor(&s, abd, &q[0], &q[1]).ok()?;
        let r = eval_r(abd, &q[0], &q[1])?;
        Some((q[0].clone(), q[1].clone(), m, r))
    })?;
    let terms: Vec<Value> = m
        .terms
        .iter()
        .map(|t| {
            json!({
                "family": t.family,
                "mu3": to_text(&t.mu3),
                "h2_term": to_text(&t.h2_term),
                "h1_term": to_text(&t.h1_term),
                "mp": to_text(&t.mp),
                "coefficient": to_text(&t.coefficient()),
            })
        })
        .collect();
    let mut v = json!({
        "structure": abd.to_string(),
        "field": one.backend().to_string(),
        "qu": to_text(&qu),
        "qv": to_text(&qv),
        "terms": terms,
    });
    let mut pass = true;
    if compare {
        pass = m.tensor == r;
        v["equal_to_r"] = json!(pass);
        if !pass {
            v["difference"] = json!((&m.tensor - &r).to_entries());
        }
    }
    Ok(Output::value(v, pass, format))
}

fn novikov(u: Option<&str>, v: Option<&str>, terms: usize, format: Format) -> Result<Output> {
    let points = match (u, v) {
        (Some(u), Some(v)) => vec![(parse_complex(u)?, parse_complex(v)?)],
        _ => novikov_points(),
    };
    let mut rows = Vec::new();
    for (u, v) in &points {
        let r = novikov_check(*u, *v, terms)?;
        rows.push(json!({
            "u": u.to_string(),
            "v": v.to_string(),
            "partial": r.partial,
            "closed": r.closed,
            "error": r.error,
        }));
    }
    let check = novikov_report(&points, terms);
    let value = json!({
        "terms": terms,
        "points": rows,
        "pass": check.pass,
    });
    Ok(Output::value(value, check.pass, format))
}

fn parse_complex(text: &str) -> Result<Complex64> {
    text.parse::<Complex64>()
        .map_err(|e| anyhow::anyhow!("invalid complex number {text:?}: {e}"))
}

fn bundle(
    b: &BundleData,
    emit_abd: bool,
    check: bool,
    cfg: &SuiteConfig,
    format: Format,
) -> Result<Output> {
    let violation = b.simplicity();
    let mut v = json!({
        "bundle": b.to_string(),
        "type": b.type_check(),
        "simple": violation.is_none(),
    });
    let mut pass = violation.is_none();
    if let Some(bad) = violation {
        v["violation"] = json!(bad.to_string());
        return Ok(Output::value(v, false, format));
    }
    let chain = b.order_chain()?;
    v["chain"] = json!(chain.iter().map(|i| i + 1).collect::<Vec<_>>());
    let abd = b.abd()?;
    if emit_abd {
        v["abd"] = serde_json::to_value(AbdJson::from(&abd))?;
        v["abd_cycles"] = json!(abd.to_string());
    }
    if check {
        let mut checks = vec![bundle_chain_check(b)];
        checks.extend(with_field!(cfg.backend, |one| bundle_checks(b, one, cfg))?);
        pass = checks.iter().all(|c| c.pass);
        v["checks"] = serde_json::to_value(&checks)?;
    }
    v["pass"] = json!(pass);
    Ok(Output::value(v, pass, format))
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_structure(path: &Path) -> Result<AbdStructure> {
    let j: AbdJson = serde_json::from_str(&read_input(path)?)
        .with_context(|| format!("parsing structure in {}", path.display()))?;
    Ok(AbdStructure::try_from(j)?)
}

fn load_structure(args: &StructureArgs) -> Result<AbdStructure> {
    if let Some(path) = &args.abd {
        return read_structure(path);
    }
    let (Some(c1), Some(c2)) = (&args.c1, &args.c2) else {
        bail!("a structure needs --abd <file> or --c1 and --c2");
    };
    let n = args
        .n
        .unwrap_or_else(|| largest_point(c1).max(largest_point(c2)));
    let mut a = Vec::with_capacity(args.a.len());
    for &x in &args.a {
        if x == 0 || x > n {
            bail!("element {x} of A is outside 1..={n}");
        }
        a.push(x - 1);
    }
    Ok(AbdStructure::new(
        Permutation::parse_cycles(c1, n)?,
        Permutation::parse_cycles(c2, n)?,
        a,
    )?)
}

fn ensure_valid(abd: &AbdStructure) -> Result<()> {
    let report = abd.validate();
    if !report.is_valid() {
        bail!("{abd} is not a valid structure: {report}");
    }
    Ok(())
}

fn valid_structure(args: &StructureArgs) -> Result<AbdStructure> {
    let abd = load_structure(args)?;
    ensure_valid(&abd)?;
    Ok(abd)
}

/// The largest number appearing in cycle notation, at least 1.
fn largest_point(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse().ok())
        .max()
        .unwrap_or(1)
}
