//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use ybx_core::abd::AbdStructure;
use ybx_core::bundle::BundleData;
use ybx_core::catalog::{commuting, corpus, example, CatalogEntry};
use ybx_core::massey::check_massey;
use ybx_core::perm::Permutation;
use ybx_core::report::CheckReport;
use ybx_core::sample::rng_for;
use ybx_core::scalar::{Field, Fp, DEFAULT_PRIME};
use ybx_core::suite::{
    bundle_chain_check, bundle_checks, develop_oracle, isomorphism_oracle, mutation_entry,
    n1_closed_form, novikov_points, novikov_report, surface_check, SuiteConfig,
};
use ybx_core::surface::SquareTiledSurface;
use ybx_core::trig::{
    check_aybe, check_cybe, check_hat_hat, check_qybe_unitarity, check_residues, check_skew,
    check_strong_nondegeneracy, n1_unitarity_shadow, Hat, Mutated, QybeReading, TrigSolution,
};

const SEED: u64 = 20_240_611;
const JET_ORDER: usize = 4;

type Outcome = Result<String, String>;

struct Tally {
    checks: usize,
    failed: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failed: Vec::new(),
        }
    }

    fn add(&mut self, label: &str, c: &CheckReport) {
        self.checks += 1;
        if !c.pass {
            let backend = c.backend.as_deref().unwrap_or("-");
            self.failed.push(format!(
                "{} [{label}] {backend} {}/{}",
                c.check, c.failures, c.points
            ));
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failed.push(what.into());
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(format!("{} checks", self.checks))
        } else {
            let shown: Vec<&str> = self.failed.iter().take(5).map(String::as_str).collect();
            Err(format!(
                "{} of {} failed: {}",
                self.failed.len(),
                self.checks,
                shown.join("; ")
            ))
        }
    }
}

fn rational() -> BigRational {
    BigRational::one()
}

fn prime() -> Fp {
    Fp::new(1, DEFAULT_PRIME)
}

fn solution(e: &CatalogEntry) -> TrigSolution {
    TrigSolution::new(e.abd.clone()).expect("corpus structures are valid")
}

fn aybe_exactness(entries: &[CatalogEntry]) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        let sol = solution(e);
        t.add(&e.label, &check_aybe(&sol, &rational(), 25, SEED).unwrap());
        t.add(&e.label, &check_aybe(&sol, &prime(), 25, SEED).unwrap());
    }
    let detect = |t: &mut Tally, label: &str, sol: &TrigSolution, entry| {
        let m = Mutated { inner: sol, entry };
        let c = check_aybe(&m, &prime(), 25, SEED).unwrap();
        t.require(
            c.failures >= 24,
            format!(
                "mutation {entry:?} of [{label}] detected at {}/25",
                c.failures
            ),
        );
    };
    for (idx, e) in entries.iter().enumerate() {
        let entry = mutation_entry(e.abd.n(), SEED + idx as u64);
        detect(&mut t, &e.label, &solution(e), entry);
    }
    let ex = TrigSolution::new(example(&[2])).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    detect(&mut t, "example A={3}", &ex, (i, j, k, l));
                }
            }
        }
    }
    t.finish()
}

fn skew_symmetry(entries: &[CatalogEntry]) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        let sol = solution(e);
        t.add(&e.label, &check_skew(&sol, &rational(), 25, SEED).unwrap());
        t.add(&e.label, &check_skew(&sol, &prime(), 25, SEED).unwrap());
    }
    t.finish()
}

fn residues<F: Field>(entries: &[CatalogEntry], one: &F) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        let c = check_residues(&solution(e), one, 10, SEED, JET_ORDER).unwrap();
        t.add(&e.label, &c);
    }
    t.finish()
}

fn n1_closed() -> Outcome {
    let mut t = Tally::new();
    t.add("n=1", &n1_closed_form(&rational(), 5, SEED));
    t.add("n=1", &n1_closed_form(&prime(), 5, SEED));
    t.finish()
}

fn massey<F: Field>(entries: &[CatalogEntry], one: &F) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        t.add(&e.label, &check_massey(&e.abd, one, 10, SEED).unwrap());
    }
    t.finish()
}

fn develop(entries: &[CatalogEntry]) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        t.add(&e.label, &develop_oracle(&e.abd));
    }
    t.finish()
}

fn topology(entries: &[CatalogEntry]) -> Outcome {
    let mut t = Tally::new();
    let s = SquareTiledSurface::build(&example(&[])).unwrap();
    let b_k: Vec<(usize, usize)> = s.b_k().into_iter().collect();
    t.require(s.b() == 2, format!("example b = {}", s.b()));
    t.require(b_k == [(1, 1), (3, 1)], format!("example b_k = {b_k:?}"));
    t.require(s.euler_characteristic() == -4, "example chi");
    t.require(s.genus() == 2, "example genus");
    t.require(
        s.fillable() == [2],
        format!("example fillable = {:?}", s.fillable()),
    );
    for e in entries {
        t.add(&e.label, &surface_check(&e.abd));
    }
    for e in commuting(entries) {
        let g = SquareTiledSurface::build(&e.abd).unwrap().genus();
        t.require(g == 1, format!("[{}] commuting but genus {g}", e.label));
    }
    t.finish()
}

fn involution(entries: &[CatalogEntry]) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        let sol = solution(e);
        let hat = Hat(&sol);
        t.add(&e.label, &check_aybe(&hat, &rational(), 25, SEED).unwrap());
        t.add(&e.label, &check_aybe(&hat, &prime(), 25, SEED).unwrap());
        t.add(&e.label, &check_skew(&hat, &rational(), 25, SEED).unwrap());
        t.add(&e.label, &check_skew(&hat, &prime(), 25, SEED).unwrap());
        t.add(
            &e.label,
            &check_hat_hat(&sol, &rational(), 10, SEED).unwrap(),
        );
    }
    t.finish()
}

fn cybe<F: Field>(entries: &[CatalogEntry], one: &F) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        t.add(
            &e.label,
            &check_cybe(&solution(e), one, 25, SEED, JET_ORDER).unwrap(),
        );
    }
    t.finish()
}

fn qybe<F: Field>(entries: &[CatalogEntry], one: &F) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        let (u, q) =
            check_qybe_unitarity(&solution(e), one, 10, SEED, QybeReading::FixedU).unwrap();
        t.add(&e.label, &u);
        t.add(&e.label, &q);
    }
    let shadow = n1_unitarity_shadow(1.0, 0.7);
    t.require(shadow < 1e-9, format!("n=1 float shadow {shadow:e}"));
    t.finish()
}

fn nondegeneracy<F: Field>(entries: &[CatalogEntry], one: &F) -> Outcome {
    let mut t = Tally::new();
    for e in entries {
        t.add(
            &e.label,
            &check_strong_nondegeneracy(&solution(e), one, 10, SEED).unwrap(),
        );
    }
    t.finish()
}

fn bundles() -> Outcome {
    let mut t = Tally::new();
    let pinned = BundleData::new(vec![vec![0], vec![1]], BigRational::one()).unwrap();
    let swap = Permutation::new(vec![1, 0]).unwrap();
    let frozen = AbdStructure::new(swap.clone(), swap, [1]).unwrap();
    t.require(
        pinned.order_chain().ok() == Some(vec![0, 1]),
        "pinned order",
    );
    t.require(pinned.abd().ok() == Some(frozen), "pinned structure");
    let cfg = SuiteConfig {
        points: 25,
        seed: SEED,
        jet_order: JET_ORDER,
        ..SuiteConfig::default()
    };
    let mut rng = rng_for(SEED, 12);
    for _ in 0..100 {
        let b = BundleData::random_simple(&mut rng, 4, 3);
        let label = b.to_string();
        t.require(b.r() <= 4 && b.n() <= 3, format!("[{label}] out of range"));
        match b.abd() {
            Ok(abd) => t.require(abd.validate().is_valid(), format!("[{label}] invalid")),
            Err(err) => t.require(false, format!("[{label}] {err}")),
        }
        t.add(&label, &bundle_chain_check(&b));
        for c in bundle_checks(&b, &rational(), &cfg).unwrap() {
            t.add(&label, &c);
        }
        for c in bundle_checks(&b, &prime(), &cfg).unwrap() {
            t.add(&label, &c);
        }
    }
    t.finish()
}

fn isomorphism() -> Outcome {
    let mut t = Tally::new();
    t.add("pairs", &isomorphism_oracle(50, 6, SEED));
    t.finish()
}

fn novikov() -> Outcome {
    let c = novikov_report(&novikov_points(), 60);
    let detail = c.detail.clone().unwrap_or_default();
    if c.pass {
        Ok(detail)
    } else {
        Err(format!(
            "{} of {} points failed, {detail}",
            c.failures, c.points
        ))
    }
}

fn main() -> ExitCode {
    let entries = corpus(4);
    let (q, p) = (rational(), prime());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("AYBE exactness", Box::new(|| aybe_exactness(&entries))),
        ("skew-symmetry", Box::new(|| skew_symmetry(&entries))),
        (
            "residue structure",
            Box::new(|| both(residues(&entries, &q), residues(&entries, &p))),
        ),
        ("n=1 closed form", Box::new(n1_closed)),
        (
            "Massey tensor = eval_r",
            Box::new(|| both(massey(&entries, &q), massey(&entries, &p))),
        ),
        ("develop_rectangle oracle", Box::new(|| develop(&entries))),
        ("surface topology", Box::new(|| topology(&entries))),
        ("involution closure", Box::new(|| involution(&entries))),
        (
            "CYBE limit",
            Box::new(|| both(cybe(&entries, &q), cybe(&entries, &p))),
        ),
        (
            "QYBE and unitarity",
            Box::new(|| both(qybe(&entries, &q), qybe(&entries, &p))),
        ),
        (
            "strong nondegeneracy",
            Box::new(|| both(nondegeneracy(&entries, &q), nondegeneracy(&entries, &p))),
        ),
        ("bundle chain", Box::new(bundles)),
        ("ABD isomorphism", Box::new(isomorphism)),
        ("Novikov series", Box::new(novikov)),
    ];
    println!(
        "acceptance: {} corpus structures, seed {SEED}",
        entries.len()
    );
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("q: {x}, fp: {y}")),
        (Err(x), Ok(_)) => Err(format!("q: {x}")),
        (Ok(_), Err(y)) => Err(format!("fp: {y}")),
        (Err(x), Err(y)) => Err(format!("q: {x}; fp: {y}")),
    }
}
