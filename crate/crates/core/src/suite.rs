//! The verification driver: runs every identity check on a list of
//! structures and assembles a deterministic [`Report`].

use std::collections::BTreeSet;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::abd::AbdStructure;
use crate::bundle::BundleData;
use crate::catalog::{corpus, random_cycle, random_structure, CatalogEntry};
use crate::jet::LaurentJet;
use crate::massey::{check_massey, develop_rectangle, massey_n1_breakdown, novikov_profile};
use crate::perm::{all_permutations, Permutation};
use crate::report::{CheckReport, Report};
use crate::sample::{rng_for, sample_map};
use crate::scalar::{Backend, Field, Fp};
use crate::surface::SquareTiledSurface;
use crate::trig::{
    check_aybe, check_cybe, check_hat_hat, check_qybe_unitarity, check_residues, check_skew,
    check_strong_nondegeneracy, eval_r, Evaluator, Hat, Mutated, QybeReading, TrigError,
    TrigSolution,
};

const TASK_MUTATE: u64 = 10;
const TASK_N1: u64 = 11;
const TASK_BUNDLES: u64 = 12;
const TASK_ISO: u64 = 13;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("points must be at least 1")]
    NoPoints,
    #[error("jet order must be at least 2, got {0}")]
    JetOrder(usize),
    #[error("prime {0} is too small for jet order {1}")]
    PrimeTooSmall(u64, usize),
    #[error(transparent)]
    Trig(#[from] TrigError),
}

/// Everything that determines a suite run.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub backend: Backend,
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
    /// structures to check; the built-in corpus when `None`
    pub structures: Option<Vec<CatalogEntry>>,
    /// add 1 to one seeded coefficient of every r-matrix
    pub mutate: bool,
    pub qybe: QybeReading,
    /// random simple bundles pushed through the whole chain
    pub bundles: usize,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            backend: Backend::Rational,
            points: 5,
            seed: 0,
            jet_order: 4,
            structures: None,
            mutate: false,
            qybe: QybeReading::FixedU,
            bundles: 10,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), SuiteError> {
        if self.points == 0 {
            return Err(SuiteError::NoPoints);
        }
        if self.jet_order < 2 {
            return Err(SuiteError::JetOrder(self.jet_order));
        }
        if let Backend::Prime(p) = self.backend {
            if p <= self.jet_order as u64 + 1 {
                return Err(SuiteError::PrimeTooSmall(p, self.jet_order));
            }
        }
        Ok(())
    }

    fn entries(&self) -> Vec<CatalogEntry> {
        self.structures.clone().unwrap_or_else(|| corpus(4))
    }
}

/// Runs the whole suite in the configured backend.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    cfg.validate()?;
    match cfg.backend {
        Backend::Rational => run_in(cfg, &BigRational::one()),
        Backend::Prime(p) => run_in(cfg, &Fp::new(1, p)),
    }
}

fn run_in<F: Field>(cfg: &SuiteConfig, one: &F) -> Result<Report, SuiteError> {
    let mut report = Report::default();
    report.push(timed(cfg.timing, || {
        Ok(n1_closed_form(one, cfg.points, cfg.seed))
    })?);
    for entry in cfg.entries() {
        report.extend(structure_checks(&entry, one, cfg)?);
    }
    let mut rng = rng_for(cfg.seed, TASK_BUNDLES);
    for _ in 0..cfg.bundles {
        let b = BundleData::random_simple(&mut rng, 4, 3);
        report.extend(bundle_checks(&b, one, cfg)?);
    }
    if cfg.bundles > 0 {
        report.push(timed(cfg.timing, || {
            Ok(novikov_report(&novikov_points(), 60))
        })?);
    }
    Ok(report)
}

fn timed(
    on: bool,
    f: impl FnOnce() -> Result<CheckReport, SuiteError>,
) -> Result<CheckReport, SuiteError> {
    let start = Instant::now();
    let mut c = f()?;
    if on {
        c.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(c)
}

/// A seeded coefficient to corrupt in mutation mode.
pub fn mutation_entry(n: usize, seed: u64) -> (usize, usize, usize, usize) {
    let mut rng = rng_for(seed, TASK_MUTATE);
    let mut pick = || rng.gen_range(0..n);
    (pick(), pick(), pick(), pick())
}

/// The identity checks on one structure.
pub fn structure_checks<F: Field>(
    entry: &CatalogEntry,
    one: &F,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>, SuiteError> {
    let sol = TrigSolution::new(entry.abd.clone())?;
    let mut out = if cfg.mutate {
        let m = Mutated {
            inner: &sol,
            entry: mutation_entry(sol.abd().n(), cfg.seed),
        };
        evaluator_checks(&m, one, cfg)?
    } else {
        evaluator_checks(&sol, one, cfg)?
    };
    let t = cfg.timing;
    out.push(timed(t, || {
        Ok(check_massey(&entry.abd, one, cfg.points, cfg.seed)?)
    })?);
    out.push(timed(t, || Ok(surface_check(&entry.abd)))?);
    out.push(timed(t, || Ok(develop_oracle(&entry.abd)))?);
    for c in &mut out {
        c.structure = Some(entry.label.clone());
    }
    Ok(out)
}

/// Identity checks on any evaluator, including those of its hat.
pub fn evaluator_checks<F: Field, E>(
    e: &E,
    one: &F,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>, SuiteError>
where
    E: Evaluator<F> + Evaluator<LaurentJet<F>>,
{
    let (pts, seed, t) = (cfg.points, cfg.seed, cfg.timing);
    let mut out = vec![
        timed(t, || Ok(check_aybe(e, one, pts, seed)?))?,
        timed(t, || Ok(check_skew(e, one, pts, seed)?))?,
        timed(t, || Ok(check_residues(e, one, pts, seed, cfg.jet_order)?))?,
        timed(t, || Ok(check_cybe(e, one, pts, seed, cfg.jet_order)?))?,
    ];
    let start = Instant::now();
    let (mut unitarity, mut qybe) = check_qybe_unitarity(e, one, pts, seed, cfg.qybe)?;
    if t {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        unitarity.timing_ms = Some(ms / 2.0);
        qybe.timing_ms = Some(ms / 2.0);
    }
    out.extend([unitarity, qybe]);
    let hat = Hat(e);
    out.push(renamed(
        timed(t, || Ok(check_aybe(&hat, one, pts, seed)?))?,
        "hat_aybe",
    ));
    out.push(renamed(
        timed(t, || Ok(check_skew(&hat, one, pts, seed)?))?,
        "hat_skew",
    ));
    out.push(timed(t, || Ok(check_hat_hat(e, one, pts, seed)?))?);
    out.push(timed(t, || {
        Ok(check_strong_nondegeneracy(e, one, pts, seed)?)
    })?);
    Ok(out)
}

fn renamed(mut c: CheckReport, name: &str) -> CheckReport {
    c.check = name.to_string();
    c
}

/// Topology of the square-tiled surface: `2 − 2g − b = −n`, punctures are
/// the cycles of `[C₁, C₂]`, polygons have `4e` corners, and commuting
/// gluings give a torus.
pub fn surface_check(abd: &AbdStructure) -> CheckReport {
    let mut problems = Vec::new();
    match SquareTiledSurface::build(abd) {
        Ok(s) => {
            let n = s.n() as i64;
            if 2 - 2 * s.genus() - s.b() as i64 != -n {
                problems.push("euler characteristic".to_string());
            }
            if !s.agrees_with_commutator() {
                problems.push("punctures differ from commutator cycles".to_string());
            }
            if s.punctures()
                .iter()
                .any(|p| p.polygon_corners != 4 * p.ramification)
            {
                problems.push("polygon size".to_string());
            }
            let commute = abd.c1().compose(abd.c2()) == abd.c2().compose(abd.c1());
            if commute && s.genus() != 1 {
                problems.push(format!("commuting gluings give genus {}", s.genus()));
            }
            if !s.is_connected() {
                problems.push("disconnected".to_string());
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let mut c = CheckReport::new("surface_topology", 1, problems.len().min(1), 0);
    if !problems.is_empty() {
        c = c.with_detail(problems.join("; "));
    }
    c
}

/// `develop_rectangle(a, k, m) ⟺ a ∈ A(k, m)` for all `a` and `1 ≤ k, m < n`.
pub fn develop_oracle(abd: &AbdStructure) -> CheckReport {
    let n = abd.n();
    let s = SquareTiledSurface::build(abd).expect("corpus structures are valid");
    let (mut cases, mut failures) = (0, 0);
    for k in 1..n {
        for m in 1..n {
            let a_km: BTreeSet<usize> = abd.a_km(k, m).into_iter().collect();
            for a in 0..n {
                cases += 1;
                if develop_rectangle(&s, abd, a, k, m) != a_km.contains(&a) {
                    failures += 1;
                }
            }
        }
    }
    CheckReport::new("develop_oracle", cases, failures, 0)
}

/// `r = 1/(e^u − 1) + 1/(1 − e^{−v})` for one point, from both the
/// closed-form r-matrix and the Massey product computation.
pub fn n1_closed_form<F: Field>(one: &F, points: usize, seed: u64) -> CheckReport {
    let trivial = AbdStructure::trivial();
    let mut rng = rng_for(seed, TASK_N1);
    let mut failures = 0;
    for _ in 0..points {
        let ok = sample_map(one, &mut rng, 2, |q| {
            let (e_u, e_v) = (q[0].clone() * q[0].clone(), q[1].clone() * q[1].clone());
            let expected =
                (e_u - one.clone()).try_inv()? + (one.clone() - e_v.try_inv()?).try_inv()?;
            let r = eval_r(&trivial, &q[0], &q[1])?;
            let mp = massey_n1_breakdown(&q[0], &q[1]).ok()?.mp;
            Some(r.get(0, 0, 0, 0) == &expected && -mp == expected)
        });
        if !matches!(ok, Ok(true)) {
            failures += 1;
        }
    }
    CheckReport::new("n1_closed_form", points, failures, seed).with_backend(one.backend())
}

/// The bundle-to-structure chain, then the identity checks on its solution.
pub fn bundle_checks<F: Field>(
    b: &BundleData,
    one: &F,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>, SuiteError> {
    let label = b.to_string();
    let chain = timed(cfg.timing, || Ok(bundle_chain_check(b)))?;
    let mut out = vec![chain.clone()];
    if chain.pass {
        let sol = b.solution().expect("chain check passed");
        let (pts, seed, t) = (cfg.points, cfg.seed, cfg.timing);
        out.push(timed(t, || Ok(check_aybe(&sol, one, pts, seed)?))?);
        out.push(timed(t, || Ok(check_skew(&sol, one, pts, seed)?))?);
        out.push(timed(t, || {
            Ok(check_residues(&sol, one, pts, seed, cfg.jet_order)?)
        })?);
    }
    for c in &mut out {
        c.check = format!("bundle_{}", c.check);
        c.structure = Some(label.clone());
    }
    Ok(out)
}

/// Simplicity, a valid structure with `C₂ ∈ ⟨C₁⟩`, a genus-one surface, and
/// independence from `λ`.
pub fn bundle_chain_check(b: &BundleData) -> CheckReport {
    let mut problems = Vec::new();
    match b.abd() {
        Ok(abd) => {
            let (c1, c2) = (abd.c1(), abd.c2());
            if !(0..abd.n() as i64).any(|k| &c1.pow(k) == c2) {
                problems.push("C2 is not a power of C1".to_string());
            }
            match SquareTiledSurface::build(&abd) {
                Ok(s) if s.genus() == 1 => {}
                Ok(s) => problems.push(format!("genus {}", s.genus())),
                Err(e) => problems.push(e.to_string()),
            }
            let other = b
                .with_lambda(b.lambda() * BigRational::from_integer((-3).into()))
                .and_then(|o| o.abd());
            if other.as_ref() != Ok(&abd) {
                problems.push("structure depends on lambda".to_string());
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let mut c = CheckReport::new("chain", 1, problems.len().min(1), 0);
    if !problems.is_empty() {
        c = c.with_detail(problems.join("; "));
    }
    c
}

/// Parameter points with `Re u, Re v ≥ 1` where both geometric tails share a phase.
pub fn novikov_points() -> Vec<(Complex64, Complex64)> {
    let c = Complex64::new;
    vec![
        (c(1.0, 0.0), c(1.0, 0.0)),
        (c(1.3, 0.0), c(2.1, 0.0)),
        (c(2.5, 0.0), c(1.0, 0.0)),
        (c(1.0, 0.5), c(1.0, 0.5)),
        (c(1.5, 2.0), c(1.5, 2.0)),
    ]
}

/// Error below `10⁻¹⁰` at `L` terms and monotone in the truncation.
pub fn novikov_report(points: &[(Complex64, Complex64)], big_l: usize) -> CheckReport {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for &(u, v) in points {
        match novikov_profile(u, v, big_l) {
            Ok((errors, monotone)) => {
                let last = errors[big_l];
                worst = worst.max(last);
                if last >= 1e-10 || !monotone {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    CheckReport::new("novikov", points.len(), failures, 0)
        .with_detail(format!("max error at L={big_l}: {worst:.3e}"))
}

/// `isomorphism_to` against a search over all bijections, on seeded pairs of
/// random structures with `n ≤ max_n`: half relabelings, half mutants.
pub fn isomorphism_oracle(pairs: usize, max_n: usize, seed: u64) -> CheckReport {
    let mut rng = rng_for(seed, TASK_ISO);
    let mut failures = 0;
    for i in 0..pairs {
        let n = rng.gen_range(1..=max_n);
        let s = random_structure(&mut rng, n);
        let t = if i % 2 == 0 {
            let mut images: Vec<usize> = (0..n).collect();
            images.shuffle(&mut rng);
            let sigma = Permutation::new(images).expect("a shuffle is a bijection");
            s.relabel(&sigma).expect("relabeling keeps shapes")
        } else {
            mutant(&mut rng, &s)
        };
        let fast = s.isomorphism_to(&t).is_some();
        let slow = all_permutations(n).iter().any(|p| s.is_isomorphism(&t, p));
        if fast != slow {
            failures += 1;
        }
    }
    CheckReport::new("abd_isomorphism", pairs, failures, seed)
}

/// A nearby structure: `A` changed, `C₂` replaced, or a fresh random structure.
fn mutant<G: Rng + ?Sized>(rng: &mut G, s: &AbdStructure) -> AbdStructure {
    let n = s.n();
    match rng.gen_range(0..3) {
        0 => {
            let fixed = s.commutator().fixed_points();
            let mut a: BTreeSet<usize> = s.a().iter().copied().collect();
            if let Some(&x) = fixed.get(rng.gen_range(0..fixed.len().max(1))) {
                if !a.remove(&x) {
                    a.insert(x);
                }
            }
            match s.with_a(a) {
                Ok(t) if t.validate().is_valid() => t,
                _ => random_structure(rng, n),
            }
        }
        1 => {
            let c2 = random_cycle(rng, n);
            let a: Vec<usize> = s
                .a()
                .iter()
                .copied()
                .filter(|&x| s.c1().apply(c2.apply(x)) == c2.apply(s.c1().apply(x)))
                .collect();
            AbdStructure::new_valid(s.c1().clone(), c2, a).expect("A stays inside the fixed points")
        }
        _ => random_structure(rng, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::example;
    use crate::scalar::DEFAULT_PRIME;

    fn small(mutate: bool) -> SuiteConfig {
        SuiteConfig {
            backend: Backend::Prime(DEFAULT_PRIME),
            points: 2,
            seed: 3,
            structures: Some(corpus(3).into_iter().skip(1).take(4).collect()),
            mutate,
            bundles: 2,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        let bad = |f: fn(&mut SuiteConfig)| {
            let mut c = SuiteConfig::default();
            f(&mut c);
            c.validate()
        };
        assert_eq!(bad(|c| c.points = 0), Err(SuiteError::NoPoints));
        assert_eq!(bad(|c| c.jet_order = 1), Err(SuiteError::JetOrder(1)));
        assert!(bad(|_| {}).is_ok());
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_suite(&small(false)).unwrap();
        assert!(a.pass, "{}", a.emit(crate::report::Format::Text));
        let b = run_suite(&small(false)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mutation_is_reported() {
        let r = run_suite(&small(true)).unwrap();
        assert!(!r.pass);
        assert!(r.checks.iter().any(|c| c.check == "aybe" && !c.pass));
    }

    #[test]
    fn timing_is_opt_in() {
        let r = run_suite(&small(false)).unwrap();
        assert!(r.checks.iter().all(|c| c.timing_ms.is_none()));
        let r = run_suite(&SuiteConfig {
            timing: true,
            ..small(false)
        })
        .unwrap();
        assert!(r
            .checks
            .iter()
            .all(|c| c.timing_ms.is_some_and(|t| t >= 0.0)));
    }

    #[test]
    fn example_topology_and_oracle() {
        assert!(surface_check(&example(&[2])).pass);
        let d = develop_oracle(&example(&[2]));
        assert!(d.pass);
        assert_eq!(d.points, 4 * 9);
    }

    #[test]
    fn isomorphism_oracle_agrees() {
        assert!(isomorphism_oracle(12, 5, 1).pass);
    }

    #[test]
    fn novikov_points_pass() {
        assert!(novikov_report(&novikov_points(), 60).pass);
    }
}
