//! The trigonometric r-matrix of an ABD structure and checks of its identities.
//!
//! Evaluators take `q_u = e^{u/2n}` and `q_v = e^{v/2n}`, so that
//! `e^{u/n} = q_u²` and `e^u = q_u^{2n}`. Adding parameters multiplies the
//! `q`'s; negating one inverts it.

use num_bigint::BigInt;
use thiserror::Error;

use crate::abd::{AbdError, AbdStructure};
use crate::jet::{JetError, LaurentJet};
use crate::report::CheckReport;
use crate::sample::{rng_for, sample_map, SampleError};
use crate::scalar::{Field, Ring};
use crate::tensor::{aybe_residual_nnz, exact_nnz, Matrix, Slot, Tensor2, Tensor3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrigError {
    #[error(transparent)]
    Abd(#[from] AbdError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("evaluation point is a pole")]
    Pole,
    #[error("pole of order {0} exceeds the simple-pole bound")]
    ValuationBelowFloor(i64),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("jet order must be at least 2, got {0}")]
    JetOrder(usize),
}

/// A function `(q_u, q_v) ↦ r ∈ Mat_n ⊗ Mat_n`, `None` at poles.
pub trait Evaluator<R: Ring> {
    fn n(&self) -> usize;
    fn eval(&self, qu: &R, qv: &R) -> Option<Tensor2<R>>;
}

impl<R: Ring, E: Evaluator<R> + ?Sized> Evaluator<R> for &E {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, qu: &R, qv: &R) -> Option<Tensor2<R>> {
        (**self).eval(qu, qv)
    }
}

/// `q^0, q^2, …, q^{2(n-1)}` and their inverses.
fn even_powers<R: Ring>(q: &R, n: usize) -> Option<(Vec<R>, Vec<R>)> {
    let q2 = q.clone() * q.clone();
    let q2_inv = q2.try_inv()?;
    let mut up = vec![q.one_like()];
    let mut down = vec![q.one_like()];
    for k in 1..n {
        up.push(up[k - 1].clone() * q2.clone());
        down.push(down[k - 1].clone() * q2_inv.clone());
    }
    Some((up, down))
}

/// The r-matrix of `abd` at `(q_u, q_v)`.
pub fn eval_r<R: Ring>(abd: &AbdStructure, qu: &R, qv: &R) -> Option<Tensor2<R>> {
    let n = abd.n();
    let one = qu.one_like();
    let (eu_k, eu_k_inv) = even_powers(qu, n)?;
    let (ev_m, ev_m_inv) = even_powers(qv, n)?;
    let e_u = eu_k[n - 1].clone() * qu.clone() * qu.clone();
    let e_v = ev_m[n - 1].clone() * qv.clone() * qv.clone();
    let inv_u = (e_u - one.clone()).try_inv()?;
    let inv_v = (e_v.clone() - one.clone()).try_inv()?;

    let mut t = Tensor2::zeros(n, &one);
    let diag = inv_u.clone() + e_v * inv_v.clone();
    for i in 0..n {
        t.add_at(i, i, i, i, diag.clone());
        for k in 1..n {
            let c = abd.c1().apply_pow(i, k as i64);
            t.add_at(c, c, i, i, eu_k[k].clone() * inv_u.clone());
        }
        for m in 1..n {
            let c = abd.c2().apply_pow(i, m as i64);
            t.add_at(i, c, c, i, ev_m[m].clone() * inv_v.clone());
        }
    }
    for k in 1..n {
        for m in 1..n {
            for a in abd.a_km(k, m) {
                let c2a = abd.translate(a, 0, m as i64);
                let c1a = abd.translate(a, k as i64, 0);
                let c12a = abd.translate(a, k as i64, m as i64);
                let w = eu_k[k].clone() * ev_m[m].clone();
                let w_inv = eu_k_inv[k].clone() * ev_m_inv[m].clone();
                t.add_at(c2a, a, c1a, c12a, w_inv);
                t.add_at(c1a, c12a, c2a, a, -w);
            }
        }
    }
    Some(t)
}

/// The solution attached to a valid ABD structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigSolution {
    abd: AbdStructure,
}

impl TrigSolution {
    pub fn new(abd: AbdStructure) -> Result<Self, TrigError> {
        Ok(TrigSolution {
            abd: abd.validated()?,
        })
    }

    pub fn abd(&self) -> &AbdStructure {
        &self.abd
    }
}

impl<R: Ring> Evaluator<R> for TrigSolution {
    fn n(&self) -> usize {
        self.abd.n()
    }
    fn eval(&self, qu: &R, qv: &R) -> Option<Tensor2<R>> {
        eval_r(&self.abd, qu, qv)
    }
}

/// `(u, v) ↦ r(v, u)ᵗ · P`.
#[derive(Debug, Clone)]
pub struct Hat<E>(pub E);

impl<R: Ring, E: Evaluator<R>> Evaluator<R> for Hat<E> {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn eval(&self, qu: &R, qv: &R) -> Option<Tensor2<R>> {
        Some(self.0.eval(qv, qu)?.transpose().mul_transposition())
    }
}

/// Adds `1` to a single coefficient of the wrapped evaluator.
#[derive(Debug, Clone)]
pub struct Mutated<E> {
    pub inner: E,
    pub entry: (usize, usize, usize, usize),
}

impl<R: Ring, E: Evaluator<R>> Evaluator<R> for Mutated<E> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn eval(&self, qu: &R, qv: &R) -> Option<Tensor2<R>> {
        let mut r = self.inner.eval(qu, qv)?;
        let (i, j, k, l) = self.entry;
        r.add_at(i, j, k, l, qu.one_like());
        Some(r)
    }
}

/// `r ↦ (φ⊗φ) r (φ⊗φ)⁻¹` for a constant invertible `φ`.
#[derive(Debug, Clone)]
pub struct Gauged<F: Field, E> {
    inner: E,
    phi2: Tensor2<F>,
    phi2_inv: Tensor2<F>,
}

pub fn gauge_transform<F: Field, E: Evaluator<F>>(
    inner: E,
    phi: &Matrix<F>,
) -> Result<Gauged<F, E>, TrigError> {
    let inv = phi.inverse().map_err(|_| TrigError::SingularGauge)?;
    Ok(Gauged {
        phi2: Tensor2::kron(phi, phi),
        phi2_inv: Tensor2::kron(&inv, &inv),
        inner,
    })
}

impl<F: Field, E: Evaluator<F>> Evaluator<F> for Gauged<F, E> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn eval(&self, qu: &F, qv: &F) -> Option<Tensor2<F>> {
        let r = self.inner.eval(qu, qv)?;
        Some(&(&self.phi2 * &r) * &self.phi2_inv)
    }
}

const TASK_AYBE: u64 = 1;
const TASK_SKEW: u64 = 2;
const TASK_NONDEG: u64 = 3;
const TASK_RESIDUES: u64 = 4;
const TASK_CYBE: u64 = 5;
const TASK_QYBE: u64 = 6;
const TASK_UNITARITY: u64 = 7;
const TASK_HAT: u64 = 8;

fn finish(
    name: &str,
    points: usize,
    failures: usize,
    seed: u64,
    max_nnz: usize,
    backend: impl ToString,
) -> CheckReport {
    let mut c = CheckReport::new(name, points, failures, seed).with_backend(backend);
    if failures > 0 {
        c = c.with_detail(format!("max nonzero residual entries {max_nnz}"));
    }
    c
}

/// The six evaluations entering the associative Yang-Baxter equation.
fn residual_nnz_at<F: Field, E: Evaluator<F>>(e: &E, q: &[F]) -> Option<usize> {
    let (qu, qu2, qv, qv2) = (&q[0], &q[1], &q[2], &q[3]);
    let quu = qu.clone() * qu2.clone();
    let qvv = qv.clone() * qv2.clone();
    let a = e.eval(&qu2.try_inv()?, qv)?;
    let b = e.eval(&quu, &qvv)?;
    let c = e.eval(&quu, qv2)?;
    let d = e.eval(qu, qv)?;
    let f = e.eval(qu, &qvv)?;
    let g = e.eval(qu2, qv2)?;
    Some(aybe_residual_nnz([&a, &b, &c, &d, &f, &g]))
}

/// `r¹²(−u′,v) r¹³(u+u′,v+v′) − r²³(u+u′,v′) r¹²(u,v) + r¹³(u,v+v′) r²³(u′,v′) = 0` at seeded points.
pub fn check_aybe<F: Field, E: Evaluator<F>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
) -> Result<CheckReport, TrigError> {
    let mut rng = rng_for(seed, TASK_AYBE);
    let (mut failures, mut max_nnz) = (0, 0);
    for _ in 0..points {
        let nnz = sample_map(one, &mut rng, 4, |q| residual_nnz_at(e, q))?;
        if nnz > 0 {
            failures += 1;
            max_nnz = max_nnz.max(nnz);
        }
    }
    Ok(finish(
        "aybe",
        points,
        failures,
        seed,
        max_nnz,
        one.backend(),
    ))
}

/// `r²¹(−u,−v) + r(u,v) = 0` at seeded points.
pub fn check_skew<F: Field, E: Evaluator<F>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
) -> Result<CheckReport, TrigError> {
    let mut rng = rng_for(seed, TASK_SKEW);
    let (mut failures, mut max_nnz) = (0, 0);
    for _ in 0..points {
        let res = sample_map(one, &mut rng, 2, |q| {
            let r = e.eval(&q[0], &q[1])?;
            let s = e.eval(&q[0].try_inv()?, &q[1].try_inv()?)?;
            Some(&s.flip() + &r)
        })?;
        let nnz = res.nnz();
        if nnz > 0 {
            failures += 1;
            max_nnz = max_nnz.max(nnz);
        }
    }
    Ok(finish(
        "skew",
        points,
        failures,
        seed,
        max_nnz,
        one.backend(),
    ))
}

/// `hat(hat(r)) = r²¹` at seeded points.
pub fn check_hat_hat<F: Field, E: Evaluator<F>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
) -> Result<CheckReport, TrigError> {
    let mut rng = rng_for(seed, TASK_HAT);
    let hh = Hat(Hat(e));
    let mut failures = 0;
    for _ in 0..points {
        let (a, b) = sample_map(one, &mut rng, 2, |q| {
            Some((hh.eval(&q[0], &q[1])?, e.eval(&q[0], &q[1])?))
        })?;
        if a != b.flip() {
            failures += 1;
        }
    }
    Ok(finish(
        "hat_hat_flip",
        points,
        failures,
        seed,
        0,
        one.backend(),
    ))
}

/// Both `r` and `rᵗ·P` are invertible as `n² × n²` matrices.
pub fn check_strong_nondegeneracy<F: Field, E: Evaluator<F>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
) -> Result<CheckReport, TrigError> {
    let mut rng = rng_for(seed, TASK_NONDEG);
    let mut failures = 0;
    for _ in 0..points {
        let r = sample_map(one, &mut rng, 2, |q| e.eval(&q[0], &q[1]))?;
        let ok = r.is_invertible() && r.transpose().mul_transposition().is_invertible();
        if !ok {
            failures += 1;
        }
    }
    Ok(finish(
        "strong_nondegeneracy",
        points,
        failures,
        seed,
        0,
        one.backend(),
    ))
}

/// The variable expanded as a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

/// Leading Laurent data of `r` in one variable at a fixed value of the other.
#[derive(Debug, Clone, PartialEq)]
pub struct JetExpansion<F: Field> {
    /// lowest exponent over all entries
    pub valuation: i64,
    pub residue: Tensor2<F>,
    pub constant: Tensor2<F>,
}

/// Expands `r` in `var` around `0` with the other `q` fixed at `at_other`.
pub fn expand<F: Field, E: Evaluator<LaurentJet<F>>>(
    e: &E,
    var: Var,
    at_other: &F,
    order: usize,
) -> Result<JetExpansion<F>, TrigError> {
    if order < 2 {
        return Err(TrigError::JetOrder(order));
    }
    let n = e.n();
    let one = at_other.one_like();
    let scale = one
        .ratio_like(1, 2 * n as i64)
        .ok_or(JetError::FactorialNotInvertible(2 * n))?;
    let q = LaurentJet::exp(&scale, order)?;
    let other = LaurentJet::constant(at_other.clone());
    let r = match var {
        Var::U => e.eval(&q, &other),
        Var::V => e.eval(&other, &q),
    }
    .ok_or(TrigError::Pole)?;
    let mut residue = Tensor2::zeros(n, &one);
    let mut constant = Tensor2::zeros(n, &one);
    let mut valuation = i64::MAX;
    for ((i, j, k, l), c) in r.nonzeros() {
        if let Some(v) = c.valuation() {
            valuation = valuation.min(v);
        }
        residue.set(i, j, k, l, c.coeff(-1)?);
        constant.set(i, j, k, l, c.coeff(0)?);
    }
    if valuation < -1 {
        return Err(TrigError::ValuationBelowFloor(valuation));
    }
    Ok(JetExpansion {
        valuation,
        residue,
        constant,
    })
}

/// Simple poles with residue `1⊗1` at `u = 0` and `P` at `v = 0`.
pub fn check_residues<F: Field, E: Evaluator<LaurentJet<F>>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
    order: usize,
) -> Result<CheckReport, TrigError> {
    let n = e.n();
    let mut rng = rng_for(seed, TASK_RESIDUES);
    let id = Tensor2::identity(n, one);
    let p = Tensor2::transposition(n, one);
    let mut failures = 0;
    for _ in 0..points {
        let (x, y) = sample_map(one, &mut rng, 2, |q| {
            let x = expand(e, Var::U, &q[1], order).ok()?;
            let y = expand(e, Var::V, &q[0], order).ok()?;
            Some((x, y))
        })?;
        if x.valuation != -1 || y.valuation != -1 || x.residue != id || y.residue != p {
            failures += 1;
        }
    }
    Ok(finish("residues", points, failures, seed, 0, one.backend()))
}

/// `r₀(v)`, the `u⁰` coefficient of `r(u, v)` at `u = 0`.
pub fn r0<F: Field, E: Evaluator<LaurentJet<F>>>(
    e: &E,
    qv: &F,
    order: usize,
) -> Result<Tensor2<F>, TrigError> {
    Ok(expand(e, Var::U, qv, order)?.constant)
}

/// `[a¹², b¹³] + [a¹², c²³] + [b¹³, c²³]`.
pub fn cybe_residual<R: Ring>(a: &Tensor2<R>, b: &Tensor2<R>, c: &Tensor2<R>) -> Tensor3<R> {
    let (a12, b13, c23) = (a.embed(Slot::S12), b.embed(Slot::S13), c.embed(Slot::S23));
    &(&a12.commutator(&b13) + &a12.commutator(&c23)) + &b13.commutator(&c23)
}

fn cybe_scaled<R: Ring>(t: [&Tensor2<R>; 3], s: [R; 3]) -> usize {
    let [a, b, c] = t;
    let a12 = |x: &R| a.scale(x).embed(Slot::S12);
    let b13 = b.embed(Slot::S13);
    let c23 = c.embed(Slot::S23);
    let res = &(&a12(&s[2]).commutator(&b13) + &a12(&s[1]).commutator(&c23))
        + &b.scale(&s[0]).embed(Slot::S13).commutator(&c23);
    res.nnz()
}

/// The classical Yang-Baxter equation for `r̄₀ = (pr⊗pr) r₀` at `(v, v+v′, v′)`.
pub fn check_cybe<F: Field, E: Evaluator<LaurentJet<F>>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
    order: usize,
) -> Result<CheckReport, TrigError> {
    let mut rng = rng_for(seed, TASK_CYBE);
    let (mut failures, mut max_nnz) = (0, 0);
    for _ in 0..points {
        let nnz = sample_map(one, &mut rng, 2, |q| {
            let qvv = q[0].clone() * q[1].clone();
            let a = r0(e, &q[0], order).ok()?.pr_pr().ok()?;
            let b = r0(e, &qvv, order).ok()?.pr_pr().ok()?;
            let c = r0(e, &q[1], order).ok()?.pr_pr().ok()?;
            Some(exact_nnz(
                [&a, &b, &c],
                cybe_scaled::<F>,
                cybe_scaled::<BigInt>,
            ))
        })?;
        if nnz > 0 {
            failures += 1;
            max_nnz = max_nnz.max(nnz);
        }
    }
    Ok(finish(
        "cybe",
        points,
        failures,
        seed,
        max_nnz,
        one.backend(),
    ))
}

/// `σ(u,v) = s_u s_v / (s_u + s_v)` with `s_x = e^{x/2} − e^{−x/2} = q_x^n − q_x^{−n}`.
pub fn sigma<F: Field>(n: usize, qu: &F, qv: &F) -> Option<F> {
    let s = |q: &F| -> Option<F> {
        let p = q.pow_i(n as i64)?;
        Some(p.clone() - p.try_inv()?)
    };
    let (su, sv) = (s(qu)?, s(qv)?);
    Some(su.clone() * sv.clone() * (su + sv).try_inv()?)
}

/// `R(u,v) = σ(u,v) r(u,v)`.
pub fn big_r<F: Field, E: Evaluator<F>>(e: &E, qu: &F, qv: &F) -> Option<Tensor2<F>> {
    let s = sigma(e.n(), qu, qv)?;
    Some(e.eval(qu, qv)?.scale(&s))
}

/// Which arguments the quantum Yang-Baxter check holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QybeReading {
    /// `R¹²(u,v) R¹³(u,v+v′) R²³(u,v′) = R²³(u,v′) R¹³(u,v+v′) R¹²(u,v)`
    #[default]
    FixedU,
    /// `R¹²(u,v) R¹³(u+u′,v) R²³(u′,v) = R²³(u′,v) R¹³(u+u′,v) R¹²(u,v)`
    FixedV,
}

fn unitarity_scaled<R: Ring>(t: [&Tensor2<R>; 2], s: [R; 2]) -> usize {
    let id = Tensor2::identity(t[0].n(), &(s[0].clone() * s[1].clone()));
    (&(t[0] * t[1]) - &id).nnz()
}

fn qybe_scaled<R: Ring>(t: [&Tensor2<R>; 3], _s: [R; 3]) -> usize {
    let (a, b, c) = (
        t[0].embed(Slot::S12),
        t[1].embed(Slot::S13),
        t[2].embed(Slot::S23),
    );
    (&(&(&a * &b) * &c) - &(&(&c * &b) * &a)).nnz()
}

/// Unitarity `R(u,v) R²¹(u,−v) = 1⊗1` and the quantum Yang-Baxter equation.
pub fn check_qybe_unitarity<F: Field, E: Evaluator<F>>(
    e: &E,
    one: &F,
    points: usize,
    seed: u64,
    reading: QybeReading,
) -> Result<(CheckReport, CheckReport), TrigError> {
    let mut rng = rng_for(seed, TASK_UNITARITY);
    let (mut u_fail, mut u_nnz) = (0, 0);
    for _ in 0..points {
        let nnz = sample_map(one, &mut rng, 2, |q| {
            let a = big_r(e, &q[0], &q[1])?;
            let b = big_r(e, &q[0], &q[1].try_inv()?)?.flip();
            Some(exact_nnz(
                [&a, &b],
                unitarity_scaled::<F>,
                unitarity_scaled::<BigInt>,
            ))
        })?;
        if nnz > 0 {
            u_fail += 1;
            u_nnz = u_nnz.max(nnz);
        }
    }
    let mut rng = rng_for(seed, TASK_QYBE);
    let (mut q_fail, mut q_nnz) = (0, 0);
    for _ in 0..points {
        let nnz = sample_map(one, &mut rng, 3, |q| {
            let (x, y, z) = (&q[0], &q[1], &q[2]);
            let (r12, r13, r23) = match reading {
                QybeReading::FixedU => (
                    big_r(e, x, y)?,
                    big_r(e, x, &(y.clone() * z.clone()))?,
                    big_r(e, x, z)?,
                ),
                QybeReading::FixedV => (
                    big_r(e, x, z)?,
                    big_r(e, &(x.clone() * y.clone()), z)?,
                    big_r(e, y, z)?,
                ),
            };
            Some(exact_nnz(
                [&r12, &r13, &r23],
                qybe_scaled::<F>,
                qybe_scaled::<BigInt>,
            ))
        })?;
        if nnz > 0 {
            q_fail += 1;
            q_nnz = q_nnz.max(nnz);
        }
    }
    let name = match reading {
        QybeReading::FixedU => "qybe",
        QybeReading::FixedV => "qybe_fixed_v",
    };
    Ok((
        finish("unitarity", points, u_fail, seed, u_nnz, one.backend()),
        finish(name, points, q_fail, seed, q_nnz, one.backend()),
    ))
}

/// `|R(u,v) R(u,−v) − 1|` for `n = 1` in floating point.
pub fn n1_unitarity_shadow(u: f64, v: f64) -> f64 {
    let r = |u: f64, v: f64| 1.0 / (u.exp() - 1.0) + 1.0 / (1.0 - (-v).exp());
    let s = |x: f64| (x / 2.0).exp() - (-x / 2.0).exp();
    let big_r = |u: f64, v: f64| s(u) * s(v) / (s(u) + s(v)) * r(u, v);
    (big_r(u, v) * big_r(u, -v) - 1.0).abs()
}
