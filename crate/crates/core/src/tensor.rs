//! Dense tensors in `Mat_n ⊗ Mat_n` and `Mat_n ⊗ Mat_n ⊗ Mat_n`.
//!
//! Storage is dense (`n⁴` resp. `n⁶` entries, practical up to `n ≈ 8`);
//! products iterate only over nonzero entries.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{to_text, Field, Ring, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("operands live in different fields")]
    BackendMismatch,
    #[error("{0} is not invertible in the field")]
    NotInvertible(usize),
    #[error("singular matrix")]
    Singular,
    #[error("entry index {0} out of range for n = {1}")]
    OutOfRange(usize, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Which two factors of the triple tensor product a `Tensor2` occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    S12,
    S13,
    S23,
}

/// An element `Σ c_{ijkl} e_ij ⊗ e_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2<R: Ring> {
    n: usize,
    data: Vec<R>,
}

/// An element `Σ c_{ijklpq} e_ij ⊗ e_kl ⊗ e_pq`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<R: Ring> {
    n: usize,
    data: Vec<R>,
}

impl<R: Ring> Tensor2<R> {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn zeros(n: usize, one: &R) -> Self {
        Tensor2 {
            n,
            data: vec![one.zero_like(); n.pow(4)],
        }
    }

    /// `e_ij ⊗ e_kl` scaled by `c`.
    pub fn basis(n: usize, (i, j, k, l): (usize, usize, usize, usize), c: R) -> Self {
        let mut t = Self::zeros(n, &c);
        t.set(i, j, k, l, c);
        t
    }

    /// `1 ⊗ 1`.
    pub fn identity(n: usize, one: &R) -> Self {
        let mut t = Self::zeros(n, one);
        for i in 0..n {
            for k in 0..n {
                t.set(i, i, k, k, one.clone());
            }
        }
        t
    }

    /// `P = Σ e_ij ⊗ e_ji`.
    pub fn transposition(n: usize, one: &R) -> Self {
        let mut t = Self::zeros(n, one);
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, j, i, one.clone());
            }
        }
        t
    }

    /// `a ⊗ b` for two `n × n` matrices.
    pub fn kron(a: &Matrix<R>, b: &Matrix<R>) -> Self {
        assert_eq!(a.n, b.n, "kron: size mismatch");
        let n = a.n;
        let mut t = Self::zeros(n, &a.data[0]);
        for i in 0..n {
            for j in 0..n {
                let x = a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let at = t.idx(i, j, k, l);
                        t.data[at] = x.clone() * b.get(k, l).clone();
                    }
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &R {
        &self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, c: R) {
        let at = self.idx(i, j, k, l);
        self.data[at] = c;
    }

    pub fn add_at(&mut self, i: usize, j: usize, k: usize, l: usize, c: R) {
        let at = self.idx(i, j, k, l);
        if self.data[at].is_zero() {
            self.data[at] = c;
        } else {
            let cur = std::mem::replace(&mut self.data[at], c.zero_like());
            self.data[at] = cur + c;
        }
    }

    /// Row-major view as the `n² × n²` matrix with rows `(i,j)` and columns `(k,l)`.
    pub fn as_slice(&self) -> &[R] {
        &self.data
    }

    /// `(i, j, k, l, c)` for every nonzero entry, in index order.
    pub fn nonzeros(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), &R)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(at, c)| {
                (
                    (at / (n * n * n), (at / (n * n)) % n, (at / n) % n, at % n),
                    c,
                )
            })
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Tensor2 {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn permuted(
        &self,
        f: impl Fn(usize, usize, usize, usize) -> (usize, usize, usize, usize),
    ) -> Self {
        let mut out = Self::zeros(self.n, &self.data[0]);
        for ((i, j, k, l), c) in self.nonzeros() {
            let (a, b, cc, d) = f(i, j, k, l);
            out.set(a, b, cc, d, c.clone());
        }
        out
    }

    /// `Σ a⊗b ↦ Σ b⊗a`.
    pub fn flip(&self) -> Self {
        self.permuted(|i, j, k, l| (k, l, i, j))
    }

    /// `Σ a⊗b ↦ Σ aᵗ⊗bᵗ`.
    pub fn transpose(&self) -> Self {
        self.permuted(|i, j, k, l| (j, i, l, k))
    }

    /// `t · P`, an index permutation.
    pub fn mul_transposition(&self) -> Self {
        self.permuted(|i, j, k, l| (i, l, k, j))
    }

    /// Product in the algebra `Mat_n ⊗ Mat_n`: `(a⊗b)(c⊗d) = ac ⊗ bd`.
    pub fn checked_mul(&self, o: &Self) -> Result<Self, TensorError> {
        if self.n != o.n {
            return Err(TensorError::SizeMismatch(self.n, o.n));
        }
        if !self.data[0].compatible(&o.data[0]) {
            return Err(TensorError::BackendMismatch);
        }
        let n = self.n;
        // right factor bucketed by its contracted indices (j, l)
        let mut buckets: Vec<Vec<(usize, usize, &R)>> = vec![Vec::new(); n * n];
        for ((j, m, l, p), c) in o.nonzeros() {
            buckets[j * n + l].push((m, p, c));
        }
        let mut out = Self::zeros(n, &self.data[0]);
        for ((i, j, k, l), a) in self.nonzeros() {
            for &(m, p, b) in &buckets[j * n + l] {
                let at = out.idx(i, m, k, p);
                out.data[at].mul_add_assign(a, b);
            }
        }
        Ok(out)
    }

    /// `(pr ⊗ pr)(t)`, with `pr(X) = X − (tr X / n)·1` in each factor.
    pub fn pr_pr(&self) -> Result<Self, TensorError> {
        let n = self.n;
        let inv_n = self.data[0]
            .int_like(n as i64)
            .try_inv()
            .ok_or(TensorError::NotInvertible(n))?;
        let mut t = self.clone();
        for k in 0..n {
            for l in 0..n {
                let tr = (0..n).fold(inv_n.zero_like(), |acc, i| acc + t.get(i, i, k, l).clone())
                    * inv_n.clone();
                if tr.is_zero() {
                    continue;
                }
                for i in 0..n {
                    t.add_at(i, i, k, l, -tr.clone());
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let tr = (0..n).fold(inv_n.zero_like(), |acc, k| acc + t.get(i, j, k, k).clone())
                    * inv_n.clone();
                if tr.is_zero() {
                    continue;
                }
                for k in 0..n {
                    t.add_at(i, j, k, k, -tr.clone());
                }
            }
        }
        Ok(t)
    }

    /// Places the tensor in two factors of the triple product, `1` in the third.
    pub fn embed(&self, slot: Slot) -> Tensor3<R> {
        let mut out = Tensor3::zeros(self.n, &self.data[0].one_like());
        for (ix, c) in self.embedded(slot) {
            out.set(ix, c.clone());
        }
        out
    }

    /// Nonzero entries of [`Tensor2::embed`] without building the dense tensor.
    fn embedded(&self, slot: Slot) -> Vec<([usize; 6], &R)> {
        let n = self.n;
        let mut out = Vec::new();
        for ((i, j, k, l), c) in self.nonzeros() {
            for d in 0..n {
                let ix = match slot {
                    Slot::S12 => [i, j, k, l, d, d],
                    Slot::S13 => [i, j, d, d, k, l],
                    Slot::S23 => [d, d, i, j, k, l],
                };
                out.push((ix, c));
            }
        }
        out
    }

    fn zip(&self, o: &Self, f: impl Fn(R, R) -> R) -> Self {
        assert_eq!(self.n, o.n, "tensor size mismatch");
        Tensor2 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }
}

impl<F: Field> Tensor2<F> {
    /// Determinant of the `n² × n²` reshaping (rows `(i,j)`, columns `(k,l)`).
    pub fn determinant(&self) -> F {
        let m = self.n * self.n;
        determinant(m, self.data.clone())
    }

    /// Invertibility of the `n² × n²` reshaping.
    pub fn is_invertible(&self) -> bool {
        match F::to_integral(&self.data) {
            Some((ints, _)) => !integer_determinant(self.n * self.n, ints).is_zero(),
            None => self.rank_check().1,
        }
    }

    /// `(determinant, invertible)`.
    pub fn rank_check(&self) -> (F, bool) {
        let d = self.determinant();
        let ok = !d.is_zero();
        (d, ok)
    }

    /// Sparse JSON form, 0-based indices.
    pub fn to_entries(&self) -> Vec<TensorEntry> {
        self.nonzeros()
            .map(|((i, j, k, l), c)| TensorEntry {
                i,
                j,
                k,
                l,
                c: to_text(c),
            })
            .collect()
    }

    pub fn from_entries(n: usize, one: &F, entries: &[TensorEntry]) -> Result<Self, TensorError> {
        let mut t = Self::zeros(n, one);
        for e in entries {
            for x in [e.i, e.j, e.k, e.l] {
                if x >= n {
                    return Err(TensorError::OutOfRange(x, n));
                }
            }
            let c = one.parse_like(&e.c)?;
            t.add_at(e.i, e.j, e.k, e.l, c);
        }
        Ok(t)
    }
}

/// One nonzero coefficient of a `Tensor2` in sparse JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub c: String,
}

impl<R: Ring> Add for &Tensor2<R> {
    type Output = Tensor2<R>;
    fn add(self, o: Self) -> Tensor2<R> {
        self.zip(o, |a, b| a + b)
    }
}

impl<R: Ring> Sub for &Tensor2<R> {
    type Output = Tensor2<R>;
    fn sub(self, o: Self) -> Tensor2<R> {
        self.zip(o, |a, b| a - b)
    }
}

impl<R: Ring> Neg for &Tensor2<R> {
    type Output = Tensor2<R>;
    fn neg(self) -> Tensor2<R> {
        self.map(|x| -x.clone())
    }
}

/// Panics on size mismatch; see [`Tensor2::checked_mul`].
impl<R: Ring> Mul for &Tensor2<R> {
    type Output = Tensor2<R>;
    fn mul(self, o: Self) -> Tensor2<R> {
        self.checked_mul(o).expect("tensor product")
    }
}

impl<R: Ring> Tensor3<R> {
    #[inline]
    fn idx(&self, ix: [usize; 6]) -> usize {
        ix.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    fn unidx(&self, mut at: usize) -> [usize; 6] {
        let mut ix = [0; 6];
        for slot in ix.iter_mut().rev() {
            *slot = at % self.n;
            at /= self.n;
        }
        ix
    }

    pub fn zeros(n: usize, one: &R) -> Self {
        Tensor3 {
            n,
            data: vec![one.zero_like(); n.pow(6)],
        }
    }

    /// `1 ⊗ 1 ⊗ 1`.
    pub fn identity(n: usize, one: &R) -> Self {
        Tensor2::identity(n, one).embed(Slot::S12)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at `[i, j, k, l, p, q]` for `e_ij ⊗ e_kl ⊗ e_pq`.
    pub fn get(&self, ix: [usize; 6]) -> &R {
        &self.data[self.idx(ix)]
    }

    pub fn set(&mut self, ix: [usize; 6], c: R) {
        let at = self.idx(ix);
        self.data[at] = c;
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = ([usize; 6], &R)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(at, c)| (self.unidx(at), c))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    /// Moves tensor factor `s` to position `perm[s]`.
    pub fn permute_factors(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zeros(self.n, &self.data[0]);
        for (ix, c) in self.nonzeros() {
            let mut nx = [0; 6];
            for s in 0..3 {
                nx[2 * perm[s]] = ix[2 * s];
                nx[2 * perm[s] + 1] = ix[2 * s + 1];
            }
            out.set(nx, c.clone());
        }
        out
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, TensorError> {
        if self.n != o.n {
            return Err(TensorError::SizeMismatch(self.n, o.n));
        }
        if !self.data[0].compatible(&o.data[0]) {
            return Err(TensorError::BackendMismatch);
        }
        let mut out = Self::zeros(self.n, &self.data[0]);
        let left: Vec<_> = self.nonzeros().collect();
        let right: Vec<_> = o.nonzeros().collect();
        accumulate_product(&mut out, &left, &right, false);
        Ok(out)
    }

    /// `ab − ba`.
    pub fn commutator(&self, o: &Self) -> Self {
        &(self * o) - &(o * self)
    }

    fn zip(&self, o: &Self, f: impl Fn(R, R) -> R) -> Self {
        assert_eq!(self.n, o.n, "tensor size mismatch");
        Tensor3 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }
}

impl<R: Ring> Add for &Tensor3<R> {
    type Output = Tensor3<R>;
    fn add(self, o: Self) -> Tensor3<R> {
        self.zip(o, |a, b| a + b)
    }
}

impl<R: Ring> Sub for &Tensor3<R> {
    type Output = Tensor3<R>;
    fn sub(self, o: Self) -> Tensor3<R> {
        self.zip(o, |a, b| a - b)
    }
}

/// Panics on size mismatch; see [`Tensor3::checked_mul`].
impl<R: Ring> Mul for &Tensor3<R> {
    type Output = Tensor3<R>;
    fn mul(self, o: Self) -> Tensor3<R> {
        self.checked_mul(o).expect("tensor product")
    }
}

/// `a¹²·b¹³ − c²³·d¹² + e¹³·f²³`, the left-hand side of the associative Yang-Baxter equation.
pub fn aybe_combine<R: Ring>(six: [&Tensor2<R>; 6]) -> Tensor3<R> {
    let [a, b, c, d, e, f] = six;
    let mut out = Tensor3::zeros(a.n, &a.data[0]);
    let terms = [
        ((a, Slot::S12), (b, Slot::S13), false),
        ((c, Slot::S23), (d, Slot::S12), true),
        ((e, Slot::S13), (f, Slot::S23), false),
    ];
    for ((x, sx), (y, sy), negate) in terms {
        accumulate_product(&mut out, &x.embedded(sx), &y.embedded(sy), negate);
    }
    out
}

/// `Lᵢ·tᵢ` as integer tensors with their scales `Lᵢ`, for backends with an
/// integral form.
pub fn integral_forms<F: Field, const K: usize>(
    ts: [&Tensor2<F>; K],
) -> Option<[(Tensor2<BigInt>, BigInt); K]> {
    let v: Vec<(Tensor2<BigInt>, BigInt)> = ts
        .iter()
        .map(|t| {
            let (data, scale) = F::to_integral(&t.data)?;
            Some((Tensor2 { n: t.n, data }, scale))
        })
        .collect::<Option<_>>()?;
    v.try_into().ok()
}

/// A residual count that takes the scale of each input tensor.
pub type ScaledCount<R, const K: usize> = fn([&Tensor2<R>; K], [R; K]) -> usize;

/// Runs a residual count over the integers when the backend allows it, and
/// over `F` with unit scales otherwise.
///
/// `count(ts, scales)` must vanish exactly when the residual of the tensors
/// `tsᵢ / scalesᵢ` does.
pub fn exact_nnz<F: Field, const K: usize>(
    ts: [&Tensor2<F>; K],
    over_field: ScaledCount<F, K>,
    over_integers: ScaledCount<BigInt, K>,
) -> usize {
    match integral_forms(ts) {
        Some(ints) => {
            let refs: [&Tensor2<BigInt>; K] = std::array::from_fn(|i| &ints[i].0);
            over_integers(refs, std::array::from_fn(|i| ints[i].1.clone()))
        }
        None => {
            let one = ts[0].data[0].one_like();
            over_field(ts, std::array::from_fn(|_| one.clone()))
        }
    }
}

/// Product of all `scales` except those at the two listed positions.
pub fn scale_without<R: Ring>(scales: &[R], skip: [usize; 2]) -> R {
    let one = scales[0].one_like();
    scales
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .fold(one, |acc, (_, x)| acc * x.clone())
}

fn aybe_scaled<R: Ring>(t: [&Tensor2<R>; 6], s: [R; 6]) -> usize {
    let a = t[0].scale(&scale_without(&s, [0, 1]));
    let c = t[2].scale(&scale_without(&s, [2, 3]));
    let e = t[4].scale(&scale_without(&s, [4, 5]));
    aybe_combine([&a, t[1], &c, t[3], &e, t[5]]).nnz()
}

/// Number of nonzero entries of [`aybe_combine`].
pub fn aybe_residual_nnz<F: Field>(six: [&Tensor2<F>; 6]) -> usize {
    exact_nnz(six, aybe_scaled::<F>, aybe_scaled::<BigInt>)
}

/// `out ± left·right` for sparse factors of `Mat_n^{⊗3}`.
fn accumulate_product<R: Ring>(
    out: &mut Tensor3<R>,
    left: &[([usize; 6], &R)],
    right: &[([usize; 6], &R)],
    negate: bool,
) {
    let n = out.n;
    let mut buckets: Vec<Vec<(usize, usize, usize, &R)>> = vec![Vec::new(); n * n * n];
    for &([j, m, l, s, q, t], c) in right {
        buckets[(j * n + l) * n + q].push((m, s, t, c));
    }
    for &([i, j, k, l, p, q], a) in left {
        let a = if negate { -a.clone() } else { a.clone() };
        for &(m, s, t, b) in &buckets[(j * n + l) * n + q] {
            let at = out.idx([i, m, k, s, p, t]);
            out.data[at].mul_add_assign(&a, b);
        }
    }
}

/// Bareiss elimination over `Z`; every division is exact.
fn integer_determinant(m: usize, mut a: Vec<BigInt>) -> BigInt {
    if m == 0 {
        return BigInt::from(1);
    }
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..m {
        let Some(piv) = (k..m).find(|&r| !Ring::is_zero(&a[r * m + k])) else {
            return BigInt::from(0);
        };
        if piv != k {
            for c in 0..m {
                a.swap(k * m + c, piv * m + c);
            }
            negate = !negate;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let v = (&a[i * m + j] * &a[k * m + k] - &a[i * m + k] * &a[k * m + j]) / &prev;
                a[i * m + j] = v;
            }
            a[i * m + k] = BigInt::from(0);
        }
        prev = a[k * m + k].clone();
    }
    let d = a[m * m - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
fn determinant<F: Field>(m: usize, mut a: Vec<F>) -> F {
    let one = a[0].one_like();
    if m == 0 {
        return one;
    }
    let mut sign = false;
    let mut prev = one.clone();
    for k in 0..m {
        let Some(piv) = (k..m).find(|&r| !a[r * m + k].is_zero()) else {
            return one.zero_like();
        };
        if piv != k {
            for c in 0..m {
                a.swap(k * m + c, piv * m + c);
            }
            sign = !sign;
        }
        let prev_inv = prev.try_inv().expect("nonzero pivot");
        for i in k + 1..m {
            for j in k + 1..m {
                let v = (a[i * m + j].clone() * a[k * m + k].clone()
                    - a[i * m + k].clone() * a[k * m + j].clone())
                    * prev_inv.clone();
                a[i * m + j] = v;
            }
            a[i * m + k] = one.zero_like();
        }
        prev = a[k * m + k].clone();
    }
    let d = a[m * m - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// A square matrix over a ring, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R: Ring> {
    n: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, TensorError> {
        let n = rows.len();
        if n == 0 {
            return Err(TensorError::SizeMismatch(0, 1));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(TensorError::SizeMismatch(bad.len(), n));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize, one: &R) -> Self {
        Self::diagonal((0..n).map(|_| one.clone()).collect())
    }

    pub fn diagonal(d: Vec<R>) -> Self {
        let n = d.len();
        let zero = d[0].zero_like();
        let mut data = vec![zero; n * n];
        for (i, x) in d.into_iter().enumerate() {
            data[i * n + i] = x;
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }
}

impl<F: Field> Matrix<F> {
    pub fn determinant(&self) -> F {
        determinant(self.n, self.data.clone())
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self, TensorError> {
        let n = self.n;
        let one = self.data[0].one_like();
        let mut a = self.data.clone();
        let mut inv = Self::identity(n, &one).data;
        for k in 0..n {
            let piv = (k..n)
                .find(|&r| !a[r * n + k].is_zero())
                .ok_or(TensorError::Singular)?;
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
                inv.swap(k * n + c, piv * n + c);
            }
            let p = a[k * n + k].try_inv().ok_or(TensorError::Singular)?;
            for c in 0..n {
                a[k * n + c] = a[k * n + c].clone() * p.clone();
                inv[k * n + c] = inv[k * n + c].clone() * p.clone();
            }
            for r in 0..n {
                if r == k || a[r * n + k].is_zero() {
                    continue;
                }
                let f = a[r * n + k].clone();
                for c in 0..n {
                    a[r * n + c] = a[r * n + c].clone() - f.clone() * a[k * n + c].clone();
                    inv[r * n + c] = inv[r * n + c].clone() - f.clone() * inv[k * n + c].clone();
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }
}

impl<R: Ring> Mul for &Matrix<R> {
    type Output = Matrix<R>;
    fn mul(self, o: Self) -> Matrix<R> {
        assert_eq!(self.n, o.n, "matrix size mismatch");
        let n = self.n;
        let mut data = vec![self.data[0].zero_like(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j].mul_add_assign(a, &o.data[k * n + j]);
                }
            }
        }
        Matrix { n, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::rng_for;
    use crate::scalar::{Fp, DEFAULT_PRIME};
    use num_rational::BigRational;
    use num_traits::One;
    use rand::Rng;

    fn fp() -> Fp {
        Fp::new(1, DEFAULT_PRIME)
    }

    fn random_t2(n: usize, seed: u64) -> Tensor2<Fp> {
        let mut rng = rng_for(seed, n as u64);
        let one = fp();
        let mut t = Tensor2::zeros(n, &one);
        for x in t.data.iter_mut() {
            *x = one.random_like(&mut rng);
        }
        t
    }

    #[test]
    fn p_squared_is_identity() {
        for n in 1..=5 {
            let one = BigRational::one();
            let p = Tensor2::transposition(n, &one);
            assert_eq!(&p * &p, Tensor2::identity(n, &one));
        }
        let one = BigRational::one();
        assert_eq!(Tensor2::transposition(1, &one), Tensor2::identity(1, &one));
    }

    #[test]
    fn p_swaps_basis_vectors() {
        // acting on vectors: (e_ij ⊗ e_kl)(e_x ⊗ e_y) = δ_jx δ_ly e_i ⊗ e_k
        let n = 3;
        let p = Tensor2::transposition(n, &fp());
        for x in 0..n {
            for y in 0..n {
                let mut image = vec![vec![0u64; n]; n];
                for ((i, j, k, l), c) in p.nonzeros() {
                    if j == x && l == y {
                        image[i][k] += c.value();
                    }
                }
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(image[a][b], u64::from(a == y && b == x));
                    }
                }
            }
        }
    }

    #[test]
    fn unit_and_matrix_units() {
        let t = random_t2(3, 1);
        let id = Tensor2::identity(3, &fp());
        assert_eq!(&id * &t, t);
        assert_eq!(&t * &id, t);
        let a = Tensor2::basis(2, (0, 1, 0, 0), fp());
        let b = Tensor2::basis(2, (1, 0, 0, 0), fp());
        assert_eq!(&a * &b, Tensor2::basis(2, (0, 0, 0, 0), fp()));
    }

    #[test]
    fn conjugation_by_p_is_flip() {
        for n in 1..=5 {
            let t = random_t2(n, 7);
            let p = Tensor2::transposition(n, &fp());
            assert_eq!(&(&p * &t) * &p, t.flip());
        }
    }

    #[test]
    fn structural_maps() {
        let one = BigRational::one();
        let p = Tensor2::transposition(3, &one);
        assert_eq!(p.flip(), p);
        let e = Tensor2::basis(3, (0, 1, 2, 0), one.clone());
        assert_eq!(e.transpose(), Tensor2::basis(3, (1, 0, 0, 2), one.clone()));
        assert!(Tensor2::identity(3, &one).pr_pr().unwrap().is_zero());
        let t = random_t2(3, 2);
        assert_eq!(t.flip().flip(), t);
        assert_eq!(t.transpose().transpose(), t);
        assert_eq!(t.flip().transpose(), t.transpose().flip());
    }

    #[test]
    fn pr_pr_is_traceless_projection() {
        let t = random_t2(3, 3);
        let s = t.pr_pr().unwrap();
        assert_eq!(s.pr_pr().unwrap(), s);
        for k in 0..3 {
            for l in 0..3 {
                let tr = (0..3).fold(fp().zero_like(), |a, i| a + *s.get(i, i, k, l));
                assert!(tr.is_zero());
            }
        }
    }

    #[test]
    fn transpose_reverses_products_factorwise() {
        let one = BigRational::one();
        for a_ix in [(0, 1, 1, 0), (1, 1, 0, 1), (0, 0, 1, 1)] {
            for b_ix in [(1, 0, 0, 1), (1, 1, 1, 0), (0, 1, 1, 1)] {
                let a = Tensor2::basis(2, a_ix, one.clone());
                let b = Tensor2::basis(2, b_ix, one.clone());
                assert_eq!((&a * &b).transpose(), &b.transpose() * &a.transpose());
            }
        }
    }

    #[test]
    fn embeddings() {
        let one = BigRational::one();
        let id = Tensor2::identity(3, &one);
        for s in [Slot::S12, Slot::S13, Slot::S23] {
            assert_eq!(id.embed(s), Tensor3::identity(3, &one));
        }
        let p = Tensor2::transposition(3, &one);
        let lhs = &p.embed(Slot::S13) * &p.embed(Slot::S12);
        let rhs = &p.embed(Slot::S12) * &p.embed(Slot::S23);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn aybe_combine_on_identity() {
        let one = BigRational::one();
        let id = Tensor2::identity(2, &one);
        assert_eq!(
            aybe_combine([&id, &id, &id, &id, &id, &id]),
            Tensor3::identity(2, &one)
        );
    }

    #[test]
    fn conjugation_by_p_ij_permutes_factors() {
        let n = 2;
        let one = BigRational::one();
        let p = Tensor2::transposition(n, &one);
        let cases = [
            (Slot::S12, [1, 0, 2]),
            (Slot::S13, [2, 1, 0]),
            (Slot::S23, [0, 2, 1]),
        ];
        for at in 0..n.pow(6) {
            let mut t = Tensor3::zeros(n, &one);
            t.data[at] = one.clone();
            for (slot, perm) in cases {
                let pp = p.embed(slot);
                assert_eq!(&(&pp * &t) * &pp, t.permute_factors(perm));
            }
        }
    }

    #[test]
    fn right_multiplication_by_p() {
        for n in 1..=3 {
            let t = random_t2(n, 5);
            let p = Tensor2::transposition(n, &fp());
            assert_eq!(t.mul_transposition(), &t * &p);
        }
    }

    #[test]
    fn aybe_nnz_matches_dense_combination() {
        let one = BigRational::one();
        let mut rng = rng_for(3, 3);
        let six: Vec<Tensor2<BigRational>> = (0..6)
            .map(|_| {
                let mut t = Tensor2::zeros(2, &one);
                for x in t.data.iter_mut().step_by(3) {
                    *x = one.random_like(&mut rng);
                }
                t
            })
            .collect();
        let refs = [&six[0], &six[1], &six[2], &six[3], &six[4], &six[5]];
        assert_eq!(aybe_residual_nnz(refs), aybe_combine(refs).nnz());
        let id = Tensor2::identity(2, &one);
        assert_eq!(aybe_residual_nnz([&id, &id, &id, &id, &id, &id]), 8);
    }

    #[test]
    fn integer_and_field_determinants_agree() {
        let mut rng = rng_for(9, 9);
        let one = BigRational::one();
        for n in 1..=2 {
            for _ in 0..10 {
                let mut t = Tensor2::zeros(n, &one);
                for x in t.data.iter_mut() {
                    if rng.gen_bool(0.6) {
                        *x = one.random_like(&mut rng);
                    }
                }
                assert_eq!(t.is_invertible(), t.rank_check().1);
                let (ints, scale) = BigRational::to_integral(&t.data).unwrap();
                let expected =
                    t.determinant() * BigRational::from_integer(scale.pow(n as u32 * n as u32));
                assert_eq!(
                    BigRational::from_integer(integer_determinant(n * n, ints)),
                    expected
                );
            }
        }
        let singular = Tensor2::identity(3, &one);
        assert!(!singular.is_invertible());
    }

    #[test]
    fn determinants() {
        let one = BigRational::one();
        assert_eq!(Tensor2::identity(1, &one).determinant(), one);
        // 1⊗1 reshapes to the rank-one matrix δ_ij δ_kl
        assert!(Tensor2::identity(3, &one).determinant().is_zero());
        let d = Tensor2::transposition(3, &one).determinant();
        assert!(d == one || d == -one.clone());
        assert!(Tensor2::zeros(3, &one).determinant().is_zero());
        for seed in 0..5 {
            let t = random_t2(2, seed);
            let (d1, ok1) = t.rank_check();
            let (d2, ok2) = t.flip().rank_check();
            assert_eq!(ok1, ok2);
            assert!(d1 == d2 || d1 == -d2);
        }
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let q = |a: i64| BigRational::from_integer(a.into());
        let rows = vec![
            vec![q(2), q(-1), q(0)],
            vec![q(1), q(3), q(4)],
            vec![q(0), q(5), q(-2)],
        ];
        let m = Matrix::from_rows(rows).unwrap();
        // 2(-6-20) + 1(-2-0) = -54
        assert_eq!(m.determinant(), q(-54));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(3, &q(1)));
        let singular = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert_eq!(singular.inverse(), Err(TensorError::Singular));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = Tensor2::identity(2, &fp());
        let b = Tensor2::identity(3, &fp());
        assert_eq!(a.checked_mul(&b), Err(TensorError::SizeMismatch(2, 3)));
        let c = Tensor2::identity(2, &Fp::new(1, 1_000_000_007));
        assert_eq!(a.checked_mul(&c), Err(TensorError::BackendMismatch));
    }

    #[test]
    fn sparse_json_round_trip() {
        let one = BigRational::one();
        let t = Tensor2::transposition(2, &one).scale(&BigRational::new(3.into(), 4.into()));
        let entries = t.to_entries();
        assert_eq!(entries.len(), 4);
        assert_eq!(
            entries[0],
            TensorEntry {
                i: 0,
                j: 0,
                k: 0,
                l: 0,
                c: "3/4".into()
            }
        );
        assert_eq!(Tensor2::from_entries(2, &one, &entries).unwrap(), t);
        let bad = [TensorEntry {
            i: 2,
            j: 0,
            k: 0,
            l: 0,
            c: "1".into(),
        }];
        assert_eq!(
            Tensor2::from_entries(2, &one, &bad),
            Err(TensorError::OutOfRange(2, 2))
        );
    }
}
