//! Simple vector bundles `V^λ(m)` on a cycle of `n` projective lines and the
//! associative Belavin–Drinfeld structures they determine.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abd::{AbdError, AbdStructure};
use crate::perm::Permutation;
use crate::scalar::{format_rational, parse_rational, ScalarError};
use crate::trig::{TrigError, TrigSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("rank and number of components must be at least 1")]
    Empty,
    #[error("degree matrix must have {r} rows of length {n}")]
    Shape { r: usize, n: usize },
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("bundle is not simple: {0}")]
    NotSimple(SimplicityViolation),
    #[error("rows {} and {} are incomparable", .0 + 1, .1 + 1)]
    Incomparable(usize, usize),
    #[error("comparison of rows {} and {} is inconsistent", .0 + 1, .1 + 1)]
    Inconsistent(usize, usize),
    #[error(transparent)]
    Abd(#[from] AbdError),
}

/// Degree data `m^j_i` (row `i ∈ Z/r`, component `j`) and gluing constant `λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BundleJson", into = "BundleJson")]
pub struct BundleData {
    r: usize,
    n: usize,
    m: Vec<Vec<i64>>,
    lambda: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleJson {
    r: usize,
    n: usize,
    m: Vec<Vec<i64>>,
    lambda: String,
}

impl TryFrom<BundleJson> for BundleData {
    type Error = BundleError;
    fn try_from(j: BundleJson) -> Result<Self, BundleError> {
        BundleData::new(j.m, parse_rational(&j.lambda)?).and_then(|b| {
            if (b.r, b.n) == (j.r, j.n) {
                Ok(b)
            } else {
                Err(BundleError::Shape { r: j.r, n: j.n })
            }
        })
    }
}

impl From<BundleData> for BundleJson {
    fn from(b: BundleData) -> Self {
        BundleJson {
            r: b.r,
            n: b.n,
            lambda: format_rational(&b.lambda),
            m: b.m,
        }
    }
}

impl BundleData {
    pub fn new(m: Vec<Vec<i64>>, lambda: BigRational) -> Result<Self, BundleError> {
        let r = m.len();
        let n = m.first().map_or(0, Vec::len);
        if r == 0 || n == 0 {
            return Err(BundleError::Empty);
        }
        if m.iter().any(|row| row.len() != n) {
            return Err(BundleError::Shape { r, n });
        }
        if lambda.is_zero() {
            return Err(BundleError::ZeroLambda);
        }
        Ok(BundleData { r, n, m, lambda })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn with_lambda(&self, lambda: BigRational) -> Result<Self, BundleError> {
        Self::new(self.m.clone(), lambda)
    }

    /// `d_t` for any integer `t`: `d_{qn+j} = m^j_{−q mod r}`.
    pub fn d(&self, t: i64) -> i64 {
        let (n, r) = (self.n as i64, self.r as i64);
        let q = t.div_euclid(n);
        let j = t.rem_euclid(n) as usize;
        self.m[(-q).rem_euclid(r) as usize][j]
    }

    /// The period `rn` of `d`.
    pub fn period(&self) -> usize {
        self.r * self.n
    }

    /// One period `d_0, …, d_{rn−1}`.
    pub fn unroll(&self) -> Vec<i64> {
        (0..self.period() as i64).map(|t| self.d(t)).collect()
    }

    pub fn type_check(&self) -> BundleType {
        let all = |f: fn(i64) -> bool| self.m.iter().flatten().all(|&x| f(x));
        if all(|x| x > 0) {
            BundleType::Positive
        } else if all(|x| x >= 0) {
            BundleType::Nonnegative
        } else {
            BundleType::Neither
        }
    }

    /// Adds `shift` to every degree.
    pub fn twist(&self, shift: i64) -> Self {
        let m = self
            .m
            .iter()
            .map(|row| row.iter().map(|x| x + shift).collect())
            .collect();
        BundleData { m, ..self.clone() }
    }

    /// Relabels components `j ↦ j+1`, so that `d` shifts by one.
    pub fn rotate_components(&self) -> Self {
        let (r, n) = (self.r, self.n);
        let m = (0..r)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j + 1 < n {
                            self.m[i][j + 1]
                        } else {
                            self.m[(i + r - 1) % r][0]
                        }
                    })
                    .collect()
            })
            .collect();
        BundleData { m, ..self.clone() }
    }

    /// The first condition that fails, if any.
    pub fn simplicity(&self) -> Option<SimplicityViolation> {
        for j in 0..self.n {
            let col = self.m.iter().map(|row| row[j]);
            let spread = col.clone().max().unwrap_or(0) - col.min().unwrap_or(0);
            if spread > 1 {
                return Some(SimplicityViolation::ColumnSpread { column: j, spread });
            }
        }
        let (n, p) = (self.n as i64, self.period() as i64);
        for q in 1..self.r as i64 {
            let signs: Vec<i64> = (0..p)
                .map(|t| self.d(q * n + t) - self.d(t))
                .filter(|&x| x != 0)
                .collect();
            if signs.is_empty() {
                return Some(SimplicityViolation::ZeroDifference { shift: q as usize });
            }
            let alternates = (0..signs.len()).all(|i| signs[i] == -signs[(i + 1) % signs.len()]);
            if !alternates {
                return Some(SimplicityViolation::NotAlternating { shift: q as usize });
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.simplicity().is_none()
    }

    /// Sign of the first nonzero `d_{j−in} − d_{j−i′n}` over one period.
    pub fn compare(&self, i: usize, i2: usize) -> Option<Ordering> {
        if i == i2 {
            return Some(Ordering::Equal);
        }
        let n = self.n as i64;
        (0..self.period() as i64)
            .map(|j| self.d(j - i as i64 * n) - self.d(j - i2 as i64 * n))
            .find(|&x| x != 0)
            .map(|x| {
                if x < 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            })
    }

    /// The rows sorted by `≺`, after checking that `≺` is a strict total order.
    pub fn order_chain(&self) -> Result<Vec<usize>, BundleError> {
        if let Some(v) = self.simplicity() {
            return Err(BundleError::NotSimple(v));
        }
        let r = self.r;
        let mut table = vec![vec![Ordering::Equal; r]; r];
        for i in 0..r {
            for k in 0..r {
                table[i][k] = self.compare(i, k).ok_or(BundleError::Incomparable(i, k))?;
            }
        }
        for i in 0..r {
            for k in 0..r {
                if table[i][k] != table[k][i].reverse() {
                    return Err(BundleError::Inconsistent(i, k));
                }
            }
        }
        let mut chain: Vec<usize> = (0..r).collect();
        chain.sort_by_key(|&i| (0..r).filter(|&k| table[k][i] == Ordering::Less).count());
        for (a, &i) in chain.iter().enumerate() {
            for &k in &chain[a + 1..] {
                if table[i][k] != Ordering::Less {
                    return Err(BundleError::Inconsistent(i, k));
                }
            }
        }
        Ok(chain)
    }

    /// `ABD(V, p)`: `C₁` steps up the chain of `≺`, `C₂(i) = i − 1`.
    pub fn abd(&self) -> Result<AbdStructure, BundleError> {
        let chain = self.order_chain()?;
        let r = self.r;
        let mut c1 = vec![0; r];
        for (a, &i) in chain.iter().enumerate() {
            c1[i] = chain[(a + 1) % r];
        }
        let c1 = Permutation::new(c1).expect("chain is a bijection");
        let c2 = Permutation::new((0..r).map(|i| (i + r - 1) % r).collect())
            .expect("shift is a bijection");
        let prev = |i: usize| (i + r - 1) % r;
        let a: Vec<usize> = (0..r)
            .filter(|&i| {
                let next = c1.apply(i);
                self.compare(prev(i), prev(next)) == Some(Ordering::Less)
                    && self.same_inner_degrees(i, next)
            })
            .collect();
        Ok(AbdStructure::new_valid(c1, c2, a)?)
    }

    fn same_inner_degrees(&self, i: usize, i2: usize) -> bool {
        (1..self.n).all(|j| self.m[i][j] == self.m[i2][j])
    }

    /// The trigonometric solution of [`BundleData::abd`].
    pub fn solution(&self) -> Result<TrigSolution, BundleError> {
        match TrigSolution::new(self.abd()?) {
            Ok(s) => Ok(s),
            Err(TrigError::Abd(e)) => Err(e.into()),
            Err(e) => unreachable!("construction only validates: {e}"),
        }
    }

    /// A seeded random simple bundle with `r ≤ max_r`, `n ≤ max_n`.
    pub fn random_simple(rng: &mut ChaCha8Rng, max_r: usize, max_n: usize) -> Self {
        loop {
            let r = rng.gen_range(1..=max_r);
            let n = rng.gen_range(1..=max_n);
            let base: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let m = (0..r)
                .map(|_| base.iter().map(|b| b + rng.gen_range(0..=1)).collect())
                .collect();
            let lambda = BigRational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=9).into());
            let lambda = if rng.gen_bool(0.5) { -lambda } else { lambda };
            let b = BundleData::new(m, lambda).expect("nonempty shape");
            if b.is_simple() {
                return b;
            }
        }
    }
}

impl fmt::Display for BundleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|row| {
                row.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(
            f,
            "r={} n={} m=[{}] lambda={}",
            self.r,
            self.n,
            rows.join("; "),
            format_rational(&self.lambda)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BundleType {
    Positive,
    Nonnegative,
    Neither,
}

/// Why a bundle fails to be simple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimplicityViolation {
    /// degrees in one column differ by more than one
    ColumnSpread { column: usize, spread: i64 },
    /// `d_{qn+t} = d_t` for all `t`
    ZeroDifference { shift: usize },
    /// the nonzero differences do not alternate in sign
    NotAlternating { shift: usize },
}

impl fmt::Display for SimplicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplicityViolation::ColumnSpread { column, spread } => {
                write!(f, "column {} has spread {spread}", column + 1)
            }
            SimplicityViolation::ZeroDifference { shift } => {
                write!(f, "difference sequence at shift {shift} vanishes")
            }
            SimplicityViolation::NotAlternating { shift } => {
                write!(f, "difference sequence at shift {shift} does not alternate")
            }
        }
    }
}
