//! Associative Belavin–Drinfeld structures `(S, C₁, C₂, A)` on `S = {0, …, n-1}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbdError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("c1 has {0} points but c2 has {1}")]
    SizeMismatch(usize, usize),
    #[error("element {0} of A is outside 0..{1}")]
    OutOfRange(usize, usize),
    #[error("invalid structure: {0}")]
    Invalid(ValidationReport),
}

/// One failed invariant of an [`AbdStructure`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `c1` is not a single n-cycle.
    C1NotTransitive,
    /// `c2` is not a single n-cycle.
    C2NotTransitive,
    /// `a` is all of `S`.
    NotProperSubset,
    /// `c1(c2(x)) != c2(c1(x))` for this `x ∈ a`.
    NotCommuting { point: usize },
}

/// The invariants violated by a structure; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v {
                Violation::C1NotTransitive => "c1 is not an n-cycle".to_string(),
                Violation::C2NotTransitive => "c2 is not an n-cycle".to_string(),
                Violation::NotProperSubset => "A is not a proper subset".to_string(),
                Violation::NotCommuting { point } => {
                    format!("c1 and c2 do not commute at {}", point + 1)
                }
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// `(S, C₁, C₂, A)` with `S = {0, …, n-1}` and `A` stored sorted.
///
/// Construction only checks shapes; [`AbdStructure::validate`] checks the
/// defining invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbdStructure {
    c1: Permutation,
    c2: Permutation,
    a: Vec<usize>,
}

impl AbdStructure {
    pub fn new(
        c1: Permutation,
        c2: Permutation,
        a: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AbdError> {
        if c1.len() != c2.len() {
            return Err(AbdError::SizeMismatch(c1.len(), c2.len()));
        }
        let n = c1.len();
        let a: BTreeSet<usize> = a.into_iter().collect();
        if let Some(&x) = a.iter().find(|&&x| x >= n) {
            return Err(AbdError::OutOfRange(x, n));
        }
        Ok(AbdStructure {
            c1,
            c2,
            a: a.into_iter().collect(),
        })
    }

    /// Like [`AbdStructure::new`] but rejects structures that fail validation.
    pub fn new_valid(
        c1: Permutation,
        c2: Permutation,
        a: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AbdError> {
        Self::new(c1, c2, a)?.validated()
    }

    pub fn validated(self) -> Result<Self, AbdError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(AbdError::Invalid(report))
        }
    }

    /// The one-point structure `({0}, id, id, ∅)`.
    pub fn trivial() -> Self {
        AbdStructure {
            c1: Permutation::identity(1),
            c2: Permutation::identity(1),
            a: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.c1.len()
    }

    pub fn c1(&self) -> &Permutation {
        &self.c1
    }

    pub fn c2(&self) -> &Permutation {
        &self.c2
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn contains(&self, x: usize) -> bool {
        self.a.binary_search(&x).is_ok()
    }

    pub fn with_a(&self, a: impl IntoIterator<Item = usize>) -> Result<Self, AbdError> {
        Self::new(self.c1.clone(), self.c2.clone(), a)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.c1.is_transitive_cycle() {
            violations.push(Violation::C1NotTransitive);
        }
        if !self.c2.is_transitive_cycle() {
            violations.push(Violation::C2NotTransitive);
        }
        if self.a.len() >= self.n() {
            violations.push(Violation::NotProperSubset);
        }
        for &x in &self.a {
            if self.c1.apply(self.c2.apply(x)) != self.c2.apply(self.c1.apply(x)) {
                violations.push(Violation::NotCommuting { point: x });
            }
        }
        ValidationReport { violations }
    }

    pub fn commutator(&self) -> Permutation {
        self.c1
            .commutator(&self.c2)
            .expect("sizes agree by construction")
    }

    /// `C₁ⁱ C₂ʲ (x)`.
    #[inline]
    pub fn translate(&self, x: usize, i: i64, j: i64) -> usize {
        self.c1.apply_pow(self.c2.apply_pow(x, j), i)
    }

    /// `A(k, m)`: the `x ∈ A` with `C₁ⁱ C₂ʲ(x) ∈ A` for all `0 ≤ i < k`, `0 ≤ j < m`.
    pub fn a_km(&self, k: usize, m: usize) -> Vec<usize> {
        assert!(k >= 1 && m >= 1, "A(k, m) needs k, m >= 1");
        self.a
            .iter()
            .copied()
            .filter(|&x| {
                (0..k).all(|i| (0..m).all(|j| self.contains(self.translate(x, i as i64, j as i64))))
            })
            .collect()
    }

    /// `Γ₁ = {(x, C₁x) : x ∈ A}` and `Γ₂ = {(C₂x, C₁C₂x) : x ∈ A}`.
    pub fn gamma_pair(&self) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
        let g1 = self.a.iter().map(|&x| (x, self.c1.apply(x))).collect();
        let g2 = self
            .a
            .iter()
            .map(|&x| {
                let y = self.c2.apply(x);
                (y, self.c1.apply(y))
            })
            .collect();
        (g1, g2)
    }

    /// Image under a relabeling `σ`: `(σC₁σ⁻¹, σC₂σ⁻¹, σ(A))`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<Self, AbdError> {
        let inv = sigma.inverse();
        let c1 = sigma.compose(&self.c1.compose(&inv)?)?;
        let c2 = sigma.compose(&self.c2.compose(&inv)?)?;
        Self::new(c1, c2, self.a.iter().map(|&x| sigma.apply(x)))
    }

    /// Whether `σ` intertwines `self` with `other`.
    pub fn is_isomorphism(&self, other: &AbdStructure, sigma: &Permutation) -> bool {
        if sigma.len() != self.n() || other.n() != self.n() {
            return false;
        }
        (0..self.n()).all(|x| {
            sigma.apply(self.c1.apply(x)) == other.c1.apply(sigma.apply(x))
                && sigma.apply(self.c2.apply(x)) == other.c2.apply(sigma.apply(x))
        }) && {
            let mut image: Vec<usize> = self.a.iter().map(|&x| sigma.apply(x)).collect();
            image.sort_unstable();
            image == other.a
        }
    }

    /// A relabeling `σ` with `σC₁ = C₁'σ`, `σC₂ = C₂'σ`, `σ(A) = A'`, if any.
    ///
    /// When `C₁` is an n-cycle, `σ` is fixed by the image of `0`, so only `n`
    /// candidates are tried.
    pub fn isomorphism_to(&self, other: &AbdStructure) -> Option<Permutation> {
        let n = self.n();
        if other.n() != n || self.a.len() != other.a.len() {
            return None;
        }
        if !self.c1.is_transitive_cycle() || !other.c1.is_transitive_cycle() {
            return crate::perm::all_permutations(n)
                .into_iter()
                .find(|s| self.is_isomorphism(other, s));
        }
        (0..n).find_map(|target| {
            let mut images = vec![0; n];
            let (mut x, mut y) = (0, target);
            for _ in 0..n {
                images[x] = y;
                x = self.c1.apply(x);
                y = other.c1.apply(y);
            }
            let sigma = Permutation::new(images).ok()?;
            self.is_isomorphism(other, &sigma).then_some(sigma)
        })
    }
}

impl fmt::Display for AbdStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(|x| (x + 1).to_string()).collect();
        write!(
            f,
            "n={} C1={} C2={} A={{{}}}",
            self.n(),
            self.c1,
            self.c2,
            a.join(",")
        )
    }
}

/// JSON form: `{"n": 4, "c1": [3,2,0,1], "c2": [...], "a": [2]}` (0-based).
///
/// On input, `c1`/`c2` may also be 1-based cycle-notation strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbdJson {
    pub n: usize,
    pub c1: PermJson,
    pub c2: PermJson,
    #[serde(default)]
    pub a: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermJson {
    Images(Vec<usize>),
    Cycles(String),
}

impl PermJson {
    fn to_perm(&self, n: usize) -> Result<Permutation, AbdError> {
        let p = match self {
            PermJson::Images(v) => Permutation::new(v.clone())?,
            PermJson::Cycles(s) => Permutation::parse_cycles(s, n)?,
        };
        if p.len() != n {
            return Err(AbdError::SizeMismatch(n, p.len()));
        }
        Ok(p)
    }
}

impl From<&AbdStructure> for AbdJson {
    fn from(s: &AbdStructure) -> Self {
        AbdJson {
            n: s.n(),
            c1: PermJson::Images(s.c1.images().to_vec()),
            c2: PermJson::Images(s.c2.images().to_vec()),
            a: s.a.clone(),
        }
    }
}

impl TryFrom<AbdJson> for AbdStructure {
    type Error = AbdError;

    fn try_from(j: AbdJson) -> Result<Self, AbdError> {
        AbdStructure::new(j.c1.to_perm(j.n)?, j.c2.to_perm(j.n)?, j.a)
    }
}
