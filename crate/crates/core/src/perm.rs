//! Permutations of `{0, …, n-1}`.
//!
//! Composition follows function notation: `p.compose(&q)` is `x ↦ p(q(x))`,
//! so `q` is applied first. The commutator is `[p, q] = p⁻¹ q⁻¹ p q`.
//! Text I/O uses 1-based cycle notation, e.g. `(1 4 2 3)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("images do not form a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("point {point} is outside 1..={n}")]
    OutOfRange { point: usize, n: usize },
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),
}

/// A bijection of `{0, …, n-1}`, stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijection(n));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The cycle `0 → 1 → … → n-1 → 0`.
    pub fn standard_cycle(n: usize) -> Self {
        Permutation((0..n).map(|i| (i + 1) % n.max(1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.len() != other.len() {
            return Err(PermError::SizeMismatch(self.len(), other.len()));
        }
        Ok(Permutation(other.0.iter().map(|&x| self.0[x]).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `self` applied `k` times to `x`; negative `k` uses the inverse.
    pub fn apply_pow(&self, x: usize, k: i64) -> usize {
        let n = self.len() as i64;
        if n == 0 {
            return x;
        }
        let steps = if k >= 0 {
            k
        } else {
            let len = self.cycle_length_of(x) as i64;
            k.rem_euclid(len)
        };
        let mut y = x;
        for _ in 0..steps {
            y = self.0[y];
        }
        y
    }

    pub fn pow(&self, k: i64) -> Permutation {
        Permutation((0..self.len()).map(|x| self.apply_pow(x, k)).collect())
    }

    fn cycle_length_of(&self, x: usize) -> usize {
        let mut len = 1;
        let mut y = self.0[x];
        while y != x {
            y = self.0[y];
            len += 1;
        }
        len
    }

    /// `[self, other] = self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &Permutation) -> Result<Permutation, PermError> {
        let p_inv = self.inverse();
        let q_inv = other.inverse();
        p_inv.compose(&q_inv.compose(&self.compose(other)?)?)
    }

    /// Disjoint cycles, each starting at its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut y = self.0[start];
            while y != start {
                seen[y] = true;
                cycle.push(y);
                y = self.0[y];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut counts = BTreeMap::new();
        let mut fixed = Vec::new();
        for c in self.cycles() {
            *counts.entry(c.len()).or_insert(0) += 1;
            if c.len() == 1 {
                fixed.push(c[0]);
            }
        }
        CycleType {
            counts,
            fixed_points: fixed,
        }
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.0[x] == x).collect()
    }

    /// True iff `self` is a single `n`-cycle. The empty permutation is not.
    pub fn is_transitive_cycle(&self) -> bool {
        !self.is_empty() && self.cycle_length_of(0) == self.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Parses 1-based cycle notation on `n` points; unlisted points are fixed.
    ///
    /// Grammar: `perm := cycle+`, `cycle := '(' INT ((',' | WS) INT)* ')'`.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Permutation, PermError> {
        let bytes = text.as_bytes();
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut pos = 0;
        let mut cycles = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(syntax(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(syntax(pos, "expected a point"));
                }
                let point: usize = text[start..pos]
                    .parse()
                    .map_err(|_| syntax(start, "integer overflow"))?;
                if point == 0 || point > n {
                    return Err(PermError::OutOfRange { point, n });
                }
                if used[point - 1] {
                    return Err(PermError::RepeatedPoint(point));
                }
                used[point - 1] = true;
                cycle.push(point - 1);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    Some(b',') => pos += 1,
                    Some(c) if c.is_ascii_digit() => {}
                    Some(_) => return Err(syntax(pos, "expected ',', ')' or a point")),
                    None => return Err(syntax(pos, "unterminated cycle")),
                }
            }
            for w in 0..cycle.len() {
                images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
            cycles += 1;
        }
        if cycles == 0 {
            return Err(syntax(0, "empty permutation"));
        }
        Ok(Permutation(images))
    }

    /// 1-based cycle notation. Fixed points are omitted; the identity prints as `(1)`.
    pub fn to_cycle_string(&self) -> String {
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
                format!("({})", pts.join(" "))
            })
            .collect();
        if parts.is_empty() {
            "(1)".to_string()
        } else {
            parts.concat()
        }
    }

    /// All single `n`-cycles, in lexicographic order of image tables.
    pub fn all_n_cycles(n: usize) -> Vec<Permutation> {
        all_permutations(n)
            .into_iter()
            .filter(|p| p.is_transitive_cycle())
            .collect()
    }
}

fn syntax(pos: usize, msg: &str) -> PermError {
    PermError::Syntax {
        pos,
        msg: msg.to_string(),
    }
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

/// Cycle-length multiset together with the fixed-point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleType {
    /// cycle length ↦ number of cycles of that length
    pub counts: BTreeMap<usize, usize>,
    pub fixed_points: Vec<usize>,
}

impl CycleType {
    pub fn lengths(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (&len, &c) in self.counts.iter().rev() {
            v.extend(std::iter::repeat_n(len, c));
        }
        v
    }

    pub fn num_cycles(&self) -> usize {
        self.counts.values().sum()
    }
}
