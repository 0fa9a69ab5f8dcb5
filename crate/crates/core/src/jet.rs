//! Truncated Laurent series in one formal variable over an exact field.
//!
//! A jet is `Σ_{e=val}^{prec-1} c_e u^e + O(u^prec)`. Precision is tracked
//! exactly through every operation, so a coefficient is only returned when it
//! is actually determined.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Field, Ring};

/// Precision marker for jets known exactly (polynomials, constants).
const EXACT: i64 = i64::MAX / 4;

/// Relative order used when inverting an exact jet that is not a monomial.
pub const EXACT_INVERSE_ORDER: i64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("{0}! is not invertible in the field")]
    FactorialNotInvertible(usize),
    #[error("coefficient of u^{0} is beyond the tracked precision O(u^{1})")]
    PrecisionExhausted(i64, i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentJet<F: Field> {
    /// exponent of `coeffs[0]`
    val: i64,
    /// `coeffs[0] != 0` whenever `coeffs` is nonempty
    coeffs: Vec<F>,
    prec: i64,
    unit: F,
}

impl<F: Field> LaurentJet<F> {
    fn normalized(mut val: i64, mut coeffs: Vec<F>, prec: i64, unit: F) -> Self {
        let keep = (prec.saturating_sub(val)).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        let lead = coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        val += lead as i64;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            val = prec;
        }
        LaurentJet {
            val,
            coeffs,
            prec,
            unit,
        }
    }

    /// The exact constant `c`.
    pub fn constant(c: F) -> Self {
        let unit = c.one_like();
        Self::normalized(0, vec![c], EXACT, unit)
    }

    /// The exact monomial `u`.
    pub fn variable(one: &F) -> Self {
        Self::normalized(1, vec![one.clone()], EXACT, one.clone())
    }

    /// `Σ_{e} coeffs[e - val] u^e + O(u^prec)`.
    pub fn from_coeffs(val: i64, coeffs: Vec<F>, prec: i64, one: &F) -> Self {
        Self::normalized(val, coeffs, prec, one.clone())
    }

    /// `1 + s·u + s²u²/2! + … + s^d u^d/d! + O(u^{d+1})`.
    pub fn exp(scale: &F, order: usize) -> Result<Self, JetError> {
        let one = scale.one_like();
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = one.clone();
        coeffs.push(term.clone());
        for k in 1..=order {
            let inv_k = one
                .int_like(k as i64)
                .try_inv()
                .ok_or(JetError::FactorialNotInvertible(k))?;
            term = term * scale.clone() * inv_k;
            coeffs.push(term.clone());
        }
        Ok(Self::normalized(0, coeffs, order as i64 + 1, one))
    }

    /// Lowest exponent with a nonzero coefficient; `None` if the jet is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    /// Exponent of the `O(u^prec)` remainder; `None` when exact.
    pub fn precision(&self) -> Option<i64> {
        (self.prec < EXACT).then_some(self.prec)
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Coefficient of `u^e`, if determined.
    pub fn coeff(&self, e: i64) -> Result<F, JetError> {
        if e >= self.prec {
            return Err(JetError::PrecisionExhausted(e, self.prec));
        }
        let idx = e - self.val;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            return Ok(self.unit.zero_like());
        }
        Ok(self.coeffs[idx as usize].clone())
    }

    /// Coefficient of `u^{-1}`.
    pub fn residue(&self) -> Result<F, JetError> {
        self.coeff(-1)
    }

    fn end(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }
}

impl<F: Field> Add for LaurentJet<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let prec = self.prec.min(o.prec);
        let spans = [&self, &o]
            .into_iter()
            .filter(|j| !j.coeffs.is_empty())
            .map(|j| (j.val, j.end()));
        let (lo, hi) = spans.fold((prec, i64::MIN), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        let hi = hi.min(prec).max(lo);
        let zero = self.unit.zero_like();
        let coeffs = (lo..hi)
            .map(|e| {
                let a = self.coeff(e).unwrap_or_else(|_| zero.clone());
                let b = o.coeff(e).unwrap_or_else(|_| zero.clone());
                a + b
            })
            .collect();
        Self::normalized(lo, coeffs, prec, self.unit)
    }
}

impl<F: Field> Neg for LaurentJet<F> {
    type Output = Self;
    fn neg(self) -> Self {
        LaurentJet {
            val: self.val,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
            prec: self.prec,
            unit: self.unit,
        }
    }
}

impl<F: Field> Sub for LaurentJet<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<F: Field> Mul for LaurentJet<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let prec = match (self.is_exact(), o.is_exact()) {
            (true, true) => EXACT,
            _ => self
                .val
                .saturating_add(o.prec)
                .min(o.val.saturating_add(self.prec))
                .min(EXACT),
        };
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::normalized(prec, Vec::new(), prec, self.unit);
        }
        let lo = self.val + o.val;
        let hi = (self.end() + o.end() - 1).min(prec);
        let len = (hi - lo).max(0) as usize;
        let mut coeffs = vec![self.unit.zero_like(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j].mul_add_assign(a, b);
            }
        }
        Self::normalized(lo, coeffs, prec, self.unit)
    }
}

impl<F: Field> Ring for LaurentJet<F> {
    fn zero_like(&self) -> Self {
        Self::normalized(EXACT, Vec::new(), EXACT, self.unit.clone())
    }

    fn one_like(&self) -> Self {
        Self::constant(self.unit.clone())
    }

    fn int_like(&self, k: i64) -> Self {
        Self::constant(self.unit.int_like(k))
    }

    /// True only for the exact zero; a jet that vanishes to finite precision is not zero.
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }

    fn try_inv(&self) -> Option<Self> {
        let c0 = self.coeffs.first()?;
        let c0_inv = c0.try_inv()?;
        let rel = if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Some(Self::normalized(
                    -self.val,
                    vec![c0_inv],
                    EXACT,
                    self.unit.clone(),
                ));
            }
            EXACT_INVERSE_ORDER
        } else {
            self.prec - self.val
        };
        let rel_us = rel as usize;
        let mut out: Vec<F> = Vec::with_capacity(rel_us);
        out.push(c0_inv.clone());
        for k in 1..rel_us {
            let mut acc = self.unit.zero_like();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc.mul_add_assign(&self.coeffs[i], &out[k - i]);
            }
            out.push(-(acc * c0_inv.clone()));
        }
        Some(Self::normalized(
            -self.val,
            out,
            -self.val + rel,
            self.unit.clone(),
        ))
    }

    fn compatible(&self, other: &Self) -> bool {
        self.unit.compatible(&other.unit)
    }
}
