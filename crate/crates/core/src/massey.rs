//! The r-matrix rebuilt from rectangle counts on the square-tiled surface.
//!
//! Each contributing family of holomorphic rectangles yields a triple Massey
//! product `MP(x, y, z) = c·w`, corrected by the bounding cochains `h₁, h₂`.
//! Dualization turns it into the term `−c · e_{x,w} ⊗ e_{z,y}`. Holonomy is
//! integer bookkeeping in powers of `e^{u/n} = q_u²` and `e^{v/n} = q_v²`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::abd::AbdStructure;
use crate::report::CheckReport;
use crate::sample::{rng_for, sample_map};
use crate::scalar::Field;
use crate::surface::{Corner, SquareTiledSurface, SurfaceError};
use crate::tensor::Tensor2;
use crate::trig::{eval_r, TrigError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MasseyError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("evaluation point is a pole")]
    Pole,
    #[error("series diverges unless Re(u) > 0 and Re(v) > 0")]
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RectangleKind {
    Diagonal {
        i: usize,
    },
    Horizontal {
        k: usize,
        i: usize,
    },
    Vertical {
        m: usize,
        i: usize,
    },
    ARect {
        k: usize,
        m: usize,
        a: usize,
        sign: Sign,
    },
}

/// A family of rectangles contributing one Massey product `MP(x, y, z) ∋ w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RectangleFamily {
    pub kind: RectangleKind,
    /// exponents of `e^{u/n}` and `e^{v/n}` picked up by the boundary
    pub holonomy: (i64, i64),
    /// inputs `x, y, z` and output `w`
    pub corners: [usize; 4],
}

impl RectangleFamily {
    /// The basis tensor `e_{x,w} ⊗ e_{z,y}` receiving the dualized product.
    pub fn target(&self) -> (usize, usize, usize, usize) {
        let [x, y, z, w] = self.corners;
        (x, w, z, y)
    }
}

/// Grid `b[i][j]` of squares reached from `a` by `i` steps right and `j` steps down,
/// provided every interior lattice point closes up.
fn develop(
    s: &SquareTiledSurface,
    c: (&[usize], &[usize]),
    a: usize,
    k: usize,
    m: usize,
) -> Option<Vec<Vec<usize>>> {
    let (right, down) = c;
    let mut grid = vec![vec![0; m + 1]; k + 1];
    grid[0][0] = a;
    for j in 1..=m {
        grid[0][j] = down[grid[0][j - 1]];
    }
    for i in 1..=k {
        grid[i][0] = right[grid[i - 1][0]];
        for j in 1..=m {
            grid[i][j] = right[grid[i - 1][j]];
            if down[grid[i][j - 1]] != grid[i][j] {
                return None;
            }
        }
    }
    for row in grid.iter().take(k) {
        for &b in row.iter().take(m) {
            if !s.is_filled(b, Corner::BottomRight) {
                return None;
            }
        }
    }
    Some(grid)
}

/// Whether a `k × m` rectangle with top-left corner in square `a` immerses
/// into the surface: every lattice point it covers is filled and the squares close up.
pub fn develop_rectangle(
    s: &SquareTiledSurface,
    abd: &AbdStructure,
    a: usize,
    k: usize,
    m: usize,
) -> bool {
    develop(s, (abd.c1().images(), abd.c2().images()), a, k, m).is_some()
}

/// All contributing families, sorted by `(kind, k, m, base)`.
pub fn enumerate_rectangles(s: &SquareTiledSurface, abd: &AbdStructure) -> Vec<RectangleFamily> {
    let n = abd.n();
    let (right, down) = (abd.c1().images(), abd.c2().images());
    let mut out = Vec::new();
    for i in 0..n {
        out.push(RectangleFamily {
            kind: RectangleKind::Diagonal { i },
            holonomy: (0, 0),
            corners: [i; 4],
        });
    }
    for k in 1..n {
        for i in 0..n {
            let x = abd.c1().apply_pow(i, k as i64);
            out.push(RectangleFamily {
                kind: RectangleKind::Horizontal { k, i },
                holonomy: (k as i64, 0),
                corners: [x, i, i, x],
            });
        }
    }
    for m in 1..n {
        for i in 0..n {
            let z = abd.c2().apply_pow(i, m as i64);
            out.push(RectangleFamily {
                kind: RectangleKind::Vertical { m, i },
                holonomy: (0, m as i64),
                corners: [i, i, z, z],
            });
        }
    }
    for k in 1..n {
        for m in 1..n {
            for a in 0..n {
                let Some(g) = develop(s, (right, down), a, k, m) else {
                    continue;
                };
                let (c1a, c2a, c12a) = (g[k][0], g[0][m], g[k][m]);
                let (ki, mi) = (k as i64, m as i64);
                out.push(RectangleFamily {
                    kind: RectangleKind::ARect {
                        k,
                        m,
                        a,
                        sign: Sign::Plus,
                    },
                    holonomy: (ki, mi),
                    corners: [c1a, a, c2a, c12a],
                });
                out.push(RectangleFamily {
                    kind: RectangleKind::ARect {
                        k,
                        m,
                        a,
                        sign: Sign::Minus,
                    },
                    holonomy: (-ki, -mi),
                    corners: [c2a, c12a, c1a, a],
                });
            }
        }
    }
    out.sort();
    out
}

/// One family's contribution at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MasseyTerm<F: Field> {
    pub family: RectangleFamily,
    pub mu3: F,
    /// `μ₂(h₂, ·)`
    pub h2_term: F,
    /// `μ₂(·, h₁)`
    pub h1_term: F,
    /// `μ₃ − μ₂(h₂, ·) − μ₂(·, h₁)`
    pub mp: F,
}

impl<F: Field> MasseyTerm<F> {
    /// Coefficient after dualization.
    pub fn coefficient(&self) -> F {
        -self.mp.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasseyTensor<F: Field> {
    pub tensor: Tensor2<F>,
    pub terms: Vec<MasseyTerm<F>>,
}

/// Assembles the tensor from the rectangle families at `(q_u, q_v)`.
pub fn massey_tensor<F: Field>(
    s: &SquareTiledSurface,
    abd: &AbdStructure,
    qu: &F,
    qv: &F,
) -> Result<MasseyTensor<F>, MasseyError> {
    let n = abd.n();
    let one = qu.one_like();
    let (wu, wv) = (qu.clone() * qu.clone(), qv.clone() * qv.clone());
    let e_u = wu.pow_i(n as i64).ok_or(MasseyError::Pole)?;
    let e_v = wv.pow_i(n as i64).ok_or(MasseyError::Pole)?;
    let h1 = e_u.clone()
        * (e_u.clone() - one.clone())
            .try_inv()
            .ok_or(MasseyError::Pole)?;
    let h2 = (e_v.clone() - one.clone())
        .try_inv()
        .ok_or(MasseyError::Pole)?;
    let weight = |(a, b): (i64, i64)| -> Result<F, MasseyError> {
        Ok(wu.pow_i(a).ok_or(MasseyError::Pole)? * wv.pow_i(b).ok_or(MasseyError::Pole)?)
    };
    let zero = one.zero_like();
    let mut tensor = Tensor2::zeros(n, &one);
    let mut terms = Vec::new();
    for family in enumerate_rectangles(s, abd) {
        let w = weight(family.holonomy)?;
        let (mu3, h2_term, h1_term) = match family.kind {
            RectangleKind::Diagonal { .. } => (one.clone(), h2.clone() * e_v.clone(), h1.clone()),
            RectangleKind::Horizontal { .. } => (w.clone(), zero.clone(), w.clone() * h1.clone()),
            RectangleKind::Vertical { .. } => (
                w.clone(),
                w.clone() * h2.clone() * e_v.clone(),
                zero.clone(),
            ),
            RectangleKind::ARect {
                sign: Sign::Plus, ..
            } => (w, zero.clone(), zero.clone()),
            RectangleKind::ARect {
                sign: Sign::Minus, ..
            } => (-w, zero.clone(), zero.clone()),
        };
        let mp = mu3.clone() - h2_term.clone() - h1_term.clone();
        let term = MasseyTerm {
            family,
            mu3,
            h2_term,
            h1_term,
            mp,
        };
        let (i, j, k, l) = family.target();
        tensor.add_at(i, j, k, l, term.coefficient());
        terms.push(term);
    }
    Ok(MasseyTensor { tensor, terms })
}

/// Intermediate values of the single-square computation.
#[derive(Debug, Clone, PartialEq)]
pub struct N1Breakdown<F: Field> {
    /// `μ₂(q₁₂, p₁₁) = e^u · m₁`
    pub mu2_q12_p11: F,
    /// `μ₂(p₂₂, q₁₂) = n₁`
    pub mu2_p22_q12: F,
    /// `h₁ = e^u/(e^u − 1) · m₀`
    pub h1: F,
    /// `h₂ = 1/(e^v − 1) · n₀`
    pub h2: F,
    pub mu3: F,
    /// `μ₂(p₂₂, m₀)`
    pub mu2_p22_m0: F,
    /// `μ₂(n₀, p₁₁)`
    pub mu2_n0_p11: F,
    /// `1 + e^u/(1 − e^u) + e^v/(1 − e^v)`
    pub mp: F,
}

/// The `n = 1` computation at `(q_u, q_v)` with `e^u = q_u²`, `e^v = q_v²`.
pub fn massey_n1_breakdown<F: Field>(qu: &F, qv: &F) -> Result<N1Breakdown<F>, MasseyError> {
    let one = qu.one_like();
    let e_u = qu.clone() * qu.clone();
    let e_v = qv.clone() * qv.clone();
    // μ₁ on m₀ and n₀ multiplies by (e^u − 1) and (e^v − 1)
    let h1 = e_u.clone()
        * (e_u.clone() - one.clone())
            .try_inv()
            .ok_or(MasseyError::Pole)?;
    let h2 = (e_v.clone() - one.clone())
        .try_inv()
        .ok_or(MasseyError::Pole)?;
    let mu2_p22_m0 = one.clone();
    let mu2_n0_p11 = e_v;
    let mu3 = one.clone();
    let mp = mu3.clone() - h2.clone() * mu2_n0_p11.clone() - mu2_p22_m0.clone() * h1.clone();
    Ok(N1Breakdown {
        mu2_q12_p11: e_u,
        mu2_p22_q12: one,
        h1,
        h2,
        mu3,
        mu2_p22_m0,
        mu2_n0_p11,
        mp,
    })
}

/// `massey_tensor = eval_r` at seeded points.
pub fn check_massey<F: Field>(
    abd: &AbdStructure,
    one: &F,
    points: usize,
    seed: u64,
) -> Result<CheckReport, TrigError> {
    let s = match SquareTiledSurface::build(abd) {
        Ok(s) => s,
        Err(SurfaceError::Abd(e)) => return Err(TrigError::Abd(e)),
        Err(e) => unreachable!("valid structures only fill unramified punctures: {e}"),
    };
    let mut rng = rng_for(seed, 9);
    let mut failures = 0;
    for _ in 0..points {
        let (m, r) = sample_map(one, &mut rng, 2, |q| {
            let m = massey_tensor(&s, abd, &q[0], &q[1]).ok()?;
            Some((m, eval_r(abd, &q[0], &q[1])?))
        })?;
        if m.tensor != r {
            failures += 1;
        }
    }
    Ok(CheckReport::new("massey", points, failures, seed).with_backend(one.backend()))
}

/// Partial sum of the area-weighted rectangle series against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NovikovResult {
    pub partial: (f64, f64),
    pub closed: (f64, f64),
    pub error: f64,
}

/// The `n = 1` rectangle series at Novikov parameter `q = e^{-1}`, truncated after `l = L`.
pub fn novikov_check(
    u: Complex64,
    v: Complex64,
    big_l: usize,
) -> Result<NovikovResult, MasseyError> {
    if u.re <= 0.0 || v.re <= 0.0 {
        return Err(MasseyError::Divergent);
    }
    let area = (-u.re * v.re).exp();
    let one = Complex64::new(1.0, 0.0);
    let (step_u, step_v) = ((-u).exp(), (-v).exp());
    let (mut tu, mut tv) = (one, one);
    let mut sum = one;
    for _ in 0..big_l {
        tu *= step_u;
        tv *= step_v;
        sum += tu + tv;
    }
    let partial = -sum * area;
    let closed = (one / (one - u.exp()) + one / ((-v).exp() - one)) * area;
    Ok(NovikovResult {
        partial: (partial.re, partial.im),
        closed: (closed.re, closed.im),
        error: (partial - closed).norm(),
    })
}

/// Errors for `L = 0..=max_l`, and whether they never increase by more than
/// the rounding resolution `8ε·|closed|` of the float evaluation.
pub fn novikov_profile(
    u: Complex64,
    v: Complex64,
    max_l: usize,
) -> Result<(Vec<f64>, bool), MasseyError> {
    let runs = (0..=max_l)
        .map(|l| novikov_check(u, v, l))
        .collect::<Result<Vec<_>, _>>()?;
    let scale = Complex64::new(runs[0].closed.0, runs[0].closed.1)
        .norm()
        .max(f64::MIN_POSITIVE);
    let slack = 8.0 * f64::EPSILON * scale;
    let errors: Vec<f64> = runs.iter().map(|r| r.error).collect();
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] + slack);
    Ok((errors, monotone))
}
