//! Local hidden-variable membership for a four-context quad, decided two
//! independent ways: a linear feasibility problem over the 16 deterministic
//! strategies, and the eight CHSH facets `±S_i ≤ 2`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::info::{chsh_variants, ContextQuad};
use crate::quantum::JointDistribution;

/// Cases closer than this to the local polytope's boundary are flagged.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Upper bound on the visibility variable; keeps the program bounded for
/// the fully mixed quad.
const VISIBILITY_CAP: f64 = 2.0;

/// Weights over deterministic strategies `λ = (a(0), a(1), b(0), b(1))`,
/// indexed `a0·8 + a1·4 + b0·2 + b1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenVariableModel {
    pub weights: [f64; 16],
}

#[inline]
fn strategy_bits(lambda: usize) -> [u8; 4] {
    [
        (lambda >> 3 & 1) as u8,
        (lambda >> 2 & 1) as u8,
        (lambda >> 1 & 1) as u8,
        (lambda & 1) as u8,
    ]
}

impl HiddenVariableModel {
    /// `P(a,b|i,j) = Σ_λ ρ(λ) [a = a_i(λ)] [b = b_j(λ)]`.
    pub fn distribution(&self, i: usize, j: usize) -> JointDistribution {
        let mut p = [0.0; 4];
        for (lambda, w) in self.weights.iter().enumerate() {
            let bits = strategy_bits(lambda);
            let a = usize::from(bits[i & 1]);
            let b = usize::from(bits[2 + (j & 1)]);
            p[a * 2 + b] += w;
        }
        let total: f64 = p.iter().sum();
        JointDistribution::new(p.map(|v| v / total)).expect("convex combination of strategies")
    }

    /// Largest cell-wise gap between the model and `q`.
    pub fn max_deviation(&self, q: &ContextQuad) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let model = self.distribution(i, j).probabilities();
                let target = q.context(i, j).probabilities();
                for (m, t) in model.iter().zip(target.iter()) {
                    worst = worst.max((m - t).abs());
                }
            }
        }
        worst
    }
}

/// Result of the feasibility program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhvOutcome {
    pub feasible: bool,
    /// Within [`BOUNDARY_TOL`] of the polytope boundary; `feasible` is then
    /// numerically fragile.
    pub boundary: bool,
    /// Largest `μ` (capped at 2) such that `μ·q + (1−μ)·uniform` admits a
    /// local model. `q` is local iff `μ ≥ 1`.
    pub visibility: f64,
    pub model: Option<HiddenVariableModel>,
}

/// Mean marginal expectations `[A′0, A′1, B′0, B′1]` and correlators
/// `[E00, E01, E10, E11]` of the quad.
fn moments(q: &ContextQuad) -> [f64; 8] {
    let ma = |d: &JointDistribution| {
        let m = d.marginal_a();
        m[0] - m[1]
    };
    let mb = |d: &JointDistribution| {
        let m = d.marginal_b();
        m[0] - m[1]
    };
    let e = q.correlators();
    [
        0.5 * (ma(q.context(0, 0)) + ma(q.context(0, 1))),
        0.5 * (ma(q.context(1, 0)) + ma(q.context(1, 1))),
        0.5 * (mb(q.context(0, 0)) + mb(q.context(1, 0))),
        0.5 * (mb(q.context(0, 1)) + mb(q.context(1, 1))),
        e[0],
        e[1],
        e[2],
        e[3],
    ]
}

fn strategy_moments(lambda: usize) -> [f64; 8] {
    let s = strategy_bits(lambda).map(|b| 1.0 - 2.0 * f64::from(b));
    [
        s[0],
        s[1],
        s[2],
        s[3],
        s[0] * s[2],
        s[0] * s[3],
        s[1] * s[2],
        s[1] * s[3],
    ]
}

/// Decides whether a convex combination of the 16 deterministic strategies
/// reproduces `q`, returning a witness model when it does.
///
/// Solved as: maximize `μ` subject to `Σ_λ w_λ f(λ) = μ·f(q)`, `Σ w = 1`,
/// `w ≥ 0`, where `f` collects the four marginal expectations and four
/// correlators (the fully mixed quad has `f = 0`).
pub fn lhv_feasible(q: &ContextQuad) -> Result<LhvOutcome> {
    let target = moments(q);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let w: Vec<_> = (0..16)
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let mu = lp.add_var(1.0, (0.0, VISIBILITY_CAP));
    let features: Vec<[f64; 8]> = (0..16).map(strategy_moments).collect();
    for (row, &t) in target.iter().enumerate() {
        let mut terms: Vec<_> = w.iter().zip(&features).map(|(v, f)| (*v, f[row])).collect();
        terms.push((mu, -t));
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, 0.0);
    }
    let norm: Vec<_> = w.iter().map(|v| (*v, 1.0)).collect();
    lp.add_constraint(norm.as_slice(), ComparisonOp::Eq, 1.0);

    let sol = lp.solve().map_err(|e| Error::Solver(e.to_string()))?;
    let visibility = sol[mu];
    let feasible = visibility >= 1.0 - BOUNDARY_TOL;
    let boundary = (visibility - 1.0).abs() < BOUNDARY_TOL;
    let model = feasible.then(|| {
        // rescale the witness at μ* down to μ = 1 by mixing in the uniform model
        let scale = 1.0 / visibility.max(1.0);
        let mut weights = [0.0; 16];
        for (slot, v) in weights.iter_mut().zip(&w) {
            *slot = (scale * sol[*v] + (1.0 - scale) / 16.0).max(0.0);
        }
        let total: f64 = weights.iter().sum();
        HiddenVariableModel {
            weights: weights.map(|x| x / total),
        }
    });
    Ok(LhvOutcome {
        feasible,
        boundary,
        visibility,
        model,
    })
}

/// Outcome of the facet test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetCheck {
    pub local: bool,
    /// `2 − max_i |S_i|`; negative when a facet is violated.
    pub margin: f64,
    pub boundary: bool,
}

/// Local iff no CHSH sign variant exceeds 2 in magnitude.
pub fn facet_check(q: &ContextQuad) -> FacetCheck {
    let margin = 2.0 - chsh_variants(q).max_abs();
    FacetCheck {
        local: margin >= 0.0,
        margin,
        boundary: margin.abs() < BOUNDARY_TOL,
    }
}
