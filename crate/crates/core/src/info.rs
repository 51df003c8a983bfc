//! Shannon entropies and the correlative / entropic CHSH functionals.
//!
//! A [`ContextQuad`] holds the four jointly measurable pairs `(A′_i, B′_j)`
//! of a marginal scenario. The canonical correlative combination is
//! `S1 = E00 + E01 + E10 − E11`; the canonical entropic one is
//! `T11 = H(A′1,B′1) + H(A′0) + H(B′0) − H(A′0,B′0) − H(A′0,B′1) − H(A′1,B′0)`.
//! The other three variants of each relocate the distinguished context.

use crate::error::{Error, Result};
use crate::quantum::{JointDistribution, Party, PROB_TOL};

/// No-signalling tolerance for exact (model-generated) quads.
pub const NO_SIGNALLING_TOL: f64 = 1e-9;

/// Entropic values closer to zero than this are snapped to zero. Sums of
/// entropies that cancel exactly in theory (product states, deterministic
/// contexts) otherwise pick up ±1e-16 noise and flip zone membership.
pub const ENTROPY_ROUNDOFF: f64 = 1e-12;

#[inline]
fn neg_plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    neg_plogp(p) + neg_plogp(1.0 - p)
}

/// Binary Shannon entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(h2(p.clamp(0.0, 1.0)))
}

/// Shannon entropy of the four-cell table, in bits.
pub fn joint_entropy(d: &JointDistribution) -> f64 {
    d.probabilities().iter().map(|&p| neg_plogp(p)).sum()
}

/// Entropy of one party's outcome.
pub fn marginal_entropy(d: &JointDistribution, party: Party) -> f64 {
    let m = d.marginal(party);
    neg_plogp(m[0]) + neg_plogp(m[1])
}

/// The four contexts of a marginal scenario, indexed `(i, j)` for
/// `(A′_i, B′_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextQuad {
    contexts: [JointDistribution; 4],
}

impl ContextQuad {
    /// Checks that every observable's marginal agrees between the two
    /// contexts containing it, within `tol`.
    pub fn new(
        d00: JointDistribution,
        d01: JointDistribution,
        d10: JointDistribution,
        d11: JointDistribution,
        tol: f64,
    ) -> Result<Self> {
        let q = Self {
            contexts: [d00, d01, d10, d11],
        };
        let gap = q.signalling_gap();
        if gap > tol {
            return Err(Error::Signalling(format!(
                "marginals differ by {gap:.3e} (tolerance {tol:.1e})"
            )));
        }
        Ok(q)
    }

    pub(crate) fn new_unchecked(contexts: [JointDistribution; 4]) -> Self {
        Self { contexts }
    }

    /// Largest disagreement between two estimates of the same observable's
    /// marginal.
    pub fn signalling_gap(&self) -> f64 {
        let [d00, d01, d10, d11] = &self.contexts;
        let pairs = [
            (d00.marginal_a()[0], d01.marginal_a()[0]),
            (d10.marginal_a()[0], d11.marginal_a()[0]),
            (d00.marginal_b()[0], d10.marginal_b()[0]),
            (d01.marginal_b()[0], d11.marginal_b()[0]),
        ];
        pairs.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn context(&self, i: usize, j: usize) -> &JointDistribution {
        &self.contexts[(i & 1) * 2 + (j & 1)]
    }

    pub fn contexts(&self) -> &[JointDistribution; 4] {
        &self.contexts
    }

    /// Correlators `[E00, E01, E10, E11]`.
    pub fn correlators(&self) -> [f64; 4] {
        self.contexts.map(|d| d.correlator())
    }

    /// Exchange the parties: `(A′, B′) → (B′, A′)`, transposing each context.
    pub fn transpose(&self) -> Self {
        let [d00, d01, d10, d11] = self.contexts;
        Self {
            contexts: [
                d00.transpose(),
                d10.transpose(),
                d01.transpose(),
                d11.transpose(),
            ],
        }
    }
}

/// The four placements of the single minus sign in the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignVariants {
    /// `E00 + E01 + E10 − E11`
    pub s1: f64,
    /// `E00 + E01 − E10 + E11`
    pub s2: f64,
    /// `E00 − E01 + E10 + E11`
    pub s3: f64,
    /// `−E00 + E01 + E10 + E11`
    pub s4: f64,
}

impl SignVariants {
    pub fn from_correlators(e: [f64; 4]) -> Self {
        let total = e[0] + e[1] + e[2] + e[3];
        Self {
            s1: total - 2.0 * e[3],
            s2: total - 2.0 * e[2],
            s3: total - 2.0 * e[1],
            s4: total - 2.0 * e[0],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s3, self.s4]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// The four entropic CHSH variants, named by the context whose joint entropy
/// enters with a plus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicVariants {
    pub t11: f64,
    pub t10: f64,
    pub t01: f64,
    pub t00: f64,
}

impl EntropicVariants {
    pub fn as_array(&self) -> [f64; 4] {
        [self.t11, self.t10, self.t01, self.t00]
    }

    /// Variant whose positive joint-entropy term sits on context `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        match (i & 1, j & 1) {
            (0, 0) => self.t00,
            (0, 1) => self.t01,
            (1, 0) => self.t10,
            _ => self.t11,
        }
    }

    pub fn positive_count(&self) -> usize {
        self.as_array().iter().filter(|&&t| t > 0.0).count()
    }
}

/// All four correlative sign variants of the quad.
pub fn chsh_variants(q: &ContextQuad) -> SignVariants {
    SignVariants::from_correlators(q.correlators())
}

/// Reported CHSH value `|S1|`.
pub fn chsh_value(q: &ContextQuad) -> f64 {
    chsh_variants(q).s1.abs()
}

#[inline]
fn snap(t: f64) -> f64 {
    if t.abs() < ENTROPY_ROUNDOFF {
        0.0
    } else {
        t
    }
}

/// All four entropic variants. Single-observable entropies for `A′0, B′0`
/// come from context `(0,0)` and those for `A′1, B′1` from `(1,1)`.
pub fn entropic_variants(q: &ContextQuad) -> EntropicVariants {
    let [d00, d01, d10, d11] = q.contexts();
    let h = [
        joint_entropy(d00),
        joint_entropy(d01),
        joint_entropy(d10),
        joint_entropy(d11),
    ];
    let ha = [
        marginal_entropy(d00, Party::A),
        marginal_entropy(d11, Party::A),
    ];
    let hb = [
        marginal_entropy(d00, Party::B),
        marginal_entropy(d11, Party::B),
    ];
    let total: f64 = h.iter().sum();
    // T_(i,j) = 2 H_ij + H(A′_{1-i}) + H(B′_{1-j}) − Σ_all H
    let t = |i: usize, j: usize| snap(2.0 * h[i * 2 + j] + ha[1 - i] + hb[1 - j] - total);
    EntropicVariants {
        t11: t(1, 1),
        t10: t(1, 0),
        t01: t(0, 1),
        t00: t(0, 0),
    }
}

/// Canonical entropic CHSH `T11`, in bits; positive iff the entropic
/// inequality is violated.
pub fn chsh_e_value(q: &ContextQuad) -> f64 {
    entropic_variants(q).t11
}
