//! Closed-form model of two qubits in the state `cos α |00⟩ + sin α |11⟩`
//! measured along `sin θ σ_Y + cos θ σ_Z`.
//!
//! Outcome bit 0 is eigenvalue +1 and bit 1 is eigenvalue −1, so the
//! correlator of a [`JointDistribution`] is `P(a=b) − P(a≠b)`.

use std::f64::consts::{FRAC_PI_4, TAU};

use crate::error::{require_finite, Error, Result};

/// Tolerance for probabilities that fall slightly outside `[0, 1]`.
pub const PROB_TOL: f64 = 1e-12;

/// State parameter α of `cos α |00⟩ + sin α |11⟩`, restricted to `[0, π/4]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParam {
    alpha: f64,
    sin_2a: f64,
    cos_2a: f64,
}

impl StateParam {
    pub fn new(alpha: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        if !(0.0..=FRAC_PI_4).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, pi/4], got {alpha}"
            )));
        }
        let (sin_2a, cos_2a) = if alpha == FRAC_PI_4 {
            // exact values keep the α = π/4 symmetries exact
            (1.0, 0.0)
        } else {
            (2.0 * alpha).sin_cos()
        };
        Ok(Self {
            alpha,
            sin_2a,
            cos_2a,
        })
    }

    /// The maximally entangled state, α = π/4.
    pub fn maximal() -> Self {
        Self::new(FRAC_PI_4).expect("pi/4 is in range")
    }

    /// The product state `|00⟩`, α = 0.
    pub fn product() -> Self {
        Self::new(0.0).expect("0 is in range")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sin_2alpha(&self) -> f64 {
        self.sin_2a
    }

    pub fn cos_2alpha(&self) -> f64 {
        self.cos_2a
    }
}

impl Default for StateParam {
    fn default() -> Self {
        Self::maximal()
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A Y–Z plane observable `sin θ σ_Y + cos θ σ_Z`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Observable {
    theta: f64,
}

impl Observable {
    pub fn new(theta: f64) -> Result<Self> {
        require_finite("theta", theta)?;
        Ok(Self {
            theta: wrap_angle(theta),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Four measurement angles `(θ0, θ1, θ′0, θ′1)` together with the state.
///
/// Index order matches the observables `X1 = A_0`, `X2 = A_1`, `X3 = B_0`,
/// `X4 = B_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub a0: Observable,
    pub a1: Observable,
    pub b0: Observable,
    pub b1: Observable,
    pub state: StateParam,
}

impl MeasurementSetting {
    pub fn new(angles: [f64; 4], state: StateParam) -> Result<Self> {
        Ok(Self {
            a0: Observable::new(angles[0])?,
            a1: Observable::new(angles[1])?,
            b0: Observable::new(angles[2])?,
            b1: Observable::new(angles[3])?,
            state,
        })
    }

    /// Angles in `X1..X4` order.
    pub fn angles(&self) -> [f64; 4] {
        [
            self.a0.theta(),
            self.a1.theta(),
            self.b0.theta(),
            self.b1.theta(),
        ]
    }

    pub fn observables(&self) -> [Observable; 4] {
        [self.a0, self.a1, self.b0, self.b1]
    }

    pub(crate) fn from_observables(obs: [Observable; 4], state: StateParam) -> Self {
        Self {
            a0: obs[0],
            a1: obs[1],
            b0: obs[2],
            b1: obs[3],
            state,
        }
    }
}

/// Which side of a context a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Outcome table `P(a,b)` of one context, stored as `[P00, P01, P10, P11]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    p: [f64; 4],
}

impl JointDistribution {
    /// Validates and clamps a probability table given in `P00, P01, P10, P11`
    /// order.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        let mut out = [0.0; 4];
        for (slot, &v) in out.iter_mut().zip(p.iter()) {
            require_finite("probability", v)?;
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
                return Err(Error::Domain(format!("probability {v} outside [0, 1]")));
            }
            *slot = v.clamp(0.0, 1.0);
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { p: out })
    }

    /// Normalized frequencies from outcome counts. Fails on an all-zero table.
    pub fn from_counts(counts: [u64; 4]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Domain("empty context".into()));
        }
        let n = total as f64;
        Ok(Self {
            p: counts.map(|c| c as f64 / n),
        })
    }

    /// Builds the table from the two marginal expectations and the correlator:
    /// `P(a,b) = [1 + (−1)^a m_a + (−1)^b m_b + (−1)^{a+b} E] / 4`.
    pub(crate) fn from_moments(m_a: f64, m_b: f64, e: f64) -> Self {
        let p00 = (1.0 + m_a + m_b + e) * 0.25;
        let p01 = (1.0 + m_a - m_b - e) * 0.25;
        let p10 = (1.0 - m_a + m_b - e) * 0.25;
        let p11 = (1.0 - m_a - m_b + e) * 0.25;
        Self {
            p: [p00.max(0.0), p01.max(0.0), p10.max(0.0), p11.max(0.0)],
        }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    pub fn p(&self, a: u8, b: u8) -> f64 {
        self.p[usize::from(a & 1) * 2 + usize::from(b & 1)]
    }

    pub fn marginal_a(&self) -> [f64; 2] {
        [self.p[0] + self.p[1], self.p[2] + self.p[3]]
    }

    pub fn marginal_b(&self) -> [f64; 2] {
        [self.p[0] + self.p[2], self.p[1] + self.p[3]]
    }

    pub fn marginal(&self, party: Party) -> [f64; 2] {
        match party {
            Party::A => self.marginal_a(),
            Party::B => self.marginal_b(),
        }
    }

    /// `P(a=b) − P(a≠b)`, clamped to `[−1, 1]`.
    pub fn correlator(&self) -> f64 {
        (self.p[0] + self.p[3] - self.p[1] - self.p[2]).clamp(-1.0, 1.0)
    }

    /// The same context with the parties exchanged.
    pub fn transpose(&self) -> Self {
        Self {
            p: [self.p[0], self.p[2], self.p[1], self.p[3]],
        }
    }
}

/// `⟨A ⊗ B⟩ = cos φa cos φb − sin 2α sin φa sin φb`.
pub fn correlator(phi_a: f64, phi_b: f64, state: &StateParam) -> Result<f64> {
    require_finite("phi_a", phi_a)?;
    require_finite("phi_b", phi_b)?;
    let (sa, ca) = phi_a.sin_cos();
    let (sb, cb) = phi_b.sin_cos();
    Ok(correlator_trig(ca, sa, cb, sb, state.sin_2a))
}

#[inline]
pub(crate) fn correlator_trig(ca: f64, sa: f64, cb: f64, sb: f64, sin_2a: f64) -> f64 {
    (ca * cb - sin_2a * sa * sb).clamp(-1.0, 1.0)
}

/// Single-observable expectation `cos 2α cos φ`.
pub fn marginal_expectation(phi: f64, state: &StateParam) -> Result<f64> {
    require_finite("phi", phi)?;
    Ok(state.cos_2a * phi.cos())
}

/// Born-rule outcome table for observables at `phi_a` (first qubit) and
/// `phi_b` (second qubit).
pub fn joint_distribution(phi_a: f64, phi_b: f64, state: &StateParam) -> Result<JointDistribution> {
    require_finite("phi_a", phi_a)?;
    require_finite("phi_b", phi_b)?;
    let (sa, ca) = phi_a.sin_cos();
    let (sb, cb) = phi_b.sin_cos();
    Ok(Trig { cos: ca, sin: sa }.joint(&Trig { cos: cb, sin: sb }, state))
}

/// Cached `(cos θ, sin θ)` of one observable.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trig {
    pub cos: f64,
    pub sin: f64,
}

impl Trig {
    pub fn of(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { cos, sin }
    }

    pub fn joint(&self, other: &Trig, state: &StateParam) -> JointDistribution {
        let e = correlator_trig(self.cos, self.sin, other.cos, other.sin, state.sin_2a);
        JointDistribution::from_moments(state.cos_2a * self.cos, state.cos_2a * other.cos, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_8, PI};

    const TOL: f64 = 1e-12;

    #[test]
    fn state_param_range() {
        assert!(StateParam::new(-1e-3).is_err());
        assert!(StateParam::new(FRAC_PI_4 + 1e-9).is_err());
        assert!(StateParam::new(f64::NAN).is_err());
        assert_eq!(StateParam::new(0.0).unwrap().alpha(), 0.0);
    }

    #[test]
    fn observable_wraps_into_range() {
        assert!((Observable::new(-0.5).unwrap().theta() - (TAU - 0.5)).abs() < TOL);
        assert!((Observable::new(7.0).unwrap().theta() - (7.0 - TAU)).abs() < TOL);
        assert_eq!(Observable::new(-1e-300).unwrap().theta(), 0.0);
        assert!(Observable::new(f64::INFINITY).is_err());
    }

    #[test]
    fn correlator_examples() {
        let max = StateParam::maximal();
        assert!((correlator(0.0, 0.0, &max).unwrap() - 1.0).abs() < TOL);
        let e = correlator(1.316, 1.033, &max).unwrap();
        assert!((e - 2.349f64.cos()).abs() < TOL);
        assert!((e + 0.7021).abs() < 1e-4);
        let s = StateParam::new(FRAC_PI_8).unwrap();
        assert!((correlator(FRAC_PI_3, 0.0, &s).unwrap() - 0.5).abs() < TOL);
        assert!(correlator(f64::NAN, 0.0, &s).is_err());
    }

    #[test]
    fn correlator_is_cos_sum_at_maximal_entanglement() {
        let max = StateParam::maximal();
        for &(a, b) in &[(0.3, 1.9), (4.0, 5.5), (2.0, -1.0)] {
            let e = correlator(a, b, &max).unwrap();
            assert!((e - (a + b).cos()).abs() < TOL);
        }
    }

    #[test]
    fn marginal_expectation_examples() {
        let max = StateParam::maximal();
        for phi in [0.0, 0.7, PI, 5.0] {
            assert_eq!(marginal_expectation(phi, &max).unwrap(), 0.0);
        }
        assert!((marginal_expectation(0.0, &StateParam::product()).unwrap() - 1.0).abs() < TOL);
        let s = StateParam::new(FRAC_PI_8).unwrap();
        let m = marginal_expectation(FRAC_PI_3, &s).unwrap();
        assert!((m - FRAC_PI_4.cos() * 0.5).abs() < TOL);
        assert!((m - 0.35355).abs() < 1e-5);
        assert!(marginal_expectation(f64::NEG_INFINITY, &s).is_err());
    }

    #[test]
    fn joint_distribution_examples() {
        let max = StateParam::maximal();
        let d = joint_distribution(0.8, -0.8, &max).unwrap();
        let p = d.probabilities();
        for (got, want) in p.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < TOL);
        }

        let d = joint_distribution(2.070, 1.372, &max).unwrap();
        assert!((d.correlator() + 0.9552).abs() < 1e-4);
        assert!((d.p(0, 0) - 0.0112).abs() < 1e-4);
        assert!((d.p(1, 1) - 0.0112).abs() < 1e-4);
        assert!((d.p(0, 1) - 0.4888).abs() < 1e-4);
        assert!((d.p(1, 0) - 0.4888).abs() < 1e-4);
    }

    #[test]
    fn joint_distribution_rejects_nan() {
        assert!(joint_distribution(f64::NAN, 0.0, &StateParam::maximal()).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::new([0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(JointDistribution::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(JointDistribution::new([1.1, -0.1, 0.0, 0.0]).is_err());
        let d = JointDistribution::new([0.5 + 5e-13, 0.5, -5e-13, 0.0]).unwrap();
        assert_eq!(d.p(1, 0), 0.0);
        assert!(JointDistribution::from_counts([0; 4]).is_err());
        let d = JointDistribution::from_counts([1, 0, 0, 3]).unwrap();
        assert_eq!(d.probabilities(), [0.25, 0.0, 0.0, 0.75]);
    }

    #[test]
    fn transpose_swaps_marginals() {
        let d = joint_distribution(0.4, 2.0, &StateParam::new(0.3).unwrap()).unwrap();
        let t = d.transpose();
        assert_eq!(d.marginal_a(), t.marginal_b());
        assert_eq!(d.marginal_b(), t.marginal_a());
        assert_eq!(d.correlator(), t.correlator());
    }
}
