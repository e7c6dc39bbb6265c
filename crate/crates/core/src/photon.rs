//! Polarization-entangled photon pairs crossing birefringent plates.
//!
//! The frequency degrees of freedom act as the environment. With a Gaussian
//! joint frequency distribution of equal means `ω0/2`, equal variances `C11`
//! and correlation coefficient `K`, the decoherence functions are values of
//!
//! ```text
//! G(τ1, τ2) = exp[iω0(τ1 + τ2)/2 − C11(τ1² + τ2² + 2Kτ1τ2)/2]
//! ```
//!
//! at `τ_i = ±Δn t_i`. For `|K| = 1` the distribution has no density but `G`
//! stays well defined, so all dynamics go through `G`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dephasing::{
    DecoherenceModel, DephasingFunctions, InteractionSchedule, LocalTimes, PureState2Q,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonGaussianEnv {
    pub omega0: f64,
    pub c11: f64,
    pub k_corr: f64,
    pub delta_n: f64,
}

impl PhotonGaussianEnv {
    pub fn new(omega0: f64, c11: f64, k_corr: f64, delta_n: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be > 0, got {omega0}"
            )));
        }
        if !(c11 > 0.0 && c11.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c11 must be > 0, got {c11}"
            )));
        }
        if !(k_corr.abs() <= 1.0) {
            return Err(Error::InvalidCorrelation(k_corr));
        }
        if !delta_n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_n must be finite, got {delta_n}"
            )));
        }
        Ok(Self {
            omega0,
            c11,
            k_corr,
            delta_n,
        })
    }

    /// Environment with `C11 (Δn T)² = x` for plate time `T`, taking `Δn = 1`.
    pub fn with_plate_parameter(omega0: f64, x: f64, k_corr: f64, plate_time: f64) -> Result<Self> {
        if !(plate_time > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "plate time must be > 0, got {plate_time}"
            )));
        }
        Self::new(omega0, x / (plate_time * plate_time), k_corr, 1.0)
    }

    /// `C11 (Δn T)²`
    pub fn plate_parameter(&self, plate_time: f64) -> f64 {
        self.c11 * (self.delta_n * plate_time).powi(2)
    }

    /// The Bell pair whose trace distance is the modulus of the more slowly
    /// decaying nonlocal coherence: `κ12` for `K ≤ 0`, `Λ12` for `K > 0`.
    pub fn maximizing_pair(&self) -> (PureState2Q, PureState2Q) {
        if self.k_corr <= 0.0 {
            (PureState2Q::phi_plus(), PureState2Q::phi_minus())
        } else {
            (PureState2Q::psi_plus(), PureState2Q::psi_minus())
        }
    }
}

/// Sequential plates of equal length: `(start, start+T, start+T, start+2T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSchedule {
    schedule: InteractionSchedule,
}

impl PlateSchedule {
    pub fn new(start: f64, plate_time: f64) -> Result<Self> {
        if !(plate_time > 0.0 && plate_time.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "plate time must be > 0, got {plate_time}"
            )));
        }
        let schedule = InteractionSchedule::new(
            start,
            start + plate_time,
            start + plate_time,
            start + 2.0 * plate_time,
        )?;
        Ok(Self { schedule })
    }

    /// Accepts only schedules with equal windows and `t1_end == t2_start`.
    pub fn from_schedule(s: InteractionSchedule) -> Result<Self> {
        let t1 = s.t1_end - s.t1_start;
        let t2 = s.t2_end - s.t2_start;
        if t1 != t2 || s.t1_end != s.t2_start || t1 <= 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "plates must be sequential with equal positive lengths, got {s:?}"
            )));
        }
        Ok(Self { schedule: s })
    }

    pub fn plate_time(&self) -> f64 {
        self.schedule.t1_end - self.schedule.t1_start
    }

    pub fn schedule(&self) -> &InteractionSchedule {
        &self.schedule
    }
}

/// Closed-form Fourier transform of the Gaussian joint frequency distribution.
pub fn g_fourier(env: &PhotonGaussianEnv, tau1: f64, tau2: f64) -> C64 {
    let re = -0.5 * env.c11 * (tau1 * tau1 + tau2 * tau2 + 2.0 * env.k_corr * tau1 * tau2);
    let im = 0.5 * env.omega0 * (tau1 + tau2);
    C64::new(re, im).exp()
}

pub fn photon_functions(env: &PhotonGaussianEnv, t1: f64, t2: f64) -> DephasingFunctions {
    let (a, b) = (env.delta_n * t1, env.delta_n * t2);
    DephasingFunctions {
        kappa1: g_fourier(env, a, 0.0),
        kappa2: g_fourier(env, 0.0, b),
        kappa12: g_fourier(env, a, b),
        lambda12: g_fourier(env, a, -b),
    }
}

impl DecoherenceModel for PhotonGaussianEnv {
    fn functions(&self, local: LocalTimes) -> Result<DephasingFunctions> {
        Ok(photon_functions(self, local.t1, local.t2))
    }
}

pub fn photon_dephasing(env: &PhotonGaussianEnv, s: &PlateSchedule, t: f64) -> DephasingFunctions {
    let lt = s.schedule.local_times(t);
    photon_functions(env, lt.t1, lt.t2)
}

/// Trace distance of the maximizing Bell pair,
/// `exp[−(Δn²/2) C11 (t1² + t2² − 2|K| t1 t2)]`.
pub fn analytic_trace_distance(env: &PhotonGaussianEnv, s: &PlateSchedule, t: f64) -> f64 {
    let lt = s.schedule.local_times(t);
    let (t1, t2) = (lt.t1, lt.t2);
    let q = t1 * t1 + t2 * t2 - 2.0 * env.k_corr.abs() * t1 * t2;
    (-0.5 * env.delta_n * env.delta_n * env.c11 * q).exp()
}

/// `e^{−x/2}(e^{xK²/2} − 1)` with `x = C11 (Δn T)²`.
pub fn analytic_measure(env: &PhotonGaussianEnv, plate_time: f64) -> Result<f64> {
    if !(plate_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "plate time must be > 0, got {plate_time}"
        )));
    }
    let x = env.plate_parameter(plate_time);
    let k2 = env.k_corr * env.k_corr;
    Ok((-0.5 * x).exp() * (0.5 * x * k2).exp_m1())
}

/// Bivariate normal density of the two photon frequencies.
pub fn frequency_pdf(env: &PhotonGaussianEnv, omega1: f64, omega2: f64) -> Result<f64> {
    let k = env.k_corr;
    let one_minus_k2 = 1.0 - k * k;
    if one_minus_k2 <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    let mean = 0.5 * env.omega0;
    let (u, v) = (omega1 - mean, omega2 - mean);
    let det = env.c11 * env.c11 * one_minus_k2;
    let quad = (u * u + v * v - 2.0 * k * u * v) / (env.c11 * one_minus_k2);
    Ok((-0.5 * quad).exp() / (2.0 * PI * det.sqrt()))
}

/// Support line of the degenerate `|K| = 1` distribution: `ω2 = ω0/2 + K(ω1 − ω0/2)`.
pub fn degenerate_support(env: &PhotonGaussianEnv, omega1: f64) -> Option<f64> {
    if env.k_corr.abs() < 1.0 {
        return None;
    }
    let mean = 0.5 * env.omega0;
    Some(mean + env.k_corr.signum() * (omega1 - mean))
}
