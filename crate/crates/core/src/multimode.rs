//! Two qubits, each displaced by its own multimode bosonic field, with the
//! two fields prepared in a correlated two-mode Gaussian state per mode.
//!
//! Mode `k` of field `i` is displaced by `±ξ_k(t_i)` depending on the qubit
//! population, so every decoherence function is a product over modes of the
//! two-mode characteristic function
//!
//! ```text
//! χ(x, y) = exp[−½(|x|² + |y|² + c(x y* + x* y))]
//! ```
//!
//! evaluated at `(∓2ξ_k(t_1), ∓2ξ_k(t_2))`. Three routes are provided: finite
//! mode lists, adaptive quadrature of the continuum limit, and the closed forms
//! for an ohmic spectral density.

use num_complex::Complex64 as C64;

use crate::dephasing::{DecoherenceModel, DephasingFunctions, InteractionSchedule, LocalTimes};
use crate::error::{Error, Result};
use crate::quadrature;

/// Upper frequency cutoff of the continuum quadrature, in units of `omega_c`.
pub const QUADRATURE_CUTOFF: f64 = 40.0;
/// Required absolute accuracy of each decoherence exponent from quadrature.
pub const EXPONENT_TOL: f64 = 1e-10;
const INTEGRAL_TOL: f64 = EXPONENT_TOL / 10.0;
const MAX_INTERVALS: usize = 4000;

/// Default discretisation of the ohmic spectrum used as a brute-force oracle.
pub const DEFAULT_MODES: usize = 2000;
/// Highest discrete mode frequency, in units of `omega_c`.
pub const DEFAULT_MODE_CUTOFF: f64 = 20.0;

fn check_correlation(c: f64) -> Result<()> {
    if !(c.abs() <= 1.0) {
        return Err(Error::InvalidCorrelation(c));
    }
    Ok(())
}

/// Ohmic fields `J(ω) = α ω e^{−ω/ω_c}` with covariance blocks `A = B = 1`,
/// `C = c·1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicCorrelatedFields {
    pub alpha: f64,
    pub omega_c: f64,
    pub c: f64,
}

impl OhmicCorrelatedFields {
    pub fn new(alpha: f64, omega_c: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega_c must be > 0, got {omega_c}"
            )));
        }
        check_correlation(c)?;
        Ok(Self { alpha, omega_c, c })
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.alpha * omega * (-omega / self.omega_c).exp()
    }

    /// `ln(1 + ω_c² τ²)`
    fn log_factor(&self, tau: f64) -> f64 {
        (self.omega_c * tau).powi(2).ln_1p()
    }

    /// Closed form of `∫_0^∞ J(ω)(1 − cos ωτ)/ω² dω = (α/2) ln(1 + ω_c²τ²)`.
    pub fn decoherence_integral(&self, tau: f64) -> f64 {
        0.5 * self.alpha * self.log_factor(tau)
    }
}

/// Closed-form decoherence functions for ohmic fields.
pub fn ohmic_functions(env: &OhmicCorrelatedFields, t1: f64, t2: f64) -> DephasingFunctions {
    let two_alpha = 2.0 * env.alpha;
    let l1 = env.log_factor(t1);
    let l2 = env.log_factor(t2);
    let l12 = env.log_factor(t1 - t2);
    let c = env.c;
    // Written so that c = −1 gives exactly (1 + ω_c²(t1−t2)²)^{−2α}.
    let e12 = -two_alpha * ((1.0 + c) * (l1 + l2) - c * l12);
    let e_lambda = -two_alpha * ((1.0 - c) * (l1 + l2) + c * l12);
    let re = |x: f64| C64::new(x, 0.0);
    DephasingFunctions {
        kappa1: re((-two_alpha * l1).exp()),
        kappa2: re((-two_alpha * l2).exp()),
        kappa12: re(e12.exp()),
        lambda12: re(e_lambda.exp()),
    }
}

impl DecoherenceModel for OhmicCorrelatedFields {
    fn functions(&self, local: LocalTimes) -> Result<DephasingFunctions> {
        Ok(ohmic_functions(self, local.t1, local.t2))
    }
}

pub fn ohmic_dephasing(
    env: &OhmicCorrelatedFields,
    s: &InteractionSchedule,
    t: f64,
) -> DephasingFunctions {
    let lt = s.local_times(t);
    ohmic_functions(env, lt.t1, lt.t2)
}

/// `|1 − e^{ia}|² = 4 sin²(a/2)`
fn displacement_sqr(a: f64) -> f64 {
    let s = (0.5 * a).sin();
    4.0 * s * s
}

/// `Re[(1 − e^{ia})(1 − e^{−ib})] = 4 sin(a/2) sin(b/2) cos((a − b)/2)`
fn displacement_overlap(a: f64, b: f64) -> f64 {
    4.0 * (0.5 * a).sin() * (0.5 * b).sin() * (0.5 * (a - b)).cos()
}

fn integrate_spectrum<F: Fn(f64) -> f64>(env: &OhmicCorrelatedFields, kernel: F) -> Result<f64> {
    let integrand = |omega: f64| {
        if omega <= 0.0 {
            return 0.0;
        }
        env.spectral_density(omega) / (omega * omega) * kernel(omega)
    };
    let r = quadrature::integrate(
        integrand,
        0.0,
        QUADRATURE_CUTOFF * env.omega_c,
        INTEGRAL_TOL,
        MAX_INTERVALS,
    )?;
    Ok(r.value)
}

/// `∫ J(ω)(1 − cos ωτ)/ω² dω` by adaptive quadrature.
pub fn ohmic_decoherence_integral(env: &OhmicCorrelatedFields, tau: f64) -> Result<f64> {
    integrate_spectrum(env, |w| 0.5 * displacement_sqr(w * tau))
}

/// Continuum-limit decoherence functions by direct quadrature of the mode
/// sums `Σ|ξ_k(t_i)|²` and `Σ Re ξ_k(t_1) ξ_k*(t_2)`.
pub fn ohmic_quadrature_kappa(
    env: &OhmicCorrelatedFields,
    t1: f64,
    t2: f64,
) -> Result<DephasingFunctions> {
    let s1 = integrate_spectrum(env, |w| displacement_sqr(w * t1))?;
    let s2 = integrate_spectrum(env, |w| displacement_sqr(w * t2))?;
    let x = integrate_spectrum(env, |w| displacement_overlap(w * t1, w * t2))?;
    Ok(assemble(s1, s2, x, env.c))
}

/// From `s_i = Σ|ξ(t_i)|²` and `x = Σ Re ξ(t_1)ξ*(t_2)`, using
/// `ln χ(∓2ξ1, ∓2ξ2) = −2(|ξ1|² + |ξ2|² ± 2c Re ξ1ξ2*)`.
fn assemble(s1: f64, s2: f64, x: f64, c: f64) -> DephasingFunctions {
    let re = |e: f64| C64::new(e.exp(), 0.0);
    DephasingFunctions {
        kappa1: re(-2.0 * s1),
        kappa2: re(-2.0 * s2),
        kappa12: re(-2.0 * (s1 + s2 + 2.0 * c * x)),
        lambda12: re(-2.0 * (s1 + s2 - 2.0 * c * x)),
    }
}

/// `ξ(t) = g(1 − e^{iωt})/ω`
pub fn xi(g: C64, omega: f64, t_local: f64) -> C64 {
    let phase = C64::new(0.0, omega * t_local).exp();
    g * (C64::new(1.0, 0.0) - phase) / omega
}

fn char2_exponent(x: C64, y: C64, c: f64) -> f64 {
    -0.5 * (x.norm_sqr() + y.norm_sqr() + 2.0 * c * (x * y.conj()).re)
}

/// Characteristic function of the two-mode Gaussian state with `A = B = 1`,
/// `C = c·1`.
pub fn gaussian_char2(x: C64, y: C64, c: f64) -> Result<f64> {
    check_correlation(c)?;
    Ok(char2_exponent(x, y, c).exp())
}

/// One field mode shared (with identical coupling) by both environments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub g: C64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModeEnvironment {
    modes: Vec<Mode>,
    c: f64,
}

impl DiscreteModeEnvironment {
    pub fn new(modes: Vec<Mode>, c: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("mode list is empty".into()));
        }
        if let Some(m) = modes
            .iter()
            .find(|m| !(m.omega > 0.0 && m.omega.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "mode frequency must be > 0, got {}",
                m.omega
            )));
        }
        check_correlation(c)?;
        Ok(Self { modes, c })
    }

    /// Riemann discretisation of an ohmic spectrum: `ω_k = kΔω`,
    /// `|g_k|² = J(ω_k)Δω`, `Δω = omega_max/n`.
    pub fn ohmic_riemann(env: &OhmicCorrelatedFields, n: usize, omega_max: f64) -> Result<Self> {
        if n == 0 || !(omega_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need n > 0 and omega_max > 0, got n={n}, omega_max={omega_max}"
            )));
        }
        let dw = omega_max / n as f64;
        let modes = (1..=n)
            .map(|k| {
                let omega = k as f64 * dw;
                Mode {
                    g: C64::new((env.spectral_density(omega) * dw).sqrt(), 0.0),
                    omega,
                }
            })
            .collect();
        Self::new(modes, env.c)
    }

    /// The default oracle: 2000 modes on (0, 20 ω_c].
    pub fn ohmic_default(env: &OhmicCorrelatedFields) -> Result<Self> {
        Self::ohmic_riemann(env, DEFAULT_MODES, DEFAULT_MODE_CUTOFF * env.omega_c)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn correlation(&self) -> f64 {
        self.c
    }
}

impl DecoherenceModel for DiscreteModeEnvironment {
    fn functions(&self, local: LocalTimes) -> Result<DephasingFunctions> {
        let c = self.c;
        let (mut e1, mut e2, mut e12, mut el) = (0.0, 0.0, 0.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        for m in &self.modes {
            let x = -2.0 * xi(m.g, m.omega, local.t1);
            let y = -2.0 * xi(m.g, m.omega, local.t2);
            e1 += char2_exponent(x, zero, c);
            e2 += char2_exponent(zero, y, c);
            e12 += char2_exponent(x, y, c);
            el += char2_exponent(x, -y, c);
        }
        let re = |e: f64| C64::new(e.exp(), 0.0);
        Ok(DephasingFunctions {
            kappa1: re(e1),
            kappa2: re(e2),
            kappa12: re(e12),
            lambda12: re(el),
        })
    }
}

pub fn discrete_dephasing(
    env: &DiscreteModeEnvironment,
    s: &InteractionSchedule,
    t: f64,
) -> Result<DephasingFunctions> {
    env.at(s, t)
}
