//! General two-qubit dephasing map driven by local, switchable interactions.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with the first label belonging to
//! qubit 1 (leftmost tensor factor). A pure state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`
//! is mapped to
//!
//! ```text
//! | |a|²      ab*κ2     ac*κ1     ad*κ12 |
//! | ba*κ2*    |b|²      bc*Λ12    bd*κ1  |
//! | ca*κ1*    cb*Λ12*   |c|²      cd*κ2  |
//! | da*κ12*   db*κ1*    dc*κ2*    |d|²   |
//! ```
//!
//! i.e. a Schur multiplier whose coefficients are the four decoherence
//! functions. The map is completely positive iff that coefficient matrix is
//! positive semidefinite.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qlinalg::{self, ComplexMatrix, DensityMatrix, PSD_TOL};

const NORM_TOL: f64 = 1e-12;
const MODULUS_TOL: f64 = 1e-12;

/// Normalized pure two-qubit state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2Q {
    amps: [C64; 4],
}

impl PureState2Q {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let amps = [a, b, c, d];
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: [C64; 4]) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self {
            amps: amps.map(|z| z / norm),
        })
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(
            ComplexMatrix::outer(&self.amps).expect("4-vector outer product"),
        )
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    fn bell(i: usize, j: usize, sign: f64) -> Self {
        let mut amps = [C64::new(0.0, 0.0); 4];
        amps[i] = C64::new(FRAC_1_SQRT_2, 0.0);
        amps[j] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
        Self { amps }
    }

    /// (|00⟩ + |11⟩)/√2
    pub fn phi_plus() -> Self {
        Self::bell(0, 3, 1.0)
    }

    /// (|00⟩ − |11⟩)/√2
    pub fn phi_minus() -> Self {
        Self::bell(0, 3, -1.0)
    }

    /// (|01⟩ + |10⟩)/√2
    pub fn psi_plus() -> Self {
        Self::bell(1, 2, 1.0)
    }

    /// (|01⟩ − |10⟩)/√2
    pub fn psi_minus() -> Self {
        Self::bell(1, 2, -1.0)
    }
}

/// Switch-on/off times of the two local interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSchedule {
    pub t1_start: f64,
    pub t1_end: f64,
    pub t2_start: f64,
    pub t2_end: f64,
}

/// Accumulated interaction times `t_i(t) = ∫_0^t χ_i(t') dt'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTimes {
    pub t1: f64,
    pub t2: f64,
}

impl InteractionSchedule {
    pub fn new(t1_start: f64, t1_end: f64, t2_start: f64, t2_end: f64) -> Result<Self> {
        let all = [t1_start, t1_end, t2_start, t2_end];
        if all.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "times must be finite and nonnegative, got {all:?}"
            )));
        }
        if t1_start > t1_end || t2_start > t2_end {
            return Err(Error::InvalidSchedule(format!(
                "each window needs start <= end, got {all:?}"
            )));
        }
        Ok(Self {
            t1_start,
            t1_end,
            t2_start,
            t2_end,
        })
    }

    /// Latest switch-off time.
    pub fn span_end(&self) -> f64 {
        self.t1_end.max(self.t2_end)
    }

    pub fn local_times(&self, t: f64) -> LocalTimes {
        LocalTimes {
            t1: window_time(self.t1_start, self.t1_end, t),
            t2: window_time(self.t2_start, self.t2_end, t),
        }
    }
}

fn window_time(start: f64, end: f64, t: f64) -> f64 {
    if t <= start {
        0.0
    } else {
        t.min(end) - start
    }
}

/// Free-function form of [`InteractionSchedule::local_times`].
pub fn local_times(s: &InteractionSchedule, t: f64) -> (f64, f64) {
    let lt = s.local_times(t);
    (lt.t1, lt.t2)
}

/// The decoherence functions (κ1, κ2, κ12, Λ12) at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingFunctions {
    pub kappa1: C64,
    pub kappa2: C64,
    pub kappa12: C64,
    pub lambda12: C64,
}

impl DephasingFunctions {
    /// Rejects tuples with any modulus above one.
    pub fn new(kappa1: C64, kappa2: C64, kappa12: C64, lambda12: C64) -> Result<Self> {
        let f = Self {
            kappa1,
            kappa2,
            kappa12,
            lambda12,
        };
        if let Some(bad) = f.as_array().iter().find(|z| z.norm() > 1.0 + MODULUS_TOL) {
            return Err(Error::InvalidParameter(format!(
                "decoherence function modulus {} exceeds 1",
                bad.norm()
            )));
        }
        Ok(f)
    }

    pub fn real(kappa1: f64, kappa2: f64, kappa12: f64, lambda12: f64) -> Result<Self> {
        Self::new(
            C64::new(kappa1, 0.0),
            C64::new(kappa2, 0.0),
            C64::new(kappa12, 0.0),
            C64::new(lambda12, 0.0),
        )
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            kappa1: one,
            kappa2: one,
            kappa12: one,
            lambda12: one,
        }
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.kappa1, self.kappa2, self.kappa12, self.lambda12]
    }

    pub fn max_modulus(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Elementwise multiplier `M` with `Φ(ρ) = M ∘ ρ`.
    pub fn coherence_matrix(&self) -> ComplexMatrix {
        let one = C64::new(1.0, 0.0);
        let Self {
            kappa1: k1,
            kappa2: k2,
            kappa12: k12,
            lambda12: l12,
        } = *self;
        let upper = [
            [one, k2, k1, k12],
            [one, one, l12, k1],
            [one, one, one, k2],
            [one, one, one, one],
        ];
        let mut m = ComplexMatrix::zeros(4).expect("dim 4");
        for r in 0..4 {
            for c in r..4 {
                m[(r, c)] = upper[r][c];
                m[(c, r)] = upper[r][c].conj();
            }
        }
        m
    }

    /// Complete positivity check of the map defined by this tuple.
    pub fn check_completely_positive(&self) -> Result<()> {
        let (vals, _) = qlinalg::jacobi_eigenvalues(&self.coherence_matrix())?;
        if vals[0] < PSD_TOL {
            return Err(Error::MapNotPositive {
                min_eigenvalue: vals[0],
            });
        }
        Ok(())
    }
}

/// Anything that produces decoherence functions from local interaction times.
pub trait DecoherenceModel {
    fn functions(&self, local: LocalTimes) -> Result<DephasingFunctions>;

    fn at(&self, schedule: &InteractionSchedule, t: f64) -> Result<DephasingFunctions> {
        self.functions(schedule.local_times(t))
    }
}

impl<M: DecoherenceModel + ?Sized> DecoherenceModel for &M {
    fn functions(&self, local: LocalTimes) -> Result<DephasingFunctions> {
        (**self).functions(local)
    }
}

/// Map action on an arbitrary 4×4 operator (linear extension).
pub fn apply_map_to_operator(m: &ComplexMatrix, f: &DephasingFunctions) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: 4,
        });
    }
    m.hadamard(&f.coherence_matrix())
}

/// Evolve a pure two-qubit state; fails with [`Error::MapNotPositive`] if the
/// image is not a valid state.
pub fn apply_map(psi: &PureState2Q, f: &DephasingFunctions) -> Result<DensityMatrix> {
    let image = apply_map_to_operator(psi.density().matrix(), f)?;
    let (vals, _) = qlinalg::jacobi_eigenvalues(&image)?;
    if vals[0] < PSD_TOL {
        return Err(Error::MapNotPositive {
            min_eigenvalue: vals[0],
        });
    }
    Ok(DensityMatrix::new_unchecked(image))
}

/// Apply a validated map to a (possibly mixed) state without re-checking
/// positivity; the caller must have run
/// [`DephasingFunctions::check_completely_positive`].
pub(crate) fn apply_map_unchecked(rho: &DensityMatrix, f: &DephasingFunctions) -> DensityMatrix {
    DensityMatrix::new_unchecked(
        rho.matrix()
            .hadamard(&f.coherence_matrix())
            .expect("two-qubit state"),
    )
}

/// Single-qubit dephasing: populations kept, coherence multiplied by `kappa`.
pub fn dephase_qubit(rho: &DensityMatrix, kappa: C64) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    if kappa.norm() > 1.0 + MODULUS_TOL {
        return Err(Error::InvalidParameter(format!(
            "|kappa| = {} > 1",
            kappa.norm()
        )));
    }
    let mut m = *rho.matrix();
    m[(0, 1)] *= kappa;
    m[(1, 0)] *= kappa.conj();
    Ok(DensityMatrix::new_unchecked(m))
}

/// Local dynamics of one qubit prepared in a pure state.
pub fn evolve_local(psi_local: [C64; 2], kappa: C64) -> Result<DensityMatrix> {
    let rho = DensityMatrix::pure(&psi_local)?;
    dephase_qubit(&rho, kappa)
}

/// `(|κ12 − κ1κ2|, |Λ12 − κ1κ2*|)`; both vanish iff the map is a product of
/// local maps.
pub fn factorization_defect(f: &DephasingFunctions) -> (f64, f64) {
    (
        (f.kappa12 - f.kappa1 * f.kappa2).norm(),
        (f.lambda12 - f.kappa1 * f.kappa2.conj()).norm(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{partial_trace, trace_distance, Subsystem};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sched() -> InteractionSchedule {
        InteractionSchedule::new(0.0, 1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn local_times_on_sequential_schedule() {
        let s = sched();
        assert_eq!(local_times(&s, 0.5), (0.5, 0.0));
        assert_eq!(local_times(&s, 1.5), (1.0, 0.5));
        assert_eq!(local_times(&s, 2.0), (1.0, 1.0));
        assert_eq!(local_times(&s, 0.0), (0.0, 0.0));
        assert_eq!(local_times(&s, 10.0), (1.0, 1.0));
    }

    #[test]
    fn local_times_with_overlapping_windows() {
        let s = InteractionSchedule::new(0.0, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(local_times(&s, 0.75), (0.75, 0.25));
        assert_eq!(local_times(&s, 3.0), (2.0, 0.5));
    }

    #[test]
    fn invalid_schedules_rejected() {
        assert!(InteractionSchedule::new(1.0, 0.5, 0.0, 1.0).is_err());
        assert!(InteractionSchedule::new(-1.0, 0.5, 0.0, 1.0).is_err());
        assert!(InteractionSchedule::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn identity_map_reproduces_projector() {
        let psi = PureState2Q::normalized([c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.7), c(0.4, -0.1)])
            .unwrap();
        let out = apply_map(&psi, &DephasingFunctions::identity()).unwrap();
        let expected = psi.density();
        let diff = out.matrix().checked_sub(expected.matrix()).unwrap();
        assert!(diff.max_abs() <= 1e-15);
    }

    #[test]
    fn bell_state_kappa12_corners() {
        let f = DephasingFunctions::real(0.6, 0.3, 0.25, 0.2).unwrap();
        let out = apply_map(&PureState2Q::phi_plus(), &f).unwrap();
        let m = out.matrix();
        assert!((m[(0, 3)] - c(0.125, 0.0)).norm() < 1e-15);
        assert!((m[(3, 0)] - c(0.125, 0.0)).norm() < 1e-15);
        for (i, p) in [0.5, 0.0, 0.0, 0.5].into_iter().enumerate() {
            assert!((m[(i, i)].re - p).abs() < 1e-15);
        }
    }

    #[test]
    fn singlet_lambda12_slot() {
        let f = DephasingFunctions::real(0.9, 0.9, 0.5, 0.5).unwrap();
        let out = apply_map(&PureState2Q::psi_plus(), &f).unwrap();
        assert!((out.matrix()[(1, 2)] - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn element_layout_matches_map_definition() {
        let (a, b, cc, d) = (c(0.5, 0.1), c(0.2, -0.4), c(-0.3, 0.3), c(0.1, 0.2));
        let psi = PureState2Q::normalized([a, b, cc, d]).unwrap();
        let [a, b, cc, d] = *psi.amplitudes();
        let f =
            DephasingFunctions::new(c(0.5, 0.2), c(0.1, -0.6), c(0.3, 0.0), c(0.0, 0.2)).unwrap();
        let m = apply_map_to_operator(psi.density().matrix(), &f).unwrap();
        let expect = [
            ((0, 1), a * b.conj() * f.kappa2),
            ((0, 2), a * cc.conj() * f.kappa1),
            ((0, 3), a * d.conj() * f.kappa12),
            ((1, 2), b * cc.conj() * f.lambda12),
            ((1, 3), b * d.conj() * f.kappa1),
            ((2, 3), cc * d.conj() * f.kappa2),
        ];
        for ((r, col), v) in expect {
            assert!((m[(r, col)] - v).norm() < 1e-15);
            assert!((m[(col, r)] - v.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn inconsistent_tuple_is_not_positive() {
        // Principal minor on {00, 01, 11} is [[1,0,1],[0,1,1],[1,1,1]], det -1.
        let f = DephasingFunctions::real(1.0, 0.0, 1.0, 1.0).unwrap();
        let psi = PureState2Q::normalized([c(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            apply_map(&psi, &f),
            Err(Error::MapNotPositive { .. })
        ));
        assert!(f.check_completely_positive().is_err());
    }

    #[test]
    fn modulus_above_one_rejected() {
        assert!(DephasingFunctions::real(1.1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn evolve_local_examples() {
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let full = evolve_local(plus, c(1.0, 0.0)).unwrap();
        assert!((full.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let none = evolve_local(plus, c(0.0, 0.0)).unwrap();
        assert_eq!(none.matrix()[(0, 1)], c(0.0, 0.0));
        assert!((none.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        let part = evolve_local(plus, c(0.25, 0.0)).unwrap();
        assert!((part.matrix()[(0, 1)].re - 0.125).abs() < 1e-15);
    }

    #[test]
    fn evolve_local_matches_partial_trace_of_product() {
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let v = [c(FRAC_1_SQRT_2, 0.0), c(-0.5, 0.5)];
        let prod = PureState2Q::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]).unwrap();
        let (k1, k2) = (c(0.4, 0.3), c(0.2, -0.1));
        let f = DephasingFunctions::new(k1, k2, k1 * k2, k1 * k2.conj()).unwrap();
        let rho = apply_map(&prod, &f).unwrap();
        let r1 = partial_trace(&rho, Subsystem::First).unwrap();
        let r2 = partial_trace(&rho, Subsystem::Second).unwrap();
        let l1 = evolve_local(u, k1).unwrap();
        let l2 = evolve_local(v, k2).unwrap();
        assert!(r1.matrix().checked_sub(l1.matrix()).unwrap().max_abs() < 1e-15);
        assert!(r2.matrix().checked_sub(l2.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn marginal_coherence_depends_only_on_kappa1() {
        let psi = PureState2Q::normalized([c(0.5, 0.1), c(0.2, -0.4), c(-0.3, 0.3), c(0.1, 0.2)])
            .unwrap();
        let [a, b, cc, d] = *psi.amplitudes();
        let k1 = c(0.3, 0.2);
        let f = DephasingFunctions::new(k1, c(0.5, 0.0), c(0.2, 0.0), c(0.1, 0.0)).unwrap();
        let r1 = partial_trace(&apply_map(&psi, &f).unwrap(), Subsystem::First).unwrap();
        let expected = (a * cc.conj() + b * d.conj()) * k1;
        assert!((r1.matrix()[(0, 1)] - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_pair_distance_equals_kappa12() {
        let f = DephasingFunctions::real(0.5, 0.5, 0.25, 0.5).unwrap();
        let a = apply_map(&PureState2Q::phi_plus(), &f).unwrap();
        let b = apply_map(&PureState2Q::phi_minus(), &f).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn factorization_defect_examples() {
        let f = DephasingFunctions::real(0.5, 0.5, 1.0, 0.25).unwrap();
        let (d1, d2) = factorization_defect(&f);
        assert!((d1 - 0.75).abs() < 1e-15);
        assert!(d2.abs() < 1e-15);
        let (k1, k2) = (c(0.3, 0.4), c(-0.2, 0.5));
        let prod = DephasingFunctions::new(k1, k2, k1 * k2, k1 * k2.conj()).unwrap();
        assert_eq!(factorization_defect(&prod), (0.0, 0.0));
    }
}
