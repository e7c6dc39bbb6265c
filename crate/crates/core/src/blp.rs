//! Trace-distance dynamics and the non-Markovianity measure.
//!
//! The measure is the total increase of the trace distance between two
//! evolved states, maximized over initial pairs. On a time grid the integral
//! of the positive part of `dD/dt` telescopes to the sum of positive
//! increments, which is what [`measure_from_trajectory`] computes; the rate is
//! never differentiated numerically.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dephasing::{
    apply_map_unchecked, dephase_qubit, DecoherenceModel, DephasingFunctions, InteractionSchedule,
    PureState2Q,
};
use crate::error::{Error, Result};
use crate::qlinalg::{self, partial_trace, ComplexMatrix, DensityMatrix, Subsystem};

/// Default number of grid points over the full schedule span.
pub const DEFAULT_GRID_POINTS: usize = 4000;

pub type StatePair = (PureState2Q, PureState2Q);

/// Uniform time grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start && t_start >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "need 0 <= t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    /// `[0, span_end]` of a schedule.
    pub fn over(schedule: &InteractionSchedule, n_points: usize) -> Result<Self> {
        Self::new(0.0, schedule.span_end(), n_points)
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        if j + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + j as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }
}

/// Trace distances on the evaluation times of a [`SampledDynamics`]: the
/// uniform grid plus any schedule switching times falling between grid
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Trajectory {
    /// Largest single-step increase (negative if strictly decreasing).
    pub fn max_increment(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the largest value among evaluation times in `[from, to]`.
    pub fn argmax_between(&self, from: f64, to: f64) -> Option<usize> {
        (0..self.times.len())
            .filter(|&i| self.times[i] >= from && self.times[i] <= to)
            .max_by(|&i, &j| self.values[i].total_cmp(&self.values[j]).then(j.cmp(&i)))
    }

    /// Value at the evaluation time closest to `t`.
    pub fn value_near(&self, t: f64) -> f64 {
        let i = (0..self.times.len())
            .min_by(|&i, &j| {
                (self.times[i] - t)
                    .abs()
                    .total_cmp(&(self.times[j] - t).abs())
            })
            .expect("nonempty trajectory");
        self.values[i]
    }
}

/// Uniform grid points merged with the schedule's switching times inside the
/// grid span. A switching time within `1e-9` spacings of a grid point replaces
/// that point.
pub fn evaluation_times(grid: &TimeGrid, schedule: &InteractionSchedule) -> Vec<f64> {
    let mut times: Vec<f64> = grid.points().collect();
    let h = grid.spacing();
    let breaks = [
        schedule.t1_start,
        schedule.t1_end,
        schedule.t2_start,
        schedule.t2_end,
    ];
    for b in breaks {
        if !(b > grid.t_start && b < grid.t_end) {
            continue;
        }
        let pos = ((b - grid.t_start) / h).round() as usize;
        if (times[pos] - b).abs() <= 1e-9 * h {
            times[pos] = b;
        } else if !times.contains(&b) {
            times.push(b);
        }
    }
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup();
    times
}

/// Decoherence functions tabulated on the evaluation times, each validated
/// as a completely positive map.
#[derive(Debug, Clone)]
pub struct SampledDynamics {
    grid: TimeGrid,
    times: Vec<f64>,
    functions: Vec<DephasingFunctions>,
    multipliers: Vec<ComplexMatrix>,
}

impl SampledDynamics {
    pub fn new<M: DecoherenceModel + ?Sized>(
        model: &M,
        schedule: &InteractionSchedule,
        grid: TimeGrid,
    ) -> Result<Self> {
        let times = evaluation_times(&grid, schedule);
        let functions = times
            .iter()
            .map(|&t| {
                let f = model.at(schedule, t)?;
                f.check_completely_positive()?;
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        let multipliers = functions.iter().map(|f| f.coherence_matrix()).collect();
        Ok(Self {
            grid,
            times,
            functions,
            multipliers,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn functions(&self) -> &[DephasingFunctions] {
        &self.functions
    }

    fn wrap(&self, values: Vec<f64>) -> Trajectory {
        Trajectory {
            grid: self.grid,
            times: self.times.clone(),
            values,
        }
    }

    /// Global trace-distance trajectory for a pair of two-qubit states.
    pub fn trajectory_mixed(&self, a: &DensityMatrix, b: &DensityMatrix) -> Result<Trajectory> {
        let diff = canonical_sign(a.matrix().checked_sub(b.matrix())?);
        if diff.dim() != 4 {
            return Err(Error::DimensionMismatch {
                left: diff.dim(),
                right: 4,
            });
        }
        let values = self
            .multipliers
            .iter()
            .map(|m| qlinalg::half_trace_norm_unchecked(&diff.hadamard(m)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.wrap(values))
    }

    pub fn trajectory(&self, pair: &StatePair) -> Result<Trajectory> {
        self.trajectory_mixed(&pair.0.density(), &pair.1.density())
    }

    /// Trace distance between the single-qubit states of one subsystem,
    /// evolved by the local dephasing with `κ1` or `κ2`.
    pub fn local_trajectory(
        &self,
        a: &DensityMatrix,
        b: &DensityMatrix,
        subsystem: Subsystem,
    ) -> Result<Trajectory> {
        let values = self
            .functions
            .iter()
            .map(|f| {
                let kappa = match subsystem {
                    Subsystem::First => f.kappa1,
                    Subsystem::Second => f.kappa2,
                };
                qlinalg::trace_distance(&dephase_qubit(a, kappa)?, &dephase_qubit(b, kappa)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.wrap(values))
    }

    /// Both marginal trajectories of a two-qubit pair.
    pub fn marginal_trajectories(&self, pair: &StatePair) -> Result<(Trajectory, Trajectory)> {
        let (a, b) = (pair.0.density(), pair.1.density());
        let first = self.local_trajectory(
            &partial_trace(&a, Subsystem::First)?,
            &partial_trace(&b, Subsystem::First)?,
            Subsystem::First,
        )?;
        let second = self.local_trajectory(
            &partial_trace(&a, Subsystem::Second)?,
            &partial_trace(&b, Subsystem::Second)?,
            Subsystem::Second,
        )?;
        Ok((first, second))
    }

    /// Evolved state at evaluation index `j`.
    pub fn state_at(&self, psi: &PureState2Q, j: usize) -> DensityMatrix {
        apply_map_unchecked(&psi.density(), &self.functions[j])
    }
}

/// `±m` with the first nonzero entry (row-major) having positive real part, or
/// zero real part and positive imaginary part. Makes `D(a, b)` and `D(b, a)`
/// bitwise identical.
fn canonical_sign(m: ComplexMatrix) -> ComplexMatrix {
    let first = m.as_slice().iter().find(|z| z.re != 0.0 || z.im != 0.0);
    let flip = matches!(first, Some(z) if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0));
    let mut out = m;
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            let z = if flip { -m[(r, c)] } else { m[(r, c)] };
            // `+ 0.0` folds −0 into +0.
            out[(r, c)] = C64::new(z.re + 0.0, z.im + 0.0);
        }
    }
    out
}

/// Trace-distance trajectory of a pair under `model`.
pub fn trajectory<M: DecoherenceModel + ?Sized>(
    model: &M,
    schedule: &InteractionSchedule,
    pair: &StatePair,
    grid: TimeGrid,
) -> Result<Trajectory> {
    SampledDynamics::new(model, schedule, grid)?.trajectory(pair)
}

/// Sum of the positive increments of the trajectory.
pub fn measure_from_trajectory(traj: &Trajectory) -> f64 {
    traj.values.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

/// Haar-random pure state from eight standard normals.
pub fn haar_state<R: rand::Rng + ?Sized>(rng: &mut R) -> PureState2Q {
    loop {
        let mut amps = [C64::new(0.0, 0.0); 4];
        for z in amps.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *z = C64::new(re, im);
        }
        if let Ok(s) = PureState2Q::normalized(amps) {
            return s;
        }
    }
}

/// `n` independent pairs of Haar-random states, deterministic in `seed`.
pub fn sample_random_pairs(n: usize, seed: u64) -> Vec<StatePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = haar_state(&mut rng);
            let b = haar_state(&mut rng);
            (a, b)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPair {
    pub label: String,
    pub pair: StatePair,
}

/// The two Bell pairs `(|00⟩ ± |11⟩)/√2` and `(|01⟩ ± |10⟩)/√2`.
pub fn bell_candidates() -> Vec<LabeledPair> {
    vec![
        LabeledPair {
            label: "bell_phi".into(),
            pair: (PureState2Q::phi_plus(), PureState2Q::phi_minus()),
        },
        LabeledPair {
            label: "bell_psi".into(),
            pair: (PureState2Q::psi_plus(), PureState2Q::psi_minus()),
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub n_value: f64,
    pub best_label: String,
    pub best_pair: StatePair,
    /// Measures of the sampled pairs, in sampling order.
    pub per_pair_values: Vec<f64>,
    /// Measures of the deterministic candidates, in candidate order.
    pub candidate_values: Vec<(String, f64)>,
}

impl MeasureResult {
    /// Largest measure among the deterministic candidates.
    pub fn best_candidate_value(&self) -> f64 {
        self.candidate_values
            .iter()
            .map(|c| c.1)
            .fold(0.0, f64::max)
    }
}

/// Evaluate the measure on the candidates (Bell pairs always included) and on
/// `n_samples` Haar-random pairs, returning the maximum.
///
/// Evaluation order is candidates first, then samples by index; ties keep the
/// earlier pair.
pub fn maximize_measure<M: DecoherenceModel + ?Sized>(
    model: &M,
    schedule: &InteractionSchedule,
    grid: TimeGrid,
    n_samples: usize,
    seed: u64,
    candidates: &[LabeledPair],
) -> Result<MeasureResult> {
    let dynamics = SampledDynamics::new(model, schedule, grid)?;
    maximize_on(&dynamics, n_samples, seed, candidates)
}

/// [`maximize_measure`] on precomputed dynamics.
pub fn maximize_on(
    dynamics: &SampledDynamics,
    n_samples: usize,
    seed: u64,
    candidates: &[LabeledPair],
) -> Result<MeasureResult> {
    let mut all: Vec<LabeledPair> = candidates.to_vec();
    for bell in bell_candidates() {
        if !all.iter().any(|c| c.pair == bell.pair) {
            all.push(bell);
        }
    }

    let eval = |pair: &StatePair| {
        dynamics
            .trajectory(pair)
            .map(|t| measure_from_trajectory(&t))
    };

    let candidate_values = all
        .iter()
        .map(|c| Ok((c.label.clone(), eval(&c.pair)?)))
        .collect::<Result<Vec<_>>>()?;
    let samples = sample_random_pairs(n_samples, seed);
    let per_pair_values = samples.iter().map(eval).collect::<Result<Vec<_>>>()?;

    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, v) in candidate_values
        .iter()
        .map(|c| c.1)
        .chain(per_pair_values.iter().copied())
        .enumerate()
    {
        if v > best.1 {
            best = (i, v);
        }
    }
    let (best_label, best_pair) = if best.0 < all.len() {
        (all[best.0].label.clone(), all[best.0].pair)
    } else {
        let k = best.0 - all.len();
        (format!("sample_{k}"), samples[k])
    };

    Ok(MeasureResult {
        n_value: best.1.max(0.0),
        best_label,
        best_pair,
        per_pair_values,
        candidate_values,
    })
}
