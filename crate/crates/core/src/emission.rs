//! Direction-resolved modification of the spontaneous emission rate by the
//! Fermi sea.
//!
//! At zero temperature the recoiling atom may only land in shells above the
//! Fermi shell n_F, so
//!
//! ```text
//! M_f(θ) = Γ(θ)/Γ₀(θ) = Σ_{shell(n) > n_F} |⟨n|e^{-ik·r}|0⟩|².
//! ```
//!
//! Splitting every state into its soft quanta m (Poisson with mean β) and
//! its tight quanta j (Poisson with mean α/λ), the blocked region
//! m + λj ≤ n_F sums to a closed form in the regularized incomplete gamma
//! function P:
//!
//! ```text
//! M_f = P(n_F+1, β) + Σ_{m=0}^{n_F} Poisson(m; β) P(⌊(n_F-m)/λ⌋+1, α/λ)
//! ```
//!
//! where α = η²cos²θ, β = η²sin²θ for a pancake and the two are swapped for
//! a cigar. [`modification_factor_bruteforce`] evaluates the defining
//! state sum directly and serves as the oracle for the closed form.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::AngularAverage;
use crate::recoil::{AngleSquares, PhotonDirection, RecoilCoupling, TRUNCATION_EPS};
use crate::special::{poisson_pmf, poisson_table, poisson_tail_cutoff, regularized_gamma_p, CompensatedSum};
use crate::trap::{FermiSea, TrapGeometry};

/// Largest number of lattice points the brute-force state sum will visit.
pub const BRUTEFORCE_STATE_LIMIT: u64 = 400_000_000;

/// Minimum number of samples over [0, π] for [`count_interior_maxima`].
pub const MIN_MAXIMA_SAMPLES: usize = 360;

/// Values closer than this are treated as one plateau when counting maxima.
pub const PLATEAU_TOLERANCE: f64 = 1e-12;

/// Trap, Fermi sea and recoil strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionProblem {
    geom: TrapGeometry,
    sea: FermiSea,
    eta2: f64,
}

impl EmissionProblem {
    pub fn new(geom: TrapGeometry, sea: FermiSea, eta2: f64) -> Result<Self> {
        // validates eta2
        RecoilCoupling::new(geom, eta2)?;
        Ok(Self { geom, sea, eta2 })
    }

    pub fn geometry(&self) -> TrapGeometry {
        self.geom
    }

    pub fn sea(&self) -> FermiSea {
        self.sea
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn coupling(&self) -> RecoilCoupling {
        RecoilCoupling::new(self.geom, self.eta2).expect("validated at construction")
    }

    pub fn with_sea(&self, sea: FermiSea) -> Self {
        Self { sea, ..*self }
    }

    pub fn with_geometry(&self, geom: TrapGeometry) -> Self {
        Self { geom, ..*self }
    }

    fn lambda(&self) -> f64 {
        f64::from(self.geom.lambda())
    }
}

/// (α, β) for polar angle θ.
pub fn alpha_beta(problem: &EmissionProblem, theta: f64) -> (f64, f64) {
    problem.coupling().alpha_beta(AngleSquares::from_theta(theta))
}

/// M_f(θ) from the incomplete-gamma closed form.
pub fn modification_factor(problem: &EmissionProblem, theta: f64) -> f64 {
    factor_at(problem, AngleSquares::from_theta(theta))
}

fn factor_at(problem: &EmissionProblem, sq: AngleSquares) -> f64 {
    if problem.sea.is_empty() {
        return 1.0;
    }
    let (alpha, beta) = problem.coupling().alpha_beta(sq);
    let n_f = problem.sea.n_f() as u64;
    let lambda = u64::from(problem.geom.lambda());
    let tight = alpha / problem.lambda();
    // P(K+1, α/λ) for every K = ⌊(n_F - m)/λ⌋ that can occur
    let unblocked_tight: Vec<f64> = (0..=n_f / lambda)
        .map(|k| regularized_gamma_p(k + 1, tight))
        .collect();

    let mut acc = CompensatedSum::new();
    acc.add(regularized_gamma_p(n_f + 1, beta));
    for m in 0..=n_f {
        let w = poisson_pmf(m, beta);
        if w == 0.0 && m as f64 > beta {
            break;
        }
        acc.add(w * unblocked_tight[((n_f - m) / lambda) as usize]);
    }
    acc.value().clamp(0.0, 1.0)
}

/// M_f(θ, φ) as the direct sum of single-state recoil probabilities over
/// every unblocked oscillator state.
///
/// Each axis is truncated where its Poisson tail drops below 1e-13, so the
/// result is low by at most 3e-13.
pub fn modification_factor_bruteforce(problem: &EmissionProblem, theta: f64, phi: f64) -> Result<f64> {
    let dir = PhotonDirection::new(theta, phi)?;
    let mu = problem.coupling().axis_poisson_parameters(dir).as_array();
    let cutoffs = mu.map(|m| poisson_tail_cutoff(m, TRUNCATION_EPS));
    let points = cutoffs.iter().map(|&k| k + 1).product::<u64>();
    if points > BRUTEFORCE_STATE_LIMIT {
        return Err(Error::Bounds {
            what: "brute-force lattice size",
            value: points,
            limit: BRUTEFORCE_STATE_LIMIT,
        });
    }
    let [px, py, pz] = [0, 1, 2].map(|i| poisson_table(mu[i], cutoffs[i]));
    let geom = problem.geom;
    let sea = problem.sea;

    let mut acc = CompensatedSum::new();
    for (nx, wx) in px.iter().enumerate() {
        for (ny, wy) in py.iter().enumerate() {
            let wxy = wx * wy;
            for (nz, wz) in pz.iter().enumerate() {
                let state = crate::trap::OscillatorState::new(nx as u64, ny as u64, nz as u64);
                if !sea.blocks(geom.shell_index(state)) {
                    acc.add(wxy * wz);
                }
            }
        }
    }
    Ok(acc.value())
}

/// M_f along the tight axis: P(⌊n_F/λ⌋+1, η²/λ).
pub fn tight_axis_factor(problem: &EmissionProblem) -> f64 {
    match problem.sea.tight_excitations(problem.geom.lambda()) {
        None => 1.0,
        Some(t) => regularized_gamma_p(t + 1, problem.eta2 / problem.lambda()),
    }
}

/// Tight-axis factor for a real aspect ratio. The closed form only needs
/// ⌊n_F/λ⌋ and η²/λ, so it extends to non-integer λ.
pub fn tight_axis_factor_real(eta2: f64, sea: FermiSea, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("aspect ratio must be finite and > 0, got {lambda}")));
    }
    if !(eta2.is_finite() && eta2 >= 0.0) {
        return Err(Error::invalid("eta2", format!("must be finite and >= 0, got {eta2}")));
    }
    if sea.is_empty() {
        return Ok(1.0);
    }
    let excitations = (sea.n_f() as f64 / lambda).floor() as u64;
    Ok(regularized_gamma_p(excitations + 1, eta2 / lambda))
}

/// M_f along the soft axis: P(n_F+1, η²), independent of λ.
pub fn soft_axis_factor(problem: &EmissionProblem) -> f64 {
    regularized_gamma_p((problem.sea.n_f() + 1) as u64, problem.eta2)
}

/// Power term used in a partial wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartialWaveForm {
    /// Poisson(j; α/λ): the partial waves sum exactly to M_f.
    #[default]
    Decomposition,
    /// e^{-α/λ} (η²/λ)^j / j!. Agrees with `Decomposition` on the tight axis
    /// only.
    Literal,
}

/// Contribution of final states with exactly `tight_quanta` tight-axis
/// quanta (n_z for a pancake, n_x + n_y for a cigar):
///
/// ```text
/// Poisson(j; α/λ) · P(max(0, n_F - λj + 1), β)
/// ```
///
/// With P(0, ·) = 1, a level lying entirely above the Fermi shell
/// contributes its full Poisson weight.
pub fn partial_wave_factor(problem: &EmissionProblem, theta: f64, tight_quanta: u64, form: PartialWaveForm) -> f64 {
    partial_wave_at(problem, AngleSquares::from_theta(theta), tight_quanta, form)
}

fn partial_wave_at(problem: &EmissionProblem, sq: AngleSquares, j: u64, form: PartialWaveForm) -> f64 {
    let (alpha, beta) = problem.coupling().alpha_beta(sq);
    let lambda = problem.lambda();
    let weight = match form {
        PartialWaveForm::Decomposition => poisson_pmf(j, alpha / lambda),
        // e^{-α/λ} = e^{-η²/λ} e^{β/λ}
        PartialWaveForm::Literal => poisson_pmf(j, problem.eta2 / lambda) * (beta / lambda).exp(),
    };
    let blocked_soft = problem.sea.n_f() + 1 - i64::from(problem.geom.lambda()) * j as i64;
    weight * regularized_gamma_p(blocked_soft.max(0) as u64, beta)
}

/// Σ_{j ≥ from} of [`partial_wave_factor`], truncated where the Poisson
/// weight of the remaining levels is below 1e-15.
pub fn partial_wave_tail(problem: &EmissionProblem, theta: f64, from: u64, form: PartialWaveForm) -> f64 {
    partial_wave_tail_at(problem, AngleSquares::from_theta(theta), from, form)
}

fn partial_wave_tail_at(problem: &EmissionProblem, sq: AngleSquares, from: u64, form: PartialWaveForm) -> f64 {
    let mu = match form {
        PartialWaveForm::Decomposition => problem.coupling().tight_soft(sq).0,
        PartialWaveForm::Literal => problem.eta2 / problem.lambda(),
    };
    let last = poisson_tail_cutoff(mu, 1e-15);
    (from..=last.max(from))
        .map(|j| partial_wave_at(problem, sq, j, form))
        .collect::<CompensatedSum>()
        .value()
}

/// λ → ∞ limit: P(n_F+1, β). The aspect ratio of `problem` is ignored.
pub fn limit_factor(problem: &EmissionProblem, theta: f64) -> f64 {
    limit_at(problem, AngleSquares::from_theta(theta))
}

fn limit_at(problem: &EmissionProblem, sq: AngleSquares) -> f64 {
    let (_, beta) = problem.coupling().alpha_beta(sq);
    regularized_gamma_p((problem.sea.n_f() + 1) as u64, beta)
}

/// M_f averaged uniformly over photon directions.
pub fn angle_averaged_factor(problem: &EmissionProblem) -> f64 {
    angle_averaged_factor_with(problem, &AngularAverage::default())
}

pub fn angle_averaged_factor_with(problem: &EmissionProblem, avg: &AngularAverage) -> f64 {
    if problem.sea.is_empty() {
        return 1.0;
    }
    avg.average(|c| factor_at(problem, AngleSquares::from_cos(c)))
}

/// As [`angle_averaged_factor_with`], failing if node doubling moves the
/// result by more than the quadrature tolerance.
pub fn angle_averaged_factor_checked(problem: &EmissionProblem, avg: &AngularAverage) -> Result<f64> {
    if problem.sea.is_empty() {
        return Ok(1.0);
    }
    avg.average_checked(|c| factor_at(problem, AngleSquares::from_cos(c)))
}

/// What to evaluate on each grid angle of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatternVariant {
    /// The closed-form modification factor.
    #[default]
    Full,
    /// The λ → ∞ limit.
    Limit,
    /// A single partial wave with `tight_quanta` tight-axis quanta.
    PartialWave { tight_quanta: u64, form: PartialWaveForm },
    /// All partial waves with at least `from` tight-axis quanta.
    PartialWaveTail { from: u64, form: PartialWaveForm },
}

impl PatternVariant {
    fn evaluate(&self, problem: &EmissionProblem, sq: AngleSquares) -> f64 {
        match *self {
            PatternVariant::Full => factor_at(problem, sq),
            PatternVariant::Limit => limit_at(problem, sq),
            PatternVariant::PartialWave { tight_quanta, form } => partial_wave_at(problem, sq, tight_quanta, form),
            PatternVariant::PartialWaveTail { from, form } => partial_wave_tail_at(problem, sq, from, form),
        }
    }
}

/// A pattern sampled on the uniform grid θ_i = iπ/(N-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularPattern {
    theta: Vec<f64>,
    values: Vec<f64>,
    problem: EmissionProblem,
    variant: PatternVariant,
}

impl AngularPattern {
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn problem(&self) -> &EmissionProblem {
        &self.problem
    }

    pub fn variant(&self) -> PatternVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn theta_degrees(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta.iter().map(|t| t.to_degrees())
    }

    pub fn count_interior_maxima(&self) -> Result<usize> {
        count_interior_maxima(self)
    }
}

/// Samples a pattern at `theta_count` uniformly spaced angles in [0, π].
///
/// Patterns depend on θ only through cos²θ and sin²θ, so the half [0, π/2]
/// is computed and mirrored.
pub fn sample_pattern(problem: &EmissionProblem, theta_count: usize, variant: PatternVariant) -> Result<AngularPattern> {
    if theta_count < 2 {
        return Err(Error::invalid("theta_count", format!("need at least 2 samples, got {theta_count}")));
    }
    let last = theta_count - 1;
    let theta: Vec<f64> = (0..theta_count).map(|i| PI * i as f64 / last as f64).collect();
    let half: Vec<f64> = theta[..=last / 2]
        .par_iter()
        .map(|&t| variant.evaluate(problem, AngleSquares::from_theta(t)))
        .collect();
    let values = (0..theta_count).map(|i| half[i.min(last - i)]).collect();
    Ok(AngularPattern {
        theta,
        values,
        problem: *problem,
        variant,
    })
}

/// Number of local maxima strictly between θ = 0 and θ = π/2.
///
/// Neighbouring samples within [`PLATEAU_TOLERANCE`] form one plateau, and a
/// plateau counts once if both adjacent plateaus are lower.
pub fn count_interior_maxima(pattern: &AngularPattern) -> Result<usize> {
    if pattern.len() < MIN_MAXIMA_SAMPLES {
        return Err(Error::Resolution {
            samples: pattern.len(),
            required: MIN_MAXIMA_SAMPLES,
        });
    }
    let quarter = std::f64::consts::FRAC_PI_2;
    let window: Vec<(f64, f64)> = pattern
        .theta
        .iter()
        .zip(&pattern.values)
        .take_while(|(t, _)| **t <= quarter + 1e-12)
        .map(|(&t, &v)| (t, v))
        .collect();

    // (first θ, last θ, value) of each plateau
    let mut plateaus: Vec<(f64, f64, f64)> = Vec::new();
    for &(t, v) in &window {
        match plateaus.last_mut() {
            Some(p) if (v - p.2).abs() <= PLATEAU_TOLERANCE => p.1 = t,
            _ => plateaus.push((t, t, v)),
        }
    }
    let interior = |p: &(f64, f64, f64)| p.0 > 0.0 && p.1 < quarter - 1e-12;
    Ok(plateaus
        .windows(3)
        .filter(|w| interior(&w[1]) && w[1].2 > w[0].2 && w[1].2 > w[2].2)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trap::Shape;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn problem(shape: Shape, lambda: u32, eta2: f64, n_f: i64) -> EmissionProblem {
        EmissionProblem::new(
            TrapGeometry::new(shape, lambda).unwrap(),
            FermiSea::new(n_f).unwrap(),
            eta2,
        )
        .unwrap()
    }

    #[test]
    fn alpha_beta_assignment() {
        let p = problem(Shape::Pancake, 3, 25.0, 4);
        assert_eq!(alpha_beta(&p, 0.0), (25.0, 0.0));
        let (a, b) = alpha_beta(&p, FRAC_PI_4);
        assert!((a - 12.5).abs() < 1e-13 && (b - 12.5).abs() < 1e-13);
        let c = problem(Shape::Cigar, 3, 25.0, 4);
        assert_eq!(alpha_beta(&c, 0.0), (0.0, 25.0));
        for t in [0.1, 0.8, 2.2] {
            let (a, b) = alpha_beta(&c, t);
            assert!((a + b - 25.0).abs() < 1e-13);
        }
    }

    #[test]
    fn empty_trap_and_zero_recoil() {
        for t in [0.0, 0.4, FRAC_PI_2, 3.0] {
            assert_eq!(modification_factor(&problem(Shape::Pancake, 5, 9.0, -1), t), 1.0);
            assert_eq!(modification_factor(&problem(Shape::Cigar, 5, 0.0, 0), t), 0.0);
            assert_eq!(modification_factor(&problem(Shape::Cigar, 5, 0.0, 12), t), 0.0);
        }
        let empty = problem(Shape::Cigar, 4, 10.0, -1);
        assert_eq!(tight_axis_factor(&empty), 1.0);
        assert_eq!(soft_axis_factor(&empty), 1.0);
        assert_eq!(limit_factor(&empty, 0.7), 1.0);
        assert_eq!(angle_averaged_factor(&empty), 1.0);
    }

    #[test]
    fn closed_form_matches_state_sum_on_small_case() {
        let p = problem(Shape::Pancake, 3, 4.0, 5);
        for t in [0.0, 0.5, 1.2, FRAC_PI_2] {
            let brute = modification_factor_bruteforce(&p, t, 0.3).unwrap();
            assert!((modification_factor(&p, t) - brute).abs() < 1e-12, "θ = {t}");
        }
    }

    #[test]
    fn tight_axis_plateau_in_fermi_shell() {
        let base = problem(Shape::Pancake, 4, 25.0, 32);
        let v32 = tight_axis_factor(&base);
        for n_f in 33..=35 {
            assert_eq!(tight_axis_factor(&base.with_sea(FermiSea::new(n_f).unwrap())), v32);
        }
        assert!(tight_axis_factor(&base.with_sea(FermiSea::new(36).unwrap())) < v32);
    }

    #[test]
    fn soft_axis_independent_of_lambda() {
        let v = soft_axis_factor(&problem(Shape::Pancake, 2, 25.0, 23));
        for lambda in [1, 7, 11, 40] {
            assert_eq!(soft_axis_factor(&problem(Shape::Pancake, lambda, 25.0, 23)), v);
            assert_eq!(soft_axis_factor(&problem(Shape::Cigar, lambda, 25.0, 23)), v);
        }
    }

    #[test]
    fn real_lambda_matches_integer_lambda() {
        let sea = FermiSea::new(60).unwrap();
        for lambda in [1u32, 7, 30, 31, 61] {
            let p = problem(Shape::Pancake, lambda, 49.0, 60);
            assert_eq!(tight_axis_factor_real(49.0, sea, f64::from(lambda)).unwrap(), tight_axis_factor(&p));
        }
        assert!(tight_axis_factor_real(49.0, sea, 0.0).is_err());
    }

    #[test]
    fn limit_vanishes_on_tight_axis() {
        let p = problem(Shape::Cigar, 46, 49.0, 45);
        assert_eq!(limit_factor(&p, FRAC_PI_2), 0.0);
        let p = problem(Shape::Pancake, 46, 49.0, 0);
        assert_eq!(limit_factor(&p, 0.0), 0.0);
    }

    #[test]
    fn partial_wave_above_fermi_shell_is_pure_poisson() {
        let p = problem(Shape::Pancake, 11, 25.0, 23);
        for j in 3..8 {
            let got = partial_wave_factor(&p, 0.0, j, PartialWaveForm::Decomposition);
            assert!((got - poisson_pmf(j, 25.0 / 11.0)).abs() < 1e-16);
            let lit = partial_wave_factor(&p, 0.0, j, PartialWaveForm::Literal);
            assert_eq!(lit, got);
        }
    }

    #[test]
    fn partial_waves_sum_to_full_factor() {
        let p = problem(Shape::Cigar, 6, 16.0, 20);
        for t in [0.0, 0.3, 1.0, FRAC_PI_2] {
            let head: f64 = (0..3).map(|j| partial_wave_factor(&p, t, j, PartialWaveForm::Decomposition)).sum();
            let tail = partial_wave_tail(&p, t, 3, PartialWaveForm::Decomposition);
            assert!((head + tail - modification_factor(&p, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn pattern_grid_and_mirror() {
        let p = problem(Shape::Pancake, 11, 25.0, 23);
        let pat = sample_pattern(&p, 7, PatternVariant::Full).unwrap();
        assert_eq!(pat.theta().len(), 7);
        assert_eq!(pat.theta()[0], 0.0);
        assert_eq!(pat.theta()[6], PI);
        for i in 0..7 {
            assert_eq!(pat.values()[i], pat.values()[6 - i]);
        }
        assert!((pat.values()[2] - modification_factor(&p, pat.theta()[2])).abs() < 1e-15);
        assert!(sample_pattern(&p, 1, PatternVariant::Full).is_err());
        let empty = sample_pattern(&p.with_sea(FermiSea::EMPTY), 9, PatternVariant::Full).unwrap();
        assert!(empty.values().iter().all(|&v| v == 1.0));
    }

    fn synthetic(values: Vec<f64>) -> AngularPattern {
        let n = values.len();
        AngularPattern {
            theta: (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect(),
            values,
            problem: problem(Shape::Pancake, 1, 1.0, 0),
            variant: PatternVariant::Full,
        }
    }

    #[test]
    fn maxima_counting_rules() {
        assert!(matches!(
            count_interior_maxima(&synthetic(vec![1.0; 100])),
            Err(Error::Resolution { samples: 100, .. })
        ));
        assert_eq!(count_interior_maxima(&synthetic(vec![0.5; 721])).unwrap(), 0);

        // two bumps in (0, π/2), one at π/2 exactly, mirrored
        let vals: Vec<f64> = (0..721)
            .map(|i| {
                let t = PI * i as f64 / 720.0;
                (4.0 * t).sin().powi(2) + 0.1 * t
            })
            .collect();
        assert_eq!(count_interior_maxima(&synthetic(vals)).unwrap(), 2);

        // a flat-topped bump counts once
        let vals: Vec<f64> = (0..721)
            .map(|i| match i {
                100..=120 => 1.0,
                _ => 0.0,
            })
            .collect();
        assert_eq!(count_interior_maxima(&synthetic(vals)).unwrap(), 1);

        // a maximum at θ = 0 is not interior
        let vals: Vec<f64> = (0..721).map(|i| (-(i as f64) / 50.0).exp()).collect();
        assert_eq!(count_interior_maxima(&synthetic(vals)).unwrap(), 0);
    }
}
