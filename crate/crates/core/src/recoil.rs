//! Recoil (Franck-Condon) probabilities for the de-excited atom.
//!
//! The atom starts in the motional ground state. A photon emitted along the
//! unit vector u kicks it by ħk₀u, and the probability to land in the
//! oscillator state (n_x, n_y, n_z) factorizes over the axes:
//!
//! ```text
//! |⟨n|e^{-ik·r}|0⟩|² = Π_i e^{-μ_i} μ_i^{n_i} / n_i!,    μ_i = η² u_i² / λ_i
//! ```
//!
//! with λ_i the axis frequency in units of ω. The two equal axes combine into
//! a single Poisson variable, so a shell sum only runs over the tight quanta.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{AngularAverage, AngularWeight};
use crate::special::{poisson_pmf, poisson_table, poisson_tail_cutoff, CompensatedSum};
use crate::trap::{OscillatorState, Shape, TrapGeometry};

/// Tail mass dropped per Poisson factor when a sum must be truncated.
pub const TRUNCATION_EPS: f64 = 1e-13;

/// Direction of the emitted photon. θ is measured from the z axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonDirection {
    theta: f64,
    phi: f64,
}

impl PhotonDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", format!("polar angle must lie in [0, π], got {theta}")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::invalid("phi", format!("azimuth must lie in [0, 2π), got {phi}")));
        }
        Ok(Self { theta, phi })
    }

    /// Direction with φ = 0.
    pub fn polar(theta: f64) -> Result<Self> {
        Self::new(theta, 0.0)
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub(crate) fn squares(&self) -> AngleSquares {
        AngleSquares::from_theta(self.theta)
    }
}

/// cos²θ and sin²θ, each computed directly so that neither loses precision
/// near the axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AngleSquares {
    pub cos2: f64,
    pub sin2: f64,
}

impl AngleSquares {
    pub fn from_theta(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            cos2: c * c,
            sin2: s * s,
        }
    }

    pub fn from_cos(c: f64) -> Self {
        Self {
            cos2: c * c,
            sin2: (1.0 - c) * (1.0 + c),
        }
    }
}

/// Poisson means of the three axes for one photon direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisParameters {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AxisParameters {
    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Squared Lamb-Dicke parameter η² = E_R/ħω for a given trap. η² is the
/// mean number of soft-axis quanta a recoil deposits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilCoupling {
    eta2: f64,
    geom: TrapGeometry,
}

impl RecoilCoupling {
    pub fn new(geom: TrapGeometry, eta2: f64) -> Result<Self> {
        if !(eta2.is_finite() && eta2 >= 0.0) {
            return Err(Error::invalid("eta2", format!("squared Lamb-Dicke parameter must be finite and >= 0, got {eta2}")));
        }
        Ok(Self { eta2, geom })
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn geometry(&self) -> TrapGeometry {
        self.geom
    }

    /// μ_i = η² u_i² / λ_i.
    pub fn axis_poisson_parameters(&self, dir: PhotonDirection) -> AxisParameters {
        let u = dir.unit_vector();
        let f = self.geom.axis_frequencies();
        let mu = |i: usize| self.eta2 * u[i] * u[i] / f[i] as f64;
        AxisParameters {
            x: mu(0),
            y: mu(1),
            z: mu(2),
        }
    }

    /// (α, β): η² times the squared direction cosine along the tight
    /// direction(s) and along the soft direction(s) respectively.
    pub(crate) fn alpha_beta(&self, sq: AngleSquares) -> (f64, f64) {
        match self.geom.shape() {
            Shape::Pancake => (self.eta2 * sq.cos2, self.eta2 * sq.sin2),
            Shape::Cigar => (self.eta2 * sq.sin2, self.eta2 * sq.cos2),
        }
    }

    /// Poisson means of the summed tight quanta and summed soft quanta.
    pub(crate) fn tight_soft(&self, sq: AngleSquares) -> (f64, f64) {
        let (alpha, beta) = self.alpha_beta(sq);
        (alpha / f64::from(self.geom.lambda()), beta)
    }

    pub fn state_emission_probability(&self, dir: PhotonDirection, state: OscillatorState) -> f64 {
        let mu = self.axis_poisson_parameters(dir).as_array();
        state
            .quanta()
            .iter()
            .zip(mu)
            .map(|(&n, m)| poisson_pmf(n, m))
            .product()
    }

    /// State probability averaged over photon directions.
    ///
    /// The azimuthal average uses the trapezoid rule with 2(n_x+n_y)+2
    /// points, which is exact because the integrand is a trigonometric
    /// polynomial of degree 2(n_x+n_y) in φ.
    pub fn state_emission_probability_averaged(&self, state: OscillatorState, avg: &AngularAverage) -> f64 {
        let points = 2 * (state.nx + state.ny) + 2;
        let [fx, fy, fz] = self.geom.axis_frequencies().map(|f| f as f64);
        avg.average(|c| {
            let sq = AngleSquares::from_cos(c);
            let pz = poisson_pmf(state.nz, self.eta2 * sq.cos2 / fz);
            if pz == 0.0 {
                return 0.0;
            }
            let planar = self.eta2 * sq.sin2;
            let azimuthal: CompensatedSum = (0..points)
                .map(|i| {
                    let (sp, cp) = (TAU * i as f64 / points as f64).sin_cos();
                    poisson_pmf(state.nx, planar * cp * cp / fx) * poisson_pmf(state.ny, planar * sp * sp / fy)
                })
                .collect();
            pz * azimuthal.value() / points as f64
        })
    }

    /// Probability of landing anywhere in shell `n` for a fixed photon
    /// direction.
    pub fn shell_emission_probability_at(&self, dir: PhotonDirection, n: u64) -> f64 {
        self.shell_probability_from(dir.squares(), n)
    }

    pub(crate) fn shell_probability_from(&self, sq: AngleSquares, n: u64) -> f64 {
        let (tight, soft) = self.tight_soft(sq);
        let l = u64::from(self.geom.lambda());
        let acc: CompensatedSum = (0..=n / l)
            .map(|j| poisson_pmf(j, tight) * poisson_pmf(n - l * j, soft))
            .collect();
        acc.value()
    }

    /// Shell probability averaged uniformly over photon directions with the
    /// default quadrature.
    pub fn shell_emission_probability(&self, n: u64) -> f64 {
        self.shell_emission_probability_with(n, &AngularAverage::default())
    }

    pub fn shell_emission_probability_with(&self, n: u64, avg: &AngularAverage) -> f64 {
        avg.average(|c| self.shell_probability_from(AngleSquares::from_cos(c), n))
    }

    /// Last shell that can carry more than [`TRUNCATION_EPS`] of probability
    /// from either Poisson factor, for any photon direction.
    pub fn shell_range(&self) -> u64 {
        let l = self.geom.lambda();
        let soft = poisson_tail_cutoff(self.eta2, TRUNCATION_EPS);
        let tight = poisson_tail_cutoff(self.eta2 / f64::from(l), TRUNCATION_EPS);
        soft + u64::from(l) * tight
    }

    /// P_e(n) for n = 0..=n_max in a fixed direction.
    pub fn shell_spectrum_at(&self, dir: PhotonDirection, n_max: u64) -> ShellSpectrum {
        ShellSpectrum {
            probabilities: self.spectrum_row(dir.squares(), n_max),
            eta2: self.eta2,
            geom: self.geom,
            direction: SpectrumDirection::Fixed {
                theta: dir.theta(),
                phi: dir.phi(),
            },
        }
    }

    /// P_e(n) for n = 0..=n_max averaged over photon directions.
    pub fn shell_spectrum(&self, n_max: u64, avg: &AngularAverage) -> ShellSpectrum {
        // one full spectrum per quadrature node, reduced in node order
        let per_node: Vec<Vec<f64>> = avg
            .weighted_nodes()
            .into_par_iter()
            .map(|(c, w)| {
                self.spectrum_row(AngleSquares::from_cos(c), n_max)
                    .into_iter()
                    .map(|p| w * p)
                    .collect()
            })
            .collect();
        let probabilities = (0..=n_max as usize)
            .map(|n| per_node.iter().map(|row| row[n]).sum())
            .collect();
        ShellSpectrum {
            probabilities,
            eta2: self.eta2,
            geom: self.geom,
            direction: SpectrumDirection::Averaged {
                weight: avg.weight(),
                nodes: avg.nodes(),
            },
        }
    }

    fn spectrum_row(&self, sq: AngleSquares, n_max: u64) -> Vec<f64> {
        let (tight, soft) = self.tight_soft(sq);
        let l = u64::from(self.geom.lambda());
        let soft_table = poisson_table(soft, n_max);
        let tight_table = poisson_table(tight, n_max / l);
        (0..=n_max)
            .map(|n| {
                let acc: CompensatedSum = (0..=n / l)
                    .map(|j| tight_table[j as usize] * soft_table[(n - l * j) as usize])
                    .collect();
                acc.value()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumDirection {
    Fixed { theta: f64, phi: f64 },
    Averaged { weight: AngularWeight, nodes: usize },
}

/// Emission probability into each shell n = 0..=n_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSpectrum {
    probabilities: Vec<f64>,
    eta2: f64,
    geom: TrapGeometry,
    direction: SpectrumDirection,
}

impl ShellSpectrum {
    pub fn get(&self, n: u64) -> Option<f64> {
        self.probabilities.get(n as usize).copied()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn n_max(&self) -> u64 {
        self.probabilities.len() as u64 - 1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn geometry(&self) -> TrapGeometry {
        self.geom
    }

    pub fn direction(&self) -> SpectrumDirection {
        self.direction
    }

    /// Probability mass covered by the computed shells.
    pub fn total(&self) -> f64 {
        self.probabilities.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Mean shell index Σ n P_e(n) / Σ P_e(n).
    pub fn mean(&self) -> f64 {
        let first: CompensatedSum = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .collect();
        first.value() / self.total()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probabilities.iter().enumerate().map(|(n, &p)| (n as u64, p))
    }
}

/// Polar angle of the tight axis: θ = 0 for a pancake, θ = π/2 for a cigar.
pub fn tight_axis_theta(shape: Shape) -> f64 {
    match shape {
        Shape::Pancake => 0.0,
        Shape::Cigar => FRAC_PI_2,
    }
}

/// Polar angle of a soft axis.
pub fn soft_axis_theta(shape: Shape) -> f64 {
    match shape {
        Shape::Pancake => FRAC_PI_2,
        Shape::Cigar => 0.0,
    }
}
