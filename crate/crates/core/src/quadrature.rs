//! Gauss-Legendre quadrature and averages over photon directions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 256;

/// Largest change tolerated between an `n`-node and a `2n`-node average.
pub const DOUBLING_TOLERANCE: f64 = 1e-10;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from Tricomi's initial
    /// guesses. Nodes are returned in ascending order.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    dp = legendre_with_derivative(n, x).1;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f(x) dx.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Angular measure for averaging over photon directions. Both are
/// normalized probability measures on the sphere and azimuthally symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularWeight {
    /// dΩ / 4π.
    #[default]
    Uniform,
    /// Dipole pattern of a transition dipole along z: (3/8π) sin²θ dΩ.
    DipoleZ,
}

impl AngularWeight {
    /// Density with respect to d(cos θ) on [-1, 1].
    pub fn density(self, cos_theta: f64) -> f64 {
        match self {
            AngularWeight::Uniform => 0.5,
            AngularWeight::DipoleZ => 0.75 * (1.0 - cos_theta * cos_theta),
        }
    }
}

/// Average of an azimuthally symmetric quantity over photon directions,
/// computed with Gauss-Legendre quadrature in cos θ.
#[derive(Debug, Clone)]
pub struct AngularAverage {
    rule: GaussLegendre,
    weight: AngularWeight,
}

impl Default for AngularAverage {
    fn default() -> Self {
        Self::new(DEFAULT_NODES, AngularWeight::Uniform)
    }
}

impl AngularAverage {
    pub fn new(nodes: usize, weight: AngularWeight) -> Self {
        Self {
            rule: GaussLegendre::new(nodes),
            weight,
        }
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    pub fn weight(&self) -> AngularWeight {
        self.weight
    }

    /// (cos θ, quadrature weight × measure density) for every node.
    pub fn weighted_nodes(&self) -> Vec<(f64, f64)> {
        self.rule
            .nodes()
            .iter()
            .zip(self.rule.weights())
            .map(|(&c, &w)| (c, w * self.weight.density(c)))
            .collect()
    }

    /// ⟨f⟩ where `f` takes cos θ. Node evaluations run in parallel and are
    /// reduced in node order, so the result does not depend on scheduling.
    pub fn average<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        average_with(&self.rule, self.weight, f)
    }

    /// Like [`average`](Self::average) but also evaluates the rule with
    /// twice the nodes and fails if the two differ by more than
    /// [`DOUBLING_TOLERANCE`].
    pub fn average_checked<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let coarse = average_with(&self.rule, self.weight, &f);
        let fine_rule = GaussLegendre::new(2 * self.rule.len());
        let fine = average_with(&fine_rule, self.weight, &f);
        let delta = (fine - coarse).abs();
        if delta > DOUBLING_TOLERANCE {
            return Err(Error::Quadrature { delta });
        }
        Ok(coarse)
    }
}

fn average_with<F>(rule: &GaussLegendre, weight: AngularWeight, f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let terms: Vec<f64> = rule
        .nodes()
        .par_iter()
        .zip(rule.weights().par_iter())
        .map(|(&c, &w)| w * weight.density(c) * f(c))
        .collect();
    terms.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 64, 256, 512] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        for deg in 0..16 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg));
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
        let got = rule.integrate(0.0, 2.0, |x| x * x * x);
        assert!((got - 4.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrand() {
        let rule = GaussLegendre::new(256);
        let got = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn measures_are_normalized() {
        for weight in [AngularWeight::Uniform, AngularWeight::DipoleZ] {
            let avg = AngularAverage::new(64, weight);
            assert!((avg.average(|_| 1.0) - 1.0).abs() < 1e-14);
        }
        // ⟨cos²θ⟩ = 1/3 uniformly, 1/5 for the sin²θ dipole pattern
        let uni = AngularAverage::new(64, AngularWeight::Uniform);
        assert!((uni.average(|c| c * c) - 1.0 / 3.0).abs() < 1e-14);
        let dip = AngularAverage::new(64, AngularWeight::DipoleZ);
        assert!((dip.average(|c| c * c) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn doubling_check_flags_unresolved_integrand() {
        let avg = AngularAverage::new(4, AngularWeight::Uniform);
        assert!(avg.average_checked(|c| (40.0 * c).cos()).is_err());
        let avg = AngularAverage::default();
        assert!(avg.average_checked(|c| (-25.0 * c * c).exp()).is_ok());
    }
}
