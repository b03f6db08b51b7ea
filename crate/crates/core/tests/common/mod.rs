//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the closed forms under test; every oracle is
//! either direct enumeration or numerical quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

/// ln n! by summing logarithms.
pub fn ln_factorial_naive(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// e^{-mu} mu^k / k! through logarithms.
pub fn poisson_naive(k: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mu.ln() - mu - ln_factorial_naive(k)).exp()
}

/// Harmonic-oscillator eigenfunctions ψ_0..=ψ_n at `x` in oscillator units,
/// by the normalized three-term recurrence.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut psi = vec![0.0; n + 1];
    psi[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n >= 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for k in 2..=n {
        let kf = k as f64;
        psi[k] = (2.0 / kf).sqrt() * x * psi[k - 1] - ((kf - 1.0) / kf).sqrt() * psi[k - 2];
    }
    psi
}

/// |⟨n|e^{ikx}|0⟩|² for n = 0..=n_max with k = √2·η̃, by the trapezoid
/// rule on [-15, 15]. The integrand is a Gaussian times a polynomial, so
/// the rule converges spectrally.
pub fn overlap_squared_quadrature(eta_tilde2: f64, n_max: usize) -> Vec<f64> {
    let k = (2.0 * eta_tilde2).sqrt();
    let (a, b, steps) = (-15.0, 15.0, 6000);
    let h = (b - a) / steps as f64;
    let mut re = vec![0.0; n_max + 1];
    let mut im = vec![0.0; n_max + 1];
    for i in 0..=steps {
        let x = a + h * i as f64;
        let w = if i == 0 || i == steps { 0.5 * h } else { h };
        let psi = hermite_functions(n_max, x);
        let (s, c) = (k * x).sin_cos();
        for n in 0..=n_max {
            let f = w * psi[n] * psi[0];
            re[n] += f * c;
            im[n] += f * s;
        }
    }
    re.iter().zip(&im).map(|(r, i)| r * r + i * i).collect()
}

/// Number of (nx, ny, nz) with weighted quanta sum equal to `n`, by
/// enumeration. `pancake` puts the frequency λ on z, otherwise on x and y.
pub fn degeneracy_enumerated(pancake: bool, lambda: u64, n: u64) -> u64 {
    let mut count = 0;
    for nx in 0..=n {
        for ny in 0..=n - nx {
            for nz in 0..=n {
                let e = if pancake { nx + ny + lambda * nz } else { lambda * (nx + ny) + nz };
                if e == n {
                    count += 1;
                }
            }
        }
    }
    count
}

/// M_f(θ, φ) as a direct triple sum over unblocked states with naive
/// Poisson weights. Axis means follow μ_i = η² u_i² / ω_i.
pub fn modification_factor_enumerated(pancake: bool, lambda: u64, eta2: f64, n_f: i64, theta: f64, phi: f64) -> f64 {
    let u = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let freq = if pancake { [1, 1, lambda] } else { [lambda, lambda, 1] };
    let mu: Vec<f64> = (0..3).map(|i| eta2 * u[i] * u[i] / freq[i] as f64).collect();
    let cut = |m: f64| (m + 12.0 * (m + 1.0).sqrt() + 30.0).ceil() as u64;
    let tables: Vec<Vec<f64>> = mu
        .iter()
        .map(|&m| (0..=cut(m)).map(|k| poisson_naive(k, m)).collect())
        .collect();
    let mut total = 0.0;
    for (nx, px) in tables[0].iter().enumerate() {
        for (ny, py) in tables[1].iter().enumerate() {
            for (nz, pz) in tables[2].iter().enumerate() {
                let shell = freq[0] * nx as u64 + freq[1] * ny as u64 + freq[2] * nz as u64;
                if shell as i64 > n_f {
                    total += px * py * pz;
                }
            }
        }
    }
    total
}

/// Evenly spaced grid of `n` points on [a, b].
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
