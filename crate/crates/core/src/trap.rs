//! Spectrum of the anisotropic harmonic trap.
//!
//! Two of the three trap frequencies are equal. With ω the soft frequency
//! and an integer aspect ratio λ ≥ 1:
//!
//! * pancake: (ω_x, ω_y, ω_z) = ω (1, 1, λ), shell index n = n_x + n_y + λ n_z
//! * cigar:   (ω_x, ω_y, ω_z) = ω (λ, λ, 1), shell index n = λ n_x + λ n_y + n_z
//!
//! A shell collects every oscillator state with the same energy. Quantities
//! written with a tilde are floored quotients by λ, see [`floored_tilde`].

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest shell that [`TrapGeometry::degeneracy_bruteforce`] will enumerate.
pub const BRUTEFORCE_SHELL_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// One tight axis (z).
    Pancake,
    /// Two tight axes (x, y).
    Cigar,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Pancake => "pancake",
            Shape::Cigar => "cigar",
        })
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pancake" => Ok(Shape::Pancake),
            "cigar" => Ok(Shape::Cigar),
            other => Err(Error::invalid("shape", format!("expected `pancake` or `cigar`, got `{other}`"))),
        }
    }
}

/// ⌊n / λ⌋.
pub fn floored_tilde(n: u64, lambda: u32) -> u64 {
    n / u64::from(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrapGeometry {
    shape: Shape,
    lambda: u32,
}

impl TrapGeometry {
    pub fn new(shape: Shape, lambda: u32) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::invalid("lambda", "aspect ratio must be a positive integer"));
        }
        Ok(Self { shape, lambda })
    }

    pub fn pancake(lambda: u32) -> Result<Self> {
        Self::new(Shape::Pancake, lambda)
    }

    pub fn cigar(lambda: u32) -> Result<Self> {
        Self::new(Shape::Cigar, lambda)
    }

    /// Accepts a real aspect ratio only if it is a positive integer.
    pub fn from_real(shape: Shape, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 1.0 && lambda.fract() == 0.0 && lambda <= f64::from(u32::MAX)) {
            return Err(Error::invalid("lambda", format!("aspect ratio must be an integer >= 1, got {lambda}")));
        }
        Self::new(shape, lambda as u32)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn is_isotropic(&self) -> bool {
        self.lambda == 1
    }

    /// Per-axis frequencies in units of ω.
    pub fn axis_frequencies(&self) -> [u64; 3] {
        let l = u64::from(self.lambda);
        match self.shape {
            Shape::Pancake => [1, 1, l],
            Shape::Cigar => [l, l, 1],
        }
    }

    pub fn shell_index(&self, state: OscillatorState) -> u64 {
        let [fx, fy, fz] = self.axis_frequencies();
        fx * state.nx + fy * state.ny + fz * state.nz
    }

    /// Energy of shell `n` in units of ħω, zero-point energy included.
    pub fn shell_energy(&self, n: u64) -> f64 {
        let l = f64::from(self.lambda);
        match self.shape {
            Shape::Pancake => n as f64 + l / 2.0 + 1.0,
            Shape::Cigar => n as f64 + l + 0.5,
        }
    }

    /// Number of oscillator states in shell `n`, from the closed forms
    /// g = (ñ+1)(2n - λñ + 2)/2 (pancake) and g = (ñ+1)(ñ+2)/2 (cigar).
    pub fn degeneracy(&self, n: u64) -> u64 {
        let l = u128::from(self.lambda);
        let t = u128::from(floored_tilde(n, self.lambda));
        let n = u128::from(n);
        let twice = match self.shape {
            Shape::Pancake => (t + 1) * (2 * n - l * t + 2),
            Shape::Cigar => (t + 1) * (t + 2),
        };
        debug_assert!(twice % 2 == 0);
        (twice / 2) as u64
    }

    /// Counts the lattice points of shell `n` one by one.
    pub fn degeneracy_bruteforce(&self, n: u64) -> Result<u64> {
        if n > BRUTEFORCE_SHELL_LIMIT {
            return Err(Error::Bounds {
                what: "shell index",
                value: n,
                limit: BRUTEFORCE_SHELL_LIMIT,
            });
        }
        Ok(self.shell_states(n).count() as u64)
    }

    /// Every oscillator state in shell `n`, ordered lexicographically by
    /// (n_x, n_y).
    pub fn shell_states(&self, n: u64) -> impl Iterator<Item = OscillatorState> + '_ {
        let [fx, fy, fz] = self.axis_frequencies();
        (0..=n / fx).flat_map(move |nx| {
            let after_x = n - fx * nx;
            (0..=after_x / fy).filter_map(move |ny| {
                let rest = after_x - fy * ny;
                rest.is_multiple_of(fz).then(|| OscillatorState::new(nx, ny, rest / fz))
            })
        })
    }

    /// Number of states in shells 0..=n_F.
    ///
    /// Uses the closed forms, evaluated in exact rational arithmetic. The
    /// pancake form carries a fractional inner term; a non-integral total
    /// is reported as an error rather than rounded.
    pub fn cumulative_states(&self, sea: FermiSea) -> Result<u64> {
        if sea.is_empty() {
            return Ok(0);
        }
        let n_f = sea.n_f();
        let nf = i128::from(n_f);
        let l = i128::from(self.lambda);
        let t = nf / l;
        let r = |v: i128| Ratio::from_integer(v);
        let total = match self.shape {
            Shape::Pancake => {
                let inner = Ratio::new(3, 2) * r(nf) - Ratio::new(3, 4) * r(l * t)
                    + Ratio::new(l * l * t * (2 + t), 8 + 8 * nf - 4 * l * t)
                    + r(3);
                Ratio::new(1, 6) * r(t + 1) * r(2 * nf - l * t + 2) * inner
            }
            Shape::Cigar => Ratio::new((t + 1) * (t + 2) * (3 * nf - 2 * t * l + 3), 6),
        };
        if !total.is_integer() || *total.numer() < 0 {
            return Err(Error::NonIntegralCount {
                lambda: self.lambda,
                n_f,
                value: total.to_string(),
            });
        }
        Ok(total.to_integer() as u64)
    }

    /// Fills `atoms` fermions into the lowest states, one per state.
    ///
    /// Returns the smallest Fermi shell whose cumulative count reaches
    /// `atoms`, together with how many states of that shell are occupied.
    pub fn fermi_shell_for_atoms(&self, atoms: u64) -> ShellFilling {
        if atoms == 0 {
            return ShellFilling {
                sea: FermiSea::EMPTY,
                occupancy: 0,
                degeneracy: 0,
            };
        }
        let mut below = 0u64;
        let mut n = 0u64;
        loop {
            let g = self.degeneracy(n);
            if below + g >= atoms {
                return ShellFilling {
                    sea: FermiSea { n_f: n as i64 },
                    occupancy: atoms - below,
                    degeneracy: g,
                };
            }
            below += g;
            n += 1;
        }
    }
}

/// Highest fully occupied shell. `n_F = -1` is the empty trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FermiSea {
    n_f: i64,
}

impl FermiSea {
    pub const EMPTY: FermiSea = FermiSea { n_f: -1 };

    pub fn new(n_f: i64) -> Result<Self> {
        if n_f < -1 {
            return Err(Error::invalid("n_F", format!("Fermi shell must be >= -1, got {n_f}")));
        }
        Ok(Self { n_f })
    }

    /// The Fermi sea holding exactly `atoms` fermions, which must close a
    /// shell.
    pub fn from_atoms(geom: &TrapGeometry, atoms: u64) -> Result<Self> {
        let filling = geom.fermi_shell_for_atoms(atoms);
        if !filling.is_closed() {
            return Err(Error::PartiallyFilledShell {
                occupied: filling.occupancy,
                degeneracy: filling.degeneracy,
            });
        }
        Ok(filling.sea)
    }

    pub fn n_f(&self) -> i64 {
        self.n_f
    }

    pub fn is_empty(&self) -> bool {
        self.n_f < 0
    }

    /// Whether shell `n` is occupied.
    pub fn blocks(&self, n: u64) -> bool {
        !self.is_empty() && n <= self.n_f as u64
    }

    /// ⌊n_F / λ⌋, the highest tight-axis excitation inside the sea; `None`
    /// for the empty trap.
    pub fn tight_excitations(&self, lambda: u32) -> Option<u64> {
        (!self.is_empty()).then(|| floored_tilde(self.n_f as u64, lambda))
    }
}

/// Result of [`TrapGeometry::fermi_shell_for_atoms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellFilling {
    pub sea: FermiSea,
    /// Occupied states in the top shell.
    pub occupancy: u64,
    /// Total states in the top shell (0 for the empty trap).
    pub degeneracy: u64,
}

impl ShellFilling {
    pub fn is_closed(&self) -> bool {
        self.occupancy == self.degeneracy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct OscillatorState {
    pub nx: u64,
    pub ny: u64,
    pub nz: u64,
}

impl OscillatorState {
    pub const GROUND: OscillatorState = OscillatorState { nx: 0, ny: 0, nz: 0 };

    pub fn new(nx: u64, ny: u64, nz: u64) -> Self {
        Self { nx, ny, nz }
    }

    pub fn quanta(&self) -> [u64; 3] {
        [self.nx, self.ny, self.nz]
    }
}

impl fmt::Display for OscillatorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.nx, self.ny, self.nz)
    }
}
