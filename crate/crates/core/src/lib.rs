//! Harish-Chandra series and hyperoctahedral wave functions for three
//! integrable families: the `BC_n` Calogero-Sutherland system (`bc`), the
//! Toda chain with Pöschl-Teller boundary terms (`t`) and the
//! Calogero-Sutherland system in a Morse potential (`cs`).
//!
//! The crate computes the series coefficients by their graded recurrence,
//! symmetrizes over the hyperoctahedral group with c-function weights,
//! evaluates the Schrödinger operators and the bispectral difference
//! equations, and scans the confluent limits `bc -> t` and `bc -> cs`.
//!
//! ```
//! use hyperwave::{Couplings, Family, Settings, SpectralPoint, PositionPoint, C64};
//! use hyperwave::wavefn::wavefunction;
//!
//! let g = Couplings::real(0.4, 0.7, 0.3, 2);
//! let xi = SpectralPoint(vec![C64::new(0.1, 1.3), C64::new(-0.05, 0.6)]);
//! let x = PositionPoint(vec![4.0, 2.0]);
//! let phi = wavefunction(Family::Bc, &xi, &x, &g, &Settings::default()).unwrap();
//! assert!(phi.is_finite());
//! ```

pub mod bispectral;
pub mod confluence;
pub mod domain;
pub mod error;
pub mod exec;
pub mod export;
pub mod hcseries;
mod lattice;
pub mod operators;
pub mod special;
pub mod sum;
pub mod wavefn;

use serde::{Deserialize, Serialize};

pub use domain::{
    dominance_geq, enumerate_level, rho, rho_l, rho_m, Composition, Couplings, Family, Hyperplane,
    HyperplaneHit, PositionPoint, Root, SignedPermutation, SpectralPoint, Tolerances, C64,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hcseries::{CoeffTable, SeriesValue};
pub use special::{CFunctionValue, CKind, ConfluenceKind};

/// Knobs shared by every evaluation: truncation level, thresholds, execution
/// policy and the seed of the few randomized steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub max_level: usize,
    pub tol: Tolerances,
    pub exec: Execution,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_level: 30,
            tol: Tolerances::default(),
            exec: Execution::default(),
            seed: 0x5eed,
        }
    }
}

impl Settings {
    pub fn with_level(mut self, max_level: usize) -> Self {
        self.max_level = max_level;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}
