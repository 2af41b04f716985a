//! Party-site-symmetric (PSS) states of `n` identical bosons on the complete
//! graph with `d` sites.
//!
//! States are expanded in the Young-diagram basis. The crate computes their
//! one- and two-party reduced density matrices exactly and measures how well
//! the mean field approximation `ρ₂ ≈ ρ₁ ⊗ ρ₁` holds, via Uhlmann fidelity.
//! Every structured computation has a brute-force counterpart on the
//! dense `dⁿ` state vector so the two can be checked against each other.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fidelity;
pub mod linalg;
pub mod pss;
pub mod rdm;
pub mod scalar;
pub mod scan;
pub mod sectors;
pub mod verify;
pub mod young;

pub use error::{Error, Result};
pub use fidelity::{FidelityResult, Method};
pub use pss::{DenseBudget, PssState};
pub use young::YoungDiagram;

use num_rational::BigRational;

pub type Complex = num_complex::Complex64;
pub type Matrix = linalg::HermitianMatrix<f64>;
pub type DenseState = pss::DenseState<f64>;

/// Exact parameterizations, used for single basis diagrams.
pub type ExactRho1 = rdm::Rho1Params<BigRational>;
pub type ExactRho2 = rdm::Rho2Params<BigRational>;

/// Floating parameterizations, used for superpositions and fidelity evaluation.
pub type Rho1 = rdm::Rho1Params<f64>;
pub type Rho2 = rdm::Rho2Params<f64>;
