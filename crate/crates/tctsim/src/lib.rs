//! Simulation library for a pair of flux-tunable transmons coupled through a
//! microwave cavity and monitored by photodetection.
//!
//! The crate covers the full pipeline at desk scale:
//!
//! - exact charge-basis transmon spectra and flux sweeps ([`charge_basis`]);
//! - the composite transmon-cavity-transmon Hamiltonian and its avoided
//!   crossing ([`composite`]);
//! - the dispersive transformation down to an effective two-transmon model
//!   with exchange coupling `G_eg` ([`dispersive`]);
//! - Lindblad master-equation integration ([`lindblad`]) and logarithmic
//!   negativity ([`entanglement`]);
//! - outcome-resolved Kraus photodetection with losses, stochastic
//!   trajectories, ensemble averages and no-click postselection
//!   ([`trajectories`], [`postselection`]);
//! - the vectorized Liouvillian, its spectral decomposition, closed-form
//!   interaction-frame eigenvalues and the exceptional point ([`liouvillian`]).
//!
//! Units: energies and frequencies are angular GHz with hbar = 1, so times
//! are ns; decay rates are entered in MHz and converted internally (the
//! Liouvillian module works in 1/us, which is numerically the same as MHz).

pub mod charge_basis;
pub mod composite;
pub mod config;
pub mod dispersive;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod liouvillian;
pub mod pipelines;
pub mod plot;
pub mod postselection;
pub mod table;
pub mod trajectories;

pub use charge_basis::{TransmonEigensystem, TransmonSpec};
pub use composite::{CavitySpec, CompositeModel};
pub use error::{Error, Result};
pub use lindblad::{DecayRates, DensityMatrix};

/// Convert a rate given in MHz to angular-GHz units (1/ns).
pub fn mhz_to_ghz(mhz: f64) -> f64 {
    mhz * 1e-3
}

/// Convert an energy in angular GHz (1/ns) to 1/us.
pub fn ghz_to_per_us(ghz: f64) -> f64 {
    ghz * 1e3
}
