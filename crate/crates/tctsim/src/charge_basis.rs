//! Single-transmon diagonalization in the Cooper-pair charge basis.
//!
//! The transmon Hamiltonian is `4 E_C n^2 - E_J,eff cos(phi)` with
//! `E_J,eff = E_J,Sigma cos(pi Phi_ext / Phi_0)`. In the charge basis
//! `n in [-N_c, N_c]` the kinetic term is diagonal and `cos(phi)` couples
//! neighboring charge states with amplitude 1/2.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;

/// Circuit parameters of one flux-tunable transmon. Energies in GHz, flux in
/// units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonSpec {
    pub ec: f64,
    pub ej_sigma: f64,
    pub flux: f64,
    pub charge_cutoff: usize,
}

impl TransmonSpec {
    pub fn new(ec: f64, ej_sigma: f64, flux: f64, charge_cutoff: usize) -> Result<Self> {
        let spec = Self { ec, ej_sigma, flux, charge_cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ec > 0.0) {
            return Err(Error::InvalidParameter(format!("E_C must be > 0, got {}", self.ec)));
        }
        if !(self.ej_sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "E_J,Sigma must be > 0, got {}",
                self.ej_sigma
            )));
        }
        if self.charge_cutoff < 10 {
            return Err(Error::InvalidParameter(format!(
                "charge cutoff must be >= 10, got {}",
                self.charge_cutoff
            )));
        }
        Ok(())
    }

    pub fn with_flux(&self, flux: f64) -> Self {
        Self { flux, ..*self }
    }

    /// Flux-modulated Josephson energy `E_J,Sigma cos(pi Phi / Phi_0)`.
    pub fn ej_eff(&self) -> f64 {
        self.ej_sigma * (std::f64::consts::PI * self.flux).cos()
    }

    pub fn dimension(&self) -> usize {
        2 * self.charge_cutoff + 1
    }
}

/// Lowest levels of one transmon: energies referenced to the ground state and
/// nearest-neighbor charge matrix elements in the fixed (real, nonnegative)
/// gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonEigensystem {
    /// `E_i` in GHz with `E_0 = 0`, strictly increasing.
    pub energies: Vec<f64>,
    /// `n_{i,i+1} = <i|n|i+1>`, length `levels_kept - 1`.
    pub charge_elements: Vec<f64>,
    pub levels_kept: usize,
}

impl TransmonEigensystem {
    /// Gap `E_{i+1} - E_i`.
    pub fn gap(&self, i: usize) -> f64 {
        self.energies[i + 1] - self.energies[i]
    }

    /// Anharmonicity `(E_2 - E_1) - (E_1 - E_0)`.
    pub fn anharmonicity(&self) -> f64 {
        self.gap(1) - self.gap(0)
    }
}

/// Charge-basis Hamiltonian: diagonal `4 E_C n^2`, first off-diagonals
/// `-E_J,eff / 2`. Hermitian by construction.
pub fn build_charge_hamiltonian(spec: &TransmonSpec) -> Result<Array2<C64>> {
    spec.validate()?;
    let nc = spec.charge_cutoff as i64;
    let dim = spec.dimension();
    let mut h = Array2::zeros((dim, dim));
    let hop = -0.5 * spec.ej_eff();
    for (row, n) in (-nc..=nc).enumerate() {
        h[[row, row]] = C64::new(4.0 * spec.ec * (n * n) as f64, 0.0);
        if row + 1 < dim {
            h[[row, row + 1]] = C64::new(hop, 0.0);
            h[[row + 1, row]] = C64::new(hop, 0.0);
        }
    }
    Ok(h)
}

/// Charge (Cooper-pair number) operator, diagonal in this basis.
pub fn charge_operator(spec: &TransmonSpec) -> Array2<C64> {
    let nc = spec.charge_cutoff as i64;
    let dim = spec.dimension();
    let mut n_op = Array2::zeros((dim, dim));
    for (row, n) in (-nc..=nc).enumerate() {
        n_op[[row, row]] = C64::new(n as f64, 0.0);
    }
    n_op
}

/// Diagonalize a transmon and keep the lowest `levels` eigenpairs.
///
/// Eigenvector phases are fixed so that every `<i|n|i+1>` is real and
/// nonnegative; energies are referenced to the ground state.
pub fn diagonalize_transmon(spec: &TransmonSpec, levels: usize) -> Result<TransmonEigensystem> {
    spec.validate()?;
    if levels < 2 || levels > 5 {
        return Err(Error::InvalidParameter(format!(
            "levels must be in 2..=5, got {levels}"
        )));
    }
    let dim = spec.dimension();
    let h = build_charge_hamiltonian(spec)?;
    let (values, vectors) = linalg::eigh(&h)?;

    // boundary-weight guard on the highest kept level
    let top = levels - 1;
    let boundary_weight =
        vectors[[0, top]].norm_sqr() + vectors[[dim - 1, top]].norm_sqr();
    if boundary_weight > 1e-8 {
        return Err(Error::CutoffTooSmall { level: top, weight: boundary_weight });
    }

    let n_op = charge_operator(spec);
    let mut kept: Vec<Vec<C64>> = (0..levels)
        .map(|j| vectors.column(j).to_vec())
        .collect();

    // gauge: walk up the ladder making each <i|n|i+1> real positive
    let mut charge_elements = Vec::with_capacity(levels - 1);
    for i in 0..(levels - 1) {
        let mut elem = C64::new(0.0, 0.0);
        for (row, &nval) in n_op.diag().iter().enumerate() {
            elem += kept[i][row].conj() * nval * kept[i + 1][row];
        }
        let mag = elem.norm();
        if mag > 1e-14 {
            let phase = elem.conj() / mag;
            for z in kept[i + 1].iter_mut() {
                *z *= phase;
            }
        }
        charge_elements.push(mag);
    }

    let e0 = values[0];
    let energies: Vec<f64> = values[..levels].iter().map(|e| e - e0).collect();
    for w in energies.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::EigFailure("transmon energies not strictly increasing".into()));
        }
    }
    Ok(TransmonEigensystem { energies, charge_elements, levels_kept: levels })
}

/// One row of a flux sweep.
#[derive(Debug, Clone)]
pub struct FluxPoint {
    pub flux: f64,
    pub eigensystem: TransmonEigensystem,
}

/// Diagonalize the transmon across a flux grid. Points are independent and
/// evaluated in parallel; failures carry the offending flux.
pub fn flux_sweep_spectrum(
    spec_template: &TransmonSpec,
    flux_grid: &[f64],
    levels: usize,
) -> Result<Vec<FluxPoint>> {
    if flux_grid.is_empty() {
        return Err(Error::InvalidParameter("flux grid is empty".into()));
    }
    if let Some(&bad) = flux_grid.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidParameter(format!(
            "flux grid value {bad} outside [0, 1]"
        )));
    }
    flux_grid
        .par_iter()
        .map(|&flux| {
            diagonalize_transmon(&spec_template.with_flux(flux), levels)
                .map(|eigensystem| FluxPoint { flux, eigensystem })
                .map_err(|e| Error::InvalidParameter(format!("flux {flux}: {e}")))
        })
        .collect()
}

/// Paper transmon `a`: E_C = 0.5 GHz, E_J,Sigma = 25 GHz, biased at 0.3 Phi_0.
pub fn paper_transmon_a() -> TransmonSpec {
    TransmonSpec { ec: 0.5, ej_sigma: 25.0, flux: 0.3, charge_cutoff: 20 }
}

/// Paper transmon `b`: E_C = 0.9 GHz, E_J,Sigma = 15 GHz (flux swept).
pub fn paper_transmon_b() -> TransmonSpec {
    TransmonSpec { ec: 0.9, ej_sigma: 15.0, flux: 0.0, charge_cutoff: 20 }
}
