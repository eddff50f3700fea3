//! Composite transmon-cavity-transmon model on a labeled product basis.
//!
//! Basis ordering is fixed to `index = i_a (N_ph+1) 3 + n_cav 3 + i_b` with
//! three transmon levels (g, e, f) on each side. The coupling is
//! excitation-conserving, so the Hamiltonian is block diagonal in the total
//! excitation number `i_a + n_cav + i_b`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::charge_basis::{diagonalize_transmon, TransmonEigensystem, TransmonSpec};
use crate::error::{Error, Result};
use crate::linalg;

/// Cavity mode parameters: frequency in GHz and the Fock-space cutoff
/// (maximum photon number kept).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub frequency: f64,
    pub fock_cutoff: usize,
}

impl CavitySpec {
    pub fn new(frequency: f64, fock_cutoff: usize) -> Result<Self> {
        if !(frequency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cavity frequency must be > 0, got {frequency}"
            )));
        }
        if fock_cutoff < 2 {
            return Err(Error::InvalidParameter(format!(
                "fock cutoff must be >= 2, got {fock_cutoff}"
            )));
        }
        Ok(Self { frequency, fock_cutoff })
    }

    pub fn levels(&self) -> usize {
        self.fock_cutoff + 1
    }
}

pub const TRANSMON_LEVEL_NAMES: [&str; 3] = ["g", "e", "f"];

/// Assembled transmon (x) cavity (x) transmon Hamiltonian with its basis
/// bookkeeping.
#[derive(Debug, Clone)]
pub struct CompositeModel {
    pub transmon_a: TransmonEigensystem,
    pub transmon_b: TransmonEigensystem,
    pub cavity: CavitySpec,
    pub coupling_a: f64,
    pub coupling_b: f64,
    pub hamiltonian: Array2<C64>,
    /// `(i_a, n_cav, i_b)` for each basis index.
    pub basis_labels: Vec<(usize, usize, usize)>,
}

impl CompositeModel {
    pub fn dimension(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn index(&self, ia: usize, ncav: usize, ib: usize) -> usize {
        let nph = self.cavity.levels();
        ia * nph * 3 + ncav * 3 + ib
    }

    /// Text label like "e0g" for CSV output.
    pub fn label_string(&self, idx: usize) -> String {
        let (ia, n, ib) = self.basis_labels[idx];
        format!("{}{}{}", TRANSMON_LEVEL_NAMES[ia], n, TRANSMON_LEVEL_NAMES[ib])
    }

    pub fn all_label_strings(&self) -> Vec<String> {
        (0..self.dimension()).map(|i| self.label_string(i)).collect()
    }

    /// Diagonal total-excitation operator `i_a + n_cav + i_b`.
    pub fn excitation_operator(&self) -> Array2<C64> {
        let dim = self.dimension();
        let mut op = Array2::zeros((dim, dim));
        for (idx, &(ia, n, ib)) in self.basis_labels.iter().enumerate() {
            op[[idx, idx]] = C64::new((ia + n + ib) as f64, 0.0);
        }
        op
    }

    /// Lowering operator `|0><1| + sqrt-weighted ladder` for one subsystem,
    /// embedded in the product space. `which` = 0: transmon a level drop
    /// i -> i-1 restricted to (from, from-1); 1: cavity annihilation; 2:
    /// transmon b.
    pub fn lowering(&self, subsystem: Subsystem) -> Array2<C64> {
        let dim = self.dimension();
        let mut op = Array2::zeros((dim, dim));
        for (idx, &(ia, n, ib)) in self.basis_labels.iter().enumerate() {
            match subsystem {
                Subsystem::TransmonA(from) => {
                    if ia == from {
                        let dst = self.index(ia - 1, n, ib);
                        op[[dst, idx]] = C64::new(1.0, 0.0);
                    }
                }
                Subsystem::Cavity => {
                    if n > 0 {
                        let dst = self.index(ia, n - 1, ib);
                        op[[dst, idx]] = C64::new((n as f64).sqrt(), 0.0);
                    }
                }
                Subsystem::TransmonB(from) => {
                    if ib == from {
                        let dst = self.index(ia, n, ib - 1);
                        op[[dst, idx]] = C64::new(1.0, 0.0);
                    }
                }
            }
        }
        op
    }
}

/// Which subsystem a jump operator acts on; transmon variants carry the upper
/// level of the `|from-1><from|` transition.
#[derive(Debug, Clone, Copy)]
pub enum Subsystem {
    TransmonA(usize),
    Cavity,
    TransmonB(usize),
}

/// Build the composite Hamiltonian from two diagonalized transmons, cavity
/// parameters and couplings `zeta` (GHz).
pub fn build_tct_hamiltonian(
    a: &TransmonEigensystem,
    b: &TransmonEigensystem,
    cav: &CavitySpec,
    zeta_a: f64,
    zeta_b: f64,
) -> Result<CompositeModel> {
    if a.levels_kept != 3 || b.levels_kept != 3 {
        return Err(Error::DimensionMismatch(format!(
            "composite model needs 3 transmon levels, got {} and {}",
            a.levels_kept, b.levels_kept
        )));
    }
    let nph = cav.levels();
    let dim = 3 * nph * 3;
    let mut basis_labels = Vec::with_capacity(dim);
    for ia in 0..3 {
        for n in 0..nph {
            for ib in 0..3 {
                basis_labels.push((ia, n, ib));
            }
        }
    }
    let index = |ia: usize, n: usize, ib: usize| ia * nph * 3 + n * 3 + ib;

    let mut h = Array2::zeros((dim, dim));
    for (idx, &(ia, n, ib)) in basis_labels.iter().enumerate() {
        let diag = a.energies[ia] + b.energies[ib] + cav.frequency * n as f64;
        h[[idx, idx]] = C64::new(diag, 0.0);
    }
    // ladder couplings zeta^x n^x_{i,i+1} (|i><i+1| a^dag + h.c.)
    for (idx, &(ia, n, ib)) in basis_labels.iter().enumerate() {
        // transmon a: |i_a - 1, n + 1> <i_a, n|
        if ia > 0 && n + 1 < nph {
            let g = zeta_a * a.charge_elements[ia - 1] * ((n + 1) as f64).sqrt();
            let dst = index(ia - 1, n + 1, ib);
            h[[dst, idx]] += C64::new(g, 0.0);
            h[[idx, dst]] += C64::new(g, 0.0);
        }
        // transmon b
        if ib > 0 && n + 1 < nph {
            let g = zeta_b * b.charge_elements[ib - 1] * ((n + 1) as f64).sqrt();
            let dst = index(ia, n + 1, ib - 1);
            h[[dst, idx]] += C64::new(g, 0.0);
            h[[idx, dst]] += C64::new(g, 0.0);
        }
    }
    Ok(CompositeModel {
        transmon_a: a.clone(),
        transmon_b: b.clone(),
        cavity: *cav,
        coupling_a: zeta_a,
        coupling_b: zeta_b,
        hamiltonian: h,
        basis_labels,
    })
}

/// Rebuild the composite model at a given flux of transmon b (transmon a and
/// everything else fixed).
#[derive(Debug, Clone)]
pub struct ModelFamily {
    pub transmon_a: TransmonEigensystem,
    pub spec_b: TransmonSpec,
    pub cavity: CavitySpec,
    pub zeta_a: f64,
    pub zeta_b: f64,
}

impl ModelFamily {
    pub fn at_flux_b(&self, flux_b: f64) -> Result<CompositeModel> {
        let b = diagonalize_transmon(&self.spec_b.with_flux(flux_b), 3)?;
        build_tct_hamiltonian(&self.transmon_a, &b, &self.cavity, self.zeta_a, self.zeta_b)
    }
}

/// One row of a composite-spectrum sweep: sorted eigenvalues plus the basis
/// label of the dominant component of each eigenvector.
#[derive(Debug, Clone)]
pub struct TctSpectrumRow {
    pub flux_b: f64,
    pub eigenvalues: Vec<f64>,
    pub dominant_labels: Vec<(usize, usize, usize)>,
}

/// Diagonalize the composite model across a flux_b grid. With
/// `zero_cavity_only`, rows are filtered to dressed eigenvalues whose
/// dominant basis component has no cavity excitation (the manifold plotted in
/// the single-excitation spectra).
pub fn tct_spectrum_sweep(
    family: &ModelFamily,
    flux_grid: &[f64],
    zero_cavity_only: bool,
) -> Result<Vec<TctSpectrumRow>> {
    if flux_grid.is_empty() {
        return Err(Error::InvalidParameter("flux grid is empty".into()));
    }
    if let Some(&bad) = flux_grid.iter().find(|f| !(0.0..0.5).contains(*f)) {
        return Err(Error::InvalidParameter(format!(
            "flux_b grid value {bad} outside [0, 0.5)"
        )));
    }
    flux_grid
        .par_iter()
        .map(|&flux_b| {
            let model = family.at_flux_b(flux_b)?;
            let (values, vectors) = linalg::eigh(&model.hamiltonian)?;
            let mut eigenvalues = Vec::new();
            let mut dominant_labels = Vec::new();
            for (j, &val) in values.iter().enumerate() {
                let mut best = 0usize;
                let mut best_w = 0.0;
                for i in 0..model.dimension() {
                    let w = vectors[[i, j]].norm_sqr();
                    if w > best_w {
                        best_w = w;
                        best = i;
                    }
                }
                let label = model.basis_labels[best];
                if !zero_cavity_only || label.1 == 0 {
                    eigenvalues.push(val);
                    dominant_labels.push(label);
                }
            }
            Ok(TctSpectrumRow { flux_b, eigenvalues, dominant_labels })
        })
        .collect()
}

/// Minimum adjacent gap within the single-excitation block at one flux point.
pub fn single_excitation_gap(family: &ModelFamily, flux_b: f64) -> Result<f64> {
    let model = family.at_flux_b(flux_b)?;
    // the N = 1 block is closed under H; diagonalize it directly
    let idxs: Vec<usize> = model
        .basis_labels
        .iter()
        .enumerate()
        .filter(|(_, &(ia, n, ib))| ia + n + ib == 1)
        .map(|(i, _)| i)
        .collect();
    let m = idxs.len();
    let mut block = Array2::zeros((m, m));
    for (r, &i) in idxs.iter().enumerate() {
        for (c, &j) in idxs.iter().enumerate() {
            block[[r, c]] = model.hamiltonian[[i, j]];
        }
    }
    let (vals, _) = linalg::eigh(&block)?;
    let gap = vals
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(gap)
}

/// Golden-section search for the avoided-crossing flux: returns
/// `(flux_star, gap)` with the flux resolved to 1e-6.
pub fn find_avoided_crossing(
    family: &ModelFamily,
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter("empty bracket".into()));
    }
    let gap_at = |f: f64| single_excitation_gap(family, f);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    let f_lo = gap_at(lo)?;
    let f_hi = gap_at(hi)?;
    if f1.min(f2) >= f_lo.min(f_hi) {
        return Err(Error::NoMinimum);
    }
    while hi - lo > 1e-6 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap_at(x2)?;
        }
    }
    let flux_star = 0.5 * (lo + hi);
    let gap = gap_at(flux_star)?;
    Ok((flux_star, gap))
}

/// Paper coupling and cavity constants: zeta = 0.3 GHz, omega_c = 15 GHz.
pub fn paper_family() -> Result<ModelFamily> {
    let a = diagonalize_transmon(&crate::charge_basis::paper_transmon_a(), 3)?;
    Ok(ModelFamily {
        transmon_a: a,
        spec_b: crate::charge_basis::paper_transmon_b(),
        cavity: CavitySpec::new(15.0, 3)?,
        zeta_a: 0.3,
        zeta_b: 0.3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs, max_abs_diff};

    fn paper_model_at(flux_b: f64) -> CompositeModel {
        paper_family().unwrap().at_flux_b(flux_b).unwrap()
    }

    #[test]
    fn decoupled_limit_is_diagonal() {
        let family = paper_family().unwrap();
        let family = ModelFamily { zeta_a: 0.0, zeta_b: 0.0, ..family };
        let model = family.at_flux_b(0.3).unwrap();
        for (i, row) in model.hamiltonian.rows().into_iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if i != j {
                    assert_eq!(*z, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn coupling_matrix_element_matches_formula() {
        let model = paper_model_at(0.3);
        // <g_a 1 g_b| H |e_a 0 g_b> = zeta_a n^a_ge
        let bra = model.index(0, 1, 0);
        let ket = model.index(1, 0, 0);
        let expect = 0.3 * model.transmon_a.charge_elements[0];
        assert!((model.hamiltonian[[bra, ket]].re - expect).abs() < 1e-12);
        assert!((model.hamiltonian[[bra, ket]].im).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_hermitian_and_excitation_conserving() {
        let model = paper_model_at(0.2945);
        let h = &model.hamiltonian;
        assert!(max_abs_diff(h, &linalg::dagger(h)) < 1e-14);
        let n_op = model.excitation_operator();
        assert!(max_abs(&commutator(h, &n_op)) < 1e-12);
    }

    #[test]
    fn fock_cutoff_converged_for_paper_parameters() {
        let family3 = paper_family().unwrap();
        let family6 = ModelFamily {
            cavity: CavitySpec::new(15.0, 6).unwrap(),
            ..family3.clone()
        };
        let m3 = family3.at_flux_b(0.2945).unwrap();
        let m6 = family6.at_flux_b(0.2945).unwrap();
        let (v3, _) = linalg::eigh(&m3.hamiltonian).unwrap();
        let (v6, _) = linalg::eigh(&m6.hamiltonian).unwrap();
        for i in 0..9 {
            assert!((v3[i] - v6[i]).abs() < 1e-8, "eigenvalue {i}");
        }
    }

    #[test]
    fn sweep_single_point_matches_direct_diagonalization() {
        let family = paper_family().unwrap();
        let rows = tct_spectrum_sweep(&family, &[0.3], false).unwrap();
        let model = family.at_flux_b(0.3).unwrap();
        let (vals, _) = linalg::eigh(&model.hamiltonian).unwrap();
        assert_eq!(rows[0].eigenvalues.len(), vals.len());
        for (a, b) in rows[0].eigenvalues.iter().zip(vals.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_minimum_sits_at_the_paper_flux_point() {
        let family = paper_family().unwrap();
        let (flux_star, gap) = find_avoided_crossing(&family, (0.28, 0.31)).unwrap();
        assert!(
            (flux_star - 0.2945).abs() < 1e-3,
            "flux_star = {flux_star}, gap = {gap}"
        );
        assert!(gap > 0.0);
    }

    #[test]
    fn gap_curve_convex_near_its_minimum() {
        // oracle: finite-difference second derivative positive on a stencil
        let family = paper_family().unwrap();
        let (flux_star, _) = find_avoided_crossing(&family, (0.28, 0.31)).unwrap();
        let h = 5e-4;
        let gm = single_excitation_gap(&family, flux_star - h).unwrap();
        let g0 = single_excitation_gap(&family, flux_star).unwrap();
        let gp = single_excitation_gap(&family, flux_star + h).unwrap();
        assert!(gm + gp - 2.0 * g0 > 0.0);
    }

    #[test]
    fn decoupled_gap_closes_at_bare_degeneracy() {
        let family = paper_family().unwrap();
        let family = ModelFamily { zeta_a: 0.0, zeta_b: 0.0, ..family };
        // V-shaped gap: the 1e-6 flux tolerance bounds the resolvable gap at
        // slope * tol ~ 2e-5 GHz
        let (_, gap) = find_avoided_crossing(&family, (0.28, 0.32)).unwrap();
        assert!(gap < 5e-5, "gap = {gap}");
    }

    #[test]
    fn monotone_gap_reports_no_minimum() {
        let family = paper_family().unwrap();
        assert!(matches!(
            find_avoided_crossing(&family, (0.05, 0.12)),
            Err(Error::NoMinimum)
        ));
    }

    #[test]
    fn rejects_two_level_eigensystems() {
        let a = diagonalize_transmon(&crate::charge_basis::paper_transmon_a(), 2).unwrap();
        let b = diagonalize_transmon(&crate::charge_basis::paper_transmon_b(), 3).unwrap();
        let cav = CavitySpec::new(15.0, 3).unwrap();
        assert!(build_tct_hamiltonian(&a, &b, &cav, 0.3, 0.3).is_err());
    }
}
