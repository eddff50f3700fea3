//! Dispersive transformation of the composite model.
//!
//! Produces the second-order transformed Hamiltonian split into its bare,
//! Lamb-shift, ac-Stark and exchange parts, and the cavity-eliminated
//! effective two-transmon model whose exchange strength `G_eg` is the
//! canonical coupling constant used downstream.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::charge_basis::{diagonalize_transmon, TransmonEigensystem};
use crate::composite::{CompositeModel, ModelFamily};
use crate::error::{Error, Result};

/// Couplings `lambda^x_{i,i+1} = zeta^x n^x_{i,i+1}` (GHz), dispersive
/// amplitudes `beta^x_i = lambda / (E_{i+1} - E_i - omega_c)` and smallness
/// parameters `eta^x_i = |beta^x_i|`, for x in {a, b} and i in {0, 1}.
#[derive(Debug, Clone, Copy)]
pub struct DispersiveParams {
    pub lambda_a: [f64; 2],
    pub lambda_b: [f64; 2],
    pub beta_a: [f64; 2],
    pub beta_b: [f64; 2],
    pub eta_a: [f64; 2],
    pub eta_b: [f64; 2],
}

impl DispersiveParams {
    /// Exchange strength `G_eg = (lambda^a_01 beta^b_0 + lambda^b_01 beta^a_0) / 2`.
    pub fn g_eg(&self) -> f64 {
        0.5 * (self.lambda_a[0] * self.beta_b[0] + self.lambda_b[0] * self.beta_a[0])
    }

    /// Lamb shift of level e for transmon a: `beta^a_0 lambda^a_01`.
    pub fn lamb_shift_a(&self) -> f64 {
        self.beta_a[0] * self.lambda_a[0]
    }

    pub fn lamb_shift_b(&self) -> f64 {
        self.beta_b[0] * self.lambda_b[0]
    }
}

const DISPERSIVE_ETA_LIMIT: f64 = 0.15;
const MIN_DETUNING: f64 = 0.5;

/// Dispersive parameters from the transmon eigensystems directly.
pub fn dispersive_params_from_parts(
    a: &TransmonEigensystem,
    b: &TransmonEigensystem,
    omega_c: f64,
    zeta_a: f64,
    zeta_b: f64,
) -> Result<DispersiveParams> {
    let mut lambda = [[0.0; 2]; 2];
    let mut beta = [[0.0; 2]; 2];
    let mut eta = [[0.0; 2]; 2];
    for (x, (es, zeta)) in [(a, zeta_a), (b, zeta_b)].iter().enumerate() {
        for i in 0..2 {
            let detuning = es.gap(i) - omega_c;
            if detuning.abs() <= MIN_DETUNING {
                return Err(Error::InvalidParameter(format!(
                    "near-resonant transition {}: |E_{}{} - omega_c| = {:.3} GHz <= {MIN_DETUNING}",
                    ["a", "b"][x],
                    i + 1,
                    i,
                    detuning.abs()
                )));
            }
            lambda[x][i] = zeta * es.charge_elements[i];
            beta[x][i] = lambda[x][i] / detuning;
            eta[x][i] = beta[x][i].abs();
            if eta[x][i] >= DISPERSIVE_ETA_LIMIT {
                return Err(Error::NotDispersive {
                    which: format!("{}_{}", ["a", "b"][x], i),
                    eta: eta[x][i],
                });
            }
        }
    }
    Ok(DispersiveParams {
        lambda_a: lambda[0],
        lambda_b: lambda[1],
        beta_a: beta[0],
        beta_b: beta[1],
        eta_a: eta[0],
        eta_b: eta[1],
    })
}

/// Dispersive parameters of a composite model.
pub fn compute_dispersive_params(model: &CompositeModel) -> Result<DispersiveParams> {
    dispersive_params_from_parts(
        &model.transmon_a,
        &model.transmon_b,
        model.cavity.frequency,
        model.coupling_a,
        model.coupling_b,
    )
}

/// The dispersively transformed Hamiltonian, component by component, on the
/// same basis as the parent composite model.
#[derive(Debug, Clone)]
pub struct HdTct {
    pub h0: Array2<C64>,
    pub h_ls: Array2<C64>,
    pub h_ac: Array2<C64>,
    pub h_c: Array2<C64>,
}

impl HdTct {
    pub fn total(&self) -> Array2<C64> {
        &(&self.h0 + &self.h_ls) + &(&self.h_ac + &self.h_c)
    }
}

/// Second-order transformed Hamiltonian: bare energies, Lamb shift, ac Stark
/// shift and the cavity-mediated exchange.
pub fn build_h_d_tct(model: &CompositeModel, params: &DispersiveParams) -> HdTct {
    let dim = model.dimension();
    let mut h0 = Array2::zeros((dim, dim));
    let mut h_ls = Array2::zeros((dim, dim));
    let mut h_ac = Array2::zeros((dim, dim));
    let mut h_c = Array2::zeros((dim, dim));

    let ea = &model.transmon_a.energies;
    let eb = &model.transmon_b.energies;
    let lambda = [params.lambda_a, params.lambda_b];
    let beta = [params.beta_a, params.beta_b];

    for (idx, &(ia, n, ib)) in model.basis_labels.iter().enumerate() {
        h0[[idx, idx]] = C64::new(
            ea[ia] + eb[ib] + model.cavity.frequency * n as f64,
            0.0,
        );
        // Lamb shift: level i+1 of transmon x raised by beta^x_i lambda^x_i
        let mut ls = 0.0;
        if ia > 0 {
            ls += beta[0][ia - 1] * lambda[0][ia - 1];
        }
        if ib > 0 {
            ls += beta[1][ib - 1] * lambda[1][ib - 1];
        }
        h_ls[[idx, idx]] = C64::new(ls, 0.0);
        // ac Stark: photon-number-weighted ladder shifts
        let mut ac = 0.0;
        for i in 0..2 {
            let chi_a = lambda[0][i] * beta[0][i];
            if ia == i + 1 {
                ac += chi_a * n as f64;
            }
            if ia == i {
                ac -= chi_a * n as f64;
            }
            let chi_b = lambda[1][i] * beta[1][i];
            if ib == i + 1 {
                ac += chi_b * n as f64;
            }
            if ib == i {
                ac -= chi_b * n as f64;
            }
        }
        h_ac[[idx, idx]] = C64::new(ac, 0.0);
    }

    // exchange: |i, k+1><i+1, k| on the transmon pair, identity on the cavity
    for i in 0..2usize {
        for k in 0..2usize {
            let g = 0.5
                * (params.lambda_a[i] * params.beta_b[k]
                    + params.lambda_b[k] * params.beta_a[i]);
            for n in 0..model.cavity.levels() {
                let row = model.index(i, n, k + 1);
                let col = model.index(i + 1, n, k);
                h_c[[row, col]] += C64::new(g, 0.0);
                h_c[[col, row]] += C64::new(g, 0.0);
            }
        }
    }

    HdTct { h0, h_ls, h_ac, h_c }
}

/// Basis labels of the effective two-transmon model, index `2 i_a + i_b`.
pub const TT_LABELS: [&str; 4] = ["gg", "ge", "eg", "ee"];

pub fn tt_labels() -> Vec<String> {
    TT_LABELS.iter().map(|s| s.to_string()).collect()
}

/// Cavity-eliminated two-transmon model on {gg, ge, eg, ee}: Lamb-shifted
/// level energies on the diagonal and the `G_eg` exchange between ge and eg.
#[derive(Debug, Clone)]
pub struct EffectiveTTModel {
    /// Lamb-shifted e-level energies `(E^a_e, E^b_e)` in GHz (g levels are 0).
    pub level_energies: (f64, f64),
    pub g_eg: f64,
    pub hamiltonian: Array2<C64>,
}

impl EffectiveTTModel {
    /// Interaction-frame Hamiltonian: the exchange term alone.
    pub fn interaction_hamiltonian(&self) -> Array2<C64> {
        let mut h = self.hamiltonian.clone();
        for i in 0..4 {
            h[[i, i]] = C64::new(0.0, 0.0);
        }
        h
    }
}

/// Build the effective two-transmon Hamiltonian. The transmons must be tuned
/// near the g-e resonance: shifted gaps differing by more than `10 |G_eg|`
/// are rejected.
pub fn build_h_d_tt(
    params: &DispersiveParams,
    a: &TransmonEigensystem,
    b: &TransmonEigensystem,
) -> Result<EffectiveTTModel> {
    let g = params.g_eg();
    let ea = a.energies[1] + params.lamb_shift_a();
    let eb = b.energies[1] + params.lamb_shift_b();
    let gap_diff = (ea - eb).abs();
    if gap_diff > 10.0 * g.abs() {
        return Err(Error::OffResonance { gap_diff, limit: 10.0 * g.abs() });
    }
    let mut h = Array2::zeros((4, 4));
    h[[1, 1]] = C64::new(eb, 0.0);
    h[[2, 2]] = C64::new(ea, 0.0);
    h[[3, 3]] = C64::new(ea + eb, 0.0);
    h[[1, 2]] = C64::new(g, 0.0);
    h[[2, 1]] = C64::new(g, 0.0);
    Ok(EffectiveTTModel { level_energies: (ea, eb), g_eg: g, hamiltonian: h })
}

/// Flux of transmon b at which the Lamb-shifted g-e gaps of the two transmons
/// match, found by bisection on the shifted-gap difference.
pub fn retune_flux_b(family: &ModelFamily, bracket: (f64, f64)) -> Result<f64> {
    let shifted_diff = |flux_b: f64| -> Result<f64> {
        let b = diagonalize_transmon(&family.spec_b.with_flux(flux_b), 3)?;
        let params = dispersive_params_from_parts(
            &family.transmon_a,
            &b,
            family.cavity.frequency,
            family.zeta_a,
            family.zeta_b,
        )?;
        let ea = family.transmon_a.energies[1] + params.lamb_shift_a();
        let eb = b.energies[1] + params.lamb_shift_b();
        Ok(eb - ea)
    };
    let (mut lo, mut hi) = bracket;
    let mut flo = shifted_diff(lo)?;
    let fhi = shifted_diff(hi)?;
    if flo * fhi > 0.0 {
        return Err(Error::NoMinimum);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fmid = shifted_diff(mid)?;
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Flat record of the dispersive reduction for reporting.
#[derive(Debug, Clone)]
pub struct DispersiveSummary {
    pub params: DispersiveParams,
    pub g_eg: f64,
    pub shifted_gap_a: f64,
    pub shifted_gap_b: f64,
}

impl DispersiveSummary {
    pub fn new(
        params: &DispersiveParams,
        a: &TransmonEigensystem,
        b: &TransmonEigensystem,
    ) -> Self {
        Self {
            params: *params,
            g_eg: params.g_eg(),
            shifted_gap_a: a.energies[1] + params.lamb_shift_a(),
            shifted_gap_b: b.energies[1] + params.lamb_shift_b(),
        }
    }

    pub fn text_block(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        for i in 0..2 {
            s += &format!("lambda_a_{}{} = {:.12e} GHz\n", i, i + 1, p.lambda_a[i]);
            s += &format!("lambda_b_{}{} = {:.12e} GHz\n", i, i + 1, p.lambda_b[i]);
            s += &format!("beta_a_{i} = {:.12e}\n", p.beta_a[i]);
            s += &format!("beta_b_{i} = {:.12e}\n", p.beta_b[i]);
            s += &format!("eta_a_{i} = {:.12e}\n", p.eta_a[i]);
            s += &format!("eta_b_{i} = {:.12e}\n", p.eta_b[i]);
        }
        s += &format!("g_eg = {:.12e} GHz\n", self.g_eg);
        s += &format!("g_eg_mhz = {:.12e} MHz\n", self.g_eg * 1e3);
        s += &format!("shifted_gap_a = {:.12e} GHz\n", self.shifted_gap_a);
        s += &format!("shifted_gap_b = {:.12e} GHz\n", self.shifted_gap_b);
        s
    }

    pub fn csv_header() -> &'static str {
        "lambda_a_01,lambda_a_12,lambda_b_01,lambda_b_12,beta_a_0,beta_a_1,beta_b_0,beta_b_1,\
         eta_a_0,eta_a_1,eta_b_0,eta_b_1,g_eg_ghz,shifted_gap_a,shifted_gap_b"
    }

    pub fn csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            p.lambda_a[0], p.lambda_a[1], p.lambda_b[0], p.lambda_b[1],
            p.beta_a[0], p.beta_a[1], p.beta_b[0], p.beta_b[1],
            p.eta_a[0], p.eta_a[1], p.eta_b[0], p.eta_b[1],
            self.g_eg, self.shifted_gap_a, self.shifted_gap_b,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{find_avoided_crossing, paper_family};
    use crate::linalg;

    fn paper_setup() -> (CompositeModel, DispersiveParams) {
        let family = paper_family().unwrap();
        let (flux_star, _) = find_avoided_crossing(&family, (0.28, 0.31)).unwrap();
        let model = family.at_flux_b(flux_star).unwrap();
        let params = compute_dispersive_params(&model).unwrap();
        (model, params)
    }

    #[test]
    fn paper_parameters_are_dispersive() {
        let (_, params) = paper_setup();
        for i in 0..2 {
            assert!(params.eta_a[i] < 0.15);
            assert!(params.eta_b[i] < 0.15);
        }
    }

    #[test]
    fn decoupled_limit_has_zero_lambdas_and_betas() {
        let family = paper_family().unwrap();
        let b = diagonalize_transmon(&family.spec_b.with_flux(0.2945), 3).unwrap();
        let params =
            dispersive_params_from_parts(&family.transmon_a, &b, 15.0, 0.0, 0.0).unwrap();
        assert_eq!(params.lambda_a, [0.0; 2]);
        assert_eq!(params.beta_b, [0.0; 2]);
    }

    #[test]
    fn beta_negative_below_the_cavity() {
        let (_, params) = paper_setup();
        // qubits sit below the cavity: E_1 - E_0 < omega_c
        assert!(params.beta_a[0] < 0.0);
        assert!(params.beta_b[0] < 0.0);
    }

    #[test]
    fn zero_params_reduce_transformed_hamiltonian_to_h0() {
        let (model, _) = paper_setup();
        let zero = DispersiveParams {
            lambda_a: [0.0; 2],
            lambda_b: [0.0; 2],
            beta_a: [0.0; 2],
            beta_b: [0.0; 2],
            eta_a: [0.0; 2],
            eta_b: [0.0; 2],
        };
        let hd = build_h_d_tct(&model, &zero);
        assert_eq!(linalg::max_abs(&hd.h_ls), 0.0);
        assert_eq!(linalg::max_abs(&hd.h_ac), 0.0);
        assert_eq!(linalg::max_abs(&hd.h_c), 0.0);
        assert!(linalg::max_abs_diff(&hd.total(), &hd.h0) < 1e-15);
    }

    #[test]
    fn exchange_element_in_zero_photon_sector_is_g_eg() {
        let (model, params) = paper_setup();
        let hd = build_h_d_tct(&model, &params);
        let ge = model.index(0, 0, 1);
        let eg = model.index(1, 0, 0);
        let g = params.g_eg();
        assert!((hd.h_c[[ge, eg]].re - g).abs() < 1e-15);
    }

    #[test]
    fn transformed_spectrum_tracks_exact_spectrum_to_second_order() {
        // oracle: exact diagonalization of both H_TCT and H^D_TCT
        let (model, params) = paper_setup();
        let hd = build_h_d_tct(&model, &params);
        let (exact, _) = linalg::eigh(&model.hamiltonian).unwrap();
        let (disp, _) = linalg::eigh(&hd.total()).unwrap();
        // lowest few levels (the N <= 1 sector and the bottom of N = 2)
        for i in 0..6 {
            assert!(
                (exact[i] - disp[i]).abs() < 1e-3,
                "level {i}: exact {} vs dispersive {}",
                exact[i],
                disp[i]
            );
        }
    }

    #[test]
    fn every_tier_is_hermitian() {
        let (model, params) = paper_setup();
        let hd = build_h_d_tct(&model, &params);
        for h in [&hd.h0, &hd.h_ls, &hd.h_ac, &hd.h_c, &hd.total()] {
            assert!(linalg::max_abs_diff(h, &linalg::dagger(h)) < 1e-14);
        }
        let tt = build_h_d_tt(&params, &model.transmon_a, &model.transmon_b).unwrap();
        assert!(
            linalg::max_abs_diff(&tt.hamiltonian, &linalg::dagger(&tt.hamiltonian)) < 1e-14
        );
    }

    #[test]
    fn symmetric_transmons_give_g_eg_equal_lambda_beta() {
        let params = DispersiveParams {
            lambda_a: [0.2, 0.3],
            lambda_b: [0.2, 0.3],
            beta_a: [-0.03, -0.04],
            beta_b: [-0.03, -0.04],
            eta_a: [0.03, 0.04],
            eta_b: [0.03, 0.04],
        };
        assert!((params.g_eg() - 0.2 * (-0.03)).abs() < 1e-15);
    }

    #[test]
    fn interaction_frame_strips_diagonals_leaving_exchange() {
        let (model, params) = paper_setup();
        let tt = build_h_d_tt(&params, &model.transmon_a, &model.transmon_b).unwrap();
        let hi = tt.interaction_hamiltonian();
        let g = C64::new(tt.g_eg, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 2) || (i, j) == (2, 1) {
                    g
                } else {
                    C64::new(0.0, 0.0)
                };
                assert_eq!(hi[[i, j]], want);
            }
        }
    }

    #[test]
    fn g_eg_is_half_the_avoided_crossing_gap() {
        let family = paper_family().unwrap();
        let (_, gap) = find_avoided_crossing(&family, (0.28, 0.31)).unwrap();
        let (_, params) = paper_setup();
        let g = params.g_eg().abs();
        assert!(
            (2.0 * g - gap).abs() / gap < 0.05,
            "2|G_eg| = {} vs gap = {gap}",
            2.0 * g
        );
    }

    #[test]
    fn retuned_flux_matches_avoided_crossing_location() {
        let family = paper_family().unwrap();
        let flux_retuned = retune_flux_b(&family, (0.28, 0.31)).unwrap();
        let (flux_star, _) = find_avoided_crossing(&family, (0.28, 0.31)).unwrap();
        assert!(
            (flux_retuned - flux_star).abs() < 2e-3,
            "retuned {flux_retuned} vs crossing {flux_star}"
        );
    }

    #[test]
    fn off_resonance_is_rejected() {
        let family = paper_family().unwrap();
        let b = diagonalize_transmon(&family.spec_b.with_flux(0.1), 3).unwrap();
        let params =
            dispersive_params_from_parts(&family.transmon_a, &b, 15.0, 0.3, 0.3).unwrap();
        assert!(matches!(
            build_h_d_tt(&params, &family.transmon_a, &b),
            Err(Error::OffResonance { .. })
        ));
    }
}
