//! Lindblad master-equation integration.
//!
//! Fixed-step RK4 on `drho/dt = -i[H, rho] + sum_j gamma_j D[O_j] rho`. The
//! drift `K = -iH - (1/2) sum gamma O^dag O` and the jump operators are
//! applied through sparse entry lists, which is what makes the 36-dimensional
//! composite-model runs cheap. An optional diagonal frame shift `D` (with
//! `[H, D] = 0`) is subtracted before integration and undone exactly on the
//! sampled states, so stiff ~15 GHz diagonals never enter the stepper.

use ndarray::{Array2, Zip};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ZERO};
use crate::table::Table;

/// Hermitian, unit-trace state over a labeled basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub data: Array2<C64>,
    pub labels: Vec<String>,
}

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = -1e-8;

impl DensityMatrix {
    /// Pure basis state |index><index|.
    pub fn pure(index: usize, labels: Vec<String>) -> Self {
        let dim = labels.len();
        let mut data = Array2::zeros((dim, dim));
        data[[index, index]] = C64::new(1.0, 0.0);
        Self { data, labels }
    }

    /// Pure state from a labeled basis ket name.
    pub fn pure_label(label: &str, labels: Vec<String>) -> Result<Self> {
        let index = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Ok(Self::pure(index, labels))
    }

    pub fn from_data(data: Array2<C64>, labels: Vec<String>) -> Result<Self> {
        let dm = Self { data, labels };
        dm.validate(0.0)?;
        Ok(dm)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn element(&self, bra: &str, ket: &str) -> Result<C64> {
        Ok(self.data[[self.index_of(bra)?, self.index_of(ket)?]])
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        Ok(self.element(label, label)?.re)
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.data)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&linalg::matmul(&self.data, &self.data)).re
    }

    /// Check Hermiticity, unit trace and positivity (smallest eigenvalue
    /// above `-1e-8`). `t_ns` only annotates the error.
    pub fn validate(&self, t_ns: f64) -> Result<()> {
        let n = self.dim();
        if self.data.ncols() != n || self.labels.len() != n {
            return Err(Error::DimensionMismatch(
                "density matrix shape/labels mismatch".into(),
            ));
        }
        let herm = linalg::max_abs_diff(&self.data, &linalg::dagger(&self.data));
        if herm > HERMITICITY_TOL {
            return Err(Error::InvariantViolation {
                t_ns,
                which: format!("hermiticity drift {herm:.3e}"),
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvariantViolation {
                t_ns,
                which: format!("trace = {tr}"),
            });
        }
        let (vals, _) = linalg::eigh(&self.data)?;
        if vals[0] < POSITIVITY_TOL {
            return Err(Error::InvariantViolation {
                t_ns,
                which: format!("negative eigenvalue {:.3e}", vals[0]),
            });
        }
        Ok(())
    }

    /// Clip eigenvalues in `[-1e-8, 0)` to zero and renormalize the trace.
    /// Anything more negative is an error; this is floating-point noise
    /// control, not a projection step.
    pub fn clipped_positive(&self, t_ns: f64) -> Result<Self> {
        let (vals, vecs) = linalg::eigh(&self.data)?;
        if vals[0] >= 0.0 {
            return Ok(self.clone());
        }
        if vals[0] < POSITIVITY_TOL {
            return Err(Error::InvariantViolation {
                t_ns,
                which: format!("negative eigenvalue {:.3e}", vals[0]),
            });
        }
        let n = self.dim();
        let mut data = Array2::zeros((n, n));
        for (k, &v) in vals.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    data[[i, j]] += vecs[[i, k]] * v * vecs[[j, k]].conj();
                }
            }
        }
        let tr = linalg::trace(&data).re;
        data.mapv_inplace(|z| z / tr);
        Ok(Self { data, labels: self.labels.clone() })
    }
}

/// Relaxation rates in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub gamma_a10: f64,
    pub gamma_b10: f64,
    pub gamma_a21: f64,
    pub gamma_b21: f64,
    pub kappa: f64,
}

impl DecayRates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_a10", self.gamma_a10),
            ("gamma_b10", self.gamma_b10),
            ("gamma_a21", self.gamma_a21),
            ("gamma_b21", self.gamma_b21),
            ("kappa", self.kappa),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} MHz < 0")));
            }
        }
        Ok(())
    }

    /// Rates of the three-tier comparison runs.
    pub fn paper_dynamics() -> Self {
        Self { gamma_a10: 0.3, gamma_b10: 0.3, gamma_a21: 0.2, gamma_b21: 0.2, kappa: 0.3 }
    }

    /// Rates of the monitored-transmon runs (no f levels, no cavity decay).
    pub fn paper_monitoring() -> Self {
        Self { gamma_a10: 0.3, gamma_b10: 0.2, gamma_a21: 0.0, gamma_b21: 0.0, kappa: 0.0 }
    }
}

/// Lindblad dissipator `D[O] rho = O rho O^dag - {O^dag O, rho} / 2`.
pub fn dissipator(op: &Array2<C64>, rho: &Array2<C64>) -> Result<Array2<C64>> {
    if op.dim() != rho.dim() || op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "dissipator: op {:?} vs rho {:?}",
            op.dim(),
            rho.dim()
        )));
    }
    let od = linalg::dagger(op);
    let feed = linalg::matmul(&linalg::matmul(op, rho), &od);
    let oo = linalg::matmul(&od, op);
    let anti = linalg::anticommutator(&oo, rho);
    Ok(&feed - &anti.mapv(|z| 0.5 * z))
}

/// One decay channel: rate in MHz and its jump operator on the model basis.
#[derive(Debug, Clone)]
pub struct JumpTerm {
    pub rate_mhz: f64,
    pub op: Array2<C64>,
}

/// Sparse entry list (row, col, value).
struct SpMat {
    entries: Vec<(usize, usize, C64)>,
}

impl SpMat {
    fn from_dense(a: &Array2<C64>) -> Self {
        let mut entries = Vec::new();
        for ((i, j), &v) in a.indexed_iter() {
            if v != ZERO {
                entries.push((i, j, v));
            }
        }
        Self { entries }
    }

    /// out += scale * M rho
    fn acc_left(&self, scale: f64, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let n = rho.ncols();
        for &(i, k, v) in &self.entries {
            let sv = v * scale;
            let src = rho.row(k);
            let src = src.as_slice().unwrap();
            let mut dst = out.row_mut(i);
            let dst = dst.as_slice_mut().unwrap();
            for j in 0..n {
                dst[j] += sv * src[j];
            }
        }
    }

    /// out += scale * rho M^dag
    fn acc_right_dagger(&self, scale: f64, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let n = rho.nrows();
        for &(j, k, v) in &self.entries {
            let sv = v.conj() * scale;
            for i in 0..n {
                out[[i, j]] += sv * rho[[i, k]];
            }
        }
    }
}

/// Integration controls. `frame_diag_ghz` is the exact diagonal frame shift;
/// samples are rotated back to the lab frame.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt_ns: f64,
    pub sample_every: usize,
    pub frame_diag_ghz: Option<Vec<f64>>,
    pub check_invariants: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_ns: 1.0, sample_every: 1, frame_diag_ghz: None, check_invariants: true }
    }
}

/// Sampled master-equation run.
#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub times_ns: Vec<f64>,
    pub states: Vec<Array2<C64>>,
    pub labels: Vec<String>,
}

impl MasterSolution {
    pub fn state_at(&self, k: usize) -> DensityMatrix {
        DensityMatrix { data: self.states[k].clone(), labels: self.labels.clone() }
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn population_series(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.index_of(label)?;
        Ok(self.states.iter().map(|s| s[[i, i]].re).collect())
    }

    pub fn element_series(&self, bra: &str, ket: &str) -> Result<Vec<C64>> {
        let i = self.index_of(bra)?;
        let j = self.index_of(ket)?;
        Ok(self.states.iter().map(|s| s[[i, j]]).collect())
    }
}

struct Rk4Workspace {
    k1: Array2<C64>,
    k2: Array2<C64>,
    k3: Array2<C64>,
    k4: Array2<C64>,
    stage: Array2<C64>,
}

struct Generator {
    drift: SpMat,
    jumps: Vec<(f64, SpMat)>,
}

impl Generator {
    /// rhs = K rho + rho K^dag + sum_j gamma_j O_j rho O_j^dag
    fn rhs(&self, rho: &Array2<C64>, scratch: &mut Array2<C64>, out: &mut Array2<C64>) {
        out.fill(ZERO);
        self.drift.acc_left(1.0, rho, out);
        self.drift.acc_right_dagger(1.0, rho, out);
        for (rate, op) in &self.jumps {
            scratch.fill(ZERO);
            op.acc_left(1.0, rho, scratch);
            op.acc_right_dagger(*rate, scratch, out);
        }
    }
}

/// Integrate the master equation and sample every `sample_every` steps
/// (sample 0 is the initial state; the final time is always sampled).
pub fn evolve_master(
    h: &Array2<C64>,
    jumps: &[JumpTerm],
    rho0: &DensityMatrix,
    t_final_ns: f64,
    opts: &EvolveOptions,
) -> Result<MasterSolution> {
    let dim = rho0.dim();
    if h.dim() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "H is {:?}, state is {dim}x{dim}",
            h.dim()
        )));
    }
    for j in jumps {
        if j.op.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch("jump operator dimension".into()));
        }
        if j.rate_mhz < 0.0 {
            return Err(Error::InvalidParameter(format!("rate {} MHz < 0", j.rate_mhz)));
        }
    }
    if !(opts.dt_ns > 0.0) || !(t_final_ns >= 0.0) {
        return Err(Error::InvalidParameter("dt and t_final must be positive".into()));
    }
    rho0.validate(0.0)?;

    // frame shift: H_rot = H - diag(D), exact when [H, D] = 0
    let mut h_rot = h.clone();
    if let Some(d) = &opts.frame_diag_ghz {
        if d.len() != dim {
            return Err(Error::DimensionMismatch("frame diagonal length".into()));
        }
        let mut dmat = Array2::zeros((dim, dim));
        for (i, &v) in d.iter().enumerate() {
            dmat[[i, i]] = C64::new(v, 0.0);
        }
        let comm = linalg::commutator(h, &dmat);
        if linalg::max_abs(&comm) > 1e-9 * linalg::max_abs(h).max(1.0) {
            return Err(Error::InvalidParameter(
                "frame diagonal does not commute with H".into(),
            ));
        }
        h_rot = &h_rot - &dmat;
    }

    // drift K = -i H_rot - (1/2) sum gamma O^dag O
    let mut k = h_rot.mapv(|z| -linalg::I * z);
    for j in jumps {
        let gamma = crate::mhz_to_ghz(j.rate_mhz);
        let oo = linalg::matmul(&linalg::dagger(&j.op), &j.op);
        k = &k - &oo.mapv(|z| 0.5 * gamma * z);
    }
    let generator = Generator {
        drift: SpMat::from_dense(&k),
        jumps: jumps
            .iter()
            .filter(|j| j.rate_mhz > 0.0)
            .map(|j| (crate::mhz_to_ghz(j.rate_mhz), SpMat::from_dense(&j.op)))
            .collect(),
    };

    let n_steps = (t_final_ns / opts.dt_ns).round().max(0.0) as usize;
    let sample_every = opts.sample_every.max(1);
    let dt = opts.dt_ns;

    let mut ws = Rk4Workspace {
        k1: Array2::zeros((dim, dim)),
        k2: Array2::zeros((dim, dim)),
        k3: Array2::zeros((dim, dim)),
        k4: Array2::zeros((dim, dim)),
        stage: Array2::zeros((dim, dim)),
    };
    let mut scratch = Array2::zeros((dim, dim));
    let mut rho = rho0.data.clone();

    let mut times_ns = Vec::new();
    let mut states = Vec::new();
    let mut sample = |rho: &Array2<C64>, step: usize| -> Result<()> {
        let t = step as f64 * dt;
        let mut out = rho.clone();
        if let Some(d) = &opts.frame_diag_ghz {
            for i in 0..dim {
                for j in 0..dim {
                    let phase = C64::new(0.0, -(d[i] - d[j]) * t).exp();
                    out[[i, j]] *= phase;
                }
            }
        }
        if opts.check_invariants {
            let dm = DensityMatrix { data: out, labels: rho0.labels.clone() };
            let dm = dm.clipped_positive(t)?;
            dm.validate(t)?;
            times_ns.push(t);
            states.push(dm.data);
        } else {
            times_ns.push(t);
            states.push(out);
        }
        Ok(())
    };

    sample(&rho, 0)?;
    for step in 0..n_steps {
        generator.rhs(&rho, &mut scratch, &mut ws.k1);
        Zip::from(&mut ws.stage).and(&rho).and(&ws.k1).for_each(|s, &r, &k| {
            *s = r + 0.5 * dt * k;
        });
        generator.rhs(&ws.stage, &mut scratch, &mut ws.k2);
        Zip::from(&mut ws.stage).and(&rho).and(&ws.k2).for_each(|s, &r, &k| {
            *s = r + 0.5 * dt * k;
        });
        generator.rhs(&ws.stage, &mut scratch, &mut ws.k3);
        Zip::from(&mut ws.stage).and(&rho).and(&ws.k3).for_each(|s, &r, &k| {
            *s = r + dt * k;
        });
        generator.rhs(&ws.stage, &mut scratch, &mut ws.k4);
        let w = dt / 6.0;
        Zip::from(&mut rho)
            .and(&ws.k1)
            .and(&ws.k2)
            .and(&ws.k3)
            .and(&ws.k4)
            .for_each(|r, &k1, &k2, &k3, &k4| {
                *r += w * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            });
        let step_done = step + 1;
        if step_done % sample_every == 0 || step_done == n_steps {
            sample(&rho, step_done)?;
        }
    }

    Ok(MasterSolution { times_ns, states, labels: rho0.labels.clone() })
}

/// Re/Im of selected density-matrix elements per sample time.
pub fn populations_and_coherences(
    solution: &MasterSolution,
    which: &[(String, String)],
) -> Result<Table> {
    let mut header = vec!["time_ns".to_string()];
    let mut indices = Vec::new();
    for (bra, ket) in which {
        let i = solution.index_of(bra)?;
        let j = solution.index_of(ket)?;
        indices.push((i, j));
        header.push(format!("re_{bra}_{ket}"));
        header.push(format!("im_{bra}_{ket}"));
    }
    let mut table = Table::new(header);
    for (k, t) in solution.times_ns.iter().enumerate() {
        let mut row = vec![*t];
        for &(i, j) in &indices {
            let z = solution.states[k][[i, j]];
            row.push(z.re);
            row.push(z.im);
        }
        table.push(row);
    }
    Ok(table)
}

/// Two-qubit lowering operator for transmon a (`|gg><eg| + |ge><ee|`) on the
/// {gg, ge, eg, ee} basis.
pub fn tt_lowering_a() -> Array2<C64> {
    let mut op = Array2::zeros((4, 4));
    op[[0, 2]] = C64::new(1.0, 0.0);
    op[[1, 3]] = C64::new(1.0, 0.0);
    op
}

/// Two-qubit lowering operator for transmon b.
pub fn tt_lowering_b() -> Array2<C64> {
    let mut op = Array2::zeros((4, 4));
    op[[0, 1]] = C64::new(1.0, 0.0);
    op[[2, 3]] = C64::new(1.0, 0.0);
    op
}

/// Excited-state projector of transmon a on the two-qubit basis.
pub fn tt_excited_projector_a() -> Array2<C64> {
    let mut op = Array2::zeros((4, 4));
    op[[2, 2]] = C64::new(1.0, 0.0);
    op[[3, 3]] = C64::new(1.0, 0.0);
    op
}

pub fn tt_excited_projector_b() -> Array2<C64> {
    let mut op = Array2::zeros((4, 4));
    op[[1, 1]] = C64::new(1.0, 0.0);
    op[[3, 3]] = C64::new(1.0, 0.0);
    op
}
