//! Dense complex linear algebra for small matrices (n <= ~100).
//!
//! Everything here is self-contained: a cyclic Jacobi eigensolver for
//! Hermitian matrices, a Hessenberg + shifted-QR eigensolver for general
//! complex matrices (validated against closed-form spectra elsewhere in the
//! crate), an LU solver, and a scaling-and-squaring matrix exponential.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_elem(n, ONE))
}

/// Conjugate transpose (standard layout).
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let (m, n) = a.dim();
    Array2::from_shape_fn((n, m), |(i, j)| a[[j, i]].conj())
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Matrix product with a skip on exact zeros, which the sparse model
/// Hamiltonians hit often.
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (m, ka) = a.dim();
    let (kb, n) = b.dim();
    assert_eq!(ka, kb, "matmul: inner dimensions {ka} vs {kb}");
    let b = b.as_standard_layout();
    let mut out = Array2::zeros((m, n));
    for i in 0..m {
        let mut orow = out.row_mut(i);
        let orow = orow.as_slice_mut().unwrap();
        for k in 0..ka {
            let aik = a[[i, k]];
            if aik == ZERO {
                continue;
            }
            let brow = b.row(k);
            let brow = brow.as_slice().unwrap();
            for j in 0..n {
                orow[j] += aik * brow[j];
            }
        }
    }
    out
}

pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    &matmul(a, b) - &matmul(b, a)
}

pub fn anticommutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    &matmul(a, b) + &matmul(b, a)
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(a: &Array2<C64>, tol: f64) -> bool {
    let (n, m) = a.dim();
    if n != m {
        return false;
    }
    for i in 0..n {
        for j in i..n {
            if (a[[i, j]] - a[[j, i]].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// 0.5 (A + A^dagger).
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let ad = dagger(a);
    (a + &ad).mapv(|z| 0.5 * z)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi
/// rotations. Returns eigenvalues ascending with matching eigenvector
/// columns.
pub fn eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigh expects a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut m = a.clone();
    let mut v = identity(n);
    let scale = frobenius_norm(&m).max(f64::MIN_POSITIVE);
    let stop = (f64::EPSILON * scale).powi(2);

    let max_sweeps = 60;
    for _sweep in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[[p, q]].norm_sqr())
            .sum();
        if 2.0 * off <= stop {
            // diagonal is real up to roundoff
            let mut eigs: Vec<(f64, usize)> =
                (0..n).map(|i| (m[[i, i]].re, i)).collect();
            eigs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let values: Vec<f64> = eigs.iter().map(|e| e.0).collect();
            let mut vectors = Array2::zeros((n, n));
            for (col, &(_, src)) in eigs.iter().enumerate() {
                vectors.column_mut(col).assign(&v.column(src));
            }
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let b = apq.norm();
                if b <= f64::EPSILON * scale * 1e-4 {
                    continue;
                }
                let phase = apq / b;
                let alpha = m[[p, p]].re;
                let delta = m[[q, q]].re;
                let tau = (alpha - delta) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns: A <- A J with J[p,p]=c, J[p,q]=-s*phase,
                // J[q,p]=s*conj(phase), J[q,q]=c
                for i in 0..n {
                    let aip = m[[i, p]];
                    let aiq = m[[i, q]];
                    m[[i, p]] = c * aip + s * phase.conj() * aiq;
                    m[[i, q]] = -s * phase * aip + c * aiq;
                }
                // rows: A <- J^dagger A
                for j in 0..n {
                    let apj = m[[p, j]];
                    let aqj = m[[q, j]];
                    m[[p, j]] = c * apj + s * phase * aqj;
                    m[[q, j]] = -s * phase.conj() * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip + s * phase.conj() * viq;
                    v[[i, q]] = -s * phase * vip + c * viq;
                }
            }
        }
    }
    Err(Error::ConvergenceFailure(max_sweeps))
}

/// Result of a general complex eigendecomposition: `vectors` holds the right
/// eigenvectors as columns, each normalized to unit 2-norm.
pub struct ComplexEig {
    pub values: Vec<C64>,
    pub vectors: Array2<C64>,
}

/// Complex Givens rotation (c real) with [c s; -conj(s) c] [f; g] = [r; 0].
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let r = (fa * fa + ga * ga).sqrt();
    let c = fa / r;
    let s = (f / fa) * g.conj() / r;
    (c, s)
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
///
/// Householder reduction to Hessenberg form, implicit single-shift QR with
/// Wilkinson shifts to a triangular Schur form, then eigenvectors by
/// back-substitution. Diverging eigenvector condition numbers near defective
/// points are expected and reported by the caller, not an error here.
pub fn eig(a: &Array2<C64>) -> Result<ComplexEig> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eig expects a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(ComplexEig { values: vec![], vectors: Array2::zeros((0, 0)) });
    }
    let mut h = a.clone();
    let mut q = identity(n);
    hessenberg(&mut h, &mut q);
    schur(&mut h, &mut q)?;

    let values: Vec<C64> = (0..n).map(|i| h[[i, i]]).collect();
    let tnorm = max_abs(&h).max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;

    // Back-substitution on the triangular factor, then rotate into the
    // original basis. Near-degenerate pivots are floored at smin, the usual
    // trick that keeps defective clusters finite (and visibly parallel).
    let mut vectors = Array2::zeros((n, n));
    let mut y = vec![ZERO; n];
    for k in 0..n {
        let lambda = values[k];
        y.iter_mut().for_each(|z| *z = ZERO);
        y[k] = ONE;
        for j in (0..k).rev() {
            let mut num = ZERO;
            for m in (j + 1)..=k {
                num += h[[j, m]] * y[m];
            }
            let mut den = h[[j, j]] - lambda;
            if den.norm() < smin {
                den = C64::new(smin, 0.0);
            }
            y[j] = -num / den;
        }
        // v = Q y, normalized
        let mut norm2 = 0.0;
        for i in 0..n {
            let mut acc = ZERO;
            for m in 0..=k {
                acc += q[[i, m]] * y[m];
            }
            vectors[[i, k]] = acc;
            norm2 += acc.norm_sqr();
        }
        let norm = norm2.sqrt().max(f64::MIN_POSITIVE);
        for i in 0..n {
            vectors[[i, k]] /= norm;
        }
    }
    Ok(ComplexEig { values, vectors })
}

fn hessenberg(h: &mut Array2<C64>, q: &mut Array2<C64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    let mut u = vec![ZERO; n];
    for k in 0..(n - 2) {
        let mut xnorm2 = 0.0;
        for i in (k + 1)..n {
            xnorm2 += h[[i, k]].norm_sqr();
        }
        let xnorm = xnorm2.sqrt();
        if xnorm <= f64::MIN_POSITIVE {
            continue;
        }
        let alpha = h[[k + 1, k]];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { ONE };
        let m = n - (k + 1);
        for (idx, i) in ((k + 1)..n).enumerate() {
            u[idx] = h[[i, k]];
        }
        u[0] += phase * xnorm;
        let unorm2: f64 = u[..m].iter().map(|z| z.norm_sqr()).sum();
        if unorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let beta = 2.0 / unorm2;
        // left: rows k+1..n
        for j in k..n {
            let mut s = ZERO;
            for idx in 0..m {
                s += u[idx].conj() * h[[k + 1 + idx, j]];
            }
            s *= beta;
            for idx in 0..m {
                let ui = u[idx];
                h[[k + 1 + idx, j]] -= s * ui;
            }
        }
        // right: columns k+1..n
        for i in 0..n {
            let mut s = ZERO;
            for idx in 0..m {
                s += h[[i, k + 1 + idx]] * u[idx];
            }
            s *= beta;
            for idx in 0..m {
                h[[i, k + 1 + idx]] -= s * u[idx].conj();
            }
        }
        for i in 0..n {
            let mut s = ZERO;
            for idx in 0..m {
                s += q[[i, k + 1 + idx]] * u[idx];
            }
            s *= beta;
            for idx in 0..m {
                q[[i, k + 1 + idx]] -= s * u[idx].conj();
            }
        }
        // clean the annihilated entries
        h[[k + 1, k]] = -phase * xnorm;
        for i in (k + 2)..n {
            h[[i, k]] = ZERO;
        }
    }
}

/// Implicit single-shift QR on an upper Hessenberg matrix; on success `h` is
/// upper triangular and `q` accumulates the similarity.
fn schur(h: &mut Array2<C64>, q: &mut Array2<C64>) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let max_iter = 60 * n;
    let mut total_iter = 0usize;
    let mut active = n - 1;
    let mut stuck = 0usize;
    loop {
        // deflate negligible subdiagonals
        for i in 0..active {
            let s = h[[i, i]].norm() + h[[i + 1, i + 1]].norm();
            let s = if s == 0.0 { max_abs(h) } else { s };
            if h[[i + 1, i]].norm() <= f64::EPSILON * s {
                h[[i + 1, i]] = ZERO;
            }
        }
        while active > 0 && h[[active, active - 1]] == ZERO {
            active -= 1;
            stuck = 0;
        }
        if active == 0 {
            return Ok(());
        }
        let mut lo = active;
        while lo > 0 && h[[lo, lo - 1]] != ZERO {
            lo -= 1;
        }
        total_iter += 1;
        stuck += 1;
        if total_iter > max_iter {
            return Err(Error::EigFailure(format!(
                "QR iteration exceeded {max_iter} steps"
            )));
        }
        let hi = active;
        // Wilkinson shift from the trailing 2x2; every 10 stalled sweeps an
        // exceptional shift breaks symmetry-induced cycles.
        let mu = if stuck % 10 == 0 {
            h[[hi, hi]] + C64::new(0.75, 0.0) * h[[hi, hi - 1]].norm()
        } else {
            let a11 = h[[hi - 1, hi - 1]];
            let a12 = h[[hi - 1, hi]];
            let a21 = h[[hi, hi - 1]];
            let a22 = h[[hi, hi]];
            let tr2 = 0.5 * (a11 + a22);
            let disc = (tr2 * tr2 - (a11 * a22 - a12 * a21)).sqrt();
            let r1 = tr2 + disc;
            let r2 = tr2 - disc;
            if (r1 - a22).norm() <= (r2 - a22).norm() { r1 } else { r2 }
        };
        let mut x = h[[lo, lo]] - mu;
        let mut z = h[[lo + 1, lo]];
        for k in lo..hi {
            let (c, s) = givens(x, z);
            let cs = C64::new(c, 0.0);
            // rows k, k+1
            let jstart = if k > lo { k - 1 } else { lo };
            for j in jstart..n {
                let hkj = h[[k, j]];
                let hk1j = h[[k + 1, j]];
                h[[k, j]] = cs * hkj + s * hk1j;
                h[[k + 1, j]] = -s.conj() * hkj + cs * hk1j;
            }
            // columns k, k+1
            let iend = (k + 2).min(hi);
            for i in 0..=iend {
                let hik = h[[i, k]];
                let hik1 = h[[i, k + 1]];
                h[[i, k]] = cs * hik + s.conj() * hik1;
                h[[i, k + 1]] = -s * hik + cs * hik1;
            }
            for i in 0..n {
                let qik = q[[i, k]];
                let qik1 = q[[i, k + 1]];
                q[[i, k]] = cs * qik + s.conj() * qik1;
                q[[i, k + 1]] = -s * qik + cs * qik1;
            }
            if k + 1 < hi {
                x = h[[k + 1, k]];
                z = h[[k + 2, k]];
            }
        }
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: Array2<C64>,
    piv: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Array2<C64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("LU expects a square matrix".into()));
        }
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pmax = k;
            let mut vmax = lu[[k, k]].norm();
            for i in (k + 1)..n {
                let v = lu[[i, k]].norm();
                if v > vmax {
                    vmax = v;
                    pmax = i;
                }
            }
            if vmax <= f64::MIN_POSITIVE {
                // keep going with a floored pivot; callers that care check
                // residuals or condition numbers
                lu[[k, k]] = C64::new(f64::EPSILON, 0.0);
            } else if pmax != k {
                for j in 0..n {
                    let tmp = lu[[k, j]];
                    lu[[k, j]] = lu[[pmax, j]];
                    lu[[pmax, j]] = tmp;
                }
                piv.swap(k, pmax);
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let factor = lu[[i, k]] / pivot;
                lu[[i, k]] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in (k + 1)..n {
                    let lkj = lu[[k, j]];
                    lu[[i, j]] -= factor * lkj;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.piv.len();
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let lij = self.lu[[i, j]];
                let xj = x[j];
                x[i] -= lij * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let uij = self.lu[[i, j]];
                let xj = x[j];
                x[i] -= uij * xj;
            }
            x[i] /= self.lu[[i, i]];
        }
        x
    }
}

/// Matrix inverse via LU.
pub fn inverse(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let lu = Lu::new(a)?;
    let mut out = Array2::zeros((n, n));
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|z| *z = ZERO);
        e[j] = ONE;
        let col = lu.solve_vec(&e);
        for i in 0..n {
            out[[i, j]] = col[i];
        }
    }
    Ok(out)
}

/// Matrix exponential by scaling and squaring with a Taylor series on the
/// scaled matrix. Ample for the small, modest-norm generators used here.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = a
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let b = a.mapv(|z| z * scale);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = matmul(&term, &b).mapv(|z| z / k as f64);
        result = &result + &term;
        if max_abs(&term) < 1e-18 * max_abs(&result).max(1.0) {
            break;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

/// Two-norm condition number via the Hermitian spectrum of V^dagger V.
pub fn condition_number(v: &Array2<C64>) -> f64 {
    let g = matmul(&dagger(v), v);
    match eigh(&g) {
        Ok((vals, _)) => {
            let max = vals.last().copied().unwrap_or(0.0).max(0.0);
            let min = vals.first().copied().unwrap_or(0.0);
            let floor = f64::EPSILON.powi(2) * max.max(f64::MIN_POSITIVE);
            (max / min.max(floor)).sqrt()
        }
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_matrix(rng: &mut ChaCha12Rng, n: usize) -> Array2<C64> {
        Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn eigh_diagonalizes_random_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [2usize, 5, 16, 41] {
            let a = random_matrix(&mut rng, n);
            let h = hermitize(&a);
            let (vals, vecs) = eigh(&h).unwrap();
            // A V = V diag(vals)
            let av = matmul(&h, &vecs);
            for (j, &val) in vals.iter().enumerate() {
                for i in 0..n {
                    let want = vecs[[i, j]] * val;
                    assert!((av[[i, j]] - want).norm() < 1e-10, "n={n} i={i} j={j}");
                }
            }
            // orthonormal columns
            let g = matmul(&dagger(&vecs), &vecs);
            assert!(max_abs_diff(&g, &identity(n)) < 1e-11);
            // ascending
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn eig_recovers_triangular_spectrum() {
        let a = array![
            [C64::new(2.0, 1.0), C64::new(0.3, 0.0), C64::new(0.0, 0.1)],
            [ZERO, C64::new(-1.0, 0.5), C64::new(0.2, 0.2)],
            [ZERO, ZERO, C64::new(0.5, -2.0)],
        ];
        let e = eig(&a).unwrap();
        let mut got: Vec<C64> = e.values.clone();
        got.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        let mut want = [C64::new(2.0, 1.0), C64::new(-1.0, 0.5), C64::new(0.5, -2.0)];
        want.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn eig_residuals_small_on_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in [4usize, 16, 32, 64] {
            let a = random_matrix(&mut rng, n);
            let e = eig(&a).unwrap();
            let anorm = frobenius_norm(&a);
            for j in 0..n {
                let mut rmax = 0.0f64;
                for i in 0..n {
                    let mut av = ZERO;
                    for k in 0..n {
                        av += a[[i, k]] * e.vectors[[k, j]];
                    }
                    rmax = rmax.max((av - e.values[j] * e.vectors[[i, j]]).norm());
                }
                assert!(rmax < 1e-9 * anorm.max(1.0), "n={n} j={j} rmax={rmax:e}");
            }
        }
    }

    #[test]
    fn eig_matches_eigh_on_hermitian_input() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let h = hermitize(&random_matrix(&mut rng, 12));
        let (vals_h, _) = eigh(&h).unwrap();
        let mut vals_g: Vec<f64> = eig(&h).unwrap().values.iter().map(|z| z.re).collect();
        vals_g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in vals_h.iter().zip(vals_g.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn eig_handles_defective_matrix() {
        // Jordan block: eigenvalues exact, eigenvectors necessarily parallel.
        let a = array![[ONE, ONE], [ZERO, ONE]];
        let e = eig(&a).unwrap();
        for v in &e.values {
            assert!((v - ONE).norm() < 1e-12);
        }
        assert!(condition_number(&e.vectors) > 1e6);
    }

    #[test]
    fn lu_solves_and_inverts() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 16);
        let inv = inverse(&a).unwrap();
        assert!(max_abs_diff(&matmul(&a, &inv), &identity(16)) < 1e-10);
    }

    #[test]
    fn expm_matches_diagonal_case() {
        let d = array![
            [C64::new(0.0, 1.3), ZERO],
            [ZERO, C64::new(-0.4, 0.0)]
        ];
        let e = expm(&d);
        assert!((e[[0, 0]] - C64::new(0.0, 1.3).exp()).norm() < 1e-14);
        assert!((e[[1, 1]] - C64::new(-0.4, 0.0).exp()).norm() < 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn expm_of_antihermitian_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = hermitize(&random_matrix(&mut rng, 8));
        let u = expm(&h.mapv(|z| -I * z * 3.0));
        let g = matmul(&dagger(&u), &u);
        assert!(max_abs_diff(&g, &identity(8)) < 1e-12);
    }
}
