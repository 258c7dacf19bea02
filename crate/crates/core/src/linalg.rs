//! Dense complex-matrix kernel: Kronecker products, Hermitian eigenvalues,
//! traces and positivity tests.
//!
//! Matrices are stored row-major. Everything here is sized for desk-scale
//! problems (dimension up to a few hundred); the eigensolver is a classical
//! cyclic Jacobi on the real-symmetric embedding of the Hermitian input, so
//! no external linear-algebra backend is required.

use crate::error::{Error, Result};
use num_complex::Complex;

pub type Complex64 = Complex<f64>;

/// Max-norm tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Default slack on the smallest eigenvalue when testing positive
/// semidefiniteness, so that states sitting exactly on the PPT boundary are
/// not misreported by floating-point noise.
pub const PSD_TOL: f64 = 1e-9;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_entries(nrows: usize, ncols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != nrows * ncols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                nrows,
                ncols
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { nrows, ncols, entries })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.entries[i * n + i] = v;
        }
        m
    }

    /// Real diagonal matrix, a common case in tests and witnesses.
    pub fn diagonal_real(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries[row * self.ncols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries[row * self.ncols + col] = value;
    }

    #[inline]
    pub fn add_to(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries[row * self.ncols + col] += value;
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.nrows).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.ncols {
                    out.entries[i * other.ncols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Largest deviation from Hermiticity, max_{ij} |M_ij - conj(M_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.nrows {
            for j in i..self.ncols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// |v><w| scaled by `weight`, accumulated onto `self`, visiting only the
    /// nonzero amplitudes of the two vectors.
    pub fn accumulate_outer(&mut self, v: &[Complex64], w: &[Complex64], weight: f64) {
        debug_assert_eq!(v.len(), self.nrows);
        debug_assert_eq!(w.len(), self.ncols);
        let vs: Vec<(usize, Complex64)> = v
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (i, *a))
            .collect();
        let ws: Vec<(usize, Complex64)> = w
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (i, *a))
            .collect();
        for &(i, a) in &vs {
            for &(j, b) in &ws {
                self.add_to(i, j, a * b.conj() * weight);
            }
        }
    }
}

/// Kronecker product; the first factor supplies the slow (most significant)
/// index: `(a ⊗ b)[i1*rb + i2, j1*cb + j2] = a[i1,j1] * b[i2,j2]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i1 in 0..ra {
        for j1 in 0..ca {
            let f = a.get(i1, j1);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out.set(i1 * rb + i2, j1 * cb + j2, f * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Square complex matrix certified Hermitian within [`HERMITICITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(Self { dim: matrix.nrows(), matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    ///
    /// The Hermitian matrix H = A + iB is embedded as the real symmetric
    /// matrix [[A, -B], [B, A]], whose 2·dim spectrum is that of H with every
    /// eigenvalue doubled; a cyclic Jacobi pass diagonalizes the embedding
    /// and adjacent pairs of the sorted result are then merged.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        if n == 0 {
            return Ok(Vec::new());
        }
        // Symmetrize first: A must be symmetric and B antisymmetric for the
        // embedding to be exactly symmetric. Within HERMITICITY_TOL this
        // perturbs the spectrum by no more than the same amount.
        let m = 2 * n;
        let mut s = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                s[i * m + j] = z.re;
                s[(i + n) * m + (j + n)] = z.re;
                s[i * m + (j + n)] = -z.im;
                s[(i + n) * m + j] = z.im;
            }
        }
        let doubled = jacobi_eigenvalues(s, m)?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(0.5 * (doubled[2 * i] + doubled[2 * i + 1]));
        }
        Ok(out)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eigs = self.eigenvalues()?;
        eigs.first().copied().ok_or_else(|| {
            Error::DimensionMismatch("min eigenvalue of an empty matrix".into())
        })
    }

    /// True iff the smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }
}

/// Eigenvalues of a real symmetric matrix (row-major, length n*n) by cyclic
/// Jacobi rotations, ascending order.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    let fro: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = 1e-14 * fro;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= target {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(eigs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    1.0 / (2.0 * theta)
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- G^T A G with G the rotation in the (p, q) plane.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::EigenNoConvergence(MAX_JACOBI_SWEEPS))
}

/// Tr[w · o] for Hermitian operands of equal dimension. The trace of a
/// product of Hermitian matrices is real; the residual imaginary part must
/// stay below 1e-10 and is discarded.
pub fn expectation(w: &HermitianMatrix, o: &HermitianMatrix) -> Result<f64> {
    if w.dim() != o.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expectation: {} vs {}",
            w.dim(),
            o.dim()
        )));
    }
    let n = w.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += w.get(i, j) * o.get(j, i);
        }
    }
    assert!(
        tr.im.abs() <= 1e-10,
        "trace of Hermitian product has imaginary part {:e}",
        tr.im
    );
    Ok(tr.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm(entries: Vec<Complex64>, n: usize) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_entries(n, n, entries).unwrap()).unwrap()
    }

    /// 4x4 determinant by cofactor expansion; used as an independent check
    /// on the eigensolver (computed eigenvalues must be roots of the
    /// characteristic polynomial).
    fn det4(a: &[[f64; 4]; 4]) -> f64 {
        let mut det = 0.0;
        for col in 0..4 {
            let mut minor = [[0.0; 3]; 3];
            for (mi, row) in (1..4).enumerate() {
                let mut mj = 0;
                for c2 in 0..4 {
                    if c2 == col {
                        continue;
                    }
                    minor[mi][mj] = a[row][c2];
                    mj += 1;
                }
            }
            let m = minor;
            let det3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * a[0][col] * det3;
        }
        det
    }

    fn char_poly_at(a: &[[f64; 4]; 4], lambda: f64) -> f64 {
        let mut shifted = *a;
        for i in 0..4 {
            shifted[i][i] -= lambda;
        }
        det4(&shifted)
    }

    /// Root finding for the characteristic polynomial: grid scan for sign
    /// changes followed by bisection.
    fn char_poly_roots(a: &[[f64; 4]; 4]) -> Vec<f64> {
        let bound: f64 = 2.0;
        let steps = 4000;
        let mut roots = Vec::new();
        let mut prev_x = -bound;
        let mut prev_v = char_poly_at(a, prev_x);
        for i in 1..=steps {
            let x = -bound + 2.0 * bound * (i as f64) / (steps as f64);
            let v = char_poly_at(a, x);
            if prev_v == 0.0 {
                roots.push(prev_x);
            } else if prev_v * v < 0.0 {
                let (mut lo, mut hi) = (prev_x, x);
                let (mut flo, _) = (prev_v, v);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = char_poly_at(a, mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_v = v;
        }
        roots
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let p0 = ComplexMatrix::diagonal_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diagonal_real(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1), ComplexMatrix::diagonal_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_associativity_on_fixed_random_matrices() {
        // Entries from a fixed arbitrary pattern; associativity must hold
        // elementwise.
        let mk = |seed: u64| {
            let mut v = Vec::new();
            let mut x = seed;
            for _ in 0..4 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                v.push(c(re, im));
            }
            ComplexMatrix::from_entries(2, 2, v).unwrap()
        };
        for seed in 1..=5u64 {
            let (a, b, cc) = (mk(seed), mk(seed + 100), mk(seed + 200));
            let left = kron(&kron(&a, &b), &cc);
            let right = kron(&a, &kron(&b, &cc));
            for (x, y) in left.entries().iter().zip(right.entries().iter()) {
                assert!((x - y).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues_diagonal_and_pauli_x() {
        let d = herm(
            ComplexMatrix::diagonal_real(&[3.0, 1.0, 2.0]).entries().to_vec(),
            3,
        );
        let eigs = d.eigenvalues().unwrap();
        assert_abs_diff_eq!(eigs[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[2], 3.0, epsilon = 1e-12);

        let x = herm(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 2);
        let eigs = x.eigenvalues().unwrap();
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_of_transposed_bell_projector_match_char_poly_oracle() {
        // Partially transposed projector onto (|00> + |11>)/sqrt(2):
        // diag(1/2, 0, 0, 1/2) plus 1/2 on the (01, 10) off-diagonal pair.
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 0, c(0.5, 0.0));
        m.set(3, 3, c(0.5, 0.0));
        m.set(1, 2, c(0.5, 0.0));
        m.set(2, 1, c(0.5, 0.0));
        let h = HermitianMatrix::new(m).unwrap();

        // Independent oracle: roots of det(A - λI) located by bisection.
        let a = [
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.5],
        ];
        let roots = char_poly_roots(&a);
        assert!(roots.iter().any(|r| (r + 0.5).abs() < 1e-9));
        assert!(roots.iter().any(|r| (r - 0.5).abs() < 1e-9));

        let eigs = h.eigenvalues().unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (got, want) in eigs.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
        // Every computed eigenvalue is a root of the characteristic polynomial.
        for &e in &eigs {
            assert!(char_poly_at(&a, e).abs() < 1e-9);
        }
        assert!(!h.is_psd(PSD_TOL).unwrap());
        assert_abs_diff_eq!(h.min_eigenvalue().unwrap(), -0.5, epsilon = 1e-10);
    }

    #[test]
    fn psd_tolerance_semantics() {
        let id = herm(ComplexMatrix::identity(3).entries().to_vec(), 3);
        assert!(id.is_psd(1e-9).unwrap());

        let nearly = herm(
            ComplexMatrix::diagonal_real(&[1.0, -1e-12]).entries().to_vec(),
            2,
        );
        assert!(nearly.is_psd(1e-9).unwrap());

        let not = herm(
            ComplexMatrix::diagonal_real(&[1.0, -1e-3]).entries().to_vec(),
            2,
        );
        assert!(!not.is_psd(1e-9).unwrap());
    }

    #[test]
    fn expectation_examples() {
        let id4 = herm(ComplexMatrix::identity(4).entries().to_vec(), 4);
        let quarter = herm(
            ComplexMatrix::identity(4).scale(c(0.25, 0.0)).entries().to_vec(),
            4,
        );
        assert_abs_diff_eq!(expectation(&quarter, &id4).unwrap(), 1.0, epsilon = 1e-14);

        // Projector idempotence: Tr[P P] = Tr[P].
        let p = herm(
            ComplexMatrix::diagonal_real(&[1.0, 1.0, 0.0, 0.0]).entries().to_vec(),
            4,
        );
        assert_abs_diff_eq!(expectation(&p, &p).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let a = herm(ComplexMatrix::identity(2).entries().to_vec(), 2);
        let b = herm(ComplexMatrix::identity(3).entries().to_vec(), 3);
        assert!(matches!(expectation(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_entries(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let m = ComplexMatrix::from_entries(1, 1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(m, Err(Error::NonFiniteEntry)));
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let h = herm(
            vec![
                c(2.0, 0.0),
                c(0.5, 0.25),
                c(-1.0, 0.5),
                c(0.5, -0.25),
                c(-1.0, 0.0),
                c(0.0, 1.5),
                c(-1.0, -0.5),
                c(0.0, -1.5),
                c(3.5, 0.0),
            ],
            3,
        );
        let eigs = h.eigenvalues().unwrap();
        let sum: f64 = eigs.iter().sum();
        assert_abs_diff_eq!(sum, h.trace(), epsilon = 1e-9);
    }
}
