//! Product-space index arithmetic, two-level selections, embedding of
//! 2^n-dimensional operators into the full space, and partial transposition.
//!
//! Sites are numbered 1..n at the interface and 0-based internally. Flat
//! indices use mixed radix with site 1 as the most significant digit.

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, HermitianMatrix};

/// Largest total product dimension accepted at construction. Everything
/// downstream runs O(d^3) eigensolves, so this is a hard sanity cap.
pub const MAX_TOTAL_DIM: usize = 1024;

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-9;

/// Slack on the smallest eigenvalue when validating a density operator.
pub const DENSITY_PSD_TOL: f64 = 1e-8;

/// Per-site local dimensions of the product Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteDims {
    dims: Vec<usize>,
}

impl SiteDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidDims(format!(
                "need at least 2 sites, got {}",
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("site dimension {} < 2", d)));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .ok_or(Error::DimensionCap { total: usize::MAX, cap: MAX_TOTAL_DIM })?;
            if total > MAX_TOTAL_DIM {
                return Err(Error::DimensionCap { total, cap: MAX_TOTAL_DIM });
            }
        }
        Ok(Self { dims })
    }

    /// All-qubit space on `n` sites.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Mixed-radix strides; site 1 (index 0 here) is most significant.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for i in (0..n - 1).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Flat index of a per-site multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "multi-index of length {} for {} sites",
                multi.len(),
                self.n()
            )));
        }
        let mut flat = 0usize;
        for (j, (&x, &d)) in multi.iter().zip(self.dims.iter()).enumerate() {
            if x >= d {
                return Err(Error::InvalidDims(format!(
                    "component {} at site {} out of range (dim {})",
                    x,
                    j + 1,
                    d
                )));
            }
            flat = flat * d + x;
        }
        Ok(flat)
    }

    /// Per-site components of a flat index.
    pub fn multi_index(&self, flat: usize) -> Result<Vec<usize>> {
        if flat >= self.total() {
            return Err(Error::InvalidDims(format!(
                "flat index {} out of range (total {})",
                flat,
                self.total()
            )));
        }
        let mut rest = flat;
        let mut out = vec![0usize; self.n()];
        for j in (0..self.n()).rev() {
            out[j] = rest % self.dims[j];
            rest /= self.dims[j];
        }
        Ok(out)
    }
}

/// Ordered pair (a_j, b_j) of local basis indices per site, selecting the
/// embedded 2^n-dimensional subspace. The pair is ordered: a_j plays the
/// role of |0> and b_j the role of |1>, and swapping them at a single site
/// changes the witness.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwoLevelSelection {
    pairs: Vec<(usize, usize)>,
}

impl TwoLevelSelection {
    pub fn new(pairs: Vec<(usize, usize)>, dims: &SiteDims) -> Result<Self> {
        if pairs.len() != dims.n() {
            return Err(Error::InvalidSelection(format!(
                "{} pairs for {} sites",
                pairs.len(),
                dims.n()
            )));
        }
        for (j, (&(a, b), &d)) in pairs.iter().zip(dims.dims().iter()).enumerate() {
            if a >= d || b >= d {
                return Err(Error::InvalidSelection(format!(
                    "site {}: indices ({}, {}) out of range (dim {})",
                    j + 1,
                    a,
                    b,
                    d
                )));
            }
            if a == b {
                return Err(Error::InvalidSelection(format!(
                    "site {}: the two levels must differ",
                    j + 1
                )));
            }
        }
        Ok(Self { pairs })
    }

    /// The selection (0, 1) at every site.
    pub fn canonical(dims: &SiteDims) -> Self {
        Self { pairs: vec![(0, 1); dims.n()] }
    }

    /// For pairs already known valid for their space, e.g. enumeration output.
    pub(crate) fn from_pairs_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Check compatibility with a space the selection was not built against.
    pub fn validate_for(&self, dims: &SiteDims) -> Result<()> {
        if self.n() != dims.n() {
            return Err(Error::InvalidSelection(format!(
                "selection over {} sites, space has {}",
                self.n(),
                dims.n()
            )));
        }
        for (j, (&(a, b), &d)) in self.pairs.iter().zip(dims.dims().iter()).enumerate() {
            if a >= d || b >= d {
                return Err(Error::InvalidSelection(format!(
                    "site {}: pair ({}, {}) out of range (dim {})",
                    j + 1,
                    a,
                    b,
                    d
                )));
            }
        }
        Ok(())
    }

    /// Swap a_j and b_j at every site; the witness is invariant under this.
    pub fn global_swap(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// Flat index of the product basis vector selected by an n-bit string;
    /// bit for site 1 is the most significant. Bit 0 selects a_j, bit 1
    /// selects b_j.
    pub fn embedded_index(&self, bits: usize, dims: &SiteDims) -> usize {
        let n = self.n();
        let mut flat = 0usize;
        for (j, (&(a, b), &d)) in self.pairs.iter().zip(dims.dims().iter()).enumerate() {
            let bit = (bits >> (n - 1 - j)) & 1;
            flat = flat * d + if bit == 0 { a } else { b };
        }
        flat
    }

    /// The flat indices of all 2^n embedded basis vectors, in bit-string order.
    pub fn embedded_indices(&self, dims: &SiteDims) -> Vec<usize> {
        (0..(1usize << self.n()))
            .map(|bits| self.embedded_index(bits, dims))
            .collect()
    }

    /// Parse "a1,b1;a2,b2;...".
    pub fn parse(s: &str, dims: &SiteDims) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(';') {
            let mut it = part.split(',');
            let a = it
                .next()
                .and_then(|t| t.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidSelection(format!("bad pair '{}'", part)))?;
            let b = it
                .next()
                .and_then(|t| t.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidSelection(format!("bad pair '{}'", part)))?;
            if it.next().is_some() {
                return Err(Error::InvalidSelection(format!("bad pair '{}'", part)));
            }
            pairs.push((a, b));
        }
        Self::new(pairs, dims)
    }
}

impl std::fmt::Display for TwoLevelSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{},{}", a, b)).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Unit-trace positive semidefinite Hermitian operator over a product space.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dims: SiteDims,
    matrix: HermitianMatrix,
}

impl DensityOperator {
    /// Full validation: dimension, unit trace and positive semidefiniteness
    /// (smallest eigenvalue at least -[`DENSITY_PSD_TOL`]).
    pub fn new(dims: SiteDims, matrix: HermitianMatrix) -> Result<Self> {
        let op = Self::new_unchecked(dims, matrix)?;
        let tr = op.matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {} deviates from 1 by more than {:.1e}",
                tr, TRACE_TOL
            )));
        }
        let min_eig = op.matrix.min_eigenvalue()?;
        if min_eig < -DENSITY_PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "smallest eigenvalue {:.3e} below -{:.1e}",
                min_eig, DENSITY_PSD_TOL
            )));
        }
        Ok(op)
    }

    /// Checks only that the matrix fits the declared site dimensions. For
    /// data already known to satisfy the density invariants.
    pub fn new_unchecked(dims: SiteDims, matrix: HermitianMatrix) -> Result<Self> {
        if matrix.dim() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dim {} vs product dim {}",
                matrix.dim(),
                dims.total()
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn partial_transpose(&self, beta: &crate::ghz::SiteSubset) -> Result<HermitianMatrix> {
        partial_transpose(&self.matrix, &self.dims, beta)
    }
}

/// The product basis vector with site j in local state a_j when bit_j = 0
/// and b_j when bit_j = 1; exactly one amplitude is 1.
pub fn embed_basis_vector(
    bits: usize,
    sel: &TwoLevelSelection,
    dims: &SiteDims,
) -> Result<Vec<Complex64>> {
    sel.validate_for(dims)?;
    if bits >= (1usize << dims.n()) {
        return Err(Error::InvalidSelection(format!(
            "bit string {:#b} has more than {} bits",
            bits,
            dims.n()
        )));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); dims.total()];
    v[sel.embedded_index(bits, dims)] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// V M V† for the isometry V whose columns are the embedded basis vectors:
/// places a 2^n x 2^n operator on the selected subspace, zero elsewhere.
pub fn embed_operator(
    m: &HermitianMatrix,
    sel: &TwoLevelSelection,
    dims: &SiteDims,
) -> Result<HermitianMatrix> {
    sel.validate_for(dims)?;
    let n = dims.n();
    let sub = 1usize << n;
    if m.dim() != sub {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} does not match 2^{} = {}",
            m.dim(),
            n,
            sub
        )));
    }
    let idx = sel.embedded_indices(dims);
    let mut out = ComplexMatrix::zeros(dims.total(), dims.total());
    for r in 0..sub {
        for c in 0..sub {
            let z = m.get(r, c);
            if z != Complex64::new(0.0, 0.0) {
                out.set(idx[r], idx[c], z);
            }
        }
    }
    HermitianMatrix::new(out)
}

/// Partial transpose over the sites in `beta`: the entry at (row, col)
/// multi-indices has the components for sites in beta swapped between row
/// and column. A pure index permutation, so trace- and
/// Hermiticity-preserving and an involution.
pub fn partial_transpose(
    h: &HermitianMatrix,
    dims: &SiteDims,
    beta: &crate::ghz::SiteSubset,
) -> Result<HermitianMatrix> {
    if h.dim() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "matrix dim {} vs product dim {}",
            h.dim(),
            dims.total()
        )));
    }
    if beta.n() != dims.n() {
        return Err(Error::InvalidSubset(format!(
            "subset over {} sites, space has {}",
            beta.n(),
            dims.n()
        )));
    }
    let d = dims.total();
    let strides = dims.strides();
    // Split each flat index into its beta part and the rest, so that the
    // transposed position is rest(r) + beta(c) etc.
    let mut beta_part = Vec::with_capacity(d);
    for f in 0..d {
        let multi = dims.multi_index(f)?;
        let mut b = 0usize;
        for site in beta.sites() {
            b += multi[site - 1] * strides[site - 1];
        }
        beta_part.push(b);
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let r_rest = r - beta_part[r];
        for c in 0..d {
            let c_rest = c - beta_part[c];
            out.set(r_rest + beta_part[c], c_rest + beta_part[r], h.get(r, c));
        }
    }
    HermitianMatrix::new(out)
}
