//! Test-state generators: noisy GHZ mixtures, the states achieving the
//! witness bound with equality, random k-separable mixtures and random
//! density operators.
//!
//! Everything randomized draws from ChaCha8 seeded with a caller-supplied
//! u64; normal variates come from the Box-Muller transform on consecutive
//! uniforms and complex entries fill row-major, real part first. Outputs are
//! therefore bit-reproducible for a fixed seed.

use crate::criteria::GhzDiagonalCoeffs;
use crate::error::{Error, Result};
use crate::hilbert::{DensityOperator, SiteDims, TwoLevelSelection};
use crate::linalg::{Complex64, ComplexMatrix, HermitianMatrix};
use crate::partitions::{tau_of, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One standard normal variate per call (Box-Muller, cosine branch).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re = normal(rng);
    let im = normal(rng);
    Complex64::new(re, im)
}

/// Random unit vector with complex Gaussian components (rotation-invariant).
fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random probability vector: exponential weights, normalized.
fn random_probabilities(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..count)
        .map(|_| {
            let u: f64 = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            -u.ln()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn resolve_selection(sel: Option<&TwoLevelSelection>, dims: &SiteDims) -> TwoLevelSelection {
    sel.cloned().unwrap_or_else(|| TwoLevelSelection::canonical(dims))
}

/// The embedded extreme GHZ projector as a density operator.
pub fn ghz_state(dims: &SiteDims, sel: Option<&TwoLevelSelection>) -> Result<DensityOperator> {
    let n = dims.n();
    let coeffs = GhzDiagonalCoeffs::new(n, 1.0, 0.0, vec![0.0; (1 << (n - 1)) - 1])?;
    ghz_diagonal_state(&coeffs, dims, sel)
}

/// p * (embedded GHZ projector) + (1 - p) * I/d.
pub fn ghz_noisy(dims: &SiteDims, sel: Option<&TwoLevelSelection>, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidGenerator(format!("mixing weight p = {} outside [0, 1]", p)));
    }
    let ghz = ghz_state(dims, sel)?;
    let d = dims.total();
    let mixed = ComplexMatrix::identity(d).scale(Complex64::new((1.0 - p) / d as f64, 0.0));
    let m = ghz.matrix().matrix().scale(Complex64::new(p, 0.0)).add(&mixed)?;
    DensityOperator::new(dims.clone(), HermitianMatrix::new(m)?)
}

/// The state achieving the witness bound with equality at level k for the
/// given partition: lambda0+ = 2^(1-k), lambda_i = 2^(-k) for every i in
/// tau(partition), zero elsewhere. Unit trace, k-PPT for the partition, and
/// witness value exactly 2^(1-k).
pub fn boundary_state(
    k: usize,
    partition: &Partition,
    dims: &SiteDims,
    sel: Option<&TwoLevelSelection>,
) -> Result<DensityOperator> {
    if partition.k() != k {
        return Err(Error::InvalidGenerator(format!(
            "partition {} has {} blocks, expected k = {}",
            partition,
            partition.k(),
            k
        )));
    }
    if partition.n() != dims.n() {
        return Err(Error::InvalidGenerator(format!(
            "partition over {} sites, space has {}",
            partition.n(),
            dims.n()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidGenerator("need k >= 2".into()));
    }
    let n = dims.n();
    let tau = tau_of(partition)?;
    let lambda0_plus = (2.0f64).powi(1 - k as i32);
    let lam = (2.0f64).powi(-(k as i32));
    let lambdas: Vec<f64> = (1..(1usize << (n - 1)))
        .map(|i| if tau.contains(i) { lam } else { 0.0 })
        .collect();
    let coeffs = GhzDiagonalCoeffs::new(n, lambda0_plus, 0.0, lambdas)?;
    let sel = resolve_selection(sel, dims);
    DensityOperator::new(dims.clone(), coeffs.embedded(&sel, dims)?)
}

/// A GHZ-diagonal operator embedded as a density operator; the coefficient
/// trace must be 1.
pub fn ghz_diagonal_state(
    coeffs: &GhzDiagonalCoeffs,
    dims: &SiteDims,
    sel: Option<&TwoLevelSelection>,
) -> Result<DensityOperator> {
    let sel = resolve_selection(sel, dims);
    DensityOperator::new(dims.clone(), coeffs.embedded(&sel, dims)?)
}

/// Random mixture of block-product pure states for a partition: each term
/// is a tensor product over the blocks of random unit vectors on the block
/// subspaces, weighted by a random probability vector. k-separable with
/// respect to the partition by construction.
pub fn random_k_separable(
    partition: &Partition,
    dims: &SiteDims,
    terms: usize,
    seed: u64,
) -> Result<DensityOperator> {
    if terms == 0 {
        return Err(Error::InvalidGenerator("need at least one term".into()));
    }
    if partition.n() != dims.n() {
        return Err(Error::InvalidGenerator(format!(
            "partition over {} sites, space has {}",
            partition.n(),
            dims.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dims.total();
    let weights = random_probabilities(&mut rng, terms);
    let mut m = ComplexMatrix::zeros(d, d);
    for &w in &weights {
        // One random unit vector per block, then assembled back into site
        // order: the amplitude at a flat index is the product over blocks of
        // the block vector's component at that index's block sub-index.
        let block_vecs: Vec<Vec<Complex64>> = partition
            .blocks()
            .iter()
            .map(|block| {
                let bd: usize = block.iter().map(|&s| dims.dims()[s - 1]).product();
                random_unit_vector(&mut rng, bd)
            })
            .collect();
        let mut psi = Vec::with_capacity(d);
        for f in 0..d {
            let multi = dims.multi_index(f)?;
            let mut amp = Complex64::new(1.0, 0.0);
            for (block, vec) in partition.blocks().iter().zip(block_vecs.iter()) {
                let mut sub = 0usize;
                for &s in block {
                    sub = sub * dims.dims()[s - 1] + multi[s - 1];
                }
                amp *= vec[sub];
            }
            psi.push(amp);
        }
        m.accumulate_outer(&psi, &psi, w);
    }
    DensityOperator::new(dims.clone(), HermitianMatrix::new(m)?)
}

/// G G† / Tr(G G†) for G with independent complex Gaussian entries.
pub fn random_density(dims: &SiteDims, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dims.total();
    let g: Vec<Complex64> = (0..d * d).map(|_| complex_normal(&mut rng)).collect();
    let gm = ComplexMatrix::from_entries(d, d, g)?;
    let gram = gm.matmul(&gm.adjoint())?;
    let tr = gram.trace().re;
    let m = gram.scale(Complex64::new(1.0 / tr, 0.0));
    DensityOperator::new(dims.clone(), HermitianMatrix::new(m)?)
}

/// A generator request, as expressed through the CLI.
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    GhzNoisy {
        dims: SiteDims,
        sel: Option<TwoLevelSelection>,
        p: f64,
    },
    Boundary {
        dims: SiteDims,
        sel: Option<TwoLevelSelection>,
        k: usize,
        partition: Partition,
    },
    KSeparable {
        dims: SiteDims,
        partition: Partition,
        terms: usize,
        seed: u64,
    },
    Random {
        dims: SiteDims,
        seed: u64,
    },
    GhzDiagonal {
        dims: SiteDims,
        sel: Option<TwoLevelSelection>,
        coeffs: GhzDiagonalCoeffs,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<DensityOperator> {
        match self {
            GeneratorSpec::GhzNoisy { dims, sel, p } => ghz_noisy(dims, sel.as_ref(), *p),
            GeneratorSpec::Boundary { dims, sel, k, partition } => {
                boundary_state(*k, partition, dims, sel.as_ref())
            }
            GeneratorSpec::KSeparable { dims, partition, terms, seed } => {
                random_k_separable(partition, dims, *terms, *seed)
            }
            GeneratorSpec::Random { dims, seed } => random_density(dims, *seed),
            GeneratorSpec::GhzDiagonal { dims, sel, coeffs } => {
                ghz_diagonal_state(coeffs, dims, sel.as_ref())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{
        extract_coefficients, ghz_fidelity, is_k_ppt, witness_value, AnalyticPptVerdict,
        ANALYTIC_DECISION_TOL, ORACLE_PSD_TOL,
    };
    use crate::ghz::SiteSubset;
    use approx::assert_abs_diff_eq;

    fn qubits(n: usize) -> SiteDims {
        SiteDims::qubits(n).unwrap()
    }

    #[test]
    fn ghz_noisy_extremes() {
        let dims = qubits(2);
        let pure = ghz_noisy(&dims, None, 1.0).unwrap();
        let sel = TwoLevelSelection::canonical(&dims);
        assert_abs_diff_eq!(ghz_fidelity(&pure, &sel).unwrap(), 1.0, epsilon = 1e-14);

        let mixed = ghz_noisy(&dims, None, 0.0).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(mixed.matrix().get(r, c).re, want, epsilon = 1e-15);
            }
        }

        assert!(ghz_noisy(&dims, None, 1.5).is_err());
    }

    #[test]
    fn ghz_noisy_fidelity_formula() {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);
        for p in [0.1, 0.33, 0.7] {
            let w = ghz_noisy(&dims, None, p).unwrap();
            assert_abs_diff_eq!(
                ghz_fidelity(&w, &sel).unwrap(),
                (1.0 + 3.0 * p) / 4.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn boundary_state_examples() {
        // n = 2, k = 2: 1/2 GHZ+ + 1/4 (pair of the other two basis states).
        let dims = qubits(2);
        let p = Partition::parse("1|2", 2).unwrap();
        let w = boundary_state(2, &p, &dims, None).unwrap();
        let sel = TwoLevelSelection::canonical(&dims);
        let c = extract_coefficients(&w, &sel).unwrap();
        assert_abs_diff_eq!(c.lambda0_plus(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda0_minus(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda(1), 0.25, epsilon = 1e-14);

        // n = 3, k = 3.
        let dims3 = qubits(3);
        let p3 = Partition::parse("1|2|3", 3).unwrap();
        let w3 = boundary_state(3, &p3, &dims3, None).unwrap();
        let sel3 = TwoLevelSelection::canonical(&dims3);
        let c3 = extract_coefficients(&w3, &sel3).unwrap();
        assert_abs_diff_eq!(c3.lambda0_plus(), 0.25, epsilon = 1e-14);
        for j in 1..=3 {
            assert_abs_diff_eq!(c3.lambda(j), 0.125, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(c3.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn boundary_state_hits_the_bound_and_stays_k_ppt() {
        for (n, k, ptxt) in [(2, 2, "1|2"), (3, 2, "1|2,3"), (3, 3, "1|2|3"), (4, 3, "1,4|2|3")] {
            let dims = qubits(n);
            let sel = TwoLevelSelection::canonical(&dims);
            let p = Partition::parse(ptxt, n).unwrap();
            let w = boundary_state(k, &p, &dims, None).unwrap();

            let r = witness_value(&w, k, &sel).unwrap();
            assert_abs_diff_eq!(r.value, r.bound, epsilon = 1e-10);
            assert!(!r.violated, "boundary state must not be reported violated");

            assert!(is_k_ppt(&w, &p, ORACLE_PSD_TOL).unwrap().all_ppt);

            // The analytic criterion sits exactly on the edge for tau subsets.
            let c = extract_coefficients(&w, &sel).unwrap();
            for alpha in crate::partitions::necessary_subsets(&p) {
                assert_eq!(
                    c.ppt_verdict(&alpha, ANALYTIC_DECISION_TOL).unwrap(),
                    AnalyticPptVerdict::Boundary
                );
            }
        }
    }

    #[test]
    fn boundary_state_parameter_validation() {
        let dims = qubits(3);
        let p = Partition::parse("1|2,3", 3).unwrap();
        assert!(boundary_state(3, &p, &dims, None).is_err()); // k != blocks
        let p2 = Partition::parse("1|2", 2).unwrap();
        assert!(boundary_state(2, &p2, &dims, None).is_err()); // wrong n
    }

    #[test]
    fn k_separable_single_product_term() {
        let dims = qubits(3);
        let p = Partition::parse("1|2|3", 3).unwrap();
        let w = random_k_separable(&p, &dims, 1, 11).unwrap();
        // A single product term is pure: Tr[W^2] = 1.
        let sq = w.matrix().matrix().matmul(w.matrix().matrix()).unwrap();
        assert_abs_diff_eq!(sq.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn k_separable_is_k_ppt_at_its_partition() {
        let dims = SiteDims::new(vec![2, 3, 2]).unwrap();
        for (seed, ptxt) in [(1u64, "1|2,3"), (2, "1,3|2"), (3, "1|2|3")] {
            let p = Partition::parse(ptxt, 3).unwrap();
            let w = random_k_separable(&p, &dims, 4, seed).unwrap();
            assert_abs_diff_eq!(w.matrix().trace(), 1.0, epsilon = 1e-12);
            assert!(is_k_ppt(&w, &p, ORACLE_PSD_TOL).unwrap().all_ppt);
        }
    }

    #[test]
    fn k_separable_respects_non_contiguous_blocks() {
        // Block {1,3} with site 2 separate: transposing site 2 must keep the
        // state positive, while the pure GHZ on sites 1,3 inside would not.
        let dims = qubits(3);
        let p = Partition::parse("1,3|2", 3).unwrap();
        let w = random_k_separable(&p, &dims, 3, 99).unwrap();
        let beta = SiteSubset::new(vec![2], 3).unwrap();
        let t = w.partial_transpose(&beta).unwrap();
        assert!(t.min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn random_density_properties() {
        let dims = qubits(2);
        let w = random_density(&dims, 5).unwrap();
        assert_abs_diff_eq!(w.matrix().trace(), 1.0, epsilon = 1e-12);
        assert!(w.matrix().min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn random_density_is_bit_reproducible() {
        let dims = qubits(2);
        let a = random_density(&dims, 42).unwrap();
        let b = random_density(&dims, 42).unwrap();
        for (x, y) in a
            .matrix()
            .matrix()
            .entries()
            .iter()
            .zip(b.matrix().matrix().entries().iter())
        {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let c = random_density(&dims, 43).unwrap();
        assert_ne!(
            a.matrix().get(0, 0).re.to_bits(),
            c.matrix().get(0, 0).re.to_bits()
        );
    }

    #[test]
    fn generator_spec_builds() {
        let dims = qubits(2);
        let spec = GeneratorSpec::GhzNoisy { dims: dims.clone(), sel: None, p: 0.4 };
        let w = spec.build().unwrap();
        assert_abs_diff_eq!(w.matrix().trace(), 1.0, epsilon = 1e-12);

        let spec = GeneratorSpec::Random { dims, seed: 3 };
        assert!(spec.build().is_ok());
    }
}
