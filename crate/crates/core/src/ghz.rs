//! The orthonormal GHZ basis of the 2^n-dimensional subspace and the
//! combinatorial maps l, j and g from site subsets to basis labels.
//!
//! A basis vector is (|j>|0> ± |2^(n-1)-j-1>|1>)/sqrt(2), where |j> is the
//! (n-1)-bit binary ket on sites 1..n-1 (site 1 most significant) and the
//! last tensor factor is site n.

use crate::error::{Error, Result};
use crate::linalg::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Label (j, ±) of a GHZ basis vector on n sites, 0 <= j <= 2^(n-1) - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GhzLabel {
    n: usize,
    j: usize,
    sign: Sign,
}

impl GhzLabel {
    pub fn new(n: usize, j: usize, sign: Sign) -> Result<Self> {
        if !(2..=32).contains(&n) {
            return Err(Error::InvalidDims(format!("GHZ label needs 2 <= n <= 32, got {}", n)));
        }
        if j >= (1usize << (n - 1)) {
            return Err(Error::InvalidDims(format!(
                "GHZ index {} out of range for n = {}",
                j, n
            )));
        }
        Ok(Self { n, j, sign })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The two n-bit strings supporting this vector: j appended with 0, and
    /// its (n-1)-bit complement appended with 1.
    pub fn support_bits(&self) -> (usize, usize) {
        let half = 1usize << (self.n - 1);
        (self.j << 1, ((half - 1 - self.j) << 1) | 1)
    }
}

/// The GHZ basis vector as a dense unit vector in C^(2^n).
pub fn ghz_vector(label: &GhzLabel) -> Vec<Complex64> {
    let dim = 1usize << label.n();
    let (u, v) = label.support_bits();
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    out[u] = Complex64::new(amp, 0.0);
    out[v] = Complex64::new(label.sign().factor() * amp, 0.0);
    out
}

/// Subset of the sites {1..n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteSubset {
    n: usize,
    sites: Vec<usize>,
}

impl SiteSubset {
    pub fn new(mut sites: Vec<usize>, n: usize) -> Result<Self> {
        sites.sort_unstable();
        for w in sites.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSubset(format!("duplicate site {}", w[0])));
            }
        }
        if let Some(&s) = sites.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::InvalidSubset(format!("site {} out of range 1..{}", s, n)));
        }
        Ok(Self { n, sites })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.sites.len() == self.n
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn complement(&self) -> Self {
        let sites = (1..=self.n).filter(|s| !self.contains(*s)).collect();
        Self { n: self.n, sites }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidSubset(format!(
                "union over different site counts {} and {}",
                self.n, other.n
            )));
        }
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        sites.sort_unstable();
        sites.dedup();
        Ok(Self { n: self.n, sites })
    }
}

impl std::fmt::Display for SiteSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// l(beta): the integer with binary digits l_1 .. l_n (l_1 most
/// significant), l_m = 1 exactly for m in beta.
pub fn l_of(beta: &SiteSubset) -> usize {
    let n = beta.n();
    beta.sites().iter().map(|&m| 1usize << (n - m)).sum()
}

/// j(beta): the integer binary-represented by l_1 .. l_(n-1).
pub fn j_of(beta: &SiteSubset) -> usize {
    l_of(beta) >> 1
}

/// g(beta) = j(beta) when l(beta) is even, 2^(n-1) - j(beta) - 1 when odd.
/// Two-to-one: complementary subsets collide, and only the empty and full
/// subsets map to 0.
pub fn g_of(beta: &SiteSubset) -> usize {
    let l = l_of(beta);
    let j = l >> 1;
    if l.is_multiple_of(2) {
        j
    } else {
        (1usize << (beta.n() - 1)) - j - 1
    }
}
