//! The classification core: GHZ-diagonal coefficient extraction, the
//! analytic partial-transpose criterion for that family, the brute-force
//! k-PPT eigenvalue oracle, the witness operator, and the witness-value
//! search over two-level selections.
//!
//! The decision chain: a state that is k-separable with respect to some
//! k-partite split is k-PPT with respect to it, and every k-PPT state keeps
//! the witness expectation at or below 2^(1-k) for every two-level
//! selection. A single selection pushing the value above the bound therefore
//! excludes k'-PPT and k'-separability for all k' >= k.

use crate::error::{Error, Result};
use crate::ghz::{g_of, GhzLabel, Sign, SiteSubset};
use crate::hilbert::{embed_operator, DensityOperator, SiteDims, TwoLevelSelection};
use crate::linalg::{expectation, Complex64, ComplexMatrix, HermitianMatrix};
use crate::partitions::{enumerate_partitions, necessary_subsets, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Margin added to the bound before reporting a violation. The exclusion
/// requires a strict inequality, so states sitting exactly on the bound are
/// never reported violated.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Default eigenvalue slack for the brute-force k-PPT oracle.
pub const ORACLE_PSD_TOL: f64 = 1e-8;

/// Default slack on the analytic criterion delta <= 2*lambda_g. The crossing
/// eigenvalue of the partially transposed family is lambda_g - delta/2, so
/// matching an eigenvalue oracle with slack t requires slack 2t here.
pub const ANALYTIC_DECISION_TOL: f64 = 2.0 * ORACLE_PSD_TOL;

/// Hard cap on exhaustive selection searches.
pub const EXHAUSTIVE_CAP: usize = 1_000_000;

/// Above this many selections the automatic strategy switches to sampling.
pub const AUTO_EXHAUSTIVE_LIMIT: usize = 100_000;

/// Sample count used by the automatic strategy when exhaustion is infeasible.
pub const AUTO_RANDOM_SAMPLES: usize = 10_000;

const COEFF_NEG_TOL: f64 = 1e-7;
const SUBNORM_TOL: f64 = 1e-9;

/// GHZ-diagonal coefficients (lambda0+, lambda0-, lambda_1 ..
/// lambda_{2^(n-1)-1}) of a positive operator on the embedded subspace.
/// Subnormalized: lambda0+ + lambda0- + 2*sum(lambda_j) <= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzDiagonalCoeffs {
    n: usize,
    lambda0_plus: f64,
    lambda0_minus: f64,
    lambdas: Vec<f64>,
}

impl GhzDiagonalCoeffs {
    pub fn new(n: usize, lambda0_plus: f64, lambda0_minus: f64, lambdas: Vec<f64>) -> Result<Self> {
        if !(2..=10).contains(&n) {
            return Err(Error::InvalidCoefficients(format!(
                "need 2 <= n <= 10, got {}",
                n
            )));
        }
        let expected = (1usize << (n - 1)) - 1;
        if lambdas.len() != expected {
            return Err(Error::InvalidCoefficients(format!(
                "{} lambdas for n = {}, expected {}",
                lambdas.len(),
                n,
                expected
            )));
        }
        let clamp = |x: f64, what: &str| -> Result<f64> {
            if !x.is_finite() || x < -COEFF_NEG_TOL {
                return Err(Error::InvalidCoefficients(format!("{} = {} is negative", what, x)));
            }
            Ok(x.max(0.0))
        };
        let lambda0_plus = clamp(lambda0_plus, "lambda0+")?;
        let lambda0_minus = clamp(lambda0_minus, "lambda0-")?;
        let lambdas = lambdas
            .into_iter()
            .enumerate()
            .map(|(i, x)| clamp(x, &format!("lambda_{}", i + 1)))
            .collect::<Result<Vec<f64>>>()?;
        let trace = lambda0_plus + lambda0_minus + 2.0 * lambdas.iter().sum::<f64>();
        if trace > 1.0 + SUBNORM_TOL {
            return Err(Error::InvalidCoefficients(format!(
                "subnormalization violated: coefficient trace {} > 1",
                trace
            )));
        }
        Ok(Self { n, lambda0_plus, lambda0_minus, lambdas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda0_plus(&self) -> f64 {
        self.lambda0_plus
    }

    pub fn lambda0_minus(&self) -> f64 {
        self.lambda0_minus
    }

    /// lambda_j for 1 <= j <= 2^(n-1) - 1.
    pub fn lambda(&self, j: usize) -> f64 {
        self.lambdas[j - 1]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// The coherence gap lambda0+ - lambda0-.
    pub fn delta(&self) -> f64 {
        self.lambda0_plus - self.lambda0_minus
    }

    /// Total weight lambda0+ + lambda0- + 2*sum(lambda_j).
    pub fn trace(&self) -> f64 {
        self.lambda0_plus + self.lambda0_minus + 2.0 * self.lambdas.iter().sum::<f64>()
    }

    /// The GHZ-diagonal operator on the 2^n space these coefficients
    /// describe: sum of the labelled GHZ projectors with their weights.
    ///
    /// Each projector is supported on two basis vectors with entries
    /// +-weight/2, written directly so the entries are exact; a projector
    /// pair (+, -) cancels its cross terms and contributes plain diagonal
    /// weight.
    pub fn to_matrix(&self) -> HermitianMatrix {
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (sign, w) in [(Sign::Plus, self.lambda0_plus), (Sign::Minus, self.lambda0_minus)] {
            let (u, v) = GhzLabel::new(self.n, 0, sign).expect("valid label").support_bits();
            let half = Complex64::new(0.5 * w, 0.0);
            m.add_to(u, u, half);
            m.add_to(v, v, half);
            m.add_to(u, v, half * sign.factor());
            m.add_to(v, u, half * sign.factor());
        }
        for (i, &w) in self.lambdas.iter().enumerate() {
            let (u, v) = GhzLabel::new(self.n, i + 1, Sign::Plus)
                .expect("valid label")
                .support_bits();
            m.add_to(u, u, Complex64::new(w, 0.0));
            m.add_to(v, v, Complex64::new(w, 0.0));
        }
        HermitianMatrix::new(m).expect("GHZ-diagonal construction is Hermitian")
    }

    /// The same operator placed on the subspace selected by `sel` inside the
    /// full product space.
    pub fn embedded(&self, sel: &TwoLevelSelection, dims: &SiteDims) -> Result<HermitianMatrix> {
        if dims.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "coefficients for {} sites, space has {}",
                self.n,
                dims.n()
            )));
        }
        embed_operator(&self.to_matrix(), sel, dims)
    }

    /// Analytic partial-transpose verdict for this family: positive iff
    /// |delta| <= 2*lambda_g(beta), with the empty and full subsets
    /// unconditionally positive. `tol` is the slack on the delta side; see
    /// [`ANALYTIC_DECISION_TOL`].
    pub fn ppt_verdict(&self, beta: &SiteSubset, tol: f64) -> Result<AnalyticPptVerdict> {
        if beta.n() != self.n {
            return Err(Error::InvalidSubset(format!(
                "subset over {} sites, coefficients have {}",
                beta.n(),
                self.n
            )));
        }
        if beta.is_empty() || beta.is_full() {
            return Ok(AnalyticPptVerdict::TrivialSubset);
        }
        // If delta < 0 the roles of lambda0+ and lambda0- are exchanged.
        let delta = self.delta().abs();
        let lam = self.lambda(g_of(beta));
        let gap = delta - 2.0 * lam;
        if gap.abs() <= tol {
            Ok(AnalyticPptVerdict::Boundary)
        } else if gap < 0.0 {
            Ok(AnalyticPptVerdict::Ppt)
        } else {
            Ok(AnalyticPptVerdict::Npt)
        }
    }
}

/// Outcome of the analytic criterion for one subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticPptVerdict {
    /// beta empty or full: the partial transpose is trivially positive.
    TrivialSubset,
    Ppt,
    /// |delta - 2*lambda_g| within tolerance; positive, on the edge.
    Boundary,
    Npt,
}

impl AnalyticPptVerdict {
    pub fn is_ppt(&self) -> bool {
        !matches!(self, AnalyticPptVerdict::Npt)
    }
}

impl std::fmt::Display for AnalyticPptVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalyticPptVerdict::TrivialSubset => write!(f, "PPT(trivial)"),
            AnalyticPptVerdict::Ppt => write!(f, "PPT"),
            AnalyticPptVerdict::Boundary => write!(f, "PPT(equality)"),
            AnalyticPptVerdict::Npt => write!(f, "NPT"),
        }
    }
}

/// lambda0+ and lambda0- of `w` for a selection: the expectations of the
/// embedded extreme GHZ projectors, each supported on just two basis
/// vectors.
fn lambda0_pair(w: &DensityOperator, sel: &TwoLevelSelection) -> (f64, f64) {
    let dims = w.dims();
    let n = dims.n();
    let u = sel.embedded_index(0, dims);
    let v = sel.embedded_index((1usize << n) - 1, dims);
    let m = w.matrix();
    let diag = 0.5 * (m.get(u, u).re + m.get(v, v).re);
    let cross = m.get(u, v).re;
    (diag + cross, diag - cross)
}

/// All GHZ-diagonal coefficients of `w` with respect to a selection, read
/// off as expectations against the embedded GHZ projectors.
pub fn extract_coefficients(
    w: &DensityOperator,
    sel: &TwoLevelSelection,
) -> Result<GhzDiagonalCoeffs> {
    sel.validate_for(w.dims())?;
    let dims = w.dims();
    let n = dims.n();
    let half = 1usize << (n - 1);
    let (lp, lm) = lambda0_pair(w, sel);
    let m = w.matrix();
    let mut lambdas = Vec::with_capacity(half - 1);
    for j in 1..half {
        let u = sel.embedded_index(j << 1, dims);
        let v = sel.embedded_index(((half - 1 - j) << 1) | 1, dims);
        // 2*lambda_j = <u|W|u> + <v|W|v>: the projector pair sums to the
        // identity on the two supporting basis vectors.
        lambdas.push(0.5 * (m.get(u, u).re + m.get(v, v).re));
    }
    GhzDiagonalCoeffs::new(n, lp, lm, lambdas)
}

/// Verdict of the brute-force eigenvalue oracle for one transposed subset.
#[derive(Debug, Clone)]
pub struct SubsetVerdict {
    pub subset: SiteSubset,
    pub min_eigenvalue: f64,
    pub ppt: bool,
}

/// Brute-force k-PPT check of a partition: one eigensolve per necessary
/// subset.
#[derive(Debug, Clone)]
pub struct KPptReport {
    pub partition: Partition,
    pub subsets: Vec<SubsetVerdict>,
    pub all_ppt: bool,
    pub tol: f64,
}

/// Check k-positivity of partial transpose with respect to `p` by direct
/// eigensolves: for each necessary subset alpha, the smallest eigenvalue of
/// the alpha-transposed matrix must be at least -tol. Transposing a subset
/// or its complement gives the same spectrum, so only one representative per
/// pair is checked.
pub fn is_k_ppt(w: &DensityOperator, p: &Partition, tol: f64) -> Result<KPptReport> {
    if p.n() != w.n() {
        return Err(Error::InvalidPartition(format!(
            "partition over {} sites, state has {}",
            p.n(),
            w.n()
        )));
    }
    let subsets = necessary_subsets(p);
    let verdicts: Vec<SubsetVerdict> = subsets
        .into_par_iter()
        .map(|subset| -> Result<SubsetVerdict> {
            let transposed = w.partial_transpose(&subset)?;
            let min_eigenvalue = transposed.min_eigenvalue()?;
            Ok(SubsetVerdict { subset, min_eigenvalue, ppt: min_eigenvalue >= -tol })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_ppt = verdicts.iter().all(|v| v.ppt);
    Ok(KPptReport { partition: p.clone(), subsets: verdicts, all_ppt, tol })
}

/// The bound 2^(1-k) that no k-PPT state can exceed.
pub fn witness_bound(k: usize) -> f64 {
    (2.0f64).powi(1 - k as i32)
}

/// The witness for level k on the selected subspace: the projector onto the
/// extreme GHZ state minus (1 - 2^(2-k)) times the projector onto its
/// phase-flipped partner, zero outside the subspace. Rank at most 2;
/// eigenvalues { 1, -(1 - 2^(2-k)), 0, ... }. The negative coefficient
/// grows from 0 at k = 2 toward 1 as k increases.
pub fn witness_operator(
    k: usize,
    sel: &TwoLevelSelection,
    dims: &SiteDims,
) -> Result<HermitianMatrix> {
    validate_level(k, dims.n())?;
    sel.validate_for(dims)?;
    let n = dims.n();
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    let coeff = 1.0 - (2.0f64).powi(2 - k as i32);
    let (u, v) = GhzLabel::new(n, 0, Sign::Plus)?.support_bits();
    // P+ - coeff * P-, both supported on |u>, |v> with entries +-1/2.
    m.set(u, u, Complex64::new(0.5 * (1.0 - coeff), 0.0));
    m.set(v, v, Complex64::new(0.5 * (1.0 - coeff), 0.0));
    m.set(u, v, Complex64::new(0.5 * (1.0 + coeff), 0.0));
    m.set(v, u, Complex64::new(0.5 * (1.0 + coeff), 0.0));
    embed_operator(&HermitianMatrix::new(m)?, sel, dims)
}

fn validate_level(k: usize, n: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::InvalidPartition(format!(
            "witness level k = {} out of range 2..={}",
            k, n
        )));
    }
    Ok(())
}

/// The raw witness expectation lambda0+ - (1 - 2^(2-k)) * lambda0-, equal to
/// the trace of the state against [`witness_operator`].
pub fn witness_expectation(w: &DensityOperator, k: usize, sel: &TwoLevelSelection) -> Result<f64> {
    validate_level(k, w.n())?;
    sel.validate_for(w.dims())?;
    let (lp, lm) = lambda0_pair(w, sel);
    Ok(lp - (1.0 - (2.0f64).powi(2 - k as i32)) * lm)
}

/// Witness evaluation at one (k, selection) pair.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub k: usize,
    pub selection: TwoLevelSelection,
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
}

impl WitnessReport {
    fn from_value(k: usize, selection: TwoLevelSelection, value: f64) -> Self {
        let bound = witness_bound(k);
        Self { k, selection, value, bound, violated: value > bound + VIOLATION_TOL }
    }
}

/// Witness value at one selection. When lambda0- exceeds lambda0+ the two
/// are exchanged first (a phase flip maps the extreme GHZ pair onto each
/// other without touching k-PPT membership), so the reported value is the
/// larger of the two orientations.
pub fn witness_value(w: &DensityOperator, k: usize, sel: &TwoLevelSelection) -> Result<WitnessReport> {
    validate_level(k, w.n())?;
    sel.validate_for(w.dims())?;
    Ok(WitnessReport::from_value(k, sel.clone(), oriented_value(w, k, sel)))
}

fn oriented_value(w: &DensityOperator, k: usize, sel: &TwoLevelSelection) -> f64 {
    let (lp, lm) = lambda0_pair(w, sel);
    let (hi, lo) = if lp >= lm { (lp, lm) } else { (lm, lp) };
    hi - (1.0 - (2.0f64).powi(2 - k as i32)) * lo
}

/// How to search the selection space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Every per-site ordered pair combination, quotiented by the global
    /// swap (which leaves the witness invariant): site 1 contributes its
    /// unordered pairs, the rest contribute ordered pairs.
    Exhaustive,
    /// `samples` selections drawn independently from the seeded generator.
    Random { samples: usize, seed: u64 },
}

impl SearchStrategy {
    /// Exhaustive when the quotient space is small enough, otherwise
    /// seeded sampling.
    pub fn auto(dims: &SiteDims, seed: u64) -> Self {
        match SelectionSpace::new(dims).count() {
            Some(c) if c <= AUTO_EXHAUSTIVE_LIMIT => SearchStrategy::Exhaustive,
            _ => SearchStrategy::Random { samples: AUTO_RANDOM_SAMPLES, seed },
        }
    }
}

impl std::fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SearchStrategy::Exhaustive => write!(f, "exhaustive"),
            SearchStrategy::Random { samples, seed } => {
                write!(f, "random:{} (seed {})", samples, seed)
            }
        }
    }
}

/// The quotient space of two-level selections: ordered pairs per site, with
/// the global swap fixed by restricting site 1 to a < b. Selections are
/// indexed in lexicographic order.
struct SelectionSpace {
    dims: Vec<usize>,
    radices: Vec<usize>,
}

impl SelectionSpace {
    fn new(dims: &SiteDims) -> Self {
        let radices = dims
            .dims()
            .iter()
            .enumerate()
            .map(|(i, &d)| if i == 0 { d * (d - 1) / 2 } else { d * (d - 1) })
            .collect();
        Self { dims: dims.dims().to_vec(), radices }
    }

    /// Total count, None on overflow.
    fn count(&self) -> Option<usize> {
        self.radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r))
    }

    fn unordered_pair(d: usize, mut idx: usize) -> (usize, usize) {
        for a in 0..d {
            let span = d - 1 - a;
            if idx < span {
                return (a, a + 1 + idx);
            }
            idx -= span;
        }
        unreachable!("pair index within radix");
    }

    fn ordered_pair(d: usize, idx: usize) -> (usize, usize) {
        let a = idx / (d - 1);
        let r = idx % (d - 1);
        let b = if r < a { r } else { r + 1 };
        (a, b)
    }

    /// The ordinal-th selection in lexicographic order (site 1 most
    /// significant).
    fn nth(&self, mut ordinal: usize) -> TwoLevelSelection {
        let n = self.dims.len();
        let mut pair_idx = vec![0usize; n];
        for i in (0..n).rev() {
            pair_idx[i] = ordinal % self.radices[i];
            ordinal /= self.radices[i];
        }
        let pairs = pair_idx
            .iter()
            .enumerate()
            .map(|(i, &idx)| {
                if i == 0 {
                    Self::unordered_pair(self.dims[i], idx)
                } else {
                    Self::ordered_pair(self.dims[i], idx)
                }
            })
            .collect();
        TwoLevelSelection::from_pairs_unchecked(pairs)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TwoLevelSelection {
        let pairs = self
            .dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if i == 0 {
                    Self::unordered_pair(d, rng.random_range(0..d * (d - 1) / 2))
                } else {
                    Self::ordered_pair(d, rng.random_range(0..d * (d - 1)))
                }
            })
            .collect();
        TwoLevelSelection::from_pairs_unchecked(pairs)
    }
}

/// Maximize `score` over the strategy's selections. Ties keep the earliest
/// selection in enumeration (= lexicographic) or draw order, which makes the
/// result deterministic under parallel reduction.
fn search_max<F>(dims: &SiteDims, strategy: &SearchStrategy, score: F) -> Result<(f64, TwoLevelSelection)>
where
    F: Fn(&TwoLevelSelection) -> f64 + Sync,
{
    let space = SelectionSpace::new(dims);
    let better = |a: (f64, usize), b: (f64, usize)| -> (f64, usize) {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    match strategy {
        SearchStrategy::Exhaustive => {
            let count = space.count().unwrap_or(usize::MAX);
            if count > EXHAUSTIVE_CAP {
                return Err(Error::SearchCapExceeded { size: count, cap: EXHAUSTIVE_CAP });
            }
            let (best, ordinal) = (0..count)
                .into_par_iter()
                .map(|ord| (score(&space.nth(ord)), ord))
                .reduce_with(&better)
                .expect("selection space is never empty");
            Ok((best, space.nth(ordinal)))
        }
        SearchStrategy::Random { samples, seed } => {
            if *samples == 0 {
                return Err(Error::InvalidGenerator("random search needs samples > 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let drawn: Vec<TwoLevelSelection> = (0..*samples).map(|_| space.sample(&mut rng)).collect();
            let (best, idx) = drawn
                .par_iter()
                .enumerate()
                .map(|(i, sel)| (score(sel), i))
                .reduce_with(better)
                .expect("at least one sample");
            Ok((best, drawn[idx].clone()))
        }
    }
}

/// Best witness report over the searched selections at level k.
pub fn search_selections(
    w: &DensityOperator,
    k: usize,
    strategy: &SearchStrategy,
) -> Result<WitnessReport> {
    validate_level(k, w.n())?;
    let (value, selection) = search_max(w.dims(), strategy, |sel| oriented_value(w, k, sel))?;
    Ok(WitnessReport::from_value(k, selection, value))
}

/// Overlap with the embedded extreme GHZ state, lambda0+ for the selection.
pub fn ghz_fidelity(w: &DensityOperator, sel: &TwoLevelSelection) -> Result<f64> {
    sel.validate_for(w.dims())?;
    Ok(lambda0_pair(w, sel).0)
}

/// Result of the fidelity search behind [`npt_by_fidelity`].
#[derive(Debug, Clone)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub selection: TwoLevelSelection,
    /// Fidelity above 1/2: no partial transpose over any subsystem is
    /// positive.
    pub npt: bool,
}

/// Search for a selection whose GHZ fidelity exceeds 1/2. Finding one is
/// sufficient for the state to have no positive partial transpose with
/// respect to any subsystem (the k = 2 case of the witness).
pub fn npt_by_fidelity(w: &DensityOperator, strategy: &SearchStrategy) -> Result<FidelityReport> {
    let (fidelity, selection) = search_max(w.dims(), strategy, |sel| lambda0_pair(w, sel).0)?;
    Ok(FidelityReport { fidelity, selection, npt: fidelity > 0.5 + VIOLATION_TOL })
}

/// Options for [`classify`].
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// None selects [`SearchStrategy::auto`] with `seed`.
    pub strategy: Option<SearchStrategy>,
    pub seed: u64,
    /// Cross-check every partition with the brute-force eigenvalue oracle
    /// (feasible for n <= 8).
    pub oracle: bool,
    pub oracle_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { strategy: None, seed: 0, oracle: false, oracle_tol: ORACLE_PSD_TOL }
    }
}

/// Full classification of a state.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    /// Best witness report per level, k ascending from 2 to n.
    pub reports: Vec<WitnessReport>,
    /// Smallest violated level; violation at k excludes k'-PPT and
    /// k'-separability for every k' >= k, so smaller is stronger.
    pub min_violated_k: Option<usize>,
    /// Best k = 2 witness value, the fidelity to the closest state of the
    /// embedded GHZ class.
    pub ghz_fidelity: f64,
    pub strategy: SearchStrategy,
    /// Brute-force verdicts per partition, when requested.
    pub oracle: Option<Vec<KPptReport>>,
}

impl ClassificationReport {
    /// One-line conclusion. The criterion is one-sided: no violation never
    /// means separable.
    pub fn conclusion(&self) -> String {
        match self.min_violated_k {
            Some(2) => {
                "no PPT w.r.t. any subsystem; not k'-PPT and not k'-separable for all k' >= 2"
                    .to_string()
            }
            Some(k) => format!("not k'-PPT and not k'-separable for all k' >= {}", k),
            None => "inconclusive at all k".to_string(),
        }
    }
}

/// Run the witness search for every level k = 2..n and report the smallest
/// violated level, optionally cross-checked against the eigenvalue oracle
/// on every partition.
pub fn classify(w: &DensityOperator, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let n = w.n();
    let strategy = opts.strategy.unwrap_or_else(|| SearchStrategy::auto(w.dims(), opts.seed));
    let mut reports = Vec::with_capacity(n - 1);
    for k in 2..=n {
        reports.push(search_selections(w, k, &strategy)?);
    }
    let min_violated_k = reports.iter().find(|r| r.violated).map(|r| r.k);
    let ghz_fidelity = reports[0].value;
    let oracle = if opts.oracle {
        if n > 8 {
            return Err(Error::InvalidPartition(format!(
                "oracle cross-check enumerates all partitions, capped at n <= 8 (got {})",
                n
            )));
        }
        let mut checks = Vec::new();
        for k in 2..=n {
            for p in enumerate_partitions(n, k)? {
                checks.push(is_k_ppt(w, &p, opts.oracle_tol)?);
            }
        }
        Some(checks)
    } else {
        None
    };
    Ok(ClassificationReport { reports, min_violated_k, ghz_fidelity, strategy, oracle })
}

/// Cross-path consistency: the coefficient formula must match the explicit
/// trace against the witness operator.
pub fn witness_paths_agree(w: &DensityOperator, k: usize, sel: &TwoLevelSelection) -> Result<f64> {
    let by_coeffs = witness_expectation(w, k, sel)?;
    let op = witness_operator(k, sel, w.dims())?;
    let by_trace = expectation(w.matrix(), &op)?;
    Ok((by_coeffs - by_trace).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::ghz_vector;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;

    fn qubits(n: usize) -> SiteDims {
        SiteDims::qubits(n).unwrap()
    }

    fn maximally_mixed(dims: &SiteDims) -> DensityOperator {
        let d = dims.total();
        let m = ComplexMatrix::identity(d).scale(Complex::new(1.0 / d as f64, 0.0));
        DensityOperator::new(dims.clone(), HermitianMatrix::new(m).unwrap()).unwrap()
    }

    fn embedded_ghz(dims: &SiteDims, sel: &TwoLevelSelection) -> DensityOperator {
        let n = dims.n();
        let plus = ghz_vector(&GhzLabel::new(n, 0, Sign::Plus).unwrap());
        let mut m = ComplexMatrix::zeros(1 << n, 1 << n);
        m.accumulate_outer(&plus, &plus, 1.0);
        let emb = embed_operator(&HermitianMatrix::new(m).unwrap(), sel, dims).unwrap();
        DensityOperator::new(dims.clone(), emb).unwrap()
    }

    /// p * GHZ + (1-p) * I/d on two qubits.
    fn werner(p: f64) -> DensityOperator {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);
        let ghz = embedded_ghz(&dims, &sel);
        let mixed = maximally_mixed(&dims);
        let m = ghz
            .matrix()
            .matrix()
            .scale(Complex::new(p, 0.0))
            .add(&mixed.matrix().matrix().scale(Complex::new(1.0 - p, 0.0)))
            .unwrap();
        DensityOperator::new(dims, HermitianMatrix::new(m).unwrap()).unwrap()
    }

    #[test]
    fn ghz_diagonal_matrix_examples() {
        // lambda0+ = 1: the extreme GHZ projector itself.
        let c = GhzDiagonalCoeffs::new(2, 1.0, 0.0, vec![0.0]).unwrap();
        let m = c.to_matrix();
        assert_abs_diff_eq!(m.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(0, 3).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(3, 3).re, 0.5, epsilon = 1e-15);
        assert_eq!(m.get(1, 1).re, 0.0);

        // Flat coefficients: GHZ completeness gives the maximally mixed state.
        let c = GhzDiagonalCoeffs::new(2, 0.25, 0.25, vec![0.25]).unwrap();
        let m = c.to_matrix();
        for r in 0..4 {
            for cl in 0..4 {
                let want = if r == cl { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(m.get(r, cl).re, want, epsilon = 1e-15);
                assert_abs_diff_eq!(m.get(r, cl).im, 0.0, epsilon = 1e-15);
            }
        }

        let c = GhzDiagonalCoeffs::new(3, 0.3, 0.1, vec![0.1, 0.1, 0.1]).unwrap();
        assert_abs_diff_eq!(c.trace(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.to_matrix().trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coefficients_validation() {
        assert!(GhzDiagonalCoeffs::new(2, 0.5, 0.0, vec![]).is_err()); // wrong length
        assert!(GhzDiagonalCoeffs::new(2, -0.5, 0.0, vec![0.0]).is_err());
        assert!(GhzDiagonalCoeffs::new(2, 0.9, 0.9, vec![0.0]).is_err()); // over-normalized
        // Tiny numerical negatives clamp to zero.
        let c = GhzDiagonalCoeffs::new(2, 0.5, -1e-12, vec![0.25]).unwrap();
        assert_eq!(c.lambda0_minus(), 0.0);
    }

    #[test]
    fn extraction_examples() {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);

        let ghz = embedded_ghz(&dims, &sel);
        let c = extract_coefficients(&ghz, &sel).unwrap();
        assert_abs_diff_eq!(c.lambda0_plus(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda0_minus(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda(1), 0.0, epsilon = 1e-14);

        let mixed = maximally_mixed(&dims);
        let c = extract_coefficients(&mixed, &sel).unwrap();
        assert_abs_diff_eq!(c.lambda0_plus(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda0_minus(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda(1), 0.25, epsilon = 1e-14);

        let d33 = SiteDims::new(vec![3, 3]).unwrap();
        let sel33 = TwoLevelSelection::canonical(&d33);
        let mixed9 = maximally_mixed(&d33);
        let c = extract_coefficients(&mixed9, &sel33).unwrap();
        assert_abs_diff_eq!(c.lambda0_plus(), 1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda0_minus(), 1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda(1), 1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.trace(), 4.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn analytic_ppt_examples() {
        let beta = SiteSubset::new(vec![2], 2).unwrap();

        let pure = GhzDiagonalCoeffs::new(2, 1.0, 0.0, vec![0.0]).unwrap();
        assert_eq!(pure.ppt_verdict(&beta, ANALYTIC_DECISION_TOL).unwrap(), AnalyticPptVerdict::Npt);

        let balanced = GhzDiagonalCoeffs::new(2, 0.3, 0.3, vec![0.2]).unwrap();
        assert!(balanced.ppt_verdict(&beta, ANALYTIC_DECISION_TOL).unwrap().is_ppt());

        // Boundary: delta = 0.2 = 2 * lambda_g.
        let b3 = SiteSubset::new(vec![2], 3).unwrap();
        let boundary = GhzDiagonalCoeffs::new(3, 0.3, 0.1, vec![0.1, 0.1, 0.1]).unwrap();
        assert_eq!(
            boundary.ppt_verdict(&b3, ANALYTIC_DECISION_TOL).unwrap(),
            AnalyticPptVerdict::Boundary
        );

        let empty = SiteSubset::new(vec![], 2).unwrap();
        assert_eq!(
            pure.ppt_verdict(&empty, ANALYTIC_DECISION_TOL).unwrap(),
            AnalyticPptVerdict::TrivialSubset
        );
    }

    #[test]
    fn k_ppt_oracle_examples() {
        let dims = qubits(2);
        let p = Partition::parse("1|2", 2).unwrap();

        let mixed = maximally_mixed(&dims);
        assert!(is_k_ppt(&mixed, &p, ORACLE_PSD_TOL).unwrap().all_ppt);

        let sel = TwoLevelSelection::canonical(&dims);
        let ghz = embedded_ghz(&dims, &sel);
        let report = is_k_ppt(&ghz, &p, ORACLE_PSD_TOL).unwrap();
        assert!(!report.all_ppt);
        assert_abs_diff_eq!(report.subsets[0].min_eigenvalue, -0.5, epsilon = 1e-10);

        // Werner p = 0.3: min transposed eigenvalue (1 - 3p)/4 = 0.025 > 0.
        let w = werner(0.3);
        let report = is_k_ppt(&w, &p, ORACLE_PSD_TOL).unwrap();
        assert!(report.all_ppt);
        assert_abs_diff_eq!(report.subsets[0].min_eigenvalue, 0.025, epsilon = 1e-10);
    }

    #[test]
    fn witness_operator_spectrum() {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);
        // k = 2: the coefficient on the phase-flipped projector vanishes.
        let w2 = witness_operator(2, &sel, &dims).unwrap();
        let eigs = w2.eigenvalues().unwrap();
        assert_abs_diff_eq!(eigs[3], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[0], 0.0, epsilon = 1e-12);

        let dims3 = qubits(3);
        let sel3 = TwoLevelSelection::canonical(&dims3);
        let w3 = witness_operator(3, &sel3, &dims3).unwrap();
        let eigs = w3.eigenvalues().unwrap();
        assert_abs_diff_eq!(eigs[0], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[7], 1.0, epsilon = 1e-12);
        for &e in &eigs[1..7] {
            assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
        }

        assert!(witness_operator(1, &sel, &dims).is_err());
        assert!(witness_operator(3, &sel, &dims).is_err());
    }

    #[test]
    fn witness_value_examples() {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);

        let ghz = embedded_ghz(&dims, &sel);
        let r = witness_value(&ghz, 2, &sel).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.bound, 0.5, epsilon = 1e-15);
        assert!(r.violated);

        let mixed = maximally_mixed(&dims);
        let r = witness_value(&mixed, 2, &sel).unwrap();
        assert_abs_diff_eq!(r.value, 0.25, epsilon = 1e-14);
        assert!(!r.violated);
    }

    #[test]
    fn witness_orientation_swap() {
        // A state loaded on the phase-flipped GHZ vector: the raw expectation
        // is negative-leaning, the oriented value catches it.
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);
        let minus = ghz_vector(&GhzLabel::new(2, 0, Sign::Minus).unwrap());
        let mut m = ComplexMatrix::zeros(4, 4);
        m.accumulate_outer(&minus, &minus, 1.0);
        let w = DensityOperator::new(dims, HermitianMatrix::new(m).unwrap()).unwrap();

        assert_abs_diff_eq!(witness_expectation(&w, 2, &sel).unwrap(), 0.0, epsilon = 1e-14);
        let r = witness_value(&w, 2, &sel).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert!(r.violated);
    }

    #[test]
    fn paths_agree_on_werner() {
        let w = werner(0.37);
        let sel = TwoLevelSelection::canonical(w.dims());
        assert!(witness_paths_agree(&w, 2, &sel).unwrap() <= 1e-10);
    }

    #[test]
    fn search_finds_ghz_at_its_own_selection() {
        let dims = qubits(2);
        let sel0 = TwoLevelSelection::canonical(&dims);
        let ghz = embedded_ghz(&dims, &sel0);
        let best = search_selections(&ghz, 2, &SearchStrategy::Exhaustive).unwrap();
        assert_abs_diff_eq!(best.value, 1.0, epsilon = 1e-14);
        assert_eq!(best.selection, sel0);
    }

    #[test]
    fn search_on_mixed_state_never_violates() {
        for dims in [qubits(2), SiteDims::new(vec![3, 2]).unwrap()] {
            let mixed = maximally_mixed(&dims);
            let d = dims.total() as f64;
            for k in 2..=dims.n() {
                let best = search_selections(&mixed, k, &SearchStrategy::Exhaustive).unwrap();
                let expected = (2.0f64).powi(2 - k as i32) / d;
                assert_abs_diff_eq!(best.value, expected, epsilon = 1e-14);
                assert!(!best.violated);
            }
        }
    }

    #[test]
    fn search_recovers_relabelled_ghz() {
        // GHZ embedded with site 1's pair swapped: the exhaustive search must
        // find full fidelity at the relabelled selection.
        let dims = qubits(2);
        let swapped = TwoLevelSelection::new(vec![(1, 0), (0, 1)], &dims).unwrap();
        let ghz = embedded_ghz(&dims, &swapped);
        let best = search_selections(&ghz, 2, &SearchStrategy::Exhaustive).unwrap();
        assert_abs_diff_eq!(best.value, 1.0, epsilon = 1e-14);
        // The quotient representative has a < b at site 1.
        assert_eq!(best.selection.pairs(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn random_search_is_deterministic() {
        let w = werner(0.8);
        let strat = SearchStrategy::Random { samples: 64, seed: 7 };
        let a = search_selections(&w, 2, &strat).unwrap();
        let b = search_selections(&w, 2, &strat).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.selection, b.selection);
    }

    #[test]
    fn search_space_limits() {
        // dims (4,4,4,4,2): quotient space 6 * 12^3 * 2 = 20736, within the
        // exhaustive cap.
        let dims = SiteDims::new(vec![4, 4, 4, 4, 2]).unwrap();
        let mixed = maximally_mixed(&dims);
        assert!(search_selections(&mixed, 2, &SearchStrategy::Exhaustive).is_ok());
        // samples = 0 is rejected.
        assert!(matches!(
            search_selections(&mixed, 2, &SearchStrategy::Random { samples: 0, seed: 1 }),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn auto_strategy_switches_on_space_size() {
        // Two qubits: 2 selections, exhaustive.
        assert_eq!(SearchStrategy::auto(&qubits(2), 0), SearchStrategy::Exhaustive);
        // dims (32,32): 496 * 992 = 492032 > 1e5, falls back to sampling.
        let big = SiteDims::new(vec![32, 32]).unwrap();
        assert_eq!(
            SearchStrategy::auto(&big, 9),
            SearchStrategy::Random { samples: AUTO_RANDOM_SAMPLES, seed: 9 }
        );
    }

    #[test]
    fn classify_examples() {
        let dims3 = qubits(3);
        let sel3 = TwoLevelSelection::canonical(&dims3);
        let ghz3 = embedded_ghz(&dims3, &sel3);
        let report = classify(&ghz3, &ClassifyOptions::default()).unwrap();
        assert_eq!(report.min_violated_k, Some(2));
        assert!(report.conclusion().contains("no PPT w.r.t. any subsystem"));
        assert_eq!(report.reports.len(), 2);

        let mixed = maximally_mixed(&qubits(2));
        let report = classify(&mixed, &ClassifyOptions::default()).unwrap();
        assert_eq!(report.min_violated_k, None);
        assert_eq!(report.conclusion(), "inconclusive at all k");

        let w = werner(0.5);
        let opts = ClassifyOptions { oracle: true, ..Default::default() };
        let report = classify(&w, &opts).unwrap();
        assert_eq!(report.min_violated_k, Some(2));
        assert_abs_diff_eq!(report.ghz_fidelity, 0.625, epsilon = 1e-12);
        let oracle = report.oracle.unwrap();
        assert_eq!(oracle.len(), 1);
        assert!(!oracle[0].all_ppt);
    }

    #[test]
    fn fidelity_examples() {
        let dims = qubits(2);
        let sel = TwoLevelSelection::canonical(&dims);
        let ghz = embedded_ghz(&dims, &sel);
        assert_abs_diff_eq!(ghz_fidelity(&ghz, &sel).unwrap(), 1.0, epsilon = 1e-14);
        let r = npt_by_fidelity(&ghz, &SearchStrategy::Exhaustive).unwrap();
        assert!(r.npt);

        let mixed = maximally_mixed(&dims);
        assert_abs_diff_eq!(ghz_fidelity(&mixed, &sel).unwrap(), 0.25, epsilon = 1e-14);
        let r = npt_by_fidelity(&mixed, &SearchStrategy::Exhaustive).unwrap();
        assert!(!r.npt);

        // Werner fidelity (1 + 3p)/4.
        for p in [0.0, 0.3, 0.6, 1.0] {
            let w = werner(p);
            assert_abs_diff_eq!(
                ghz_fidelity(&w, &sel).unwrap(),
                (1.0 + 3.0 * p) / 4.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn witness_value_non_increasing_in_k() {
        let dims = qubits(3);
        let sel = TwoLevelSelection::canonical(&dims);
        let w = {
            let c = GhzDiagonalCoeffs::new(3, 0.4, 0.2, vec![0.1, 0.05, 0.05]).unwrap();
            DensityOperator::new(dims.clone(), c.embedded(&sel, &dims).unwrap()).unwrap()
        };
        let v2 = witness_value(&w, 2, &sel).unwrap().value;
        let v3 = witness_value(&w, 3, &sel).unwrap().value;
        assert!(v2 >= v3 - 1e-12);
    }
}
