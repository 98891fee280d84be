//! Exact product measure `μ_p` of a monotone family, its derivative and
//! pivotal (influence) quantities, threshold points, and a Monte Carlo
//! estimator for ground sets beyond the enumeration limit.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::MintermFamily;
use crate::par::{fold_chunks, Execution};
use crate::rational::{int, powers, Rational};
use crate::set::ElementSet;

pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Bisection stops after this many halvings at the latest.
pub const BISECTION_MAX_ITER: usize = 200;

/// Allowed `|μ(p_x) - x|` after threshold inversion.
pub const THRESHOLD_MU_TOLERANCE: f64 = 1e-12;

const ENUM_CHUNK: u64 = 1 << 12;
const SAMPLE_BLOCK: u64 = 1 << 10;

/// z-score of a two-sided 99% normal interval.
const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    pub max_n: usize,
    pub exec: Execution,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            max_n: DEFAULT_ENUMERATION_LIMIT,
            exec: Execution::Parallel,
        }
    }
}

/// Layer counts `a_t = #{A in the upset : |A| = t}` so that
/// `μ_p = Σ_t a_t p^t (1-p)^(n-t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurePolynomial {
    n: usize,
    layer_counts: Vec<u64>,
}

/// `counts[i][s]`: number of `s`-subsets `S` of the ground set minus `i`
/// such that `i` is pivotal for `S ∪ {i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotalCounts {
    n: usize,
    counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct Census {
    pub polynomial: MeasurePolynomial,
    pub pivotal: PivotalCounts,
}

/// Per-element pivotal probabilities `b_i` and `E[Piv] = p Σ b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceProfile {
    pub p: Rational,
    pub influences: Vec<Rational>,
    pub expected_pivotal: Rational,
}

impl InfluenceProfile {
    pub fn total_influence(&self) -> Rational {
        self.influences.iter().sum()
    }
}

fn check_capacity(fam: &MintermFamily, max_n: usize) -> Result<()> {
    if fam.n() > max_n {
        return Err(Error::Capacity {
            n: fam.n(),
            limit: max_n,
        });
    }
    Ok(())
}

fn open_unit(p: &Rational, what: &str) -> Result<()> {
    if p.is_positive() && *p < Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {p} must lie in (0, 1)")))
    }
}

fn closed_unit(p: &Rational, what: &str) -> Result<()> {
    if crate::rational::is_probability(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {p} must lie in [0, 1]")))
    }
}

/// One pass over all `2^n` subsets collecting layer and pivotal counts.
///
/// For a member `S`, element `i` is pivotal iff it lies in every minterm
/// contained in `S`.
pub fn census_with(fam: &MintermFamily, cfg: &EnumConfig) -> Result<Census> {
    check_capacity(fam, cfg.max_n)?;
    let n = fam.n();
    let minterms = fam.minterms();
    let width = n + 1;
    // layer counts followed by n rows of pivot counts
    let slots = width + n * n.max(1);
    let total = 1u64 << n;
    let acc = fold_chunks(
        cfg.exec,
        total,
        ENUM_CHUNK,
        || vec![0u64; slots],
        |mut acc, range| {
            for bits in range {
                let s = ElementSet::from_bits(bits as u128);
                let mut pivot = ElementSet::prefix(n);
                let mut member = false;
                for m in minterms {
                    if m.is_subset(s) {
                        member = true;
                        pivot = pivot.intersection(*m);
                    }
                }
                if member {
                    let size = s.len();
                    acc[size] += 1;
                    for i in pivot.iter() {
                        acc[width + i * n + size - 1] += 1;
                    }
                }
            }
            acc
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let layer_counts = acc[..width].to_vec();
    let counts = (0..n)
        .map(|i| acc[width + i * n..width + (i + 1) * n].to_vec())
        .collect();
    Ok(Census {
        polynomial: MeasurePolynomial { n, layer_counts },
        pivotal: PivotalCounts { n, counts },
    })
}

pub fn census(fam: &MintermFamily) -> Result<Census> {
    census_with(fam, &EnumConfig::default())
}

pub fn layer_counts(fam: &MintermFamily) -> Result<MeasurePolynomial> {
    census(fam).map(|c| c.polynomial)
}

impl MeasurePolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layer_counts(&self) -> &[u64] {
        &self.layer_counts
    }

    /// Size of the upset.
    pub fn upset_size(&self) -> u64 {
        self.layer_counts.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        let top = 1u64 << self.n.min(63);
        self.upset_size() == 0 || (self.n < 64 && self.upset_size() == top)
    }

    pub fn eval(&self, p: &Rational) -> Rational {
        let n = self.n;
        let pp = powers(p, n);
        let qp = powers(&(Rational::one() - p), n);
        self.layer_counts
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(t, &a)| int(a) * &pp[t] * &qp[n - t])
            .sum()
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        let n = self.n as i32;
        let q = 1.0 - p;
        self.layer_counts
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(t, &a)| a as f64 * p.powi(t as i32) * q.powi(n - t as i32))
            .sum()
    }

    /// `dμ/dp`, differentiated term by term.
    pub fn derivative(&self, p: &Rational) -> Rational {
        let n = self.n;
        let pp = powers(p, n);
        let qp = powers(&(Rational::one() - p), n);
        let mut acc = Rational::zero();
        for (t, &a) in self.layer_counts.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = int(a);
            if t > 0 {
                acc += &a * int(t as u64) * &pp[t - 1] * &qp[n - t];
            }
            if t < n {
                acc -= &a * int((n - t) as u64) * &pp[t] * &qp[n - t - 1];
            }
        }
        acc
    }

    /// `p_x` by bisection on `[0, 1]`; the family must be nontrivial.
    pub fn threshold_point(&self, x: f64) -> Result<f64> {
        if self.is_trivial() {
            return Err(Error::UndefinedThreshold);
        }
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("x = {x} must lie in (0, 1)")));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_f64(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (dl, dh) = ((self.eval_f64(lo) - x).abs(), (self.eval_f64(hi) - x).abs());
        let p = if dl < dh { lo } else { hi };
        let err = (self.eval_f64(p) - x).abs();
        if err > THRESHOLD_MU_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "bisection for x = {x} stalled with |mu - x| = {err:e}"
            )));
        }
        Ok(p)
    }
}

impl PivotalCounts {
    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn profile(&self, p: &Rational) -> InfluenceProfile {
        let n = self.n;
        let pp = powers(p, n);
        let qp = powers(&(Rational::one() - p), n);
        let influences: Vec<Rational> = self
            .counts
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(s, &c)| int(c) * &pp[s] * &qp[n - 1 - s])
                    .sum()
            })
            .collect();
        let expected_pivotal = p * influences.iter().sum::<Rational>();
        InfluenceProfile {
            p: p.clone(),
            influences,
            expected_pivotal,
        }
    }
}

pub fn measure(fam: &MintermFamily, p: &Rational) -> Result<Rational> {
    closed_unit(p, "p")?;
    Ok(layer_counts(fam)?.eval(p))
}

pub fn pivotal_expectation(fam: &MintermFamily, p: &Rational) -> Result<InfluenceProfile> {
    open_unit(p, "p")?;
    Ok(census(fam)?.pivotal.profile(p))
}

pub fn measure_derivative(fam: &MintermFamily, p: &Rational) -> Result<Rational> {
    open_unit(p, "p")?;
    Ok(layer_counts(fam)?.derivative(p))
}

pub fn threshold_point(fam: &MintermFamily, x: f64) -> Result<f64> {
    if fam.is_trivial() {
        return Err(Error::UndefinedThreshold);
    }
    layer_counts(fam)?.threshold_point(x)
}

/// `δ_ε = (p_{1/2} - p_ε) / p_{1/2}` for `ε` in `(0, 1/2)`.
pub fn delta_eps(fam: &MintermFamily, eps: f64) -> Result<f64> {
    if fam.is_trivial() {
        return Err(Error::UndefinedThreshold);
    }
    delta_from_polynomial(&layer_counts(fam)?, eps)
}

pub fn delta_from_polynomial(poly: &MeasurePolynomial, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    let half = poly.threshold_point(0.5)?;
    let low = poly.threshold_point(eps)?;
    Ok((half - low) / half)
}

/// Outcome of checking that `μ_p / p^k` does not increase along a grid.
#[derive(Debug, Clone)]
pub struct RatioCheck {
    pub holds: bool,
    pub ratios: Vec<Rational>,
    /// Index `i` such that `ratios[i+1] > ratios[i]`.
    pub first_violation: Option<usize>,
}

pub fn monotone_ratio_check(fam: &MintermFamily, grid: &[Rational]) -> Result<RatioCheck> {
    for p in grid {
        if !p.is_positive() || *p > Rational::one() {
            return Err(Error::Domain(format!("grid point {p} must lie in (0, 1]")));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let poly = layer_counts(fam)?;
    let k = fam.k();
    let ratios: Vec<Rational> = grid
        .iter()
        .map(|p| poly.eval(p) / crate::rational::pow(p, k))
        .collect();
    let first_violation = ratios.windows(2).position(|w| w[1] > w[0]);
    Ok(RatioCheck {
        holds: first_violation.is_none(),
        ratios,
        first_violation,
    })
}

/// Bernoulli estimate of `μ_p` with a 99% normal-approximation interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub samples: u64,
    pub hits: u64,
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Sample `j` of block `b = j / 1024` is drawn from ChaCha8 stream `b` of the
/// seed, so results do not depend on how blocks are scheduled.
pub fn estimate_measure_with(
    fam: &MintermFamily,
    p: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} must lie in [0, 1]")));
    }
    if samples < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {samples}")));
    }
    let n = fam.n();
    let hits = fold_chunks(
        exec,
        samples,
        SAMPLE_BLOCK,
        || 0u64,
        |mut hits, range| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(range.start / SAMPLE_BLOCK);
            for _ in range {
                let mut bits = 0u128;
                for i in 0..n {
                    if rng.gen::<f64>() < p {
                        bits |= 1 << i;
                    }
                }
                if fam.contains(ElementSet::from_bits(bits)) {
                    hits += 1;
                }
            }
            hits
        },
        |a, b| a + b,
    );
    let mean = hits as f64 / samples as f64;
    let std_error = (mean * (1.0 - mean) / samples as f64).sqrt();
    Ok(Estimate {
        samples,
        hits,
        mean,
        std_error,
        ci_low: (mean - Z_99 * std_error).max(0.0),
        ci_high: (mean + Z_99 * std_error).min(1.0),
    })
}

pub fn estimate_measure(fam: &MintermFamily, p: f64, samples: u64, seed: u64) -> Result<Estimate> {
    estimate_measure_with(fam, p, samples, seed, Execution::Parallel)
}

/// One CSV row of the measure report.
#[derive(Debug, Clone)]
pub struct MeasureRow {
    pub p: Rational,
    pub mu: Rational,
    pub dmu_dp: Rational,
    pub e_piv: Rational,
    /// `None` at `p = 0`.
    pub ratio_mu_over_pk: Option<Rational>,
}

pub fn measure_rows(fam: &MintermFamily, grid: &[Rational], cfg: &EnumConfig) -> Result<Vec<MeasureRow>> {
    let census = census_with(fam, cfg)?;
    let k = fam.k();
    grid.iter()
        .map(|p| {
            closed_unit(p, "p")?;
            let mu = census.polynomial.eval(p);
            let ratio = (!p.is_zero()).then(|| &mu / crate::rational::pow(p, k));
            Ok(MeasureRow {
                p: p.clone(),
                dmu_dp: census.polynomial.derivative(p),
                e_piv: census.pivotal.profile(p).expected_pivotal,
                mu,
                ratio_mu_over_pk: ratio,
            })
        })
        .collect()
}

/// `Pr[[n]_p ∈ 𝒜]` summed set by set; quadratic-free reference used by
/// tests and the verifier.
pub fn brute_force_measure(fam: &MintermFamily, p: &Rational) -> Rational {
    let n = fam.n();
    let q = Rational::one() - p;
    let pp = powers(p, n);
    let qp = powers(&q, n);
    (0u128..1 << n)
        .map(ElementSet::from_bits)
        .filter(|s| fam.contains(*s))
        .map(|s| &pp[s.len()] * &qp[n - s.len()])
        .sum()
}
