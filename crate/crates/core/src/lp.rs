//! Fractional expectation `E*_q` as a covering LP over subsets of minterms,
//! its dual `L*_q`, and the bounds that follow from comparing the two with
//! the measure.

use std::collections::{BTreeSet, HashMap};

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::{canonical_cmp, MintermFamily};
use crate::measure::{self, MeasurePolynomial};
use crate::moments::first_moment;
use crate::rational::{self, binomial, from_f64, int, pow, to_f64, Rational};
use crate::set::ElementSet;
use crate::simplex::StandardLp;

pub const DEFAULT_SUPPORT_LIMIT: usize = 200_000;

/// Value tolerance for inverting `q ↦ E*_q`.
pub const INVERSE_TOLERANCE: f64 = 1e-9;

/// Absolute slack for inequalities between bisection-derived thresholds.
pub const THRESHOLD_COMPARE_TOLERANCE: f64 = 1e-9;

/// Bisection depth when inverting `q ↦ E*_q`.
const UNIT_SEARCH_DEPTH: usize = 44;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighted {
    pub set: ElementSet,
    pub weight: Rational,
}

/// Primal certificate `β`; only nonzero weights are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverWeighting {
    pub q: Rational,
    pub weights: Vec<Weighted>,
    pub objective: Rational,
}

/// Dual certificate `ν`, one entry per minterm in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct DualWeighting {
    pub q: Rational,
    pub weights: Vec<Weighted>,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub q: Rational,
    pub primal: CoverWeighting,
    pub dual: DualWeighting,
    pub value: Rational,
    pub support_size: usize,
    pub pivots: usize,
}

impl LpOutcome {
    pub fn duality_gap(&self) -> Rational {
        &self.primal.objective - &self.dual.value
    }

    pub fn to_json(&self, dual_only: bool) -> Value {
        let render = |ws: &[Weighted]| -> Vec<Value> {
            ws.iter()
                .map(|w| json!({"set": w.set.to_vec(), "w": rational::format(&w.weight)}))
                .collect()
        };
        let mut v = json!({
            "q": rational::format(&self.q),
            "value": rational::format(&self.value),
            "nu": render(&self.dual.weights),
            "duality_gap": rational::format(&self.duality_gap()),
        });
        if !dual_only {
            v["beta"] = Value::Array(render(&self.primal.weights));
        }
        v
    }
}

fn check_q(q: &Rational) -> Result<()> {
    if q.is_positive() && *q <= Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("q = {q} must lie in (0, 1]")))
    }
}

/// `∅` together with every subset of every minterm, ordered by size and then
/// canonically.
pub fn lp_support(fam: &MintermFamily, limit: usize) -> Result<Vec<ElementSet>> {
    let mut seen = BTreeSet::new();
    seen.insert(ElementSet::EMPTY);
    for m in fam.minterms() {
        for s in m.subsets() {
            seen.insert(s);
            if seen.len() > limit {
                return Err(Error::LpCapacity {
                    size: seen.len(),
                    limit,
                });
            }
        }
    }
    let mut support: Vec<ElementSet> = seen.into_iter().collect();
    support.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| canonical_cmp(a, b)));
    Ok(support)
}

pub fn fractional_expectation(fam: &MintermFamily, q: &Rational) -> Result<LpOutcome> {
    fractional_expectation_with(fam, q, DEFAULT_SUPPORT_LIMIT)
}

/// Solves the spread (dual) program
/// `max Σ ν(A)  s.t.  Σ_{A ⊇ B} ν(A) ≤ q^|B|` for every `B` in the support,
/// and reads the cover weights `β` off the optimal row multipliers.
/// Both certificates are re-checked against the raw constraints.
pub fn fractional_expectation_with(fam: &MintermFamily, q: &Rational, limit: usize) -> Result<LpOutcome> {
    check_q(q)?;
    let support = lp_support(fam, limit)?;
    let minterms = fam.minterms();
    let qpow = rational::powers(q, fam.k());
    let lp = StandardLp {
        objective: vec![Rational::one(); minterms.len()],
        rows: support
            .iter()
            .map(|b| {
                minterms
                    .iter()
                    .map(|a| if b.is_subset(*a) { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect(),
        rhs: support.iter().map(|b| qpow[b.len()].clone()).collect(),
    };
    let sol = lp.solve()?;

    let dual = DualWeighting {
        q: q.clone(),
        weights: minterms
            .iter()
            .zip(sol.x)
            .map(|(set, weight)| Weighted { set: *set, weight })
            .collect(),
        value: sol.value.clone(),
    };
    let weights: Vec<Weighted> = support
        .iter()
        .zip(sol.y)
        .filter(|(_, w)| !w.is_zero())
        .map(|(set, weight)| Weighted { set: *set, weight })
        .collect();
    let objective = weights.iter().map(|w| &w.weight * &qpow[w.set.len()]).sum();
    let primal = CoverWeighting {
        q: q.clone(),
        weights,
        objective,
    };

    let mut problems = check_cover(fam, &primal);
    problems.extend(check_spread(fam, &dual));
    if primal.objective != dual.value {
        problems.push(format!(
            "duality gap {} - {} is nonzero",
            primal.objective, dual.value
        ));
    }
    if !problems.is_empty() {
        return Err(Error::Inconsistent(problems.join("; ")));
    }
    Ok(LpOutcome {
        q: q.clone(),
        value: sol.value,
        primal,
        dual,
        support_size: support.len(),
        pivots: sol.pivots,
    })
}

pub fn dual_value(fam: &MintermFamily, q: &Rational) -> Result<DualWeighting> {
    fractional_expectation(fam, q).map(|o| o.dual)
}

/// Violations of `β ≥ 0`, `Σ_{B ⊆ A} β(B) ≥ 1` for every minterm `A`, and
/// of the reported objective.
pub fn check_cover(fam: &MintermFamily, beta: &CoverWeighting) -> Vec<String> {
    let mut problems = Vec::new();
    for w in &beta.weights {
        if w.weight.is_negative() {
            problems.push(format!("beta({}) = {} is negative", w.set, w.weight));
        }
    }
    for a in fam.minterms() {
        let covered: Rational = beta
            .weights
            .iter()
            .filter(|w| w.set.is_subset(*a))
            .map(|w| w.weight.clone())
            .sum();
        if covered < Rational::one() {
            problems.push(format!("minterm {a} is covered only {covered}"));
        }
    }
    let objective: Rational = beta
        .weights
        .iter()
        .map(|w| &w.weight * pow(&beta.q, w.set.len()))
        .sum();
    if objective != beta.objective {
        problems.push(format!("beta objective {objective} != reported {}", beta.objective));
    }
    problems
}

/// Violations of `ν ≥ 0` and `Σ_{A ⊇ B} ν(A) ≤ q^|B|` over every `B` below
/// a minterm, and of the reported value.
pub fn check_spread(fam: &MintermFamily, nu: &DualWeighting) -> Vec<String> {
    let mut problems = Vec::new();
    let mut load: HashMap<ElementSet, Rational> = HashMap::new();
    for w in &nu.weights {
        if w.weight.is_negative() {
            problems.push(format!("nu({}) = {} is negative", w.set, w.weight));
        }
        if !fam.minterms().contains(&w.set) {
            problems.push(format!("nu is supported on non-minterm {}", w.set));
        }
        for b in w.set.subsets() {
            *load.entry(b).or_insert_with(Rational::zero) += &w.weight;
        }
    }
    let mut keys: Vec<_> = load.keys().copied().collect();
    keys.sort();
    for b in keys {
        let cap = pow(&nu.q, b.len());
        if load[&b] > cap {
            problems.push(format!("spread constraint at {b}: {} > {cap}", load[&b]));
        }
    }
    let total: Rational = nu.weights.iter().map(|w| w.weight.clone()).sum();
    if total != nu.value {
        problems.push(format!("nu total {total} != reported {}", nu.value));
    }
    problems
}

/// Memoized `q ↦ E*_q` for one family.
pub struct ExpectationOracle<'a> {
    fam: &'a MintermFamily,
    limit: usize,
    cache: HashMap<Rational, Rational>,
}

impl<'a> ExpectationOracle<'a> {
    pub fn new(fam: &'a MintermFamily) -> Self {
        Self::with_limit(fam, DEFAULT_SUPPORT_LIMIT)
    }

    pub fn with_limit(fam: &'a MintermFamily, limit: usize) -> Self {
        ExpectationOracle {
            fam,
            limit,
            cache: HashMap::new(),
        }
    }

    pub fn family(&self) -> &MintermFamily {
        self.fam
    }

    pub fn value(&mut self, q: &Rational) -> Result<Rational> {
        if let Some(v) = self.cache.get(q) {
            return Ok(v.clone());
        }
        let v = fractional_expectation_with(self.fam, q, self.limit)?.value;
        self.cache.insert(q.clone(), v.clone());
        Ok(v)
    }

    /// Smallest `q` with `E*_q = x`, to within `2^-44`; the returned point
    /// satisfies `E*_q ≥ x` and `|E*_q - x| ≤ 1e-9`.
    pub fn inverse(&mut self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("x = {x} must lie in (0, 1]")));
        }
        if self.fam.is_trivial() {
            return Err(Error::UndefinedThreshold);
        }
        let target = from_f64(x)?;
        if target > self.value(&Rational::one())? {
            return Err(Error::UnreachableValue(x));
        }
        let q = self.lower_boundary(&target)?;
        let err = (to_f64(&self.value(&q)?) - x).abs();
        if err > INVERSE_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "inverse of E* at {x} missed by {err:e}"
            )));
        }
        Ok(to_f64(&q))
    }

    /// Bisection for the left end of `{q : E*_q ≥ target}`, keeping the
    /// right endpoint inside the set.
    fn lower_boundary(&mut self, target: &Rational) -> Result<Rational> {
        let two = int(2);
        let (mut lo, mut hi) = (Rational::zero(), Rational::one());
        for _ in 0..UNIT_SEARCH_DEPTH {
            let mid = (&lo + &hi) / &two;
            if self.value(&mid)? >= *target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// A dyadic `q` with `E*_q = 1` exactly, within `2^-44` of the smallest
    /// such `q`. `None` when `E*_1 < 1` or the family is trivial.
    pub fn unit_point(&mut self) -> Result<Option<Rational>> {
        if self.fam.is_trivial() || self.value(&Rational::one())? < Rational::one() {
            return Ok(None);
        }
        self.lower_boundary(&Rational::one()).map(Some)
    }
}

pub fn expectation_threshold_inverse(fam: &MintermFamily, x: f64) -> Result<f64> {
    ExpectationOracle::new(fam).inverse(x)
}

/// The weighted second-moment witness `g = Σ_A ν(A) p^-|A| 1{A ⊆ X}` built
/// from an optimal dual at `q`, with each upper bound of the chain
/// `E(g²) ≤ … ≤ L*_q (1+α)^k`, `α = q/p`, evaluated exactly.
#[derive(Debug, Clone)]
pub struct WeightedMoments {
    pub p: Rational,
    pub q: Rational,
    pub alpha: Rational,
    pub dual_value: Rational,
    pub first: Rational,
    pub second: Rational,
    /// `[Σ_I p^-|I| S(I)², Σ_i p^-i max S · Σ S, Σ_i α^i Σ_A ν(A) C(|A|,i),
    ///   Σ_A ν(A)(1+α)^|A|, L*_q (1+α)^k]` where `S(I) = Σ_{A ⊇ I} ν(A)`.
    pub chain: Vec<Rational>,
    pub bound: Rational,
    pub pz_bound: Option<Rational>,
}

impl WeightedMoments {
    pub fn first_matches_dual(&self) -> bool {
        self.first == self.dual_value
    }

    pub fn chain_holds(&self) -> bool {
        std::iter::once(&self.second)
            .chain(&self.chain)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] <= w[1])
    }
}

pub fn weighted_witness_moments(fam: &MintermFamily, p: &Rational, q: &Rational) -> Result<WeightedMoments> {
    check_q(p)?;
    let dual = dual_value(fam, q)?;
    weighted_moments_from_dual(fam, p, &dual)
}

pub fn weighted_moments_from_dual(fam: &MintermFamily, p: &Rational, dual: &DualWeighting) -> Result<WeightedMoments> {
    check_q(p)?;
    let q = &dual.q;
    let alpha = q / p;
    let k = fam.k();
    let inv_p = p.recip();
    let nu: Vec<&Weighted> = dual.weights.iter().filter(|w| !w.weight.is_zero()).collect();

    let first: Rational = nu
        .iter()
        .map(|w| &w.weight * pow(&inv_p, w.set.len()) * pow(p, w.set.len()))
        .sum();
    let mut second = Rational::zero();
    for a in &nu {
        for b in &nu {
            let e = pow(p, a.set.union(b.set).len());
            second += &a.weight * &b.weight * pow(&inv_p, a.set.len() + b.set.len()) * e;
        }
    }

    let mut load: HashMap<ElementSet, Rational> = HashMap::new();
    for w in &nu {
        for i in w.set.subsets() {
            *load.entry(i).or_insert_with(Rational::zero) += &w.weight;
        }
    }
    let line1: Rational = load
        .iter()
        .map(|(i, s)| pow(&inv_p, i.len()) * s * s)
        .sum();
    let mut max_by_size = vec![Rational::zero(); k + 1];
    let mut sum_by_size = vec![Rational::zero(); k + 1];
    for (i, s) in &load {
        sum_by_size[i.len()] += s;
        if *s > max_by_size[i.len()] {
            max_by_size[i.len()] = s.clone();
        }
    }
    let line2: Rational = (0..=k)
        .map(|i| pow(&inv_p, i) * &max_by_size[i] * &sum_by_size[i])
        .sum();
    let line3: Rational = (0..=k)
        .map(|i| {
            let inner: Rational = nu
                .iter()
                .map(|w| &w.weight * int(binomial(w.set.len() as u64, i as u64)))
                .sum();
            pow(&alpha, i) * inner
        })
        .sum();
    let one_plus = Rational::one() + &alpha;
    let line4: Rational = nu.iter().map(|w| &w.weight * pow(&one_plus, w.set.len())).sum();
    let bound = &dual.value * pow(&one_plus, k);
    let pz_bound = (!second.is_zero()).then(|| &first * &first / &second);
    Ok(WeightedMoments {
        p: p.clone(),
        q: q.clone(),
        alpha,
        dual_value: dual.value.clone(),
        first,
        second,
        chain: vec![line1, line2, line3, line4, bound.clone()],
        bound,
        pz_bound,
    })
}

/// `(E*_{αp} (1+α)^-k, E*_p)`, which bracket `μ_p`.
pub fn measure_bracket(fam: &MintermFamily, p: &Rational, alpha: &Rational) -> Result<(Rational, Rational)> {
    lp_bracket(&mut ExpectationOracle::new(fam), p, alpha)
}

pub fn lp_bracket(oracle: &mut ExpectationOracle<'_>, p: &Rational, alpha: &Rational) -> Result<(Rational, Rational)> {
    if !alpha.is_positive() {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    check_q(p)?;
    let scaled = alpha * p;
    if scaled > Rational::one() {
        return Err(Error::Domain(format!("alpha * p = {scaled} exceeds 1")));
    }
    let k = oracle.family().k();
    let lower = oracle.value(&scaled)? / pow(&(Rational::one() + alpha), k);
    let upper = oracle.value(p)?;
    Ok((lower, upper))
}

#[derive(Debug, Clone, PartialEq)]
pub enum KahnKalaiOutcome {
    NotApplicable(&'static str),
    Checked {
        q1: Rational,
        /// `min(k q1, 1)`.
        evaluated_at: Rational,
        clamped: bool,
        mu: Rational,
        pass: bool,
    },
}

/// Locates `q1` with `E*_{q1} = 1` and tests `μ_{min(k q1, 1)} > 1/e`.
pub fn kahn_kalai_check(fam: &MintermFamily) -> Result<KahnKalaiOutcome> {
    kahn_kalai_with(&mut ExpectationOracle::new(fam))
}

pub fn kahn_kalai_with(oracle: &mut ExpectationOracle<'_>) -> Result<KahnKalaiOutcome> {
    let fam = oracle.family().clone();
    if fam.is_empty() {
        return Ok(KahnKalaiOutcome::NotApplicable("empty family never reaches E* = 1"));
    }
    if fam.is_full() {
        return Ok(KahnKalaiOutcome::NotApplicable("full family has E* = 1 at every q"));
    }
    let Some(q1) = oracle.unit_point()? else {
        return Ok(KahnKalaiOutcome::NotApplicable("E*_1 < 1"));
    };
    let scaled = int(fam.k() as u64) * &q1;
    let clamped = scaled > Rational::one();
    let evaluated_at = if clamped { Rational::one() } else { scaled };
    let mu = measure::measure(&fam, &evaluated_at)?;
    let pass = to_f64(&mu) > (-1.0f64).exp();
    Ok(KahnKalaiOutcome::Checked {
        q1,
        evaluated_at,
        clamped,
        mu,
        pass,
    })
}

/// `k^k / (k-1)^(k-1)`; for `k = 1` the limit value 1.
pub fn ratio_upper_constant(k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let k = k as f64;
    k.powf(k) / (k - 1.0).powf(k - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioBounds {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `k = 1`: the upper constant is the `α → ∞` limit.
    pub limit_convention: bool,
}

/// `(a/b)^(1/k) - 1 ≤ p_a / p_b ≤ k^k/(k-1)^(k-1) · a/b`.
pub fn ratio_bounds_check(fam: &MintermFamily, a: f64, b: f64) -> Result<RatioBounds> {
    if fam.is_trivial() {
        return Err(Error::UndefinedThreshold);
    }
    ratio_bounds_from_polynomial(&measure::layer_counts(fam)?, fam.k(), a, b)
}

pub fn ratio_bounds_from_polynomial(poly: &MeasurePolynomial, k: usize, a: f64, b: f64) -> Result<RatioBounds> {
    if !(0.0 < b && b < a && a < 1.0) {
        return Err(Error::Domain(format!("need 0 < b < a < 1, got a = {a}, b = {b}")));
    }
    let ratio = poly.threshold_point(a)? / poly.threshold_point(b)?;
    let lower = (a / b).powf(1.0 / k as f64) - 1.0;
    let upper = ratio_upper_constant(k) * a / b;
    Ok(RatioBounds {
        a,
        b,
        ratio,
        lower,
        upper,
        lower_holds: lower <= ratio + THRESHOLD_COMPARE_TOLERANCE,
        upper_holds: ratio <= upper + THRESHOLD_COMPARE_TOLERANCE,
        limit_convention: k <= 1,
    })
}

/// `1 - 2ε (k-1)^(k-1) / k^k` with `0^0 = 1`.
pub fn delta_upper_bound(k: usize, eps: f64) -> f64 {
    let k = k.max(1) as f64;
    let c = if k == 1.0 { 1.0 } else { (k - 1.0).powf(k - 1.0) / k.powf(k) };
    1.0 - 2.0 * eps * c
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaUpperCheck {
    pub eps: f64,
    pub delta: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn delta_upper_check(fam: &MintermFamily, eps: f64) -> Result<DeltaUpperCheck> {
    let delta = measure::delta_eps(fam, eps)?;
    let bound = delta_upper_bound(fam.k(), eps);
    Ok(DeltaUpperCheck {
        eps,
        delta,
        bound,
        pass: delta <= bound + THRESHOLD_COMPARE_TOLERANCE,
    })
}

/// `(μ_q, E*_q, min(1, E_q[X]))`.
pub fn sandwich(oracle: &mut ExpectationOracle<'_>, q: &Rational) -> Result<(Rational, Rational, Rational)> {
    let fam = oracle.family().clone();
    let mu = measure::measure(&fam, q)?;
    let star = oracle.value(q)?;
    let cap = rational::min(Rational::one(), first_moment(&fam, q)?);
    Ok((mu, star, cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn set(v: &[usize]) -> ElementSet {
        ElementSet::from_indices(v.iter().copied())
    }

    fn f1() -> MintermFamily {
        MintermFamily::from_index_lists(3, &[vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn sing(n: usize) -> MintermFamily {
        let lists: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        MintermFamily::from_index_lists(n, &lists).unwrap()
    }

    fn single(n: usize, k: usize) -> MintermFamily {
        MintermFamily::from_index_lists(n, &[(0..k).collect()]).unwrap()
    }

    #[test]
    fn support_of_f1() {
        let s = lp_support(&f1(), 100).unwrap();
        assert_eq!(
            s,
            vec![set(&[]), set(&[0]), set(&[1]), set(&[2]), set(&[0, 1]), set(&[1, 2])]
        );
        assert!(matches!(lp_support(&f1(), 3), Err(Error::LpCapacity { .. })));
    }

    #[test]
    fn f1_quarter() {
        let out = fractional_expectation(&f1(), &ratio(1, 4)).unwrap();
        assert_eq!(out.value, ratio(1, 8));
        assert!(out.duality_gap().is_zero());
        assert_eq!(
            out.primal.weights,
            vec![
                Weighted { set: set(&[0, 1]), weight: int(1) },
                Weighted { set: set(&[1, 2]), weight: int(1) },
            ]
        );
        let nu: Vec<_> = out.dual.weights.iter().map(|w| w.weight.clone()).collect();
        assert_eq!(nu, vec![ratio(1, 16), ratio(1, 16)]);
    }

    #[test]
    fn single_minterm_value() {
        let q = ratio(2, 3);
        let out = fractional_expectation(&single(5, 3), &q).unwrap();
        assert_eq!(out.value, pow(&q, 3));
        assert_eq!(out.dual.weights[0].weight, pow(&q, 3));
    }

    #[test]
    fn singletons_value() {
        for (q, v) in [(ratio(1, 20), ratio(1, 2)), (ratio(1, 10), int(1)), (ratio(1, 3), int(1))] {
            let out = fractional_expectation(&sing(10), &q).unwrap();
            assert_eq!(out.value, v);
        }
        let dual = dual_value(&sing(10), &ratio(1, 20)).unwrap();
        assert!(dual.weights.iter().all(|w| w.weight == ratio(1, 20)));
    }

    #[test]
    fn trivial_families() {
        let e = MintermFamily::empty(2).unwrap();
        assert!(fractional_expectation(&e, &ratio(1, 2)).unwrap().value.is_zero());
        let full = MintermFamily::full(2).unwrap();
        assert!(fractional_expectation(&full, &ratio(1, 2)).unwrap().value.is_one());
        assert!(fractional_expectation(&f1(), &ratio(0, 1)).is_err());
    }

    #[test]
    fn checkers_reject_bad_certificates() {
        let out = fractional_expectation(&f1(), &ratio(1, 4)).unwrap();
        let mut beta = out.primal.clone();
        beta.weights.pop();
        assert!(!check_cover(&f1(), &beta).is_empty());
        let mut nu = out.dual.clone();
        nu.weights[0].weight = ratio(1, 8);
        nu.value = ratio(3, 16);
        assert!(!check_spread(&f1(), &nu).is_empty());
    }

    #[test]
    fn inverse_values() {
        let x = expectation_threshold_inverse(&single(4, 3), 0.2).unwrap();
        assert!((x - 0.2f64.powf(1.0 / 3.0)).abs() < 1e-8);
        let x = expectation_threshold_inverse(&sing(10), 1.0).unwrap();
        assert!((x - 0.1).abs() < 1e-9);
        let x = expectation_threshold_inverse(&f1(), 0.125).unwrap();
        assert!((x - 0.25).abs() < 1e-8);
        assert!(matches!(
            expectation_threshold_inverse(&MintermFamily::empty(2).unwrap(), 0.5),
            Err(Error::UndefinedThreshold)
        ));
    }

    #[test]
    fn weighted_moments_f1() {
        let w = weighted_witness_moments(&f1(), &ratio(1, 4), &ratio(1, 4)).unwrap();
        assert_eq!(w.first, ratio(1, 8));
        assert_eq!(w.second, ratio(5, 32));
        assert_eq!(w.bound, ratio(1, 2));
        assert_eq!(w.pz_bound, Some(ratio(1, 10)));
        assert!(w.first_matches_dual() && w.chain_holds());
    }

    #[test]
    fn weighted_moments_single() {
        let p = ratio(1, 3);
        let w = weighted_witness_moments(&single(4, 2), &p, &p).unwrap();
        assert_eq!(w.first, pow(&p, 2));
        assert_eq!(w.second, pow(&p, 4) / pow(&p, 2));
    }

    #[test]
    fn lp_brackets() {
        let (lo, hi) = measure_bracket(&f1(), &ratio(1, 2), &int(1)).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (ratio(1, 8), ratio(1, 2)));
        let (lo, hi) = measure_bracket(&sing(10), &ratio(1, 20), &int(1)).unwrap();
        assert_eq!((lo, hi), (ratio(1, 4), ratio(1, 2)));
        assert!(measure_bracket(&f1(), &ratio(3, 4), &int(2)).is_err());
    }

    #[test]
    fn kahn_kalai_cases() {
        match kahn_kalai_check(&sing(10)).unwrap() {
            KahnKalaiOutcome::Checked { q1, mu, pass, clamped, .. } => {
                assert!((to_f64(&q1) - 0.1).abs() < 1e-12);
                assert!((to_f64(&mu) - 0.651_321_559_9).abs() < 1e-9);
                assert!(pass && !clamped);
            }
            other => panic!("{other:?}"),
        }
        for fam in [single(3, 2), f1()] {
            match kahn_kalai_check(&fam).unwrap() {
                KahnKalaiOutcome::Checked { q1, mu, clamped, pass, .. } => {
                    assert!(q1.is_one() && mu.is_one() && clamped && pass);
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(matches!(
            kahn_kalai_check(&MintermFamily::full(2).unwrap()).unwrap(),
            KahnKalaiOutcome::NotApplicable(_)
        ));
    }

    #[test]
    fn ratio_bounds() {
        let r = ratio_bounds_check(&f1(), 0.5, 0.1).unwrap();
        assert!((r.ratio - 2.5056693699013537).abs() < 1e-9, "{}", r.ratio);
        assert!((r.lower - (5f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(r.upper, 20.0);
        assert!(r.lower_holds && r.upper_holds && !r.limit_convention);

        let r = ratio_bounds_check(&single(3, 2), 0.5, 0.2).unwrap();
        assert!((r.ratio - 2.5f64.sqrt()).abs() < 1e-12);

        let r = ratio_bounds_check(&sing(10), 0.5, 0.25).unwrap();
        let closed = (1.0 - 0.5f64.powf(0.1)) / (1.0 - 0.75f64.powf(0.1));
        assert!((r.ratio - closed).abs() < 1e-9, "{}", r.ratio);
        assert_eq!(r.upper, 2.0);
        assert!(r.limit_convention);
        // the limit constant is too small for several disjoint singletons
        assert!(!r.upper_holds);
    }

    #[test]
    fn delta_upper_bounds() {
        let c = delta_upper_check(&single(3, 2), 0.1).unwrap();
        assert!((c.delta - (1.0 - 0.2f64.sqrt())).abs() < 1e-9);
        assert!((c.bound - 0.95).abs() < 1e-15 && c.pass);
        let c = delta_upper_check(&f1(), 0.1).unwrap();
        assert!(c.pass && (c.delta - 0.6).abs() < 1e-3);
        let c = delta_upper_check(&sing(1), 0.1).unwrap();
        assert!((c.delta - 0.8).abs() < 1e-12 && (c.bound - 0.8).abs() < 1e-15 && c.pass);
    }
}
