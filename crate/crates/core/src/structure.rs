//! Tameness of monotone families, the first-moment lower bound for tame
//! families, and the iterative decomposition into a tame subfamily or a
//! tame lower-order approximation.
//!
//! Construction ([`decompose`]) counts supplements with a hash census over
//! minterm subsets; verification ([`is_tame`],
//! [`verify_tame_approximation`]) queries
//! [`MintermFamily::supplements`] directly and shares no counting code with
//! it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::{One, Signed};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::{canonical_cmp, MintermFamily};
use crate::measure;
use crate::moments::first_moment;
use crate::par::{map_collect, Execution};
use crate::rational::{self, int, pow, Rational};
use crate::set::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TamenessWitness {
    pub v: ElementSet,
    pub m: usize,
    pub count: usize,
}

impl fmt::Display for TamenessWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V = {} (m = {}, {} supplements)", self.v, self.m, self.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamenessReport {
    pub p: Rational,
    pub tame: bool,
    pub witness: Option<TamenessWitness>,
}

fn check_p(p: &Rational) -> Result<()> {
    if p.is_positive() && *p <= Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} must lie in (0, 1]")))
    }
}

/// `count ≥ p^-m`, exactly.
fn reaches(count: usize, p: &Rational, m: usize) -> bool {
    int(count as u64) * pow(p, m) >= Rational::one()
}

/// Tame at `p`: `|N^m(V)| < p^-m` for every `V` and `1 ≤ m ≤ k-1`.
///
/// Only `V` below some minterm can have supplements, so the scan runs over
/// those (with `∅` among them). The reported witness is the violation with
/// the smallest `m`, then the canonically smallest `V`.
pub fn is_tame(fam: &MintermFamily, p: &Rational) -> Result<TamenessReport> {
    check_p(p)?;
    let k = fam.k();
    let mut candidates = BTreeSet::new();
    for mt in fam.minterms() {
        for v in mt.subsets() {
            let m = mt.len() - v.len();
            if (1..k).contains(&m) {
                candidates.insert(v);
            }
        }
    }
    let mut candidates: Vec<ElementSet> = candidates.into_iter().collect();
    candidates.sort_by(canonical_cmp);
    let worst: Vec<Option<TamenessWitness>> = map_collect(Execution::Parallel, candidates.len(), |i| {
        let v = candidates[i];
        (1..k).find_map(|m| {
            let count = fam.supplements(v, m).len();
            reaches(count, p, m).then_some(TamenessWitness { v, m, count })
        })
    });
    let witness = worst
        .into_iter()
        .flatten()
        .min_by(|a, b| a.m.cmp(&b.m).then_with(|| canonical_cmp(&a.v, &b.v)));
    Ok(TamenessReport {
        p: p.clone(),
        tame: witness.is_none(),
        witness,
    })
}

/// `min{E_p[X], 1} / (k 2^k)`, a lower bound on `μ_p` for families tame at
/// `p`.
pub fn tame_lower_bound(fam: &MintermFamily, p: &Rational) -> Result<Rational> {
    let report = is_tame(fam, p)?;
    if let Some(witness) = report.witness {
        return Err(Error::NotTame { witness });
    }
    let k = fam.k().max(1);
    let first = first_moment(fam, p)?;
    Ok(rational::min(first, Rational::one()) / int((k as u64) << k))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ApproximationViolation {
    Precondition(String),
    TooFewSupplements { b: ElementSet, count: usize },
    SupplementsNotTame { b: ElementSet, witness: TamenessWitness },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationCheck {
    pub pass: bool,
    pub violations: Vec<ApproximationViolation>,
}

/// Checks that `candidate` is a tame `m`-approximation of `fam` at `p` with
/// witness subfamily `witness`: every minterm `B` of `candidate` has at
/// least `p^-m` supplements of size `m` in `witness`, and the family those
/// supplements span is tame at `p`.
pub fn verify_tame_approximation(
    fam: &MintermFamily,
    candidate: &MintermFamily,
    m: usize,
    p: &Rational,
    witness: &MintermFamily,
) -> Result<ApproximationCheck> {
    check_p(p)?;
    let mut violations = Vec::new();
    if m == 0 || m + 1 > fam.k() {
        violations.push(ApproximationViolation::Precondition(format!(
            "m = {m} outside 1..={}",
            fam.k().saturating_sub(1)
        )));
    }
    if witness.n() != fam.n() || !fam.has_minterms_of(witness) {
        violations.push(ApproximationViolation::Precondition(
            "witness is not a subfamily of the family".into(),
        ));
    }
    if candidate.n() != fam.n() {
        violations.push(ApproximationViolation::Precondition(
            "candidate lives on a different ground set".into(),
        ));
    }
    if !violations.is_empty() {
        return Ok(ApproximationCheck { pass: false, violations });
    }
    for &b in candidate.minterms() {
        let sup = witness.supplements(b, m);
        if !reaches(sup.len(), p, m) {
            violations.push(ApproximationViolation::TooFewSupplements { b, count: sup.len() });
            continue;
        }
        let spanned = MintermFamily::minimalize(sup, fam.n())?;
        if let Some(w) = is_tame(&spanned, p)?.witness {
            violations.push(ApproximationViolation::SupplementsNotTame { b, witness: w });
        }
    }
    Ok(ApproximationCheck {
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone)]
pub enum DecompositionCase {
    /// `𝒜_k`: tame at `p/2` and carrying at least half the measure.
    TameSubfamily {
        family: MintermFamily,
        measure: Rational,
        tameness: TamenessReport,
    },
    /// `𝓑_m` (minimalized) with witness `𝒜_m`.
    TameApproximation {
        m: usize,
        approximation: MintermFamily,
        witness: MintermFamily,
        measure: Rational,
        /// `μ_p(𝒜_m) - μ_p(𝒜_{m+1})`, which `measure` must dominate.
        measure_gap: Rational,
        check: ApproximationCheck,
    },
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub p: Rational,
    pub measure: Rational,
    /// `𝒜_1 ⊇ … ⊇ 𝒜_k`.
    pub chain: Vec<MintermFamily>,
    pub chain_measures: Vec<Rational>,
    /// `𝓑_1, …, 𝓑_{k-1}`, minimalized.
    pub bases: Vec<MintermFamily>,
    pub case: DecompositionCase,
}

/// Sets `V` with `|N^m(V)| ≥ threshold^-m`, counted by visiting every
/// `(|M| - m)`-subset of every minterm once.
fn heavy_sets(fam: &MintermFamily, m: usize, threshold: &Rational) -> Vec<ElementSet> {
    let mut counts: HashMap<ElementSet, usize> = HashMap::new();
    for mt in fam.minterms() {
        if mt.len() <= m {
            continue;
        }
        let want = mt.len() - m;
        for v in mt.subsets().filter(|v| v.len() == want) {
            *counts.entry(v).or_default() += 1;
        }
    }
    let mut heavy: Vec<ElementSet> = counts
        .into_iter()
        .filter(|(_, c)| reaches(*c, threshold, m))
        .map(|(v, _)| v)
        .collect();
    heavy.sort_by(canonical_cmp);
    heavy
}

/// Either a subfamily tame at `p/2` with `μ_p ≥ μ_p(𝒜)/2`, or some
/// `1 ≤ m ≤ k-1` and a tame `m`-approximation at `p/2` with
/// `μ_p ≥ μ_p(𝒜)/2^(m+1)`. Every certificate is re-verified before return.
pub fn decompose(fam: &MintermFamily, p: &Rational) -> Result<Decomposition> {
    check_p(p)?;
    let half = p / int(2);
    let k = fam.k();
    let n = fam.n();

    let mut chain = vec![fam.clone()];
    let mut bases = Vec::new();
    for m in 1..k {
        let current = chain.last().expect("chain starts nonempty");
        let heavy = heavy_sets(current, m, &half);
        let next = current.filter(|mt| !heavy.iter().any(|v| v.is_subset(*mt)));
        bases.push(MintermFamily::minimalize(heavy, n)?);
        chain.push(next);
    }

    let polys = chain
        .iter()
        .map(measure::layer_counts)
        .collect::<Result<Vec<_>>>()?;
    let chain_measures: Vec<Rational> = polys.iter().map(|poly| poly.eval(p)).collect();
    let total = chain_measures[0].clone();
    let last = chain.last().expect("nonempty").clone();
    let last_measure = chain_measures.last().expect("nonempty").clone();

    let case = if int(2) * &last_measure >= total {
        let tameness = is_tame(&last, &half)?;
        if !tameness.tame || !fam.has_minterms_of(&last) {
            return Err(Error::Inconsistent(format!(
                "final chain family fails its tameness certificate at p/2 = {half}: {:?}",
                tameness.witness
            )));
        }
        DecompositionCase::TameSubfamily {
            family: last,
            measure: last_measure,
            tameness,
        }
    } else {
        let m = (1..k)
            .find(|&m| {
                let gap = &chain_measures[m - 1] - &chain_measures[m];
                gap * int(1u64 << (m + 1)) >= total
            })
            .ok_or_else(|| {
                Error::Inconsistent("no chain step carries its share of the measure".into())
            })?;
        let approximation = bases[m - 1].clone();
        let witness = chain[m - 1].clone();
        let measure = measure::measure(&approximation, p)?;
        let measure_gap = &chain_measures[m - 1] - &chain_measures[m];
        let check = verify_tame_approximation(fam, &approximation, m, &half, &witness)?;
        let share = &total / int(1u64 << (m + 1));
        if !check.pass || measure < share || measure < measure_gap {
            return Err(Error::Inconsistent(format!(
                "approximation certificate failed at m = {m}: {:?}, measure {measure} vs share {share} and gap {measure_gap}",
                check.violations
            )));
        }
        DecompositionCase::TameApproximation {
            m,
            approximation,
            witness,
            measure,
            measure_gap,
            check,
        }
    };

    Ok(Decomposition {
        p: p.clone(),
        measure: total,
        chain,
        chain_measures,
        bases,
        case,
    })
}

impl Decomposition {
    pub fn to_json(&self) -> Value {
        let fam_json = |f: &MintermFamily| Value::from(f.index_lists());
        let chain: Vec<Value> = self
            .chain
            .iter()
            .zip(&self.chain_measures)
            .map(|(f, mu)| json!({"minterms": fam_json(f), "measure": rational::format(mu)}))
            .collect();
        let bases: Vec<Value> = self
            .bases
            .iter()
            .enumerate()
            .map(|(i, f)| json!({"m": i + 1, "minterms": fam_json(f)}))
            .collect();
        let mut v = json!({
            "p": rational::format(&self.p),
            "measure": rational::format(&self.measure),
            "chain": chain,
            "bases": bases,
        });
        match &self.case {
            DecompositionCase::TameSubfamily { family, measure, tameness } => {
                v["case"] = json!("tame_subfamily");
                v["family"] = json!({"minterms": fam_json(family), "measure": rational::format(measure)});
                v["certificate"] = json!({
                    "tame_at": rational::format(&tameness.p),
                    "status": if tameness.tame { "verified" } else { "failed" },
                });
            }
            DecompositionCase::TameApproximation { m, approximation, witness, measure, measure_gap, check } => {
                v["case"] = json!("tame_approximation");
                v["m"] = json!(m);
                v["family"] = json!({"minterms": fam_json(approximation), "measure": rational::format(measure)});
                v["witness"] = json!({"minterms": fam_json(witness)});
                v["measure_gap"] = json!(rational::format(measure_gap));
                v["certificate"] = json!({
                    "tame_at": rational::format(&(&self.p / int(2))),
                    "status": if check.pass { "verified" } else { "failed" },
                });
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalvingCheck {
    pub mu_p: Rational,
    pub mu_half: Rational,
    /// `μ_p / (k 2^(3k-1))`.
    pub structural_bound: Rational,
    /// `μ_p / 2^k`.
    pub ratio_bound: Rational,
    pub structural_holds: bool,
    pub ratio_holds: bool,
}

impl HalvingCheck {
    pub fn structural_margin(&self) -> Rational {
        &self.mu_half - &self.structural_bound
    }

    pub fn ratio_margin(&self) -> Rational {
        &self.mu_half - &self.ratio_bound
    }
}

pub fn halving_check(fam: &MintermFamily, p: &Rational) -> Result<HalvingCheck> {
    if !(p.is_positive() && *p < Rational::one()) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let poly = measure::layer_counts(fam)?;
    let k = fam.k().max(1);
    let mu_p = poly.eval(p);
    let mu_half = poly.eval(&(p / int(2)));
    let structural_bound = &mu_p / (int(k as u64) * pow(&int(2), 3 * k - 1));
    let ratio_bound = &mu_p / pow(&int(2), k);
    Ok(HalvingCheck {
        structural_holds: mu_half >= structural_bound,
        ratio_holds: mu_half >= ratio_bound,
        mu_p,
        mu_half,
        structural_bound,
        ratio_bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    NotApplicable(String),
    Checked {
        at: Rational,
        lhs: Rational,
        rhs: Rational,
        pass: bool,
    },
}

impl Clause {
    pub fn passes(&self) -> bool {
        !matches!(self, Clause::Checked { pass: false, .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TameAppCheck {
    /// `μ_{p/2}(𝒜) ≥ μ_p(𝒜) / (k 2^(2k))` when tame at `p/2`.
    pub clause1: Clause,
    /// `μ_{p/2}(𝒜) ≥ μ_{p/2}(𝓑) / (m 2^m)` for the tame `m`-approximation
    /// at `p/2` found by [`decompose`].
    pub clause2: Clause,
}

pub fn cor_tame_app_check(fam: &MintermFamily, p: &Rational) -> Result<TameAppCheck> {
    if !(p.is_positive() && *p < Rational::one()) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let half = p / int(2);
    let poly = measure::layer_counts(fam)?;
    let k = fam.k().max(1);
    let clause1 = if is_tame(fam, &half)?.tame {
        let lhs = poly.eval(&half);
        let rhs = poly.eval(p) / (int(k as u64) * pow(&int(2), 2 * k));
        Clause::Checked { at: half.clone(), pass: lhs >= rhs, lhs, rhs }
    } else {
        Clause::NotApplicable(format!("not tame at {half}"))
    };
    let clause2 = match decompose(fam, p)?.case {
        DecompositionCase::TameApproximation { m, approximation, check, .. } if check.pass => {
            let lhs = poly.eval(&half);
            let rhs = measure::layer_counts(&approximation)?.eval(&half) / int((m as u64) << m);
            Clause::Checked { at: half, pass: lhs >= rhs, lhs, rhs }
        }
        _ => Clause::NotApplicable("no tame approximation at p/2".into()),
    };
    Ok(TameAppCheck { clause1, clause2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use num::Zero;

    fn set(v: &[usize]) -> ElementSet {
        ElementSet::from_indices(v.iter().copied())
    }

    fn f1() -> MintermFamily {
        MintermFamily::from_index_lists(3, &[vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn star9() -> MintermFamily {
        let lists: Vec<Vec<usize>> = (1..9).map(|i| vec![0, i]).collect();
        MintermFamily::from_index_lists(9, &lists).unwrap()
    }

    fn single(n: usize, k: usize) -> MintermFamily {
        MintermFamily::from_index_lists(n, &[(0..k).collect()]).unwrap()
    }

    fn sing(n: usize) -> MintermFamily {
        let lists: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        MintermFamily::from_index_lists(n, &lists).unwrap()
    }

    #[test]
    fn tameness_f1() {
        assert!(is_tame(&f1(), &ratio(1, 4)).unwrap().tame);
        let r = is_tame(&f1(), &ratio(1, 2)).unwrap();
        assert!(!r.tame);
        assert_eq!(r.witness, Some(TamenessWitness { v: set(&[1]), m: 1, count: 2 }));
    }

    #[test]
    fn single_minterm_and_singletons_are_tame() {
        for p in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
            assert!(is_tame(&single(6, 4), &p).unwrap().tame);
            assert!(is_tame(&sing(8), &p).unwrap().tame);
        }
    }

    #[test]
    fn tame_bounds() {
        assert_eq!(tame_lower_bound(&f1(), &ratio(1, 4)).unwrap(), ratio(1, 64));
        let p = ratio(1, 3);
        assert_eq!(tame_lower_bound(&single(5, 3), &p).unwrap(), pow(&p, 3) / int(24));
        assert_eq!(tame_lower_bound(&sing(10), &ratio(1, 20)).unwrap(), ratio(1, 4));
        match tame_lower_bound(&f1(), &ratio(1, 2)) {
            Err(Error::NotTame { witness }) => assert_eq!(witness.v, set(&[1])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decompose_star() {
        let d = decompose(&star9(), &ratio(1, 2)).unwrap();
        match &d.case {
            DecompositionCase::TameApproximation { m, approximation, measure, check, .. } => {
                assert_eq!(*m, 1);
                assert_eq!(approximation.minterms(), &[set(&[0])]);
                assert_eq!(*measure, ratio(1, 2));
                assert!(check.pass);
            }
            other => panic!("{other:?}"),
        }
        assert!(d.chain[1].is_empty());
        assert!(d.chain_measures[1].is_zero());
    }

    #[test]
    fn decompose_case_one() {
        let d = decompose(&single(4, 3), &ratio(1, 2)).unwrap();
        assert!(matches!(d.case, DecompositionCase::TameSubfamily { .. }));
        let d = decompose(&f1(), &ratio(1, 4)).unwrap();
        match &d.case {
            DecompositionCase::TameSubfamily { family, measure, tameness } => {
                assert_eq!(family, &f1());
                assert_eq!(*measure, ratio(7, 64));
                assert_eq!(tameness.p, ratio(1, 8));
            }
            other => panic!("{other:?}"),
        }
        assert!(d.bases[0].is_empty());
    }

    #[test]
    fn approximation_verifier() {
        let star = star9();
        let b = MintermFamily::from_index_lists(9, &[vec![0]]).unwrap();
        assert!(verify_tame_approximation(&star, &b, 1, &ratio(1, 4), &star).unwrap().pass);

        let r = verify_tame_approximation(&f1(), &f1(), 2, &ratio(1, 4), &f1()).unwrap();
        assert!(matches!(r.violations[0], ApproximationViolation::Precondition(_)));

        let b = MintermFamily::from_index_lists(3, &[vec![1]]).unwrap();
        let r = verify_tame_approximation(&f1(), &b, 1, &ratio(2, 5), &f1()).unwrap();
        assert!(!r.pass);
        assert_eq!(
            r.violations,
            vec![ApproximationViolation::TooFewSupplements { b: set(&[1]), count: 2 }]
        );
    }

    #[test]
    fn halving() {
        let h = halving_check(&f1(), &ratio(1, 2)).unwrap();
        assert_eq!(h.mu_half, ratio(7, 64));
        assert_eq!(h.structural_bound, ratio(3, 512));
        assert!(h.structural_holds && h.ratio_holds);
        let p = ratio(2, 5);
        let h = halving_check(&single(5, 3), &p).unwrap();
        assert!(h.ratio_margin().is_zero());
        let h = halving_check(&star9(), &ratio(1, 2)).unwrap();
        assert!((rational::to_f64(&h.mu_half) - 0.2249).abs() < 1e-3);
    }

    #[test]
    fn tame_app_clauses() {
        let c = cor_tame_app_check(&f1(), &ratio(1, 2)).unwrap();
        assert_eq!(
            c.clause1,
            Clause::Checked { at: ratio(1, 4), lhs: ratio(7, 64), rhs: ratio(3, 256), pass: true }
        );
        let c = cor_tame_app_check(&star9(), &ratio(1, 2)).unwrap();
        match &c.clause2 {
            Clause::Checked { at, rhs, pass, .. } => assert!(*pass && *at == ratio(1, 4) && *rhs == ratio(1, 8)),
            other => panic!("{other:?}"),
        }
        let c = cor_tame_app_check(&single(4, 2), &ratio(1, 2)).unwrap();
        assert!(c.clause1.passes() && c.clause2.passes());
    }

    #[test]
    fn approximation_clause_fails_on_uniform_pairs() {
        // All 2-subsets of [5]: at p = 1/2 the decomposition picks every
        // singleton as a tame 1-approximation at 1/4, yet the bound for the
        // approximation does not hold there.
        let pairs: Vec<Vec<usize>> = (0..5).flat_map(|i| (i + 1..5).map(move |j| vec![i, j])).collect();
        let fam = MintermFamily::from_index_lists(5, &pairs).unwrap();
        let c = cor_tame_app_check(&fam, &ratio(1, 2)).unwrap();
        assert_eq!(
            c.clause2,
            Clause::Checked { at: ratio(1, 4), lhs: ratio(47, 128), rhs: ratio(781, 2048), pass: false }
        );
    }
}
