//! First and second moments of the minterm count `X` and the
//! Paley–Zygmund bound `E[X]² / E[X²] ≤ μ_p`.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::family::MintermFamily;
use crate::par::{fold_chunks, Execution};
use crate::rational::{int, is_probability, powers, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub p: Rational,
    pub first: Rational,
    pub second: Rational,
    /// Pairs `i = j`.
    pub diagonal: Rational,
    /// Pairs `i ≠ j` whose minterms intersect.
    pub overlapping: Rational,
    /// Pairs with disjoint minterms.
    pub disjoint: Rational,
    /// `None` when the first moment vanishes.
    pub pz_bound: Option<Rational>,
    /// `ℳ(m)` for `m = 0..=k`.
    pub histogram: Vec<u64>,
}

fn check_p(p: &Rational) -> Result<()> {
    if is_probability(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} must lie in [0, 1]")))
    }
}

/// `E_p[X] = Σ_M p^|M|`.
pub fn first_moment(fam: &MintermFamily, p: &Rational) -> Result<Rational> {
    check_p(p)?;
    let pw = powers(p, fam.k());
    Ok(fam
        .size_histogram()
        .iter()
        .enumerate()
        .map(|(m, &c)| int(c) * &pw[m])
        .sum())
}

/// Same as [`first_moment`] for irrational `p`.
pub fn first_moment_f64(fam: &MintermFamily, p: f64) -> f64 {
    fam.size_histogram()
        .iter()
        .enumerate()
        .map(|(m, &c)| c as f64 * p.powi(m as i32))
        .sum()
}

pub fn second_moment(fam: &MintermFamily, p: &Rational) -> Result<MomentReport> {
    second_moment_with(fam, p, Execution::Parallel)
}

/// Exact `E[X²] = Σ_{i,j} p^|M_i ∪ M_j|` split into the diagonal,
/// overlapping and disjoint parts.
pub fn second_moment_with(fam: &MintermFamily, p: &Rational, exec: Execution) -> Result<MomentReport> {
    check_p(p)?;
    let k = fam.k();
    let minterms = fam.minterms();
    let width = 2 * k + 1;
    // union-size histograms: [overlapping | disjoint]
    let counts = fold_chunks(
        exec,
        minterms.len() as u64,
        16,
        || vec![0u64; 2 * width],
        |mut acc, range| {
            for i in range {
                let a = minterms[i as usize];
                for (j, b) in minterms.iter().enumerate() {
                    if j == i as usize {
                        continue;
                    }
                    let u = a.union(*b).len();
                    if a.is_disjoint(*b) {
                        acc[width + u] += 1;
                    } else {
                        acc[u] += 1;
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
    let pw = powers(p, 2 * k);
    let weigh = |hist: &[u64]| -> Rational {
        hist.iter().enumerate().map(|(u, &c)| int(c) * &pw[u]).sum()
    };
    let first = first_moment(fam, p)?;
    let overlapping = weigh(&counts[..width]);
    let disjoint = weigh(&counts[width..]);
    let diagonal = first.clone();
    let second = &diagonal + &overlapping + &disjoint;
    let pz_bound = (!first.is_zero()).then(|| &first * &first / &second);
    Ok(MomentReport {
        p: p.clone(),
        first,
        second,
        diagonal,
        overlapping,
        disjoint,
        pz_bound,
        histogram: fam.size_histogram(),
    })
}

pub fn paley_zygmund_bound(fam: &MintermFamily, p: &Rational) -> Result<Rational> {
    second_moment(fam, p)?
        .pz_bound
        .ok_or(Error::UndefinedBound("first moment is zero"))
}

/// `((k-1)2^k + 1) E[X] + E[X]²`, the second-moment ceiling that holds for
/// families tame at `p`.
pub fn tame_second_moment_ceiling(k: usize, first: &Rational) -> Rational {
    let c = int(((k.max(1) - 1) as u64) << k) + Rational::one();
    c * first + first * first
}
