//! Verification ledger: every threshold identity and inequality checked on
//! concrete instances, one record per comparison, serialized to JSON and
//! re-checkable from the file alone.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::family::MintermFamily;
use crate::generators::{gen_graph, GraphSpec, Pattern};
use crate::lp::{self, ExpectationOracle, KahnKalaiOutcome, DEFAULT_SUPPORT_LIMIT, THRESHOLD_COMPARE_TOLERANCE};
use crate::measure::{self, EnumConfig};
use crate::moments::first_moment_f64;
use crate::par::{map_collect, Execution};
use crate::rational::{binomial, int, ratio, to_f64, Rational};
use crate::structure::{self, Clause, DecompositionCase};
use crate::suite::Instance;

pub const LEDGER_SCHEMA: u32 = 1;

/// Check names with the statement each one tests.
pub const CHECKS: &[(&str, &str)] = &[
    ("margulis_russo", "p times the derivative of the measure equals the expected number of pivotal elements"),
    ("ratio_monotone", "mu_p / p^k is nonincreasing in p (constant for a single minterm)"),
    ("delta_lower", "delta_eps >= 1 - (2 eps)^(1/k)"),
    ("delta_tight", "delta_eps = 1 - (2 eps)^(1/k) for a single minterm"),
    ("delta_upper", "delta_eps <= 1 - 2 eps (k-1)^(k-1) / k^k, with 0^0 = 1"),
    ("lp_duality", "fractional cover and spread LP optima coincide"),
    ("lp_certificate", "optimal cover and spread weightings satisfy the raw constraints"),
    ("sandwich_lower", "mu_q <= E*_q"),
    ("sandwich_upper", "E*_q <= min(1, E_q[X])"),
    ("bracket_lower", "E*_(alpha p) (1 + alpha)^-k <= mu_p"),
    ("bracket_upper", "mu_p <= E*_p"),
    ("weighted_first", "E_p(g) equals the spread LP value at q = alpha p"),
    ("weighted_chain", "each bound in the second-moment chain for g dominates the previous one"),
    ("weighted_pz", "E_p(g)^2 / E_p(g^2) <= mu_p"),
    ("kahn_kalai", "mu at min(k q1, 1) exceeds 1/e, where E*_(q1) = 1"),
    ("ratio_corollary_lower", "(a/b)^(1/k) - 1 <= p_a / p_b"),
    ("ratio_corollary_upper", "p_a / p_b <= k^k / (k-1)^(k-1) * a/b"),
    ("tame_lower_bound", "a family tame at p has mu_p >= min(E_p[X], 1) / (k 2^k)"),
    ("decomposition_share", "the decomposition output carries its share of the measure"),
    ("decomposition_certificate", "the decomposition certificate re-verifies with no violations"),
    ("halving_structural", "mu_(p/2) >= mu_p / (k 2^(3k-1))"),
    ("halving_ratio", "mu_(p/2) >= mu_p / 2^k"),
    ("tame_app_tame", "a family tame at p/2 has mu_(p/2) >= mu_p / (k 2^(2k))"),
    ("tame_app_approximation", "mu(A) >= mu(B) / (m 2^m) for a tame m-approximation B"),
    ("monte_carlo", "|estimate - exact| <= 4 sqrt(mu (1 - mu) / S)"),
    ("graph_first_moment", "expected K4 count in G(m, m^(-2/3)) equals C(m,4) m^-4"),
    ("graph_first_moment_range", "expected K4 count in G(m, m^(-2/3)) lies in [0.001, 1/24]"),
    ("graph_containment", "every K4-with-tail copy contains a K4 copy"),
    ("error", "the check ran to completion"),
];

pub fn statement(check: &str) -> Option<&'static str> {
    CHECKS.iter().find(|(name, _)| *name == check).map(|(_, s)| *s)
}

/// 17 points: 1/32 and j/16 for j = 1..16.
pub fn ratio_grid() -> Vec<Rational> {
    std::iter::once(ratio(1, 32)).chain((1..=16).map(|j| ratio(j, 16))).collect()
}

/// j/10 for j = 1..9.
pub fn p_grid() -> Vec<Rational> {
    (1..=9).map(|j| ratio(j, 10)).collect()
}

pub const EPSILONS: [f64; 3] = [0.01, 0.05, 0.1];
pub const RATIO_PAIRS: [(f64, f64); 2] = [(0.5, 0.1), (0.5, 0.25)];
pub const MR_POINTS: [(i64, i64); 3] = [(1, 4), (1, 2), (3, 4)];

/// `1/2, 1, 2`, and `1/(k-1)` when `k ≥ 2`.
pub fn alphas(k: usize) -> Vec<Rational> {
    let mut out = vec![ratio(1, 2), ratio(1, 1), ratio(2, 1)];
    if k >= 2 {
        let extra = ratio(1, k as i64 - 1);
        if !out.contains(&extra) {
            out.push(extra);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(Rational),
    Float(f64),
}

impl Num {
    fn as_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => to_f64(r),
            Num::Float(x) => *x,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Num::Exact(r) => Value::String(fraction(r)),
            Num::Float(x) => json!(x),
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_fraction(s).map(Num::Exact),
            Value::Number(x) => x.as_f64().map(Num::Float),
            _ => None,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(r) => f.write_str(&fraction(r)),
            Num::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `num/den`, always with a denominator.
pub fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_fraction(s: &str) -> Option<Rational> {
    let (num, den) = s.split_once('/')?;
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    (!den.is_zero()).then(|| Rational::new(num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Relation::Eq, Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt]
            .into_iter()
            .find(|r| r.symbol() == s)
    }
}

/// Signed slack and verdict. The margin is oriented so that larger is
/// better: `rhs - lhs` for `<`/`<=`, `lhs - rhs` for `>`/`>=`, and
/// `-|lhs - rhs|` for `==`. Exact operands are compared exactly; a float on
/// either side switches to `f64` with the given tolerance.
pub fn evaluate(lhs: &Num, relation: Relation, rhs: &Num, tolerance: f64) -> (Num, bool) {
    match (lhs, rhs) {
        (Num::Exact(a), Num::Exact(b)) => {
            let margin = match relation {
                Relation::Le | Relation::Lt => b - a,
                Relation::Ge | Relation::Gt => a - b,
                Relation::Eq => -(a - b).abs(),
            };
            let pass = match relation {
                Relation::Lt | Relation::Gt => margin.is_positive(),
                _ => !margin.is_negative(),
            };
            (Num::Exact(margin), pass)
        }
        _ => {
            let (a, b) = (lhs.as_f64(), rhs.as_f64());
            let margin = match relation {
                Relation::Le | Relation::Lt => b - a,
                Relation::Ge | Relation::Gt => a - b,
                Relation::Eq => -(a - b).abs(),
            };
            let pass = match relation {
                Relation::Lt | Relation::Gt => margin > 0.0,
                _ => margin >= -tolerance,
            };
            (Num::Float(margin), pass)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub check: String,
    pub statement: String,
    pub instance: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: Option<Num>,
    pub rhs: Option<Num>,
    pub relation: Relation,
    pub tolerance: f64,
    pub margin: Option<Num>,
    pub pass: bool,
    pub flag: Option<String>,
}

impl Record {
    pub fn to_json(&self) -> Value {
        let opt = |n: &Option<Num>| n.as_ref().map_or(Value::Null, Num::to_json);
        json!({
            "check": self.check,
            "statement": self.statement,
            "instance": self.instance,
            "params": self.params,
            "lhs": opt(&self.lhs),
            "relation": self.relation.symbol(),
            "rhs": opt(&self.rhs),
            "tolerance": self.tolerance,
            "margin": opt(&self.margin),
            "pass": self.pass,
            "flag": self.flag,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Malformed(format!("ledger record: bad or missing `{what}`"));
        let text = |key: &str| v.get(key).and_then(Value::as_str).map(str::to_owned).ok_or_else(|| bad(key));
        let num = |key: &str| match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => Num::from_json(x).map(Some).ok_or_else(|| bad(key)),
        };
        let params = match v.get("params") {
            Some(Value::Object(m)) => m.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            _ => return Err(bad("params")),
        };
        Ok(Record {
            check: text("check")?,
            statement: text("statement")?,
            instance: text("instance")?,
            params,
            lhs: num("lhs")?,
            rhs: num("rhs")?,
            relation: Relation::parse(&text("relation")?).ok_or_else(|| bad("relation"))?,
            tolerance: v.get("tolerance").and_then(Value::as_f64).ok_or_else(|| bad("tolerance"))?,
            margin: num("margin")?,
            pass: v.get("pass").and_then(Value::as_bool).ok_or_else(|| bad("pass"))?,
            flag: match v.get("flag") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                _ => return Err(bad("flag")),
            },
        })
    }

    /// Recomputes the verdict from the stored operands.
    pub fn recompute(&self) -> Option<(Num, bool)> {
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => Some(evaluate(l, self.relation, r, self.tolerance)),
            _ => None,
        }
    }
}

type Params = Vec<(&'static str, Value)>;

fn rat(r: &Rational) -> Value {
    Value::String(fraction(r))
}

struct Sink<'a> {
    instance: &'a str,
    records: Vec<Record>,
}

#[allow(clippy::too_many_arguments)]
impl<'a> Sink<'a> {
    fn new(instance: &'a str) -> Self {
        Self { instance, records: Vec::new() }
    }

    fn push(&mut self, check: &str, params: Params, lhs: Num, relation: Relation, rhs: Num, tolerance: f64, flag: Option<String>) {
        let (margin, pass) = evaluate(&lhs, relation, &rhs, tolerance);
        self.records.push(Record {
            check: check.into(),
            statement: statement(check).unwrap_or_default().into(),
            instance: self.instance.into(),
            params: params.into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            relation,
            tolerance,
            margin: Some(margin),
            pass,
            flag,
        });
    }

    fn exact(&mut self, check: &str, params: Params, lhs: Rational, relation: Relation, rhs: Rational) {
        self.push(check, params, Num::Exact(lhs), relation, Num::Exact(rhs), 0.0, None);
    }

    fn float(&mut self, check: &str, params: Params, lhs: f64, relation: Relation, rhs: f64, tolerance: f64, flag: Option<String>) {
        self.push(check, params, Num::Float(lhs), relation, Num::Float(rhs), tolerance, flag);
    }

    fn error(&mut self, check: &str, err: Error) {
        self.records.push(Record {
            check: "error".into(),
            statement: statement("error").unwrap_or_default().into(),
            instance: self.instance.into(),
            params: BTreeMap::from([("section".to_owned(), json!(check))]),
            lhs: None,
            rhs: None,
            relation: Relation::Eq,
            tolerance: 0.0,
            margin: None,
            pass: false,
            flag: Some(err.to_string()),
        });
    }

    fn section(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.error(name, e);
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub monte_carlo_samples: u64,
    pub monte_carlo_seed: u64,
    /// Largest ground set for the Monte Carlo comparison.
    pub monte_carlo_max_n: usize,
    pub support_limit: usize,
    pub enumeration: EnumConfig,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            monte_carlo_samples: 20_000,
            monte_carlo_seed: 0x5eed,
            monte_carlo_max_n: 15,
            support_limit: DEFAULT_SUPPORT_LIMIT,
            enumeration: EnumConfig::default(),
            exec: Execution::Parallel,
        }
    }
}

/// All per-instance checks, in a fixed order.
pub fn verify_instance(inst: &Instance, cfg: &VerifyConfig) -> Vec<Record> {
    let fam = &inst.family;
    let mut sink = Sink::new(&inst.id);
    if fam.is_trivial() {
        sink.error("instance", Error::UndefinedThreshold);
        return sink.records;
    }
    let census = match measure::census_with(fam, &cfg.enumeration) {
        Ok(c) => c,
        Err(e) => {
            sink.error("instance", e);
            return sink.records;
        }
    };
    let poly = &census.polynomial;
    let k = fam.k();
    let single = fam.len() == 1;
    let mu = |p: &Rational| poly.eval(p);

    sink.section("margulis_russo", |s| {
        for (a, b) in MR_POINTS {
            let p = ratio(a, b);
            let lhs = &p * poly.derivative(&p);
            let rhs = census.pivotal.profile(&p).expected_pivotal;
            s.exact("margulis_russo", vec![("p", rat(&p))], lhs, Relation::Eq, rhs);
        }
        Ok(())
    });

    sink.section("ratio_monotone", |s| {
        let grid = ratio_grid();
        let check = measure::monotone_ratio_check(fam, &grid)?;
        let rel = if single { Relation::Eq } else { Relation::Le };
        for i in 1..grid.len() {
            s.exact(
                "ratio_monotone",
                vec![("p", rat(&grid[i])), ("previous_p", rat(&grid[i - 1]))],
                check.ratios[i].clone(),
                rel,
                check.ratios[i - 1].clone(),
            );
        }
        Ok(())
    });

    sink.section("delta", |s| {
        for eps in EPSILONS {
            let delta = measure::delta_from_polynomial(poly, eps)?;
            let lower = 1.0 - (2.0 * eps).powf(1.0 / k as f64);
            let params = || vec![("eps", json!(eps)), ("k", json!(k))];
            s.float("delta_lower", params(), delta, Relation::Ge, lower, THRESHOLD_COMPARE_TOLERANCE, None);
            if single {
                s.float("delta_tight", params(), delta, Relation::Eq, lower, THRESHOLD_COMPARE_TOLERANCE, None);
            }
            let upper = lp::delta_upper_bound(k, eps);
            let flag = (k == 1).then(|| "zero_power_convention".to_owned());
            s.float("delta_upper", params(), delta, Relation::Le, upper, THRESHOLD_COMPARE_TOLERANCE, flag);
        }
        Ok(())
    });

    sink.section("ratio_corollary", |s| {
        for (a, b) in RATIO_PAIRS {
            let r = lp::ratio_bounds_from_polynomial(poly, k, a, b)?;
            let params = || vec![("a", json!(a)), ("b", json!(b)), ("k", json!(k))];
            let flag = r.limit_convention.then(|| "limit_constant".to_owned());
            s.float("ratio_corollary_lower", params(), r.ratio, Relation::Ge, r.lower, THRESHOLD_COMPARE_TOLERANCE, flag.clone());
            s.float("ratio_corollary_upper", params(), r.ratio, Relation::Le, r.upper, THRESHOLD_COMPARE_TOLERANCE, flag);
        }
        Ok(())
    });

    let mut oracle = ExpectationOracle::with_limit(fam, cfg.support_limit);
    let grid = p_grid();

    sink.section("lp", |s| {
        for q in &grid {
            let out = lp::fractional_expectation_with(fam, q, cfg.support_limit)?;
            let params = || vec![("q", rat(q)), ("support", json!(out.support_size))];
            s.exact("lp_duality", params(), out.primal.objective.clone(), Relation::Eq, out.dual.value.clone());
            let violations = lp::check_cover(fam, &out.primal).len() + lp::check_spread(fam, &out.dual).len();
            s.exact("lp_certificate", params(), int(violations as u64), Relation::Eq, Rational::zero());
            let (m, star, cap) = lp::sandwich(&mut oracle, q)?;
            s.exact("sandwich_lower", vec![("q", rat(q))], m, Relation::Le, star.clone());
            s.exact("sandwich_upper", vec![("q", rat(q))], star, Relation::Le, cap);
        }
        Ok(())
    });

    sink.section("bracket", |s| {
        for p in &grid {
            let mu_p = mu(p);
            s.exact("bracket_upper", vec![("p", rat(p))], mu_p.clone(), Relation::Le, oracle.value(p)?);
            for alpha in alphas(k) {
                if &alpha * p > Rational::one() {
                    continue;
                }
                let (lower, _) = lp::lp_bracket(&mut oracle, p, &alpha)?;
                s.exact("bracket_lower", vec![("p", rat(p)), ("alpha", rat(&alpha))], lower, Relation::Le, mu_p.clone());
            }
        }
        Ok(())
    });

    sink.section("weighted", |s| {
        for p in &grid {
            for alpha in alphas(k) {
                let q = &alpha * p;
                if q > Rational::one() {
                    continue;
                }
                let w = lp::weighted_witness_moments(fam, p, &q)?;
                let params = || vec![("p", rat(p)), ("alpha", rat(&alpha))];
                s.exact("weighted_first", params(), w.first.clone(), Relation::Eq, w.dual_value.clone());
                let steps: Vec<&Rational> = std::iter::once(&w.second).chain(&w.chain).collect();
                for (i, pair) in steps.windows(2).enumerate() {
                    let mut ps = params();
                    ps.push(("step", json!(i)));
                    s.exact("weighted_chain", ps, pair[0].clone(), Relation::Le, pair[1].clone());
                }
                if let Some(pz) = w.pz_bound {
                    s.exact("weighted_pz", params(), pz, Relation::Le, mu(p));
                }
            }
        }
        Ok(())
    });

    sink.section("kahn_kalai", |s| {
        if let KahnKalaiOutcome::Checked { q1, evaluated_at, clamped, mu, .. } = lp::kahn_kalai_with(&mut oracle)? {
            s.push(
                "kahn_kalai",
                vec![("q1", rat(&q1)), ("evaluated_at", rat(&evaluated_at))],
                Num::Exact(mu),
                Relation::Gt,
                Num::Float((-1.0f64).exp()),
                0.0,
                clamped.then(|| "clamped_to_one".to_owned()),
            );
        }
        Ok(())
    });

    sink.section("structure", |s| {
        for p in &grid {
            let half = p / int(2);
            let mu_p = mu(p);
            if structure::is_tame(fam, p)?.tame {
                let bound = structure::tame_lower_bound(fam, p)?;
                s.exact("tame_lower_bound", vec![("p", rat(p))], mu_p.clone(), Relation::Ge, bound);
            }

            let d = structure::decompose(fam, p)?;
            match &d.case {
                DecompositionCase::TameSubfamily { family, measure, .. } => {
                    let params = || vec![("p", rat(p)), ("case", json!(1))];
                    s.exact("decomposition_share", params(), measure.clone(), Relation::Ge, &mu_p / int(2));
                    let tame = structure::is_tame(family, &half)?;
                    let violations = usize::from(!tame.tame) + usize::from(!fam.has_minterms_of(family));
                    s.exact("decomposition_certificate", params(), int(violations as u64), Relation::Eq, Rational::zero());
                }
                DecompositionCase::TameApproximation { m, approximation, witness, measure, .. } => {
                    let params = || vec![("p", rat(p)), ("case", json!(2)), ("m", json!(m))];
                    let share = &mu_p / int(1u64 << (m + 1));
                    s.exact("decomposition_share", params(), measure.clone(), Relation::Ge, share);
                    let check = structure::verify_tame_approximation(fam, approximation, *m, &half, witness)?;
                    s.exact(
                        "decomposition_certificate",
                        params(),
                        int(check.violations.len() as u64),
                        Relation::Eq,
                        Rational::zero(),
                    );
                }
            }

            let h = structure::halving_check(fam, p)?;
            s.exact("halving_structural", vec![("p", rat(p))], h.mu_half.clone(), Relation::Ge, h.structural_bound);
            s.exact("halving_ratio", vec![("p", rat(p))], h.mu_half, Relation::Ge, h.ratio_bound);

            let c = structure::cor_tame_app_check(fam, p)?;
            if let Clause::Checked { at, lhs, rhs, .. } = c.clause1 {
                s.exact("tame_app_tame", vec![("p", rat(p)), ("at", rat(&at))], lhs, Relation::Ge, rhs);
            }
            if let Clause::Checked { at, lhs, rhs, .. } = c.clause2 {
                s.exact("tame_app_approximation", vec![("p", rat(p)), ("at", rat(&at))], lhs, Relation::Ge, rhs);
            }
        }
        Ok(())
    });

    if fam.n() <= cfg.monte_carlo_max_n {
        sink.section("monte_carlo", |s| {
            monte_carlo_records(s, fam, cfg, &[ratio(1, 4), ratio(1, 2)], poly)
        });
    }
    sink.records
}

fn monte_carlo_records(
    s: &mut Sink<'_>,
    fam: &MintermFamily,
    cfg: &VerifyConfig,
    points: &[Rational],
    poly: &measure::MeasurePolynomial,
) -> Result<()> {
    for p in points {
        let exact = to_f64(&poly.eval(p));
        let samples = cfg.monte_carlo_samples;
        let est = measure::estimate_measure_with(fam, to_f64(p), samples, cfg.monte_carlo_seed, cfg.exec)?;
        let bound = 4.0 * (exact * (1.0 - exact) / samples as f64).sqrt();
        s.float(
            "monte_carlo",
            vec![("p", rat(p)), ("samples", json!(samples)), ("seed", json!(cfg.monte_carlo_seed))],
            (est.mean - exact).abs(),
            Relation::Le,
            bound,
            0.0,
            None,
        );
    }
    Ok(())
}

/// Subgraph-count checks on `K_m` host graphs; independent of any instance.
pub fn graph_records() -> Vec<Record> {
    let mut sink = Sink::new("k4_in_km");
    sink.section("graph", |s| {
        for m in 6..=12usize {
            let fam = gen_graph(&GraphSpec { m, pattern: Pattern::K4 })?;
            let p = (m as f64).powf(-2.0 / 3.0);
            let e = first_moment_f64(&fam, p);
            let closed = binomial(m as u64, 4) as f64 / (m as f64).powi(4);
            let params = || vec![("m", json!(m)), ("p", json!(p))];
            s.float("graph_first_moment", params(), e, Relation::Eq, closed, 1e-12, None);
            s.float("graph_first_moment_range", params(), e, Relation::Ge, 0.001, 0.0, None);
            s.float("graph_first_moment_range", params(), e, Relation::Le, 1.0 / 24.0, 0.0, None);
        }
        for m in 5..=8usize {
            let tail = gen_graph(&GraphSpec { m, pattern: Pattern::K4Tail })?;
            let k4 = gen_graph(&GraphSpec { m, pattern: Pattern::K4 })?;
            let missing = tail.minterms().iter().filter(|t| !k4.contains(**t)).count();
            s.exact("graph_containment", vec![("m", json!(m))], int(missing as u64), Relation::Eq, Rational::zero());
        }
        Ok(())
    });
    sink.records
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
}

impl Ledger {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn tally(&self) -> BTreeMap<String, Tally> {
        let mut out: BTreeMap<String, Tally> = BTreeMap::new();
        for r in &self.records {
            let t = out.entry(r.check.clone()).or_default();
            if r.pass {
                t.pass += 1;
            } else {
                t.fail += 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let summary: Map<String, Value> = self
            .tally()
            .into_iter()
            .map(|(k, t)| (k, json!({"pass": t.pass, "fail": t.fail})))
            .collect();
        json!({
            "schema": LEDGER_SCHEMA,
            "all_pass": self.all_pass(),
            "summary": summary,
            "records": self.records.iter().map(Record::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        if v.get("schema").and_then(Value::as_u64) != Some(LEDGER_SCHEMA as u64) {
            return Err(Error::Malformed(format!("ledger schema must be {LEDGER_SCHEMA}")));
        }
        let records = v
            .get("records")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("ledger has no `records` array".into()))?
            .iter()
            .map(Record::from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(Ledger { records })
    }

    /// Problems found when re-deriving every verdict from the stored
    /// operands. Empty iff the ledger is internally consistent and every
    /// record passes.
    pub fn recheck(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            let at = format!("record {i} ({} on {})", r.check, r.instance);
            if statement(&r.check).is_none() {
                problems.push(format!("{at}: unknown check"));
            }
            match r.recompute() {
                None if r.pass => problems.push(format!("{at}: passes without operands")),
                None => problems.push(format!("{at}: failed: {}", r.flag.as_deref().unwrap_or("no detail"))),
                Some((margin, pass)) => {
                    if pass != r.pass {
                        problems.push(format!("{at}: stored verdict {} but operands give {}", r.pass, pass));
                    }
                    if !margin_matches(&margin, r.margin.as_ref()) {
                        problems.push(format!("{at}: stored margin does not match operands"));
                    }
                    if !pass {
                        problems.push(format!(
                            "{at}: {} {} {} fails",
                            r.lhs.as_ref().expect("operands present"),
                            r.relation.symbol(),
                            r.rhs.as_ref().expect("operands present")
                        ));
                    }
                }
            }
        }
        problems
    }
}

fn margin_matches(fresh: &Num, stored: Option<&Num>) -> bool {
    match (fresh, stored) {
        (Num::Exact(a), Some(Num::Exact(b))) => a == b,
        (Num::Float(a), Some(Num::Float(b))) => a == b || (a.is_nan() && b.is_nan()),
        _ => false,
    }
}

/// Runs every instance (in parallel when enabled) followed by the graph
/// checks.
pub fn verify_suite(instances: &[Instance], cfg: &VerifyConfig, include_graphs: bool) -> Ledger {
    let per: Vec<Vec<Record>> = map_collect(cfg.exec, instances.len(), |i| verify_instance(&instances[i], cfg));
    let mut records: Vec<Record> = per.into_iter().flatten().collect();
    if include_graphs {
        records.extend(graph_records());
    }
    Ledger { records }
}

/// Checks whose name begins with any of `prefixes` and that have at least
/// one record; used to confirm a run covered every check family.
pub fn covered(ledger: &Ledger, prefixes: &[&str]) -> Vec<String> {
    prefixes
        .iter()
        .filter(|p| !ledger.records.iter().any(|r| r.check.starts_with(**p)))
        .map(|p| p.to_string())
        .collect()
}

pub fn float_of(n: &Num) -> f64 {
    n.as_f64()
}

pub fn exact_of(n: &Num) -> Option<&Rational> {
    match n {
        Num::Exact(r) => Some(r),
        Num::Float(_) => None,
    }
}

pub fn small_int(n: &Num) -> Option<i64> {
    exact_of(n).filter(|r| r.is_integer()).and_then(|r| r.numer().to_i64())
}
