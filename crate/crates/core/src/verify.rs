//! Validity checks for proposed schemes.
//!
//! The window checkers decide the sufficient conditions for repair and
//! decoding: no polynomial `f` of degree `< k` may have every constrained
//! value inside its window `gamma_i * [-t, t]` unless `f` vanishes at the
//! repaired point (repair) or vanishes identically (decoding). A window
//! membership test is `balanced(gamma_i^{-1} f(alpha_i)) in [-t, t]`.
//!
//! Three search routes exist and are picked by predicted cost:
//!
//! * window enumeration over `k` constrained points, `(2t+1)^k` steps;
//! * exhaustion of all `p^k` coefficient vectors, evaluated directly;
//! * lattice reduction, which can only ever produce a counterexample.
//!
//! A failing verdict always carries a counterexample that
//! [`WindowProblem::admits`] re-checks from scratch.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{LagrangeBasis, Poly, PrimeField};
use crate::lattice::Lattice;
use crate::schemes::{DecodingScheme, LeakageScheme, RepairScheme};
use crate::search::{Enumerator, RangeConstraint, SplitPlan};

/// Default cap on search steps.
pub const DEFAULT_BUDGET: u64 = 1 << 28;
/// Default cap on `p^k` for injectivity sweeps.
pub const DEFAULT_INJECTIVITY_BUDGET: u64 = 1 << 24;
/// Window searches larger than this use the split search when it is
/// predicted to be cheaper.
const WALK_LIMIT: u128 = 1 << 24;
/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "RSREPAIR_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Cheapest exhaustive route within budget, else lattice witness hunt.
    Auto,
    Window,
    Exhaustive,
    Lattice,
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Decided without search (degenerate parameters).
    Direct,
    Window,
    Exhaustive,
    Lattice,
    Injectivity,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub budget: u64,
    pub strategy: Strategy,
    /// Largest lattice dimension the witness hunt will attempt.
    pub lattice_max_dim: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            strategy: Strategy::Auto,
            lattice_max_dim: 256,
        }
    }
}

impl SearchConfig {
    /// Default configuration with the budget taken from `RSREPAIR_BUDGET`
    /// when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = SearchConfig::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            cfg.budget = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{BUDGET_ENV}={v:?} is not an integer")))?;
        }
        Ok(cfg)
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub passed: bool,
    /// Present exactly when the check failed.
    pub counterexample: Option<Poly>,
    /// Second polynomial of a colliding pair (injectivity checks).
    pub partner: Option<Poly>,
    /// Candidates examined.
    pub work: u64,
    pub method: Method,
}

impl Verdict {
    fn pass(work: u64, method: Method) -> Self {
        Verdict {
            passed: true,
            counterexample: None,
            partner: None,
            work,
            method,
        }
    }

    fn fail(f: Poly, work: u64, method: Method) -> Self {
        Verdict {
            passed: false,
            counterexample: Some(f),
            partner: None,
            work,
            method,
        }
    }
}

/// What a window-feasible polynomial must do for the check to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    /// Vanish at this point.
    VanishAt(u64),
    /// Vanish identically.
    Zero,
}

/// A window condition instance.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowProblem {
    pub field: PrimeField,
    pub k: usize,
    pub t: u64,
    /// `(alpha_i, gamma_i)` for every node that contributes a window.
    pub constraints: Vec<(u64, u64)>,
    pub goal: Goal,
}

/// How the multipliers of a repair instance are derived from the points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRule {
    /// `gamma_i = alpha_i - alpha_ell`.
    Shift,
    /// `gamma_i = (alpha_i - alpha_ell)^{-1}`.
    Inverse,
}

impl WindowProblem {
    /// Repair condition for the node at `points[target]`.
    pub fn repair(
        field: PrimeField,
        points: &[u64],
        target: usize,
        gammas: &[u64],
        k: usize,
        t: u64,
    ) -> Result<Self> {
        assert_eq!(points.len(), gammas.len());
        let p = field.modulus();
        if t >= p {
            return Err(Error::WidthOutOfRange { p, t });
        }
        let ell = points
            .get(target)
            .copied()
            .ok_or(Error::BadIndex {
                ell: target as u64,
                n: points.len().saturating_sub(1) as u64,
            })?;
        let mut constraints = Vec::with_capacity(points.len());
        for (i, (&a, &g)) in points.iter().zip(gammas).enumerate() {
            if i == target {
                continue;
            }
            if g % p == 0 {
                return Err(Error::ZeroStep);
            }
            constraints.push((a % p, g % p));
        }
        let problem = WindowProblem {
            field,
            k,
            t,
            constraints,
            goal: Goal::VanishAt(ell % p),
        };
        problem.check_distinct()?;
        Ok(problem)
    }

    /// Repair condition with multipliers derived by `rule`.
    pub fn repair_with_rule(
        field: PrimeField,
        points: &[u64],
        target: usize,
        rule: GammaRule,
        k: usize,
        t: u64,
    ) -> Result<Self> {
        let ell = *points.get(target).ok_or(Error::BadIndex {
            ell: target as u64,
            n: points.len().saturating_sub(1) as u64,
        })?;
        let gammas = points
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if i == target {
                    return Ok(1);
                }
                let d = field.sub(a % field.modulus(), ell % field.modulus());
                match rule {
                    GammaRule::Shift => Ok(d),
                    GammaRule::Inverse => field.inv(d),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::repair(field, points, target, &gammas, k, t)
    }

    /// Decoding condition; `constraints` are the `(alpha_i, gamma_i)` of the
    /// sending nodes.
    pub fn decoding(field: PrimeField, k: usize, constraints: Vec<(u64, u64)>, t: u64) -> Result<Self> {
        let p = field.modulus();
        if t >= p {
            return Err(Error::WidthOutOfRange { p, t });
        }
        if constraints.iter().any(|&(_, g)| g % p == 0) {
            return Err(Error::ZeroStep);
        }
        let problem = WindowProblem {
            field,
            k,
            t,
            constraints,
            goal: Goal::Zero,
        };
        problem.check_distinct()?;
        Ok(problem)
    }

    /// Repair condition of a repair scheme.
    pub fn for_repair_scheme(s: &RepairScheme) -> Self {
        WindowProblem {
            field: s.field(),
            k: s.dimension(),
            t: s.width(),
            constraints: s.nodes().iter().map(|n| (n.index, n.gamma())).collect(),
            goal: Goal::VanishAt(s.target()),
        }
    }

    /// Decoding condition of a decoding scheme.
    pub fn for_decoding_scheme(s: &DecodingScheme) -> Self {
        WindowProblem {
            field: s.field(),
            k: s.dimension(),
            t: s.width(),
            constraints: s.nodes().iter().map(|n| (n.index, n.gamma())).collect(),
            goal: Goal::Zero,
        }
    }

    fn check_distinct(&self) -> Result<()> {
        let mut pts: Vec<u64> = self.constraints.iter().map(|c| c.0).collect();
        if let Goal::VanishAt(a) = self.goal {
            pts.push(a);
        }
        pts.sort_unstable();
        for w in pts.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateAbscissa(w[0]));
            }
        }
        Ok(())
    }

    /// Whether `f` is a counterexample: degree `< k`, inside every window,
    /// yet violating the goal. Evaluates directly.
    pub fn admits(&self, f: &Poly) -> bool {
        let fd = &self.field;
        if f.field() != *fd || f.degree().is_some_and(|d| d >= self.k) {
            return false;
        }
        let in_windows = self.constraints.iter().all(|&(a, g)| {
            let scaled = fd.mul(fd.inv(g).unwrap_or(0), f.eval(a));
            fd.balanced(scaled).unsigned_abs() <= self.t
        });
        in_windows
            && match self.goal {
                Goal::VanishAt(a) => f.eval(a) != 0,
                Goal::Zero => !f.is_zero(),
            }
    }

    /// Predicted steps of the window search: a plain walk or, when
    /// cheaper, the meet-in-the-middle split.
    fn window_cost(&self) -> u128 {
        let walk = (2 * self.t as u128 + 1).saturating_pow(self.k as u32);
        match self.split_plan() {
            Some(plan) if walk > WALK_LIMIT && (plan.cost as u128) < walk => plan.cost.ceil() as u128,
            _ => walk,
        }
    }

    fn split_plan(&self) -> Option<SplitPlan> {
        let w = 2 * self.t + 1;
        let rest = self.constraints.len().saturating_sub(self.k);
        SplitPlan::choose(&vec![w; self.k], &vec![w; rest], self.field.modulus())
    }

    fn exhaustive_cost(&self) -> u128 {
        (self.field.modulus() as u128).saturating_pow(self.k as u32)
    }
}

/// Decides a repair condition (`goal` is [`Goal::VanishAt`]).
pub fn check_repair_condition(problem: &WindowProblem, cfg: &SearchConfig) -> Result<Verdict> {
    debug_assert!(matches!(problem.goal, Goal::VanishAt(_)));
    check_window_condition(problem, cfg)
}

/// Decides a decoding condition (`goal` is [`Goal::Zero`]).
pub fn check_decoding_condition(problem: &WindowProblem, cfg: &SearchConfig) -> Result<Verdict> {
    debug_assert!(matches!(problem.goal, Goal::Zero));
    check_window_condition(problem, cfg)
}

pub fn check_window_condition(problem: &WindowProblem, cfg: &SearchConfig) -> Result<Verdict> {
    let field = problem.field;
    let k = problem.k;
    if k == 0 {
        return Ok(Verdict::pass(0, Method::Direct));
    }
    if 2 * problem.t + 1 >= field.modulus() {
        // every window is all of F_p
        return Ok(Verdict::fail(Poly::constant(field, 1), 1, Method::Direct));
    }
    if problem.constraints.len() < k {
        // a polynomial vanishing on every constrained point still has
        // degree < k and is nonzero at any other point
        let roots: Vec<u64> = problem.constraints.iter().map(|c| c.0).collect();
        return Ok(Verdict::fail(Poly::from_roots(field, &roots), 1, Method::Direct));
    }

    let window = problem.window_cost();
    let full = problem.exhaustive_cost();
    let budget = cfg.budget as u128;
    let over = |needed: u128| Error::SearchBudgetExceeded {
        needed,
        budget: cfg.budget,
    };
    match cfg.strategy {
        Strategy::Window if window <= budget => window_search(problem),
        Strategy::Window => Err(over(window)),
        Strategy::Exhaustive if full <= budget => Ok(exhaustive_search(problem)),
        Strategy::Exhaustive => Err(over(full)),
        Strategy::Lattice => {
            lattice_witness(problem, cfg.lattice_max_dim).ok_or_else(|| over(window.min(full)))
        }
        Strategy::Auto => {
            if window.min(full) <= budget {
                if window <= full {
                    window_search(problem)
                } else {
                    Ok(exhaustive_search(problem))
                }
            } else {
                lattice_witness(problem, cfg.lattice_max_dim).ok_or_else(|| over(window.min(full)))
            }
        }
    }
}

fn window_search(problem: &WindowProblem) -> Result<Verdict> {
    let field = problem.field;
    let k = problem.k;
    let t = problem.t as i64;
    let (base, rest) = problem.constraints.split_at(k);
    let base_points: Vec<u64> = base.iter().map(|c| c.0).collect();
    let domains: Vec<Vec<u64>> = base
        .iter()
        .map(|&(_, g)| (-t..=t).map(|a| field.mul(g, field.reduce_i64(a))).collect())
        .collect();
    let checks = rest
        .iter()
        .map(|&(a, g)| Ok(RangeConstraint::window(a, field.inv(g)?, problem.t)))
        .collect::<Result<Vec<_>>>()?;
    let e = Enumerator::new(field, &base_points, domains, checks)?;
    let walk = (2 * problem.t as u128 + 1).saturating_pow(k as u32);
    let split = problem
        .split_plan()
        .filter(|plan| walk > WALK_LIMIT && (plan.cost as u128) < walk);
    let search = |pred: &(dyn Fn(&[u64]) -> bool + Sync)| match &split {
        Some(plan) => e.find_first_split(plan, pred),
        None => e.find_first(pred),
    };
    let (hit, work) = match problem.goal {
        Goal::VanishAt(target) => {
            let w = e.basis().weights_at(target);
            let pred = move |vals: &[u64]| {
                vals.iter()
                    .zip(&w)
                    .fold(0, |acc, (&v, &wj)| field.add(acc, field.mul(v, wj)))
                    != 0
            };
            search(&pred)
        }
        Goal::Zero => search(&|vals: &[u64]| vals.iter().any(|&v| v != 0)),
    };
    Ok(match hit {
        Some(vals) => Verdict::fail(e.basis().interpolate(&vals), work, Method::Window),
        None => Verdict::pass(work, Method::Window),
    })
}

/// Direct sweep of every coefficient vector, constant term fastest.
fn exhaustive_search(problem: &WindowProblem) -> Verdict {
    let field = problem.field;
    let p = field.modulus();
    let k = problem.k;
    let scaled: Vec<(u64, u64)> = problem
        .constraints
        .iter()
        .map(|&(a, g)| (a, field.inv(g).expect("nonzero multiplier")))
        .collect();
    let t = problem.t;
    let violates = |coeffs: &[u64]| -> bool {
        let f = Poly::new(field, coeffs.to_vec());
        let in_windows = scaled
            .iter()
            .all(|&(a, gi)| field.balanced(field.mul(gi, f.eval(a))).unsigned_abs() <= t);
        in_windows
            && match problem.goal {
                Goal::VanishAt(a) => f.eval(a) != 0,
                Goal::Zero => coeffs.iter().any(|&c| c != 0),
            }
    };
    // chunk by the leading coefficient
    let inner = p.pow(k as u32 - 1);
    let best = AtomicUsize::new(usize::MAX);
    let hits: Vec<Option<(usize, u64, Vec<u64>)>> = (0..p as usize)
        .into_par_iter()
        .map(|lead| {
            let mut coeffs = vec![0u64; k];
            coeffs[k - 1] = lead as u64;
            for off in 0..inner {
                if off % 4096 == 0 && best.load(Ordering::Relaxed) < lead {
                    return None;
                }
                let mut rem = off;
                for c in coeffs.iter_mut().take(k - 1) {
                    *c = rem % p;
                    rem /= p;
                }
                if violates(&coeffs) {
                    best.fetch_min(lead, Ordering::Relaxed);
                    return Some((lead, off, coeffs));
                }
            }
            None
        })
        .collect();
    match hits.into_iter().flatten().min_by_key(|h| h.0) {
        Some((lead, off, coeffs)) => Verdict::fail(
            Poly::new(field, coeffs),
            lead as u64 * inner + off + 1,
            Method::Exhaustive,
        ),
        None => Verdict::pass(p * inner, Method::Exhaustive),
    }
}

/// Systematic generator `[I_k | A]` of the scaled code
/// `{(gamma_i^{-1} f(alpha_i))_i : deg f < k}` over the constrained points.
fn scaled_code_generator(problem: &WindowProblem) -> Option<Vec<Vec<u64>>> {
    let f = problem.field;
    let k = problem.k;
    let n = problem.constraints.len();
    let mut rows: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            problem
                .constraints
                .iter()
                .map(|&(a, g)| Some(f.mul(f.inv(g).ok()?, f.pow(a, j as u64))))
                .collect::<Option<Vec<u64>>>()
        })
        .collect::<Option<_>>()?;
    for col in 0..k {
        let piv = (col..k).find(|&r| rows[r][col] != 0)?;
        rows.swap(col, piv);
        let inv = f.inv(rows[col][col]).ok()?;
        for v in rows[col].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for r in 0..k {
            if r != col && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..n {
                    let sub = f.mul(factor, rows[col][c]);
                    rows[r][c] = f.sub(rows[r][c], sub);
                }
            }
        }
    }
    Some(rows)
}

/// Hunts for a counterexample among short vectors of the lattice
/// `{a in Z^N : a mod p is a scaled codeword}`. Vectors with every entry in
/// `[-t, t]` are window assignments; each is turned back into a polynomial
/// and re-checked.
fn lattice_witness(problem: &WindowProblem, max_dim: usize) -> Option<Verdict> {
    let field = problem.field;
    let p = field.modulus() as i64;
    let k = problem.k;
    let n = problem.constraints.len();
    if n > max_dim || n <= k {
        return None;
    }
    let gen = scaled_code_generator(problem)?;
    let mut basis: Vec<Vec<i64>> = gen
        .iter()
        .map(|row| row.iter().map(|&v| field.balanced(v)).collect())
        .collect();
    for c in k..n {
        let mut row = vec![0i64; n];
        row[c] = p;
        basis.push(row);
    }
    let head_points: Vec<u64> = problem.constraints[..k].iter().map(|c| c.0).collect();
    let lagrange = LagrangeBasis::new(field, &head_points).ok()?;
    let t = problem.t as i64;
    let mut work = 0u64;

    let mut lat = Lattice::new(basis);
    let try_vec = |a: &[i64], work: &mut u64| -> Option<Poly> {
        *work += 1;
        if a.iter().all(|&v| v == 0) || a.iter().any(|v| v.abs() > t) {
            return None;
        }
        let ys: Vec<u64> = problem.constraints[..k]
            .iter()
            .zip(a)
            .map(|(&(_, g), &v)| field.mul(g, field.reduce_i64(v)))
            .collect();
        let f = lagrange.interpolate(&ys);
        problem.admits(&f).then_some(f)
    };
    let scan = |lat: &Lattice, work: &mut u64| -> Option<Poly> {
        let rows = lat.rows();
        for r in rows {
            if let Some(f) = try_vec(r, work) {
                return Some(f);
            }
        }
        let mut buf = vec![0i64; n];
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                for sign in [1i64, -1] {
                    for (b, (&x, &y)) in buf.iter_mut().zip(rows[i].iter().zip(&rows[j])) {
                        *b = x + sign * y;
                    }
                    if let Some(f) = try_vec(&buf, work) {
                        return Some(f);
                    }
                }
            }
        }
        None
    };

    lat.lll(0.99);
    if let Some(f) = scan(&lat, &mut work) {
        return Some(Verdict::fail(f, work, Method::Lattice));
    }
    for (block, tours) in [(10, 8), (20, 4)] {
        lat.bkz(block, tours);
        if let Some(f) = scan(&lat, &mut work) {
            return Some(Verdict::fail(f, work, Method::Lattice));
        }
    }
    None
}

/// Sweeps every polynomial of degree `< k` and reports the first pair with
/// identical transcripts under `leak(node, value)`.
///
/// The sweep stops at the first collision, so it may finish well inside
/// `budget` even when `p^k` is larger (e.g. above the pigeonhole
/// threshold).
pub fn brute_injectivity(
    field: PrimeField,
    k: usize,
    points: &[u64],
    leak: &(dyn Fn(usize, u64) -> u64 + Sync),
    budget: u64,
) -> Result<Verdict> {
    let p = field.modulus();
    let total = (p as u128).saturating_pow(k as u32);
    let limit = total.min(budget as u128 + 1) as u64;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    let decode = |mut idx: u64| {
        let mut coeffs = vec![0u64; k];
        for c in coeffs.iter_mut() {
            *c = idx % p;
            idx /= p;
        }
        Poly::new(field, coeffs)
    };
    for idx in 0..limit {
        if idx as u128 >= budget as u128 {
            return Err(Error::SearchBudgetExceeded {
                needed: total,
                budget,
            });
        }
        let f = decode(idx);
        let transcript: Vec<u64> = points
            .iter()
            .enumerate()
            .map(|(i, &a)| leak(i, f.eval(a)))
            .collect();
        if let Some(&prev) = seen.get(&transcript) {
            return Ok(Verdict {
                passed: false,
                counterexample: Some(decode(prev)),
                partner: Some(f),
                work: idx + 1,
                method: Method::Injectivity,
            });
        }
        seen.insert(transcript, idx);
    }
    Ok(Verdict::pass(limit, Method::Injectivity))
}

/// Injectivity of the partition-induced leakage of a scheme.
pub fn scheme_injectivity(scheme: &dyn LeakageScheme, budget: u64) -> Result<Verdict> {
    let nodes = scheme.nodes();
    let points: Vec<u64> = nodes.iter().map(|n| n.index).collect();
    let leak = |i: usize, v: u64| nodes[i].partition.leak(v);
    brute_injectivity(scheme.field(), scheme.dimension(), &points, &leak, budget)
}

/// `n log s / log p`: above this dimension no family into `s` symbols can
/// be injective.
pub fn pigeonhole_threshold(p: u64, n: u64, s: u64) -> f64 {
    if s <= 1 {
        return 0.0;
    }
    n as f64 * (s as f64).ln() / (p as f64).ln()
}

/// `1 - p^{2k} / s^{n-k+1}`, the union-bound success probability for a
/// uniformly random family.
pub fn union_bound(p: u64, n: u64, k: u64, s: u64) -> f64 {
    let log = 2.0 * k as f64 * (p as f64).ln() - (n as f64 - k as f64 + 1.0) * (s as f64).ln();
    1.0 - log.exp()
}

/// One leakage function per node, as a lookup table `value -> symbol`.
pub type LeakageTables = Vec<Vec<u32>>;

#[derive(Debug, Clone, Serialize)]
pub struct RandomSearchReport {
    pub p: u64,
    pub n: u64,
    pub k: usize,
    pub s: u64,
    pub trials: usize,
    pub seed: u64,
    pub injective: usize,
    pub rate: f64,
    pub union_bound: f64,
    pub pigeonhole_threshold: f64,
    /// First injective family found.
    #[serde(skip)]
    pub family: LeakageTables,
}

/// Samples `trials` uniformly random families `tau_i: F_p -> [s]` on the
/// points `0..n` and tests each for injectivity.
pub fn random_scheme_search(
    p: u64,
    n: u64,
    k: usize,
    s: u64,
    trials: usize,
    seed: u64,
) -> Result<RandomSearchReport> {
    let field = PrimeField::new(p)?;
    if n > p {
        return Err(Error::BadLength { len: n, p });
    }
    let threshold = pigeonhole_threshold(p, n, s);
    if trials == 0 || k as f64 > threshold {
        return Err(Error::NoInjectiveFamilyFound { trials });
    }
    let points: Vec<u64> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = None;
    let mut injective = 0;
    for _ in 0..trials {
        let tables: LeakageTables = (0..n)
            .map(|_| (0..p).map(|_| rng.gen_range(0..s) as u32).collect())
            .collect();
        let leak = |i: usize, v: u64| tables[i][v as usize] as u64;
        let verdict = brute_injectivity(field, k, &points, &leak, DEFAULT_INJECTIVITY_BUDGET)?;
        if verdict.passed {
            injective += 1;
            if first.is_none() {
                first = Some(tables);
            }
        }
    }
    let family = first.ok_or(Error::NoInjectiveFamilyFound { trials })?;
    Ok(RandomSearchReport {
        p,
        n,
        k,
        s,
        trials,
        seed,
        injective,
        rate: injective as f64 / trials as f64,
        union_bound: union_bound(p, n, k as u64, s),
        pigeonhole_threshold: threshold,
        family,
    })
}

/// A uniformly random family drawn from a seeded generator, one table per
/// node.
pub fn random_family(p: u64, n: u64, s: u64, seed: u64) -> LeakageTables {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..p).map(|_| rng.gen_range(0..s) as u32).collect())
        .collect()
}

/// `-sum_{i=0}^{(p-3)/2} (x+1)^i = (1 - (x+1)^{(p-1)/2}) / x`.
///
/// Its scaled values `i * f(i)` are `1 - chi(i+1)`, all in `{0, 1, 2}`, so
/// every node leaks bucket 0 under `gamma_i = i^{-1}` and `t = 3`, exactly
/// like the zero polynomial, while `f(0) = -(p-1)/2`.
pub fn adversarial_example(field: PrimeField) -> Poly {
    let p = field.modulus();
    let top = ((p - 3) / 2) as usize;
    // row holds the coefficients of (x+1)^i
    let mut row = vec![1u64];
    let mut acc = vec![0u64; top + 1];
    for i in 0..=top {
        for (a, &c) in acc.iter_mut().zip(&row) {
            *a = field.add(*a, c);
        }
        if i < top {
            let mut next = vec![0u64; row.len() + 1];
            for (j, &c) in row.iter().enumerate() {
                next[j] = field.add(next[j], c);
                next[j + 1] = field.add(next[j + 1], c);
            }
            row = next;
        }
    }
    Poly::new(field, acc.into_iter().map(|c| field.neg(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn full_window_fails_with_one() {
        let f = field(7);
        let prob = WindowProblem::repair_with_rule(f, &[0, 1, 2, 3], 0, GammaRule::Shift, 2, 3).unwrap();
        let v = check_repair_condition(&prob, &SearchConfig::default()).unwrap();
        assert!(!v.passed);
        assert_eq!(v.counterexample, Some(Poly::constant(f, 1)));
        assert!(prob.admits(v.counterexample.as_ref().unwrap()));
    }

    #[test]
    fn empty_code_passes() {
        let f = field(13);
        let prob = WindowProblem::decoding(f, 0, vec![(1, 1), (2, 1)], 2).unwrap();
        assert!(check_decoding_condition(&prob, &SearchConfig::default()).unwrap().passed);
    }

    #[test]
    fn too_few_constraints_fail_directly() {
        let f = field(13);
        let prob = WindowProblem::decoding(f, 3, vec![(1, 1), (2, 5)], 2).unwrap();
        let v = check_decoding_condition(&prob, &SearchConfig::default()).unwrap();
        assert!(!v.passed);
        assert!(prob.admits(v.counterexample.as_ref().unwrap()));
    }

    #[test]
    fn window_and_exhaustive_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [11u64, 13, 17, 19] {
            let f = field(p);
            for k in 1..=3usize {
                for t in 1..=3u64 {
                    for _ in 0..5 {
                        let n = rng.gen_range(k..p as usize);
                        let constraints: Vec<(u64, u64)> =
                            (0..n as u64).map(|a| (a, rng.gen_range(1..p))).collect();
                        for goal in [Goal::Zero, Goal::VanishAt(p - 1)] {
                            let prob = WindowProblem {
                                field: f,
                                k,
                                t,
                                constraints: constraints.clone(),
                                goal,
                            };
                            let cfg = SearchConfig::default();
                            let a = check_window_condition(&prob, &cfg.with_strategy(Strategy::Window)).unwrap();
                            let b = check_window_condition(&prob, &cfg.with_strategy(Strategy::Exhaustive)).unwrap();
                            assert_eq!(a.passed, b.passed, "p={p} k={k} t={t} {goal:?}");
                            for v in [&a, &b] {
                                if let Some(cx) = &v.counterexample {
                                    assert!(prob.admits(cx));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = field(101);
        let s = DecodingScheme::weil(101, 3, 4, &[0, 1]).unwrap();
        let prob = WindowProblem::for_decoding_scheme(&s);
        let cfg = SearchConfig::default()
            .with_budget(1000)
            .with_strategy(Strategy::Window);
        assert!(matches!(
            check_decoding_condition(&prob, &cfg),
            Err(Error::SearchBudgetExceeded { .. })
        ));
        assert_eq!(prob.field, f);
    }

    #[test]
    fn pigeonhole_values() {
        assert!((pigeonhole_threshold(7, 7, 2) - 2.4937).abs() < 1e-3);
        assert!((pigeonhole_threshold(13, 13, 4) - 7.0261).abs() < 1e-3);
        assert!((pigeonhole_threshold(13, 13, 2) - 3.5130).abs() < 1e-3);
        assert_eq!(pigeonhole_threshold(13, 13, 1), 0.0);
    }

    #[test]
    fn pigeonhole_collision_small() {
        let f = field(7);
        let points: Vec<u64> = (0..7).collect();
        let leak = |i: usize, v: u64| (v + i as u64) % 2;
        let v = brute_injectivity(f, 3, &points, &leak, DEFAULT_INJECTIVITY_BUDGET).unwrap();
        assert!(!v.passed);
        assert!(v.work <= 129);
    }

    #[test]
    fn identity_on_k_points_is_injective() {
        let f = field(13);
        let points: Vec<u64> = (0..13).collect();
        let leak = |i: usize, v: u64| if i < 2 { v } else { 0 };
        let v = brute_injectivity(f, 2, &points, &leak, DEFAULT_INJECTIVITY_BUDGET).unwrap();
        assert!(v.passed);
        assert_eq!(v.work, 169);
    }

    #[test]
    fn adversarial_small_cases() {
        let f5 = field(5);
        // -(1 + (x + 1)) = -x - 2
        assert_eq!(adversarial_example(f5), Poly::from_i64(f5, &[-2, -1]));
        let f = field(101);
        let g = adversarial_example(f);
        assert_eq!(g.degree(), Some(49));
        assert_eq!(g.eval(0), 51);
        for i in 1..101 {
            let b = f.balanced(f.mul(i, g.eval(i)));
            assert!((0..=2).contains(&b));
        }
    }

    #[test]
    fn random_search_trivial_errors() {
        assert_eq!(
            random_scheme_search(13, 13, 2, 4, 0, 1).unwrap_err(),
            Error::NoInjectiveFamilyFound { trials: 0 }
        );
        assert_eq!(
            random_scheme_search(13, 13, 9, 2, 5, 1).unwrap_err(),
            Error::NoInjectiveFamilyFound { trials: 5 }
        );
    }

    #[test]
    fn union_bound_value() {
        let b = union_bound(13, 13, 2, 4);
        assert!((b - (1.0 - 28561.0 / 16777216.0)).abs() < 1e-12);
    }
}
