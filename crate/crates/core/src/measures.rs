//! Truncation formulas for measures of weak non-compactness.
//!
//! * ℓ¹(Γ) and weighted discrete L¹: `inf_F sup_x Σ_{γ∉F} w_γ |x_γ|`.
//! * c₀(Γ): for a finite family, `max_x min_F sup_{γ∉F} |x_γ|`.
//! * `N(ℓ^q(Λ), ℓ^p(J))`: `inf_{C,D} sup_T ‖(I−P_C) T (I−Q_D)‖_N`, and the
//!   χ-sandwich formula with `T − P_C T Q_D` in place of the residual.
//!
//! On a finitely supported family the unbudgeted infimum is always 0, so the
//! meaningful quantity is the budgeted min–max with `|C| ≤ k`, `|D| ≤ l`.
//! Only labels in the support union of the family are candidates; other
//! labels change no residual.
//!
//! c₀ reduction: the general formula takes a supremum over sequences in the
//! family of `inf_F sup_{γ∉F} liminf_k |x^k_γ|`. A sequence drawn from a
//! finite family repeats some members infinitely often, and its liminf at
//! `γ` is the minimum of `|x_γ|` over those members, which is at most the
//! value for any one of them. The supremum is therefore attained by a
//! constant sequence, which gives the per-member formula above.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::NormConfig;
use crate::nuclear::{compress, nuclear_norm_bracket, nuclear_norm_exact_hilbert, CompressMode};
use crate::operator::FiniteOperator;
use crate::spaces::{Ambient, Exponent, Field, Label, TruncationPair, VectorFamily};

/// Default cap on the number of subsets the exact solver may enumerate.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn exact(v: f64) -> Self {
        Interval { lower: v, upper: v }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }

    fn max(self, other: Interval) -> Interval {
        Interval { lower: self.lower.max(other.lower), upper: self.upper.max(other.upper) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Exact,
    Greedy,
    /// Exact when the enumeration fits under the limit, greedy otherwise.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverUsed {
    Exact,
    Greedy,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureConfig {
    pub solver: Solver,
    /// `None` disables the enumeration guard.
    pub enumeration_limit: Option<u64>,
    pub norm: NormConfig,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig { solver: Solver::Auto, enumeration_limit: Some(DEFAULT_ENUMERATION_LIMIT), norm: NormConfig::default() }
    }
}

impl MeasureConfig {
    pub fn exact() -> Self {
        MeasureConfig { solver: Solver::Exact, ..Self::default() }
    }

    pub fn greedy() -> Self {
        MeasureConfig { solver: Solver::Greedy, ..Self::default() }
    }
}

/// Value of a budgeted min–max together with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    /// Interval of `sup_T ‖residual‖` at the chosen pair. Its upper end is a
    /// valid upper bound on the budgeted min–max.
    pub value: Interval,
    /// Certified lower bound on the budgeted min–max itself (minimum over all
    /// feasible pairs of the per-pair lower end). Only the exact solver can
    /// provide it.
    pub certified_lower: Option<f64>,
    /// The minimizing pair. Vector measures report their set `F` in `rows`.
    pub chosen: TruncationPair,
    pub per_member: Vec<Interval>,
    pub solver: SolverUsed,
    pub budgets: (usize, usize),
    pub evaluated_pairs: u64,
}

/// Nonempty family of operators sharing exponents and field.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    members: Vec<FiniteOperator>,
    pub name: Option<String>,
}

impl OperatorFamily {
    pub fn new(members: Vec<FiniteOperator>) -> Result<Self> {
        let first = members.first().ok_or(Error::Empty("operator family"))?;
        for m in &members[1..] {
            if m.domain() != first.domain() || m.codomain() != first.codomain() {
                return Err(Error::ExponentMismatch("family members must share (q, p)".into()));
            }
            if m.field() != first.field() {
                return Err(Error::InvalidParameter("family members must share the scalar field".into()));
            }
        }
        Ok(OperatorFamily { members, name: None })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn members(&self) -> &[FiniteOperator] {
        &self.members
    }

    pub fn domain(&self) -> Exponent {
        self.members[0].domain()
    }

    pub fn codomain(&self) -> Exponent {
        self.members[0].codomain()
    }

    pub fn field(&self) -> Field {
        self.members[0].field()
    }

    pub fn row_support(&self) -> Vec<Label> {
        let s: BTreeSet<Label> = self.members.iter().flat_map(|m| m.rows()).collect();
        s.into_iter().collect()
    }

    pub fn col_support(&self) -> Vec<Label> {
        let s: BTreeSet<Label> = self.members.iter().flat_map(|m| m.cols()).collect();
        s.into_iter().collect()
    }

    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(&FiniteOperator) -> FiniteOperator,
    {
        let mut fam = OperatorFamily::new(self.members.iter().map(f).collect())?;
        fam.name = self.name.clone();
        Ok(fam)
    }
}

/// Norm interval of a single operator under the configured evaluator.
pub fn nuclear_interval(t: &FiniteOperator, cfg: &NormConfig) -> Result<Interval> {
    if t.is_hilbert() {
        Ok(Interval::exact(nuclear_norm_exact_hilbert(t)?))
    } else {
        let b = nuclear_norm_bracket(t, cfg)?;
        Ok(Interval { lower: b.lower, upper: b.upper })
    }
}

fn binomial_sum(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=k.min(n) {
        if i > 0 {
            c = c.saturating_mul((n - i + 1) as u128) / i as u128;
        }
        total = total.saturating_add(c);
    }
    total
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 1..=k.min(n - k) {
        c = c.saturating_mul((n - i + 1) as u128) / i as u128;
    }
    c
}

/// Index subsets of `0..n` with size `0..=k`, by size then lexicographically.
fn subsets_up_to(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |size| Combinations::new(n, size))
}

struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, size: usize) -> Self {
        Combinations { n, current: if size <= n { Some((0..size).collect()) } else { None } }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in (i + 1)..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Min–max search engine over truncation pairs for an operator family.
struct PairSearch<'a> {
    members: &'a [FiniteOperator],
    mode: CompressMode,
    cfg: NormConfig,
    rows: Vec<Label>,
    cols: Vec<Label>,
    member_rows: Vec<Vec<usize>>,
    member_cols: Vec<Vec<usize>>,
    rows_to_members: Vec<Vec<usize>>,
    cols_to_members: Vec<Vec<usize>>,
    cache: Vec<HashMap<Vec<u64>, Interval>>,
    evaluations: u64,
}

impl<'a> PairSearch<'a> {
    fn new(family: &'a OperatorFamily, mode: CompressMode, cfg: NormConfig) -> Self {
        let rows = family.row_support();
        let cols = family.col_support();
        let index = |universe: &[Label], ls: Vec<Label>| -> Vec<usize> {
            ls.iter().map(|l| universe.binary_search(l).expect("label in support union")).collect()
        };
        let members = family.members();
        let member_rows: Vec<Vec<usize>> = members.iter().map(|m| index(&rows, m.rows())).collect();
        let member_cols: Vec<Vec<usize>> = members.iter().map(|m| index(&cols, m.cols())).collect();
        let mut rows_to_members = vec![Vec::new(); rows.len()];
        let mut cols_to_members = vec![Vec::new(); cols.len()];
        for (i, (mr, mc)) in member_rows.iter().zip(&member_cols).enumerate() {
            for &r in mr {
                rows_to_members[r].push(i);
            }
            for &c in mc {
                cols_to_members[c].push(i);
            }
        }
        PairSearch {
            members,
            mode,
            cfg,
            rows,
            cols,
            member_rows,
            member_cols,
            rows_to_members,
            cols_to_members,
            cache: vec![HashMap::new(); members.len()],
            evaluations: 0,
        }
    }

    fn member_value(&mut self, i: usize, c: &[bool], d: &[bool]) -> Result<Interval> {
        let mr = &self.member_rows[i];
        let mc = &self.member_cols[i];
        let bits = mr.iter().map(|&r| c[r]).chain(mc.iter().map(|&k| d[k]));
        let mut key = vec![0u64; (mr.len() + mc.len()).div_ceil(64)];
        for (pos, bit) in bits.enumerate() {
            if bit {
                key[pos / 64] |= 1 << (pos % 64);
            }
        }
        if let Some(v) = self.cache[i].get(&key) {
            return Ok(*v);
        }
        let pair = TruncationPair {
            rows: mr.iter().filter(|&&r| c[r]).map(|&r| self.rows[r].clone()).collect(),
            cols: mc.iter().filter(|&&k| d[k]).map(|&k| self.cols[k].clone()).collect(),
        };
        let residual = compress(&self.members[i], &pair, self.mode);
        let v = nuclear_interval(&residual, &self.cfg)?;
        self.evaluations += 1;
        self.cache[i].insert(key, v);
        Ok(v)
    }

    fn all_values(&mut self, c: &[bool], d: &[bool]) -> Result<Vec<Interval>> {
        (0..self.members.len()).map(|i| self.member_value(i, c, d)).collect()
    }

    fn pair_of(&self, c: &[bool], d: &[bool]) -> TruncationPair {
        TruncationPair {
            rows: self.rows.iter().zip(c).filter(|(_, &b)| b).map(|(l, _)| l.clone()).collect(),
            cols: self.cols.iter().zip(d).filter(|(_, &b)| b).map(|(l, _)| l.clone()).collect(),
        }
    }

    fn pair_count(&self, k: usize, l: usize) -> u128 {
        binomial_sum(self.rows.len(), k).saturating_mul(binomial_sum(self.cols.len(), l))
    }

    fn finish(
        &mut self,
        c: &[bool],
        d: &[bool],
        certified_lower: Option<f64>,
        solver: SolverUsed,
        budgets: (usize, usize),
        pairs: u64,
    ) -> Result<MeasureResult> {
        let per_member = self.all_values(c, d)?;
        let value = per_member.iter().copied().fold(Interval::zero(), Interval::max);
        Ok(MeasureResult {
            value,
            certified_lower,
            chosen: self.pair_of(c, d),
            per_member,
            solver,
            budgets,
            evaluated_pairs: pairs,
        })
    }

    fn exact(&mut self, k: usize, l: usize, limit: Option<u64>) -> Result<MeasureResult> {
        let count = self.pair_count(k, l);
        if let Some(limit) = limit {
            if count > limit as u128 {
                return Err(Error::EnumerationLimit { count, limit });
            }
        }
        let (nr, nc) = (self.rows.len(), self.cols.len());
        let col_subsets: Vec<Vec<usize>> = subsets_up_to(nc, l).collect();
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        let mut best: Option<(f64, Vec<bool>, Vec<bool>)> = None;
        let mut global_lower = f64::INFINITY;
        let mut pairs = 0u64;
        let mut c = vec![false; nr];
        let mut d = vec![false; nc];
        for cs in subsets_up_to(nr, k) {
            c.iter_mut().for_each(|b| *b = false);
            cs.iter().for_each(|&i| c[i] = true);
            for ds in &col_subsets {
                d.iter_mut().for_each(|b| *b = false);
                ds.iter().for_each(|&i| d[i] = true);
                pairs += 1;
                let best_upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
                let mut max_upper = 0.0_f64;
                let mut max_lower = 0.0_f64;
                let mut pruned = None;
                for (pos, &i) in order.iter().enumerate() {
                    let v = self.member_value(i, &c, &d)?;
                    max_upper = max_upper.max(v.upper);
                    max_lower = max_lower.max(v.lower);
                    if max_upper >= best_upper && max_lower >= global_lower {
                        pruned = Some(pos);
                        break;
                    }
                }
                if let Some(pos) = pruned {
                    // move the member that settled this pair to the front
                    let i = order.remove(pos);
                    order.insert(0, i);
                    continue;
                }
                global_lower = global_lower.min(max_lower);
                if max_upper < best_upper {
                    best = Some((max_upper, c.clone(), d.clone()));
                }
            }
        }
        let (_, bc, bd) = best.expect("the empty pair is always enumerated");
        self.finish(&bc, &bd, Some(global_lower), SolverUsed::Exact, (k, l), pairs)
    }

    /// Grows `C` and `D` one label at a time, taking the move with the
    /// smallest resulting upper value (ties: smallest label, then rows
    /// before columns), until both budgets are spent. Returns the best pair
    /// seen along the path.
    fn greedy(&mut self, k: usize, l: usize) -> Result<MeasureResult> {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        let mut c = vec![false; nr];
        let mut d = vec![false; nc];
        let mut current = self.all_values(&c, &d)?;
        let upper_of = |vals: &[Interval]| vals.iter().map(|v| v.upper).fold(0.0, f64::max);
        let mut best = (upper_of(&current), c.clone(), d.clone());
        let (mut used_c, mut used_d) = (0, 0);
        let mut pairs = 1u64;
        loop {
            let mut choice: Option<(f64, usize, usize)> = None;
            for side in 0..2 {
                let (budget_left, len) = if side == 0 { (used_c < k, nr) } else { (used_d < l, nc) };
                if !budget_left {
                    continue;
                }
                for idx in 0..len {
                    let taken = if side == 0 { c[idx] } else { d[idx] };
                    if taken {
                        continue;
                    }
                    let affected = if side == 0 { self.rows_to_members[idx].clone() } else { self.cols_to_members[idx].clone() };
                    if side == 0 {
                        c[idx] = true;
                    } else {
                        d[idx] = true;
                    }
                    let mut value = 0.0_f64;
                    for (i, v) in current.iter().enumerate() {
                        if !affected.contains(&i) {
                            value = value.max(v.upper);
                        }
                    }
                    for &i in &affected {
                        value = value.max(self.member_value(i, &c, &d)?.upper);
                    }
                    if side == 0 {
                        c[idx] = false;
                    } else {
                        d[idx] = false;
                    }
                    pairs += 1;
                    let better = match choice {
                        None => true,
                        Some((bv, bs, bi)) => {
                            let label = if side == 0 { &self.rows[idx] } else { &self.cols[idx] };
                            let best_label = if bs == 0 { &self.rows[bi] } else { &self.cols[bi] };
                            value < bv || (value == bv && (label, side) < (best_label, bs))
                        }
                    };
                    if better {
                        choice = Some((value, side, idx));
                    }
                }
            }
            let Some((value, side, idx)) = choice else { break };
            let affected = if side == 0 {
                c[idx] = true;
                used_c += 1;
                self.rows_to_members[idx].clone()
            } else {
                d[idx] = true;
                used_d += 1;
                self.cols_to_members[idx].clone()
            };
            for i in affected {
                current[i] = self.member_value(i, &c, &d)?;
            }
            if value < best.0 {
                best = (value, c.clone(), d.clone());
            }
        }
        let (_, bc, bd) = best;
        self.finish(&bc, &bd, None, SolverUsed::Greedy, (k, l), pairs)
    }

    fn solve(&mut self, k: usize, l: usize, cfg: &MeasureConfig) -> Result<MeasureResult> {
        let k = k.min(self.rows.len());
        let l = l.min(self.cols.len());
        match cfg.solver {
            Solver::Exact => self.exact(k, l, cfg.enumeration_limit),
            Solver::Greedy => self.greedy(k, l),
            Solver::Auto => match self.exact(k, l, cfg.enumeration_limit) {
                Err(Error::EnumerationLimit { .. }) => self.greedy(k, l),
                other => other,
            },
        }
    }
}

/// `min_{|C|≤k, |D|≤l} max_T ‖(I−P_C) T (I−Q_D)‖_N`.
pub fn nuclear_measure(family: &OperatorFamily, budgets: (usize, usize), cfg: &MeasureConfig) -> Result<MeasureResult> {
    cfg.norm.validate()?;
    PairSearch::new(family, CompressMode::ResidualN, cfg.norm).solve(budgets.0, budgets.1, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSandwich {
    /// Raw min–max of `‖T − P_C T Q_D‖_N`.
    pub formula: MeasureResult,
    /// `[lower/2, upper]`: the interval for χ implied by the sandwich
    /// `χ ≤ formula ≤ 2χ`. Without a certified lower bound on the formula
    /// (greedy solver) the lower end is 0.
    pub chi: Interval,
}

pub fn chi_sandwich(family: &OperatorFamily, budgets: (usize, usize), cfg: &MeasureConfig) -> Result<ChiSandwich> {
    cfg.norm.validate()?;
    let formula = PairSearch::new(family, CompressMode::ResidualChi, cfg.norm).solve(budgets.0, budgets.1, cfg)?;
    let chi = Interval { lower: formula.certified_lower.unwrap_or(0.0) / 2.0, upper: formula.value.upper };
    Ok(ChiSandwich { formula, chi })
}

/// `max_T ‖(I−P_C) T (I−Q_D)‖_N`: the excess of the family over the
/// subspace of operators supported on `C × D`-complement-free blocks, an
/// upper bound on the De Blasi measure.
pub fn excess_to_truncation_space(family: &OperatorFamily, pair: &TruncationPair, cfg: &NormConfig) -> Result<Interval> {
    cfg.validate()?;
    let mut worst = Interval::zero();
    for t in family.members() {
        worst = worst.max(nuclear_interval(&compress(t, pair, CompressMode::ResidualN), cfg)?);
    }
    Ok(worst)
}

fn weighted_tail(x: &crate::spaces::FiniteVector, removed: &BTreeSet<Label>, ambient: &Ambient) -> f64 {
    x.iter().filter(|(l, _)| !removed.contains(*l)).map(|(l, v)| ambient.weight(l) * v.norm()).fold(0.0, |a, x| a + x)
}

/// ℓ¹ / weighted-L¹ tail formula. `budget = None` gives the unbudgeted
/// infimum, which is attained at the full support union.
pub fn l1_measure(family: &VectorFamily, budget: Option<usize>, cfg: &MeasureConfig) -> Result<MeasureResult> {
    family.ensure_ambient(&Ambient::l1())?;
    let ambient = family.ambient();
    let universe: Vec<Label> = family.support_union().into_iter().collect();
    let tails = |f: &BTreeSet<Label>| -> Vec<f64> { family.members().iter().map(|x| weighted_tail(x, f, ambient)).collect() };
    let result = |f: BTreeSet<Label>, solver, k: usize, pairs| {
        let per: Vec<f64> = tails(&f);
        let value = per.iter().copied().fold(0.0, f64::max);
        MeasureResult {
            value: Interval::exact(value),
            certified_lower: if solver == SolverUsed::Greedy { None } else { Some(value) },
            chosen: TruncationPair { rows: f, cols: BTreeSet::new() },
            per_member: per.into_iter().map(Interval::exact).collect(),
            solver,
            budgets: (k, 0),
            evaluated_pairs: pairs,
        }
    };
    let Some(budget) = budget else {
        let n = universe.len();
        return Ok(result(universe.into_iter().collect(), SolverUsed::Closed, n, 1));
    };
    let k = budget.min(universe.len());
    let max_tail = |f: &BTreeSet<Label>| tails(f).into_iter().fold(0.0, f64::max);

    let exact = |limit: Option<u64>| -> Result<MeasureResult> {
        // tails only shrink as F grows, so |F| = k suffices
        let count = binomial(universe.len(), k);
        if let Some(limit) = limit {
            if count > limit as u128 {
                return Err(Error::EnumerationLimit { count, limit });
            }
        }
        let mut best: Option<(f64, BTreeSet<Label>)> = None;
        let mut pairs = 0;
        for subset in Combinations::new(universe.len(), k) {
            pairs += 1;
            let f: BTreeSet<Label> = subset.iter().map(|&i| universe[i].clone()).collect();
            let v = max_tail(&f);
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, f));
            }
        }
        Ok(result(best.expect("at least one subset").1, SolverUsed::Exact, k, pairs))
    };
    let greedy = || -> MeasureResult {
        let mut f = BTreeSet::new();
        let mut pairs = 0;
        for _ in 0..k {
            let mut choice: Option<(f64, &Label)> = None;
            for label in universe.iter().filter(|l| !f.contains(*l)) {
                let mut trial = f.clone();
                trial.insert(label.clone());
                pairs += 1;
                let v = max_tail(&trial);
                if choice.is_none_or(|c| v < c.0) {
                    choice = Some((v, label));
                }
            }
            match choice {
                Some((_, label)) => {
                    f.insert(label.clone());
                }
                None => break,
            }
        }
        result(f, SolverUsed::Greedy, k, pairs)
    };
    match cfg.solver {
        Solver::Exact => exact(cfg.enumeration_limit),
        Solver::Greedy => Ok(greedy()),
        Solver::Auto => match exact(cfg.enumeration_limit) {
            Err(Error::EnumerationLimit { .. }) => Ok(greedy()),
            other => other,
        },
    }
}

/// c₀ formula for a finite family: `max_x` of the `(budget+1)`-th largest
/// `|x_γ|`. The reported set is the optimal `F` for the maximizing member.
pub fn c0_measure(family: &VectorFamily, budget: usize) -> Result<MeasureResult> {
    family.ensure_ambient(&Ambient::C0)?;
    let mut per_member = Vec::new();
    let mut best: Option<(f64, BTreeSet<Label>)> = None;
    for x in family.members() {
        let mut entries: Vec<(f64, &Label)> = x.iter().map(|(l, v)| (v.norm(), l)).collect();
        entries.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
        let value = entries.get(budget).map_or(0.0, |e| e.0);
        let f: BTreeSet<Label> = entries.iter().take(budget).map(|e| e.1.clone()).collect();
        per_member.push(Interval::exact(value));
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, f));
        }
    }
    let (value, f) = best.expect("family is nonempty");
    Ok(MeasureResult {
        value: Interval::exact(value),
        certified_lower: Some(value),
        chosen: TruncationPair { rows: f, cols: BTreeSet::new() },
        per_member,
        solver: SolverUsed::Closed,
        budgets: (budget, 0),
        evaluated_pairs: family.members().len() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    L1,
    C0,
    Nuclear,
    Chi,
}

#[derive(Debug, Clone, Copy)]
pub enum CurveFamily<'a> {
    Operators(&'a OperatorFamily),
    Vectors(&'a VectorFamily),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualCurve {
    pub kind: MeasureKind,
    pub points: Vec<(usize, MeasureResult)>,
}

/// Evaluates the measure at budgets `(k, k)` for `k = 0..=k_max`.
///
/// When a heuristic point comes out above its predecessor, the predecessor's
/// pair (feasible for the larger budget too) is kept instead, so upper values
/// never increase along the curve.
pub fn residual_curve(family: CurveFamily<'_>, k_max: usize, kind: MeasureKind, cfg: &MeasureConfig) -> Result<ResidualCurve> {
    let mut points: Vec<(usize, MeasureResult)> = Vec::with_capacity(k_max + 1);
    let mut search = match (family, kind) {
        (CurveFamily::Operators(f), MeasureKind::Nuclear) => Some(PairSearch::new(f, CompressMode::ResidualN, cfg.norm)),
        (CurveFamily::Operators(f), MeasureKind::Chi) => Some(PairSearch::new(f, CompressMode::ResidualChi, cfg.norm)),
        (CurveFamily::Vectors(_), MeasureKind::L1 | MeasureKind::C0) => None,
        _ => return Err(Error::InvalidParameter(format!("measure {kind:?} does not apply to this family"))),
    };
    cfg.norm.validate()?;
    for k in 0..=k_max {
        let mut r = match (&mut search, family) {
            (Some(s), _) => s.solve(k, k, cfg)?,
            (None, CurveFamily::Vectors(v)) if kind == MeasureKind::L1 => l1_measure(v, Some(k), cfg)?,
            (None, CurveFamily::Vectors(v)) => c0_measure(v, k)?,
            _ => unreachable!("checked above"),
        };
        if let Some((_, prev)) = points.last() {
            if r.value.upper > prev.value.upper {
                r = MeasureResult {
                    certified_lower: None,
                    budgets: r.budgets,
                    evaluated_pairs: r.evaluated_pairs,
                    ..prev.clone()
                };
            }
        }
        points.push((k, r));
    }
    Ok(ResidualCurve { kind, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::FiniteVector;

    fn h() -> Exponent {
        Exponent::HILBERT
    }

    fn t_family(n: i64) -> OperatorFamily {
        OperatorFamily::new((1..=n).map(|i| FiniteOperator::real([(i, i, 1.0)], h(), h())).collect()).unwrap()
    }

    fn labels(ls: &[i64]) -> BTreeSet<Label> {
        ls.iter().map(|&l| Label::Int(l)).collect()
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let all: Vec<Vec<usize>> = subsets_up_to(4, 2).collect();
        assert_eq!(all.len() as u128, binomial_sum(4, 2));
        assert_eq!(all[0], Vec::<usize>::new());
        assert_eq!(all[1], vec![0]);
        assert_eq!(all[5], vec![0, 1]);
        assert_eq!(all.last().unwrap(), &vec![2, 3]);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(binomial(50, 25), 126_410_606_437_752);
    }

    #[test]
    fn l1_examples() {
        let fam = VectorFamily::new(vec![FiniteVector::from_slice(&[1.0])], Ambient::l1()).unwrap();
        let r = l1_measure(&fam, Some(1), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 0.0);
        assert_eq!(r.chosen.rows, labels(&[1]));

        let fam =
            VectorFamily::new(vec![FiniteVector::from_slice(&[1.0]), FiniteVector::real([(2, 1.0)])], Ambient::l1()).unwrap();
        assert_eq!(l1_measure(&fam, Some(1), &MeasureConfig::exact()).unwrap().value.upper, 1.0);

        let x = FiniteVector::from_slice(&[8.0 / 16.0, 4.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0]);
        let fam = VectorFamily::new(vec![x], Ambient::l1()).unwrap();
        let r = l1_measure(&fam, Some(2), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 3.0 / 16.0);
        assert_eq!(r.chosen.rows, labels(&[1, 2]));
        let g = l1_measure(&fam, Some(2), &MeasureConfig::greedy()).unwrap();
        assert_eq!(g.value.upper, 3.0 / 16.0);

        let r = l1_measure(&fam, None, &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 0.0);
        assert_eq!(r.chosen.rows, labels(&[1, 2, 3, 4]));
    }

    #[test]
    fn l1_weights_and_ambient_checks() {
        let mut weights = std::collections::BTreeMap::new();
        weights.insert(Label::Int(1), 10.0);
        let fam = VectorFamily::new(vec![FiniteVector::from_slice(&[1.0, 2.0])], Ambient::L1Weighted { weights }).unwrap();
        // keeping label 1 costs 10, keeping label 2 costs 2
        let r = l1_measure(&fam, Some(1), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 2.0);
        assert_eq!(r.chosen.rows, labels(&[1]));

        let c0 = VectorFamily::new(vec![FiniteVector::from_slice(&[1.0])], Ambient::C0).unwrap();
        assert!(matches!(l1_measure(&c0, Some(1), &MeasureConfig::exact()), Err(Error::AmbientMismatch(_))));
        assert!(matches!(VectorFamily::new(vec![], Ambient::C0), Err(Error::Empty(_))));
    }

    #[test]
    fn c0_examples() {
        let fam = VectorFamily::new(vec![FiniteVector::from_slice(&[1.0; 5])], Ambient::C0).unwrap();
        assert_eq!(c0_measure(&fam, 3).unwrap().value.upper, 1.0);
        let fam = VectorFamily::new(vec![FiniteVector::from_slice(&[1.0])], Ambient::C0).unwrap();
        assert_eq!(c0_measure(&fam, 1).unwrap().value.upper, 0.0);
        let fam = VectorFamily::new(
            vec![FiniteVector::from_slice(&[1.0, 0.5, 0.25]), FiniteVector::from_slice(&[0.0, 0.9, 0.9])],
            Ambient::C0,
        )
        .unwrap();
        // enumerate both members and every singleton F
        let mut oracle = 0.0_f64;
        for x in fam.members() {
            let mut best = f64::INFINITY;
            for drop in 1..=3i64 {
                let sup = x.iter().filter(|(l, _)| **l != Label::Int(drop)).map(|(_, v)| v.norm()).fold(0.0, f64::max);
                best = best.min(sup);
            }
            oracle = oracle.max(best);
        }
        let r = c0_measure(&fam, 1).unwrap();
        assert_eq!(r.value.upper, oracle);
        assert_eq!(oracle, 0.9);
    }

    #[test]
    fn nuclear_measure_small_t_family() {
        let fam = t_family(6);
        for k in 0..3 {
            let r = nuclear_measure(&fam, (k, k), &MeasureConfig::exact()).unwrap();
            assert_eq!(r.value.upper, 1.0, "k={k}");
            assert_eq!(r.certified_lower, Some(1.0));
        }
        // disjoint C and D of size 3 cover all six labels
        let r = nuclear_measure(&fam, (3, 3), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 0.0);
        let g = nuclear_measure(&fam, (3, 3), &MeasureConfig::greedy()).unwrap();
        assert_eq!(g.value.upper, 1.0);
        let full = nuclear_measure(&fam, (6, 6), &MeasureConfig::greedy()).unwrap();
        assert_eq!(full.value.upper, 0.0);
    }

    #[test]
    fn chi_formula_on_t_family() {
        let fam = t_family(6);
        for k in 0..6 {
            let r = chi_sandwich(&fam, (k, k), &MeasureConfig::exact()).unwrap();
            assert_eq!(r.formula.value.upper, 1.0);
            assert_eq!(r.chi, Interval { lower: 0.5, upper: 1.0 });
        }
        let r = chi_sandwich(&fam, (6, 6), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.formula.value.upper, 0.0);
    }

    #[test]
    fn enumeration_guard() {
        let fam = t_family(30);
        let cfg = MeasureConfig { enumeration_limit: Some(1000), ..MeasureConfig::exact() };
        assert!(matches!(nuclear_measure(&fam, (3, 3), &cfg), Err(Error::EnumerationLimit { .. })));
        let auto = MeasureConfig { solver: Solver::Auto, ..cfg };
        let r = nuclear_measure(&fam, (3, 3), &auto).unwrap();
        assert_eq!(r.solver, SolverUsed::Greedy);
    }

    #[test]
    fn budgets_are_clamped() {
        let fam = t_family(3);
        let r = nuclear_measure(&fam, (100, 100), &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value.upper, 0.0);
        assert_eq!(r.budgets, (3, 3));
    }

    #[test]
    fn excess_to_truncation_examples() {
        let fam = t_family(4);
        let cfg = NormConfig::default();
        assert_eq!(excess_to_truncation_space(&fam, &TruncationPair::empty(), &cfg).unwrap().upper, 1.0);
        let cover = TruncationPair { rows: labels(&[1, 2, 3, 4]), cols: BTreeSet::new() };
        assert_eq!(excess_to_truncation_space(&fam, &cover, &cfg).unwrap().upper, 0.0);
        let some = TruncationPair { rows: labels(&[1, 2]), cols: labels(&[3]) };
        assert_eq!(excess_to_truncation_space(&fam, &some, &cfg).unwrap().upper, 1.0);
    }

    #[test]
    fn curve_for_t_family() {
        let fam = t_family(5);
        let curve = residual_curve(CurveFamily::Operators(&fam), 5, MeasureKind::Nuclear, &MeasureConfig::greedy()).unwrap();
        let uppers: Vec<f64> = curve.points.iter().map(|p| p.1.value.upper).collect();
        // moves tie until one member is left uncovered, whose column then clears it
        assert_eq!(uppers, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(uppers.iter().all(|u| u.is_sign_positive()));
        assert!(residual_curve(CurveFamily::Operators(&fam), 2, MeasureKind::L1, &MeasureConfig::greedy()).is_err());
    }

    #[test]
    fn family_validation() {
        let a = FiniteOperator::real([(1, 1, 1.0)], h(), h());
        let b = FiniteOperator::real([(1, 1, 1.0)], Exponent::new(3.0).unwrap(), h());
        assert!(matches!(OperatorFamily::new(vec![a, b]), Err(Error::ExponentMismatch(_))));
        assert!(matches!(OperatorFamily::new(vec![]), Err(Error::Empty(_))));
    }
}
