//! Exhaustive search over deterministic hidden-variable assignments.
//!
//! Assignment indices are mixed-radix numbers in base `d` with `2N` digits:
//! digits `0..N` are `α`, digits `N..2N` are `β`, least significant first.
//! The index range is cut into fixed-size partitions that are scanned in
//! parallel and merged in index order, so the maximum, the witness list and
//! every count are independent of the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::representations::ResidueTable;
use crate::scalar::Scalar;
use crate::scenario::{argument_table, Assignment, BellScenario, Residue4d};
use crate::tolerance;

pub fn index_to_assignment(idx: u64, n: usize, d: usize) -> Result<Assignment> {
    let total = total_count(n, d)?;
    if u128::from(idx) >= total {
        return Err(Error::domain(format!(
            "index {idx} out of range for {total} assignments (N={n}, d={d})"
        )));
    }
    let mut rest = idx;
    let mut digits = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        digits.push((rest % d as u64) as u32);
        rest /= d as u64;
    }
    let beta = digits.split_off(n);
    Ok(Assignment::from_parts_unchecked(digits, beta))
}

/// Inverse of [`index_to_assignment`], evaluated by Horner's rule from the
/// most significant digit.
pub fn assignment_to_index(a: &Assignment, d: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    let n = a.n_parties();
    if total_count(n, d)? > u128::from(u64::MAX) {
        return Err(Error::domain("assignment index does not fit in 64 bits"));
    }
    let mut idx: u64 = 0;
    for &digit in a.beta().iter().rev().chain(a.alpha().iter().rev()) {
        if digit as usize >= d {
            return Err(Error::domain(format!("outcome {digit} is not below d = {d}")));
        }
        idx = idx * d as u64 + u64::from(digit);
    }
    Ok(idx)
}

fn total_count(n: usize, d: usize) -> Result<u128> {
    if n == 0 || d < 2 {
        return Err(Error::domain(format!("need N ≥ 1 and d ≥ 2, got N={n}, d={d}")));
    }
    (d as u128)
        .checked_pow(2 * n as u32)
        .ok_or_else(|| Error::domain("assignment count overflows"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub witness_cap: usize,
    pub budget: u64,
    pub relative_tolerance: f64,
    /// Scan only `α_1 = 0`. Valid only when the evaluator is invariant under
    /// shifts of `α_1`; check with [`symmetry_reduction_agrees`].
    pub fix_first_alpha: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: None,
            witness_cap: tolerance::DEFAULT_WITNESS_CAP,
            budget: tolerance::DEFAULT_BUDGET,
            relative_tolerance: tolerance::ARGMAX_REL,
            fix_first_alpha: false,
        }
    }
}

/// A contiguous range `[start, end)` of search indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchTask {
    pub start: u64,
    pub end: u64,
}

/// Disjoint partitions covering `[0, total)`.
pub fn partitions(total: u64, size: u64) -> Vec<SearchTask> {
    let size = size.max(1);
    (0..total.div_ceil(size))
        .map(|i| SearchTask {
            start: i * size,
            end: ((i + 1) * size).min(total),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub max_value: T,
    /// Witnesses in ascending index order, at most `witness_cap` of them.
    pub argmax: Vec<Assignment>,
    pub argmax_indices: Vec<u64>,
    /// Assignments found within tolerance of the maximum, uncapped.
    pub argmax_count: u64,
    pub assignments_scanned: u64,
    pub partition_scans: Vec<u64>,
}

struct Partial<T> {
    max: T,
    witnesses: Vec<(u64, T)>,
    count: u64,
    scanned: u64,
}

fn band<T: Scalar>(max: T, rel: f64) -> T {
    T::of_f64(rel) * max.abs().max(T::one())
}

/// Steps the assignment to the next index; digit `first` is the lowest one moved.
fn advance(a: &mut Assignment, d: u32, first: usize) {
    let n = a.n_parties();
    for digit in first..2 * n {
        let slot = if digit < n {
            &mut a.alpha_mut()[digit]
        } else {
            &mut a.beta_mut()[digit - n]
        };
        *slot += 1;
        if *slot < d {
            return;
        }
        *slot = 0;
    }
}

fn scan<T, F>(task: SearchTask, n: usize, d: usize, stride: u64, f: &F, opts: &SearchOptions) -> Partial<T>
where
    T: Scalar,
    F: Fn(&Assignment) -> T,
{
    let first_digit = if stride == 1 { 0 } else { 1 };
    let mut a = index_to_assignment(task.start * stride, n, d).expect("partition lies in range");
    let mut p = Partial {
        max: T::neg_infinity(),
        witnesses: Vec::new(),
        count: 0,
        scanned: 0,
    };
    for r in task.start..task.end {
        let v = f(&a);
        let idx = r * stride;
        if v > p.max {
            let fresh = v > p.max + band(p.max, opts.relative_tolerance);
            p.max = v;
            if fresh {
                p.witnesses.clear();
                p.count = 0;
            }
            let floor = p.max - band(p.max, opts.relative_tolerance);
            p.witnesses.retain(|&(_, w)| w >= floor);
            p.count += 1;
            if p.witnesses.len() < opts.witness_cap {
                p.witnesses.push((idx, v));
            }
        } else if v >= p.max - band(p.max, opts.relative_tolerance) {
            p.count += 1;
            if p.witnesses.len() < opts.witness_cap {
                p.witnesses.push((idx, v));
            }
        }
        p.scanned += 1;
        if r + 1 < task.end {
            advance(&mut a, d as u32, first_digit);
        }
    }
    p
}

/// Exact maximum of `f` over every assignment of `s`.
pub fn brute_force_max<T, F>(s: &BellScenario, f: F, opts: &SearchOptions) -> Result<SearchResult<T>>
where
    T: Scalar,
    F: Fn(&Assignment) -> T + Sync,
{
    let n = s.n_parties();
    let d = s.n_outcomes();
    let full = total_count(n, d)?;
    if full > u128::from(opts.budget) {
        return Err(Error::BudgetExceeded {
            required: full,
            budget: opts.budget,
        });
    }
    if opts.threads == Some(0) {
        return Err(Error::domain("thread count must be at least 1"));
    }
    if opts.relative_tolerance.is_nan() || opts.relative_tolerance <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let full = full as u64;
    let (total, stride) = if opts.fix_first_alpha {
        (full / d as u64, d as u64)
    } else {
        (full, 1)
    };
    let tasks = partitions(total, tolerance::PARTITION_SIZE);
    let run = || -> Vec<Partial<T>> {
        tasks
            .par_iter()
            .map(|&t| scan(t, n, d, stride, &f, opts))
            .collect()
    };
    let partials = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let max_value = partials
        .iter()
        .map(|p| p.max)
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let floor = max_value - band(max_value, opts.relative_tolerance);
    let mut argmax_indices = Vec::new();
    let mut argmax_count = 0;
    for p in partials.iter().filter(|p| p.max >= floor) {
        argmax_count += p.count;
        for &(idx, v) in &p.witnesses {
            if v >= floor && argmax_indices.len() < opts.witness_cap {
                argmax_indices.push(idx);
            }
        }
    }
    let argmax = argmax_indices
        .iter()
        .map(|&i| index_to_assignment(i, n, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchResult {
        max_value,
        argmax,
        argmax_indices,
        argmax_count,
        assignments_scanned: partials.iter().map(|p| p.scanned).sum(),
        partition_scans: partials.iter().map(|p| p.scanned).collect(),
    })
}

/// Maximum of `scale · G^ν_N` using the residue-count evaluator.
pub fn brute_force_gbf<T: Scalar>(s: &BellScenario, scale: T, opts: &SearchOptions) -> Result<SearchResult<T>> {
    let table = ResidueTable::<T>::new(s);
    brute_force_max(s, |a: &Assignment| scale * table.eval(a), opts)
}

/// Whether the `α_1 = 0` reduction gives the same maximum as the full scan.
pub fn symmetry_reduction_agrees<T, F>(s: &BellScenario, f: F, opts: &SearchOptions) -> Result<bool>
where
    T: Scalar,
    F: Fn(&Assignment) -> T + Sync,
{
    let full = brute_force_max(s, &f, &SearchOptions { fix_first_alpha: false, ..opts.clone() })?;
    let reduced = brute_force_max(s, &f, &SearchOptions { fix_first_alpha: true, ..opts.clone() })?;
    Ok((full.max_value - reduced.max_value).abs() <= band(full.max_value, opts.relative_tolerance))
}

/// Argument values of one assignment and their sequence structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintDiagnostics {
    /// `arguments[γ][k]`.
    pub arguments: Vec<Vec<Residue4d>>,
    /// Every `A^γ_k` is the same for fixed `γ`.
    pub constant_in_k: bool,
    /// The per-`γ` terms, when constant in `k`.
    pub terms: Option<Vec<Residue4d>>,
    /// Constant in `k` and equally spaced mod `4d`.
    pub arithmetic: bool,
    /// Common difference in `(−2d, 2d]`, when arithmetic.
    pub common_difference: Option<i64>,
}

impl ConstraintDiagnostics {
    pub fn is_structured(&self) -> bool {
        self.constant_in_k && self.arithmetic && self.common_difference.map(i64::abs) == Some(2)
    }
}

pub fn verify_constraints(s: &BellScenario, a: &Assignment) -> Result<ConstraintDiagnostics> {
    let arguments = argument_table(s, a)?;
    let constant_in_k = arguments.iter().all(|row| row.windows(2).all(|w| w[0] == w[1]));
    let terms: Option<Vec<Residue4d>> = constant_in_k.then(|| arguments.iter().map(|row| row[0]).collect());
    let common_difference = terms.as_ref().and_then(|t| {
        let diffs: Vec<Residue4d> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let first = *diffs.first()?;
        diffs.iter().all(|&x| x == first).then(|| first.symmetric())
    });
    Ok(ConstraintDiagnostics {
        arguments,
        constant_in_k,
        terms,
        arithmetic: common_difference.is_some(),
        common_difference,
    })
}
