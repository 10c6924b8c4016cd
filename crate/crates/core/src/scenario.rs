//! Scenario types, residues mod `4d`, and the ranking of site subsets that
//! indexes combination functions `C^γ_k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Nu;

/// `(N, d, ν)`: parties, outcomes per measurement, and the exact phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BellScenario {
    n_parties: usize,
    n_outcomes: usize,
    nu: Nu,
}

impl BellScenario {
    pub fn new(n_parties: usize, n_outcomes: usize, nu: Nu) -> Result<Self> {
        if n_parties == 0 {
            return Err(Error::domain("a scenario needs at least one party"));
        }
        if n_outcomes < 2 {
            return Err(Error::domain(format!(
                "d = {n_outcomes}: at least two outcomes are required"
            )));
        }
        // Site subsets are handled as u64 bit masks.
        if n_parties > 63 {
            return Err(Error::domain(format!("N = {n_parties} exceeds 63 parties")));
        }
        Ok(BellScenario {
            n_parties,
            n_outcomes,
            nu,
        })
    }

    /// The `ν = 1/4` member of the family.
    pub fn quarter(n_parties: usize, n_outcomes: usize) -> Result<Self> {
        Self::new(n_parties, n_outcomes, Nu::new(1, 4))
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn nu(&self) -> Nu {
        self.nu
    }

    /// The congruence modulus `4d`.
    pub fn modulus(&self) -> i64 {
        4 * self.n_outcomes as i64
    }

    /// `4ν` when it is an integer.
    pub fn four_nu(&self) -> Option<i64> {
        let x = self.nu * Nu::from_integer(4);
        x.is_integer().then(|| x.to_integer())
    }

    /// `c mod 8` when `ν = c/4`.
    pub fn quarter_class(&self) -> Option<u8> {
        self.four_nu().map(|c| c.rem_euclid(8) as u8)
    }

    /// True when every argument value `4C + 2γ + 4ν` is odd.
    pub fn has_odd_arguments(&self) -> bool {
        matches!(self.four_nu(), Some(c) if c.is_odd())
    }

    /// `d^(2N)`, the number of deterministic assignments.
    pub fn assignment_count(&self) -> Option<u128> {
        (self.n_outcomes as u128).checked_pow(2 * self.n_parties as u32)
    }

    pub(crate) fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.n_parties() != self.n_parties {
            return Err(Error::domain(format!(
                "assignment has {} parties, scenario has {}",
                a.n_parties(),
                self.n_parties
            )));
        }
        a.check_outcomes(self.n_outcomes)
    }
}

impl fmt::Display for BellScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} d={} nu={}",
            self.n_parties,
            self.n_outcomes,
            format_nu(self.nu)
        )
    }
}

/// Parses `"c/4"`, `"-3/4"`, `"p/q"` or an integer; the result is in lowest terms.
pub fn parse_nu(input: &str) -> Result<Nu> {
    let err = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let q: i64 = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if q == 0 {
        return Err(err("zero denominator"));
    }
    Ok(Nu::new(p, q))
}

/// Formats `ν` as `"p/q"`, always with an explicit denominator.
pub fn format_nu(nu: Nu) -> String {
    format!("{}/{}", nu.numer(), nu.denom())
}

/// Outcome residues `α_j, β_j ∈ {0, …, d-1}` for every party.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    alpha: Vec<u32>,
    beta: Vec<u32>,
}

impl Assignment {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>, d: usize) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::domain(format!(
                "alpha has {} entries but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        let a = Assignment { alpha, beta };
        a.check_outcomes(d)?;
        Ok(a)
    }

    pub fn zeros(n_parties: usize) -> Self {
        Assignment {
            alpha: vec![0; n_parties],
            beta: vec![0; n_parties],
        }
    }

    pub(crate) fn from_parts_unchecked(alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        Assignment { alpha, beta }
    }

    pub fn n_parties(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn beta(&self) -> &[u32] {
        &self.beta
    }

    pub(crate) fn alpha_mut(&mut self) -> &mut [u32] {
        &mut self.alpha
    }

    pub(crate) fn beta_mut(&mut self) -> &mut [u32] {
        &mut self.beta
    }

    /// Exchanges the two measurement choices at every site (the "prime" operation).
    pub fn swapped(&self) -> Self {
        Assignment {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    fn check_outcomes(&self, d: usize) -> Result<()> {
        if self.alpha.len() != self.beta.len() {
            return Err(Error::domain("alpha and beta differ in length"));
        }
        if let Some(&bad) = self
            .alpha
            .iter()
            .chain(&self.beta)
            .find(|&&v| v as usize >= d)
        {
            return Err(Error::domain(format!(
                "outcome {bad} is not a least nonnegative residue mod {d}"
            )));
        }
        Ok(())
    }

    /// Raw outcome sum over a site subset given as a bit mask (bit `j` = site `j+1`).
    pub(crate) fn combination_of_mask(&self, mask: u64) -> u64 {
        self.alpha
            .iter()
            .zip(&self.beta)
            .enumerate()
            .map(|(j, (&a, &b))| if mask >> j & 1 == 1 { b } else { a } as u64)
            .sum()
    }
}

/// `(γ, k)`: the `k`-th (1-based) size-`γ` subset of the sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetIndex {
    gamma: usize,
    k: u64,
}

impl SubsetIndex {
    pub fn new(n_parties: usize, gamma: usize, k: u64) -> Result<Self> {
        if gamma > n_parties {
            return Err(Error::domain(format!("γ = {gamma} exceeds N = {n_parties}")));
        }
        let count = binomial(n_parties, gamma);
        if k == 0 || k > count {
            return Err(Error::domain(format!(
                "k = {k} is outside 1..={count} for N = {n_parties}, γ = {gamma}"
            )));
        }
        Ok(SubsetIndex { gamma, k })
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn k(&self) -> u64 {
        self.k
    }
}

/// A least nonnegative residue modulo `4d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue4d {
    value: i64,
    modulus: i64,
}

impl Residue4d {
    /// Reduces `value` modulo `4d`.
    pub fn new(value: i64, d: usize) -> Self {
        let modulus = 4 * d as i64;
        Residue4d {
            value: value.rem_euclid(modulus),
            modulus,
        }
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn d(&self) -> usize {
        (self.modulus / 4) as usize
    }

    /// Representative in `(-2d, 2d]`.
    pub fn symmetric(&self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value - self.modulus
        } else {
            self.value
        }
    }

    pub fn is_odd(&self) -> bool {
        self.value.is_odd()
    }

    fn same_modulus(self, other: Self) -> i64 {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
        self.modulus
    }
}

impl fmt::Display for Residue4d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for Residue4d {
    type Output = Residue4d;
    fn add(self, rhs: Self) -> Self {
        let m = self.same_modulus(rhs);
        Residue4d {
            value: (self.value + rhs.value).rem_euclid(m),
            modulus: m,
        }
    }
}

impl Sub for Residue4d {
    type Output = Residue4d;
    fn sub(self, rhs: Self) -> Self {
        let m = self.same_modulus(rhs);
        Residue4d {
            value: (self.value - rhs.value).rem_euclid(m),
            modulus: m,
        }
    }
}

impl Neg for Residue4d {
    type Output = Residue4d;
    fn neg(self) -> Self {
        Residue4d {
            value: (-self.value).rem_euclid(self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul<i64> for Residue4d {
    type Output = Residue4d;
    fn mul(self, rhs: i64) -> Self {
        let m = self.modulus as i128;
        Residue4d {
            value: (self.value as i128 * rhs as i128).rem_euclid(m) as i64,
            modulus: self.modulus,
        }
    }
}

/// `binomial(n, k)`, zero when `k > n`. Saturates at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The `k`-th (1-based) size-`gamma` subset of `{1, …, n}` in lexicographic
/// order of the sorted site lists. Sites are 1-based.
pub fn subset_from_rank(n: usize, gamma: usize, k: u64) -> Result<Vec<usize>> {
    SubsetIndex::new(n, gamma, k)?;
    let mut remaining = k - 1;
    let mut out = Vec::with_capacity(gamma);
    let mut next = 1;
    for slot in 0..gamma {
        let left = gamma - slot - 1;
        // The smallest site whose block of completions still contains `remaining`.
        loop {
            let block = binomial(n - next, left);
            if remaining < block {
                break;
            }
            remaining -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    Ok(out)
}

/// Inverse of [`subset_from_rank`]; the subset may be given in any order.
pub fn rank_from_subset(n: usize, subset: &[usize]) -> Result<u64> {
    let mut sites = subset.to_vec();
    sites.sort_unstable();
    if let Some(&bad) = sites.iter().find(|&&s| s == 0 || s > n) {
        return Err(Error::domain(format!("site {bad} is outside 1..={n}")));
    }
    if sites.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("repeated site index"));
    }
    let gamma = sites.len();
    let mut rank = 0u64;
    let mut prev = 0;
    for (slot, &site) in sites.iter().enumerate() {
        let left = gamma - slot - 1;
        for skipped in prev + 1..site {
            rank += binomial(n - skipped, left);
        }
        prev = site;
    }
    Ok(rank + 1)
}

/// Bit masks of all size-`gamma` subsets of `n` sites, in rank order.
pub(crate) fn masks_in_rank_order(n: usize, gamma: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(binomial(n, gamma) as usize);
    let mut sites: Vec<usize> = (0..gamma).collect();
    loop {
        out.push(sites.iter().fold(0u64, |m, &s| m | 1 << s));
        // Advance to the lexicographic successor.
        let mut i = gamma;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if sites[i] < n - gamma + i {
                sites[i] += 1;
                for j in i + 1..gamma {
                    sites[j] = sites[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn mask_of(sites: &[usize]) -> u64 {
    sites.iter().fold(0u64, |m, &s| m | 1 << (s - 1))
}

/// `C^γ_k = Σ_{j∉I} α_j + Σ_{j∈I} β_j` with `I = subset_from_rank(N, γ, k)`.
pub fn combination_value(a: &Assignment, gamma: usize, k: u64) -> Result<u64> {
    let sites = subset_from_rank(a.n_parties(), gamma, k)?;
    Ok(a.combination_of_mask(mask_of(&sites)))
}

/// `A^γ_k = 4C^γ_k + 2γ + 4ν (mod 4d)`; requires `4ν` to be an integer.
pub fn argument_value(
    s: &BellScenario,
    a: &Assignment,
    gamma: usize,
    k: u64,
) -> Result<Residue4d> {
    s.check_assignment(a)?;
    let four_nu = require_integer_four_nu(s)?;
    let c = combination_value(a, gamma, k)? as i64;
    Ok(Residue4d::new(
        4 * c + 2 * gamma as i64 + four_nu,
        s.n_outcomes(),
    ))
}

pub(crate) fn require_integer_four_nu(s: &BellScenario) -> Result<i64> {
    s.four_nu().ok_or_else(|| Error::UnsupportedPhase {
        nu: format_nu(s.nu()),
        reason: "4ν is not an integer; only the cosine and product forms apply".into(),
    })
}

/// Argument values `A^γ_k` for every `γ`, each listed in rank order of `k`.
pub fn argument_table(s: &BellScenario, a: &Assignment) -> Result<Vec<Vec<Residue4d>>> {
    s.check_assignment(a)?;
    let four_nu = require_integer_four_nu(s)?;
    let n = s.n_parties();
    Ok((0..=n)
        .map(|gamma| {
            masks_in_rank_order(n, gamma)
                .into_iter()
                .map(|mask| {
                    let c = a.combination_of_mask(mask) as i64;
                    Residue4d::new(4 * c + 2 * gamma as i64 + four_nu, s.n_outcomes())
                })
                .collect()
        })
        .collect())
}
