//! Maximal local-realistic bounds by constraint counting.
//!
//! The argument values `A^γ_k` of an optimal assignment collapse to one value
//! per `γ` (an "argument term") and the terms form an arithmetic sequence
//! mod `4d`. Fixing the two terms with the largest degeneracy `binomial(N, γ)`
//! at their maximum constraints `±1` determines the common difference and
//! with it every other term; the bound is the resulting cotangent sum.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::{self, SearchOptions};
use crate::representations::{cotangent_term, inv_pow2, ResidueTable};
use crate::scalar::Scalar;
use crate::scenario::{binomial, format_nu, Assignment, BellScenario, Residue4d};
use crate::tolerance;
use crate::Nu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: usize) -> Self {
        if v.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// The most degenerate `γ` values (`gamma1`) and, for even `N`, the runners-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSelection {
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
}

impl GammaSelection {
    pub fn gamma1_parities(&self) -> Vec<Parity> {
        self.gamma1.iter().map(|&g| Parity::of(g)).collect()
    }

    pub fn gamma2_parities(&self) -> Vec<Parity> {
        self.gamma2.iter().map(|&g| Parity::of(g)).collect()
    }
}

pub fn select_gammas(n: usize) -> Result<GammaSelection> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    Ok(if n.is_even() {
        let mid = n / 2;
        GammaSelection {
            gamma1: vec![mid],
            gamma2: vec![mid - 1, mid + 1],
        }
    } else {
        GammaSelection {
            gamma1: vec![(n - 1) / 2, n.div_ceil(2)],
            gamma2: Vec::new(),
        }
    })
}

fn odd_four_nu(nu: Nu) -> Result<i64> {
    let x = nu * Nu::from_integer(4);
    if !x.is_integer() || x.to_integer().is_even() {
        return Err(Error::UnsupportedPhase {
            nu: format_nu(nu),
            reason: "maximum constraints need 4ν to be an odd integer".into(),
        });
    }
    Ok(x.to_integer())
}

/// Target residue (`+1` or `-1`, mod `4d`) that makes the `γ` cotangent term
/// equal `cot(π/4d)`: `(-1)^((2γ + 4ν − 1)/2)`.
pub fn max_constraint(gamma: usize, nu: Nu) -> Result<i64> {
    let c = odd_four_nu(nu)?;
    let exponent = (2 * gamma as i64 + c - 1) / 2;
    Ok(if exponent.is_even() { 1 } else { -1 })
}

/// Argument terms `A^{γ±z} ≡ A^γ ± zD (mod 4d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArgumentSequence {
    pub anchor_gamma: usize,
    pub anchor_value: Residue4d,
    pub common_difference: Residue4d,
}

impl ArgumentSequence {
    pub fn term(&self, gamma: usize) -> Residue4d {
        self.anchor_value + self.common_difference * (gamma as i64 - self.anchor_gamma as i64)
    }

    pub fn terms(&self, n: usize) -> Vec<Residue4d> {
        (0..=n).map(|g| self.term(g)).collect()
    }
}

/// All `N + 1` argument terms from one anchor and the common difference.
pub fn propagate_sequence(
    n: usize,
    anchor_gamma: usize,
    anchor_value: Residue4d,
    difference: Residue4d,
) -> Result<Vec<Residue4d>> {
    if anchor_gamma > n {
        return Err(Error::domain(format!("anchor γ = {anchor_gamma} exceeds N = {n}")));
    }
    if anchor_value.modulus() != difference.modulus() {
        return Err(Error::domain("anchor and difference use different moduli"));
    }
    Ok(ArgumentSequence {
        anchor_gamma,
        anchor_value,
        common_difference: difference,
    }
    .terms(n))
}

/// Which neighbour of the central `γ1` receives the second maximum
/// constraint when `N` is even. Odd `N` always uses its two central values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchoring {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSolution<T> {
    pub sequence: ArgumentSequence,
    pub terms: Vec<Residue4d>,
    /// `(lower γ, upper γ)` carrying the maximum constraints.
    pub constrained: (usize, usize),
    pub value: T,
}

/// The counting bound for any phase with odd argument values.
pub fn constraint_bound<T: Scalar>(
    n: usize,
    d: usize,
    nu: Nu,
    anchoring: Anchoring,
) -> Result<ConstraintSolution<T>> {
    BellScenario::new(n, d, nu)?;
    odd_four_nu(nu)?;
    let sel = select_gammas(n)?;
    let (lo, hi) = if n.is_even() {
        let mid = sel.gamma1[0];
        match anchoring {
            Anchoring::Below => (mid - 1, mid),
            Anchoring::Above => (mid, mid + 1),
        }
    } else {
        (sel.gamma1[0], sel.gamma1[1])
    };
    let target_lo = max_constraint(lo, nu)?;
    let target_hi = max_constraint(hi, nu)?;
    let sequence = ArgumentSequence {
        anchor_gamma: lo,
        anchor_value: Residue4d::new(target_lo, d),
        common_difference: Residue4d::new(target_hi - target_lo, d),
    };
    let terms = sequence.terms(n);
    let sum = terms.iter().enumerate().fold(T::zero(), |acc, (g, &arg)| {
        acc + T::of_u64(binomial(n, g)) * cotangent_term::<T>(arg)
    });
    Ok(ConstraintSolution {
        sequence,
        terms,
        constrained: (lo, hi),
        value: sum * inv_pow2::<T>(n) - T::one(),
    })
}

fn cot_odd<T: Scalar>(odd: i64, d: usize) -> T {
    (T::PI() * T::of_i64(odd) / T::of_i64(4 * d as i64)).tan().recip()
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!("d = {d}: at least two outcomes are required")));
    }
    Ok(())
}

/// Bound of `G^{1/4}_N` for even `N`:
/// `2^-N [Σ_{z=0}^{N/2-1} (-1)^z C(N+1, N/2-z) cot(π(2z+1)/4d) + (-1)^{N/2} cot(π(N+1)/4d)] − 1`.
pub fn closed_bound_even<T: Scalar>(n: usize, d: usize) -> Result<T> {
    if n == 0 || n.is_odd() {
        return Err(Error::domain(format!("closed_bound_even needs an even N ≥ 2, got {n}")));
    }
    check_d(d)?;
    let half = n / 2;
    let sign = |z: usize| if z.is_even() { T::one() } else { -T::one() };
    let body = (0..half).fold(T::zero(), |acc, z| {
        acc + sign(z) * T::of_u64(binomial(n + 1, half - z)) * cot_odd::<T>(2 * z as i64 + 1, d)
    });
    let tail = sign(half) * cot_odd::<T>(n as i64 + 1, d);
    Ok((body + tail) * inv_pow2::<T>(n) - T::one())
}

/// Bound of `G^{1/4}_N` for odd `N`:
/// `2^{1-N} Σ_{z=0}^{(N-1)/2} (-1)^z C(N, (N-1)/2 - z) cot(π(2z+1)/4d) − 1`.
pub fn closed_bound_odd<T: Scalar>(n: usize, d: usize) -> Result<T> {
    if n.is_even() {
        return Err(Error::domain(format!("closed_bound_odd needs an odd N, got {n}")));
    }
    check_d(d)?;
    let top = (n - 1) / 2;
    let body = (0..=top).fold(T::zero(), |acc, z| {
        let sign = if z.is_even() { T::one() } else { -T::one() };
        acc + sign * T::of_u64(binomial(n, top - z)) * cot_odd::<T>(2 * z as i64 + 1, d)
    });
    Ok(body * inv_pow2::<T>(n - 1) - T::one())
}

/// Best arithmetic sequence of argument terms over every anchor and every
/// common difference, not only `D = ±2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceOptimum<T> {
    pub value: T,
    /// `A^0` of the optimal sequence.
    pub first_term: Residue4d,
    pub common_difference: Residue4d,
}

/// Maximum of `2^-N Σ_γ C(N, γ) cot-term(A^0 + γD) − 1` over all `A^0 ≡ 4ν`
/// and `D ≡ 2 (mod 4)`. Every such sequence is realized by an assignment
/// with constant `β_j − α_j`, so this is a lower bound on the true maximum
/// that is at least the `D = ±2` counting bound.
pub fn sequence_bound<T: Scalar>(n: usize, d: usize, nu: Nu) -> Result<SequenceOptimum<T>> {
    BellScenario::new(n, d, nu)?;
    let c = odd_four_nu(nu)?;
    let mut best: Option<SequenceOptimum<T>> = None;
    for x in 0..d as i64 {
        let first_term = Residue4d::new(4 * x + c, d);
        for delta in 0..d as i64 {
            let common_difference = Residue4d::new(4 * delta + 2, d);
            let sum = (0..=n).fold(T::zero(), |acc, g| {
                acc + T::of_u64(binomial(n, g)) * cotangent_term::<T>(first_term + common_difference * g as i64)
            });
            let value = sum * inv_pow2::<T>(n) - T::one();
            if best.is_none_or(|b| value > b.value) {
                best = Some(SequenceOptimum {
                    value,
                    first_term,
                    common_difference,
                });
            }
        }
    }
    Ok(best.expect("d ≥ 2 gives at least one candidate"))
}

/// Assignment realizing a sequence: `α = (x, 0, …)`, `β_j = α_j + δ`.
pub fn sequence_assignment(s: &BellScenario, first_term: Residue4d, common_difference: Residue4d) -> Result<Assignment> {
    let c = odd_four_nu(s.nu())?;
    let d = s.n_outcomes();
    let n = s.n_parties();
    let x = (first_term.value() - c).div_euclid(4).rem_euclid(d as i64) as u32;
    let delta = (common_difference.value() - 2).div_euclid(4).rem_euclid(d as i64) as u32;
    let mut alpha = vec![0u32; n];
    alpha[0] = x;
    let beta = alpha.iter().map(|&a| (a + delta) % d as u32).collect();
    Assignment::new(alpha, beta, d)
}

/// Closed-form bound of `G^{1/4}_N` for either parity of `N`.
pub fn closed_bound<T: Scalar>(n: usize, d: usize) -> Result<T> {
    if n.is_even() {
        closed_bound_even(n, d)
    } else {
        closed_bound_odd(n, d)
    }
}

/// `cot(π/4d) − 1`: every cotangent term at its maximum, constraints ignored.
pub fn trial_bound<T: Scalar>(d: usize) -> Result<T> {
    check_d(d)?;
    Ok(cot_odd::<T>(1, d) - T::one())
}

/// Every subset term at its own maximum, for any phase:
/// `Σ_γ C(N, γ) · max_C term(4C + 2γ + 4ν)`. Equals [`trial_bound`] at `ν = 1/4`.
pub fn scenario_trial_bound<T: Scalar>(s: &BellScenario) -> T {
    let table = ResidueTable::<T>::new(s);
    let m = 4 * s.n_outcomes();
    (0..=s.n_parties()).fold(T::zero(), |acc, g| {
        let best = (0..s.n_outcomes())
            .map(|c| table.value_at(4 * c + 2 * g % m))
            .fold(T::neg_infinity(), T::max);
        acc + T::of_u64(binomial(s.n_parties(), g)) * best
    })
}

/// `trial_bound(d) / (d − 1)`.
pub fn trial_ratio<T: Scalar>(d: usize) -> Result<T> {
    Ok(trial_bound::<T>(d)? / T::of_i64(d as i64 - 1))
}

/// Svetlichny-Collins bound in cosine form.
///
/// Even `N`: `2^{-(N-1)/2} [Σ_{z=0}^{N/2-1} C(N+1, N/2-z) cos(π(2z+1)/4) + cos(π(N+1)/4)]`.
/// Odd `N`: `2^{-(N-2)/2} Σ_{z=0}^{(N-1)/2} C(N, (N-1)/2-z) cos(π(2z+1)/4)`.
///
/// Each cotangent term `±cot(πA/8)` of the two-outcome bound equals
/// `2cos(πA/4) + 1`, so the sign carried by the cotangent is already inside
/// the cosine and no alternating factor appears.
pub fn svetlichny_bound<T: Scalar>(n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::domain(format!("Svetlichny bound needs N ≥ 2, got {n}")));
    }
    let cos_odd = |k: i64| (T::PI() * T::of_i64(k) / T::of_i64(4)).cos();
    if n.is_even() {
        let half = n / 2;
        let body = (0..half).fold(T::zero(), |acc, z| {
            acc + T::of_u64(binomial(n + 1, half - z)) * cos_odd(2 * z as i64 + 1)
        });
        Ok((body + cos_odd(n as i64 + 1)) * T::sqrt2_pow(1 - n as i32))
    } else {
        let top = (n - 1) / 2;
        let body = (0..=top).fold(T::zero(), |acc, z| {
            acc + T::of_u64(binomial(n, top - z)) * cos_odd(2 * z as i64 + 1)
        });
        Ok(body * T::sqrt2_pow(2 - n as i32))
    }
}

/// Phase and `√2` power with `SC_N = (√2)^k G^ν_N`:
/// `ν = (1−N)/4, k = N−1` for even `N`; `ν = −N/4, k = N−2` for odd `N`.
pub fn svetlichny_form(n: usize) -> (Nu, i32) {
    if n.is_even() {
        (Nu::new(1 - n as i64, 4), n as i32 - 1)
    } else {
        (Nu::new(-(n as i64), 4), n as i32 - 2)
    }
}

/// An assignment attaining the counting bound of an odd-argument scenario.
///
/// Tries the congruence solution first: equal `β_j − α_j = δ` at every site
/// makes every `A^1_k − A^0_1 = 4δ + 2` the same, so `δ` is fixed by the
/// common difference and `Σα` by the anchor. Falls back to a seeded random
/// search and then to exhaustive search.
pub fn witness_assignment(s: &BellScenario) -> Result<Assignment> {
    let n = s.n_parties();
    let d = s.n_outcomes();
    let c = odd_four_nu(s.nu())?;
    let solution = constraint_bound::<f64>(n, d, s.nu(), Anchoring::Below)?;
    let target = solution.value;
    let table = ResidueTable::<f64>::new(s);
    let attains = |a: &Assignment| {
        (table.eval(a) - target).abs() <= tolerance::BOUND_ABS * target.abs().max(1.0)
    };

    let seq = solution.sequence;
    let diff = seq.common_difference.symmetric();
    let delta = ((diff - 2) / 4).rem_euclid(d as i64) as u32;
    let a0 = seq.term(0).value() - c;
    debug_assert_eq!(a0.rem_euclid(4), 0);
    let alpha_sum = (a0.div_euclid(4)).rem_euclid(d as i64) as u32;
    let mut alpha = vec![0u32; n];
    alpha[0] = alpha_sum;
    let beta = alpha.iter().map(|&x| (x + delta) % d as u32).collect();
    let analytic = Assignment::new(alpha, beta, d)?;
    if attains(&analytic) {
        return Ok(analytic);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x6265_6c6c);
    for _ in 0..tolerance::WITNESS_RANDOM_TRIES {
        let alpha = (0..n).map(|_| rng.gen_range(0..d as u32)).collect();
        let beta = (0..n).map(|_| rng.gen_range(0..d as u32)).collect();
        let a = Assignment::new(alpha, beta, d)?;
        if attains(&a) {
            return Ok(a);
        }
    }

    let options = SearchOptions {
        witness_cap: 1,
        ..SearchOptions::default()
    };
    let found = oracle::brute_force_max(s, |a: &Assignment| table.eval(a), &options)?;
    match found.argmax.first() {
        Some(a) if attains(a) => Ok(a.clone()),
        _ => Err(Error::NotFound(format!(
            "{s}: exhaustive maximum {} differs from the counting bound {target}",
            found.max_value
        ))),
    }
}

/// Closed form, oracle value, witnesses, and reference values for a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub scenario: BellScenario,
    pub closed_form: Option<T>,
    pub brute_force: Option<T>,
    pub witnesses: Vec<Assignment>,
    pub quantum_reference: Option<T>,
    pub trial_bound: T,
}

impl<T: Scalar> BoundReport<T> {
    /// Closed form and trial bound of `G^{1/4}_N`, with the `d − 1` reference.
    pub fn quarter(n: usize, d: usize) -> Result<Self> {
        let scenario = BellScenario::quarter(n, d)?;
        Ok(BoundReport {
            scenario,
            closed_form: Some(closed_bound(n, d)?),
            brute_force: None,
            witnesses: Vec::new(),
            quantum_reference: Some(T::of_i64(d as i64 - 1)),
            trial_bound: trial_bound(d)?,
        })
    }

    /// `trial_bound / quantum_reference`.
    pub fn ratio(&self) -> Option<T> {
        self.quantum_reference.map(|q| self.trial_bound / q)
    }

    /// Oracle never exceeds the closed form; the trial bound dominates it.
    pub fn is_consistent(&self) -> bool {
        let tol = T::of_f64(tolerance::BOUND_ABS);
        let oracle_ok = match (self.closed_form, self.brute_force) {
            (Some(c), Some(b)) => b <= c + tol,
            _ => true,
        };
        let trial_ok = self.closed_form.is_none_or(|c| self.trial_bound + tol >= c);
        oracle_ok && trial_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::eval_product;

    #[test]
    fn gamma_selection_table() {
        let s = select_gammas(4).unwrap();
        assert_eq!(s.gamma1, vec![2]);
        assert_eq!(s.gamma2, vec![1, 3]);
        assert_eq!(s.gamma1_parities(), vec![Parity::Even]);
        assert_eq!(s.gamma2_parities(), vec![Parity::Odd, Parity::Odd]);
        let s = select_gammas(6).unwrap();
        assert_eq!(s.gamma1_parities(), vec![Parity::Odd]);
        assert_eq!(s.gamma2_parities(), vec![Parity::Even, Parity::Even]);
        let s = select_gammas(5).unwrap();
        assert_eq!(s.gamma1, vec![2, 3]);
        assert!(s.gamma2.is_empty());
        assert_eq!(select_gammas(1).unwrap().gamma1, vec![0, 1]);
        assert!(select_gammas(0).is_err());
        for n in 1..30 {
            let s = select_gammas(n).unwrap();
            let top = binomial(n, s.gamma1[0]);
            assert!((0..=n).all(|g| binomial(n, g) <= top));
            for &g in &s.gamma2 {
                assert!(binomial(n, g) <= top);
            }
        }
    }

    #[test]
    fn max_constraints() {
        let quarter = Nu::new(1, 4);
        assert_eq!(max_constraint(0, quarter).unwrap(), 1);
        assert_eq!(max_constraint(2, quarter).unwrap(), 1);
        assert_eq!(max_constraint(1, quarter).unwrap(), -1);
        assert_eq!(max_constraint(3, quarter).unwrap(), -1);
        // Even-N Svetlichny-Collins phase: (-1)^(γ − N/2).
        for n in [2usize, 4, 6, 8] {
            let nu = Nu::new(1 - n as i64, 4);
            for g in 0..=n {
                let expect = if (g + n / 2).is_even() { 1 } else { -1 };
                assert_eq!(max_constraint(g, nu).unwrap(), expect);
            }
        }
        // Odd N: (-1)^(γ − (N+1)/2), the only sign reachable since A ≡ 2γ − N (mod 4).
        for n in [3usize, 5, 7] {
            let nu = Nu::new(-(n as i64), 4);
            for g in 0..=n {
                let expect: i64 = if (g + n.div_ceil(2)).is_even() { 1 } else { -1 };
                assert_eq!(expect.rem_euclid(4), (2 * g as i64 - n as i64).rem_euclid(4));
                assert_eq!(max_constraint(g, nu).unwrap(), expect);
            }
        }
        assert!(max_constraint(0, Nu::new(1, 2)).is_err());
    }

    #[test]
    fn sequence_propagation() {
        let d = 5;
        // Even N: A^{2t} ≡ 1, A^{2t-1} ≡ -1 give D ≡ 2.
        let terms = propagate_sequence(4, 2, Residue4d::new(1, d), Residue4d::new(2, d)).unwrap();
        assert_eq!(terms[1].symmetric(), -1);
        for (g, t) in terms.iter().enumerate() {
            assert_eq!(*t, Residue4d::new(1 + 2 * (g as i64 - 2), d));
        }
        // Odd N: D ≡ -2.
        let terms = propagate_sequence(5, 2, Residue4d::new(1, d), Residue4d::new(-2, d)).unwrap();
        assert_eq!(terms[3].symmetric(), -1);
        assert_eq!(terms[0].value(), 5);
        let flat = propagate_sequence(3, 1, Residue4d::new(7, d), Residue4d::new(0, d)).unwrap();
        assert!(flat.iter().all(|t| t.value() == 7));
        assert!(propagate_sequence(3, 4, Residue4d::new(1, d), Residue4d::new(0, d)).is_err());
    }

    #[test]
    fn closed_forms_equal_counting_solution() {
        for n in 1..=24 {
            for d in 2..=12 {
                let closed: f64 = closed_bound(n, d).unwrap();
                for anchoring in [Anchoring::Below, Anchoring::Above] {
                    let counted = constraint_bound::<f64>(n, d, Nu::new(1, 4), anchoring).unwrap();
                    assert!(
                        (closed - counted.value).abs() < 1e-9 * closed.abs().max(1.0),
                        "N={n} d={d}: {closed} vs {}",
                        counted.value
                    );
                    let diff = counted.sequence.common_difference.symmetric();
                    assert!(diff == 2 || diff == -2);
                }
            }
        }
    }

    #[test]
    fn closed_form_parity_errors() {
        assert!(closed_bound_even::<f64>(3, 2).is_err());
        assert!(closed_bound_odd::<f64>(4, 2).is_err());
        assert!(closed_bound_even::<f64>(2, 1).is_err());
    }

    #[test]
    fn small_closed_forms_match_enumeration() {
        for (n, d) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let s = BellScenario::quarter(n, d).unwrap();
            let mut best = f64::NEG_INFINITY;
            for idx in 0..(d as u64).pow(2 * n as u32) {
                let a = oracle::index_to_assignment(idx, n, d).unwrap();
                best = best.max(eval_product(&s, &a).unwrap());
            }
            let closed: f64 = closed_bound(n, d).unwrap();
            assert!((best - closed).abs() < 1e-9, "N={n} d={d}: {best} vs {closed}");
        }
    }

    #[test]
    fn sequence_bound_dominates_and_is_realized() {
        for n in 1..=9 {
            for d in 2..=7 {
                let best = sequence_bound::<f64>(n, d, Nu::new(1, 4)).unwrap();
                let closed: f64 = closed_bound(n, d).unwrap();
                assert!(best.value >= closed - 1e-12);
                let s = BellScenario::quarter(n, d).unwrap();
                let a = sequence_assignment(&s, best.first_term, best.common_difference).unwrap();
                let v: f64 = eval_product(&s, &a).unwrap();
                assert!((v - best.value).abs() < 1e-9, "N={n} d={d}");
            }
        }
        // Odd d admits D = 2d, worth 1/sin(π/2d) − 1 for every N.
        let best = sequence_bound::<f64>(6, 3, Nu::new(1, 4)).unwrap();
        assert!((best.value - 1.0).abs() < 1e-12);
        assert_eq!(best.common_difference.value(), 6);
        assert!(closed_bound::<f64>(6, 3).unwrap() < 0.75);
    }

    #[test]
    fn trial_bound_values() {
        let t: f64 = trial_bound(2).unwrap();
        let cot_pi_8 = 1.0 / (std::f64::consts::PI / 8.0).tan();
        assert!((cot_pi_8 - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((t - 2f64.sqrt()).abs() < 1e-12);
        for d in 3..200 {
            assert!(trial_ratio::<f64>(d).unwrap() > 0.0);
        }
        let far: f64 = trial_ratio(1_000_000).unwrap();
        assert!((far - 4.0 / std::f64::consts::PI).abs() < 1e-5);
        assert!(trial_bound::<f64>(1).is_err());
    }

    #[test]
    fn general_trial_bound_reduces_to_cotangent_form() {
        for n in 1..6 {
            for d in 2..7 {
                let s = BellScenario::quarter(n, d).unwrap();
                let general: f64 = scenario_trial_bound(&s);
                assert!((general - trial_bound::<f64>(d).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn svetlichny_bounds_are_one() {
        for n in 2..=8 {
            let b: f64 = svetlichny_bound(n).unwrap();
            assert!((b - 1.0).abs() < 1e-12, "N={n}: {b}");
            let (nu, k) = svetlichny_form(n);
            for anchoring in [Anchoring::Below, Anchoring::Above] {
                let counted = constraint_bound::<f64>(n, 2, nu, anchoring).unwrap();
                assert!((counted.value * f64::sqrt2_pow(k) - 1.0).abs() < 1e-12);
            }
        }
        assert!(svetlichny_bound::<f64>(1).is_err());
    }

    #[test]
    fn analytic_witnesses_attain_the_bound() {
        let chsh_like = BellScenario::quarter(2, 2).unwrap();
        let w = witness_assignment(&chsh_like).unwrap();
        let v: f64 = eval_product(&chsh_like, &w).unwrap();
        assert!((v - closed_bound::<f64>(2, 2).unwrap()).abs() < 1e-9);
        for n in 1..=10 {
            for d in 2..=5 {
                let s = BellScenario::quarter(n, d).unwrap();
                let w = witness_assignment(&s).unwrap();
                let v: f64 = eval_product(&s, &w).unwrap();
                let closed: f64 = closed_bound(n, d).unwrap();
                assert!((v - closed).abs() < 1e-9, "N={n} d={d}");
                let diag = oracle::verify_constraints(&s, &w).unwrap();
                assert!(diag.constant_in_k && diag.arithmetic);
                assert_eq!(diag.common_difference.map(i64::abs), Some(2));
            }
        }
    }

    #[test]
    fn report_invariants() {
        let r = BoundReport::<f64>::quarter(3, 4).unwrap();
        assert!(r.is_consistent());
        assert!(r.trial_bound > r.closed_form.unwrap());
        assert_eq!(r.quantum_reference, Some(3.0));
    }
}
