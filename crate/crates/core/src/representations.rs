//! Equivalent evaluations of a generic Bell function on one assignment:
//! the complex product, the cosine sum, the cotangent sum (odd arguments
//! only) and, for two outcomes with `ν = c/4`, the sign-vector inner product.

use num_complex::Complex;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scenario::{
    format_nu, masks_in_rank_order, require_integer_four_nu, Assignment, BellScenario, Residue4d,
};
use crate::Nu;

/// `q mod m` for a rational `q` and positive integer `m`, as a float.
fn rational_mod<T: Scalar>(q: Nu, m: i64) -> T {
    let modulus = Nu::from_integer(m);
    let mut r = q % modulus;
    if r < Nu::zero() {
        r += modulus;
    }
    T::of_i64(*r.numer()) / T::of_i64(*r.denom())
}

/// `cos(π x / (2d))` for a rational `x`, with `x` reduced mod `4d` first.
fn cos_quarter_turns<T: Scalar>(x: Nu, d: usize) -> T {
    let two_d = T::of_i64(2 * d as i64);
    (T::PI() * rational_mod::<T>(x, 4 * d as i64) / two_d).cos()
}

/// Direct complex evaluation:
/// `2^-N Σ_{n=1}^{d-1} ω^{νn} Π_j (A_j^n + ω^{n/2} B_j^n) + c.c.`
pub fn eval_product<T: Scalar>(s: &BellScenario, a: &Assignment) -> Result<T> {
    s.check_assignment(a)?;
    let d = s.n_outcomes() as i64;
    let tau = T::PI() + T::PI();
    let unit = |turns: T| Complex::from_polar(T::one(), tau * turns);
    let mut total = Complex::<T>::zero();
    for n in 1..d {
        // ω^{νn}: phase νn/d turns, νn reduced mod d exactly.
        let mut term = unit(rational_mod::<T>(s.nu() * Nu::from_integer(n), d) / T::of_i64(d));
        for (&alpha, &beta) in a.alpha().iter().zip(a.beta()) {
            let a_n = unit(T::of_i64((n * alpha as i64).rem_euclid(d)) / T::of_i64(d));
            // ω^{n/2} B^n = exp(iπ n(1 + 2β)/d)
            let b_n = unit(
                T::of_i64((n * (1 + 2 * beta as i64)).rem_euclid(2 * d)) / T::of_i64(2 * d),
            );
            term = term * (a_n + b_n);
        }
        total = total + term;
    }
    let two = T::of_i64(2);
    Ok(two * total.re / two.powi(s.n_parties() as i32))
}

/// Cosine form: `2^{1-N} Σ_n Σ_γ Σ_k cos[(nπ/2d)(4C^γ_k + 2γ + 4ν)]`.
pub fn eval_cosine<T: Scalar>(s: &BellScenario, a: &Assignment) -> Result<T> {
    s.check_assignment(a)?;
    let n_parties = s.n_parties();
    let d = s.n_outcomes();
    let four_nu = s.nu() * Nu::from_integer(4);
    let mut total = T::zero();
    for gamma in 0..=n_parties {
        for mask in masks_in_rank_order(n_parties, gamma) {
            let arg = Nu::from_integer(4 * a.combination_of_mask(mask) as i64 + 2 * gamma as i64)
                + four_nu;
            for n in 1..d as i64 {
                total = total + cos_quarter_turns::<T>(arg * Nu::from_integer(n), d);
            }
        }
    }
    Ok(total / T::of_i64(2).powi(n_parties as i32 - 1))
}

/// `Σ_{n=1}^{d-1} cos(nθ)` with `θ = (π/2d)(4m + r)`, in closed form.
///
/// For odd `4m + r` the sum is `±cot(θ/2)/2 − 1/2` (plus for `r = 1`, minus
/// for `r = 3`); `r = 2` gives 0; `r = 0` gives `d − 1` when `θ` is a multiple
/// of `2π` and `−1` otherwise.
pub fn dimension_sum<T: Scalar>(m: i64, r: u8, d: usize) -> Result<T> {
    if d < 2 {
        return Err(Error::domain(format!("d = {d}: at least two outcomes are required")));
    }
    let half = T::of_f64(0.5);
    // cot has period π, so the argument is reduced mod 4d first.
    let k = (4 * m + r as i64).rem_euclid(4 * d as i64);
    let half_theta = || T::PI() * T::of_i64(k) / T::of_i64(4 * d as i64);
    Ok(match r {
        0 if m.rem_euclid(d as i64) == 0 => T::of_i64(d as i64 - 1),
        0 => -T::one(),
        1 => (half_theta().tan().recip() - T::one()) * half,
        2 => T::zero(),
        3 => (-half_theta().tan().recip() - T::one()) * half,
        _ => return Err(Error::domain(format!("residue class r = {r} is not in 0..=3"))),
    })
}

/// Value of one cotangent term for an odd argument residue `A`:
/// `cot(±πA/4d)`, plus when `A ≡ 1 (mod 4)` and minus when `A ≡ 3 (mod 4)`.
pub fn cotangent_term<T: Scalar>(arg: Residue4d) -> T {
    debug_assert!(arg.is_odd());
    let x = T::PI() * T::of_i64(arg.value()) / T::of_i64(arg.modulus());
    let cot = x.tan().recip();
    if arg.value() % 4 == 1 {
        cot
    } else {
        -cot
    }
}

/// Cotangent form `2^-N Σ_γ Σ_k cot[±(π/4d) A^γ_k] − 1`, defined when every
/// argument value is odd (`4ν` an odd integer).
pub fn eval_cotangent<T: Scalar>(s: &BellScenario, a: &Assignment) -> Result<T> {
    s.check_assignment(a)?;
    let four_nu = require_integer_four_nu(s)?;
    if four_nu.is_even() {
        return Err(Error::RepresentationInapplicable(format!(
            "ν = {} gives even argument values; the cotangent form needs odd ones",
            format_nu(s.nu())
        )));
    }
    let n = s.n_parties();
    let mut total = T::zero();
    for gamma in 0..=n {
        for mask in masks_in_rank_order(n, gamma) {
            let c = a.combination_of_mask(mask) as i64;
            let arg = Residue4d::new(4 * c + 2 * gamma as i64 + four_nu, s.n_outcomes());
            total = total + cotangent_term::<T>(arg);
        }
    }
    Ok(total / T::of_i64(2).powi(n as i32) - T::one())
}

/// Period-4 sign pattern of the correlation terms of `G^{c/4}_N` at `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    c: u8,
    period4: [i8; 4],
}

impl SignVector {
    /// `c mod 8`.
    pub fn class(&self) -> u8 {
        self.c
    }

    pub fn period4(&self) -> [i8; 4] {
        self.period4
    }

    /// Entries for `γ = 0..=n`.
    pub fn expand(&self, n: usize) -> Vec<i8> {
        (0..=n).map(|g| self.period4[g % 4]).collect()
    }

    /// `2^{-(N-1/2)}` for odd `c`, `2^{-(N-1)}` for even `c`.
    pub fn scale<T: Scalar>(&self, n: usize) -> T {
        let n = n as i32;
        if self.c % 2 == 1 {
            T::sqrt2_pow(1 - 2 * n)
        } else {
            T::sqrt2_pow(2 - 2 * n)
        }
    }

    /// `S · C` (without the scale).
    pub fn dot(&self, corr: &CorrelationVector) -> i64 {
        corr.entries
            .iter()
            .enumerate()
            .map(|(g, &v)| self.period4[g % 4] as i64 * v)
            .sum()
    }
}

/// The sign of the coefficient of `C(γ)` is the sign of `cos(π(c + 2γ)/4)`.
pub fn sign_vector(c: i64) -> SignVector {
    let c = c.rem_euclid(8) as u8;
    let mut period4 = [0i8; 4];
    for (g, slot) in period4.iter_mut().enumerate() {
        *slot = match (c as usize + 2 * g) % 8 {
            0 | 1 | 7 => 1,
            2 | 6 => 0,
            _ => -1,
        };
    }
    SignVector { c, period4 }
}

/// `C(γ)`: the sum of all distinct products with exactly `γ` B-measurements,
/// for outcomes `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationVector {
    entries: Vec<i64>,
}

impl CorrelationVector {
    /// From `±1` outcomes `A_j`, `B_j`.
    pub fn from_outcomes(a: &[i8], b: &[i8]) -> Self {
        assert_eq!(a.len(), b.len());
        let mut entries = vec![1i64];
        for (&aj, &bj) in a.iter().zip(b) {
            let mut next = vec![0i64; entries.len() + 1];
            for (g, &v) in entries.iter().enumerate() {
                next[g] += v * aj as i64;
                next[g + 1] += v * bj as i64;
            }
            entries = next;
        }
        CorrelationVector { entries }
    }

    /// For a two-outcome assignment, `A_j = (-1)^{α_j}` and `B_j = (-1)^{β_j}`.
    pub fn from_assignment(a: &Assignment) -> Result<Self> {
        let (av, bv) = pm_outcomes(a)?;
        Ok(Self::from_outcomes(&av, &bv))
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

/// `(-1)^α` and `(-1)^β` as exact `±1`.
pub fn pm_outcomes(a: &Assignment) -> Result<(Vec<i8>, Vec<i8>)> {
    let pm = |v: &u32| match v {
        0 => Ok(1i8),
        1 => Ok(-1i8),
        _ => Err(Error::domain(format!("outcome {v} is not a two-outcome residue"))),
    };
    Ok((
        a.alpha().iter().map(pm).collect::<Result<_>>()?,
        a.beta().iter().map(pm).collect::<Result<_>>()?,
    ))
}

/// `G^{c/4}_N = scale · S^{c/4} · C_N` for `d = 2`.
pub fn eval_sign_form<T: Scalar>(s: &BellScenario, a: &Assignment) -> Result<T> {
    if s.n_outcomes() != 2 {
        return Err(Error::RepresentationInapplicable(format!(
            "the sign-vector form needs d = 2, got d = {}",
            s.n_outcomes()
        )));
    }
    let c = s.four_nu().ok_or_else(|| Error::UnsupportedPhase {
        nu: format_nu(s.nu()),
        reason: "ν is not a multiple of 1/4, so no sign-vector form exists".into(),
    })?;
    s.check_assignment(a)?;
    let sv = sign_vector(c);
    let corr = CorrelationVector::from_assignment(a)?;
    Ok(sv.scale::<T>(s.n_parties()) * T::of_i64(sv.dot(&corr)))
}

/// Fast evaluator for exhaustive search.
///
/// The function depends on an assignment only through how many subsets land
/// on each argument residue mod `4d`. The residue counts come from a
/// site-by-site convolution, and each residue's cosine sum over `n` is
/// tabulated once by direct summation.
#[derive(Debug, Clone)]
pub struct ResidueTable<T> {
    n_parties: usize,
    n_outcomes: usize,
    table: Vec<T>,
}

const STACK_RESIDUES: usize = 64;

impl<T: Scalar> ResidueTable<T> {
    pub fn new(s: &BellScenario) -> Self {
        let d = s.n_outcomes();
        let four_nu = s.nu() * Nu::from_integer(4);
        let norm = T::of_i64(2).powi(s.n_parties() as i32 - 1);
        let table = (0..4 * d as i64)
            .map(|r| {
                let x = Nu::from_integer(r) + four_nu;
                let sum = (1..d as i64).fold(T::zero(), |acc, n| {
                    acc + cos_quarter_turns::<T>(x * Nu::from_integer(n), d)
                });
                sum / norm
            })
            .collect();
        ResidueTable {
            n_parties: s.n_parties(),
            n_outcomes: d,
            table,
        }
    }

    /// Number of subsets hitting each integer residue `4C + 2γ (mod 4d)`.
    pub fn residue_counts(&self, a: &Assignment, counts: &mut [u64]) {
        let m = 4 * self.n_outcomes;
        debug_assert_eq!(counts.len(), m);
        debug_assert_eq!(a.n_parties(), self.n_parties);
        let mut next_buf = [0u64; STACK_RESIDUES];
        let mut heap;
        let next: &mut [u64] = if m <= STACK_RESIDUES {
            &mut next_buf[..m]
        } else {
            heap = vec![0u64; m];
            &mut heap
        };
        counts.iter_mut().for_each(|c| *c = 0);
        counts[0] = 1;
        for (&alpha, &beta) in a.alpha().iter().zip(a.beta()) {
            let shift_a = 4 * alpha as usize;
            let shift_b = (4 * beta as usize + 2) % m;
            next.iter_mut().for_each(|c| *c = 0);
            for (r, &c) in counts.iter().enumerate() {
                if c != 0 {
                    next[(r + shift_a) % m] += c;
                    next[(r + shift_b) % m] += c;
                }
            }
            counts.copy_from_slice(next);
        }
    }

    /// Contribution of one subset whose `4C + 2γ` is `r (mod 4d)`.
    pub fn value_at(&self, r: usize) -> T {
        self.table[r % self.table.len()]
    }

    pub fn eval(&self, a: &Assignment) -> T {
        let m = 4 * self.n_outcomes;
        let mut buf = [0u64; STACK_RESIDUES];
        let mut heap;
        let counts: &mut [u64] = if m <= STACK_RESIDUES {
            &mut buf[..m]
        } else {
            heap = vec![0u64; m];
            &mut heap
        };
        self.residue_counts(a, counts);
        counts
            .iter()
            .zip(&self.table)
            .filter(|(&c, _)| c != 0)
            .fold(T::zero(), |acc, (&c, &v)| acc + T::of_u64(c) * v)
    }
}

/// `1/2^N` as used by several forms.
pub(crate) fn inv_pow2<T: Scalar>(n: usize) -> T {
    T::one() / T::of_i64(2).powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_cos_sum(k: i64, d: usize) -> f64 {
        let theta = std::f64::consts::PI * k as f64 / (2.0 * d as f64);
        (1..d).map(|n| (n as f64 * theta).cos()).sum()
    }

    #[test]
    fn dimension_sum_matches_direct_summation() {
        for d in 2..=50usize {
            for m in -(4 * d as i64)..=4 * d as i64 {
                for r in 0..4u8 {
                    let closed: f64 = dimension_sum(m, r, d).unwrap();
                    let direct = direct_cos_sum(4 * m + r as i64, d);
                    assert!(
                        (closed - direct).abs() < 1e-12 * d as f64,
                        "d={d} m={m} r={r}: {closed} vs {direct}"
                    );
                }
            }
        }
        assert_eq!(dimension_sum::<f64>(0, 0, 7).unwrap(), 6.0);
        assert!(dimension_sum::<f64>(0, 4, 7).is_err());
        assert!(dimension_sum::<f64>(0, 1, 1).is_err());
    }

    #[test]
    fn chsh_product_form() {
        let s = BellScenario::new(2, 2, Nu::new(-1, 4)).unwrap();
        let scale = 2f64.powf(1.5);
        for idx in 0..16u32 {
            let bits: Vec<u32> = (0..4).map(|i| idx >> i & 1).collect();
            let a = Assignment::new(bits[..2].to_vec(), bits[2..].to_vec(), 2).unwrap();
            let pm = |v: u32| if v == 0 { 1.0 } else { -1.0 };
            let (a1, a2, b1, b2) = (pm(bits[0]), pm(bits[1]), pm(bits[2]), pm(bits[3]));
            let chsh = a1 * a2 + a1 * b2 + b1 * a2 - b1 * b2;
            let g: f64 = eval_product(&s, &a).unwrap();
            assert!((scale * g - chsh).abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_closed_form() {
        // N = 1, d = 2, ν = 1/4: G = 2^{-1}·2·Re[e^{iπ/4}(A + iB)].
        let s = BellScenario::quarter(1, 2).unwrap();
        for (alpha, beta) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let a = Assignment::new(vec![alpha], vec![beta], 2).unwrap();
            let av = if alpha == 0 { 1.0 } else { -1.0 };
            let bv = if beta == 0 { 1.0 } else { -1.0 };
            let expect = std::f64::consts::FRAC_1_SQRT_2 * (av - bv);
            let g: f64 = eval_product(&s, &a).unwrap();
            assert!((g - expect).abs() < 1e-12);
        }
        // N = 1, d = 2, ν = 0: G = Re[A + iB] = A.
        let s = BellScenario::new(1, 2, Nu::zero()).unwrap();
        let a = Assignment::new(vec![1], vec![0], 2).unwrap();
        let g: f64 = eval_cosine(&s, &a).unwrap();
        assert!((g + 1.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_witness_cosine_value() {
        // G^{1/4}_2 at the witness reaches 2/2^{3/2}; scaled, the bound 2.
        let s = BellScenario::quarter(2, 2).unwrap();
        let a = Assignment::new(vec![1, 1], vec![0, 0], 2).unwrap();
        let g: f64 = eval_cosine(&s, &a).unwrap();
        assert!((g * 2f64.powf(1.5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cotangent_single_term_maximum() {
        for d in 2..10 {
            let t: f64 = cotangent_term(Residue4d::new(1, d));
            let expect = 1.0 / (std::f64::consts::PI / (4.0 * d as f64)).tan();
            assert!((t - expect).abs() < 1e-12);
            let t: f64 = cotangent_term(Residue4d::new(-1, d));
            assert!((t - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn cotangent_rejects_even_arguments() {
        let s = BellScenario::new(2, 3, Nu::new(1, 2)).unwrap();
        let a = Assignment::zeros(2);
        assert!(matches!(
            eval_cotangent::<f64>(&s, &a),
            Err(Error::RepresentationInapplicable(_))
        ));
        let s = BellScenario::new(2, 3, Nu::new(1, 3)).unwrap();
        assert!(matches!(
            eval_cotangent::<f64>(&s, &a),
            Err(Error::UnsupportedPhase { .. })
        ));
    }

    #[test]
    fn sign_vector_periodicity() {
        assert_eq!(sign_vector(1).period4(), [1, -1, -1, 1]);
        assert_eq!(sign_vector(7).period4(), [1, 1, -1, -1]);
        assert_eq!(sign_vector(9), sign_vector(1));
        assert_eq!(sign_vector(-1), sign_vector(7));
        assert_eq!(sign_vector(1).expand(5), vec![1, -1, -1, 1, 1, -1]);
    }

    #[test]
    fn sign_form_requirements() {
        let a = Assignment::zeros(2);
        let s = BellScenario::quarter(2, 3).unwrap();
        assert!(eval_sign_form::<f64>(&s, &a).is_err());
        let s = BellScenario::new(2, 2, Nu::new(1, 3)).unwrap();
        assert!(eval_sign_form::<f64>(&s, &a).is_err());
    }

    #[test]
    fn correlation_vector_all_equal_outcomes() {
        // A = B = +1: C(γ) = binomial(2, γ).
        let c = CorrelationVector::from_assignment(&Assignment::zeros(2)).unwrap();
        assert_eq!(c.entries(), &[1, 2, 1]);
        // A = B = -1: C(γ) = binomial(2, γ)·(-1)^2.
        let a = Assignment::new(vec![1, 1], vec![1, 1], 2).unwrap();
        let c = CorrelationVector::from_assignment(&a).unwrap();
        assert_eq!(c.entries(), &[1, 2, 1]);
        // ν = 1/2 zeroes the even-γ terms: G = 2^{-1}(−C(1)) = −2/2.
        let s = BellScenario::new(2, 2, Nu::new(1, 2)).unwrap();
        let g: f64 = eval_sign_form(&s, &Assignment::zeros(2)).unwrap();
        assert!((g + 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_evaluation_agrees_coarsely() {
        let s = BellScenario::quarter(3, 3).unwrap();
        let a = Assignment::new(vec![1, 2, 0], vec![0, 2, 1], 3).unwrap();
        let g32: f32 = eval_cosine(&s, &a).unwrap();
        let g64: f64 = eval_cosine(&s, &a).unwrap();
        assert!((g32 as f64 - g64).abs() < 1e-4);
    }

    fn scenario_and_assignment() -> impl Strategy<Value = (BellScenario, Assignment)> {
        (1usize..=5, 2usize..=5, -9i64..=9).prop_flat_map(|(n, d, c)| {
            (
                proptest::collection::vec(0..d as u32, n),
                proptest::collection::vec(0..d as u32, n),
            )
                .prop_map(move |(a, b)| {
                    (
                        BellScenario::new(n, d, Nu::new(c, 4)).unwrap(),
                        Assignment::new(a, b, d).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn product_cosine_table_agree((s, a) in scenario_and_assignment()) {
            let p: f64 = eval_product(&s, &a).unwrap();
            let c: f64 = eval_cosine(&s, &a).unwrap();
            let t: f64 = ResidueTable::new(&s).eval(&a);
            prop_assert!((p - c).abs() < 1e-9, "{} vs {}", p, c);
            prop_assert!((c - t).abs() < 1e-9, "{} vs {}", c, t);
            if s.has_odd_arguments() {
                let k: f64 = eval_cotangent(&s, &a).unwrap();
                prop_assert!((c - k).abs() < 1e-9, "{} vs {}", c, k);
            }
        }

        #[test]
        fn general_phase_product_cosine((s, a) in scenario_and_assignment(), p in -7i64..7, q in 1i64..7) {
            let s = BellScenario::new(s.n_parties(), s.n_outcomes(), Nu::new(p, q)).unwrap();
            let x: f64 = eval_product(&s, &a).unwrap();
            let y: f64 = eval_cosine(&s, &a).unwrap();
            let z: f64 = ResidueTable::new(&s).eval(&a);
            prop_assert!((x - y).abs() < 1e-9);
            prop_assert!((y - z).abs() < 1e-9);
        }

        #[test]
        fn correlation_vector_parity(bits in proptest::collection::vec(any::<bool>(), 2..=16)) {
            let n = bits.len() / 2;
            let pm = |b: bool| if b { -1i8 } else { 1 };
            let a: Vec<i8> = bits[..n].iter().map(|&b| pm(b)).collect();
            let b: Vec<i8> = bits[n..2 * n].iter().map(|&b| pm(b)).collect();
            let corr = CorrelationVector::from_outcomes(&a, &b);
            for (g, &v) in corr.entries().iter().enumerate() {
                let binom = crate::scenario::binomial(n, g) as i64;
                prop_assert!(v.abs() <= binom);
                prop_assert_eq!((v - binom).rem_euclid(2), 0);
            }
        }
    }
}
