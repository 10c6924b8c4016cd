//! Named two-outcome Bell functions and their generic forms.
//!
//! Each function is evaluated directly from its functional definition on
//! `±1` outcomes `A_j = (-1)^{α_j}`, `B_j = (-1)^{β_j}`. A [`Reduction`]
//! states `f = (√2)^k · G^ν_N` and is only returned after the identity has
//! been checked on every assignment.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex;

use crate::bounds::{constraint_bound, Anchoring};
use crate::error::{Error, Result};
use crate::oracle::{self, index_to_assignment, SearchOptions, SearchResult};
use crate::representations::{pm_outcomes, sign_vector, CorrelationVector, ResidueTable};
use crate::scalar::Scalar;
use crate::scenario::{format_nu, Assignment, BellScenario};
use crate::tolerance;
use crate::Nu;

/// Largest `N` verified exhaustively.
pub const MAX_VERIFY_PARTIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionName {
    Chsh,
    Mermin,
    Svetlichny1,
    Svetlichny2,
    Ardehali,
    MerminCollins,
    SvetlichnyCollins,
}

impl FunctionName {
    pub const ALL: [FunctionName; 7] = [
        FunctionName::Chsh,
        FunctionName::Mermin,
        FunctionName::Svetlichny1,
        FunctionName::Svetlichny2,
        FunctionName::Ardehali,
        FunctionName::MerminCollins,
        FunctionName::SvetlichnyCollins,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionName::Chsh => "chsh",
            FunctionName::Mermin => "mermin",
            FunctionName::Svetlichny1 => "svetlichny1",
            FunctionName::Svetlichny2 => "svetlichny2",
            FunctionName::Ardehali => "ardehali",
            FunctionName::MerminCollins => "mermin-collins",
            FunctionName::SvetlichnyCollins => "svetlichny-collins",
        }
    }

    /// Party counts the definition covers.
    pub fn supports(self, n: usize) -> bool {
        match self {
            FunctionName::Chsh => n == 2,
            FunctionName::Svetlichny1 | FunctionName::Svetlichny2 => n == 3,
            FunctionName::Mermin | FunctionName::MerminCollins => n >= 1,
            FunctionName::Ardehali | FunctionName::SvetlichnyCollins => n >= 2,
        }
    }
}

impl fmt::Display for FunctionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let name = match key.as_str() {
            "chsh" => FunctionName::Chsh,
            "mermin" | "m" => FunctionName::Mermin,
            "svetlichny1" | "s1" | "s1-3" => FunctionName::Svetlichny1,
            "svetlichny2" | "s2" | "s2-3" => FunctionName::Svetlichny2,
            "ardehali" => FunctionName::Ardehali,
            "mermin-collins" | "mc" => FunctionName::MerminCollins,
            "svetlichny-collins" | "sc" => FunctionName::SvetlichnyCollins,
            _ => return Err(Error::UnknownName(s.to_string())),
        };
        Ok(name)
    }
}

/// A named function at a fixed party count, always with `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NamedFunction {
    name: FunctionName,
    n: usize,
}

impl NamedFunction {
    pub fn new(name: FunctionName, n: usize) -> Result<Self> {
        if !name.supports(n) {
            return Err(Error::domain(format!("{name} is not defined for N = {n}")));
        }
        Ok(NamedFunction { name, n })
    }

    pub fn name(&self) -> FunctionName {
        self.name
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn eval<T: Scalar>(&self, a: &Assignment) -> Result<T> {
        if a.n_parties() != self.n {
            return Err(Error::domain(format!(
                "{} expects {} parties, assignment has {}",
                self.name,
                self.n,
                a.n_parties()
            )));
        }
        let (av, bv) = pm_outcomes(a)?;
        Ok(self.eval_pm(&av, &bv))
    }

    /// Evaluation on `±1` outcomes.
    pub fn eval_pm<T: Scalar>(&self, a: &[i8], b: &[i8]) -> T {
        match self.name {
            FunctionName::Chsh => chsh(a, b),
            FunctionName::Mermin => mermin(a, b),
            FunctionName::Svetlichny1 => svetlichny1(a, b),
            FunctionName::Svetlichny2 => svetlichny2(a, b),
            FunctionName::Ardehali => ardehali(a, b),
            FunctionName::MerminCollins => mermin_collins_pair::<T>(a, b).0,
            FunctionName::SvetlichnyCollins => svetlichny_collins(a, b),
        }
    }

    /// The same function with every `A_j` and `B_j` exchanged.
    pub fn eval_primed<T: Scalar>(&self, a: &Assignment) -> Result<T> {
        self.eval(&a.swapped())
    }
}

fn pm<T: Scalar>(v: i8) -> T {
    T::of_i64(i64::from(v))
}

/// `A1A2 + A1B2 + B1A2 − B1B2`.
pub fn chsh<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    let v = a[0] * a[1] + a[0] * b[1] + b[0] * a[1] - b[0] * b[1];
    pm(v)
}

/// `(1/2i)[Π(A_j + iB_j) − Π(A_j − iB_j)]`, the imaginary part of the first product.
pub fn mermin<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    let product = a
        .iter()
        .zip(b)
        .fold(Complex::new(1i64, 0), |acc, (&x, &y)| acc * Complex::new(i64::from(x), i64::from(y)));
    let conj = a
        .iter()
        .zip(b)
        .fold(Complex::new(1i64, 0), |acc, (&x, &y)| acc * Complex::new(i64::from(x), -i64::from(y)));
    let diff = product - conj;
    debug_assert_eq!(diff.re, 0);
    T::of_i64(diff.im) / T::of_i64(2)
}

fn triple(a: &[i8], b: &[i8], pattern: [bool; 3]) -> i8 {
    (0..3).map(|j| if pattern[j] { b[j] } else { a[j] }).product()
}

/// Signs of the eight triple products grouped by how many `B`s they hold.
fn svetlichny3(a: &[i8], b: &[i8], signs: [i8; 4]) -> i8 {
    let mut total = 0;
    for mask in 0u8..8 {
        let pattern = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
        let gamma = mask.count_ones() as usize;
        total += signs[gamma] * triple(a, b, pattern);
    }
    total
}

/// `A1A2A3 + B1A2A3 + A1B2A3 + A1A2B3 − B1B2A3 − B1A2B3 − A1B2B3 − B1B2B3`.
pub fn svetlichny1<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    pm(svetlichny3(a, b, [1, 1, -1, -1]))
}

/// `A1A2A3 − B1A2A3 − A1B2A3 − A1A2B3 − B1B2A3 − B1A2B3 − A1B2B3 + B1B2B3`.
pub fn svetlichny2<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    pm(svetlichny3(a, b, [1, -1, -1, 1]))
}

/// `√2 A_N (−,0,+,0,…)·C_{N−1} + √2 B_N (0,+,0,−,…)·C_{N−1}`.
pub fn ardehali<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    let n = a.len();
    let corr = CorrelationVector::from_outcomes(&a[..n - 1], &b[..n - 1]);
    const FIRST: [i64; 4] = [-1, 0, 1, 0];
    const SECOND: [i64; 4] = [0, 1, 0, -1];
    let dot = |pattern: [i64; 4]| -> i64 {
        corr.entries()
            .iter()
            .enumerate()
            .map(|(g, &c)| pattern[g % 4] * c)
            .sum()
    };
    let v = i64::from(a[n - 1]) * dot(FIRST) + i64::from(b[n - 1]) * dot(SECOND);
    T::SQRT_2() * T::of_i64(v)
}

/// `(MC_N, MC'_N)` from `MC_1 = A_1` and
/// `MC_N = ½MC_{N−1}(A_N + B_N) + ½MC'_{N−1}(A_N − B_N)`.
pub fn mermin_collins_pair<T: Scalar>(a: &[i8], b: &[i8]) -> (T, T) {
    let half = T::one() / T::of_i64(2);
    let mut mc: T = pm(a[0]);
    let mut primed: T = pm(b[0]);
    for (&x, &y) in a.iter().zip(b).skip(1) {
        let (x, y) = (pm::<T>(x), pm::<T>(y));
        let next = half * mc * (x + y) + half * primed * (x - y);
        let next_primed = half * primed * (y + x) + half * mc * (y - x);
        mc = next;
        primed = next_primed;
    }
    (mc, primed)
}

/// `MC_N` for even `N`, `½(MC_N + MC'_N)` for odd `N`.
pub fn svetlichny_collins<T: Scalar>(a: &[i8], b: &[i8]) -> T {
    let (mc, primed) = mermin_collins_pair::<T>(a, b);
    if a.len().is_multiple_of(2) {
        mc
    } else {
        (mc + primed) / T::of_i64(2)
    }
}

/// Phase and `√2` exponent `k` with `f = (√2)^k G^ν_N`, as tabulated.
pub fn table_reduction(name: FunctionName, n: usize) -> Result<(Nu, i32)> {
    NamedFunction::new(name, n)?;
    let n_i = n as i64;
    let n32 = n as i32;
    Ok(match name {
        FunctionName::Chsh => (Nu::new(-1, 4), 3),
        FunctionName::Mermin => (Nu::new(-1, 2), 2 * (n32 - 1)),
        FunctionName::Svetlichny1 => (Nu::new(-1, 4), 5),
        FunctionName::Svetlichny2 => (Nu::new(1, 4), 5),
        FunctionName::Ardehali => (Nu::from_integer(1), 2 * n32 - 1),
        FunctionName::MerminCollins => (Nu::new(1 - n_i, 4), n32 - 1),
        FunctionName::SvetlichnyCollins if n.is_multiple_of(2) => (Nu::new(1 - n_i, 4), n32 - 1),
        FunctionName::SvetlichnyCollins => (Nu::new(-n_i, 4), n32 - 2),
    })
}

/// Prefactor of the sign-vector expression `f = p · S^ν · C_N`, as printed.
pub fn printed_sign_prefactor<T: Scalar>(name: FunctionName, n: usize) -> Result<T> {
    NamedFunction::new(name, n)?;
    let n32 = n as i32;
    Ok(match name {
        FunctionName::Chsh
        | FunctionName::Mermin
        | FunctionName::Svetlichny1
        | FunctionName::Svetlichny2 => T::one(),
        FunctionName::Ardehali => T::SQRT_2(),
        FunctionName::MerminCollins => T::sqrt2_pow(-n32),
        FunctionName::SvetlichnyCollins if n.is_multiple_of(2) => T::sqrt2_pow(-n32),
        FunctionName::SvetlichnyCollins => T::sqrt2_pow(-(n32 + 1)),
    })
}

/// Least-squares `√2` exponent relating a function to a GBF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFit<T> {
    /// `Σ f·g / Σ g²` over all assignments.
    pub scale: T,
    /// Nearest `k` with `(√2)^k ≈ scale`.
    pub sqrt2_power: i32,
    /// Largest `|f − scale·g|` over all assignments.
    pub residual: T,
}

fn all_assignments(n: usize) -> Result<impl Iterator<Item = Assignment>> {
    if n > MAX_VERIFY_PARTIES {
        return Err(Error::domain(format!(
            "exhaustive verification is limited to N ≤ {MAX_VERIFY_PARTIES}, got {n}"
        )));
    }
    let total = 1u64 << (2 * n);
    Ok((0..total).map(move |i| index_to_assignment(i, n, 2).expect("index in range")))
}

pub fn fit_scale<T: Scalar, F>(f: F, gbf: &BellScenario) -> Result<ScaleFit<T>>
where
    F: Fn(&Assignment) -> Result<T>,
{
    let table = ResidueTable::<T>::new(gbf);
    let mut pairs = Vec::new();
    for a in all_assignments(gbf.n_parties())? {
        pairs.push((f(&a)?, table.eval(&a)));
    }
    let (num, den) = pairs
        .iter()
        .fold((T::zero(), T::zero()), |(num, den), &(x, g)| (num + x * g, den + g * g));
    if den <= T::zero() {
        return Err(Error::domain("the generic function vanishes on every assignment"));
    }
    let scale = num / den;
    let sqrt2_power = if scale > T::zero() {
        (T::of_i64(2) * scale.log2()).round().to_i32().unwrap_or(i32::MAX)
    } else {
        i32::MIN
    };
    let residual = pairs
        .iter()
        .map(|&(x, g)| (x - scale * g).abs())
        .fold(T::zero(), T::max);
    Ok(ScaleFit {
        scale,
        sqrt2_power,
        residual,
    })
}

/// A verified identity `named = (√2)^k · G^ν_N` at `d = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub name: FunctionName,
    pub n: usize,
    pub nu: Nu,
    pub sqrt2_power: i32,
    pub scale: T,
    pub gbf_form: BellScenario,
    pub verified: bool,
    /// Largest pointwise discrepancy seen during verification.
    pub max_error: T,
    pub fit: ScaleFit<T>,
}

impl<T: Scalar> Reduction<T> {
    /// Counting bound of the scaled form, for phases with odd arguments.
    pub fn counting_bound(&self) -> Option<T> {
        if !self.gbf_form.has_odd_arguments() {
            return None;
        }
        constraint_bound::<T>(self.n, 2, self.nu, Anchoring::Below)
            .ok()
            .map(|c| c.value * self.scale)
    }
}

/// Tabulated reduction, checked on all `2^{2N}` assignments.
pub fn reduce_to_gbf<T: Scalar>(name: FunctionName, n: usize) -> Result<Reduction<T>> {
    let f = NamedFunction::new(name, n)?;
    let (nu, k) = table_reduction(name, n)?;
    let gbf_form = BellScenario::new(n, 2, nu)?;
    let scale = T::sqrt2_pow(k);
    let table = ResidueTable::<T>::new(&gbf_form);
    let tol = T::of_f64(tolerance::BOUND_ABS);
    let mut max_error = T::zero();
    for a in all_assignments(n)? {
        let named: T = f.eval(&a)?;
        let generic = scale * table.eval(&a);
        let err = (named - generic).abs();
        if err > tol {
            return Err(Error::ReductionMismatch {
                name: name.to_string(),
                n,
                counterexample: a,
                detail: format!(
                    "named value {named} but (√2)^{k}·G^{} = {generic}",
                    format_nu(nu)
                ),
            });
        }
        max_error = max_error.max(err);
    }
    let fit = fit_scale(|a: &Assignment| f.eval::<T>(a), &gbf_form)?;
    if fit.sqrt2_power != k {
        return Err(Error::ReductionMismatch {
            name: name.to_string(),
            n,
            counterexample: Assignment::zeros(n),
            detail: format!("fitted √2 exponent {} differs from tabulated {k}", fit.sqrt2_power),
        });
    }
    Ok(Reduction {
        name,
        n,
        nu,
        sqrt2_power: k,
        scale,
        gbf_form,
        verified: true,
        max_error,
        fit,
    })
}

/// Printed sign-vector expression compared with the functional evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct SignFormCheck<T> {
    pub name: FunctionName,
    pub n: usize,
    pub printed_prefactor: T,
    /// Prefactor implied by the verified reduction.
    pub implied_prefactor: T,
    /// Equal pointwise with the printed prefactor.
    pub exact: bool,
    /// Equal pointwise after normalizing both sides at the all-zero assignment.
    pub proportional: bool,
    /// The all-zero value vanished, so no normalization was possible.
    pub flagged: bool,
}

pub fn check_sign_form<T: Scalar>(name: FunctionName, n: usize) -> Result<SignFormCheck<T>> {
    let f = NamedFunction::new(name, n)?;
    let (nu, k) = table_reduction(name, n)?;
    let c = (nu * Nu::from_integer(4)).to_integer();
    let sv = sign_vector(c);
    let printed_prefactor = printed_sign_prefactor::<T>(name, n)?;
    let implied_prefactor = T::sqrt2_pow(k) * sv.scale::<T>(n);
    let sign_dot = |a: &Assignment| -> Result<T> {
        Ok(T::of_i64(sv.dot(&CorrelationVector::from_assignment(a)?)))
    };
    let zero = Assignment::zeros(n);
    let f0: T = f.eval(&zero)?;
    let s0 = sign_dot(&zero)?;
    let tol = T::of_f64(tolerance::BOUND_ABS);
    let flagged = f0.abs() <= tol || s0.abs() <= tol;
    let mut exact = true;
    let mut proportional = !flagged;
    for a in all_assignments(n)? {
        let fv: T = f.eval(&a)?;
        let sd = sign_dot(&a)?;
        if (fv - printed_prefactor * sd).abs() > tol {
            exact = false;
        }
        if !flagged && (fv / f0 - sd / s0).abs() > tol {
            proportional = false;
        }
    }
    Ok(SignFormCheck {
        name,
        n,
        printed_prefactor,
        implied_prefactor,
        exact,
        proportional,
        flagged,
    })
}

/// Exhaustive local bound of a named function.
pub fn local_bound<T: Scalar>(name: FunctionName, n: usize, opts: &SearchOptions) -> Result<SearchResult<T>> {
    let f = NamedFunction::new(name, n)?;
    let s = BellScenario::new(n, 2, table_reduction(name, n)?.0)?;
    oracle::brute_force_max(&s, |a: &Assignment| f.eval::<T>(a).expect("two-outcome assignment"), opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantumTarget {
    Named(FunctionName),
    Scenario(BellScenario),
}

/// `2√2` for CHSH; `d − 1` for a generic scenario.
pub fn quantum_reference<T: Scalar>(target: QuantumTarget) -> Result<T> {
    match target {
        QuantumTarget::Named(FunctionName::Chsh) => Ok(T::of_i64(2) * T::SQRT_2()),
        QuantumTarget::Named(other) => Err(Error::UnknownName(format!(
            "no quantum reference value is provided for {other}"
        ))),
        QuantumTarget::Scenario(s) => Ok(T::of_i64(s.n_outcomes() as i64 - 1)),
    }
}

fn kron(a: &Matrix2<Complex<f64>>, b: &Matrix2<Complex<f64>>) -> Matrix4<Complex<f64>> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `2√2 (σ₊⊗σ₋ + σ₋⊗σ₊)`.
pub fn chsh_operator() -> Matrix4<f64> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let raise = Matrix2::new(zero, one, zero, zero);
    let lower = Matrix2::new(zero, zero, one, zero);
    let op = (kron(&raise, &lower) + kron(&lower, &raise)) * Complex::new(2.0 * std::f64::consts::SQRT_2, 0.0);
    op.map(|z| z.re)
}

/// `(1/√2) e^{−iπ/4} (σx + iσy) ⊗ (e^{iπ/4}σx + e^{−iπ/4}σy) + h.c.`
pub fn chsh_operator_factored() -> Matrix4<Complex<f64>> {
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let sx = Matrix2::new(zero, one, one, zero);
    let sy = Matrix2::new(zero, -i, i, zero);
    let q = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let first = sx + sy * i;
    let second = sx * q + sy * q.conj();
    let term = kron(&first, &second) * (q.conj() / std::f64::consts::SQRT_2);
    term + term.adjoint()
}

pub fn chsh_operator_max_eigenvalue() -> f64 {
    SymmetricEigen::new(chsh_operator())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}
