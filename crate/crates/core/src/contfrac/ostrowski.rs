use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ContinuedFraction;
use crate::error::{Error, Result};

/// Digits `b_0..b_s` with `N = Σ b_i q_i`.
///
/// Only the greedy expansion (largest denominator first) is canonical. It is
/// characterised by `0 ≤ b_i ≤ a_{i+1}`, `b_s > 0`, and
/// `Σ_{j≤i} b_j q_j < q_{i+1}` for every `i`. The empty digit list is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OstrowskiExpansion {
    #[serde(with = "crate::bigser::ints")]
    pub digits: Vec<BigInt>,
}

impl OstrowskiExpansion {
    /// Highest index `s` with a nonzero digit.
    pub fn top(&self) -> Option<usize> {
        self.digits.len().checked_sub(1)
    }

    /// `n(l) = Σ_{i<l} b_i q_i`.
    pub fn prefix_value(&self, cf: &ContinuedFraction, l: usize) -> BigInt {
        self.digits
            .iter()
            .zip(cf.q())
            .take(l)
            .map(|(b, q)| b * q)
            .sum()
    }
}

/// Greedy expansion of `n`. The continued fraction must satisfy `q_D > n`.
pub fn ostrowski_expand(n: &BigInt, cf: &ContinuedFraction) -> Result<OstrowskiExpansion> {
    if n.is_negative() {
        return Err(Error::invalid("Ostrowski expansion of a negative integer"));
    }
    let q = cf.q();
    if &q[cf.depth()] <= n {
        let need = (0..).find(|&d| {
            // Denominators at least double every two steps, so this terminates.
            let qd = fib_lower_bound(d);
            &qd > n
        });
        return Err(Error::invalid(format!(
            "continued fraction of depth {} has q_D = {} ≤ N = {n}; more quotients are needed (depth {} always suffices)",
            cf.depth(),
            q[cf.depth()],
            need.unwrap_or(usize::MAX)
        )));
    }
    if n.is_zero() {
        return Ok(OstrowskiExpansion { digits: Vec::new() });
    }
    let mut rest = n.clone();
    let top = q.iter().rposition(|qi| qi <= n).expect("q_0 = 1 ≤ N");
    let mut digits = vec![BigInt::zero(); top + 1];
    for i in (0..=top).rev() {
        if rest.is_zero() {
            break;
        }
        let (b, r) = rest.div_rem(&q[i]);
        digits[i] = b;
        rest = r;
    }
    Ok(OstrowskiExpansion { digits })
}

/// `Σ b_i q_i`, after validating that the digits are greedy-canonical.
pub fn ostrowski_value(exp: &OstrowskiExpansion, cf: &ContinuedFraction) -> Result<BigInt> {
    let digits = &exp.digits;
    if digits.len() > cf.depth() {
        return Err(Error::invalid(format!(
            "{} digits need a continued fraction of depth ≥ {}",
            digits.len(),
            digits.len()
        )));
    }
    if let Some(last) = digits.last() {
        if last.is_zero() {
            return Err(Error::invalid("leading digit b_s must be positive"));
        }
    }
    let q = cf.q();
    let mut total = BigInt::zero();
    for (i, b) in digits.iter().enumerate() {
        if b.is_negative() || b > cf.a(i + 1) {
            return Err(Error::invalid(format!(
                "digit b_{i} = {b} outside [0, a_{}] = [0, {}]",
                i + 1,
                cf.a(i + 1)
            )));
        }
        total += b * &q[i];
        if total >= q[i + 1] {
            return Err(Error::invalid(format!(
                "digits up to b_{i} sum to {total} ≥ q_{} = {}; not the greedy expansion",
                i + 1,
                q[i + 1]
            )));
        }
    }
    Ok(total)
}

/// The Fibonacci number `F_{d+1}`, a lower bound for any `q_d`.
fn fib_lower_bound(d: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(1), BigInt::from(1));
    for _ in 0..d {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}
