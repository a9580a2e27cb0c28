use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{AlphaValue, ContinuedFraction};
use crate::error::{Error, Result};

/// Deepest 7a construction allowed: `a_5 ≈ q_4^7` already has ~450 digits.
pub const MAX_LEVELS_7A: usize = 5;
/// Deepest 7b construction allowed: `a_3 > q_2^100` has ~10^4 bits.
pub const MAX_LEVELS_7B: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// `a_1 = 1`, `a_{l+1} = q_l^7`; `levels` counts all quotients.
    Triangle7a,
    /// `a_1 = 2`, `a_{l+1}` the least integer `> q_l^100` whose parity makes
    /// `p_l` even at the next odd index; `levels` counts the large quotients.
    Disc7b,
}

/// Slopes with huge, minimal admissible partial quotients. The result is
/// symbolic: these α have no closed form.
pub fn counterexample_alpha(kind: CounterexampleKind, levels: usize) -> Result<ContinuedFraction> {
    if levels == 0 {
        return Err(Error::invalid("levels must be at least 1"));
    }
    let quotients = match kind {
        CounterexampleKind::Triangle7a => {
            if levels > MAX_LEVELS_7A {
                return Err(Error::Resource(format!(
                    "triangle7a levels {levels} > {MAX_LEVELS_7A}"
                )));
            }
            let mut a = vec![BigInt::one()];
            let (mut q_prev, mut q) = (BigInt::one(), BigInt::one());
            while a.len() < levels {
                let next = q.pow(7);
                let q_next = &next * &q + &q_prev;
                a.push(next);
                q_prev = std::mem::replace(&mut q, q_next);
            }
            a
        }
        CounterexampleKind::Disc7b => {
            if levels > MAX_LEVELS_7B {
                return Err(Error::Resource(format!(
                    "disc7b levels {levels} > {MAX_LEVELS_7B}"
                )));
            }
            let mut a = vec![BigInt::from(2)];
            let (mut p_prev, mut p) = (BigInt::from(0), BigInt::one());
            let (mut q_prev, mut q) = (BigInt::one(), BigInt::from(2));
            for _ in 0..levels {
                // Index of the quotient being chosen is l + 1 = a.len() + 1.
                let index = a.len() + 1;
                let mut next = q.pow(100) + 1;
                if p.is_odd() {
                    // p_{l+1} = a p_l + p_{l−1} ≡ a + p_{l−1}. At an odd index
                    // aim for p_{l+1} even; before one, make p_l odd so the
                    // following step keeps control of the parity.
                    let want_odd_p = index % 2 == 0;
                    let p_next: BigInt = &next + &p_prev;
                    let p_next_odd = p_next.is_odd();
                    if p_next_odd != want_odd_p {
                        next += 1;
                    }
                }
                let p_next = &next * &p + &p_prev;
                let q_next = &next * &q + &q_prev;
                a.push(next);
                p_prev = std::mem::replace(&mut p, p_next);
                q_prev = std::mem::replace(&mut q, q_next);
            }
            a
        }
    };
    ContinuedFraction::from_quotients(quotients, AlphaValue::Symbolic)
}
