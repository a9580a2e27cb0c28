use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyStats<F> {
    pub n: usize,
    /// `D*_N = sup_x |#{x_i < x}/N − x|`.
    pub star: F,
    /// `D_N`, the sup over all subintervals.
    pub extreme: F,
}

/// Exact discrepancies of a finite point set in `[0, 1)`, from the sorted
/// points.
pub fn star_discrepancy<F: Scalar>(points: &[F]) -> Result<DiscrepancyStats<F>> {
    if points.is_empty() {
        return Err(Error::invalid("discrepancy of an empty point set"));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(**p >= F::zero() && **p < F::one()))
    {
        return Err(Error::invalid(format!("point {p:?} outside [0, 1)")));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("comparable points"));
    let n = sorted.len();
    let nf = F::from_u64(n as u64);
    let mut star = F::zero();
    let (mut hi, mut lo) = (None::<F>, None::<F>);
    for (i, x) in sorted.iter().enumerate() {
        let above = F::from_u64(i as u64 + 1) / nf.clone() - x.clone();
        let below = x.clone() - F::from_u64(i as u64) / nf.clone();
        for v in [&above, &below] {
            if *v > star {
                star = v.clone();
            }
        }
        if hi.as_ref().is_none_or(|h| above > *h) {
            hi = Some(above.clone());
        }
        if lo.as_ref().is_none_or(|l| above < *l) {
            lo = Some(above);
        }
    }
    let extreme = F::one() / nf + hi.unwrap() - lo.unwrap();
    Ok(DiscrepancyStats { n, star, extreme })
}

/// Outcome of the Koksma-type bound `N D*_N ≤ 1 + 2 Σ_{i≤l} a_i` for the
/// sequence `{k s/q_l}`, `k = 0..N−1`, over every `N ≤ q_l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoksmaCheck {
    pub l: usize,
    pub q: u64,
    pub bound: u64,
    /// Largest `N D*_N` seen, as an exact fraction.
    #[serde(with = "crate::bigser::ratio")]
    pub worst: BigRational,
    pub worst_n: u64,
    pub holds: bool,
}

/// `N D*_N` at every `N = 1..=q` for `{k step/q}`, exactly.
///
/// All points sit on the grid `j/q`, so the supremum is attained at
/// `x = j/q` from either side: `q N D*_N = max_j max(|q c_j − N j|,
/// |q (c_j + o_j) − N j|)` with `c_j` the points below `j/q` and `o_j` those
/// equal to it.
pub fn scaled_star_discrepancies(step: u64, q: u64) -> Vec<u64> {
    let qu = q as usize;
    let mut occ = vec![0u64; qu];
    let mut out = Vec::with_capacity(qu);
    let mut pos = 0u64;
    for n in 1..=q {
        occ[pos as usize] += 1;
        pos = (pos + step) % q;
        let mut below = 0u64;
        let mut worst = 0u64;
        for (j, &o) in occ.iter().enumerate() {
            let nj = n * j as u64;
            worst = worst
                .max((q * below).abs_diff(nj))
                .max((q * (below + o)).abs_diff(nj));
            below += o;
        }
        out.push(worst);
    }
    out
}

/// Check the bound at level `l ≥ 1` for `{k q_{l−1}/q_l}` and for the
/// signed variant `{k (−1)^{l−1} q_{l−1}/q_l}` that appears in the block
/// decomposition.
pub fn koksma_check(cf: &ContinuedFraction, l: usize) -> Result<KoksmaCheck> {
    if l == 0 || l > cf.depth() {
        return Err(Error::invalid(format!(
            "level {l} outside 1..={}",
            cf.depth()
        )));
    }
    let q = cf.q()[l]
        .to_u64()
        .filter(|&q| q <= 1 << 20)
        .ok_or_else(|| {
            Error::Resource(format!(
                "q_{l} = {} too large for the quadratic-time check",
                cf.q()[l]
            ))
        })?;
    let step = cf.q()[l - 1].to_u64().unwrap() % q;
    let bound = 1 + 2
        * (1..=l)
            .map(|i| cf.a(i).to_u64().unwrap_or(u64::MAX / 4))
            .sum::<u64>();
    let mut worst = (0u64, 1u64);
    for s in [step, (q - step) % q] {
        for (i, v) in scaled_star_discrepancies(s, q).into_iter().enumerate() {
            if v > worst.0 {
                worst = (v, i as u64 + 1);
            }
        }
    }
    let holds = worst.0 <= bound * q;
    Ok(KoksmaCheck {
        l,
        q,
        bound,
        worst: BigRational::new(BigInt::from(worst.0), BigInt::from(q)),
        worst_n: worst.1,
        holds,
    })
}
