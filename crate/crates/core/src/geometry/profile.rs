use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Disc, TorusSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One linear piece of a chord profile on `[x0, x1)`, with the one-sided
/// limits `v0` at `x0` and `v1` at `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<F> {
    pub x0: F,
    pub x1: F,
    pub v0: F,
    pub v1: F,
}

impl<F: Scalar> Piece<F> {
    fn at(&self, y: &F) -> F {
        self.v0.clone()
            + (self.v1.clone() - self.v0.clone()) * (y.clone() - self.x0.clone())
                / (self.x1.clone() - self.x0.clone())
    }

    fn integral(&self) -> F {
        (self.x1.clone() - self.x0.clone()) * (self.v0.clone() + self.v1.clone()) / F::from_i64(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape<F> {
    /// Exact breakpoint list of a polygon profile, in increasing order and
    /// covering the support without gaps.
    Pieces(Vec<Piece<F>>),
    /// Disc profile `T(start + z) = (2h/width)·√(z(width − z))`.
    Dome { start: F, width: F, height: F },
}

/// `T_S(y)`, the time a slope-α line with offset `y` spends in `S`, on a
/// lifted support `[B_1, B_2)` with `B_1 ∈ [0, 1)`.
///
/// The offset `y` here is the lifted one: the original line offset is
/// `y + lift`. Periodizing over integer shifts gives `τ_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordProfile<F> {
    pub alpha: F,
    pub support: (F, F),
    pub lift: BigInt,
    pub shape: ProfileShape<F>,
    /// False when a polygon edge has slope α, which makes `T_S` jump.
    pub continuous: bool,
}

impl<F: Scalar> ChordProfile<F> {
    /// `T_S` at a lifted offset; zero outside the support.
    pub fn chord(&self, y: &F) -> F {
        if *y < self.support.0 || *y >= self.support.1 {
            return F::zero();
        }
        match &self.shape {
            ProfileShape::Pieces(pieces) => {
                let i = pieces.partition_point(|p| p.x0 <= *y);
                if i == 0 {
                    return F::zero();
                }
                let p = &pieces[i - 1];
                if *y < p.x1 {
                    p.at(y)
                } else {
                    F::zero()
                }
            }
            ProfileShape::Dome {
                start,
                width,
                height,
            } => {
                let z = y.clone() - start.clone();
                let rad = z.clone() * (width.clone() - z);
                let root = rad
                    .sqrt()
                    .expect("dome profiles exist only in tiers with square roots");
                F::from_i64(2) * height.clone() * root / width.clone()
            }
        }
    }

    /// `τ_S(x) = Σ_m T_S(x + m)`.
    pub fn evaluate(&self, x: &F) -> F {
        let (lo, hi) = &self.support;
        let mut y = (x.clone() - lo.clone()).fract() + lo.clone();
        let mut total = F::zero();
        while y < *hi {
            total = total + self.chord(&y);
            y = y + F::one();
        }
        total
    }

    /// `∫_0^1 τ_S`, which equals the measure of the set.
    pub fn integral(&self) -> Result<F> {
        match &self.shape {
            ProfileShape::Pieces(pieces) => {
                Ok(pieces.iter().fold(F::zero(), |acc, p| acc + p.integral()))
            }
            ProfileShape::Dome { width, height, .. } => {
                let pi = F::pi().ok_or_else(|| Error::unsupported("π unavailable"))?;
                Ok(pi * width.clone() * height.clone() / F::from_i64(4))
            }
        }
    }

    /// Sorted breakpoints (polygon profiles) in lifted coordinates.
    pub fn breakpoints(&self) -> Vec<F> {
        match &self.shape {
            ProfileShape::Pieces(pieces) => {
                let mut v: Vec<F> = pieces.iter().map(|p| p.x0.clone()).collect();
                if let Some(last) = pieces.last() {
                    v.push(last.x1.clone());
                }
                v
            }
            ProfileShape::Dome { start, width, .. } => {
                vec![start.clone(), start.clone() + width.clone()]
            }
        }
    }
}

/// Build the profile `τ_S` of a set for slope `alpha`.
///
/// Polygon profiles are exact: breakpoints are the vertex offsets
/// `v_y − α v_x`, and each piece is fixed by two interior evaluations of the
/// crossing formula, so one-sided limits (and jumps from edges of slope α)
/// come out exactly.
pub fn tau_profile<F: Scalar>(set: &TorusSet<F>, alpha: &F) -> Result<ChordProfile<F>> {
    if *alpha <= F::zero() {
        return Err(Error::invalid("slope must be positive"));
    }
    match set {
        TorusSet::Polygon(poly) => {
            let mut bps = poly.line_offsets(alpha);
            bps.sort_by(|a, b| a.partial_cmp(b).expect("comparable offsets"));
            bps.dedup();
            let lift = bps[0].floor_to_bigint();
            let shift = F::from_bigint(&lift);
            let third = F::one() / F::from_i64(3);
            let mut pieces = Vec::with_capacity(bps.len() - 1);
            for w in bps.windows(2) {
                let (u, v) = (&w[0], &w[1]);
                let h = (v.clone() - u.clone()) * third.clone();
                let f1 = set.chord_length(&(u.clone() + h.clone()), alpha)?;
                let f2 = set.chord_length(&(u.clone() + h.clone() + h), alpha)?;
                pieces.push(Piece {
                    x0: u.clone() - shift.clone(),
                    x1: v.clone() - shift.clone(),
                    v0: f1.clone() + f1.clone() - f2.clone(),
                    v1: f2.clone() + f2 - f1,
                });
            }
            let support = (pieces[0].x0.clone(), pieces[pieces.len() - 1].x1.clone());
            Ok(ChordProfile {
                alpha: alpha.clone(),
                support,
                lift,
                shape: ProfileShape::Pieces(pieces),
                continuous: !poly.has_edge_of_slope(alpha),
            })
        }
        TorusSet::Disc(d) => {
            let (start, width, height) = dome_params(d, alpha)?;
            let lift = start.floor_to_bigint();
            let start = start - F::from_bigint(&lift);
            let end = start.clone() + width.clone();
            Ok(ChordProfile {
                alpha: alpha.clone(),
                support: (start.clone(), end),
                lift,
                shape: ProfileShape::Dome {
                    start,
                    width,
                    height,
                },
                continuous: true,
            })
        }
    }
}

/// Offset of the first tangent line, support width `2r√(1+α²)`, and peak
/// height `2r/√(1+α²)`.
fn dome_params<F: Scalar>(d: &Disc<F>, alpha: &F) -> Result<(F, F, F)> {
    let norm = (F::one() + alpha.clone() * alpha.clone())
        .sqrt()
        .ok_or_else(|| {
            Error::unsupported(format!(
                "disc profiles need square roots, unavailable in the {} tier",
                F::MODE
            ))
        })?;
    let c0 = d.center.y.clone() - alpha.clone() * d.center.x.clone();
    let half = d.radius.clone() * norm.clone();
    let two = F::from_i64(2);
    Ok((
        c0 - half.clone(),
        two.clone() * half,
        two * d.radius.clone() / norm,
    ))
}

/// Hölder-type growth bound `T(z) ≤ c z^{1/m}` near both ends of a dome,
/// valid for `0 ≤ z < eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub eps: f64,
    pub m: f64,
    pub c: f64,
}

/// Growth certificate of a disc profile, `c = 8/√(k(1+α²))` with curvature
/// `k = 1/r` and `m = 2`, verified on a grid of `10^4` points at each end.
pub fn dome_growth_certificate(disc: &Disc<f64>, alpha: f64) -> Result<GrowthCertificate> {
    let r = disc.radius;
    let k = 1.0 / r;
    let cert = GrowthCertificate {
        eps: r * (1.0 + alpha * alpha).sqrt(),
        m: 2.0,
        c: 8.0 / (k * (1.0 + alpha * alpha)).sqrt(),
    };
    let (_, width, height) = dome_params(disc, &alpha)?;
    let t = |z: f64| 2.0 * height * (z * (width - z)).max(0.0).sqrt() / width;
    const GRID: usize = 10_000;
    for i in 0..=GRID {
        let z = cert.eps * i as f64 / GRID as f64;
        let bound = cert.c * z.powf(1.0 / cert.m);
        for v in [t(z), t(width - z)] {
            if v > bound * (1.0 + 1e-12) {
                return Err(Error::InternalConsistency(format!(
                    "disc growth bound fails at z = {z}: T = {v} > {bound}"
                )));
            }
        }
    }
    Ok(cert)
}
