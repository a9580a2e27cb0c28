//! The continuous flow `X(t) = ({x_1 + t}, {x_2 + αt})` and its
//! distributional error `Δ_T = ∫_0^T χ_S(X(t)) dt − T λ(S)`, computed from
//! exact boundary crossings rather than by time stepping.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::brf::{birkhoff_remainder, PeriodizedFunction};
use crate::error::{Error, Result};
use crate::geometry::{tau_profile, Crossing, Point, TorusSet};
use crate::io::{fmt_f64, Csv};
use crate::scalar::{settle, Rotation, Scalar};

/// Crossings closer than this (in `f64`) are counted as coincidences.
pub const COINCIDENCE_EPS: f64 = 1e-20;

/// Cuts slope-α lines against a set, with per-set data precomputed.
#[derive(Debug, Clone)]
enum Cutter<F> {
    Polygon {
        vertices: Vec<Point<F>>,
        offsets: Vec<F>,
    },
    Disc(TorusSet<F>),
}

impl<F: Scalar> Cutter<F> {
    fn new(set: &TorusSet<F>, alpha: &F) -> Self {
        match set {
            TorusSet::Polygon(p) => Cutter::Polygon {
                vertices: p.vertices().to_vec(),
                offsets: p.line_offsets(alpha),
            },
            TorusSet::Disc(_) => Cutter::Disc(set.clone()),
        }
    }

    fn cut(&self, alpha: &F, c: &F, out: &mut Vec<Crossing<F>>) -> Result<()> {
        match self {
            Cutter::Polygon { vertices, offsets } => {
                let n = vertices.len();
                for i in 0..n {
                    let j = if i + 1 == n { 0 } else { i + 1 };
                    let (bp, bq) = (&offsets[i], &offsets[j]);
                    let above_p = bp > c;
                    if above_p == (bq > c) {
                        continue;
                    }
                    let (p, q) = (&vertices[i], &vertices[j]);
                    let x = p.x.clone()
                        + (q.x.clone() - p.x.clone()) * (bp.clone() - c.clone())
                            / (bp.clone() - bq.clone());
                    out.push(Crossing {
                        x,
                        sign: if above_p { 1 } else { -1 },
                    });
                }
                Ok(())
            }
            Cutter::Disc(set) => set.crossings(alpha, c, out),
        }
    }
}

/// A set, a slope and a starting point.
#[derive(Debug, Clone)]
pub struct Flow<F> {
    pub set: TorusSet<F>,
    pub rot: Rotation<F>,
    pub start: Point<F>,
    /// `λ(S)`.
    pub measure: F,
    /// `x_0 = {x_2 − α x_1}`, the phase of the induced rotation.
    pub x0: F,
    cutter: Cutter<F>,
}

/// Value of `Δ` at a time visited by the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Event,
    Checkpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint<F> {
    pub t: F,
    pub delta: F,
    /// `sup |Δ_s|` over `0 ≤ s ≤ t`.
    pub running_sup: F,
    /// `sup |Δ_s|` since the previous checkpoint.
    pub window_sup: F,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyTrace<F> {
    pub checkpoints: Vec<TracePoint<F>>,
    /// `sup |Δ_t|` over the whole horizon.
    pub running_sup: F,
    /// Time where the running sup was attained.
    pub sup_at: F,
    pub horizon: F,
    pub occupancy: F,
    pub delta: F,
    /// Pairs of boundary crossings closer than [`COINCIDENCE_EPS`].
    pub coincidences: u64,
}

impl<F: Scalar> DiscrepancyTrace<F> {
    /// Columns `T, delta, running_sup`.
    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&["T", "delta", "running_sup"]);
        for p in &self.checkpoints {
            csv.row([
                fmt_f64(p.t.to_f64()),
                fmt_f64(p.delta.to_f64()),
                fmt_f64(p.running_sup.to_f64()),
            ]);
        }
        csv
    }
}

/// Totals at the end of a walk.
#[derive(Debug, Clone)]
pub struct WalkTotals<F> {
    pub occupancy: F,
    pub delta: F,
    pub coincidences: u64,
}

fn split_time<F: Scalar>(t: &F, x1: &F) -> Result<(u64, F)> {
    let s = t.clone() + x1.clone();
    let k = s.floor_to_bigint();
    let k = k
        .to_u64()
        .ok_or_else(|| Error::invalid(format!("time {t:?} out of range")))?;
    Ok((k, s - F::from_u64(k)))
}

impl<F: Scalar> Flow<F> {
    pub fn new(set: &TorusSet<F>, rot: Rotation<F>, start: Point<F>) -> Result<Self> {
        if rot.alpha <= F::zero() {
            return Err(Error::invalid("flow slope must be positive"));
        }
        let unit = F::zero()..F::one();
        if !(unit.contains(&start.x) && unit.contains(&start.y)) {
            return Err(Error::invalid("start point must lie in [0,1)²"));
        }
        let measure = set.measure()?;
        let x0 = if F::EXACT {
            (start.y.clone() - rot.alpha.clone() * start.x.clone()).fract()
        } else {
            let lo = F::from_f64(rot.alpha_lo) * start.x.clone();
            (start.y.clone() - rot.alpha.clone() * start.x.clone() - lo).fract()
        };
        let cutter = Cutter::new(set, &rot.alpha);
        Ok(Flow {
            set: set.clone(),
            rot,
            start,
            measure,
            x0,
            cutter,
        })
    }

    /// Walk the trajectory on `[0, horizon]`, reporting `(t, Δ_t)` at every
    /// boundary crossing, at the end of every unit of `x`-time, and at each
    /// checkpoint. Extrema of the piecewise linear `Δ` occur only at such
    /// points.
    pub fn walk(
        &self,
        horizon: &F,
        checkpoints: &[F],
        mut visit: impl FnMut(&F, &F, Visit),
    ) -> Result<WalkTotals<F>> {
        if *horizon < F::zero() {
            return Err(Error::invalid("horizon must be non-negative"));
        }
        if checkpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("checkpoints must be sorted"));
        }
        if checkpoints.iter().any(|c| *c < F::zero() || c > horizon) {
            return Err(Error::invalid("checkpoints must lie in [0, horizon]"));
        }
        let x1 = &self.start.x;
        let alpha = &self.rot.alpha;
        let (last_unit, x_end) = split_time(horizon, x1)?;
        let cps: Vec<(u64, F)> = checkpoints
            .iter()
            .map(|c| split_time(c, x1))
            .collect::<Result<_>>()?;
        let mut next_cp = 0;

        let (mut delta, mut delta_c) = (F::zero(), F::zero());
        let (mut occ, mut occ_c) = (F::zero(), F::zero());
        let mut coincidences = 0u64;
        let mut events: Vec<Crossing<F>> = Vec::new();
        let lines_extra = alpha.floor_to_bigint().to_u64().unwrap_or(0);

        for k in 0..=last_unit {
            let xs = if k == 0 { x1.clone() } else { F::zero() };
            let xe = if k == last_unit {
                x_end.clone()
            } else {
                F::one()
            };
            let base_t = F::from_u64(k) - x1.clone();
            let yk = self.rot.orbit(&self.x0, k);
            events.clear();
            let lines = if yk.clone() + alpha.clone() - F::from_u64(lines_extra) >= F::one() {
                lines_extra + 1
            } else {
                lines_extra
            };
            for j in 0..=lines {
                self.cutter
                    .cut(alpha, &(yk.clone() - F::from_u64(j)), &mut events)?;
            }
            events.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("comparable crossings"));
            if !F::EXACT {
                coincidences += events
                    .windows(2)
                    .filter(|w| (w[1].x.clone() - w[0].x.clone()).to_f64() < COINCIDENCE_EPS)
                    .count() as u64;
            }

            let mut inside: i64 = 0;
            let mut idx = 0;
            while idx < events.len() && events[idx].x <= xs {
                inside += events[idx].sign as i64;
                idx += 1;
            }
            let mut cur = xs.clone();
            let mut advance = |to: &F, inside: i64, cur: &mut F, delta: &mut F, delta_c: &mut F| {
                let dx = to.clone() - cur.clone();
                if inside != 0 {
                    let dt = F::from_i64(inside) * dx.clone();
                    F::accumulate(&mut occ, &mut occ_c, dt.clone());
                    F::accumulate(delta, delta_c, dt);
                }
                F::accumulate(delta, delta_c, -(self.measure.clone() * dx));
                *cur = to.clone();
            };
            loop {
                let ev_x = events.get(idx).map(|e| &e.x).filter(|x| **x < xe);
                let cp_x = cps.get(next_cp).filter(|(u, _)| *u == k).map(|(_, x)| x);
                match (ev_x, cp_x) {
                    (None, None) => break,
                    (Some(ex), Some(cx)) if cx <= ex => {
                        let cx = cx.clone();
                        advance(&cx, inside, &mut cur, &mut delta, &mut delta_c);
                        visit(
                            &(base_t.clone() + cx),
                            &settle(delta.clone(), delta_c.clone()),
                            Visit::Checkpoint,
                        );
                        next_cp += 1;
                    }
                    (None, Some(cx)) => {
                        let cx = cx.clone();
                        advance(&cx, inside, &mut cur, &mut delta, &mut delta_c);
                        visit(
                            &(base_t.clone() + cx),
                            &settle(delta.clone(), delta_c.clone()),
                            Visit::Checkpoint,
                        );
                        next_cp += 1;
                    }
                    (Some(ex), _) => {
                        let ex = ex.clone();
                        advance(&ex, inside, &mut cur, &mut delta, &mut delta_c);
                        visit(
                            &(base_t.clone() + ex),
                            &settle(delta.clone(), delta_c.clone()),
                            Visit::Event,
                        );
                        inside += events[idx].sign as i64;
                        idx += 1;
                    }
                }
            }
            if cur < xe {
                advance(&xe, inside, &mut cur, &mut delta, &mut delta_c);
                visit(
                    &(base_t + xe),
                    &settle(delta.clone(), delta_c.clone()),
                    Visit::Event,
                );
            }
        }
        debug_assert_eq!(next_cp, cps.len());
        Ok(WalkTotals {
            occupancy: settle(occ, occ_c),
            delta: settle(delta, delta_c),
            coincidences,
        })
    }

    /// `∫_0^T χ_S(X(t)) dt`.
    pub fn occupancy(&self, t: &F) -> Result<F> {
        Ok(self.walk(t, &[], |_, _, _| {})?.occupancy)
    }

    /// `Δ_T`.
    pub fn delta(&self, t: &F) -> Result<F> {
        Ok(self.walk(t, &[], |_, _, _| {})?.delta)
    }

    /// `Δ` at each checkpoint, with the sup of `|Δ|` over every visited time.
    pub fn trace(&self, horizon: &F, checkpoints: &[F]) -> Result<DiscrepancyTrace<F>> {
        let mut points = Vec::with_capacity(checkpoints.len());
        let (mut sup, mut sup_at, mut window) = (F::zero(), F::zero(), F::zero());
        let totals = self.walk(horizon, checkpoints, |t, d, kind| {
            let a = d.abs();
            if a > sup {
                sup = a.clone();
                sup_at = t.clone();
            }
            if a > window {
                window = a;
            }
            if kind == Visit::Checkpoint {
                points.push(TracePoint {
                    t: t.clone(),
                    delta: d.clone(),
                    running_sup: sup.clone(),
                    window_sup: std::mem::replace(&mut window, F::zero()),
                });
            }
        })?;
        Ok(DiscrepancyTrace {
            checkpoints: points,
            running_sup: sup,
            sup_at,
            horizon: horizon.clone(),
            occupancy: totals.occupancy,
            delta: totals.delta,
            coincidences: totals.coincidences,
        })
    }

    /// `τ_S` for this flow's slope.
    pub fn tau(&self) -> Result<PeriodizedFunction<F>> {
        Ok(PeriodizedFunction::chord(tau_profile(
            &self.set,
            &self.rot.alpha,
        )?))
    }

    /// `|S_N(x_0) − Δ_T|` with `N = ⌊T⌋`, which never exceeds 4.
    pub fn equivalence_gap(&self, t: &F) -> Result<EquivalenceGap<F>> {
        let n = t
            .floor_to_bigint()
            .to_u64()
            .ok_or_else(|| Error::invalid("time out of range"))?;
        let delta = self.delta(t)?;
        let remainder = if n == 0 {
            F::zero()
        } else {
            birkhoff_remainder(&self.tau()?, &self.rot, &self.x0, n)?
        };
        let gap = (remainder.clone() - delta.clone()).abs();
        if gap > F::from_i64(4) {
            return Err(Error::InternalConsistency(format!(
                "equivalence gap {gap:?} > 4 at T = {t:?} (S_N = {remainder:?}, Δ_T = {delta:?})"
            )));
        }
        Ok(EquivalenceGap {
            n,
            remainder,
            delta,
            gap,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceGap<F> {
    pub n: u64,
    /// `S_N(x_0) = Σ_{k<N} τ_S({x_0 + kα}) − N λ(S)`.
    pub remainder: F,
    pub delta: F,
    pub gap: F,
}

/// `∫_0^T χ_S(X(t)) dt` from `start`.
pub fn occupancy<F: Scalar>(
    set: &TorusSet<F>,
    rot: &Rotation<F>,
    start: &Point<F>,
    t: &F,
) -> Result<F> {
    Flow::new(set, rot.clone(), start.clone())?.occupancy(t)
}

/// `Δ_T(S, α, x)`.
pub fn delta_t<F: Scalar>(
    set: &TorusSet<F>,
    rot: &Rotation<F>,
    start: &Point<F>,
    t: &F,
) -> Result<F> {
    Flow::new(set, rot.clone(), start.clone())?.delta(t)
}

/// See [`Flow::equivalence_gap`].
pub fn equivalence_gap<F: Scalar>(
    set: &TorusSet<F>,
    rot: &Rotation<F>,
    start: &Point<F>,
    t: &F,
) -> Result<F> {
    Ok(Flow::new(set, rot.clone(), start.clone())?
        .equivalence_gap(t)?
        .gap)
}

/// See [`Flow::trace`].
pub fn sup_trace<F: Scalar>(
    set: &TorusSet<F>,
    rot: &Rotation<F>,
    start: &Point<F>,
    horizon: &F,
    checkpoints: &[F],
) -> Result<DiscrepancyTrace<F>> {
    Flow::new(set, rot.clone(), start.clone())?.trace(horizon, checkpoints)
}

/// `Δ_T` by a midpoint Riemann sum with step `h`, for testing only.
pub fn riemann_delta(
    set: &TorusSet<f64>,
    alpha: f64,
    start: &Point<f64>,
    t: f64,
    h: f64,
) -> Result<f64> {
    let n = (t / h).round() as u64;
    let h = t / n as f64;
    let (mut inside, mut carry) = (0.0, 0.0);
    for i in 0..n {
        let s = (i as f64 + 0.5) * h;
        let p = Point::new(
            (start.x + s).rem_euclid(1.0),
            (start.y + alpha * s).rem_euclid(1.0),
        );
        if set.contains(&p) {
            f64::accumulate(&mut inside, &mut carry, h);
        }
    }
    Ok(settle(inside, carry) - t * set.measure()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::ContinuedFraction;
    use crate::quadratic::Quad;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn golden() -> Rotation<f64> {
        ContinuedFraction::preset("golden", 40)
            .unwrap()
            .rotation_f64()
            .unwrap()
    }

    fn pentagon() -> TorusSet<f64> {
        TorusSet::polygon(vec![
            Point::new(0.2, 0.1),
            Point::new(0.8, 0.2),
            Point::new(0.9, 0.6),
            Point::new(0.5, 0.9),
            Point::new(0.1, 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn full_square_has_no_error() {
        let sq = TorusSet::<f64>::unit_square();
        let flow = Flow::new(&sq, golden(), Point::new(0.3, 0.7)).unwrap();
        let tr = flow.trace(&100.5, &[1.0, 50.0, 100.5]).unwrap();
        assert!((tr.occupancy - 100.5).abs() < 1e-12);
        assert!(tr.running_sup < 1e-12);
    }

    #[test]
    fn vertical_strip_is_exact() {
        let strip = TorusSet::rectangle(0.0, 0.0, 0.3, 1.0).unwrap();
        let occ = occupancy(&strip, &golden(), &Point::new(0.0, 0.0), &37.0).unwrap();
        assert!((occ - 0.3 * 37.0).abs() < 1e-12);
    }

    #[test]
    fn matches_riemann_oracle() {
        let set = pentagon();
        let start = Point::new(0.4, 0.05);
        let rot = golden();
        let d = delta_t(&set, &rot, &start, &20.0).unwrap();
        let r = riemann_delta(&set, rot.alpha, &start, 20.0, 1e-6).unwrap();
        assert!((d - r).abs() < 1e-4, "{d} vs {r}");
    }

    #[test]
    fn occupancy_is_additive() {
        let set = pentagon();
        let rot = golden();
        let start = Point::new(0.25, 0.5);
        let whole = occupancy(&set, &rot, &start, &30.0).unwrap();
        let first = occupancy(&set, &rot, &start, &12.25).unwrap();
        let mid = Point::new(
            (0.25 + 12.25f64).fract(),
            (0.5 + rot.alpha * 12.25).rem_euclid(1.0),
        );
        let second = occupancy(&set, &rot, &mid, &17.75).unwrap();
        assert!((whole - first - second).abs() < 1e-9);
    }

    #[test]
    fn slopes_above_one() {
        let set = pentagon();
        let rot = Rotation::new(1.0 + 5f64.sqrt());
        let start = Point::new(0.1, 0.3);
        let d = delta_t(&set, &rot, &start, &7.0).unwrap();
        let r = riemann_delta(&set, rot.alpha, &start, 7.0, 1e-6).unwrap();
        assert!((d - r).abs() < 1e-4, "{d} vs {r}");
    }

    #[test]
    fn gap_is_small() {
        let flow = Flow::new(&pentagon(), golden(), Point::new(0.6, 0.2)).unwrap();
        for t in [0.5, 1.0, 17.3, 1000.0] {
            assert!(flow.equivalence_gap(&t).unwrap().gap <= 4.0);
        }
        let disc = TorusSet::disc(Point::new(0.4, 0.5), 0.2).unwrap();
        let flow = Flow::new(&disc, golden(), Point::new(0.0, 0.0)).unwrap();
        assert!(flow.equivalence_gap(&1000.0).unwrap().gap <= 4.0);
    }

    #[test]
    fn exact_tier_agrees_with_f64() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let tri = TorusSet::polygon(vec![
            Point::new(r(0, 1), r(0, 1)),
            Point::new(r(1, 1), r(0, 1)),
            Point::new(r(0, 1), r(1, 1)),
        ])
        .unwrap();
        let cf = ContinuedFraction::preset("sqrt2m1", 30).unwrap();
        let exact = Flow::new(
            &tri.to_tier::<Quad>().unwrap(),
            Rotation::new(cf.alpha_quad().unwrap()),
            Point::new(Quad::zero(), Quad::zero()),
        )
        .unwrap();
        let approx = Flow::new(
            &tri.to_tier::<f64>().unwrap(),
            cf.rotation_f64().unwrap(),
            Point::new(0.0, 0.0),
        )
        .unwrap();
        let t = Quad::from_int(50);
        let d_exact = exact.delta(&t).unwrap();
        let d_approx = approx.delta(&50.0).unwrap();
        assert!((d_exact.to_f64() - d_approx).abs() < 1e-12);
        let gap = exact.equivalence_gap(&t).unwrap();
        assert!(gap.gap <= Quad::from_int(4));
    }
}
