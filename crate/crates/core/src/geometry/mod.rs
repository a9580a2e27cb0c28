//! Target sets in the unit square and their projection along lines of
//! slope α.
//!
//! Every routine is generic over the numeric tier, so a set with irrational
//! vertices (such as a parallelogram with edges of slope α) can be handled
//! exactly in the quadratic field of α.

mod profile;
mod triangulate;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::contfrac::{AlphaValue, ContinuedFraction};
use crate::error::{Error, Result};
use crate::quadratic::Quad;
use crate::scalar::Scalar;

pub use profile::{
    dome_growth_certificate, tau_profile, ChordProfile, GrowthCertificate, Piece, ProfileShape,
};
pub use triangulate::triangulate;

/// Relative tolerance for "edge has slope α" in the `f64` tier.
pub const EPS_SLOPE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point<F> {
    pub x: F,
    pub y: F,
}

impl<F> Point<F> {
    pub fn new(x: F, y: F) -> Self {
        Point { x, y }
    }
}

impl<F: Scalar> Point<F> {
    pub fn map<G>(&self, f: impl Fn(&F) -> G) -> Point<G> {
        Point {
            x: f(&self.x),
            y: f(&self.y),
        }
    }
}

pub(crate) fn cross<F: Scalar>(o: &Point<F>, a: &Point<F>, b: &Point<F>) -> F {
    (a.x.clone() - o.x.clone()) * (b.y.clone() - o.y.clone())
        - (a.y.clone() - o.y.clone()) * (b.x.clone() - o.x.clone())
}

fn in_unit_square<F: Scalar>(p: &Point<F>) -> bool {
    let (zero, one) = (F::zero(), F::one());
    p.x >= zero && p.x <= one && p.y >= zero && p.y <= one
}

/// A simple polygon inside the closed unit square, stored counter-clockwise
/// without repeated or collinear consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<F> {
    vertices: Vec<Point<F>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disc<F> {
    pub center: Point<F>,
    pub radius: F,
}

/// A polygon or a disc in the closed unit square.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusSet<F> {
    Polygon(Polygon<F>),
    Disc(Disc<F>),
}

/// A line `Z_y = c + α Z_x` meets the boundary at `x`; `sign` is `+1` where
/// the line enters the set (moving toward larger `Z_x`) and `−1` where it
/// leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing<F> {
    pub x: F,
    pub sign: i8,
}

impl<F: Scalar> Polygon<F> {
    pub fn new(vertices: Vec<Point<F>>) -> Result<Self> {
        let mut v: Vec<Point<F>> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !in_unit_square(&p) {
                return Err(Error::invalid(format!(
                    "vertex {p:?} lies outside the unit square"
                )));
            }
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        // Drop collinear vertices; they carry no geometry and stall ear clipping.
        let mut changed = true;
        while changed && v.len() >= 3 {
            changed = false;
            let n = v.len();
            for i in 0..n {
                let (a, b, c) = (&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]);
                if cross(a, b, c).is_zero() {
                    // Keep a straight-through vertex out, but refuse a spike.
                    let dot = (b.x.clone() - a.x.clone()) * (c.x.clone() - b.x.clone())
                        + (b.y.clone() - a.y.clone()) * (c.y.clone() - b.y.clone());
                    if dot < F::zero() {
                        return Err(Error::invalid("polygon doubles back on itself"));
                    }
                    v.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if v.len() < 3 {
            return Err(Error::invalid(
                "polygon needs at least 3 non-collinear vertices",
            ));
        }
        let poly = Polygon { vertices: v };
        poly.check_simple()?;
        let area2 = poly.signed_area2();
        if area2.is_zero() {
            return Err(Error::invalid("polygon has zero area"));
        }
        let mut poly = poly;
        if area2 < F::zero() {
            poly.vertices.reverse();
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point<F>] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point<F>, &Point<F>)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    fn signed_area2(&self) -> F {
        let mut s = F::zero();
        for (p, q) in self.edges() {
            s = s + (p.x.clone() * q.y.clone() - q.x.clone() * p.y.clone());
        }
        s
    }

    /// Shoelace area.
    pub fn area(&self) -> F {
        self.signed_area2() / F::from_i64(2)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.vertices.len();
        let e: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_touch(e[i].0, e[i].1, e[j].0, e[j].1) {
                    return Err(Error::invalid(format!(
                        "polygon edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Half-open membership: a boundary point is inside exactly when it lies
    /// on an edge whose outward normal points left, or down for horizontal
    /// edges. Exact in exact tiers.
    pub fn contains(&self, p: &Point<F>) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x.clone()
                    + (p.y.clone() - a.y.clone()) * (b.x.clone() - a.x.clone())
                        / (b.y.clone() - a.y.clone());
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Whether some edge has slope exactly `alpha` (within [`EPS_SLOPE`] in
    /// the `f64` tier).
    pub fn has_edge_of_slope(&self, alpha: &F) -> bool {
        self.edges().any(|(p, q)| is_slope(p, q, alpha))
    }

    /// `v_y − α v_x` for every vertex: the offset of the slope-α line
    /// through it.
    pub fn line_offsets(&self, alpha: &F) -> Vec<F> {
        self.vertices
            .iter()
            .map(|v| v.y.clone() - alpha.clone() * v.x.clone())
            .collect()
    }

    /// Boundary crossings of the line `Z_y = c + α Z_x`, unsorted.
    pub fn crossings(&self, alpha: &F, c: &F, out: &mut Vec<Crossing<F>>) {
        let offsets = self.line_offsets(alpha);
        let n = self.vertices.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let (bp, bq) = (&offsets[i], &offsets[j]);
            let above_p = bp > c;
            if above_p == (bq > c) {
                continue;
            }
            let (p, q) = (&self.vertices[i], &self.vertices[j]);
            let x = p.x.clone()
                + (q.x.clone() - p.x.clone()) * (bp.clone() - c.clone())
                    / (bp.clone() - bq.clone());
            out.push(Crossing {
                x,
                sign: if above_p { 1 } else { -1 },
            });
        }
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Result<Polygon<G>> {
        Polygon::new(self.vertices.iter().map(|p| p.map(&f)).collect())
    }
}

pub(crate) fn is_slope<F: Scalar>(p: &Point<F>, q: &Point<F>, alpha: &F) -> bool {
    let dx = q.x.clone() - p.x.clone();
    let dy = q.y.clone() - p.y.clone();
    let gap = dy.clone() - alpha.clone() * dx.clone();
    if F::EXACT {
        gap.is_zero()
    } else {
        gap.abs().to_f64() <= EPS_SLOPE * (dx.abs().to_f64() + dy.abs().to_f64())
    }
}

fn orient<F: Scalar>(a: &Point<F>, b: &Point<F>, c: &Point<F>) -> i8 {
    let v = cross(a, b, c);
    if v > F::zero() {
        1
    } else if v < F::zero() {
        -1
    } else {
        0
    }
}

fn on_segment<F: Scalar>(a: &Point<F>, b: &Point<F>, p: &Point<F>) -> bool {
    let (lo_x, hi_x) = if a.x <= b.x {
        (&a.x, &b.x)
    } else {
        (&b.x, &a.x)
    };
    let (lo_y, hi_y) = if a.y <= b.y {
        (&a.y, &b.y)
    } else {
        (&b.y, &a.y)
    };
    &p.x >= lo_x && &p.x <= hi_x && &p.y >= lo_y && &p.y <= hi_y
}

/// Closed segments `ab` and `cd` share a point.
pub(crate) fn segments_touch<F: Scalar>(
    a: &Point<F>,
    b: &Point<F>,
    c: &Point<F>,
    d: &Point<F>,
) -> bool {
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

impl<F: Scalar> Disc<F> {
    pub fn new(center: Point<F>, radius: F) -> Result<Self> {
        if radius <= F::zero() {
            return Err(Error::invalid("disc radius must be positive"));
        }
        let lo = radius.clone();
        let hi = F::one() - radius.clone();
        if center.x < lo || center.x > hi || center.y < lo || center.y > hi {
            return Err(Error::invalid("disc does not fit in the unit square"));
        }
        Ok(Disc { center, radius })
    }

    /// Open disc membership.
    pub fn contains(&self, p: &Point<F>) -> bool {
        let dx = p.x.clone() - self.center.x.clone();
        let dy = p.y.clone() - self.center.y.clone();
        dx.clone() * dx + dy.clone() * dy < self.radius.clone() * self.radius.clone()
    }

    /// Entry and exit of the line `Z_y = c + α Z_x`, if it meets the open disc.
    pub fn chord(&self, alpha: &F, c: &F) -> Result<Option<(F, F)>> {
        let a = F::one() + alpha.clone() * alpha.clone();
        let dc = c.clone() - self.center.y.clone();
        let b = alpha.clone() * dc.clone() - self.center.x.clone();
        let k = self.center.x.clone() * self.center.x.clone() + dc.clone() * dc
            - self.radius.clone() * self.radius.clone();
        let disc = b.clone() * b.clone() - a.clone() * k;
        if disc <= F::zero() {
            return Ok(None);
        }
        let root = disc.sqrt().ok_or_else(|| sqrt_error::<F>())?;
        Ok(Some((
            (-b.clone() - root.clone()) / a.clone(),
            (-b + root) / a,
        )))
    }
}

fn sqrt_error<F: Scalar>() -> Error {
    Error::unsupported(format!(
        "discs need square roots, which the {} tier does not provide",
        F::MODE
    ))
}

impl<F: Scalar> TorusSet<F> {
    pub fn polygon(vertices: Vec<Point<F>>) -> Result<Self> {
        Polygon::new(vertices).map(TorusSet::Polygon)
    }

    pub fn disc(center: Point<F>, radius: F) -> Result<Self> {
        Disc::new(center, radius).map(TorusSet::Disc)
    }

    /// Axis-parallel rectangle `[x0, x1) × [y0, y1)`.
    pub fn rectangle(x0: F, y0: F, x1: F, y1: F) -> Result<Self> {
        Self::polygon(vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(F::zero(), F::zero(), F::one(), F::one()).expect("unit square")
    }

    /// Membership under the half-open polygon convention and open discs.
    pub fn contains(&self, p: &Point<F>) -> bool {
        match self {
            TorusSet::Polygon(poly) => poly.contains(p),
            TorusSet::Disc(d) => d.contains(p),
        }
    }

    /// Lebesgue measure: shoelace for polygons, `πr²` for discs.
    pub fn measure(&self) -> Result<F> {
        match self {
            TorusSet::Polygon(poly) => Ok(poly.area()),
            TorusSet::Disc(d) => {
                let pi = F::pi().ok_or_else(|| {
                    Error::unsupported(format!("π is not available in the {} tier", F::MODE))
                })?;
                Ok(pi * d.radius.clone() * d.radius.clone())
            }
        }
    }

    /// Boundary crossings of the line `Z_y = c + α Z_x`, unsorted.
    pub fn crossings(&self, alpha: &F, c: &F, out: &mut Vec<Crossing<F>>) -> Result<()> {
        match self {
            TorusSet::Polygon(poly) => poly.crossings(alpha, c, out),
            TorusSet::Disc(d) => {
                if let Some((x0, x1)) = d.chord(alpha, c)? {
                    out.push(Crossing { x: x0, sign: 1 });
                    out.push(Crossing { x: x1, sign: -1 });
                }
            }
        }
        Ok(())
    }

    /// `T_S(y)`: the horizontal extent of `S` on the line `Z_y = y + α Z_x`,
    /// i.e. the Euclidean chord length divided by `√(1+α²)`.
    pub fn chord_length(&self, y: &F, alpha: &F) -> Result<F> {
        let mut xs = Vec::new();
        self.crossings(alpha, y, &mut xs)?;
        Ok(xs.into_iter().fold(
            F::zero(),
            |acc, c| if c.sign > 0 { acc - c.x } else { acc + c.x },
        ))
    }

    pub fn is_polygon(&self) -> bool {
        matches!(self, TorusSet::Polygon(_))
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Result<TorusSet<G>> {
        match self {
            TorusSet::Polygon(p) => p.map(f).map(TorusSet::Polygon),
            TorusSet::Disc(d) => TorusSet::disc(d.center.map(&f), f(&d.radius)),
        }
    }
}

impl TorusSet<BigRational> {
    pub fn to_tier<G: Scalar>(&self) -> Result<TorusSet<G>> {
        self.map(G::from_ratio)
    }
}

/// Edge-slope test against a continued fraction: exact for quadratic α,
/// toleranced for decimal α, unsupported for symbolic α.
pub fn has_edge_of_slope(
    polygon: &Polygon<BigRational>,
    alpha: &ContinuedFraction,
) -> Result<bool> {
    match alpha.value_mode() {
        AlphaValue::Quadratic(_) => Ok(polygon
            .map(Quad::from_ratio)?
            .has_edge_of_slope(&alpha.alpha_quad()?)),
        AlphaValue::Decimal(_) => {
            let a = alpha.rotation_f64()?.alpha;
            Ok(polygon.map(|v| v.to_f64())?.has_edge_of_slope(&a))
        }
        AlphaValue::Symbolic => Err(Error::unsupported("edge-slope test needs the value of α")),
    }
}

#[cfg(test)]
pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(num_bigint::BigInt::from(n), num_bigint::BigInt::from(d))
}
