use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{Point, TorusSet};

/// Seed used by every recipe unless one is given.
pub const DEFAULT_SEED: u64 = 0x5EED_B21A;

/// Margin kept between sampled sets and the boundary of the unit square.
pub const INSET: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetClass {
    AxisRectangles,
    Discs,
    Polygons,
}

impl SetClass {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "axis_rectangles" | "axis-rectangles" | "rectangles" => Some(SetClass::AxisRectangles),
            "discs" => Some(SetClass::Discs),
            "polygons" => Some(SetClass::Polygons),
            _ => None,
        }
    }

    pub fn sample<R: Rng>(self, rng: &mut R, alpha: f64) -> TorusSet<f64> {
        match self {
            SetClass::AxisRectangles => random_rectangle(rng),
            SetClass::Discs => random_disc(rng),
            SetClass::Polygons => random_polygon(rng, alpha),
        }
    }
}

/// Axis-parallel rectangle with both sides at least 0.05.
pub fn random_rectangle<R: Rng>(rng: &mut R) -> TorusSet<f64> {
    let side = |rng: &mut R| {
        let a = rng.gen_range(INSET..1.0 - INSET - 0.05);
        let b = rng.gen_range(a + 0.05..1.0 - INSET);
        (a, b)
    };
    let (x0, x1) = side(rng);
    let (y0, y1) = side(rng);
    TorusSet::rectangle(x0, y0, x1, y1).expect("non-degenerate rectangle")
}

/// Disc with radius in `[0.05, 0.25]` inside the inset square.
pub fn random_disc<R: Rng>(rng: &mut R) -> TorusSet<f64> {
    let r = rng.gen_range(0.05..=0.25);
    let lo = INSET + r;
    let cx = rng.gen_range(lo..=1.0 - lo);
    let cy = rng.gen_range(lo..=1.0 - lo);
    TorusSet::disc(Point::new(cx, cy), r).expect("disc fits")
}

fn try_polygon<R: Rng>(rng: &mut R, alpha: f64) -> Result<Option<TorusSet<f64>>> {
    let n = rng.gen_range(3..=8);
    let cx = rng.gen_range(0.35..0.65);
    let cy = rng.gen_range(0.35..0.65);
    let reach = [cx - INSET, 1.0 - INSET - cx, cy - INSET, 1.0 - INSET - cy]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let vertices = angles
        .iter()
        .map(|&t| {
            let r = rng.gen_range(0.3..=1.0) * reach;
            Point::new(cx + r * t.cos(), cy + r * t.sin())
        })
        .collect();
    let set = match TorusSet::polygon(vertices) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    let ok = match &set {
        TorusSet::Polygon(p) => {
            p.vertices().len() >= 3 && !p.has_edge_of_slope(&alpha) && set.measure()? > 0.01
        }
        TorusSet::Disc(_) => false,
    };
    Ok(ok.then_some(set))
}

/// Star-shaped polygon with 3 to 8 vertices around a central point, with no
/// edge of slope `alpha` and area above 0.01. Rejection sampling.
pub fn random_polygon<R: Rng>(rng: &mut R, alpha: f64) -> TorusSet<f64> {
    loop {
        if let Ok(Some(set)) = try_polygon(rng, alpha) {
            return set;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        let mut b = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for class in [
            SetClass::AxisRectangles,
            SetClass::Discs,
            SetClass::Polygons,
        ] {
            for _ in 0..50 {
                let s = class.sample(&mut a, 0.618);
                let t = class.sample(&mut b, 0.618);
                assert_eq!(format!("{s:?}"), format!("{t:?}"));
                let m = s.measure().unwrap();
                assert!(m > 0.0 && m < 1.0);
            }
        }
    }
}
