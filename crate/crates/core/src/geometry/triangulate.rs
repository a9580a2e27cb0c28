use super::{cross, is_slope, Point, Polygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn in_closed_triangle<F: Scalar>(a: &Point<F>, b: &Point<F>, c: &Point<F>, p: &Point<F>) -> bool {
    let zero = F::zero();
    cross(a, b, p) >= zero && cross(b, c, p) >= zero && cross(c, a, p) >= zero
}

/// Ear-clipping triangulation of a counter-clockwise simple polygon.
///
/// With `alpha` given and no polygon edge of slope α, diagonals of slope α
/// are avoided by trying other ears; if every remaining ear needs such a
/// diagonal the construction fails.
pub fn triangulate<F: Scalar>(poly: &Polygon<F>, alpha: Option<&F>) -> Result<Vec<[Point<F>; 3]>> {
    let avoid = alpha.filter(|a| !poly.has_edge_of_slope(a));
    let mut idx: Vec<usize> = (0..poly.vertices().len()).collect();
    let v = poly.vertices();
    let mut out = Vec::with_capacity(v.len() - 2);
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (ip, ic, inx) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (&v[ip], &v[ic], &v[inx]);
            if cross(a, b, c) <= F::zero() {
                continue;
            }
            if avoid.is_some_and(|al| is_slope(a, c, al)) {
                continue;
            }
            let blocked = idx
                .iter()
                .filter(|&&j| j != ip && j != ic && j != inx)
                .any(|&j| in_closed_triangle(a, b, c, &v[j]));
            if blocked {
                continue;
            }
            out.push([a.clone(), b.clone(), c.clone()]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::Construction(format!(
                "no admissible ear among {n} remaining vertices (every candidate diagonal is blocked or has slope α)"
            )));
        }
    }
    out.push([v[idx[0]].clone(), v[idx[1]].clone(), v[idx[2]].clone()]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ratio, TorusSet};
    use num_rational::BigRational;

    fn poly(pts: &[(i64, i64)], den: i64) -> Polygon<BigRational> {
        let v = pts
            .iter()
            .map(|&(x, y)| Point::new(ratio(x, den), ratio(y, den)))
            .collect();
        match TorusSet::polygon(v).unwrap() {
            TorusSet::Polygon(p) => p,
            _ => unreachable!(),
        }
    }

    fn area(t: &[Point<BigRational>; 3]) -> BigRational {
        cross(&t[0], &t[1], &t[2]) / BigRational::from_integer(2.into())
    }

    #[test]
    fn square_two_triangles() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)], 1);
        let tris = triangulate(&sq, None).unwrap();
        assert_eq!(tris.len(), 2);
        assert!(tris.iter().all(|t| area(t) == ratio(1, 2)));
    }

    #[test]
    fn pentagon_and_l_shape() {
        let pent = poly(&[(2, 0), (8, 1), (10, 6), (5, 10), (0, 5)], 10);
        let tris = triangulate(&pent, None).unwrap();
        assert_eq!(tris.len(), 3);
        assert_eq!(tris.iter().map(area).sum::<BigRational>(), pent.area());
        let l = poly(&[(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)], 4);
        let tris = triangulate(&l, None).unwrap();
        assert_eq!(tris.len(), 4);
        assert_eq!(tris.iter().map(area).sum::<BigRational>(), ratio(3, 4));
        assert!(tris.iter().all(|t| area(t) > ratio(0, 1)));
    }

    #[test]
    fn avoids_slope_alpha_diagonals() {
        // The diagonal (0,0)-(1,1) has slope 1; the other one must be used.
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)], 1);
        let one = ratio(1, 1);
        let tris = triangulate(&sq, Some(&one)).unwrap();
        for t in &tris {
            for (p, q) in [(&t[0], &t[1]), (&t[1], &t[2]), (&t[2], &t[0])] {
                assert!(!is_slope(p, q, &one));
            }
        }
    }
}
