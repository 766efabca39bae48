//! Exact convex-hull volume for small point sets in dimension 1 to 3.

use num_traits::{Signed, Zero};

use super::{affine_dim, sub, Point};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exact `vol(conv(points))`. Lower-dimensional hulls have volume zero.
pub fn hull_volume(points: &[Point]) -> Result<Rational> {
    let Some(first) = points.first() else {
        return Err(Error::EmptySet);
    };
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: 0 });
    }
    if affine_dim(points) < d {
        return Ok(Rational::zero());
    }
    match d {
        1 => {
            let lo = points.iter().map(|p| &p[0]).min().unwrap();
            let hi = points.iter().map(|p| &p[0]).max().unwrap();
            Ok(hi - lo)
        }
        2 => {
            let pts: Vec<[Rational; 2]> = points.iter().map(|p| [p[0].clone(), p[1].clone()]).collect();
            Ok(polygon_area(&convex_hull_2d(&pts)))
        }
        3 => Ok(hull_volume_3d(points)),
        _ => Err(Error::Unsupported(format!("exact hull volume in dimension {d}"))),
    }
}

fn cross2(o: &[Rational; 2], a: &[Rational; 2], b: &[Rational; 2]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull_2d(points: &[[Rational; 2]]) -> Vec<[Rational; 2]> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[Rational; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<[Rational; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area (absolute value).
pub fn polygon_area(poly: &[[Rational; 2]]) -> Rational {
    let n = poly.len();
    if n < 3 {
        return Rational::zero();
    }
    let mut twice = Rational::zero();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        twice += &a[0] * &b[1] - &a[1] * &b[0];
    }
    twice.abs() / Rational::from_integer(2.into())
}

fn cross3(a: &[Rational], b: &[Rational]) -> Point {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot3(a: &[Rational], b: &[Rational]) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn hull_volume_3d(points: &[Point]) -> Rational {
    let n = points.len();
    let count = Rational::from_integer((n as i64).into());
    let centroid: Point = (0..3)
        .map(|j| points.iter().fold(Rational::zero(), |acc, p| acc + &p[j]) / &count)
        .collect();
    let mut seen: Vec<(Point, Rational)> = Vec::new();
    let mut volume = Rational::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                let normal = cross3(&sub(&points[j], &points[i]), &sub(&points[l], &points[i]));
                if normal.iter().all(Zero::is_zero) {
                    continue;
                }
                let offset = dot3(&normal, &points[i]);
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = dot3(&normal, p) - &offset;
                    above |= s.is_positive();
                    below |= s.is_negative();
                }
                if above && below {
                    continue;
                }
                // Canonical form so each supporting plane is processed once.
                let scale = normal.iter().find(|c| !c.is_zero()).unwrap().clone();
                let key_n: Point = normal.iter().map(|c| c / &scale).collect();
                let key_o = &offset / &scale;
                if seen.iter().any(|(kn, ko)| *kn == key_n && *ko == key_o) {
                    continue;
                }
                seen.push((key_n, key_o));
                let on_plane: Vec<&Point> = points
                    .iter()
                    .filter(|p| dot3(&normal, p) == offset)
                    .collect();
                // Project out the coordinate with the largest normal component.
                let drop = (0..3).max_by_key(|&c| normal[c].abs()).unwrap();
                let keep: Vec<usize> = (0..3).filter(|&c| c != drop).collect();
                let projected: Vec<[Rational; 2]> = on_plane
                    .iter()
                    .map(|p| [p[keep[0]].clone(), p[keep[1]].clone()])
                    .collect();
                let ring = convex_hull_2d(&projected);
                let lift = |q: &[Rational; 2]| -> Point {
                    on_plane
                        .iter()
                        .find(|p| p[keep[0]] == q[0] && p[keep[1]] == q[1])
                        .map(|p| (*p).clone())
                        .unwrap()
                };
                let face: Vec<Point> = ring.iter().map(lift).collect();
                for t in 1..face.len().saturating_sub(1) {
                    let a = sub(&face[0], &centroid);
                    let b = sub(&face[t], &centroid);
                    let c = sub(&face[t + 1], &centroid);
                    volume += dot3(&a, &cross3(&b, &c)).abs();
                }
            }
        }
    }
    volume / Rational::from_integer(6.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Point {
        c.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn triangle_and_square() {
        let tri = vec![p(&[0, 0]), p(&[1, 0]), p(&[0, 1])];
        assert_eq!(hull_volume(&tri).unwrap(), rat(1, 2));
        let sq = vec![p(&[0, 0]), p(&[2, 0]), p(&[2, 2]), p(&[0, 2]), p(&[1, 1])];
        assert_eq!(hull_volume(&sq).unwrap(), int(4));
    }

    #[test]
    fn cube_and_simplex_3d() {
        let mut cube = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    cube.push(p(&[x, y, z]));
                }
            }
        }
        cube.push(vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert_eq!(hull_volume(&cube).unwrap(), int(1));
        let simplex = vec![p(&[0, 0, 0]), p(&[1, 0, 0]), p(&[0, 1, 0]), p(&[0, 0, 1])];
        assert_eq!(hull_volume(&simplex).unwrap(), rat(1, 6));
        let flat = vec![p(&[0, 0, 0]), p(&[1, 0, 0]), p(&[0, 1, 0])];
        assert_eq!(hull_volume(&flat).unwrap(), int(0));
    }
}
