//! Rational points represented as the intersection of two integer lines.
//!
//! Arrangement vertices never need more than the two lines that define them,
//! so a [`Vertex`] stores exactly that plus an `f64` approximation. Predicates
//! first evaluate in floating point against a conservative error bound and
//! only fall back to big-integer evaluation of the homogeneous coordinates
//! when the filter cannot certify the sign.

use crate::geometry::{Line, Point};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

const FILTER: f64 = 1e-12;

/// Exact homogeneous coordinates `(x/w, y/w)` with `w > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hom {
    pub x: BigInt,
    pub y: BigInt,
    pub w: BigInt,
}

impl Hom {
    /// Reduced by the gcd of the three coordinates, so equal points compare equal.
    pub fn normalized(&self) -> Hom {
        use num_integer::Integer;
        let g = self.x.gcd(&self.y).gcd(&self.w);
        if g.is_zero() {
            return self.clone();
        }
        Hom {
            x: &self.x / &g,
            y: &self.y / &g,
            w: &self.w / &g,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Vertex {
    pub l1: Line,
    pub l2: Line,
    #[serde(skip)]
    pub ax: f64,
    #[serde(skip)]
    pub ay: f64,
}

fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

fn det2_checked(a: i128, b: i128, c: i128, d: i128) -> Option<i128> {
    a.checked_mul(d)?.checked_sub(b.checked_mul(c)?)
}

fn det2_big(a: i128, b: i128, c: i128, d: i128) -> BigInt {
    big(a) * big(d) - big(b) * big(c)
}

fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

impl Vertex {
    /// Intersection of two lines, `None` when they are parallel.
    pub fn meet(l1: Line, l2: Line) -> Option<Vertex> {
        // a1 x + b1 y = c1, a2 x + b2 y = c2
        let fast = (|| {
            let w = det2_checked(l1.a, l1.b, l2.a, l2.b)?;
            let x = det2_checked(l1.c, l1.b, l2.c, l2.b)?;
            let y = det2_checked(l1.a, l1.c, l2.a, l2.c)?;
            Some((x, y, w))
        })();
        let (ax, ay) = match fast {
            Some((_, _, 0)) => return None,
            Some((x, y, w)) => (x as f64 / w as f64, y as f64 / w as f64),
            None => {
                let w = det2_big(l1.a, l1.b, l2.a, l2.b);
                if w.is_zero() {
                    return None;
                }
                let x = det2_big(l1.c, l1.b, l2.c, l2.b);
                let y = det2_big(l1.a, l1.c, l2.a, l2.c);
                (ratio(&x, &w), ratio(&y, &w))
            }
        };
        Some(Vertex { l1, l2, ax, ay })
    }

    pub fn from_point(p: Point) -> Vertex {
        Vertex {
            l1: Line::vertical(p.x as i128),
            l2: Line::horizontal(p.y as i128),
            ax: p.x as f64,
            ay: p.y as f64,
        }
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.ax, self.ay)
    }

    pub fn hom(&self) -> Hom {
        let (l1, l2) = (self.l1, self.l2);
        let mut w = det2_big(l1.a, l1.b, l2.a, l2.b);
        let mut x = det2_big(l1.c, l1.b, l2.c, l2.b);
        let mut y = det2_big(l1.a, l1.c, l2.a, l2.c);
        if w.is_negative() {
            w = -w;
            x = -x;
            y = -y;
        }
        Hom { x, y, w }
    }

    /// The point itself when both coordinates are integers.
    pub fn to_point(&self) -> Option<Point> {
        let h = self.hom();
        if (&h.x % &h.w).is_zero() && (&h.y % &h.w).is_zero() {
            Some(Point::new((&h.x / &h.w).to_i64()?, (&h.y / &h.w).to_i64()?))
        } else {
            None
        }
    }

    pub fn same_point(&self, other: &Vertex) -> bool {
        if (self.ax - other.ax).abs() > FILTER * (self.ax.abs() + other.ax.abs() + 1.0)
            || (self.ay - other.ay).abs() > FILTER * (self.ay.abs() + other.ay.abs() + 1.0)
        {
            return false;
        }
        self.hom().normalized() == other.hom().normalized()
    }
}

fn ratio(x: &BigInt, w: &BigInt) -> f64 {
    let (fx, fw) = (to_f64(x), to_f64(w));
    if fx.is_finite() && fw.is_finite() {
        fx / fw
    } else {
        // Both huge: shift down before converting.
        let bits = x.bits().max(w.bits()) as i64 - 900;
        let sh = bits.max(0) as usize;
        to_f64(&(x >> sh)) / to_f64(&(w >> sh))
    }
}

fn sgn(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

/// Sign of `a x + b y - c` at the vertex.
pub fn side_vertex(h: &Line, v: &Vertex) -> i32 {
    side_vertex_with(h, &line_f64(h), v)
}

/// Coefficients of `h` rounded to `f64`.
pub fn line_f64(h: &Line) -> [f64; 3] {
    [h.a as f64, h.b as f64, h.c as f64]
}

/// [`side_vertex`] with the rounded coefficients of `h` supplied.
pub fn side_vertex_with(h: &Line, f: &[f64; 3], v: &Vertex) -> i32 {
    if *h == v.l1 || *h == v.l2 {
        return 0;
    }
    let [a, b, c] = *f;
    let val = a * v.ax + b * v.ay - c;
    let err = FILTER * ((a * v.ax).abs() + (b * v.ay).abs() + c.abs());
    if val > err {
        return 1;
    }
    if val < -err {
        return -1;
    }
    let hm = v.hom();
    sgn(&(big(h.a) * &hm.x + big(h.b) * &hm.y - big(h.c) * &hm.w))
}

/// Orientation of three rational points: +1 for a left turn.
pub fn orient(a: &Vertex, b: &Vertex, c: &Vertex) -> i32 {
    let val = (b.ax - a.ax) * (c.ay - a.ay) - (b.ay - a.ay) * (c.ax - a.ax);
    let err = FILTER * (a.ax.abs() + b.ax.abs() + c.ax.abs()) * (a.ay.abs() + b.ay.abs() + c.ay.abs());
    if val > err {
        return 1;
    }
    if val < -err {
        return -1;
    }
    orient_exact(a, b, c)
}

pub fn orient_exact(a: &Vertex, b: &Vertex, c: &Vertex) -> i32 {
    let (p, q, r) = (a.hom(), b.hom(), c.hom());
    let det =
        &p.x * (&q.y * &r.w - &r.y * &q.w) - &p.y * (&q.x * &r.w - &r.x * &q.w) + &p.w * (&q.x * &r.y - &r.x * &q.y);
    sgn(&det)
}

/// Orientation of two rational points and an integer point.
pub fn orient_point(a: &Vertex, b: &Vertex, p: Point) -> i32 {
    let (px, py) = (p.x as f64, p.y as f64);
    let val = (b.ax - a.ax) * (py - a.ay) - (b.ay - a.ay) * (px - a.ax);
    let err = FILTER * (a.ax.abs() + b.ax.abs() + px.abs()) * (a.ay.abs() + b.ay.abs() + py.abs());
    if val > err {
        return 1;
    }
    if val < -err {
        return -1;
    }
    orient_exact(a, b, &Vertex::from_point(p))
}

fn cmp_coord(fa: f64, fb: f64, exact: impl FnOnce() -> Ordering) -> Ordering {
    let d = fa - fb;
    let err = FILTER * (fa.abs() + fb.abs());
    if d > err {
        Ordering::Greater
    } else if d < -err {
        Ordering::Less
    } else {
        exact()
    }
}

/// Lexicographic order by `(y, x)`: the bottom vertex is the minimum.
pub fn cmp_bottom(a: &Vertex, b: &Vertex) -> Ordering {
    let ha = std::cell::OnceCell::new();
    let hb = std::cell::OnceCell::new();
    let ea = || ha.get_or_init(|| a.hom()).clone();
    let eb = || hb.get_or_init(|| b.hom()).clone();
    cmp_coord(a.ay, b.ay, || {
        let (p, q) = (ea(), eb());
        (&p.y * &q.w).cmp(&(&q.y * &p.w))
    })
    .then_with(|| {
        cmp_coord(a.ax, b.ax, || {
            let (p, q) = (ea(), eb());
            (&p.x * &q.w).cmp(&(&q.x * &p.w))
        })
    })
}

/// Lexicographic order by `(x, y)`.
pub fn cmp_left(a: &Vertex, b: &Vertex) -> Ordering {
    let ha = std::cell::OnceCell::new();
    let hb = std::cell::OnceCell::new();
    let ea = || ha.get_or_init(|| a.hom()).clone();
    let eb = || hb.get_or_init(|| b.hom()).clone();
    cmp_coord(a.ax, b.ax, || {
        let (p, q) = (ea(), eb());
        (&p.x * &q.w).cmp(&(&q.x * &p.w))
    })
    .then_with(|| {
        cmp_coord(a.ay, b.ay, || {
            let (p, q) = (ea(), eb());
            (&p.y * &q.w).cmp(&(&q.y * &p.w))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meet_of_axes() {
        let v = Vertex::meet(Line::vertical(3), Line::horizontal(-2)).unwrap();
        assert_eq!(v.to_point(), Some(Point::new(3, -2)));
    }

    #[test]
    fn parallel_lines_do_not_meet() {
        assert!(Vertex::meet(Line::horizontal(1), Line::horizontal(5)).is_none());
    }

    #[test]
    fn rational_vertex_on_both_lines() {
        let l1 = Line::through(Point::new(0, 0), Point::new(3, 1));
        let l2 = Line::through(Point::new(0, 1), Point::new(1, -1));
        let v = Vertex::meet(l1, l2).unwrap();
        assert_eq!(side_vertex(&l1, &v), 0);
        let l1b = Line::new(l1.a * 2, l1.b * 2, l1.c * 2);
        assert_eq!(side_vertex(&l1b, &v), 0);
        assert!(v.to_point().is_none());
    }

    #[test]
    fn orientation_exact_on_collinear_rationals() {
        let l = Line::through(Point::new(0, 0), Point::new(7, 3));
        let a = Vertex::meet(l, Line::vertical(1)).unwrap();
        let b = Vertex::meet(l, Line::vertical(2)).unwrap();
        let c = Vertex::meet(l, Line::vertical(5)).unwrap();
        assert_eq!(orient(&a, &b, &c), 0);
        let d = Vertex::from_point(Point::new(0, 1));
        assert_eq!(orient(&a, &b, &d), 1);
    }

    #[test]
    fn huge_coefficients_fall_back_exactly() {
        let big = 1i128 << 100;
        let l1 = Line::new(big + 1, 3, big * 5);
        let l2 = Line::new(big - 1, -7, big * 3 + 11);
        let v = Vertex::meet(l1, l2).unwrap();
        assert_eq!(side_vertex(&l1, &v), 0);
        assert_eq!(side_vertex(&Line::new(big + 1, 3, big * 5 - 1), &v), 1);
    }
}
