//! Exact planar primitives.
//!
//! Coordinates are integers on a fixed grid; a point file records the power
//! of ten `scale` that maps grid units back to input units. All predicates on
//! integer points run in `i128` and are exact for `|coord| <= COORD_LIMIT`.
//!
//! Duality convention, used everywhere in the crate: the point `(a, b)` maps
//! to the line `y = a x - b`, and the non-vertical line `y = m x + q` maps to
//! the point `(m, -q)`. Then `p` is above `h` iff the point `h*` is above the
//! line `p*`: `py > m px + q` and `-q > px m - py` are the same inequality.

use crate::rational::{self, Vertex};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest absolute coordinate for which every predicate stays in `i128`.
pub const COORD_LIMIT: i64 = 1 << 40;

/// Default perturbation band, in grid units.
pub const PERTURB_BAND: i64 = 1;

/// Grid refinement applied to coarse input before perturbation.
pub const REFINE_BITS: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("requires general position: {0}")]
    GeneralPosition(String),
    #[error("coordinate {0} exceeds the supported range")]
    Range(i64),
    #[error("perturbation band too small: {0} points still degenerate after {1} rounds")]
    BandTooSmall(usize, usize),
    #[error("malformed point file: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

/// Orientation of the triangle `a, b, c`: `+1` for a left turn.
pub fn orientation(a: Point, b: Point, c: Point) -> i32 {
    let v = (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128)
        - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128);
    v.signum() as i32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Below,
    On,
    Above,
}

impl Side {
    pub fn from_sign(s: i32) -> Side {
        match s.signum() {
            1 => Side::Above,
            0 => Side::On,
            _ => Side::Below,
        }
    }
}

/// The oriented line `a x + b y = c`; "above" is `a x + b y > c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Line {
    pub const fn new(a: i128, b: i128, c: i128) -> Self {
        Line { a, b, c }
    }

    /// `x = v`, above meaning `x > v`.
    pub const fn vertical(v: i128) -> Self {
        Line { a: 1, b: 0, c: v }
    }

    /// `y = v`, above meaning `y > v`.
    pub const fn horizontal(v: i128) -> Self {
        Line { a: 0, b: 1, c: v }
    }

    /// The line through `p` and `q`; above is the left side of `p -> q`.
    pub fn through(p: Point, q: Point) -> Self {
        let a = p.y as i128 - q.y as i128;
        let b = q.x as i128 - p.x as i128;
        Line {
            a,
            b,
            c: a * p.x as i128 + b * p.y as i128,
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.b == 0
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// The same line with the opposite orientation.
    pub fn flipped(&self) -> Self {
        Line {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }

    /// Orientation with `b > 0`, so that above is the geometric upper side.
    pub fn upward(&self) -> Self {
        if self.b < 0 || (self.b == 0 && self.a < 0) {
            self.flipped()
        } else {
            *self
        }
    }

    /// Sign of `a x + b y - c`.
    pub fn eval_sign(&self, p: Point) -> i32 {
        let fast = (|| {
            let ax = self.a.checked_mul(p.x as i128)?;
            let by = self.b.checked_mul(p.y as i128)?;
            ax.checked_add(by)?.checked_sub(self.c)
        })();
        match fast {
            Some(v) => v.signum() as i32,
            None => {
                use num_bigint::BigInt;
                let v = BigInt::from(self.a) * BigInt::from(p.x) + BigInt::from(self.b) * BigInt::from(p.y)
                    - BigInt::from(self.c);
                big_sign(&v)
            }
        }
    }

    pub fn side_of(&self, p: Point) -> Side {
        Side::from_sign(self.eval_sign(p))
    }

    /// Sign at a rational vertex.
    pub fn side_of_vertex(&self, v: &Vertex) -> Side {
        Side::from_sign(rational::side_vertex(self, v))
    }

    /// `f64` evaluation of `y` on the line at `x` (non-vertical lines only).
    pub fn approx_y(&self, x: f64) -> f64 {
        (self.c as f64 - self.a as f64 * x) / self.b as f64
    }
}

/// `side_of(h, p)` as a free function.
pub fn side_of(h: &Line, p: Point) -> Side {
    h.side_of(p)
}

/// Homogeneous rational point used for exact duals of lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatPoint {
    pub x: i128,
    pub y: i128,
    pub w: i128,
}

impl RatPoint {
    pub fn from_point(p: Point) -> Self {
        RatPoint {
            x: p.x as i128,
            y: p.y as i128,
            w: 1,
        }
    }

    pub fn to_point(&self) -> Option<Point> {
        if self.x % self.w == 0 && self.y % self.w == 0 {
            Some(Point::new((self.x / self.w) as i64, (self.y / self.w) as i64))
        } else {
            None
        }
    }
}

/// Either side of the duality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dual {
    Point(RatPoint),
    Line(Line),
}

/// Dual line of a point: `(a, b) -> y = a x - b`, oriented upward.
pub fn dual_line(p: Point) -> Line {
    dual_line_rat(RatPoint::from_point(p))
}

/// `(x/w, y/w) -> w y = x X - y`, i.e. `-x X + w Y = -y`.
pub fn dual_line_rat(p: RatPoint) -> Line {
    Line::new(-p.x, p.w, -p.y)
}

/// Dual point of a non-vertical line.
pub fn dual_point(h: &Line) -> Result<RatPoint, GeomError> {
    if h.is_vertical() {
        return Err(GeomError::GeneralPosition("vertical line has no dual".into()));
    }
    let u = h.upward();
    Ok(RatPoint {
        x: -u.a,
        y: -u.c,
        w: u.b,
    })
}

/// The involutive point-line duality. Lines come back oriented upward.
pub fn dualize(x: Dual) -> Result<Dual, GeomError> {
    match x {
        Dual::Point(p) => Ok(Dual::Line(dual_line_rat(p))),
        Dual::Line(h) => dual_point(&h).map(Dual::Point),
    }
}

/// Sign of `p` relative to `h` for a homogeneous rational point.
pub fn side_of_rat(h: &Line, p: &RatPoint) -> i32 {
    use num_bigint::BigInt;
    let v = BigInt::from(h.a) * BigInt::from(p.x) + BigInt::from(h.b) * BigInt::from(p.y)
        - BigInt::from(h.c) * BigInt::from(p.w);
    big_sign(&v) * p.w.signum() as i32
}

fn big_sign(v: &num_bigint::BigInt) -> i32 {
    match v.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Axis-parallel box with integer corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub xmin: i128,
    pub ymin: i128,
    pub xmax: i128,
    pub ymax: i128,
}

impl BBox {
    pub fn of_points(pts: &[Point]) -> BBox {
        let mut b = BBox {
            xmin: i128::MAX,
            ymin: i128::MAX,
            xmax: i128::MIN,
            ymax: i128::MIN,
        };
        for p in pts {
            b.xmin = b.xmin.min(p.x as i128);
            b.ymin = b.ymin.min(p.y as i128);
            b.xmax = b.xmax.max(p.x as i128);
            b.ymax = b.ymax.max(p.y as i128);
        }
        if pts.is_empty() {
            b = BBox {
                xmin: 0,
                ymin: 0,
                xmax: 1,
                ymax: 1,
            };
        }
        b
    }

    /// Box of three times the span around the same center, never degenerate.
    pub fn tripled(&self) -> BBox {
        let w = (self.xmax - self.xmin).max(1);
        let h = (self.ymax - self.ymin).max(1);
        BBox {
            xmin: self.xmin - w,
            ymin: self.ymin - h,
            xmax: self.xmax + w,
            ymax: self.ymax + h,
        }
    }

    /// The cutting box of a point set: three times its span.
    pub fn around(pts: &[Point]) -> BBox {
        BBox::of_points(pts).tripled()
    }

    pub fn corners(&self) -> [Vertex; 4] {
        let l = Line::vertical(self.xmin);
        let r = Line::vertical(self.xmax);
        let b = Line::horizontal(self.ymin);
        let t = Line::horizontal(self.ymax);
        [
            Vertex::meet(l, b).unwrap(),
            Vertex::meet(r, b).unwrap(),
            Vertex::meet(r, t).unwrap(),
            Vertex::meet(l, t).unwrap(),
        ]
    }

    /// Boundary lines in counterclockwise order, edge `i` from corner `i` to `i+1`.
    pub fn edges(&self) -> [Line; 4] {
        [
            Line::horizontal(self.ymin),
            Line::vertical(self.xmax),
            Line::horizontal(self.ymax),
            Line::vertical(self.xmin),
        ]
    }

    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = (p.x as i128, p.y as i128);
        self.xmin <= x && x <= self.xmax && self.ymin <= y && y <= self.ymax
    }

    pub fn contains_vertex(&self, v: &Vertex) -> bool {
        self.edges().iter().enumerate().all(|(i, e)| {
            let s = rational::side_vertex(e, v);
            match i {
                0 => s >= 0,
                1 => s <= 0,
                2 => s <= 0,
                _ => s >= 0,
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplexKind {
    Ordinary,
    Bounding,
}

/// A triangle with rational vertices in counterclockwise order, or the
/// bounding simplex standing in for the whole plane.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: [Vertex; 3],
    pub kind: SimplexKind,
}

impl Simplex {
    pub fn ordinary(a: Vertex, b: Vertex, c: Vertex) -> Simplex {
        let s = rational::orient(&a, &b, &c);
        assert!(s != 0, "degenerate simplex");
        let vertices = if s > 0 { [a, b, c] } else { [a, c, b] };
        Simplex {
            vertices,
            kind: SimplexKind::Ordinary,
        }
    }

    pub fn from_points(a: Point, b: Point, c: Point) -> Simplex {
        Simplex::ordinary(Vertex::from_point(a), Vertex::from_point(b), Vertex::from_point(c))
    }

    /// A triangle enclosing three times the box of `pts`; crossed by every line.
    pub fn bounding(pts: &[Point]) -> Simplex {
        let b = BBox::around(pts);
        let w = b.xmax - b.xmin;
        let h = b.ymax - b.ymin;
        let p = |x: i128, y: i128| Vertex::meet(Line::vertical(x), Line::horizontal(y)).unwrap();
        let a = p(b.xmin - 2 * w, b.ymin - h);
        let c = p(b.xmax + 2 * w, b.ymin - h);
        let d = p((b.xmin + b.xmax) / 2, b.ymax + 3 * h);
        Simplex {
            vertices: [a, c, d],
            kind: SimplexKind::Bounding,
        }
    }

    pub fn is_bounding(&self) -> bool {
        self.kind == SimplexKind::Bounding
    }

    /// Closed containment; the bounding simplex contains every point.
    pub fn contains(&self, p: Point) -> bool {
        if self.is_bounding() {
            return true;
        }
        let v = &self.vertices;
        (0..3).all(|i| rational::orient_point(&v[i], &v[(i + 1) % 3], p) >= 0)
    }

    /// Strict interior containment.
    pub fn contains_strictly(&self, p: Point) -> bool {
        if self.is_bounding() {
            return true;
        }
        let v = &self.vertices;
        (0..3).all(|i| rational::orient_point(&v[i], &v[(i + 1) % 3], p) > 0)
    }

    pub fn signs(&self, h: &Line) -> [i32; 3] {
        [
            rational::side_vertex(h, &self.vertices[0]),
            rational::side_vertex(h, &self.vertices[1]),
            rational::side_vertex(h, &self.vertices[2]),
        ]
    }

    /// Approximate centroid.
    pub fn centroid(&self) -> (f64, f64) {
        let v = &self.vertices;
        ((v[0].ax + v[1].ax + v[2].ax) / 3.0, (v[0].ay + v[1].ay + v[2].ay) / 3.0)
    }
}

/// `h` crosses `s` iff the vertices are not all strictly on one side and `s`
/// is not contained in `h`. Bounding simplices are crossed by every line.
pub fn crosses(h: &Line, s: &Simplex) -> bool {
    if s.is_bounding() {
        return true;
    }
    let sg = s.signs(h);
    let all_pos = sg.iter().all(|&x| x > 0);
    let all_neg = sg.iter().all(|&x| x < 0);
    let inside = sg.iter().all(|&x| x == 0);
    !(all_pos || all_neg || inside)
}

/// `h` meets the open interior of `s`.
pub fn crosses_interior(h: &Line, s: &Simplex) -> bool {
    if s.is_bounding() {
        return true;
    }
    let sg = s.signs(h);
    sg.iter().any(|&x| x > 0) && sg.iter().any(|&x| x < 0)
}

/// Counterclockwise convex hull with no three consecutive collinear vertices.
pub fn convex_hull(pts: &[Point]) -> Vec<Point> {
    convex_hull_indices(pts).into_iter().map(|i| pts[i]).collect()
}

/// Indices of [`convex_hull`] into `pts`. Duplicates are reported once.
pub fn convex_hull_indices(pts: &[Point]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by_key(|&i| (pts[i].x, pts[i].y));
    idx.dedup_by_key(|i| pts[*i]);
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && orientation(pts[lower[lower.len() - 2]], pts[lower[lower.len() - 1]], pts[i]) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && orientation(pts[upper[upper.len() - 2]], pts[upper[upper.len() - 1]], pts[i]) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Emptiness tester for closed halfplanes against a convex polygon.
///
/// Holds the hull in counterclockwise order; a halfplane meets the hull iff
/// it contains a hull vertex, found by binary search for the extreme vertex
/// in the direction of the halfplane's normal.
#[derive(Clone, Debug)]
pub struct HullTester {
    pub hull: Vec<Point>,
    angles: Vec<f64>,
}

impl HullTester {
    pub fn new(pts: &[Point]) -> Self {
        let mut t = HullTester {
            hull: convex_hull(pts),
            angles: Vec::new(),
        };
        t.angles = t.normal_angles();
        t
    }

    fn dot(a: i128, b: i128, p: Point) -> i128 {
        a * p.x as i128 + b * p.y as i128
    }

    /// Index of a hull vertex maximizing `a x + b y`.
    ///
    /// Binary search on outward edge-normal angles gives a start vertex;
    /// an exact uphill walk then settles it, so float error only costs steps.
    pub fn extreme(&self, a: i128, b: i128) -> Option<usize> {
        let h = &self.hull;
        let n = h.len();
        if n == 0 {
            return None;
        }
        let f = |i: usize| Self::dot(a, b, h[i % n]);
        let mut i = if n <= 8 {
            (0..n).max_by_key(|&i| f(i)).unwrap()
        } else {
            let ang = &self.angles;
            let tau = std::f64::consts::TAU;
            let mut phi = (b as f64).atan2(a as f64);
            while phi < ang[0] {
                phi += tau;
            }
            while phi >= ang[0] + tau {
                phi -= tau;
            }
            ang.partition_point(|&t| t < phi) % n
        };
        loop {
            if f(i + 1) > f(i) {
                i = (i + 1) % n;
            } else if f(i + n - 1) > f(i) {
                i = (i + n - 1) % n;
            } else {
                return Some(i);
            }
        }
    }

    /// Outward normal angle of edge `i`, unwrapped to increase from edge 0.
    fn normal_angles(&self) -> Vec<f64> {
        let h = &self.hull;
        let n = h.len();
        let tau = std::f64::consts::TAU;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (p, q) = (h[i], h[(i + 1) % n]);
            let (dx, dy) = ((q.x - p.x) as f64, (q.y - p.y) as f64);
            let mut t = dy.atan2(dx) - std::f64::consts::FRAC_PI_2;
            if let Some(&prev) = out.last() {
                while t < prev {
                    t += tau;
                }
            }
            out.push(t);
        }
        out
    }

    /// True iff the closed halfplane misses the hull: `{ a x + b y >= c }`
    /// when `upper` is set, `{ a x + b y <= c }` otherwise.
    pub fn misses(&self, h: &Line, upper: bool) -> bool {
        if self.hull.is_empty() {
            return true;
        }
        let (a, b) = if upper { (h.a, h.b) } else { (-h.a, -h.b) };
        let i = self.extreme(a, b).unwrap();
        let s = h.eval_sign(self.hull[i]);
        if upper {
            s < 0
        } else {
            s > 0
        }
    }
}

/// Indices of points involved in a degeneracy: duplicates, vertical pairs
/// and collinear triples. Exact, `O(n^2 log n)`.
pub fn degenerate_indices(pts: &[Point]) -> Vec<usize> {
    let n = pts.len();
    let mut bad = vec![false; n];
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by_key(|&i| pts[i].x);
    for w in by_x.windows(2) {
        if pts[w[0]].x == pts[w[1]].x {
            bad[w[0]] = true;
            bad[w[1]] = true;
        }
    }
    let mut dirs: Vec<(i64, i64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        dirs.clear();
        for j in 0..n {
            if j == i {
                continue;
            }
            let (mut dx, mut dy) = (pts[j].x - pts[i].x, pts[j].y - pts[i].y);
            if dx == 0 && dy == 0 {
                bad[i] = true;
                bad[j] = true;
                continue;
            }
            if dy < 0 || (dy == 0 && dx < 0) {
                dx = -dx;
                dy = -dy;
            }
            dirs.push((dx, dy, j));
        }
        dirs.sort_by(|u, v| {
            let c = u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128;
            0.cmp(&c)
        });
        for w in dirs.windows(2) {
            let c = w[0].0 as i128 * w[1].1 as i128 - w[0].1 as i128 * w[1].0 as i128;
            if c == 0 {
                bad[i] = true;
                bad[w[0].2] = true;
                bad[w[1].2] = true;
            }
        }
    }
    (0..n).filter(|&i| bad[i]).collect()
}

/// Multiply coordinates by `2^bits`, moving coarse input onto the fine grid.
pub fn refine(pts: &[Point], bits: u32) -> Vec<Point> {
    pts.iter().map(|p| Point::new(p.x << bits, p.y << bits)).collect()
}

/// Resolve degeneracies by moving offending points within `band` grid units.
///
/// Points that take part in no degeneracy are returned unchanged; each
/// offending point receives a fresh independent offset per coordinate, drawn
/// uniformly from `[-band, band]`, until the exhaustive scan comes back clean.
pub fn perturb_general_position(pts: &[Point], rng: &mut Rng, band: i64) -> Result<Vec<Point>, GeomError> {
    const ROUNDS: usize = 64;
    for p in pts {
        if p.x.abs() > COORD_LIMIT - band || p.y.abs() > COORD_LIMIT - band {
            return Err(GeomError::Range(p.x.abs().max(p.y.abs())));
        }
    }
    let mut out = pts.to_vec();
    for _ in 0..ROUNDS {
        let bad = degenerate_indices(&out);
        if bad.is_empty() {
            return Ok(out);
        }
        for i in bad {
            out[i] = Point::new(
                pts[i].x + rng.range_i64(-band, band),
                pts[i].y + rng.range_i64(-band, band),
            );
        }
    }
    let left = degenerate_indices(&out).len();
    if left == 0 {
        Ok(out)
    } else {
        Err(GeomError::BandTooSmall(left, ROUNDS))
    }
}

// ---------------------------------------------------------------------------
// Three dimensions: points, planes, orientation and duality.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Point3 {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Point3 { x, y, z }
    }
}

/// The oriented plane `a x + b y + c z = d`; above is `> d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plane {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl Plane {
    /// The plane through three points, above on the side where
    /// `orientation3(p, q, r, .)` is positive.
    pub fn through(p: Point3, q: Point3, r: Point3) -> Plane {
        let u = [(q.x - p.x) as i128, (q.y - p.y) as i128, (q.z - p.z) as i128];
        let v = [(r.x - p.x) as i128, (r.y - p.y) as i128, (r.z - p.z) as i128];
        let n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        Plane {
            a: n[0],
            b: n[1],
            c: n[2],
            d: n[0] * p.x as i128 + n[1] * p.y as i128 + n[2] * p.z as i128,
        }
    }

    pub fn side_of(&self, p: Point3) -> Side {
        use num_bigint::BigInt;
        let fast = (|| {
            self.a
                .checked_mul(p.x as i128)?
                .checked_add(self.b.checked_mul(p.y as i128)?)?
                .checked_add(self.c.checked_mul(p.z as i128)?)?
                .checked_sub(self.d)
        })();
        let s = match fast {
            Some(v) => v.signum() as i32,
            None => {
                let v = BigInt::from(self.a) * p.x + BigInt::from(self.b) * p.y + BigInt::from(self.c) * p.z
                    - BigInt::from(self.d);
                big_sign(&v)
            }
        };
        Side::from_sign(s)
    }
}

/// Sign of the determinant of `(b-a, c-a, d-a)`.
pub fn orientation3(a: Point3, b: Point3, c: Point3, d: Point3) -> i32 {
    match Plane::through(a, b, c).side_of(d) {
        Side::Above => 1,
        Side::On => 0,
        Side::Below => -1,
    }
}

/// `(a, b, c) -> z = a x + b y - c`, oriented upward.
pub fn dual_plane(p: Point3) -> Plane {
    Plane {
        a: -(p.x as i128),
        b: -(p.y as i128),
        c: 1,
        d: -(p.z as i128),
    }
}

/// Dual point of a plane `z = m1 x + m2 y + q` written with `c = 1`.
pub fn dual_point3(h: &Plane) -> Result<Point3, GeomError> {
    let h = if h.c < 0 {
        Plane {
            a: -h.a,
            b: -h.b,
            c: -h.c,
            d: -h.d,
        }
    } else {
        *h
    };
    if h.c != 1 {
        return Err(GeomError::GeneralPosition(
            "plane must be of the form z = m1 x + m2 y + q".into(),
        ));
    }
    Ok(Point3::new(-h.a as i64, -h.b as i64, -h.d as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_examples() {
        let o = Point::new(0, 0);
        assert_eq!(orientation(o, Point::new(1, 0), Point::new(0, 1)), 1);
        assert_eq!(orientation(o, Point::new(1, 1), Point::new(2, 2)), 0);
        assert_eq!(orientation(o, Point::new(0, 1), Point::new(1, 0)), -1);
    }

    #[test]
    fn side_examples() {
        let h = Line::horizontal(0);
        assert_eq!(side_of(&h, Point::new(3, 1)), Side::Above);
        assert_eq!(side_of(&h, Point::new(5, 0)), Side::On);
        assert_eq!(side_of(&Line::new(1, 1, 2), Point::new(0, 0)), Side::Below);
    }

    #[test]
    fn dual_roundtrip() {
        let p = Point::new(7, -3);
        let back = dualize(dualize(Dual::Point(RatPoint::from_point(p))).unwrap()).unwrap();
        assert_eq!(back, Dual::Point(RatPoint::from_point(p)));
    }

    #[test]
    fn dual_line_convention() {
        // (2, 5) -> y = 2x - 5
        let h = dual_line(Point::new(2, 5));
        assert_eq!(h.side_of(Point::new(0, -5)), Side::On);
        assert_eq!(h.side_of(Point::new(3, 1)), Side::On);
        assert_eq!(h.side_of(Point::new(3, 2)), Side::Above);
    }

    #[test]
    fn vertical_has_no_dual() {
        assert!(dual_point(&Line::vertical(4)).is_err());
    }

    #[test]
    fn hull_square_with_center() {
        let pts = [
            Point::new(0, 0),
            Point::new(4, 0),
            Point::new(4, 4),
            Point::new(0, 4),
            Point::new(2, 2),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&Point::new(2, 2)));
    }

    #[test]
    fn hull_drops_collinear() {
        let pts = [Point::new(0, 0), Point::new(1, 0), Point::new(2, 0), Point::new(1, 1)];
        assert_eq!(convex_hull(&pts).len(), 3);
    }

    #[test]
    fn crosses_examples() {
        let t = Simplex::from_points(Point::new(0, 0), Point::new(2, 0), Point::new(0, 2));
        assert!(crosses(&Line::new(1, 1, 1), &t));
        assert!(!crosses(&Line::vertical(5), &t));
        let b = Simplex::bounding(&[Point::new(0, 0), Point::new(1, 1)]);
        assert!(crosses(&Line::vertical(1_000_000), &b));
    }

    #[test]
    fn touching_counts_as_crossing() {
        let t = Simplex::from_points(Point::new(0, 0), Point::new(2, 0), Point::new(0, 2));
        assert!(crosses(&Line::vertical(2), &t));
        assert!(!crosses_interior(&Line::vertical(2), &t));
    }

    #[test]
    fn collinear_triple_is_fixed() {
        let pts = [Point::new(0, 0), Point::new(10, 10), Point::new(20, 20)];
        assert_eq!(degenerate_indices(&pts).len(), 3);
        let mut rng = Rng::new(3);
        let out = perturb_general_position(&pts, &mut rng, 1).unwrap();
        assert!(degenerate_indices(&out).is_empty());
    }

    #[test]
    fn duplicates_are_separated() {
        let pts = [Point::new(5, 5), Point::new(5, 5), Point::new(100, 37)];
        let mut rng = Rng::new(9);
        let out = perturb_general_position(&pts, &mut rng, 1).unwrap();
        assert_ne!(out[0], out[1]);
    }

    #[test]
    fn band_too_small_for_many_duplicates() {
        let pts = vec![Point::new(0, 0); 12];
        let mut rng = Rng::new(1);
        assert!(matches!(
            perturb_general_position(&pts, &mut rng, 1),
            Err(GeomError::BandTooSmall(..))
        ));
    }

    #[test]
    fn generic_input_unchanged() {
        let pts = [Point::new(0, 0), Point::new(3, 1), Point::new(1, 5)];
        let mut rng = Rng::new(1);
        assert_eq!(perturb_general_position(&pts, &mut rng, 1).unwrap(), pts.to_vec());
    }

    #[test]
    fn hull_tester_extremes() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = i as f64 / 40.0 * std::f64::consts::TAU;
                Point::new((1e6 * t.cos()) as i64, (1e6 * t.sin()) as i64)
            })
            .collect();
        let ht = HullTester::new(&pts);
        for (a, b) in [(1, 0), (0, 1), (-1, 3), (5, -2), (-7, -7)] {
            let i = ht.extreme(a, b).unwrap();
            let best = ht.hull.iter().map(|p| a * p.x as i128 + b * p.y as i128).max().unwrap();
            assert_eq!(a * ht.hull[i].x as i128 + b * ht.hull[i].y as i128, best);
        }
    }

    #[test]
    fn plane_duality_roundtrip() {
        let p = Point3::new(3, -4, 9);
        assert_eq!(dual_point3(&dual_plane(p)).unwrap(), p);
    }
}
