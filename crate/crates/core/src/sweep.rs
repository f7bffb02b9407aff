//! Rotational sweep over all lines through two input points.
//!
//! For each pivot `p` the other points are sorted by direction modulo a half
//! turn and an oriented line through `p` is rotated once around it. Each time
//! the line passes through a second point `q`, the visitor sees the exact
//! strict-left set. Every combinatorially distinct closed or open halfplane
//! bounded by a line through two points is obtained from such an event by
//! choosing which of `p` and `q` to add.

use crate::geometry::Point;

/// Callbacks for [`pair_line_sweep`].
///
/// `left[j]` is the current strict-left flag; the pivot and the point on the
/// line are always reported as not left during [`SweepVisitor::event`].
pub trait SweepVisitor {
    fn start(&mut self, pivot: usize, left: &[bool]);
    fn flip(&mut self, j: usize, now_left: bool);
    fn event(&mut self, pivot: usize, other: usize, left: &[bool]);
}

fn upper(dx: i64, dy: i64) -> (i64, i64, bool) {
    if dy < 0 || (dy == 0 && dx < 0) {
        (-dx, -dy, false)
    } else {
        (dx, dy, true)
    }
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

/// Run the sweep with every point as pivot, or only the listed pivots.
pub fn pair_line_sweep<V: SweepVisitor>(pts: &[Point], pivots: Option<&[usize]>, v: &mut V) {
    let n = pts.len();
    let all: Vec<usize>;
    let pivots = match pivots {
        Some(p) => p,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    let mut left = vec![false; n];
    let mut dirs: Vec<(i64, i64, bool, usize)> = Vec::with_capacity(n);
    for &i in pivots {
        let p = pts[i];
        dirs.clear();
        for (j, q) in pts.iter().enumerate() {
            left[j] = false;
            if j == i {
                continue;
            }
            let (ux, uy, fwd) = upper(q.x - p.x, q.y - p.y);
            dirs.push((ux, uy, fwd, j));
        }
        dirs.sort_by(|a, b| 0.cmp(&cross((a.0, a.1), (b.0, b.1))));
        // Initial direction is just clockwise of +x: left means dy > 0,
        // or dy == 0 with dx > 0.
        for &(_, _, fwd, j) in &dirs {
            left[j] = fwd;
        }
        v.start(i, &left);
        for &(_, _, fwd, j) in &dirs {
            if fwd {
                left[j] = false;
                v.flip(j, false);
                v.event(i, j, &left);
            } else {
                v.event(i, j, &left);
                left[j] = true;
                v.flip(j, true);
            }
        }
    }
}

/// Strict-left counts of the four side variants of the line through `p`
/// and `q`, given the strict-left count `base` and the membership weights of
/// `p` and `q`. Yields `(count_on_left_side, p_included, q_included)`.
pub fn variants(base: i64, wp: i64, wq: i64) -> [(i64, bool, bool); 4] {
    [
        (base, false, false),
        (base + wp, true, false),
        (base + wq, false, true),
        (base + wp + wq, true, true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::orientation;

    struct Check<'a> {
        pts: &'a [Point],
        events: usize,
    }

    impl SweepVisitor for Check<'_> {
        fn start(&mut self, _: usize, _: &[bool]) {}
        fn flip(&mut self, _: usize, _: bool) {}
        fn event(&mut self, i: usize, j: usize, left: &[bool]) {
            self.events += 1;
            let (p, q) = (self.pts[i], self.pts[j]);
            assert!(!left[i] && !left[j]);
            // The line is directed along the upper-half direction of q - p.
            let side = if upper(q.x - p.x, q.y - p.y).2 { 1 } else { -1 };
            for (m, &r) in self.pts.iter().enumerate() {
                if m != i && m != j {
                    assert_eq!(left[m], orientation(p, q, r) == side);
                }
            }
        }
    }

    #[test]
    fn sweep_left_sets_are_open_sides() {
        let mut rng = crate::rng::Rng::new(5);
        let pts: Vec<Point> = (0..40)
            .map(|_| Point::new(rng.range_i64(-1000, 1000), rng.range_i64(-1000, 1000)))
            .collect();
        let pts = crate::geometry::perturb_general_position(&pts, &mut rng, 1).unwrap();
        let mut c = Check { pts: &pts, events: 0 };
        pair_line_sweep(&pts, None, &mut c);
        assert_eq!(c.events, 40 * 39);
    }
}
