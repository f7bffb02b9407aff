//! Text formats: point files and halfplane query batches.
//!
//! A point file starts with `d n scale` and is followed by `n` lines of `d`
//! integers separated by single spaces. `scale` is the power of ten that was
//! applied to the original coordinates before snapping to the grid.

use crate::geometry::{GeomError, Line, Point, Point3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFile {
    pub d: usize,
    pub scale: u32,
    pub rows: Vec<Vec<i64>>,
}

impl PointFile {
    pub fn from_points(pts: &[Point], scale: u32) -> Self {
        PointFile {
            d: 2,
            scale,
            rows: pts.iter().map(|p| vec![p.x, p.y]).collect(),
        }
    }

    pub fn from_points3(pts: &[Point3], scale: u32) -> Self {
        PointFile {
            d: 3,
            scale,
            rows: pts.iter().map(|p| vec![p.x, p.y, p.z]).collect(),
        }
    }

    pub fn points(&self) -> Result<Vec<Point>, GeomError> {
        if self.d != 2 {
            return Err(GeomError::Format(format!("expected d = 2, found {}", self.d)));
        }
        Ok(self.rows.iter().map(|r| Point::new(r[0], r[1])).collect())
    }

    pub fn points3(&self) -> Result<Vec<Point3>, GeomError> {
        if self.d != 3 {
            return Err(GeomError::Format(format!("expected d = 3, found {}", self.d)));
        }
        Ok(self.rows.iter().map(|r| Point3::new(r[0], r[1], r[2])).collect())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.d, self.rows.len(), self.scale);
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, GeomError> {
        let bad = |m: String| GeomError::Format(m);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let h: Vec<&str> = head.split_whitespace().collect();
        if h.len() != 3 {
            return Err(bad(format!("header must be `d n scale`, got `{head}`")));
        }
        let d: usize = h[0].parse().map_err(|_| bad(format!("bad d `{}`", h[0])))?;
        let n: usize = h[1].parse().map_err(|_| bad(format!("bad n `{}`", h[1])))?;
        let scale: u32 = h[2].parse().map_err(|_| bad(format!("bad scale `{}`", h[2])))?;
        if d != 2 && d != 3 {
            return Err(bad(format!("unsupported dimension {d}")));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, l) in lines.enumerate() {
            let r: Result<Vec<i64>, _> = l.split_whitespace().map(|t| t.parse::<i64>()).collect();
            let r = r.map_err(|_| bad(format!("line {}: not integers", i + 2)))?;
            if r.len() != d {
                return Err(bad(format!("line {}: expected {d} coordinates", i + 2)));
            }
            if let Some(&v) = r.iter().find(|v| v.abs() > crate::geometry::COORD_LIMIT) {
                return Err(GeomError::Range(v));
            }
            rows.push(r);
        }
        if rows.len() != n {
            return Err(bad(format!("header says {n} points, found {}", rows.len())));
        }
        Ok(PointFile { d, scale, rows })
    }
}

/// A query `a x + b y <= c`, one per line as `a b c`.
pub fn parse_queries(text: &str) -> Result<Vec<Line>, GeomError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() || l.trim_start().starts_with('#') {
            continue;
        }
        let v: Result<Vec<i128>, _> = l.split_whitespace().map(|t| t.parse::<i128>()).collect();
        let v = v.map_err(|_| GeomError::Format(format!("query line {}: not integers", i + 1)))?;
        if v.len() != 3 {
            return Err(GeomError::Format(format!("query line {}: expected `a b c`", i + 1)));
        }
        out.push(Line::new(v[0], v[1], v[2]));
    }
    Ok(out)
}

pub fn queries_to_text(qs: &[Line]) -> String {
    qs.iter().map(|h| format!("{} {} {}\n", h.a, h.b, h.c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let pts = vec![Point::new(1, -2), Point::new(30, 4)];
        let f = PointFile::from_points(&pts, 6);
        let g = PointFile::parse(&f.to_text()).unwrap();
        assert_eq!(g.points().unwrap(), pts);
        assert_eq!(g.scale, 6);
    }

    #[test]
    fn rejects_short_file() {
        assert!(PointFile::parse("2 3 0\n1 2\n").is_err());
        assert!(PointFile::parse("2 1 0\n1\n").is_err());
    }

    #[test]
    fn queries() {
        let q = parse_queries("1 2 3\n# c\n-1 0 5\n").unwrap();
        assert_eq!(q, vec![Line::new(1, 2, 3), Line::new(-1, 0, 5)]);
    }
}
