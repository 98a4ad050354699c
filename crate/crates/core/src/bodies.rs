//! Convex bodies with separation oracles and membership tests.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{dot, orient2d, Halfspace, PointSet};

/// Answer of a separation oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Separation {
    Inside,
    /// A closed halfspace containing the body but not the query.
    Separated(Halfspace),
}

pub trait SeparationOracle {
    fn query(&mut self, q: &[f64]) -> Result<Separation>;
}

impl<F> SeparationOracle for F
where
    F: FnMut(&[f64]) -> Result<Separation>,
{
    fn query(&mut self, q: &[f64]) -> Result<Separation> {
        self(q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{x : lo <= <normal, x> <= hi}`.
    Slab {
        normal: Vec<f64>,
        lo: f64,
        hi: f64,
    },
    /// Axis-aligned ellipsoid `sum ((x_i - c_i) / r_i)^2 <= 1`.
    Ellipsoid {
        center: Vec<f64>,
        radii: Vec<f64>,
    },
    /// Intersection of closed halfspaces.
    Polytope {
        halfspaces: Vec<Halfspace>,
    },
    /// Convex polygon given by its vertices in counter-clockwise order;
    /// membership uses exact orientation tests.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// The empty set; every query is separated by a halfspace holding no finite point.
    Empty {
        dim: usize,
    },
}

impl Body {
    /// Convex hull of planar points (Andrew's monotone chain, exact predicates).
    pub fn hull_2d(points: &PointSet) -> Result<Body> {
        if points.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: points.dim() });
        }
        let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() <= 2 {
            return Ok(Body::Polygon { vertices: pts });
        }
        let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
                if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for p in iter {
                while hull.len() >= start + 2 && orient2d(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                    hull.pop();
                }
                hull.push(*p);
            }
            hull.pop();
        }
        Ok(Body::Polygon { vertices: hull })
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Ball { center, .. } | Body::Ellipsoid { center, .. } => center.len(),
            Body::Slab { normal, .. } => normal.len(),
            Body::Polytope { halfspaces } => halfspaces.first().map_or(0, Halfspace::dim),
            Body::Polygon { .. } => 2,
            Body::Empty { dim } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        let d = self.dim();
        let ok = d >= 1
            && match self {
                Body::Ball { center, radius } => finite(center) && radius.is_finite() && *radius >= 0.0,
                Body::Slab { normal, lo, hi } => {
                    finite(normal) && dot(normal, normal) > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi
                }
                Body::Ellipsoid { center, radii } => {
                    finite(center) && radii.len() == d && radii.iter().all(|r| *r > 0.0 && r.is_finite())
                }
                Body::Polytope { halfspaces } => halfspaces.iter().all(|h| {
                    h.dim() == d && finite(&h.normal) && dot(&h.normal, &h.normal) > 0.0 && h.offset.is_finite()
                }),
                Body::Polygon { vertices } => !vertices.is_empty() && vertices.iter().all(|v| finite(v)),
                Body::Empty { .. } => true,
            };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("malformed body {self:?}")))
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Body::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius
            }
            Body::Slab { normal, lo, hi } => {
                let v = dot(normal, x);
                *lo <= v && v <= *hi
            }
            Body::Ellipsoid { center, radii } => ellipsoid_level(center, radii, x) <= 1.0,
            Body::Polytope { halfspaces } => halfspaces.iter().all(|h| h.contains(x)),
            Body::Polygon { vertices } => polygon_contains(vertices, x),
            Body::Empty { .. } => false,
        }
    }

    /// `|C ∩ P|`.
    pub fn count(&self, points: &PointSet) -> usize {
        points.iter().filter(|p| self.contains(p)).count()
    }

    pub fn separate(&self, q: &[f64]) -> Result<Separation> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: q.len() });
        }
        if self.contains(q) {
            return Ok(Separation::Inside);
        }
        // Each arm yields a normal `n` and the body's minimum of <n, x>; the
        // halfspace boundary is placed halfway between that and <n, q>.
        let (normal, support) = match self {
            Body::Ball { center, radius } => {
                let n: Vec<f64> = center.iter().zip(q).map(|(c, q)| c - q).collect();
                let len = dot(&n, &n).sqrt();
                let s = dot(&n, center) - radius * len;
                (n, s)
            }
            Body::Slab { normal, lo, hi } => {
                if dot(normal, q) < *lo {
                    (normal.clone(), *lo)
                } else {
                    (normal.iter().map(|c| -c).collect(), -hi)
                }
            }
            Body::Ellipsoid { center, radii } => {
                // Outward gradient direction of the level function at q.
                let g: Vec<f64> = q.iter().zip(center).zip(radii).map(|((q, c), r)| (q - c) / (r * r)).collect();
                let n: Vec<f64> = g.iter().map(|v| -v).collect();
                let width = g.iter().zip(radii).map(|(g, r)| (g * r) * (g * r)).sum::<f64>().sqrt();
                (n.clone(), dot(&n, center) - width)
            }
            Body::Polytope { halfspaces } => {
                let h = halfspaces
                    .iter()
                    .filter(|h| !h.contains(q))
                    .max_by(|a, b| violation(a, q).total_cmp(&violation(b, q)))
                    .expect("q is outside, so some constraint fails");
                (h.normal.clone(), h.offset)
            }
            Body::Polygon { vertices } => {
                let n = polygon_normal(vertices, q);
                let s = vertices.iter().map(|v| dot(&n, v)).fold(f64::INFINITY, f64::min);
                (n, s)
            }
            Body::Empty { dim } => {
                let mut n = vec![0.0; *dim];
                n[0] = 1.0;
                return Ok(Separation::Separated(Halfspace::new(n, f64::MAX)?));
            }
        };
        let offset = 0.5 * (dot(&normal, q) + support);
        Ok(Separation::Separated(Halfspace::new(normal, offset)?))
    }
}

fn violation(h: &Halfspace, q: &[f64]) -> f64 {
    (h.offset - dot(&h.normal, q)) / dot(&h.normal, &h.normal).sqrt()
}

fn ellipsoid_level(center: &[f64], radii: &[f64], x: &[f64]) -> f64 {
    x.iter().zip(center).zip(radii).map(|((x, c), r)| ((x - c) / r).powi(2)).sum()
}

fn polygon_contains(v: &[[f64; 2]], x: &[f64]) -> bool {
    match v.len() {
        0 => false,
        1 => v[0][0] == x[0] && v[0][1] == x[1],
        2 => {
            orient2d(&v[0], &v[1], x) == 0.0
                && x[0] >= v[0][0].min(v[1][0])
                && x[0] <= v[0][0].max(v[1][0])
                && x[1] >= v[0][1].min(v[1][1])
                && x[1] <= v[0][1].max(v[1][1])
        }
        k => (0..k).all(|i| orient2d(&v[i], &v[(i + 1) % k], x) >= 0.0),
    }
}

fn polygon_normal(v: &[[f64; 2]], q: &[f64]) -> Vec<f64> {
    let k = v.len();
    let left = |a: &[f64; 2], b: &[f64; 2]| vec![a[1] - b[1], b[0] - a[0]];
    if k >= 3 {
        for i in 0..k {
            if orient2d(&v[i], &v[(i + 1) % k], q) < 0.0 {
                return left(&v[i], &v[(i + 1) % k]);
            }
        }
    }
    if k == 2 {
        let o = orient2d(&v[0], &v[1], q);
        if o < 0.0 {
            return left(&v[0], &v[1]);
        }
        if o > 0.0 {
            return left(&v[1], &v[0]);
        }
        // On the supporting line, beyond one end.
        let dir = vec![v[1][0] - v[0][0], v[1][1] - v[0][1]];
        return if dot(&dir, q) < dot(&dir, &v[0]) { dir } else { dir.iter().map(|c| -c).collect() };
    }
    vec![v[0][0] - q[0], v[0][1] - q[1]]
}

impl SeparationOracle for Body {
    fn query(&mut self, q: &[f64]) -> Result<Separation> {
        self.separate(q)
    }
}

impl SeparationOracle for &Body {
    fn query(&mut self, q: &[f64]) -> Result<Separation> {
        self.separate(q)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolytopeJson {
    Vertices(Vec<Vec<f64>>),
    Halfspaces { halfspaces: Vec<Halfspace> },
}

/// Parses a polytope file: either an array of planar vertices (their convex
/// hull is taken) or `{"halfspaces": [{"normal": [...], "offset": b}, ...]}`.
pub fn parse_polytope_json(text: &str) -> Result<Body> {
    let parsed: PolytopeJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let body = match parsed {
        PolytopeJson::Vertices(rows) => {
            let pts = PointSet::from_rows(rows).map_err(|e| Error::Parse(e.to_string()))?;
            Body::hull_2d(&pts).map_err(|e| Error::Parse(e.to_string()))?
        }
        PolytopeJson::Halfspaces { halfspaces } => {
            let hs = halfspaces
                .into_iter()
                .map(|h| Halfspace::new(h.normal, h.offset))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse(e.to_string()))?;
            if hs.is_empty() {
                return Err(Error::Parse("polytope needs at least one halfspace".into()));
            }
            Body::Polytope { halfspaces: hs }
        }
    };
    body.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(body)
}

/// Parses an inline body description:
///
/// * `ball:c_1,...,c_d,r`
/// * `slab:a_1,...,a_d,lo,hi`
/// * `ellipsoid:c_1,...,c_d,r_1,...,r_d`
/// * `polygon:x_1,y_1;x_2,y_2;...` (convex hull of the listed points)
/// * `empty:d`
pub fn parse_body(spec: &str) -> Result<Body> {
    let (kind, rest) =
        spec.split_once(':').ok_or_else(|| Error::Parse(format!("body spec {spec:?} lacks a kind prefix")))?;
    let nums = |s: &str| -> Result<Vec<f64>> {
        let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let v = v.map_err(|e| Error::Parse(format!("body spec {spec:?}: {e}")))?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse(format!("body spec {spec:?} has non-finite numbers")));
        }
        Ok(v)
    };
    let body = match kind.trim() {
        "ball" => {
            let v = nums(rest)?;
            if v.len() < 2 {
                return Err(Error::Parse("ball needs a center and a radius".into()));
            }
            let (c, r) = v.split_at(v.len() - 1);
            Body::Ball { center: c.to_vec(), radius: r[0] }
        }
        "slab" => {
            let v = nums(rest)?;
            if v.len() < 3 {
                return Err(Error::Parse("slab needs a normal, lo and hi".into()));
            }
            let d = v.len() - 2;
            Body::Slab { normal: v[..d].to_vec(), lo: v[d], hi: v[d + 1] }
        }
        "ellipsoid" => {
            let v = nums(rest)?;
            if v.len() < 2 || v.len() % 2 != 0 {
                return Err(Error::Parse("ellipsoid needs a center and one radius per axis".into()));
            }
            let (c, r) = v.split_at(v.len() / 2);
            Body::Ellipsoid { center: c.to_vec(), radii: r.to_vec() }
        }
        "polygon" => {
            let rows = rest.split(';').map(nums).collect::<Result<Vec<_>>>()?;
            let pts = PointSet::from_rows(rows).map_err(|e| Error::Parse(e.to_string()))?;
            Body::hull_2d(&pts).map_err(|e| Error::Parse(e.to_string()))?
        }
        "empty" => {
            let dim: usize = rest.trim().parse().map_err(|e| Error::Parse(format!("body spec {spec:?}: {e}")))?;
            Body::Empty { dim }
        }
        other => return Err(Error::Parse(format!("unknown body kind {other:?}"))),
    };
    body.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(body)
}
