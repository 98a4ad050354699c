//! Points, halfspaces and Radon partitions.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// Absolute floor for the relative tolerances used in elimination.
pub const TOL_FLOOR: f64 = 1e-12;

/// A point in `d`-dimensional space with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("point must have dimension >= 1".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finite multiset of points of a common dimension, stored row-major.
///
/// Duplicates are allowed: samples are drawn with replacement.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::Domain(format!(
                "coordinate buffer of length {} is not a positive multiple of {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {c}")));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::Domain("point set must be non-empty".into()))?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            check_dim(dim, p.dim())?;
            coords.extend_from_slice(p.coords());
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| Error::Domain("point set must be non-empty".into()))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            check_dim(dim, r.len())?;
            coords.extend(r);
        }
        PointSet::from_flat(dim, coords)
    }

    /// Crate-internal constructor for buffers already known to be valid.
    pub(crate) fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && !coords.is_empty() && coords.len() % dim == 0);
        PointSet { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a constructed set; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point {
        Point(self.get(i).to_vec())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Subset selected by `keep`, or `None` when nothing is kept.
    pub fn filter(&self, mut keep: impl FnMut(&[f64]) -> bool) -> Option<PointSet> {
        let mut coords = Vec::new();
        for p in self.iter() {
            if keep(p) {
                coords.extend_from_slice(p);
            }
        }
        if coords.is_empty() {
            None
        } else {
            Some(PointSet::from_flat_unchecked(self.dim, coords))
        }
    }

    /// Largest absolute coordinate, used to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for p in self.iter() {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        PointSet::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The closed halfspace `{x : <normal, x> >= offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = dot(&normal, &normal).sqrt();
        if normal.is_empty() || !norm.is_finite() || norm <= 0.0 || !offset.is_finite() {
            return Err(Error::Domain("halfspace normal must be finite and nonzero".into()));
        }
        Ok(Halfspace { normal, offset })
    }

    /// Closed halfspace with inward `normal` whose boundary passes through `through`.
    pub fn through(normal: Vec<f64>, through: &[f64]) -> Result<Self> {
        let offset = dot(&normal, through);
        Halfspace::new(normal, offset)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dot(&self.normal, x) >= self.offset
    }

    /// True when `x` lies in the open complement `{<normal, x> < offset}`.
    pub fn excludes(&self, x: &[f64]) -> bool {
        dot(&self.normal, x) < self.offset
    }
}

/// Number of points of `points` inside the closed halfspace `h`.
pub fn halfspace_count(points: &PointSet, h: &Halfspace) -> Result<usize> {
    check_dim(points.dim(), h.dim())?;
    Ok(points.iter().filter(|p| h.contains(p)).count())
}

/// A Radon partition of `d + 2` points together with its Radon point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadonPartition {
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
    pub coeffs1: Vec<f64>,
    pub coeffs2: Vec<f64>,
    pub point: Point,
}

/// Computes a Radon partition and Radon point of exactly `d + 2` points.
pub fn radon_point(pts: &[Point]) -> Result<RadonPartition> {
    let d = pts.first().map(Point::dim).ok_or_else(|| Error::Domain("radon_point needs d + 2 points, got 0".into()))?;
    for p in pts {
        check_dim(d, p.dim())?;
    }
    if pts.len() != d + 2 {
        return Err(Error::Domain(format!("radon_point needs exactly d + 2 = {} points, got {}", d + 2, pts.len())));
    }
    let refs: Vec<&[f64]> = pts.iter().map(Point::coords).collect();
    let mut solver = RadonSolver::new(d);
    let mut out = vec![0.0; d];
    solver.solve(&refs, &mut out)?;

    let mut part1 = Vec::new();
    let mut part2 = Vec::new();
    let mut coeffs1 = Vec::new();
    let mut coeffs2 = Vec::new();
    let (pos, neg) = solver.masses();
    for (i, &l) in solver.lambda.iter().enumerate() {
        if l >= -TOL_FLOOR {
            part1.push(i);
            coeffs1.push(if l > TOL_FLOOR { l / pos } else { 0.0 });
        } else {
            part2.push(i);
            coeffs2.push(-l / neg);
        }
    }
    Ok(RadonPartition { part1, part2, coeffs1, coeffs2, point: Point(out) })
}

/// Reusable scratch space for repeated Radon point computations in a fixed
/// dimension.
///
/// The affine dependency `lambda` solves `sum lambda_i = 0` and
/// `sum lambda_i p_i = 0`; it is found by Gauss-Jordan elimination with partial
/// pivoting on the `(d + 1) x (d + 2)` system, fixing the first free variable
/// to one.
#[derive(Clone, Debug)]
pub struct RadonSolver {
    dim: usize,
    matrix: Vec<f64>,
    mean: Vec<f64>,
    pivots: Vec<Option<usize>>,
    lambda: Vec<f64>,
}

impl RadonSolver {
    pub fn new(dim: usize) -> Self {
        RadonSolver {
            dim,
            matrix: vec![0.0; (dim + 1) * (dim + 2)],
            mean: vec![0.0; dim],
            pivots: vec![None; dim + 1],
            lambda: vec![0.0; dim + 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Affine dependency from the last successful solve, scaled to max |lambda| = 1.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    fn masses(&self) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for &l in &self.lambda {
            if l > TOL_FLOOR {
                pos += l;
            } else if l < -TOL_FLOOR {
                neg -= l;
            }
        }
        (pos, neg)
    }

    /// Writes the Radon point of `pts` (exactly `d + 2` points) into `out`.
    pub fn solve(&mut self, pts: &[&[f64]], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(pts.len(), self.dim + 2);
        self.solve_by(|j| pts[j], out)
    }

    /// Same as [`RadonSolver::solve`] with the `d + 2` points stored
    /// row-major in `flat`.
    pub fn solve_flat(&mut self, flat: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim;
        debug_assert_eq!(flat.len(), d * (d + 2));
        self.solve_by(|j| &flat[j * d..(j + 1) * d], out)
    }

    fn solve_by<'a>(&mut self, pt: impl Fn(usize) -> &'a [f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim;
        let cols = d + 2;
        let rows = d + 1;
        debug_assert_eq!(out.len(), d);

        // Centre and scale the coordinates; lambda is invariant under both.
        self.mean.iter_mut().for_each(|m| *m = 0.0);
        for j in 0..cols {
            for (m, c) in self.mean.iter_mut().zip(pt(j)) {
                *m += c;
            }
        }
        let inv = 1.0 / cols as f64;
        self.mean.iter_mut().for_each(|m| *m *= inv);
        let mut scale = 0.0_f64;
        for j in 0..cols {
            for (c, m) in pt(j).iter().zip(&self.mean) {
                scale = scale.max((c - m).abs());
            }
        }
        let inv_scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };

        let a = &mut self.matrix;
        a[..cols].fill(1.0);
        for j in 0..cols {
            let p = pt(j);
            for c in 0..d {
                a[(c + 1) * cols + j] = (p[c] - self.mean[c]) * inv_scale;
            }
        }

        self.pivots.iter_mut().for_each(|p| *p = None);
        let mut r = 0;
        let mut free = None;
        for col in 0..cols {
            if r == rows {
                if free.is_none() {
                    free = Some(col);
                }
                continue;
            }
            let mut best = r;
            let mut best_val = a[r * cols + col].abs();
            for i in r + 1..rows {
                let v = a[i * cols + col].abs();
                if v > best_val {
                    best = i;
                    best_val = v;
                }
            }
            if best_val <= TOL_FLOOR {
                if free.is_none() {
                    free = Some(col);
                }
                continue;
            }
            if best != r {
                for j in 0..cols {
                    a.swap(r * cols + j, best * cols + j);
                }
            }
            let piv = a[r * cols + col];
            for j in col..cols {
                a[r * cols + j] /= piv;
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = a[i * cols + col];
                if f != 0.0 {
                    for j in col..cols {
                        a[i * cols + j] -= f * a[r * cols + j];
                    }
                }
            }
            self.pivots[r] = Some(col);
            r += 1;
        }
        // `rows < cols`, so a free column always exists.
        let free = free.ok_or_else(|| Error::DegenerateInput("no free variable".into()))?;

        self.lambda.iter_mut().for_each(|l| *l = 0.0);
        self.lambda[free] = 1.0;
        for (row, pc) in self.pivots.iter().enumerate() {
            if let Some(pc) = *pc {
                self.lambda[pc] = -a[row * cols + free];
            }
        }
        let max = self.lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        if !max.is_finite() || max <= TOL_FLOOR {
            return Err(Error::DegenerateInput("elimination produced no usable null vector".into()));
        }
        self.lambda.iter_mut().for_each(|l| *l /= max);

        let (pos, neg) = self.masses();
        if pos <= TOL_FLOOR || neg <= TOL_FLOOR {
            return Err(Error::DegenerateInput("affine dependency has an empty side".into()));
        }
        // Average the two convex combinations; each equals the Radon point.
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &l) in self.lambda.iter().enumerate() {
            let w = if l > TOL_FLOOR {
                0.5 * l / pos
            } else if l < -TOL_FLOOR {
                -0.5 * l / neg
            } else {
                continue;
            };
            for (o, c) in out.iter_mut().zip(pt(j)) {
                *o += w * c;
            }
        }
        if out.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite Radon point".into()));
        }
        Ok(())
    }
}

/// Exact orientation of `c` relative to the directed line `a -> b`:
/// positive when counter-clockwise.
pub fn orient2d(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    )
}

/// Exact orientation of `d` relative to the plane through `a, b, c`: positive
/// when `d` lies on the negative side of the normal `(b - a) x (c - a)`.
pub fn orient3d(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let p = |v: &[f64]| robust::Coord3D { x: v[0], y: v[1], z: v[2] };
    robust::orient3d(p(a), p(b), p(c), p(d))
}
