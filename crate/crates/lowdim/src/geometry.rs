//! Points, weighted point sets, and powered distances.
//!
//! Multiplicity is carried by integer weights, never by duplicated rows: a
//! [`WeightedPointSet`] stores distinct coordinate vectors and a positive
//! weight per vector. All costs downstream are weighted sums, so an instance
//! with `2^24` copies of the origin is one stored point.

use crate::{Error, Result};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

/// A point in Euclidean space. Coordinates are finite `f64`s.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Origin of the given dimension.
    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// `i`-th standard basis vector (0-indexed) in the given dimension.
    pub fn basis(i: usize, dim: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Point(c)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Reflection of `self` through `center`: `2*center - self`.
    pub fn reflect_through(&self, center: &Point) -> Point {
        debug_assert_eq!(self.dim(), center.dim());
        Point(self.0.iter().zip(&center.0).map(|(x, c)| 2.0 * c - x).collect())
    }
}

/// Clustering power exponent `z >= 1` (z = 1 is the median objective,
/// z = 2 the means objective).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExponent(f64);

impl PowerExponent {
    pub fn new(z: f64) -> Result<Self> {
        if !z.is_finite() || z < 1.0 {
            return Err(Error::invalid(format!("power exponent must be >= 1, got {z}")));
        }
        Ok(PowerExponent(z))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `x^z`, using exact integer powers when z is integral so that z = 1, 2
    /// stay bit-predictable.
    pub fn pow(self, x: f64) -> f64 {
        if self.0 == 1.0 {
            x
        } else if self.0 == 2.0 {
            x * x
        } else if self.0.fract() == 0.0 && self.0 <= 32.0 {
            x.powi(self.0 as i32)
        } else {
            x.powf(self.0)
        }
    }
}

/// Euclidean distance.
pub fn dist(p: &Point, q: &Point) -> f64 {
    debug_assert_eq!(p.dim(), q.dim());
    p.0.iter()
        .zip(&q.0)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `dist(p, q)^z`.
pub fn powered_dist(p: &Point, q: &Point, z: PowerExponent) -> f64 {
    z.pow(dist(p, q))
}

/// Two-sided bounds on `dist(p,q)^z` from the distances of `p` and `q` to a
/// third point `r`, valid for every metric, every `z >= 1`, and every
/// `eps` in `(0, 1)`:
///
/// ```text
/// lower = (1 - z*eps) * d_pr^z - eps^-z     * d_qr^z
/// upper = (1 + eps)^(z-1) * d_pr^z + ((1+eps)/eps)^(z-1) * d_qr^z
/// ```
///
/// The lower bound may be negative (it is still valid); at `z = 1` the upper
/// bound collapses to the ordinary triangle inequality `d_pr + d_qr`.
pub fn triangle_bounds(d_pr: f64, d_qr: f64, z: PowerExponent, eps: f64) -> Result<(f64, f64)> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::invalid(format!("triangle bounds need eps in (0,1), got {eps}")));
    }
    if d_pr < 0.0 || d_qr < 0.0 {
        return Err(Error::invalid("distances must be nonnegative"));
    }
    let zf = z.get();
    let lower = (1.0 - zf * eps) * z.pow(d_pr) - eps.powf(-zf) * z.pow(d_qr);
    let upper = (1.0 + eps).powf(zf - 1.0) * z.pow(d_pr)
        + ((1.0 + eps) / eps).powf(zf - 1.0) * z.pow(d_qr);
    Ok((lower, upper))
}

/// Distinct points with positive integer multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<u64>,
    dim: usize,
}

impl WeightedPointSet {
    /// Build a set from parallel point/weight lists.
    ///
    /// Points with exactly equal coordinates are merged: the first occurrence
    /// keeps its position and accumulates the weights of later duplicates, so
    /// the distinctness invariant holds by construction. Zero weights are
    /// rejected.
    pub fn new(points: Vec<Point>, weights: Vec<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("weighted point set needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: weights.len() });
        }
        let dim = points[0].dim();
        let mut merged: Vec<Point> = Vec::with_capacity(points.len());
        let mut merged_w: Vec<u64> = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(weights) {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            if w == 0 {
                return Err(Error::invalid("weights must be positive"));
            }
            match merged.iter().position(|q| q.0 == p.0) {
                Some(i) => merged_w[i] += w,
                None => {
                    merged.push(p);
                    merged_w.push(w);
                }
            }
        }
        Ok(WeightedPointSet { points: merged, weights: merged_w, dim })
    }

    /// Unit-weight set.
    pub fn unweighted(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        WeightedPointSet::new(points, vec![1; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct stored points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total multiplicity (the "n" of the instance).
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, u64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.max(dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    /// Apply `f` to every stored point, keeping weights. The result is
    /// re-deduplicated because a non-injective map can collide points.
    pub fn map_points(&self, f: impl FnMut(&Point) -> Point) -> Result<WeightedPointSet> {
        let pts = self.points.iter().map(f).collect();
        WeightedPointSet::new(pts, self.weights.clone())
    }

    /// Serialize in the point-set interchange format:
    ///
    /// ```text
    /// # dim=<d>
    /// <weight>,<x1>,...,<xd>
    /// ```
    ///
    /// Floats are written in Rust's shortest round-trip form, which parses
    /// back to bit-identical values.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# dim={}", self.dim);
        for (p, w) in self.iter() {
            let _ = write!(out, "{w}");
            for c in p.coords() {
                let _ = write!(out, ",{c}");
            }
            let _ = writeln!(out);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn from_csv_reader(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or(Error::EmptyInput("point csv has no header line"))??;
        let dim: usize = header
            .trim()
            .strip_prefix("# dim=")
            .ok_or_else(|| Error::Parse(format!("expected '# dim=<d>' header, got {header:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension in header: {e}")))?;
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let w: u64 = fields
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: bad weight: {e}", lineno + 2)))?;
            let coords: Vec<f64> = fields
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: bad coordinate: {e}", lineno + 2)))
                })
                .collect::<Result<_>>()?;
            if coords.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
            }
            points.push(Point::new(coords)?);
            weights.push(w);
        }
        WeightedPointSet::new(points, weights)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::from_csv_reader(f)
    }
}
