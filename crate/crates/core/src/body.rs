//! Convex bodies with exact rational vertex and halfspace data.
//!
//! Hull arithmetic is exact: float inputs are lifted losslessly into
//! rationals (every f64 is a dyadic rational), so boundary questions such as
//! "is this lattice point interior" are decided without tolerance. Full hull
//! construction is provided in dimensions one and two; higher-dimensional
//! bodies are built directly as simplices or boxes, which is all the
//! criteria downstream need.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Lossless f64 -> rational lift. Rejects NaN and infinities.
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidValue(format!("{x} is not a finite number")))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // num's to_f64 on Ratio<BigInt> can overflow intermediate conversions
    // for huge numerators; split into integer and fractional part instead.
    let trunc = r.trunc();
    let frac = r - &trunc;
    let trunc_f = match trunc.numer().to_string().parse::<f64>() {
        Ok(v) => v,
        Err(_) => f64::NAN,
    };
    let fn_ = frac.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let fd = frac.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    trunc_f + fn_ / fd
}

pub fn rat_from_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Closed halfspace `{ x : normal . x <= offset }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Halfspace {
    /// Signed slack `offset - normal . x`; nonnegative inside.
    pub fn slack(&self, point: &[Rat]) -> Rat {
        &self.offset - dot(&self.normal, point)
    }
}

/// A compact convex body given by both its extreme points and a defining
/// set of halfspaces. Both representations are kept consistent.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dimension: usize,
    vertices: Vec<Vec<Rat>>,
    halfspaces: Vec<Halfspace>,
}

impl ConvexBody {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(rat_to_f64).collect())
            .collect()
    }

    /// Convex hull of exact points in dimension 1 or 2.
    pub fn hull(dimension: usize, points: &[Vec<Rat>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("hull of an empty point set".into()));
        }
        if points.iter().any(|p| p.len() != dimension) {
            return Err(Error::InvalidValue("point arity mismatch".into()));
        }
        match dimension {
            1 => Ok(Self::hull_1d(points)),
            2 => Ok(Self::hull_2d(points)),
            d => Err(Error::Precondition(format!(
                "general hull construction is implemented for dimension <= 2, got {d}"
            ))),
        }
    }

    /// Convex hull of float points (lifted exactly).
    pub fn hull_f64(dimension: usize, points: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Rat>> = points
            .iter()
            .map(|p| p.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::hull(dimension, &lifted)
    }

    fn hull_1d(points: &[Vec<Rat>]) -> Self {
        let mut lo = points[0][0].clone();
        let mut hi = points[0][0].clone();
        for p in points {
            if p[0] < lo {
                lo = p[0].clone();
            }
            if p[0] > hi {
                hi = p[0].clone();
            }
        }
        let degenerate = lo == hi;
        let vertices = if degenerate {
            vec![vec![lo.clone()]]
        } else {
            vec![vec![lo.clone()], vec![hi.clone()]]
        };
        let halfspaces = vec![
            Halfspace { normal: vec![-Rat::one()], offset: -lo },
            Halfspace { normal: vec![Rat::one()], offset: hi },
        ];
        ConvexBody { dimension: 1, vertices, halfspaces }
    }

    /// Andrew's monotone chain with exact orientation predicates.
    fn hull_2d(points: &[Vec<Rat>]) -> Self {
        let mut pts: Vec<Vec<Rat>> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() == 1 {
            return Self::point_body(&pts[0]);
        }
        let cross = |o: &Vec<Rat>, a: &Vec<Rat>, b: &Vec<Rat>| -> Rat {
            (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
        };
        let mut lower: Vec<Vec<Rat>> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rat::zero()
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec<Rat>> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rat::zero()
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        let mut hull = lower;
        hull.extend(upper);
        if hull.len() < 2 {
            // all points collinear; monotone chain collapsed
            let mut seg = vec![pts[0].clone(), pts[pts.len() - 1].clone()];
            seg.dedup();
            return Self::segment_body_2d(&seg[0], &seg[1]);
        }
        if hull.len() == 2 {
            return Self::segment_body_2d(&hull[0], &hull[1]);
        }
        // counter-clockwise vertex cycle -> outward edge normals
        let mut halfspaces = Vec::with_capacity(hull.len());
        for i in 0..hull.len() {
            let a = &hull[i];
            let b = &hull[(i + 1) % hull.len()];
            let normal = vec![&b[1] - &a[1], &a[0] - &b[0]];
            let offset = dot(&normal, a);
            halfspaces.push(Halfspace { normal, offset });
        }
        ConvexBody { dimension: 2, vertices: hull, halfspaces }
    }

    fn point_body(p: &[Rat]) -> Self {
        let dim = p.len();
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            let mut plus = vec![Rat::zero(); dim];
            plus[j] = Rat::one();
            halfspaces.push(Halfspace { normal: plus.clone(), offset: p[j].clone() });
            let mut minus = vec![Rat::zero(); dim];
            minus[j] = -Rat::one();
            halfspaces.push(Halfspace { normal: minus, offset: -&p[j] });
        }
        ConvexBody { dimension: dim, vertices: vec![p.to_vec()], halfspaces }
    }

    fn segment_body_2d(a: &[Rat], b: &[Rat]) -> Self {
        let dir = vec![&b[0] - &a[0], &b[1] - &a[1]];
        let normal = vec![dir[1].clone(), -dir[0].clone()];
        let level = dot(&normal, a);
        let halfspaces = vec![
            Halfspace { normal: normal.clone(), offset: level.clone() },
            Halfspace {
                normal: normal.iter().map(|x| -x).collect(),
                offset: -level,
            },
            Halfspace { normal: dir.clone(), offset: dot(&dir, b) },
            Halfspace {
                normal: dir.iter().map(|x| -x).collect(),
                offset: dot(&dir.iter().map(|x| -x).collect::<Vec<_>>(), a),
            },
        ];
        ConvexBody {
            dimension: 2,
            vertices: vec![a.to_vec(), b.to_vec()],
            halfspaces,
        }
    }

    /// Simplex `{ x >= 0, sum x_j / side_j <= 1 }` with the given positive
    /// intercepts; works in any dimension.
    pub fn coordinate_simplex(sides: &[Rat]) -> Result<Self> {
        let n = sides.len();
        if n == 0 || sides.iter().any(|s| !s.is_positive()) {
            return Err(Error::Precondition("simplex needs positive intercepts".into()));
        }
        let mut vertices = vec![vec![Rat::zero(); n]];
        for (j, s) in sides.iter().enumerate() {
            let mut v = vec![Rat::zero(); n];
            v[j] = s.clone();
            vertices.push(v);
        }
        let mut halfspaces: Vec<Halfspace> = (0..n)
            .map(|j| {
                let mut normal = vec![Rat::zero(); n];
                normal[j] = -Rat::one();
                Halfspace { normal, offset: Rat::zero() }
            })
            .collect();
        halfspaces.push(Halfspace {
            normal: sides.iter().map(|s| s.recip()).collect(),
            offset: Rat::one(),
        });
        Ok(ConvexBody { dimension: n, vertices, halfspaces })
    }

    /// Axis-aligned box `prod [lo_j, hi_j]`.
    pub fn axis_box(lo: &[Rat], hi: &[Rat]) -> Result<Self> {
        let n = lo.len();
        if n == 0 || hi.len() != n || lo.iter().zip(hi).any(|(a, b)| a >= b) {
            return Err(Error::Precondition("box needs lo < hi per axis".into()));
        }
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let v: Vec<Rat> = (0..n)
                .map(|j| if mask >> j & 1 == 1 { hi[j].clone() } else { lo[j].clone() })
                .collect();
            vertices.push(v);
        }
        let mut halfspaces = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut plus = vec![Rat::zero(); n];
            plus[j] = Rat::one();
            halfspaces.push(Halfspace { normal: plus, offset: hi[j].clone() });
            let mut minus = vec![Rat::zero(); n];
            minus[j] = -Rat::one();
            halfspaces.push(Halfspace { normal: minus, offset: -&lo[j] });
        }
        Ok(ConvexBody { dimension: n, vertices, halfspaces })
    }

    /// Applies an integer unimodular map `x -> M x` to vertices and
    /// halfspaces (normals transform by the inverse transpose).
    pub fn unimodular_image(&self, m: &[Vec<i64>]) -> Result<Self> {
        let n = self.dimension;
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidValue("matrix shape mismatch".into()));
        }
        let mr: Vec<Vec<Rat>> = m
            .iter()
            .map(|row| row.iter().map(|&x| rat_from_int(x)).collect())
            .collect();
        let minv = invert_rat_matrix(&mr)
            .ok_or_else(|| Error::Precondition("matrix is singular".into()))?;
        let vertices: Vec<Vec<Rat>> = self
            .vertices
            .iter()
            .map(|v| (0..n).map(|i| dot(&mr[i], v)).collect())
            .collect();
        // normal' = M^{-T} normal, offsets unchanged
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| Halfspace {
                normal: (0..n)
                    .map(|i| (0..n).map(|k| &minv[k][i] * &h.normal[k]).sum())
                    .collect(),
                offset: h.offset.clone(),
            })
            .collect();
        Ok(ConvexBody { dimension: n, vertices, halfspaces })
    }

    pub fn is_full_dimensional(&self) -> bool {
        match self.dimension {
            1 => self.vertices.len() >= 2,
            2 => self.vertices.len() >= 3,
            _ => self.vertices.len() > self.dimension,
        }
    }

    /// Exact Lebesgue volume (length / area / simplex-box volume).
    pub fn volume(&self) -> Result<Rat> {
        if !self.is_full_dimensional() {
            return Err(Error::Precondition("volume of a degenerate body".into()));
        }
        match self.dimension {
            1 => Ok(&self.vertices[1][0] - &self.vertices[0][0]),
            2 => {
                // shoelace over the counter-clockwise cycle
                let mut twice = Rat::zero();
                let k = self.vertices.len();
                for i in 0..k {
                    let a = &self.vertices[i];
                    let b = &self.vertices[(i + 1) % k];
                    twice += &a[0] * &b[1] - &a[1] * &b[0];
                }
                Ok(twice / rat_from_int(2))
            }
            n => {
                if self.vertices.len() == n + 1 {
                    // simplex: |det(v_i - v_0)| / n!
                    let rows: Vec<Vec<Rat>> = (1..=n)
                        .map(|i| {
                            (0..n)
                                .map(|j| &self.vertices[i][j] - &self.vertices[0][j])
                                .collect()
                        })
                        .collect();
                    let det = rat_det(&rows);
                    let mut fact = Rat::one();
                    for k in 2..=n {
                        fact *= rat_from_int(k as i64);
                    }
                    Ok(det.abs() / fact)
                } else if self.vertices.len() == 1 << n {
                    let mut lo = self.vertices[0].clone();
                    let mut hi = self.vertices[0].clone();
                    for v in &self.vertices {
                        for j in 0..n {
                            if v[j] < lo[j] {
                                lo[j] = v[j].clone();
                            }
                            if v[j] > hi[j] {
                                hi[j] = v[j].clone();
                            }
                        }
                    }
                    Ok((0..n).map(|j| &hi[j] - &lo[j]).product())
                } else {
                    Err(Error::Precondition(format!(
                        "exact volume in dimension {n} is implemented for simplices and boxes"
                    )))
                }
            }
        }
    }

    /// Exact membership (closed body).
    pub fn contains(&self, point: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack(point).is_negative())
    }

    /// True iff the closed ball of radius `margin` around `point` satisfies
    /// every halfspace strictly. Decided exactly: per halfspace it checks
    /// `slack > 0` and `slack^2 > margin^2 |normal|^2`.
    pub fn contains_with_margin(&self, point: &[Rat], margin: &Rat) -> bool {
        if margin.is_negative() {
            return false;
        }
        let m2 = margin * margin;
        self.halfspaces.iter().all(|h| {
            let slack = h.slack(point);
            if !slack.is_positive() {
                return false;
            }
            let n2 = dot(&h.normal, &h.normal);
            &slack * &slack > &m2 * n2
        })
    }

    /// Diameter estimate (max pairwise vertex distance), in floats.
    pub fn diameter_f64(&self) -> f64 {
        let vs = self.vertices_f64();
        let mut best = 0.0_f64;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let d2: f64 = vs[i]
                    .iter()
                    .zip(&vs[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    /// Cross-checks the two representations: every vertex satisfies every
    /// halfspace, and every vertex is tight on enough halfspaces to be
    /// extreme.
    pub fn validate(&self) -> Result<()> {
        for v in &self.vertices {
            let mut tight = 0usize;
            for h in &self.halfspaces {
                let slack = h.slack(v);
                if slack.is_negative() {
                    return Err(Error::InvalidValue(
                        "vertex violates a halfspace".into(),
                    ));
                }
                if slack.is_zero() {
                    tight += 1;
                }
            }
            let needed = if self.vertices.len() == 1 { 1 } else { self.dimension.min(2) };
            if tight < needed {
                return Err(Error::InvalidValue(
                    "vertex is not extreme for the halfspace system".into(),
                ));
            }
        }
        Ok(())
    }

    /// Hausdorff-style one-sided check: every vertex of `self` lies in
    /// `other` fattened by `collar` (float metric).
    pub fn within_collar_of(&self, other: &ConvexBody, collar: f64) -> bool {
        let collar = match rat_from_f64(collar) {
            Ok(c) => c,
            Err(_) => return false,
        };
        self.vertices.iter().all(|v| {
            other.halfspaces.iter().all(|h| {
                let slack = h.slack(v);
                if !slack.is_negative() {
                    return true;
                }
                // allow violation up to collar * |normal|
                let n2 = dot(&h.normal, &h.normal);
                &slack * &slack <= &collar * &collar * n2
            })
        })
    }
}

/// JSON form: floats only, matching `{vertices:[[..]], halfspaces:[{normal, offset}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexBodyJson {
    pub vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<HalfspaceJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl From<&ConvexBody> for ConvexBodyJson {
    fn from(b: &ConvexBody) -> Self {
        ConvexBodyJson {
            vertices: b.vertices_f64(),
            halfspaces: b
                .halfspaces
                .iter()
                .map(|h| HalfspaceJson {
                    normal: h.normal.iter().map(rat_to_f64).collect(),
                    offset: rat_to_f64(&h.offset),
                })
                .collect(),
        }
    }
}

impl ConvexBodyJson {
    pub fn lift(&self) -> Result<ConvexBody> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidValue("body without vertices".into()));
        }
        let dim = self.vertices[0].len();
        let vertices: Vec<Vec<Rat>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                Ok(Halfspace {
                    normal: h.normal.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>()?,
                    offset: rat_from_f64(h.offset)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConvexBody { dimension: dim, vertices, halfspaces })
    }
}

fn rat_det(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else {
            return Rat::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

fn invert_rat_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(pivot, col);
        let inv = aug[col][col].recip();
        for c in 0..2 * n {
            aug[col][c] = &aug[col][c] * &inv;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let factor = aug[r][col].clone();
            for c in 0..2 * n {
                let sub = &factor * &aug[col][c];
                aug[r][c] -= sub;
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}
