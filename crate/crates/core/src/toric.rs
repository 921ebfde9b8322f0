//! Toric models on lattice polytopes: support-function weights and their
//! conjugates, monomial section bases, normalized-section checks, toric
//! integrals with certified tails, the Bergman fixed-point identity at the
//! torus-invariant point, and radial Gram families on the projective line.
//!
//! The dictionary: a weight `phi(z) = phi_P(log|z_1^2|, ..., log|z_n^2|)`
//! with `phi_P` convex increasing, sections of the `k`-th power spanned by
//! monomials `z^u` over lattice points `u` of `k P`, and
//! `f^u = e^{-(k/2) phi_P^*(u/k)} z^u` normalized to unit weighted sup.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::body::{rat_from_int, rat_to_f64, ConvexBody, ConvexBodyJson, Rat};
use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, Finite, PosInf};
use crate::filtration::{CMat, GramEval, GramFamily, C64};
use crate::grid::{Grid1D, GridFunctionND};
use crate::quadrature::{adaptive_simpson, integrate_line_exp_tails, maximize_concave_box};
use crate::rwn::{PointSet, SamplePoint, TestCurve};
use crate::transforms::{gradient_image_body, legendre_conjugate};
use crate::valuations::Exponent;

/// Volume-form convention used by every integral in this module: per
/// complex axis, `i dz ^ dzbar = 2 dA`, so a full torus integral carries a
/// factor `(2 pi)^n` after the substitution `y_j = log r_j^2`.
pub const VOLUME_CONVENTION: &str = "i dz^dzbar = 2 dA per axis";

/// Full-dimensional polytope with integer vertices.
#[derive(Debug, Clone)]
pub struct LatticePolytope {
    body: ConvexBody,
    /// Smoothness of the fan at each vertex, asserted by the caller.
    pub delzant: bool,
}

impl LatticePolytope {
    pub fn from_vertices(vertices: &[Vec<i64>], delzant: bool) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Precondition("polytope needs vertices".into()));
        }
        let dim = vertices[0].len();
        let pts: Vec<Vec<Rat>> = vertices
            .iter()
            .map(|v| v.iter().map(|&x| rat_from_int(x)).collect())
            .collect();
        let body = ConvexBody::hull(dim, &pts)?;
        if !body.is_full_dimensional() {
            return Err(Error::Precondition("polytope must be full-dimensional".into()));
        }
        Ok(LatticePolytope { body, delzant })
    }

    /// `d` times the standard simplex in `n` variables.
    pub fn dilated_simplex(n: usize, d: i64) -> Result<Self> {
        let mut vs = vec![vec![0i64; n]];
        for j in 0..n {
            let mut v = vec![0i64; n];
            v[j] = d;
            vs.push(v);
        }
        LatticePolytope::from_vertices(&vs, true)
    }

    /// Product of segments `[0, d_j]`.
    pub fn product_box(degrees: &[i64]) -> Result<Self> {
        let n = degrees.len();
        let mut vs = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            vs.push(
                (0..n)
                    .map(|j| if mask >> j & 1 == 1 { degrees[j] } else { 0 })
                    .collect(),
            );
        }
        LatticePolytope::from_vertices(&vs, true)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn dimension(&self) -> usize {
        self.body.dimension()
    }

    /// All lattice points of `k P`, by exact membership of `a/k` in `P`.
    pub fn lattice_points(&self, k: u32) -> Vec<Exponent> {
        let n = self.dimension();
        let vs = self.body.vertices_f64();
        let hi: Vec<i64> = (0..n)
            .map(|j| {
                vs.iter()
                    .map(|v| v[j])
                    .fold(f64::NEG_INFINITY, f64::max)
                    .round() as i64
                    * k as i64
            })
            .collect();
        let lo: Vec<i64> = (0..n)
            .map(|j| {
                vs.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min).round() as i64 * k as i64
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = lo.clone();
        'scan: loop {
            let rescaled: Vec<Rat> = idx
                .iter()
                .map(|&i| rat_from_int(i) / rat_from_int(k as i64))
                .collect();
            if self.body.contains(&rescaled) && idx.iter().all(|&i| i >= 0) {
                out.push(Exponent(idx.iter().map(|&i| i as u32).collect()));
            }
            for j in (0..n).rev() {
                idx[j] += 1;
                if idx[j] <= hi[j] {
                    continue 'scan;
                }
                idx[j] = lo[j];
                if j == 0 {
                    break 'scan;
                }
            }
            if n == 0 {
                break;
            }
        }
        out
    }

    /// Distance from a point to the boundary (smallest halfspace slack per
    /// unit normal), negative outside.
    pub fn interior_margin(&self, point: &[f64]) -> f64 {
        let vs: Vec<Rat> = point
            .iter()
            .map(|&x| crate::body::rat_from_f64(x).expect("finite point"))
            .collect();
        let mut best = f64::INFINITY;
        for h in self.body.halfspaces() {
            let slack = rat_to_f64(&h.slack(&vs));
            let norm: f64 = h
                .normal
                .iter()
                .map(|c| {
                    let x = rat_to_f64(c);
                    x * x
                })
                .sum::<f64>()
                .sqrt();
            best = best.min(slack / norm);
        }
        best
    }
}

/// Closed-form weight families with exact conjugates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormWeight {
    /// `d log(1 + e^{y_1} + ... + e^{y_n})` on the dilated simplex `d D_n`.
    FubiniStudy { d: u32 },
    /// `sum_j d_j log(1 + e^{y_j})` on the box `prod [0, d_j]`.
    ProductFubiniStudy { degrees: Vec<u32> },
}

impl ClosedFormWeight {
    fn phi(&self, y: &[f64]) -> f64 {
        match self {
            ClosedFormWeight::FubiniStudy { d } => {
                *d as f64 * log1p_exp_sum(y)
            }
            ClosedFormWeight::ProductFubiniStudy { degrees } => degrees
                .iter()
                .zip(y)
                .map(|(&d, &yj)| d as f64 * softplus(yj))
                .sum(),
        }
    }

    /// Exact conjugate; `+inf` outside the polytope.
    fn phi_star(&self, a: &[f64]) -> ExtReal {
        let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
        match self {
            ClosedFormWeight::FubiniStudy { d } => {
                let d = *d as f64;
                let total: f64 = a.iter().sum();
                if a.iter().any(|&x| x < 0.0) || total > d {
                    return PosInf;
                }
                Finite(a.iter().map(|&x| xlogx(x)).sum::<f64>() + xlogx(d - total) - xlogx(d))
            }
            ClosedFormWeight::ProductFubiniStudy { degrees } => {
                let mut acc = 0.0;
                for (&dj, &aj) in degrees.iter().zip(a) {
                    let dj = dj as f64;
                    if !(0.0..=dj).contains(&aj) {
                        return PosInf;
                    }
                    acc += xlogx(aj) + xlogx(dj - aj) - xlogx(dj);
                }
                Finite(acc)
            }
        }
    }
}

/// `log(1 + sum_j e^{y_j})`, overflow-safe.
fn log1p_exp_sum(y: &[f64]) -> f64 {
    let m = y.iter().cloned().fold(0.0_f64, f64::max);
    let sum: f64 = y.iter().map(|&v| (v - m).exp()).sum::<f64>() + (-m).exp();
    m + sum.ln()
}

fn softplus(y: f64) -> f64 {
    if y > 30.0 {
        y + (-y).exp().ln_1p()
    } else {
        (1.0 + y.exp()).ln()
    }
}

/// A toric weight on a lattice polytope, with its support function on the
/// log-coordinates side and the cached conjugate.
#[derive(Debug, Clone)]
pub struct ToricModel {
    pub polytope: LatticePolytope,
    pub exact: Option<ClosedFormWeight>,
    pub phi_grid: GridFunctionND,
    pub phi_star_grid: GridFunctionND,
}

pub const DEFAULT_Y_RANGE: f64 = 40.0;
pub const DEFAULT_Y_NODES_1D: usize = 2001;
const DEFAULT_Y_NODES_2D: usize = 241;

impl ToricModel {
    /// Projective-line model of degree `d >= 1`.
    pub fn p1_fubini_study(d: u32) -> Result<Self> {
        Self::fubini_study(1, d)
    }

    /// Projective-space model: weight `d log(1 + sum e^{y_j})`.
    pub fn fubini_study(n: usize, d: u32) -> Result<Self> {
        if d == 0 || n == 0 || n > 2 {
            return Err(Error::Precondition(
                "closed-form simplex models cover degrees >= 1 in one or two variables".into(),
            ));
        }
        let polytope = LatticePolytope::dilated_simplex(n, d as i64)?;
        let exact = ClosedFormWeight::FubiniStudy { d };
        Self::with_closed_form(polytope, exact)
    }

    /// Product model `sum_j d_j log(1 + e^{y_j})`.
    pub fn product_fubini_study(degrees: &[u32]) -> Result<Self> {
        if degrees.is_empty() || degrees.len() > 2 || degrees.iter().any(|&d| d == 0) {
            return Err(Error::Precondition(
                "product models cover one or two positive degrees".into(),
            ));
        }
        let polytope =
            LatticePolytope::product_box(&degrees.iter().map(|&d| d as i64).collect::<Vec<_>>())?;
        let exact = ClosedFormWeight::ProductFubiniStudy { degrees: degrees.to_vec() };
        Self::with_closed_form(polytope, exact)
    }

    fn with_closed_form(polytope: LatticePolytope, exact: ClosedFormWeight) -> Result<Self> {
        let n = polytope.dimension();
        let nodes = if n == 1 { DEFAULT_Y_NODES_1D } else { DEFAULT_Y_NODES_2D };
        let axis = Grid1D::new(-DEFAULT_Y_RANGE, DEFAULT_Y_RANGE, nodes)?;
        let phi_grid = GridFunctionND::tabulate(vec![axis; n], |y| Finite(exact.phi(y)))?;
        // conjugate tabulated over the polytope's bounding box
        let vs = polytope.body().vertices_f64();
        let star_axes: Vec<Grid1D> = (0..n)
            .map(|j| {
                let hi = vs.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max);
                Grid1D::new(0.0, hi.max(1.0), 101)
            })
            .collect::<Result<_>>()?;
        let phi_star_grid = GridFunctionND::tabulate(star_axes, |a| exact.phi_star(a))?;
        Ok(ToricModel { polytope, exact: Some(exact), phi_grid, phi_star_grid })
    }

    /// Model backed only by a tabulated support function (no closed form);
    /// the conjugate is cached by a discrete transform.
    pub fn from_grid(polytope: LatticePolytope, phi_grid: GridFunctionND) -> Result<Self> {
        if phi_grid.dim() != polytope.dimension() {
            return Err(Error::Precondition("grid dimension must match the polytope".into()));
        }
        let vs = polytope.body().vertices_f64();
        let star_axes: Vec<Grid1D> = (0..phi_grid.dim())
            .map(|j| {
                let hi = vs.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max);
                Grid1D::new(0.0, hi.max(1.0), 101)
            })
            .collect::<Result<_>>()?;
        let phi_star_grid = legendre_conjugate(&phi_grid, &star_axes)?.values;
        Ok(ToricModel { polytope, exact: None, phi_grid, phi_star_grid })
    }

    pub fn dimension(&self) -> usize {
        self.polytope.dimension()
    }

    /// Support-function value, closed form when available, multilinear
    /// interpolation of the grid otherwise.
    pub fn phi(&self, y: &[f64]) -> f64 {
        match &self.exact {
            Some(cf) => cf.phi(y),
            None => interpolate(&self.phi_grid, y),
        }
    }

    pub fn phi_star(&self, a: &[f64]) -> ExtReal {
        match &self.exact {
            Some(cf) => cf.phi_star(a),
            None => {
                let idx: Vec<usize> =
                    a.iter().zip(&self.phi_star_grid.axes).map(|(&x, g)| g.nearest(x)).collect();
                self.phi_star_grid.value(&idx)
            }
        }
    }
}

fn interpolate(f: &GridFunctionND, y: &[f64]) -> f64 {
    // multilinear, clamped to the grid box
    let n = f.dim();
    let mut base = Vec::with_capacity(n);
    let mut frac = Vec::with_capacity(n);
    for (g, &x) in f.axes.iter().zip(y) {
        let h = g.step();
        let pos = ((x - g.lo) / h).clamp(0.0, (g.count - 1) as f64);
        let i = (pos.floor() as usize).min(g.count - 2);
        base.push(i);
        frac.push(pos - i as f64);
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut idx = Vec::with_capacity(n);
        for j in 0..n {
            if corner >> j & 1 == 1 {
                w *= frac[j];
                idx.push(base[j] + 1);
            } else {
                w *= 1.0 - frac[j];
                idx.push(base[j]);
            }
        }
        acc += w * f.value(&idx).to_f64();
    }
    acc
}

/// Monomial exponents spanning the sections of the `k`-th power.
pub fn sections_basis(model: &ToricModel, k: u32) -> Result<Vec<Exponent>> {
    if k == 0 {
        return Err(Error::Precondition("tensor power must be at least 1".into()));
    }
    Ok(model.polytope.lattice_points(k))
}

/// Outcome of the unit-sup normalization check for one section.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SectionCheck {
    /// `|sup exp(u.y - k phi(y) - k phi*(u/k)) - 1|`.
    pub defect: f64,
    /// The supremum was attained at the edge of the search box (vertex
    /// exponents push the maximizer to infinity).
    pub boundary_supremum: bool,
}

/// Verifies `sup_y exp(u.y - k phi(y)) = exp(k phi*(u/k))`, i.e. that the
/// conjugate normalizes the section to unit weighted sup.
pub fn normalized_section_check(model: &ToricModel, u: &Exponent, k: u32) -> Result<SectionCheck> {
    let n = model.dimension();
    if u.arity() != n || k == 0 {
        return Err(Error::Precondition("exponent arity or power mismatch".into()));
    }
    let a: Vec<f64> = u.0.iter().map(|&e| e as f64 / k as f64).collect();
    let star = match model.phi_star(&a) {
        Finite(v) => v,
        _ => {
            return Err(Error::Precondition(
                "exponent outside k P: conjugate is infinite".into(),
            ))
        }
    };
    let objective = |y: &[f64]| {
        let dot: f64 = y.iter().zip(&u.0).map(|(&yj, &uj)| yj * uj as f64).sum();
        dot - k as f64 * model.phi(y)
    };
    // seed at the entropy-stationary point when interior, else at zero
    let start = vec![0.0; n];
    let lo = vec![-DEFAULT_Y_RANGE; n];
    let hi = vec![DEFAULT_Y_RANGE; n];
    let (arg, m) = maximize_concave_box(&objective, &lo, &hi, &start, 10, 1e-8);
    // boundary supremum: some box edge attains the maximum to float
    // resolution (vertex exponents push the true maximizer to infinity)
    let mut boundary = false;
    for j in 0..n {
        for edge in [-DEFAULT_Y_RANGE, DEFAULT_Y_RANGE] {
            let mut p = arg.clone();
            p[j] = edge;
            if objective(&p) >= m - 1e-12 * (1.0 + m.abs()) {
                boundary = true;
            }
        }
    }
    let defect = ((m - k as f64 * star).exp() - 1.0).abs();
    Ok(SectionCheck { defect, boundary_supremum: boundary })
}

/// The growth condition of the model at the invariant point together with
/// the certified section lower bound.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// The support function itself (the fixed-point identity of the toric
    /// degeneration: the limit weight is the weight).
    pub phi: GridFunctionND,
    /// Largest violation of `(u/k).y - phi*(u/k) <= phi(y)` over sampled
    /// sections and grid nodes; nonpositive up to rounding.
    pub max_violation: f64,
    pub sections_checked: usize,
}

pub fn growth_condition(model: &ToricModel) -> Result<GrowthReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for k in 1..=2u32 {
        for u in sections_basis(model, k)? {
            let a: Vec<f64> = u.0.iter().map(|&e| e as f64 / k as f64).collect();
            let Finite(star) = model.phi_star(&a) else {
                continue;
            };
            for (_, y, phi) in model.phi_grid.iter_nodes() {
                let dot: f64 = y.iter().zip(&a).map(|(&yj, &aj)| yj * aj).sum();
                let bound = dot - star;
                worst = worst.max(bound - phi.to_f64());
            }
            count += 1;
        }
    }
    Ok(GrowthReport { phi: model.phi_grid.clone(), max_violation: worst, sections_checked: count })
}

/// A toric integral with a certified truncation bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToricIntegralReport {
    pub value: f64,
    pub truncation_bound: f64,
    pub grid: String,
    pub volume_convention: &'static str,
}

impl ToricIntegralReport {
    fn checked(value: f64, truncation_bound: f64, grid: String) -> Result<Self> {
        if !(truncation_bound < 1e-3 * value) {
            return Err(Error::QuadratureFailure(format!(
                "truncation bound {truncation_bound:.3e} not small against value {value:.6e}"
            )));
        }
        Ok(ToricIntegralReport {
            value,
            truncation_bound,
            grid,
            volume_convention: VOLUME_CONVENTION,
        })
    }
}

/// `(2 pi)^n` times the integral of `e^{-u(y) + shift . y}` for a grid
/// function, by composite Simpson over the grid nodes. Divergence is
/// detected first: the shift must be interior to the gradient image.
pub fn toric_integral_grid(u_fun: &GridFunctionND, shift: &[f64]) -> Result<ToricIntegralReport> {
    let n = u_fun.dim();
    if shift.len() != n {
        return Err(Error::Precondition("shift arity mismatch".into()));
    }
    let hull = gradient_image_body(u_fun)?;
    let p: Vec<Rat> = shift
        .iter()
        .map(|&x| crate::body::rat_from_f64(x))
        .collect::<Result<_>>()?;
    let margin_probe = crate::body::rat_from_f64(1e-9)?;
    if !hull.contains_with_margin(&p, &margin_probe) {
        return Err(Error::Divergent(format!(
            "shift {shift:?} is not interior to the gradient image of the weight"
        )));
    }
    let integrand = |idx: &[usize], y: &[f64]| -> f64 {
        let dot: f64 = y.iter().zip(shift).map(|(a, b)| a * b).sum();
        (-u_fun.value(idx).to_f64() + dot).exp()
    };
    let mut value;
    let mut edge;
    match n {
        1 => {
            let g = u_fun.axes[0];
            let vals: Vec<f64> = (0..g.count).map(|i| integrand(&[i], &[g.node(i)])).collect();
            value = 2.0 * std::f64::consts::PI * composite_simpson(&vals, g.step());
            edge = vals[0].max(*vals.last().unwrap());
        }
        2 => {
            let (gx, gy) = (u_fun.axes[0], u_fun.axes[1]);
            let mut rows = Vec::with_capacity(gx.count);
            edge = 0.0;
            for i in 0..gx.count {
                let vals: Vec<f64> = (0..gy.count)
                    .map(|j| integrand(&[i, j], &[gx.node(i), gy.node(j)]))
                    .collect();
                edge = edge.max(vals[0]).max(*vals.last().unwrap());
                rows.push(composite_simpson(&vals, gy.step()));
            }
            edge = edge.max(rows[0]).max(*rows.last().unwrap());
            value = (2.0 * std::f64::consts::PI).powi(2) * composite_simpson(&rows, gx.step());
        }
        d => {
            return Err(Error::Precondition(format!(
                "grid toric integrals are implemented in dimension 1 and 2, got {d}"
            )))
        }
    }
    // interior margin certifies an exponential tail beyond the grid edge
    let margin = hull_margin(&hull, shift);
    let bound = edge / margin.max(1e-9) * 4.0;
    if value <= 0.0 {
        value = f64::MIN_POSITIVE;
    }
    ToricIntegralReport::checked(
        value,
        bound,
        format!("{:?} nodes", u_fun.shape()),
    )
}

fn hull_margin(hull: &ConvexBody, point: &[f64]) -> f64 {
    let p: Vec<Rat> = point
        .iter()
        .map(|&x| crate::body::rat_from_f64(x).expect("finite"))
        .collect();
    let mut best = f64::INFINITY;
    for h in hull.halfspaces() {
        let slack = rat_to_f64(&h.slack(&p));
        let norm: f64 = h
            .normal
            .iter()
            .map(|c| {
                let x = rat_to_f64(c);
                x * x
            })
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            best = best.min(slack / norm);
        }
    }
    best
}

fn composite_simpson(vals: &[f64], h: f64) -> f64 {
    // even interval count via trapezoid patch on the last cell when odd
    let n = vals.len();
    if n < 2 {
        return 0.0;
    }
    let mut end = n - 1;
    let mut patch = 0.0;
    if end % 2 == 1 {
        patch = 0.5 * h * (vals[end - 1] + vals[end]);
        end -= 1;
    }
    let mut acc = vals[0] + vals[end];
    for (i, v) in vals.iter().enumerate().take(end).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0 + patch
}

/// Same integral for a closed-form model, with adaptive quadrature and
/// tails certified by the exact polytope margin.
pub fn toric_integral_model(model: &ToricModel, shift: &[f64]) -> Result<ToricIntegralReport> {
    let n = model.dimension();
    if shift.len() != n {
        return Err(Error::Precondition("shift arity mismatch".into()));
    }
    let margin = model.polytope.interior_margin(shift);
    if margin <= 0.0 {
        return Err(Error::Divergent(format!(
            "shift {shift:?} is not interior to the polytope (margin {margin:.3e})"
        )));
    }
    match n {
        1 => {
            let f = |y: f64| (-model.phi(&[y]) + shift[0] * y).exp();
            let q = integrate_line_exp_tails(&f, -30.0, 30.0, margin, 1e-10)?;
            ToricIntegralReport::checked(
                2.0 * std::f64::consts::PI * q.value,
                2.0 * std::f64::consts::PI * q.truncation_bound,
                "adaptive".into(),
            )
        }
        2 => {
            // the inner tolerance sits far below the outer one: refinement
            // jitter of the inner quadrature must stay invisible outside
            let inner_failure = std::cell::RefCell::new(None);
            let inner = |y1: f64| -> f64 {
                let f = |y2: f64| (-model.phi(&[y1, y2]) + shift[0] * y1 + shift[1] * y2).exp();
                match integrate_line_exp_tails(&f, -30.0, 30.0, margin, 1e-11) {
                    Ok(q) => q.value,
                    Err(e) => {
                        inner_failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            };
            let q = integrate_line_exp_tails(&inner, -30.0, 30.0, margin, 1e-7)?;
            if let Some(e) = inner_failure.into_inner() {
                return Err(e);
            }
            ToricIntegralReport::checked(
                (2.0 * std::f64::consts::PI).powi(2) * q.value,
                (2.0 * std::f64::consts::PI).powi(2) * q.truncation_bound,
                "adaptive iterated".into(),
            )
        }
        d => Err(Error::Precondition(format!(
            "model toric integrals are implemented in dimension 1 and 2, got {d}"
        ))),
    }
}

/// The fixed-point identity: the kernel value at the invariant point times
/// the weight integral equals one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BergmanReport {
    pub kernel_at_origin: f64,
    pub weight_integral: f64,
    /// `kernel_at_origin * weight_integral`; one exactly in theory.
    pub product: f64,
    pub gap: f64,
    pub volume_convention: &'static str,
}

/// Computes the kernel at the invariant point over the monomial basis
/// (monomials are orthogonal by rotation invariance, so only the constant
/// contributes) via a radial quadrature, and the weight integral via the
/// independent log-coordinates route; reports their product against one.
pub fn bergman_fixed_point_check(model: &ToricModel) -> Result<BergmanReport> {
    let norm_sq_const = match &model.exact {
        Some(ClosedFormWeight::FubiniStudy { d }) if model.dimension() == 1 => {
            radial_monomial_norm_sq(*d, 0, &RadialTestCurve::Zero, 0.0)?
        }
        Some(ClosedFormWeight::ProductFubiniStudy { degrees }) => {
            let mut acc = 1.0;
            for &d in degrees {
                acc *= radial_monomial_norm_sq(d, 0, &RadialTestCurve::Zero, 0.0)?;
            }
            acc
        }
        _ => {
            return Err(Error::Precondition(
                "fixed-point check needs a closed-form line or product model".into(),
            ))
        }
    };
    let kernel_at_origin = 1.0 / norm_sq_const;
    let shift = vec![1.0; model.dimension()];
    let weight_integral = toric_integral_model(model, &shift)?.value;
    let product = kernel_at_origin * weight_integral;
    Ok(BergmanReport {
        kernel_at_origin,
        weight_integral,
        product,
        gap: product - 1.0,
        volume_convention: VOLUME_CONVENTION,
    })
}

/// Rotation-invariant curves on the line model, in the radial coordinate
/// `w = r^2/(1+r^2)` where the invariant weight function is `G = log w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialTestCurve {
    Zero,
    /// `v_a = a G` for `0 < a <= lambda`, `-inf` beyond.
    LinearGreen { lambda: f64 },
}

impl RadialTestCurve {
    /// The transform `sup_a { v_a + a t }` evaluated radially.
    pub fn hat(&self, log_w: f64, t: f64) -> f64 {
        match self {
            RadialTestCurve::Zero => 0.0,
            RadialTestCurve::LinearGreen { lambda } => lambda * (log_w + t).max(0.0),
        }
    }

    /// Tabulates the curve itself over sample radii (for interop with the
    /// curve/ray transforms).
    pub fn as_test_curve(&self, ws: &[f64], alpha_grid: Grid1D) -> Result<TestCurve> {
        let points = PointSet::new(
            ws.iter()
                .enumerate()
                .map(|(i, &w)| SamplePoint {
                    id: format!("w{i}"),
                    coords: Some(vec![w]),
                    weight: 0.0,
                })
                .collect(),
        )?;
        let values = ws
            .iter()
            .map(|&w| {
                alpha_grid
                    .nodes()
                    .map(|a| match self {
                        RadialTestCurve::Zero => {
                            if a <= 0.0 {
                                Finite(0.0)
                            } else {
                                ExtReal::NegInf
                            }
                        }
                        RadialTestCurve::LinearGreen { lambda } => {
                            if a <= 0.0 {
                                Finite(0.0)
                            } else if a <= *lambda + 1e-12 {
                                Finite(a * w.ln())
                            } else {
                                ExtReal::NegInf
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        TestCurve::new(points, alpha_grid, values)
    }
}

/// `2 pi Int_0^1 w^j (1-w)^{d-2-j} e^{-hat v_t(log w)} dw`: the squared
/// `t`-norm of the monomial section `z^j dz` on the degree-`d` line model.
fn radial_monomial_norm_sq(d: u32, j: u32, curve: &RadialTestCurve, t: f64) -> Result<f64> {
    if j + 2 > d {
        return Err(Error::Divergent(format!(
            "monomial exponent {j} has infinite norm at degree {d}"
        )));
    }
    let p = j as f64;
    let q = (d - 2 - j) as f64;
    let f = |w: f64| -> f64 {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        let log_w = w.ln();
        (p * log_w + q * (1.0 - w).ln() - curve.hat(log_w, t)).exp()
    };
    let split = match curve {
        RadialTestCurve::Zero => 0.0,
        RadialTestCurve::LinearGreen { .. } => (-t).exp().min(1.0),
    };
    let mut total = 0.0;
    if split > 0.0 {
        total += adaptive_simpson(&f, 0.0, split, 1e-13 * split.max(1e-300))?.value;
    }
    // dyadic segments resolve the kink and the spike just above it
    let mut lo = split.max(f64::MIN_POSITIVE);
    if split == 0.0 {
        total += adaptive_simpson(&f, 0.0, 1e-6, 1e-16)?.value;
        lo = 1e-6;
    }
    while lo < 1.0 {
        let hi = (lo * 2.0).min(1.0);
        total += adaptive_simpson(&f, lo, hi, 1e-13)?.value;
        lo = hi;
    }
    Ok(2.0 * std::f64::consts::PI * total)
}

/// Diagonal Gram family of the canonical-twist monomial basis on the
/// degree-`d` line model, weighted by the transform of a radial curve.
#[derive(Debug, Clone)]
pub struct RadialGramEval {
    pub degree: u32,
    pub curve: RadialTestCurve,
}

impl GramEval for RadialGramEval {
    fn dimension(&self) -> usize {
        (self.degree - 1) as usize
    }

    fn matrix_at(&self, t: f64) -> Result<CMat> {
        use rayon::prelude::*;
        let n = self.dimension();
        // off-diagonal entries vanish exactly: the angular integral of
        // e^{i (j - l) theta} is zero for j != l
        let diag: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| radial_monomial_norm_sq(self.degree, j as u32, &self.curve, t))
            .collect::<Result<_>>()?;
        let mut h = CMat::zeros(n, n);
        for (j, v) in diag.into_iter().enumerate() {
            h[(j, j)] = C64::new(v, 0.0);
        }
        Ok(h)
    }
}

/// Builds the quadrature-backed Gram family for the line model; positivity
/// and monotonicity (`H(t) <= H(0)`) are validated on the given samples.
pub fn radial_gram_family(
    model: &ToricModel,
    curve: RadialTestCurve,
    t_samples: &[f64],
) -> Result<GramFamily> {
    let d = match &model.exact {
        Some(ClosedFormWeight::FubiniStudy { d }) if model.dimension() == 1 => *d,
        _ => {
            return Err(Error::Precondition(
                "radial Gram families are built on closed-form line models".into(),
            ))
        }
    };
    if d < 2 {
        return Err(Error::Precondition(
            "the twist has no sections below degree 2".into(),
        ));
    }
    let fam = GramFamily::QuadratureBacked(Arc::new(RadialGramEval { degree: d, curve }));
    let mut ts = vec![0.0];
    ts.extend_from_slice(t_samples);
    fam.validate_on(&ts)?;
    Ok(fam)
}

/// Dimension of the canonical-twist section space on the line model:
/// `d - 1` monomials for degree `d`.
pub fn p1_twist_dimension(d: u32) -> usize {
    (d.saturating_sub(1)) as usize
}

/// JSON description of a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "phi")]
pub enum ToricModelJson {
    #[serde(rename = "fubini_study")]
    FubiniStudy { params: FsParams },
    #[serde(rename = "product_fubini_study")]
    Product { params: ProductParams },
    #[serde(rename = "grid")]
    Grid { polytope: ConvexBodyJson, grid: GridFunctionND },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FsParams {
    pub n: usize,
    pub d: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductParams {
    pub degrees: Vec<u32>,
}

impl ToricModelJson {
    pub fn build(&self) -> Result<ToricModel> {
        match self {
            ToricModelJson::FubiniStudy { params } => ToricModel::fubini_study(params.n, params.d),
            ToricModelJson::Product { params } => {
                ToricModel::product_fubini_study(&params.degrees)
            }
            ToricModelJson::Grid { polytope, grid } => {
                let body = polytope.lift()?;
                let vertices: Vec<Vec<i64>> = body
                    .vertices_f64()
                    .iter()
                    .map(|v| v.iter().map(|&x| x.round() as i64).collect())
                    .collect();
                let poly = LatticePolytope::from_vertices(&vertices, false)?;
                ToricModel::from_grid(poly, grid.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::primal_norm_sq;
    use std::f64::consts::PI;

    #[test]
    fn section_bases_count_lattice_points() {
        let p1_o2 = ToricModel::p1_fubini_study(2).unwrap();
        let basis = sections_basis(&p1_o2, 1).unwrap();
        assert_eq!(basis.len(), 3); // {0, 1, 2}
        assert_eq!(sections_basis(&p1_o2, 3).unwrap().len(), 7); // {0..6}
        let p2_o1 = ToricModel::fubini_study(2, 1).unwrap();
        assert_eq!(sections_basis(&p2_o1, 2).unwrap().len(), 6);
    }

    #[test]
    fn normalized_sections_have_unit_sup() {
        let model = ToricModel::p1_fubini_study(2).unwrap();
        // interior exponent: stationary point at e^y = 1
        let c = normalized_section_check(&model, &Exponent(vec![1]), 1).unwrap();
        assert!(c.defect < 1e-8, "defect {}", c.defect);
        assert!(!c.boundary_supremum);
        // zero exponent: supremum at y -> -inf
        let c = normalized_section_check(&model, &Exponent(vec![0]), 1).unwrap();
        assert!(c.defect < 1e-8, "defect {}", c.defect);
        assert!(c.boundary_supremum);
        // vertex of P
        let c = normalized_section_check(&model, &Exponent(vec![2]), 1).unwrap();
        assert!(c.defect < 1e-6, "defect {}", c.defect);
        assert!(c.boundary_supremum);
        // outside k P
        assert!(normalized_section_check(&model, &Exponent(vec![3]), 1).is_err());
    }

    #[test]
    fn growth_condition_certifies_section_bounds() {
        let model = ToricModel::p1_fubini_study(2).unwrap();
        let report = growth_condition(&model).unwrap();
        assert!(report.max_violation <= 1e-9, "violation {}", report.max_violation);
        assert!(report.sections_checked >= 8);
        let product = ToricModel::product_fubini_study(&[1, 1]).unwrap();
        let report = growth_condition(&product).unwrap();
        assert!(report.max_violation <= 1e-9);
    }

    #[test]
    fn line_integral_hits_2pi() {
        let model = ToricModel::p1_fubini_study(2).unwrap();
        let q = toric_integral_model(&model, &[1.0]).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "value {}", q.value);
        assert!(q.truncation_bound < 1e-3 * q.value);
        // grid route agrees through composite Simpson on the tabulated weight
        let qg = toric_integral_grid(&model.phi_grid, &[1.0]).unwrap();
        assert!((qg.value - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "grid value {}", qg.value);
    }

    #[test]
    fn boundary_shift_diverges() {
        let model = ToricModel::fubini_study(2, 2).unwrap();
        match toric_integral_model(&model, &[1.0, 1.0]) {
            Err(Error::Divergent(_)) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
        match toric_integral_grid(&model.phi_grid, &[1.0, 1.0]) {
            Err(Error::Divergent(_)) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn plane_integral_matches_refined_oracle() {
        let model = ToricModel::fubini_study(2, 3).unwrap();
        let q = toric_integral_model(&model, &[1.0, 1.0]).unwrap();
        // brute-force oracle: tensor Simpson at two refinements
        let coarse = toric_integral_grid(&model.phi_grid, &[1.0, 1.0]).unwrap();
        assert!(
            (q.value - coarse.value).abs() < 1e-4 * q.value,
            "adaptive {} vs grid {}",
            q.value,
            coarse.value,
        );
        // exact value: (2 pi)^2 / ((d-1)(d-2)) at d = 3 is 2 pi^2... the
        // substitution s_j = e^{y_j} gives 1/2 for the bare integral
        assert!((q.value - (2.0 * PI).powi(2) * 0.5).abs() < 1e-5 * q.value);
    }

    #[test]
    fn integral_decreases_when_the_weight_grows() {
        let model = ToricModel::p1_fubini_study(2).unwrap();
        let bumped = GridFunctionND::new(
            model.phi_grid.axes.clone(),
            model
                .phi_grid
                .values
                .iter()
                .map(|v| Finite(v.to_f64() + 0.3))
                .collect(),
        )
        .unwrap();
        let base = toric_integral_grid(&model.phi_grid, &[1.0]).unwrap().value;
        let less = toric_integral_grid(&bumped, &[1.0]).unwrap().value;
        assert!(less < base);
    }

    #[test]
    fn fixed_point_identity_on_line_and_product_models() {
        for d in [2u32, 4] {
            let model = ToricModel::p1_fubini_study(d).unwrap();
            let rep = bergman_fixed_point_check(&model).unwrap();
            assert!((rep.product - 1.0).abs() < 1e-6, "degree {d}: product {}", rep.product);
            assert!(rep.product >= 1.0 - 1e-9); // submean direction
        }
        let product = ToricModel::product_fubini_study(&[2, 2]).unwrap();
        let rep = bergman_fixed_point_check(&product).unwrap();
        assert!((rep.product - 1.0).abs() < 1e-6, "product model: {}", rep.product);
        // degree-2 line model: integral 2 pi, kernel 1/(2 pi)
        let rep = bergman_fixed_point_check(&ToricModel::p1_fubini_study(2).unwrap()).unwrap();
        assert!((rep.weight_integral - 2.0 * PI).abs() < 1e-5);
        assert!((rep.kernel_at_origin - 1.0 / (2.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn conjugate_caches_round_trip() {
        // (phi*)* = phi on the grid interior for the line model
        let model = ToricModel::p1_fubini_study(2).unwrap();
        // restrict to slopes well inside the polytope: the conjugate's
        // curvature blows up at the boundary and the cached grid is O(h^2)
        let back = legendre_conjugate(
            &model.phi_star_grid,
            &[Grid1D::new(-2.0, 2.0, 81).unwrap()],
        )
        .unwrap();
        for (_, y, v) in back.values.iter_nodes() {
            let truth = model.phi(&[y[0]]);
            assert!(
                (v.finite().unwrap() - truth).abs() < 1e-3,
                "y={} got={} want={}",
                y[0],
                v.finite().unwrap(),
                truth
            );
        }
    }

    #[test]
    fn gram_family_base_matches_beta_values() {
        // degree 4: H(0) diagonal 2 pi/3, pi/3, 2 pi/3
        let model = ToricModel::p1_fubini_study(4).unwrap();
        let fam = radial_gram_family(&model, RadialTestCurve::Zero, &[1.0, 5.0]).unwrap();
        let h0 = fam.matrix_at(0.0).unwrap();
        let want = [2.0 * PI / 3.0, PI / 3.0, 2.0 * PI / 3.0];
        for j in 0..3 {
            assert!(
                (h0[(j, j)].re - want[j]).abs() < 1e-9,
                "H(0)[{j}] = {}",
                h0[(j, j)].re
            );
        }
        // zero curve: H(t) = H(0) for all t
        let h5 = fam.matrix_at(5.0).unwrap();
        assert!((&h5 - &h0).norm() < 1e-10);
    }

    #[test]
    fn linear_curve_family_decays_at_the_multiplier_rates() {
        let model = ToricModel::p1_fubini_study(4).unwrap();
        let lambda = 2.5;
        let fam =
            radial_gram_family(&model, RadialTestCurve::LinearGreen { lambda }, &[1.0, 30.0])
                .unwrap();
        // expected decay of |z^j|_t^2 is min(j + 1, lambda)
        for (j, want) in [(0usize, 1.0f64), (1, 2.0), (2, 2.5)] {
            let mut e = crate::filtration::CVec::zeros(3);
            e[j] = C64::new(1.0, 0.0);
            let n30 = primal_norm_sq(&fam, &e, 30.0).unwrap();
            let n60 = primal_norm_sq(&fam, &e, 60.0).unwrap();
            let slope = -(n60.ln() - n30.ln()) / 30.0;
            assert!(
                (slope - want).abs() < 2e-2,
                "monomial {j}: slope {slope}, want {want}"
            );
        }
    }

    #[test]
    fn radial_curve_tabulation_is_a_valid_test_curve() {
        let curve = RadialTestCurve::LinearGreen { lambda: 1.0 };
        let alpha_grid = Grid1D::new(-1.0, 1.5, 251).unwrap();
        let tc = curve.as_test_curve(&[0.2, 0.5, 0.9], alpha_grid).unwrap();
        let lam = tc.critical_value();
        assert!((lam.value.finite().unwrap() - 1.0).abs() <= lam.uncertainty + 1e-12);
        // its transform matches the closed-form hat at the sample radii
        let ray = crate::rwn::hat_transform(&tc, Grid1D::new(1e-3, 20.0, 401).unwrap()).unwrap();
        for (i, &w) in [0.2f64, 0.5, 0.9].iter().enumerate() {
            let t = 7.0;
            let idx = ray.t_grid.nearest(t);
            let want = curve.hat(w.ln(), ray.t_grid.node(idx));
            assert!((ray.values[i][idx] - want).abs() < 1e-2, "w={w}");
        }
    }

    #[test]
    fn model_json_round_trip() {
        let j = ToricModelJson::FubiniStudy { params: FsParams { n: 1, d: 4 } };
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("fubini_study"));
        let back: ToricModelJson = serde_json::from_str(&text).unwrap();
        let model = back.build().unwrap();
        assert_eq!(model.dimension(), 1);
        assert_eq!(sections_basis(&model, 1).unwrap().len(), 5);
    }
}
