//! Test curves, subgeodesic rays, and the partial-Legendre correspondence
//! between them, together with the explicit round-sphere family used as the
//! sharp example throughout.
//!
//! A test curve is a concave, nonincreasing family `a -> v_a` per sample
//! point with `v_a -> 0` as `a` decreases and `v_a = -inf` past a critical
//! value. Its transform `u_t = sup_a { v_a + a t }` is a convex ray with
//! `u_t / t` nondecreasing, and `inf_t { u_t - t a }` inverts it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, Finite, NegInf, PosInf};
use crate::grid::Grid1D;
use crate::quadrature::{adaptive_simpson, maximize_concave_1d};
use crate::transforms::{inf_rows, sup_rows, CONVEXITY_TOL};

/// Abstract sample points carrying a weight value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplePoint {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<SamplePoint>,
}

impl PointSet {
    pub fn new(points: Vec<SamplePoint>) -> Result<Self> {
        let mut ids: Vec<&str> = points.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != points.len() {
            return Err(Error::InvalidValue("sample point ids must be unique".into()));
        }
        if points.iter().any(|p| !p.weight.is_finite()) {
            return Err(Error::InvalidValue("sample point weights must be finite".into()));
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Asymptotic slope estimate from two dyadic windows.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub value: f64,
    /// Gap between the two window secants; a confidence radius.
    pub uncertainty: f64,
    pub converged: bool,
}

/// Relative gap under which the two window secants count as agreeing.
pub const SLOPE_TOL: f64 = 1e-3;

/// Tolerance for the `v -> 0` limit condition at the low end of the alpha
/// grid; transforms from a ray pick up an edge term of size `t_lo * |a|`.
fn limit_tol(alpha_lo: f64) -> f64 {
    1e-2 * (1.0 + alpha_lo.abs())
}

/// Concave, nonincreasing extended-real curve family over sample points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestCurve {
    pub points: PointSet,
    pub alpha_grid: Grid1D,
    /// Row per point, column per alpha node.
    pub values: Vec<Vec<ExtReal>>,
    lambda: CriticalValue,
}

/// Critical value of a test curve with its grid resolution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalValue {
    pub value: ExtReal,
    pub uncertainty: f64,
}

impl TestCurve {
    pub fn new(points: PointSet, alpha_grid: Grid1D, values: Vec<Vec<ExtReal>>) -> Result<Self> {
        if values.len() != points.len() {
            return Err(Error::InvalidValue("one value row per sample point required".into()));
        }
        if values.iter().any(|row| row.len() != alpha_grid.count) {
            return Err(Error::InvalidValue("row length must match the alpha grid".into()));
        }
        for row in &values {
            if row.iter().any(|v| *v == PosInf) {
                return Err(Error::InvalidValue("test curves never take the value +inf".into()));
            }
            validate_concave_nonincreasing(row)?;
            // once a row hits -inf it must stay there (decreasing + concave)
            if let Some(first) = row.iter().position(|v| *v == NegInf) {
                if row[first..].iter().any(|v| v.is_finite()) {
                    return Err(Error::InvalidValue(
                        "-inf region of a test curve must be an upper tail".into(),
                    ));
                }
            }
        }
        if alpha_grid.lo <= 0.0 {
            let tol = limit_tol(alpha_grid.lo);
            for row in &values {
                match row[0] {
                    Finite(x) if x.abs() <= tol => {}
                    _ => {
                        return Err(Error::InvalidValue(format!(
                            "curve must vanish at the low alpha end (limit condition), got {}",
                            row[0]
                        )))
                    }
                }
            }
        }
        let lambda = detect_critical_column(&values, &alpha_grid);
        Ok(TestCurve { points, alpha_grid, values, lambda })
    }

    /// Critical value: the infimum over alpha whose column is identically
    /// `-inf`, located between grid nodes.
    pub fn critical_value(&self) -> CriticalValue {
        self.lambda
    }

    pub fn value(&self, point: usize, alpha_index: usize) -> ExtReal {
        self.values[point][alpha_index]
    }
}

fn validate_concave_nonincreasing(row: &[ExtReal]) -> Result<()> {
    let scale = row
        .iter()
        .filter_map(|v| v.finite())
        .fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let tol = CONVEXITY_TOL * scale;
    for w in row.windows(2) {
        if let (Finite(a), Finite(b)) = (w[0], w[1]) {
            if b > a + tol {
                return Err(Error::InvalidValue("curve must be nonincreasing in alpha".into()));
            }
        }
        if w[0] == NegInf && w[1].is_finite() {
            return Err(Error::InvalidValue(
                "curve cannot return from -inf as alpha increases".into(),
            ));
        }
    }
    for w in row.windows(3) {
        if let (Finite(a), Finite(b), Finite(c)) = (w[0], w[1], w[2]) {
            // concavity: middle values sit above chords
            if a - 2.0 * b + c > tol {
                return Err(Error::InvalidValue("curve must be concave in alpha".into()));
            }
        }
    }
    Ok(())
}

/// Exact-sentinel detection of the first all `-inf` column.
fn detect_critical_column(values: &[Vec<ExtReal>], grid: &Grid1D) -> CriticalValue {
    let first_dead = (0..grid.count)
        .find(|&j| values.iter().all(|row| row[j] == NegInf));
    match first_dead {
        Some(0) => CriticalValue { value: Finite(grid.lo), uncertainty: grid.step() },
        Some(j) => CriticalValue {
            value: Finite(0.5 * (grid.node(j - 1) + grid.node(j))),
            uncertainty: 0.5 * grid.step(),
        },
        None => CriticalValue { value: PosInf, uncertainty: f64::INFINITY },
    }
}

/// Convex ray family over sample points; values are finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgeodesicRay {
    pub points: PointSet,
    pub t_grid: Grid1D,
    pub values: Vec<Vec<f64>>,
    lambda: SlopeEstimate,
}

impl SubgeodesicRay {
    pub fn new(points: PointSet, t_grid: Grid1D, values: Vec<Vec<f64>>) -> Result<Self> {
        if t_grid.lo <= 0.0 {
            return Err(Error::InvalidValue("ray t grid must start strictly above zero".into()));
        }
        if values.len() != points.len() {
            return Err(Error::InvalidValue("one value row per sample point required".into()));
        }
        if values.iter().any(|row| row.len() != t_grid.count) {
            return Err(Error::InvalidValue("row length must match the t grid".into()));
        }
        let ts: Vec<f64> = t_grid.nodes().collect();
        for row in &values {
            let scale = row.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
            let tol = CONVEXITY_TOL * scale;
            for w in row.windows(3) {
                if w[0] - 2.0 * w[1] + w[2] < -tol {
                    return Err(Error::InvalidValue("ray must be convex in t".into()));
                }
            }
            for i in 0..row.len() - 1 {
                if row[i + 1] / ts[i + 1] < row[i] / ts[i] - tol {
                    return Err(Error::InvalidValue(
                        "u(t)/t must be nondecreasing along a ray".into(),
                    ));
                }
            }
        }
        let lambda = terminal_slope(&values, &t_grid);
        Ok(SubgeodesicRay { points, t_grid, values, lambda })
    }

    /// Critical value: largest terminal slope across points.
    pub fn critical_value(&self) -> SlopeEstimate {
        self.lambda
    }
}

/// Secant slopes over the windows `[T/2, 3T/4]` and `[3T/4, T]`; the second
/// is the estimate, their gap the uncertainty. When several points attain
/// the maximal slope, the best-converged one speaks for it.
fn terminal_slope(values: &[Vec<f64>], grid: &Grid1D) -> SlopeEstimate {
    let n = grid.count;
    let i_half = grid.nearest(grid.lo + 0.5 * (grid.hi - grid.lo));
    let i_three_q = grid.nearest(grid.lo + 0.75 * (grid.hi - grid.lo));
    let i_end = n - 1;
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .map(|row| {
            let s1 =
                (row[i_three_q] - row[i_half]) / (grid.node(i_three_q) - grid.node(i_half));
            let s2 = (row[i_end] - row[i_three_q]) / (grid.node(i_end) - grid.node(i_three_q));
            (s2, (s2 - s1).abs())
        })
        .collect();
    let top = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let gap = pairs
        .iter()
        .filter(|(s2, _)| *s2 >= top - 1e-12 * (1.0 + top.abs()))
        .map(|(_, g)| *g)
        .fold(f64::INFINITY, f64::min);
    SlopeEstimate {
        value: top,
        uncertainty: gap,
        converged: gap < SLOPE_TOL * top.abs().max(1.0),
    }
}

/// `u_t = sup_a { v_a + a t }` per point.
pub fn hat_transform(v: &TestCurve, t_grid: Grid1D) -> Result<SubgeodesicRay> {
    let rows = sup_rows(&v.values, &v.alpha_grid, &t_grid)?;
    let finite: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| {
                    v.finite().ok_or_else(|| {
                        Error::InvalidValue("transform of a valid test curve must be finite".into())
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    SubgeodesicRay::new(v.points.clone(), t_grid, finite)
}

/// `v_a = inf_t { u_t - t a }` per point (Kiselman-type minimum).
///
/// Rays satisfy `u_t -> 0` as `t -> 0`, so the infimum never exceeds the
/// `t -> 0` limit value `0`; that virtual node is included, which removes
/// the `t_lo |a|` edge error the bare grid scan would make at `a <= 0`.
pub fn check_transform(u: &SubgeodesicRay, alpha_grid: Grid1D) -> Result<TestCurve> {
    let rows: Vec<Vec<ExtReal>> = u
        .values
        .iter()
        .map(|row| row.iter().map(|&x| Finite(x)).collect())
        .collect();
    let out = inf_rows(&rows, &u.t_grid, &alpha_grid)?;
    let capped = out
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.min(Finite(0.0))).collect())
        .collect();
    TestCurve::new(u.points.clone(), alpha_grid, capped)
}

/// Sup-distance between `check(hat(v))` and `v` over nodes where `v` is
/// finite; infinite if the finiteness patterns disagree.
pub fn roundtrip_defect(v: &TestCurve, t_grid: Grid1D) -> Result<f64> {
    let ray = hat_transform(v, t_grid)?;
    let back = check_transform(&ray, v.alpha_grid)?;
    let mut defect = 0.0_f64;
    for (row_v, row_b) in v.values.iter().zip(&back.values) {
        for (a, b) in row_v.iter().zip(row_b) {
            match (a, b) {
                (Finite(x), Finite(y)) => defect = defect.max((x - y).abs()),
                (Finite(_), NegInf) | (NegInf, Finite(_)) => return Ok(f64::INFINITY),
                _ => {}
            }
        }
    }
    Ok(defect)
}

/// Round two-sphere sample: geodesic radii `d`, the derived quantity
/// `E = tan^2(d/2)`, and the rotation-invariant weight `2 log(1 + E)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereModel {
    pub radial_grid: Grid1D,
    pub e_values: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SphereModel {
    /// `n_radial` geodesic radii on `(0, d_max)`, `d_max < pi`.
    pub fn new(n_radial: usize, d_max: f64) -> Result<Self> {
        if !(0.0 < d_max && d_max < std::f64::consts::PI) {
            return Err(Error::InvalidValue(format!(
                "d_max must sit in (0, pi), got {d_max} (E blows up at pi)"
            )));
        }
        let lo = d_max / n_radial as f64;
        let radial_grid = Grid1D::new(lo.min(1e-3), d_max, n_radial)?;
        let e_values: Vec<f64> = radial_grid.nodes().map(|d| (d / 2.0).tan().powi(2)).collect();
        if e_values.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidValue("E must be finite on the grid".into()));
        }
        if e_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidValue("E must increase with d".into()));
        }
        let phi = e_values.iter().map(|e| 2.0 * (1.0 + e).ln()).collect();
        Ok(SphereModel { radial_grid, e_values, phi })
    }
}

/// The explicit sharp curve on the sphere: for `0 < a <= 2`,
///
/// ```text
/// v_a = a log E + 2 log(2/(1+E)) - a log a - (2-a) log(2-a)   if E < a/(2-a)
/// v_a = 0                                                     otherwise
/// ```
///
/// with `0 log 0 := 0`, `v_a = 0` for `a <= 0` and `-inf` for `a > 2`.
pub fn sharp_curve_value(e: f64, alpha: f64) -> ExtReal {
    if alpha <= 0.0 {
        return Finite(0.0);
    }
    if alpha > 2.0 {
        return NegInf;
    }
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let boundary_hit = if alpha >= 2.0 {
        true // a/(2-a) is +inf: every finite E is below the branch point
    } else {
        e < alpha / (2.0 - alpha)
    };
    if boundary_hit {
        Finite(alpha * e.ln() + 2.0 * (2.0 / (1.0 + e)).ln() - xlogx(alpha) - xlogx(2.0 - alpha))
    } else {
        Finite(0.0)
    }
}

/// The ray the family transforms to: `u_t = 2 log((1 + e^t E)/(1 + E))`.
pub fn sharp_ray_value(e: f64, t: f64) -> f64 {
    // stable for large t: 2(t + log E - log(1+E)) + 2 log(1 + e^{-t}/E)
    if t > 30.0 && e > 0.0 {
        2.0 * (t + e.ln() - (1.0 + e).ln()) + 2.0 * (-t).exp().ln_1p() / e.max(1.0)
    } else {
        2.0 * ((1.0 + t.exp() * e) / (1.0 + e)).ln()
    }
}

/// Numerical `inf_t { u_t - t a }` of the explicit ray, refined well past
/// grid resolution (used to cross-check the branch formula).
pub fn sharp_curve_numeric_inf(e: f64, alpha: f64) -> f64 {
    let g = |t: f64| -(sharp_ray_value(e, t) - t * alpha);
    let (_, neg_min) = maximize_concave_1d(&g, 1e-9, 60.0, 1e-12);
    -neg_min
}

/// Builds the explicit family as a `TestCurve` over the sphere sample and
/// cross-checks the branch formula against the numerical infimum.
pub fn sphere_sharp_family(model: &SphereModel, alpha_grid: Grid1D) -> Result<TestCurve> {
    let points = PointSet::new(
        model
            .e_values
            .iter()
            .zip(&model.phi)
            .enumerate()
            .map(|(i, (&e, &w))| SamplePoint {
                id: format!("d{i}"),
                coords: Some(vec![e]),
                weight: w,
            })
            .collect(),
    )?;
    let values: Vec<Vec<ExtReal>> = model
        .e_values
        .iter()
        .map(|&e| alpha_grid.nodes().map(|a| sharp_curve_value(e, a)).collect())
        .collect();
    // spot-check formula against the refined numerical infimum
    for &e in model.e_values.iter().take(8) {
        for a in [0.25, 0.75, 1.25, 1.75] {
            if let Finite(formula) = sharp_curve_value(e, a) {
                let numeric = sharp_curve_numeric_inf(e, a);
                if (formula - numeric).abs() > 1e-6 {
                    return Err(Error::InvalidValue(format!(
                        "branch formula and numerical infimum disagree at E={e}, a={a}: \
                         {formula} vs {numeric}"
                    )));
                }
            }
        }
    }
    TestCurve::new(points, alpha_grid, values)
}

/// Density limit of the sharp family and the reference constant `4 pi`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    /// `lim_t e^t Int e^{-phi} (1+E)^2 / (1 + e^t E)^2` over the sphere.
    pub limit: f64,
    /// Quadrature value of `Int (1 + |x|^2/4)^{-2}` over the plane.
    pub constant_4pi: f64,
    /// `limit / constant_4pi`; the density of the weight form at the base
    /// point (1/2 on the round model).
    pub ratio: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Evaluates the rescaled integral at increasing `t` and reports its limit
/// against `4 pi`.
pub fn sphere_density_bound(model: &SphereModel) -> Result<DensityReport> {
    let d_max = model.radial_grid.hi;
    let sample_ts = [8.0, 10.0, 12.0, 14.0];
    let mut samples = Vec::new();
    for &t in &sample_ts {
        samples.push((t, rescaled_sphere_integral(t, d_max)?));
    }
    let limit = samples.last().unwrap().1;
    // plane integral (1 + r^2/4)^{-2}, 2 pi r dr, in the variable s = r^2/4,
    // over dyadic segments out to 1e9 (power-law tail bounded analytically)
    let plane_density = |s: f64| 4.0 * std::f64::consts::PI / ((1.0 + s) * (1.0 + s));
    let mut plane = adaptive_simpson(&plane_density, 0.0, 1.0, 1e-10)?.value;
    let mut lo = 1.0_f64;
    while lo < 1e9 {
        let hi = (lo * 2.0).min(1e9);
        plane += adaptive_simpson(&plane_density, lo, hi, 1e-10)?.value;
        lo = hi;
    }
    // the analytic tail past s = 1e9 is 4 pi / (1 + 1e9)
    let constant_4pi = plane + 4.0 * std::f64::consts::PI / (1.0 + 1e9);
    Ok(DensityReport { limit, constant_4pi, ratio: limit / constant_4pi, samples })
}

/// `e^t Int_0^{d_max} pi sin d (1+E)^2/(1+e^t E)^2 dd`, resolved across the
/// boundary layer at `d ~ e^{-t/2}` by dyadic segmentation.
fn rescaled_sphere_integral(t: f64, d_max: f64) -> Result<f64> {
    let integrand = |d: f64| {
        let e = (d / 2.0).tan().powi(2);
        let ratio = (1.0 + e) / (1.0 + t.exp() * e);
        t.exp() * std::f64::consts::PI * d.sin() * ratio * ratio
    };
    let layer = (-t / 2.0).exp();
    let mut lo = layer * 2.0_f64.powi(-12);
    let mut total = adaptive_simpson(&integrand, 1e-300, lo, 1e-14)?.value;
    while lo < d_max {
        let hi = (lo * 2.0).min(d_max);
        total += adaptive_simpson(&integrand, lo, hi, 1e-12)?.value;
        lo = hi;
    }
    Ok(total)
}

/// Wire form of a test curve: a points header over the grid-function data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestCurveJson {
    pub points: Vec<SamplePoint>,
    pub alpha_grid: Grid1D,
    pub values: Vec<Vec<ExtReal>>,
}

impl TestCurveJson {
    pub fn lift(self) -> Result<TestCurve> {
        TestCurve::new(PointSet::new(self.points)?, self.alpha_grid, self.values)
    }
}

impl From<&TestCurve> for TestCurveJson {
    fn from(v: &TestCurve) -> Self {
        TestCurveJson {
            points: v.points.points.clone(),
            alpha_grid: v.alpha_grid,
            values: v.values.clone(),
        }
    }
}

/// Wire form of a ray.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgeodesicRayJson {
    pub points: Vec<SamplePoint>,
    pub t_grid: Grid1D,
    pub values: Vec<Vec<f64>>,
}

impl SubgeodesicRayJson {
    pub fn lift(self) -> Result<SubgeodesicRay> {
        SubgeodesicRay::new(PointSet::new(self.points)?, self.t_grid, self.values)
    }
}

impl From<&SubgeodesicRay> for SubgeodesicRayJson {
    fn from(u: &SubgeodesicRay) -> Self {
        SubgeodesicRayJson {
            points: u.points.points.clone(),
            t_grid: u.t_grid,
            values: u.values.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single_point(weight: f64) -> PointSet {
        PointSet::new(vec![SamplePoint { id: "p".into(), coords: None, weight }]).unwrap()
    }

    fn linear_curve(lambda: f64, g: f64, alpha_grid: Grid1D) -> TestCurve {
        let row: Vec<ExtReal> = alpha_grid
            .nodes()
            .map(|a| {
                if a <= 0.0 {
                    Finite(0.0)
                } else if a <= lambda + 1e-12 {
                    Finite(a * g)
                } else {
                    NegInf
                }
            })
            .collect();
        TestCurve::new(single_point(0.0), alpha_grid, vec![row]).unwrap()
    }

    #[test]
    fn linear_curve_critical_value() {
        let grid = Grid1D::new(-1.0, 1.0, 201).unwrap();
        let v = linear_curve(0.7, -1.0, grid);
        let lam = v.critical_value();
        assert!((lam.value.finite().unwrap() - 0.7).abs() <= lam.uncertainty + 1e-12);
        assert!(lam.uncertainty <= 0.0051);
    }

    #[test]
    fn hat_of_linear_curve_is_hinge_and_keeps_lambda() {
        let grid = Grid1D::new(-1.0, 1.0, 401).unwrap();
        let v = linear_curve(1.0, -1.0, grid);
        let ray = hat_transform(&v, Grid1D::new(1e-3, 30.0, 401).unwrap()).unwrap();
        for (i, t) in ray.t_grid.nodes().enumerate() {
            let want = (t - 1.0).max(0.0);
            assert!((ray.values[0][i] - want).abs() < 6e-3, "t={t}");
        }
        let lam = ray.critical_value();
        assert!(lam.converged);
        assert!((lam.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_curve_round_trips_to_zero() {
        let grid = Grid1D::new(-1.0, 1.0, 101).unwrap();
        let row: Vec<ExtReal> = grid
            .nodes()
            .map(|a| if a <= 0.0 { Finite(0.0) } else { NegInf })
            .collect();
        let v = TestCurve::new(single_point(0.0), grid, vec![row]).unwrap();
        let d = roundtrip_defect(&v, Grid1D::new(1e-3, 30.0, 201).unwrap()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn hat_of_check_reproduces_a_ray() {
        // the other direction of the round trip, on the explicit family
        let model = SphereModel::new(6, 3.0).unwrap();
        let grid = Grid1D::new(-1.0, 2.5, 201).unwrap();
        let v = sphere_sharp_family(&model, grid).unwrap();
        let t_grid = Grid1D::new(1e-3, 30.0, 201).unwrap();
        let ray = hat_transform(&v, t_grid).unwrap();
        let back = hat_transform(&check_transform(&ray, grid).unwrap(), t_grid).unwrap();
        let mut defect = 0.0_f64;
        for (row_a, row_b) in ray.values.iter().zip(&back.values) {
            for (a, b) in row_a.iter().zip(row_b) {
                defect = defect.max((a - b).abs());
            }
        }
        assert!(defect < 5e-3, "hat-check-hat defect {defect}");
    }

    #[test]
    fn check_of_hinge_recovers_linear_curve() {
        let t_grid = Grid1D::new(1e-3, 30.0, 401).unwrap();
        let lambda = 1.0;
        let values: Vec<f64> = t_grid.nodes().map(|t| lambda * (t - 1.0).max(0.0)).collect();
        let ray = SubgeodesicRay::new(single_point(0.0), t_grid, vec![values]).unwrap();
        let v = check_transform(&ray, Grid1D::new(-1.0, 1.5, 251).unwrap()).unwrap();
        for (j, a) in v.alpha_grid.nodes().enumerate() {
            match v.values[0][j] {
                Finite(x) if a > 0.0 && a <= 1.0 => {
                    assert!((x + a).abs() < 2e-2, "a={a} got={x}")
                }
                Finite(x) if a <= 0.0 => assert!(x.abs() < 4e-3),
                NegInf => assert!(a > 1.0),
                other => panic!("unexpected {other} at a={a}"),
            }
        }
    }

    #[test]
    fn branch_formula_values() {
        // a = 2, E = 1: both log terms vanish, leaving -2 log 2
        let v = sharp_curve_value(1.0, 2.0).finite().unwrap();
        assert!((v + 2.0 * 2.0_f64.ln()).abs() < 1e-12);
        // a = 0 gives the zero branch
        assert_eq!(sharp_curve_value(5.0, 0.0), Finite(0.0));
        // a = 1, E = 3 is past the branch point 1, so the curve is flat zero
        assert_eq!(sharp_curve_value(3.0, 1.0), Finite(0.0));
        // a = 1, E = 1/3 sits below the branch point: log 3 - 2 log 2
        let v = sharp_curve_value(1.0 / 3.0, 1.0).finite().unwrap();
        assert!((v - (3.0_f64.ln() - 2.0 * 2.0_f64.ln())).abs() < 1e-12);
        // past the critical value
        assert_eq!(sharp_curve_value(1.0, 2.01), NegInf);
    }

    #[test]
    fn branch_formula_matches_numerical_infimum() {
        for e in [0.1, 1.0 / 3.0, 1.0, 3.0, 10.0] {
            for a in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0] {
                let formula = sharp_curve_value(e, a).finite().unwrap();
                let numeric = sharp_curve_numeric_inf(e, a);
                assert!(
                    (formula - numeric).abs() < 1e-6,
                    "E={e} a={a}: {formula} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn explicit_family_is_a_test_curve_with_critical_value_two() {
        let model = SphereModel::new(40, 3.0).unwrap();
        let grid = Grid1D::new(-1.0, 2.5, 351).unwrap();
        let v = sphere_sharp_family(&model, grid).unwrap();
        let lam = v.critical_value();
        assert!((lam.value.finite().unwrap() - 2.0).abs() < 1e-2);
    }

    #[test]
    fn explicit_family_ray_and_slopes() {
        let model = SphereModel::new(12, 3.0).unwrap();
        let grid = Grid1D::new(-1.0, 2.5, 141).unwrap();
        let v = sphere_sharp_family(&model, grid).unwrap();
        let ray = hat_transform(&v, Grid1D::new(1e-3, 30.0, 401).unwrap()).unwrap();
        // u_t/t nondecreasing is enforced by the constructor; lambda ~ 2
        let lam = ray.critical_value();
        assert!((lam.value - 2.0).abs() < 2e-2, "slope {}", lam.value);
        // hat matches the closed-form ray
        for (i, &e) in ray.points.points.iter().map(|p| &p.coords.as_ref().unwrap()[0]).enumerate()
        {
            let t = 10.0;
            let j = ray.t_grid.nearest(t);
            let want = sharp_ray_value(*&e, ray.t_grid.node(j));
            assert!((ray.values[i][j] - want).abs() < 2e-2, "E={e}");
        }
    }

    #[test]
    fn density_limit_is_half_of_4pi() {
        let model = SphereModel::new(60, 3.1).unwrap();
        let report = sphere_density_bound(&model).unwrap();
        assert!((report.constant_4pi - 4.0 * PI).abs() < 1e-6, "{}", report.constant_4pi);
        assert!((report.limit - 2.0 * PI).abs() < 1e-4, "{}", report.limit);
        assert!((report.ratio - 0.5).abs() < 1e-4);
        // samples approach the limit from below, monotonically
        for w in report.samples.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-9);
        }
        assert!((report.samples.last().unwrap().1 - report.limit).abs() < 1e-4);
    }

    #[test]
    fn sphere_model_rejects_pi() {
        assert!(SphereModel::new(10, 3.2).is_err());
    }
}
