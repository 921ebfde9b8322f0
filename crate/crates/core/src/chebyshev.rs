//! Rotation-invariant domains: monomial sup norms, the Chebyshev transform
//! of the log-image, weighted Azukawa indicators, their negative sublevel
//! bodies, and the kernel lower bound `1 / volume`.
//!
//! On a bounded Reinhardt domain containing the origin the extremizers of
//! the Chebyshev minimization are single monomials: expanding any competitor
//! in its torus Fourier series bounds the sup norm from below by each
//! monomial term. The transform therefore reduces to the log-image support
//! function, evaluated here exactly for polydiscs, balls, and nonnegative
//! log-halfspace systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::{Finite, PosInf};
use crate::grid::{Grid1D, GridFunctionND};
use crate::quadrature::{adaptive_simpson, bisect_increasing, maximize_concave_1d};
use crate::valuations::{Exponent, WeightMatrix};

/// Bounded rotation-invariant domain with the origin interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReinhardtDomain {
    Polydisc { radii: Vec<f64> },
    Ball { dimension: usize, radius: f64 },
    /// Constraints `normal . (log|z_1|^2, ...) <= offset` with nonnegative
    /// normals (forced by the origin being interior).
    LogHalfspaces { dimension: usize, halfspaces: Vec<LogHalfspace> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHalfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl ReinhardtDomain {
    pub fn polydisc(radii: &[f64]) -> Result<Self> {
        let d = ReinhardtDomain::Polydisc { radii: radii.to_vec() };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(dimension: usize, radius: f64) -> Result<Self> {
        let d = ReinhardtDomain::Ball { dimension, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn log_halfspaces(dimension: usize, halfspaces: Vec<LogHalfspace>) -> Result<Self> {
        let d = ReinhardtDomain::LogHalfspaces { dimension, halfspaces };
        d.validate()?;
        Ok(d)
    }

    pub fn dimension(&self) -> usize {
        match self {
            ReinhardtDomain::Polydisc { radii } => radii.len(),
            ReinhardtDomain::Ball { dimension, .. } => *dimension,
            ReinhardtDomain::LogHalfspaces { dimension, .. } => *dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ReinhardtDomain::Polydisc { radii } => {
                if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
                    return Err(Error::InvalidValue("polydisc radii must be positive".into()));
                }
            }
            ReinhardtDomain::Ball { dimension, radius } => {
                if *dimension == 0 || !(radius > &0.0) || !radius.is_finite() {
                    return Err(Error::InvalidValue("ball needs positive radius".into()));
                }
            }
            ReinhardtDomain::LogHalfspaces { dimension, halfspaces } => {
                let n = *dimension;
                if n == 0 || n > 3 {
                    return Err(Error::InvalidValue(
                        "log-halfspace domains are supported in dimensions 1..=3".into(),
                    ));
                }
                for h in halfspaces {
                    if h.normal.len() != n {
                        return Err(Error::InvalidValue("halfspace arity mismatch".into()));
                    }
                    if h.normal.iter().any(|&x| x < 0.0) {
                        return Err(Error::InvalidValue(
                            "normals must be nonnegative: the origin is interior, so the \
                             log-image contains a full lower quadrant"
                                .into(),
                        ));
                    }
                    if h.normal.iter().all(|&x| x == 0.0) {
                        return Err(Error::InvalidValue("zero normal".into()));
                    }
                }
                // bounded iff every coordinate direction is supported
                for j in 0..n {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    if !self.log_support(&e)?.is_finite() {
                        return Err(Error::InvalidValue(format!(
                            "domain is unbounded along axis {j}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Support function of the log-image on nonnegative directions:
    /// `h(a) = sup { a . y : y in log-image }`, `+inf` when unbounded.
    pub fn log_support(&self, alpha: &[f64]) -> Result<f64> {
        if alpha.len() != self.dimension() {
            return Err(Error::Precondition("direction arity mismatch".into()));
        }
        if alpha.iter().any(|&a| a < 0.0) {
            return Err(Error::Precondition(
                "support evaluated on nonnegative directions only".into(),
            ));
        }
        match self {
            ReinhardtDomain::Polydisc { radii } => Ok(alpha
                .iter()
                .zip(radii)
                .map(|(&a, &r)| a * (r * r).ln())
                .sum()),
            ReinhardtDomain::Ball { radius, .. } => {
                let total: f64 = alpha.iter().sum();
                if total == 0.0 {
                    return Ok(0.0);
                }
                let entropy: f64 = alpha
                    .iter()
                    .map(|&a| if a > 0.0 { a * (a / total).ln() } else { 0.0 })
                    .sum();
                Ok(total * (radius * radius).ln() + entropy)
            }
            ReinhardtDomain::LogHalfspaces { halfspaces, .. } => {
                dual_support(alpha, halfspaces)
            }
        }
    }

    /// Per-axis radius caps `sup |z_j|`.
    pub fn radius_caps(&self) -> Result<Vec<f64>> {
        let n = self.dimension();
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                Ok((self.log_support(&e)? / 2.0).exp())
            })
            .collect()
    }
}

/// Linear-programming dual by active-set enumeration: the support value is
/// `min sum l_i c_i` over nonnegative multipliers with `sum l_i n_i = a`.
/// Sets of up to `dim` constraints are enumerated; infeasibility of every
/// set means the primal direction is unbounded.
fn dual_support(alpha: &[f64], halfspaces: &[LogHalfspace]) -> Result<f64> {
    let n = alpha.len();
    if alpha.iter().all(|&a| a == 0.0) {
        return Ok(0.0);
    }
    let m = halfspaces.len();
    let mut best = f64::INFINITY;
    let combos: Vec<Vec<usize>> = match n {
        1 => (0..m).map(|i| vec![i]).collect(),
        2 => {
            let mut c: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
            for i in 0..m {
                for j in i + 1..m {
                    c.push(vec![i, j]);
                }
            }
            c
        }
        3 => {
            let mut c: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
            for i in 0..m {
                for j in i + 1..m {
                    c.push(vec![i, j]);
                    for k in j + 1..m {
                        c.push(vec![i, j, k]);
                    }
                }
            }
            c
        }
        _ => return Err(Error::Precondition("support enumeration covers dimensions 1..=3".into())),
    };
    for combo in combos {
        if let Some(value) = solve_multipliers(alpha, halfspaces, &combo) {
            best = best.min(value);
        }
    }
    Ok(best)
}

/// Least-squares-free exact solve of `sum l_i n_i = alpha` on a small
/// support set; `None` when singular, inconsistent, or negative.
fn solve_multipliers(alpha: &[f64], halfspaces: &[LogHalfspace], combo: &[usize]) -> Option<f64> {
    let n = alpha.len();
    let k = combo.len();
    // Gaussian elimination on the n x k system (n >= k)
    let mut a = vec![vec![0.0f64; k + 1]; n];
    for (r, row) in a.iter_mut().enumerate() {
        for (c, &i) in combo.iter().enumerate() {
            row[c] = halfspaces[i].normal[r];
        }
        row[k] = alpha[r];
    }
    let mut rank = 0usize;
    for col in 0..k {
        let pivot = (rank..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-13 {
            return None; // rank-deficient support set
        }
        a.swap(rank, pivot);
        let p = a[rank][col];
        for c in 0..=k {
            a[rank][c] /= p;
        }
        for r in 0..n {
            if r != rank && a[r][col].abs() > 0.0 {
                let f = a[r][col];
                for c in 0..=k {
                    a[r][c] -= f * a[rank][c];
                }
            }
        }
        rank += 1;
    }
    // consistency of the remaining equations
    for row in a.iter().skip(rank) {
        if row[k].abs() > 1e-10 {
            return None;
        }
    }
    let mut value = 0.0;
    for (c, &i) in combo.iter().enumerate() {
        let l = a[c][k];
        if l < -1e-12 {
            return None;
        }
        value += l.max(0.0) * halfspaces[i].offset;
    }
    Some(value)
}

/// `sup_X |z^a|` via the support function.
pub fn monomial_sup_norm(domain: &ReinhardtDomain, a: &Exponent) -> Result<f64> {
    let alpha: Vec<f64> = a.0.iter().map(|&e| e as f64).collect();
    Ok((domain.log_support(&alpha)? / 2.0).exp())
}

/// The Chebyshev transform on the orthant: `v(a) = log sup_X |z^a|^2`,
/// which on a Reinhardt domain is the support function of the log-image;
/// `+inf` off the orthant.
pub fn domain_chebyshev(domain: &ReinhardtDomain, axes: Vec<Grid1D>) -> Result<GridFunctionND> {
    if axes.len() != domain.dimension() {
        return Err(Error::Precondition("grid arity mismatch".into()));
    }
    GridFunctionND::tabulate(axes, |alpha| {
        if alpha.iter().any(|&x| x < 0.0) {
            PosInf
        } else {
            match domain.log_support(alpha) {
                Ok(v) if v.is_finite() => Finite(v),
                _ => PosInf,
            }
        }
    })
}

/// The weighted Azukawa indicator
/// `A(xi) = sup { sum a_j log|xi_j|^2 - v(a) : a >= 0, T_1(a) = 1 }`,
/// a concave maximization over the simplex slice cut by the first weight
/// row. Closed form for polydiscs, numeric for the rest.
pub fn azukawa_n(domain: &ReinhardtDomain, beta: &WeightMatrix, xi_abs: &[f64]) -> Result<f64> {
    let n = domain.dimension();
    if beta.arity() != n || xi_abs.len() != n {
        return Err(Error::Precondition("arity mismatch".into()));
    }
    if !beta.is_infinitesimal() {
        return Err(Error::Precondition("weight must be infinitesimal (first row positive)".into()));
    }
    if xi_abs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Precondition(
            "indicator evaluation needs nonzero coordinates".into(),
        ));
    }
    let y: Vec<f64> = xi_abs.iter().map(|&x| 2.0 * x.ln()).collect();
    let row = &beta.rows()[0];
    if let ReinhardtDomain::Polydisc { radii } = domain {
        // linear objective over the slice: the maximum sits at a vertex
        let mut best = f64::NEG_INFINITY;
        for j in 0..n {
            best = best.max((y[j] - (radii[j] * radii[j]).ln()) / row[j] as f64);
        }
        return Ok(best);
    }
    // barycentric parametrization of the slice over vertices e_j / row_j
    let objective = |theta: &[f64]| -> f64 {
        let mut alpha = vec![0.0; n];
        for (j, &t) in theta.iter().enumerate() {
            alpha[j] = t / row[j] as f64;
        }
        let linear: f64 = alpha.iter().zip(&y).map(|(a, b)| a * b).sum();
        match domain.log_support(&alpha) {
            Ok(v) if v.is_finite() => linear - v,
            _ => f64::NEG_INFINITY,
        }
    };
    let value = match n {
        1 => objective(&[1.0]),
        2 => {
            let line = |t: f64| objective(&[t, 1.0 - t]);
            maximize_concave_1d(&line, 0.0, 1.0, 1e-10).1
        }
        3 => {
            let outer = |t1: f64| {
                let inner = |t2: f64| objective(&[t1, t2, 1.0 - t1 - t2]);
                maximize_concave_1d(&inner, 0.0, 1.0 - t1, 1e-10).1
            };
            maximize_concave_1d(&outer, 0.0, 1.0, 1e-10).1
        }
        _ => {
            return Err(Error::Precondition(
                "indicator maximization covers dimensions 1..=3".into(),
            ))
        }
    };
    Ok(value)
}

/// One-row Azukawa indicator by the scale-and-limit of the closed-form
/// pluricomplex Green function (polydisc and ball only).
#[derive(Debug, Clone)]
pub struct AzukawaFunction {
    pub domain: ReinhardtDomain,
    pub weight_row: Vec<u64>,
    /// Two probe scales for the limit estimate and its consistency gap.
    pub s_probes: [f64; 2],
}

impl AzukawaFunction {
    /// Green function `G` at radial position `|z_j| = m_j`:
    /// `max_j log|z_j/r_j|^2` on the polydisc, `log(|z|^2/R^2)` on the ball.
    fn green(&self, moduli: &[f64]) -> Result<f64> {
        match &self.domain {
            ReinhardtDomain::Polydisc { radii } => Ok(moduli
                .iter()
                .zip(radii)
                .map(|(&m, &r)| (m * m / (r * r)).ln())
                .fold(f64::NEG_INFINITY, f64::max)),
            ReinhardtDomain::Ball { radius, .. } => {
                let norm_sq: f64 = moduli.iter().map(|&m| m * m).sum();
                Ok((norm_sq / (radius * radius)).ln())
            }
            ReinhardtDomain::LogHalfspaces { .. } => Err(Error::Precondition(
                "closed-form Green functions cover the polydisc and the ball".into(),
            )),
        }
    }

    /// `G(s^{w_1} xi_1, ...) - log s^2` at probe scale `s`.
    pub fn scaled_value(&self, xi_abs: &[f64], s: f64) -> Result<f64> {
        let moduli: Vec<f64> = xi_abs
            .iter()
            .zip(&self.weight_row)
            .map(|(&x, &w)| s.powi(w as i32) * x)
            .collect();
        Ok(self.green(&moduli)? - (s * s).ln())
    }

    /// Limit estimate at the smaller probe, with the two-scale gap.
    pub fn value(&self, xi_abs: &[f64]) -> Result<(f64, f64)> {
        let a = self.scaled_value(xi_abs, self.s_probes[0])?;
        let b = self.scaled_value(xi_abs, self.s_probes[1])?;
        Ok((b, (a - b).abs()))
    }
}

/// Builds the one-row indicator for a supported domain.
pub fn azukawa_1_explicit(
    domain: &ReinhardtDomain,
    weight_row: &[u64],
) -> Result<AzukawaFunction> {
    match domain {
        ReinhardtDomain::LogHalfspaces { .. } => Err(Error::Precondition(
            "closed-form Green functions cover the polydisc and the ball".into(),
        )),
        _ => {
            if weight_row.len() != domain.dimension() || weight_row.iter().any(|&w| w == 0) {
                return Err(Error::Precondition("weight row must be positive".into()));
            }
            Ok(AzukawaFunction {
                domain: domain.clone(),
                weight_row: weight_row.to_vec(),
                s_probes: [1e-3, 1e-4],
            })
        }
    }
}

/// Negative sublevel body of the indicator, with its volume and the
/// resulting kernel bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebyshevBodyReport {
    pub volume: f64,
    /// Radial caps of the body per axis (descriptor in radii coordinates).
    pub radii_caps: Vec<f64>,
    /// `1 / volume`: the lower bound on the kernel at the center.
    pub bergman_bound: f64,
    /// Exact kernel at the center when a closed form exists.
    pub exact_kernel: Option<f64>,
    pub gap: Option<f64>,
}

/// Exact Bergman kernel at the center: `1/(pi^n prod r_j^2)` for the
/// polydisc, `n!/(pi^n R^{2n})` for the ball.
pub fn exact_kernel_at_center(domain: &ReinhardtDomain) -> Option<f64> {
    match domain {
        ReinhardtDomain::Polydisc { radii } => {
            let n = radii.len();
            let prod: f64 = radii.iter().map(|&r| r * r).product();
            Some(1.0 / (std::f64::consts::PI.powi(n as i32) * prod))
        }
        ReinhardtDomain::Ball { dimension, radius } => {
            let n = *dimension;
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            Some(fact / (std::f64::consts::PI.powi(n as i32) * radius.powi(2 * n as i32)))
        }
        ReinhardtDomain::LogHalfspaces { .. } => None,
    }
}

/// Volume of the sublevel body `{ A < 0 }` by iterated quadrature over the
/// radii-squared coordinates, where the region is downward closed and its
/// upper boundary per axis is found by bisection (the indicator increases
/// in every radius).
pub fn chebyshev_body(domain: &ReinhardtDomain, beta: &WeightMatrix) -> Result<ChebyshevBodyReport> {
    let n = domain.dimension();
    let caps = domain.radius_caps()?;
    let eps = 1e-12;
    let indicator = |t: &[f64]| -> f64 {
        // moduli sqrt(t), floored away from zero for the log
        let xi: Vec<f64> = t.iter().map(|&x| x.max(1e-280).sqrt()).collect();
        azukawa_n(domain, beta, &xi).unwrap_or(f64::INFINITY)
    };
    // upper boundary of the last coordinate given the previous ones
    let t_cap: Vec<f64> = caps.iter().map(|&c| c * c * (1.0 + 1e-9) * 2.0).collect();
    let volume_t = match n {
        1 => {
            let f = |t: f64| indicator(&[t]);
            bisect_increasing(&f, eps, t_cap[0], 1e-12 * t_cap[0])
        }
        2 => {
            let outer = |t1: f64| -> f64 {
                let f = |t2: f64| indicator(&[t1, t2]);
                if f(eps) >= 0.0 {
                    return 0.0;
                }
                bisect_increasing(&f, eps, t_cap[1], 1e-11 * t_cap[1])
            };
            adaptive_simpson(&outer, eps, t_cap[0], 1e-8 * t_cap[0] * t_cap[1])?.value
        }
        3 => {
            let outer = |t1: f64| -> f64 {
                let mid = |t2: f64| -> f64 {
                    let f = |t3: f64| indicator(&[t1, t2, t3]);
                    if f(eps) >= 0.0 {
                        return 0.0;
                    }
                    bisect_increasing(&f, eps, t_cap[2], 1e-10 * t_cap[2])
                };
                adaptive_simpson(&mid, eps, t_cap[1], 1e-9 * t_cap[1] * t_cap[2])
                    .map(|q| q.value)
                    .unwrap_or(0.0)
            };
            adaptive_simpson(&outer, eps, t_cap[0], 1e-7 * t_cap[0] * t_cap[1] * t_cap[2])?.value
        }
        _ => {
            return Err(Error::Precondition(
                "body volumes cover dimensions 1..=3".into(),
            ))
        }
    };
    let volume = std::f64::consts::PI.powi(n as i32) * volume_t;
    if !(volume > 0.0) {
        return Err(Error::QuadratureFailure("body volume came out nonpositive".into()));
    }
    let exact = exact_kernel_at_center(domain);
    let bound = 1.0 / volume;
    Ok(ChebyshevBodyReport {
        volume,
        radii_caps: caps,
        bergman_bound: bound,
        exact_kernel: exact,
        gap: exact.map(|k| k - bound),
    })
}

/// Both computable ends of the volume chain: the minimal squared norm of a
/// center-normalized holomorphic function (monomial orthogonality makes it
/// the domain volume) and the final body volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub minimal_extension_norm: f64,
    pub final_body_volume: f64,
    /// `final - minimal`; nonnegative, zero in the rotation-invariant sharp
    /// case.
    pub slack: f64,
}

pub fn chain_report(domain: &ReinhardtDomain, beta: &WeightMatrix) -> Result<ChainReport> {
    let body = chebyshev_body(domain, beta)?;
    let minimal = domain_volume(domain)?;
    Ok(ChainReport {
        minimal_extension_norm: minimal,
        final_body_volume: body.volume,
        slack: body.volume - minimal,
    })
}

/// Euclidean volume of the domain itself by the same radial quadrature.
pub fn domain_volume(domain: &ReinhardtDomain) -> Result<f64> {
    let n = domain.dimension();
    let caps = domain.radius_caps()?;
    let member = |t: &[f64]| -> f64 {
        // signed indicator: max constraint violation in the log-image
        let y: Vec<f64> = t.iter().map(|&x| x.max(1e-280).ln()).collect();
        match domain {
            ReinhardtDomain::Polydisc { radii } => y
                .iter()
                .zip(radii)
                .map(|(&yy, &r)| yy - (r * r).ln())
                .fold(f64::NEG_INFINITY, f64::max),
            ReinhardtDomain::Ball { radius, .. } => {
                let s: f64 = t.iter().sum();
                s - radius * radius
            }
            ReinhardtDomain::LogHalfspaces { halfspaces, .. } => halfspaces
                .iter()
                .map(|h| h.normal.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - h.offset)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    };
    let eps = 1e-12;
    let t_cap: Vec<f64> = caps.iter().map(|&c| c * c * 2.0).collect();
    let vol_t = match n {
        1 => bisect_increasing(&|t| member(&[t]), eps, t_cap[0], 1e-12 * t_cap[0]),
        2 => {
            let outer = |t1: f64| -> f64 {
                let f = |t2: f64| member(&[t1, t2]);
                if f(eps) >= 0.0 {
                    return 0.0;
                }
                bisect_increasing(&f, eps, t_cap[1], 1e-11 * t_cap[1])
            };
            adaptive_simpson(&outer, eps, t_cap[0], 1e-8 * t_cap[0] * t_cap[1])?.value
        }
        3 => {
            let outer = |t1: f64| -> f64 {
                let mid = |t2: f64| -> f64 {
                    let f = |t3: f64| member(&[t1, t2, t3]);
                    if f(eps) >= 0.0 {
                        return 0.0;
                    }
                    bisect_increasing(&f, eps, t_cap[2], 1e-10 * t_cap[2])
                };
                adaptive_simpson(&mid, eps, t_cap[1], 1e-9 * t_cap[1] * t_cap[2])
                    .map(|q| q.value)
                    .unwrap_or(0.0)
            };
            adaptive_simpson(&outer, eps, t_cap[0], 1e-7 * t_cap[0] * t_cap[1] * t_cap[2])?.value
        }
        _ => return Err(Error::Precondition("volumes cover dimensions 1..=3".into())),
    };
    Ok(std::f64::consts::PI.powi(n as i32) * vol_t)
}
