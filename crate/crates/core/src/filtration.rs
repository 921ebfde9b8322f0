//! The finite-dimensional calculus of decreasing Hermitian norm families
//! `H(t)`: dual norms, jumping numbers and the filtration they cut out,
//! quotient-norm monotonicity, flat reduction, jet norms, and the
//! extension estimate verifier.
//!
//! `H(t)` is the inner-product matrix of the `t`-norm in a fixed working
//! basis: `|x|_t^2 = x^H H(t) x`. Families decrease (`H(t) <= H(0)`) and
//! the dual norms `u^H H(t)^{-1} u` grow with rates that cluster into
//! finitely many jumping numbers.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Condition-number guard for positive-definite solves.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative agreement required between the two slope windows.
pub const SLOPE_TOL: f64 = 1e-3;

/// Default outer time horizon for asymptotics (windows at T/2, T, 2T).
pub const DEFAULT_HORIZON: f64 = 60.0;

/// Anything that can produce `H(t)`.
pub trait GramEval: Send + Sync {
    fn dimension(&self) -> usize;
    fn matrix_at(&self, t: f64) -> Result<CMat>;
}

/// A flat (simultaneously diagonalizable) family: a basis `F_j` in which
/// `|sum c_j F_j|_t^2 = sum |c_j|^2 e^{-lambda_j t}`.
///
/// Such a basis is automatically orthonormal for `H(0)`.
#[derive(Debug, Clone)]
pub struct DiagonalFamily {
    /// Columns are the flat basis vectors `F_j` in working coordinates.
    basis: CMat,
    basis_inv: CMat,
    lambda: Vec<f64>,
}

impl DiagonalFamily {
    pub fn new(basis: CMat, lambda: Vec<f64>) -> Result<Self> {
        let n = lambda.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::InvalidValue("basis must be square of the lambda length".into()));
        }
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("flat basis must be invertible".into()))?;
        Ok(DiagonalFamily { basis, basis_inv, lambda })
    }

    /// Standard-basis family with the given decay exponents.
    pub fn standard(lambda: Vec<f64>) -> Self {
        let n = lambda.len();
        DiagonalFamily::new(CMat::identity(n, n), lambda).expect("identity basis")
    }

    /// Real rotation of the plane spanned by coordinates `(i, j)`.
    pub fn rotated_2d(angle: f64, lambda: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        let basis = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                C64::new(-s, 0.0),
                C64::new(s, 0.0),
                C64::new(c, 0.0),
            ],
        );
        DiagonalFamily::new(basis, lambda.to_vec()).expect("rotation basis")
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// Flat-basis coefficients of a working-coordinates vector.
    pub fn coefficients(&self, x: &CVec) -> CVec {
        &self.basis_inv * x
    }
}

impl GramEval for DiagonalFamily {
    fn dimension(&self) -> usize {
        self.lambda.len()
    }

    // H(t) = S^{-H} diag(e^{-lambda t}) S^{-1}
    fn matrix_at(&self, t: f64) -> Result<CMat> {
        let n = self.lambda.len();
        let mut d = CMat::zeros(n, n);
        for j in 0..n {
            d[(j, j)] = C64::new((-self.lambda[j] * t).exp(), 0.0);
        }
        Ok(self.basis_inv.adjoint() * d * &self.basis_inv)
    }
}

/// A `t`-indexed family of Hermitian positive inner-product matrices.
#[derive(Clone)]
pub enum GramFamily {
    Diagonal(DiagonalFamily),
    Sampled { t_grid: Vec<f64>, matrices: Vec<CMat> },
    QuadratureBacked(Arc<dyn GramEval>),
}

impl GramFamily {
    pub fn dimension(&self) -> usize {
        match self {
            GramFamily::Diagonal(d) => d.dimension(),
            GramFamily::Sampled { matrices, .. } => matrices[0].nrows(),
            GramFamily::QuadratureBacked(e) => e.dimension(),
        }
    }

    pub fn matrix_at(&self, t: f64) -> Result<CMat> {
        match self {
            GramFamily::Diagonal(d) => d.matrix_at(t),
            GramFamily::Sampled { t_grid, matrices } => {
                let idx = t_grid
                    .iter()
                    .position(|&s| (s - t).abs() <= 1e-9 * (1.0 + t.abs()))
                    .ok_or_else(|| {
                        Error::Precondition(format!("t = {t} is not among the sampled times"))
                    })?;
                Ok(matrices[idx].clone())
            }
            GramFamily::QuadratureBacked(e) => e.matrix_at(t),
        }
    }

    pub fn as_diagonal(&self) -> Result<&DiagonalFamily> {
        match self {
            GramFamily::Diagonal(d) => Ok(d),
            _ => Err(Error::Precondition(
                "operation supports the simultaneously diagonalizable kind only".into(),
            )),
        }
    }

    /// Checks `H(t)` Hermitian positive definite and `H(t) <= H(0)` on the
    /// given sample times.
    pub fn validate_on(&self, ts: &[f64]) -> Result<()> {
        let h0 = self.matrix_at(0.0).or_else(|_| self.matrix_at(ts[0]))?;
        validate_samples(self, &h0, ts)
    }
}

fn validate_samples(fam: &GramFamily, h0: &CMat, ts: &[f64]) -> Result<()> {
    for &t in ts {
        let h = fam.matrix_at(t)?;
        let herm_defect = (&h - h.adjoint()).norm();
        if herm_defect > 1e-10 * (1.0 + h.norm()) {
            return Err(Error::InvalidValue(format!("H({t}) is not Hermitian")));
        }
        let eig = hermitian_eigenvalues(&h);
        if eig.iter().any(|&e| e <= 0.0) {
            return Err(Error::InvalidValue(format!("H({t}) is not positive definite")));
        }
        if t > 0.0 {
            let diff = h0 - &h;
            let eig = hermitian_eigenvalues(&diff);
            let scale = h0.norm();
            if eig.iter().any(|&e| e < -1e-9 * scale) {
                return Err(Error::InvalidValue(format!(
                    "H({t}) exceeds H(0) in the positive-semidefinite order"
                )));
            }
        }
    }
    Ok(())
}

fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let sym = m.clone().hermitian_part();
    let eig = sym.symmetric_eigenvalues();
    eig.iter().copied().collect()
}

fn cholesky(h: &CMat) -> Result<nalgebra::Cholesky<C64, nalgebra::Dyn>> {
    let eig = hermitian_eigenvalues(h);
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 || max / min > CONDITION_LIMIT {
        return Err(Error::IllConditioned(if min > 0.0 { max / min } else { f64::INFINITY }));
    }
    nalgebra::Cholesky::new(h.clone().hermitian_part())
        .ok_or_else(|| Error::IllConditioned(max / min))
}

/// Primal squared norm `x^H H(t) x`. For the flat kind the coefficient
/// form `sum |c_j|^2 e^{-lambda_j t}` is used: assembling `H(t)` at large
/// `t` would drown the fast components in the rounding noise of the slow
/// ones.
pub fn primal_norm_sq(fam: &GramFamily, x: &CVec, t: f64) -> Result<f64> {
    if let GramFamily::Diagonal(d) = fam {
        let c = d.coefficients(x);
        return Ok(c
            .iter()
            .zip(&d.lambda)
            .map(|(ci, &l)| ci.norm_sqr() * (-l * t).exp())
            .sum());
    }
    let h = fam.matrix_at(t)?;
    Ok((x.adjoint() * &h * x)[(0, 0)].re)
}

/// Dual squared norm `u^H H(t)^{-1} u` via a positive-definite solve; no
/// inverse is formed.
pub fn dual_norm_sq(fam: &GramFamily, u: &CVec, t: f64) -> Result<f64> {
    let h = fam.matrix_at(t)?;
    let chol = cholesky(&h)?;
    let solved = chol.solve(u);
    Ok((u.adjoint() * solved)[(0, 0)].re)
}

/// One jumping number with its multiplicity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Jump {
    pub alpha: f64,
    pub multiplicity: usize,
    pub converged: bool,
    pub window_gap: f64,
}

/// The asymptotic spectrum of a family: jumping numbers, the nested dual
/// subspaces `V_alpha`, and primal bases of the associated subspaces
/// `S_alpha` (vectors decaying strictly faster than `alpha`).
#[derive(Debug, Clone)]
pub struct JumpingSpectrum {
    pub jumps: Vec<Jump>,
    /// `dual_bases[i]`: columns spanning `V_{alpha_i}`, nested along the jumps.
    pub dual_bases: Vec<CMat>,
    /// `primal_complements[i]`: columns spanning `S_{alpha_i}`.
    pub primal_complements: Vec<CMat>,
}

impl JumpingSpectrum {
    pub fn alphas(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.alpha).collect()
    }

    /// Basis of `S_alpha` for a given level (columns; may be empty).
    pub fn s_alpha_basis(&self, alpha: f64) -> CMat {
        // S_alpha is constant between jumps: take the largest jump <= alpha
        let mut chosen: Option<usize> = None;
        for (i, j) in self.jumps.iter().enumerate() {
            if j.alpha <= alpha + 1e-12 {
                chosen = Some(i);
            }
        }
        match chosen {
            Some(i) => self.primal_complements[i].clone(),
            None => {
                // below the first jump everything decays faster than alpha
                let n = self.dual_bases.last().map_or(0, |m| m.nrows());
                let all = self.primal_complements.first().map_or(CMat::zeros(n, 0), |m| m.clone());
                let _ = all;
                // full space: columns of the identity
                CMat::identity(n, n)
            }
        }
    }
}

/// Eigenvalue curves of the pencil `H(t) x = mu H(0) x` turned into decay
/// slopes over the windows `[T/2, T]` and `[T, 2T]`.
///
/// For families whose matrices mix scales (a non-diagonal `H(t)`), the
/// fastest eigenvalues drown in assembly rounding once
/// `(rate spread) * 2T` passes the float mantissa; the horizon is halved
/// until every eigenvalue sits above that noise floor. Exactly diagonal
/// matrices carry no mixing noise and keep the requested horizon.
pub fn jumping_spectrum(fam: &GramFamily, horizon: f64) -> Result<JumpingSpectrum> {
    let h0 = fam.matrix_at(0.0)?;
    let l0 = cholesky(&h0)?;
    let n = fam.dimension();
    let whitened = |t: f64| -> Result<CMat> {
        // W(t) = L^{-1} H(t) L^{-H}, same eigenvalues as the pencil
        let h = fam.matrix_at(t)?;
        let mut w = h;
        // solve L X = H
        w = l0.l().solve_lower_triangular(&w).ok_or_else(|| {
            Error::IllConditioned(f64::INFINITY)
        })?;
        let mut wt = w.adjoint();
        wt = l0.l().solve_lower_triangular(&wt).ok_or_else(|| {
            Error::IllConditioned(f64::INFINITY)
        })?;
        Ok(wt.adjoint().hermitian_part())
    };
    let is_diagonal_matrix = |m: &CMat| -> bool {
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0))
    };
    let mut horizon = horizon;
    let mut logs: Vec<Vec<f64>>;
    loop {
        let times = [0.5 * horizon, horizon, 2.0 * horizon];
        logs = Vec::new();
        let mut trustworthy = true;
        for &t in &times {
            let raw = fam.matrix_at(t)?;
            let exact_diagonal = is_diagonal_matrix(&raw) && is_diagonal_matrix(&h0);
            let w = whitened(t)?;
            let eig = nalgebra::SymmetricEigen::new(w);
            let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            let noise_floor = if exact_diagonal { 0.0 } else { 1e-13 * max.abs() };
            let mut ls = Vec::with_capacity(n);
            for &mu in eig.eigenvalues.iter() {
                if mu <= noise_floor {
                    trustworthy = false;
                }
                ls.push(if mu > 0.0 { mu.ln() } else { f64::NEG_INFINITY });
            }
            ls.sort_by(|a, b| a.partial_cmp(b).unwrap());
            logs.push(ls);
        }
        if trustworthy && logs.iter().flatten().all(|l| l.is_finite()) {
            break;
        }
        horizon *= 0.5;
        if horizon < 2.0 {
            return Err(Error::Precondition(
                "eigenvalues stay below the rounding floor at every usable horizon".into(),
            ));
        }
    }
    let times = [0.5 * horizon, horizon, 2.0 * horizon];
    // sorted mu ascending = decay rate descending
    let mut slopes: Vec<(f64, f64)> = Vec::with_capacity(n);
    for j in 0..n {
        let s1 = -(logs[1][j] - logs[0][j]) / (times[1] - times[0]);
        let s2 = -(logs[2][j] - logs[1][j]) / (times[2] - times[1]);
        slopes.push((s2, (s2 - s1).abs()));
    }
    slopes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // cluster into jumps
    let cluster_tol = 10.0 * SLOPE_TOL;
    let mut jumps: Vec<Jump> = Vec::new();
    for (s, gap) in &slopes {
        let converged = *gap < SLOPE_TOL * s.abs().max(1.0);
        match jumps.last_mut() {
            Some(j) if (s - j.alpha).abs() < cluster_tol * (1.0 + j.alpha.abs()) => {
                j.multiplicity += 1;
                j.window_gap = j.window_gap.max(*gap);
                j.converged &= converged;
            }
            _ => jumps.push(Jump {
                alpha: *s,
                multiplicity: 1,
                converged,
                window_gap: *gap,
            }),
        }
    }
    // eigenvectors at the largest time classify directions by decay rate
    let w = whitened(2.0 * horizon)?;
    let eig = nalgebra::SymmetricEigen::new(w);
    let mut pairs: Vec<(f64, CVec)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let rate = -mu.ln() / (2.0 * horizon);
            (rate, eig.eigenvectors.column(i).into_owned())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // back to working coordinates: primal x = L^{-H} w, dual u = H(0) x
    let lt = l0.l().adjoint();
    let primal: Vec<CVec> = pairs
        .iter()
        .map(|(_, w)| {
            lt.solve_upper_triangular(w)
                .expect("Cholesky factor is invertible")
        })
        .collect();
    let rates: Vec<f64> = pairs.iter().map(|(r, _)| *r).collect();
    let mut dual_bases = Vec::with_capacity(jumps.len());
    let mut primal_complements = Vec::with_capacity(jumps.len());
    for j in &jumps {
        let slow: Vec<usize> = (0..n)
            .filter(|&i| rates[i] <= j.alpha + cluster_tol * (1.0 + j.alpha.abs()))
            .collect();
        let fast: Vec<usize> = (0..n).filter(|i| !slow.contains(i)).collect();
        let mut v = CMat::zeros(n, slow.len());
        for (c, &i) in slow.iter().enumerate() {
            v.set_column(c, &(&h0 * &primal[i]));
        }
        let mut s = CMat::zeros(n, fast.len());
        for (c, &i) in fast.iter().enumerate() {
            s.set_column(c, &primal[i]);
        }
        dual_bases.push(v);
        primal_complements.push(s);
    }
    Ok(JumpingSpectrum { jumps, dual_bases, primal_complements })
}

/// Exact spectrum of a flat family, bypassing asymptotics.
pub fn diagonal_spectrum(fam: &DiagonalFamily) -> JumpingSpectrum {
    let n = fam.dimension();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fam.lambda[a].partial_cmp(&fam.lambda[b]).unwrap());
    let mut jumps: Vec<Jump> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match (jumps.last_mut(), groups.last_mut()) {
            (Some(j), Some(g)) if (fam.lambda[i] - j.alpha).abs() < 1e-12 => {
                j.multiplicity += 1;
                g.push(i);
            }
            _ => {
                jumps.push(Jump {
                    alpha: fam.lambda[i],
                    multiplicity: 1,
                    converged: true,
                    window_gap: 0.0,
                });
                groups.push(vec![i]);
            }
        }
    }
    let h0 = fam.matrix_at(0.0).expect("diagonal family evaluates everywhere");
    let mut dual_bases = Vec::new();
    let mut primal_complements = Vec::new();
    for (gi, jump) in jumps.iter().enumerate() {
        let _ = jump;
        let slow: Vec<usize> = groups[..=gi].iter().flatten().copied().collect();
        let fast: Vec<usize> = groups[gi + 1..].iter().flatten().copied().collect();
        let mut v = CMat::zeros(n, slow.len());
        for (c, &i) in slow.iter().enumerate() {
            v.set_column(c, &(&h0 * fam.basis.column(i)));
        }
        let mut s = CMat::zeros(n, fast.len());
        for (c, &i) in fast.iter().enumerate() {
            s.set_column(c, &fam.basis.column(i));
        }
        dual_bases.push(v);
        primal_complements.push(s);
    }
    JumpingSpectrum { jumps, dual_bases, primal_complements }
}

/// `e^{alpha t} |[F]|_t^2` where `[F]` is the class of `F` modulo the span
/// of `basis`; the minimum is computed by solving the `H(t)`-normal
/// equations on the complement (no pseudo-inverse).
pub fn quotient_norm_sq(fam: &GramFamily, f: &CVec, basis: &CMat, t: f64) -> Result<f64> {
    let h = fam.matrix_at(t)?;
    if basis.ncols() == 0 {
        return Ok((f.adjoint() * &h * f)[(0, 0)].re);
    }
    let bh = basis.adjoint() * &h;
    let gram = &bh * basis;
    let rhs = -(&bh * f);
    let chol = nalgebra::Cholesky::new(gram.hermitian_part())
        .ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
    let c = chol.solve(&rhs);
    let best = f + basis * c;
    Ok((best.adjoint() * &h * best)[(0, 0)].re)
}

/// Trace of `e^{alpha t} |[F]|_t^2` over sample times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientTrace {
    pub alpha: f64,
    pub samples: Vec<(f64, f64)>,
    /// Set when `S_alpha` is the whole space (the quotient collapses).
    pub degenerate: bool,
}

impl QuotientTrace {
    /// Largest relative drop between consecutive samples (0 when the trace
    /// is nondecreasing).
    pub fn worst_relative_drop(&self) -> f64 {
        let mut worst = 0.0_f64;
        for w in self.samples.windows(2) {
            let (prev, next) = (w[0].1, w[1].1);
            if next < prev {
                worst = worst.max((prev - next) / prev.abs().max(f64::MIN_POSITIVE));
            }
        }
        worst
    }
}

pub fn quotient_trace(
    fam: &GramFamily,
    spectrum: &JumpingSpectrum,
    f: &CVec,
    alpha: f64,
    t_samples: &[f64],
) -> Result<QuotientTrace> {
    let basis = spectrum.s_alpha_basis(alpha);
    // degenerate outside the open jump interval: below the first jump the
    // quotient collapses to zero, above the last one nothing is quotiented
    // and the rescaled trace diverges
    let degenerate = basis.ncols() == fam.dimension() || basis.ncols() == 0;
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let q = match fam {
            // flat kind: the quotient drops exactly the coefficients of
            // decay faster than alpha
            GramFamily::Diagonal(d) => {
                let c = d.coefficients(f);
                c.iter()
                    .zip(&d.lambda)
                    .filter(|(_, &l)| l <= alpha + 1e-12)
                    .map(|(ci, &l)| ci.norm_sqr() * (-l * t).exp())
                    .sum()
            }
            _ => quotient_norm_sq(fam, f, &basis, t)?,
        };
        let value = if alpha * t > 500.0 {
            // log-domain guard against overflow of the bare exponential
            (alpha * t + q.max(f64::MIN_POSITIVE).ln()).exp()
        } else {
            (alpha * t).exp() * q
        };
        samples.push((t, value));
    }
    Ok(QuotientTrace { alpha, samples, degenerate })
}

/// Tri-state membership in `S_alpha` decided from the decay slope of
/// `|F|_t^2`; the boundary band is reported, not guessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    In,
    Out,
    /// Decay within `SLOPE_TOL` of `alpha`: numerically undecidable.
    Boundary,
}

pub fn s_alpha_membership(fam: &GramFamily, f: &CVec, alpha: f64, horizon: f64) -> Result<Membership> {
    let decay = match fam {
        // flat kind: the slope is the smallest exponent on the coefficient
        // support; coefficients at reconstruction-noise level (1e-12 of the
        // largest) are treated as zero, otherwise their phantom slow decay
        // would dominate every asymptotic
        GramFamily::Diagonal(d) => {
            let c = d.coefficients(f);
            let top = c.iter().map(|x| x.norm()).fold(0.0_f64, f64::max);
            if top == 0.0 {
                return Ok(Membership::In); // zero belongs to every S_alpha
            }
            c.iter()
                .zip(&d.lambda)
                .filter(|(ci, _)| ci.norm() > 1e-12 * top)
                .map(|(_, &l)| l)
                .fold(f64::INFINITY, f64::min)
        }
        _ => {
            let norm0 = primal_norm_sq(fam, f, 0.0)?;
            if norm0 <= 0.0 {
                return Ok(Membership::In);
            }
            let half = primal_norm_sq(fam, f, 0.5 * horizon)?;
            let full = primal_norm_sq(fam, f, horizon)?;
            if half <= 0.0 || full <= 0.0 {
                return Err(Error::Precondition("norms underflowed at the horizon".into()));
            }
            -(full.ln() - half.ln()) / (0.5 * horizon)
        }
    };
    if decay > alpha + SLOPE_TOL {
        Ok(Membership::In)
    } else if decay < alpha - SLOPE_TOL {
        Ok(Membership::Out)
    } else {
        Ok(Membership::Boundary)
    }
}

/// Recovered flat data: exponents and the basis realizing them.
#[derive(Debug, Clone)]
pub struct FlatReduction {
    pub lambda: Vec<f64>,
    /// Columns are the recovered basis vectors, `H(0)`-orthonormal.
    pub basis: CMat,
}

/// Recovers `(lambda_j, F_j)` of a flat family from `H(t)` evaluations
/// alone: eigenvalues of the whitened matrix at `t = 1` give
/// `e^{-lambda_j}`, cross-checked at `t = 2`.
pub fn flat_reduction(fam: &GramFamily) -> Result<FlatReduction> {
    let diag = fam.as_diagonal()?; // kind gate: general flat reduction is out of scope
    let _ = diag;
    let h0 = fam.matrix_at(0.0)?;
    let l0 = cholesky(&h0)?;
    let whiten = |t: f64| -> Result<nalgebra::SymmetricEigen<C64, nalgebra::Dyn>> {
        let h = fam.matrix_at(t)?;
        let mut w = l0.l().solve_lower_triangular(&h).unwrap();
        w = l0
            .l()
            .solve_lower_triangular(&w.adjoint())
            .unwrap()
            .adjoint()
            .hermitian_part();
        Ok(nalgebra::SymmetricEigen::new(w))
    };
    let e1 = whiten(1.0)?;
    let e2 = whiten(2.0)?;
    let mut order: Vec<usize> = (0..fam.dimension()).collect();
    order.sort_by(|&a, &b| e1.eigenvalues[a].partial_cmp(&e1.eigenvalues[b]).unwrap());
    let mut lambda = Vec::with_capacity(order.len());
    let mut basis = CMat::zeros(fam.dimension(), fam.dimension());
    let mut sorted2: Vec<f64> = e2.eigenvalues.iter().copied().collect();
    sorted2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (c, &i) in order.iter().enumerate() {
        let l1 = -e1.eigenvalues[i].ln();
        let l2 = -0.5 * sorted2[c].ln();
        if (l1 - l2).abs() > 1e-6 * (1.0 + l1.abs()) {
            return Err(Error::SlopeNotConverged { estimate: l1, window_gap: (l1 - l2).abs() });
        }
        lambda.push(l1);
        let x = l0
            .l()
            .adjoint()
            .solve_upper_triangular(&e1.eigenvectors.column(i).into_owned())
            .unwrap();
        basis.set_column(c, &x);
    }
    // descending decay order: largest lambda decays fastest; report ascending
    lambda.reverse();
    let cols: Vec<CVec> = (0..basis.ncols()).rev().map(|c| basis.column(c).into_owned()).collect();
    for (c, col) in cols.iter().enumerate() {
        basis.set_column(c, col);
    }
    Ok(FlatReduction { lambda, basis })
}

/// Builds the operators `A_t`, `B_t`, `U_s` of the twisted dual norm and
/// returns the largest spread of their composed eigenvalues across the
/// phase samples; for a flat family the spread is pure rounding noise.
pub fn eigenvalue_invariance_check(
    fam: &GramFamily,
    t: f64,
    phase_samples: &[f64],
) -> Result<f64> {
    let diag = fam.as_diagonal()?;
    let n = diag.dimension();
    // dual Gram of the dual basis u_j = S^{-H} e_j at time zero is the
    // identity, so those coordinates are already orthonormal for |.|_{*0}
    let h = fam.matrix_at(t)?;
    let chol = cholesky(&h)?;
    let hinv = chol.solve(&CMat::identity(n, n));
    // A_t in u-coordinates: (u_i, H(t)^{-1} u_j) with u_j = S^{-H} e_j
    let a_t = (diag.basis.adjoint() * &hinv * &diag.basis).hermitian_part();
    let mut b_t = CMat::zeros(n, n);
    for j in 0..n {
        b_t[(j, j)] = C64::new((-t * diag.lambda[j] / 2.0).exp(), 0.0);
    }
    let mut eig_sets: Vec<Vec<f64>> = Vec::new();
    for &s in phase_samples {
        let mut u_s = CMat::zeros(n, n);
        for j in 0..n {
            let th = -s * diag.lambda[j] / 2.0;
            u_s[(j, j)] = C64::new(th.cos(), th.sin());
        }
        let u_inv = u_s.adjoint();
        let m = (&u_inv * &b_t * &a_t * &b_t * &u_s).hermitian_part();
        let mut eig: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eig_sets.push(eig);
    }
    let mut spread = 0.0_f64;
    for j in 0..n {
        let vals: Vec<f64> = eig_sets.iter().map(|e| e[j]).collect();
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        spread = spread.max(hi - lo);
    }
    Ok(spread)
}

/// Which inner product the jet decomposition is orthogonal in. The time-zero
/// inner product is the default; the parameter exists so the alternative can
/// be swapped without touching call sites.
#[derive(Debug, Clone)]
pub enum JetInnerProduct {
    AtZero,
    Custom(CMat),
}

/// Squared jet norm through level `k`: decompose
/// `F = F_1 + ... + F_k + R` with `F_j` in the previous filtration level
/// and orthogonal to the next, then sum `lim e^{alpha_j t} |F_j|_t^2`.
pub fn jet_norm_sq(
    fam: &GramFamily,
    f: &CVec,
    k: usize,
    ip: &JetInnerProduct,
) -> Result<f64> {
    let diag = fam.as_diagonal()?;
    let spectrum = diagonal_spectrum(diag);
    if k == 0 || k > spectrum.jumps.len() {
        return Err(Error::Precondition(format!(
            "jet level must lie in 1..={}",
            spectrum.jumps.len()
        )));
    }
    let gram = match ip {
        JetInnerProduct::AtZero => fam.matrix_at(0.0)?,
        JetInnerProduct::Custom(g) => g.clone(),
    };
    let n = diag.dimension();
    // filtration levels in primal form: level j holds vectors decaying
    // faster than alpha_j; level 0 is the whole space
    let mut levels: Vec<CMat> = vec![CMat::identity(n, n)];
    for i in 0..spectrum.jumps.len() {
        levels.push(spectrum.primal_complements[i].clone());
    }
    let mut total = 0.0;
    let mut remainder = f.clone();
    for j in 1..=k {
        // F_j: the component of the remainder in level j-1 orthogonal
        // (w.r.t. `gram`) to level j
        let prev = &levels[j - 1];
        let next = &levels[j];
        let piece = if next.ncols() == 0 {
            remainder.clone()
        } else {
            // project remainder onto next along gram, subtract
            let g_nn = (next.adjoint() * &gram * next).hermitian_part();
            let rhs = next.adjoint() * &gram * &remainder;
            let chol = nalgebra::Cholesky::new(g_nn)
                .ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
            let c = chol.solve(&rhs);
            &remainder - next * c
        };
        let _ = prev;
        // lim e^{alpha_j t} |F_j|_t^2 from flat coefficients
        let coeff = diag.coefficients(&piece);
        let alpha_j = spectrum.jumps[j - 1].alpha;
        let mut level_mass = 0.0;
        for (i, &l) in diag.lambda.iter().enumerate() {
            if (l - alpha_j).abs() < 1e-9 {
                level_mass += coeff[i].norm_sqr();
            }
        }
        total += level_mass;
        remainder -= piece;
    }
    Ok(total)
}

/// Extension estimate check: the minimal time-zero norm over the class
/// `F + S_alpha` against the asymptotic bound `liminf e^{alpha t} |F|_t^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// The bound is vacuous when the right side diverges.
    pub vacuous: bool,
}

pub fn extension_verify(
    fam: &GramFamily,
    spectrum: &JumpingSpectrum,
    f: &CVec,
    alpha: f64,
    horizon: f64,
) -> Result<ExtensionReport> {
    let basis = spectrum.s_alpha_basis(alpha);
    let lhs = quotient_norm_sq(fam, f, &basis, 0.0)?;
    // liminf estimate over the last window
    let window = [0.8 * horizon, 0.9 * horizon, horizon];
    let mut rhs = f64::INFINITY;
    let mut growing = true;
    let mut prev = None;
    for &t in &window {
        let v = (alpha * t).exp() * primal_norm_sq(fam, f, t)?;
        if let Some(p) = prev {
            growing &= v > p;
        }
        prev = Some(v);
        rhs = rhs.min(v);
    }
    let vacuous = !rhs.is_finite() || (growing && rhs > 1e12 * lhs.max(1.0));
    Ok(ExtensionReport { lhs, rhs, slack: rhs - lhs, vacuous })
}

pub fn cvec(values: &[f64]) -> CVec {
    CVec::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}

/// Wire form of a family: `{kind, N, data}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GramFamilyJson {
    Diagonal {
        #[serde(rename = "N")]
        n: usize,
        data: DiagonalData,
    },
    Sampled {
        #[serde(rename = "N")]
        n: usize,
        data: SampledData,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalData {
    pub lambda: Vec<f64>,
    /// Optional flat basis, columns flattened row-major as `[re, im]` pairs;
    /// identity when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledData {
    pub t_grid: Vec<f64>,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl GramFamilyJson {
    pub fn lift(&self) -> Result<GramFamily> {
        match self {
            GramFamilyJson::Diagonal { n, data } => {
                if data.lambda.len() != *n {
                    return Err(Error::InvalidValue("lambda length must equal N".into()));
                }
                let basis = match &data.basis {
                    None => CMat::identity(*n, *n),
                    Some(rows) => parse_matrix(rows, *n)?,
                };
                Ok(GramFamily::Diagonal(DiagonalFamily::new(basis, data.lambda.clone())?))
            }
            GramFamilyJson::Sampled { n, data } => {
                if data.t_grid.len() != data.matrices.len() || data.t_grid.is_empty() {
                    return Err(Error::InvalidValue("one matrix per sample time".into()));
                }
                let matrices = data
                    .matrices
                    .iter()
                    .map(|m| parse_matrix(m, *n))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GramFamily::Sampled { t_grid: data.t_grid.clone(), matrices })
            }
        }
    }
}

fn parse_matrix(rows: &[Vec<[f64; 2]>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidValue("matrix shape must be N x N".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag13() -> GramFamily {
        GramFamily::Diagonal(DiagonalFamily::standard(vec![1.0, 3.0]))
    }

    #[test]
    fn dual_norm_on_diagonal_families() {
        let fam = diag13();
        let e1 = cvec(&[1.0, 0.0]);
        let v = dual_norm_sq(&fam, &e1, 2.0).unwrap();
        assert!((v - 2.0_f64.exp()).abs() < 1e-10 * 2.0_f64.exp());
        // identity at t = 0
        let u = cvec(&[0.6, -0.8]);
        assert!((dual_norm_sq(&fam, &u, 0.0).unwrap() - 1.0).abs() < 1e-12);
        // e1 + e2 at t = 10: e^10 + e^30
        let s = cvec(&[1.0, 1.0]);
        let want = 10f64.exp() + 30f64.exp();
        let got = dual_norm_sq(&fam, &s, 10.0).unwrap();
        assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn spectrum_of_diagonal_family() {
        let spec = jumping_spectrum(&diag13(), DEFAULT_HORIZON).unwrap();
        assert_eq!(spec.alphas().len(), 2);
        assert!((spec.alphas()[0] - 1.0).abs() < 1e-9);
        assert!((spec.alphas()[1] - 3.0).abs() < 1e-9);
        assert!(spec.jumps.iter().all(|j| j.converged));
        // V_{alpha_1} is one-dimensional and spanned by the first dual vector
        assert_eq!(spec.dual_bases[0].ncols(), 1);
        let v = spec.dual_bases[0].column(0);
        assert!(v[1].norm() < 1e-9 * v[0].norm());
    }

    #[test]
    fn spectrum_with_multiplicities() {
        let fam = GramFamily::Diagonal(DiagonalFamily::standard(vec![0.0, 2.0, 2.0]));
        let spec = jumping_spectrum(&fam, DEFAULT_HORIZON).unwrap();
        assert_eq!(spec.alphas().len(), 2);
        assert_eq!(spec.jumps[0].multiplicity, 1);
        assert_eq!(spec.jumps[1].multiplicity, 2);
    }

    #[test]
    fn scalar_family_has_a_single_jump() {
        let fam = GramFamily::Diagonal(DiagonalFamily::standard(vec![1.0]));
        let spec = jumping_spectrum(&fam, DEFAULT_HORIZON).unwrap();
        assert_eq!(spec.alphas(), vec![1.0]);
    }

    #[test]
    fn quotient_trace_is_constant_on_flat_families() {
        let fam = diag13();
        let spec = diagonal_spectrum(fam.as_diagonal().unwrap());
        let ts: Vec<f64> = (0..20).map(|i| i as f64).collect();
        // F = e1, alpha = 1: e^t * e^{-t} = |e1|_0^2
        let tr = quotient_trace(&fam, &spec, &cvec(&[1.0, 0.0]), 1.0, &ts).unwrap();
        for (_, v) in &tr.samples {
            assert!((v - 1.0).abs() < 1e-9);
        }
        assert!(tr.worst_relative_drop() < 1e-12);
        // mixed F: the fast component is projected away by the quotient
        let tr = quotient_trace(&fam, &spec, &cvec(&[1.0, 1.0]), 1.0, &ts).unwrap();
        for (_, v) in &tr.samples {
            assert!((v - 1.0).abs() < 1e-9);
        }
        // F inside S_alpha: the quotient vanishes identically
        let tr = quotient_trace(&fam, &spec, &cvec(&[0.0, 1.0]), 1.0, &ts).unwrap();
        for (_, v) in &tr.samples {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn membership_three_ways_on_diagonal_families() {
        let fam = diag13();
        let e2 = cvec(&[0.0, 1.0]);
        assert_eq!(s_alpha_membership(&fam, &e2, 2.0, 60.0).unwrap(), Membership::In);
        assert_eq!(s_alpha_membership(&fam, &e2, 3.0, 60.0).unwrap(), Membership::Boundary);
        assert_eq!(s_alpha_membership(&fam, &cvec(&[1.0, 1.0]), 2.0, 60.0).unwrap(), Membership::Out);
        assert_eq!(s_alpha_membership(&fam, &cvec(&[0.0, 0.0]), 99.0, 60.0).unwrap(), Membership::In);
    }

    #[test]
    fn flat_reduction_recovers_rotated_family() {
        let fam = GramFamily::Diagonal(DiagonalFamily::rotated_2d(
            30f64.to_radians(),
            [1.0, 3.0],
        ));
        let red = flat_reduction(&fam).unwrap();
        assert!((red.lambda[0] - 1.0).abs() < 1e-8);
        assert!((red.lambda[1] - 3.0).abs() < 1e-8);
        // recovered vectors match the construction up to phase
        let truth = fam.as_diagonal().unwrap().basis();
        for j in 0..2 {
            let got = red.basis.column(j);
            let want = truth.column(j);
            let overlap = (want.adjoint() * got)[(0, 0)].norm();
            assert!((overlap - 1.0).abs() < 1e-8, "column {j}: overlap {overlap}");
        }
    }

    #[test]
    fn flat_reduction_accepts_repeated_exponents_as_subspaces() {
        let fam = GramFamily::Diagonal(DiagonalFamily::standard(vec![2.0, 2.0]));
        let red = flat_reduction(&fam).unwrap();
        assert!((red.lambda[0] - 2.0).abs() < 1e-8 && (red.lambda[1] - 2.0).abs() < 1e-8);
        // any orthonormal basis of the eigenspace is acceptable
        let b = &red.basis;
        let gram = (b.adjoint() * b).hermitian_part();
        assert!((gram - CMat::identity(2, 2)).norm() < 1e-8);
    }

    #[test]
    fn invariance_of_twisted_eigenvalues() {
        let fam = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.4, [1.0, 3.0]));
        let spread =
            eigenvalue_invariance_check(&fam, 2.0, &[0.0, 0.7, std::f64::consts::PI]).unwrap();
        assert!(spread < 1e-10, "spread {spread}");
        let single = GramFamily::Diagonal(DiagonalFamily::standard(vec![1.7]));
        assert_eq!(eigenvalue_invariance_check(&single, 3.0, &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn jet_norm_sums_the_level_masses() {
        let fam = diag13();
        let f = cvec(&[1.0, 1.0]);
        // level 1 only: the slow component
        let j1 = jet_norm_sq(&fam, &f, 1, &JetInnerProduct::AtZero).unwrap();
        assert!((j1 - 1.0).abs() < 1e-10);
        // both levels: everything
        let j2 = jet_norm_sq(&fam, &f, 2, &JetInnerProduct::AtZero).unwrap();
        assert!((j2 - 2.0).abs() < 1e-10);
        // deepest piece alone
        let jf = jet_norm_sq(&fam, &cvec(&[0.0, 2.0]), 2, &JetInnerProduct::AtZero).unwrap();
        assert!((jf - 4.0).abs() < 1e-10);
        // rotated base gives the same numbers (basis-free quantity)
        let rot = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.3, [1.0, 3.0]));
        let frot = {
            let b = rot.as_diagonal().unwrap().basis();
            // same abstract vector: F_1 + F_2 in the rotated family
            let mut v = CVec::zeros(2);
            v += b.column(0);
            v += b.column(1);
            v
        };
        let jr = jet_norm_sq(&rot, &frot, 2, &JetInnerProduct::AtZero).unwrap();
        assert!((jr - 2.0).abs() < 1e-10);
    }

    #[test]
    fn extension_slack_vanishes_at_the_first_jump_of_a_flat_family() {
        let fam = GramFamily::Diagonal(DiagonalFamily::rotated_2d(0.25, [1.0, 2.5]));
        let spec = diagonal_spectrum(fam.as_diagonal().unwrap());
        let b = fam.as_diagonal().unwrap().basis();
        let f = CVec::from_fn(2, |i, _| b[(i, 0)] + b[(i, 1)]);
        let report = extension_verify(&fam, &spec, &f, 1.0, 60.0).unwrap();
        assert!(!report.vacuous);
        assert!(report.slack.abs() < 1e-6, "slack {}", report.slack);
        assert!((report.lhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extension_reports_vacuous_when_alpha_exceeds_all_decay() {
        let fam = diag13();
        let spec = diagonal_spectrum(fam.as_diagonal().unwrap());
        let report = extension_verify(&fam, &spec, &cvec(&[1.0, 0.0]), 5.0, 60.0).unwrap();
        assert!(report.vacuous);
    }

    #[test]
    fn validation_rejects_growing_families() {
        let grow = DiagonalFamily::standard(vec![-0.5]);
        let fam = GramFamily::Diagonal(grow);
        assert!(fam.validate_on(&[0.0, 1.0, 2.0]).is_err());
        assert!(diag13().validate_on(&[0.0, 1.0, 5.0]).is_ok());
    }

    #[test]
    fn ill_conditioned_guard_fires() {
        let fam = GramFamily::Diagonal(DiagonalFamily::standard(vec![0.0, 30.0]));
        let err = dual_norm_sq(&fam, &cvec(&[1.0, 1.0]), 1.5).unwrap_err();
        match err {
            Error::IllConditioned(c) => assert!(c > CONDITION_LIMIT),
            other => panic!("unexpected error {other}"),
        }
    }
}
