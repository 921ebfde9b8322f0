//! Convex bodies accumulated from rescaled valuation vectors, and the
//! interior-point / jet / successive-minima positivity criteria evaluated
//! on them.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::body::{rat_from_f64, rat_from_int, rat_to_f64, ConvexBody, Rat};
use crate::error::{Error, Result};
use crate::valuations::Exponent;

/// One valuation vector observed at tensor power `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationSample {
    pub k: u32,
    pub exponent: Exponent,
}

impl ValuationSample {
    pub fn new(k: u32, exponent: Exponent) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidValue("tensor power must be at least 1".into()));
        }
        Ok(ValuationSample { k, exponent })
    }
}

/// Where the samples came from (flag or weight description), for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BodySource {
    Flag(Vec<usize>),
    Weight(Vec<Vec<u64>>),
    Unspecified,
}

/// Hull of rescaled valuation vectors up to a stated truncation power.
#[derive(Debug, Clone)]
pub struct OkounkovBody {
    pub body: ConvexBody,
    pub k_max: u32,
    pub source: BodySource,
    /// Set when the hull is not full-dimensional (e.g. a single sample).
    pub degenerate: bool,
}

/// Convex hull of `{ exponent / k }` over all samples with `k <= k_max`.
/// The hull grows monotonically in `k_max` by construction.
pub fn accumulate_body(
    samples: &[ValuationSample],
    k_max: u32,
    source: BodySource,
) -> Result<OkounkovBody> {
    let used: Vec<&ValuationSample> = samples.iter().filter(|s| s.k <= k_max).collect();
    if used.is_empty() {
        return Err(Error::Precondition("no valuation samples at or below k_max".into()));
    }
    let arity = used[0].exponent.arity();
    if used.iter().any(|s| s.exponent.arity() != arity) {
        return Err(Error::Precondition("samples with mixed arity".into()));
    }
    let points: Vec<Vec<Rat>> = used
        .iter()
        .map(|s| {
            s.exponent
                .0
                .iter()
                .map(|&e| rat_from_int(e as i64) / rat_from_int(s.k as i64))
                .collect()
        })
        .collect();
    let body = ConvexBody::hull(arity, &points)?;
    let degenerate = !body.is_full_dimensional();
    Ok(OkounkovBody { body, k_max, source, degenerate })
}

/// Volume of the body against `top_intersection / n!`, all exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeReport {
    pub volume: f64,
    pub target: f64,
    /// `volume - target`, signed; zero when the identity holds exactly.
    pub gap: f64,
    pub exact: bool,
}

pub fn volume_identity_check(body: &OkounkovBody, top_intersection: f64) -> Result<VolumeReport> {
    if body.degenerate {
        return Err(Error::Precondition("volume of a degenerate body".into()));
    }
    let vol = body.body.volume()?;
    let mut fact = Rat::one();
    for k in 2..=body.body.dimension() {
        fact *= rat_from_int(k as i64);
    }
    let target = rat_from_f64(top_intersection)? / fact;
    let gap = &vol - &target;
    Ok(VolumeReport {
        volume: rat_to_f64(&vol),
        target: rat_to_f64(&target),
        gap: rat_to_f64(&gap),
        exact: gap.is_zero(),
    })
}

/// True iff the closed `margin`-ball around `point` lies strictly inside
/// the body. With `margin = 0` this still demands strict interiority,
/// decided exactly; boundary points certify `false`.
pub fn interior_certificate(body: &OkounkovBody, point: &[f64], margin: f64) -> Result<bool> {
    if margin < 0.0 {
        return Err(Error::Precondition("margin must be nonnegative".into()));
    }
    let p: Vec<Rat> = point.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>()?;
    let m = rat_from_f64(margin)?;
    Ok(body.body.contains_with_margin(&p, &m))
}

/// Default margin: `1e-6` of the body diameter.
pub fn default_margin(body: &OkounkovBody) -> f64 {
    1e-6 * body.body.diameter_f64()
}

/// True iff `(j+1, 1, ..., 1)` is interior for every `j <= k`.
pub fn jet_certificate(body: &OkounkovBody, k: u32, margin: f64) -> Result<bool> {
    let n = body.body.dimension();
    for j in 0..=k {
        let mut point = vec![1.0; n];
        point[0] = (j + 1) as f64;
        if !interior_certificate(body, &point, margin)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nondecreasing positive thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessiveMinima {
    eps: Vec<f64>,
}

impl SuccessiveMinima {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidValue("minima must be positive and finite".into()));
        }
        if eps.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidValue("minima must be nondecreasing".into()));
        }
        Ok(SuccessiveMinima { eps })
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }

    /// The simplex `{ a >= 0 : sum a_j / eps_j <= 1 }`.
    pub fn simplex(&self) -> Result<ConvexBody> {
        let sides: Vec<Rat> = self.eps.iter().map(|&e| rat_from_f64(e)).collect::<Result<_>>()?;
        ConvexBody::coordinate_simplex(&sides)
    }
}

/// Outcome of the reciprocal-sum jet criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub holds: bool,
    /// Exact value of `(k+1)/eps_1 + 1/eps_2 + ... + 1/eps_n`.
    pub reciprocal_sum: f64,
    pub simplex: ConvexBody,
}

/// Evaluates the strict inequality `(k+1)/eps_1 + 1/eps_2 + ... < 1`
/// exactly on the lifted rational minima.
pub fn criterion_e(minima: &SuccessiveMinima, k: u32) -> Result<CriterionOutcome> {
    let eps: Vec<Rat> = minima.eps.iter().map(|&e| rat_from_f64(e)).collect::<Result<_>>()?;
    let mut sum = rat_from_int(k as i64 + 1) / eps[0].clone();
    for e in &eps[1..] {
        sum += e.recip();
    }
    Ok(CriterionOutcome {
        holds: sum < Rat::one(),
        reciprocal_sum: rat_to_f64(&sum),
        simplex: minima.simplex()?,
    })
}
