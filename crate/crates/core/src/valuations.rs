//! Weighted monomial orders, valuation vectors, homogenization, and flag
//! valuations of sparse polynomials.
//!
//! Coefficients are exact complex rationals; `f64` inputs are lifted
//! losslessly (every float is a dyadic rational), so valuations are decided
//! combinatorially with no rounding anywhere.

use std::cmp::Ordering;

use num::complex::Complex;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::body::{rat_from_f64, rat_to_f64, Rat};
use crate::error::{Error, Result};

/// Exponent vector of a monomial, fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Exact complex rational coefficient.
pub type Coeff = Complex<Rat>;

pub fn coeff_from_f64(re: f64, im: f64) -> Result<Coeff> {
    Ok(Complex::new(rat_from_f64(re)?, rat_from_f64(im)?))
}

const MAX_WEIGHT_ARITY: usize = 6;

/// Square matrix of naturals with nonzero determinant; rows define a
/// lexicographic order on exponents through `T(a) = (row_1 . a, ...)`.
/// JSON form: the bare row-major array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct WeightMatrix {
    rows: Vec<Vec<u64>>,
    det: i128,
}

impl TryFrom<Vec<Vec<u64>>> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self> {
        WeightMatrix::new(rows)
    }
}

impl From<WeightMatrix> for Vec<Vec<u64>> {
    fn from(w: WeightMatrix) -> Self {
        w.rows
    }
}

impl WeightMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_WEIGHT_ARITY {
            return Err(Error::InvalidValue(format!(
                "weight matrices are supported up to arity {MAX_WEIGHT_ARITY}"
            )));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidValue("weight matrix must be square".into()));
        }
        if rows.iter().flatten().any(|&x| x > 10_000) {
            return Err(Error::InvalidValue(
                "weight entries above 10000 would risk overflow in the order".into(),
            ));
        }
        let det = int_det(&rows);
        if det == 0 {
            return Err(Error::InvalidValue("weight matrix must have nonzero determinant".into()));
        }
        Ok(WeightMatrix { rows, det })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        WeightMatrix::new(rows).expect("identity is a weight matrix")
    }

    /// Rows `(1,...,1), e_1, ..., e_{n-1}`: total degree first, then the
    /// leading coordinates.
    pub fn straightened_up(n: usize) -> Self {
        let mut rows: Vec<Vec<u64>> = vec![vec![1; n]];
        for i in 0..n - 1 {
            rows.push((0..n).map(|j| u64::from(i == j)).collect());
        }
        WeightMatrix::new(rows).expect("straightened-up weight")
    }

    pub fn arity(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    /// First row strictly positive.
    pub fn is_infinitesimal(&self) -> bool {
        self.rows[0].iter().all(|&x| x > 0)
    }

    /// `T(a)`, the weighted image defining the order.
    pub fn apply(&self, a: &Exponent) -> Vec<i128> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(&a.0).map(|(&w, &e)| w as i128 * e as i128).sum())
            .collect()
    }

    /// First-row weight `T_1(a)` alone.
    pub fn first_row_weight(&self, a: &Exponent) -> i128 {
        self.rows[0]
            .iter()
            .zip(&a.0)
            .map(|(&w, &e)| w as i128 * e as i128)
            .sum()
    }
}

fn int_det(rows: &[Vec<u64>]) -> i128 {
    // Bareiss fraction-free elimination over i128
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r][k] != 0);
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Lexicographic comparison of `T(a)` against `T(g)`. Because the matrix is
/// nonsingular, `Equal` forces `a = g`.
pub fn beta_compare(a: &Exponent, g: &Exponent, beta: &WeightMatrix) -> Result<Ordering> {
    if a.arity() != g.arity() || a.arity() != beta.arity() {
        return Err(Error::Precondition("arity mismatch in weighted comparison".into()));
    }
    Ok(beta.apply(a).cmp(&beta.apply(g)))
}

/// Sparse polynomial with exact complex rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    arity: usize,
    terms: Vec<(Coeff, Exponent)>,
}

impl SparsePolynomial {
    /// Builds from raw terms: duplicate exponents are combined and exact
    /// zeros dropped.
    pub fn new(arity: usize, raw: Vec<(Coeff, Exponent)>) -> Result<Self> {
        let mut terms: Vec<(Coeff, Exponent)> = Vec::new();
        for (c, e) in raw {
            if e.arity() != arity {
                return Err(Error::InvalidValue("exponent arity mismatch".into()));
            }
            match terms.iter_mut().find(|(_, f)| *f == e) {
                Some((acc, _)) => *acc = acc.clone() + c,
                None => terms.push((c, e)),
            }
        }
        terms.retain(|(c, _)| !c.is_zero());
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        Ok(SparsePolynomial { arity, terms })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(arity: usize, raw: &[(i64, &[u32])]) -> Result<Self> {
        let terms = raw
            .iter()
            .map(|(c, e)| {
                (
                    Complex::new(Rat::from_integer((*c).into()), Rat::zero()),
                    Exponent(e.to_vec()),
                )
            })
            .collect();
        SparsePolynomial::new(arity, terms)
    }

    pub fn monomial(arity: usize, coeff: Coeff, exponent: Exponent) -> Result<Self> {
        SparsePolynomial::new(arity, vec![(coeff, exponent)])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Coeff, Exponent)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &SparsePolynomial) -> Result<SparsePolynomial> {
        if self.arity != other.arity {
            return Err(Error::Precondition("arity mismatch in product".into()));
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                raw.push((c1.clone() * c2.clone(), e1.add(e2)));
            }
        }
        SparsePolynomial::new(self.arity, raw)
    }
}

/// Valuation vector of a nonzero polynomial: the order-minimal exponent of
/// its support, with its coefficient.
pub fn beta_valuation(
    f: &SparsePolynomial,
    beta: &WeightMatrix,
) -> Result<(Exponent, Coeff)> {
    if f.is_zero() {
        return Err(Error::Precondition("valuation of the zero polynomial".into()));
    }
    if f.arity() != beta.arity() {
        return Err(Error::Precondition("arity mismatch".into()));
    }
    let mut best: Option<(&Coeff, &Exponent)> = None;
    for (c, e) in f.terms() {
        best = match best {
            None => Some((c, e)),
            Some((bc, be)) => {
                if beta.apply(e) < beta.apply(be) {
                    Some((c, e))
                } else {
                    Some((bc, be))
                }
            }
        };
    }
    let (c, e) = best.expect("nonzero polynomial has terms");
    Ok((e.clone(), c.clone()))
}

/// Scale-and-limit homogenization with respect to one weight row: scaling
/// `z_k -> s^{row_k} z_k` and dividing by the leading power of `s` keeps
/// exactly the terms of minimal weighted order. Idempotent.
pub fn homogenize(f: &SparsePolynomial, row: &[u64]) -> Result<SparsePolynomial> {
    if f.is_zero() {
        return Err(Error::Precondition("homogenization of the zero polynomial".into()));
    }
    if row.len() != f.arity() {
        return Err(Error::Precondition("weight row arity mismatch".into()));
    }
    let order = |e: &Exponent| -> i128 {
        row.iter().zip(&e.0).map(|(&w, &d)| w as i128 * d as i128).sum()
    };
    let min_order = f.terms().iter().map(|(_, e)| order(e)).min().expect("nonzero");
    let kept = f
        .terms()
        .iter()
        .filter(|(_, e)| order(e) == min_order)
        .cloned()
        .collect();
    SparsePolynomial::new(f.arity(), kept)
}

/// Declares the flag `Y_j = { z_{order[0]} = ... = z_{order[j-1]} = 0 }` in
/// adapted coordinates, as a permutation of the variable indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagSpec {
    order: Vec<usize>,
}

impl FlagSpec {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidValue("flag must be a permutation of 0..n".into()));
            }
            seen[i] = true;
        }
        Ok(FlagSpec { order })
    }

    pub fn identity(n: usize) -> Self {
        FlagSpec { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Iterated vanishing orders along the flag: at step `j`, the minimal
/// degree in the flag variable is recorded, the polynomial divided by that
/// power, and the variable then set to zero. Additive on products.
pub fn flag_valuation(f: &SparsePolynomial, flag: &FlagSpec) -> Result<Exponent> {
    if f.is_zero() {
        return Err(Error::Precondition("valuation of the zero polynomial".into()));
    }
    if flag.order.len() != f.arity() {
        return Err(Error::Precondition("flag arity mismatch".into()));
    }
    let mut current: Vec<(Coeff, Exponent)> = f.terms().to_vec();
    let mut result = vec![0u32; f.arity()];
    for (step, &var) in flag.order.iter().enumerate() {
        let nu = current
            .iter()
            .map(|(_, e)| e.0[var])
            .min()
            .expect("stage polynomial is nonzero for nonzero input");
        result[step] = nu;
        // divide by z_var^nu, then restrict z_var = 0
        current.retain(|(_, e)| e.0[var] == nu);
        for (_, e) in &mut current {
            e.0[var] = 0;
        }
        debug_assert!(!current.is_empty());
    }
    Ok(Exponent(result))
}

/// JSON schema for polynomials: float coefficients, integer exponents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsePolynomialJson {
    pub arity: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub re: f64,
    pub im: f64,
    pub exp: Vec<u32>,
}

impl SparsePolynomialJson {
    pub fn lift(&self) -> Result<SparsePolynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((coeff_from_f64(t.re, t.im)?, Exponent(t.exp.clone()))))
            .collect::<Result<_>>()?;
        SparsePolynomial::new(self.arity, terms)
    }
}

impl From<&SparsePolynomial> for SparsePolynomialJson {
    fn from(p: &SparsePolynomial) -> Self {
        SparsePolynomialJson {
            arity: p.arity(),
            terms: p
                .terms()
                .iter()
                .map(|(c, e)| TermJson {
                    re: rat_to_f64(&c.re),
                    im: rat_to_f64(&c.im),
                    exp: e.0.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn exp(v: &[u32]) -> Exponent {
        Exponent(v.to_vec())
    }

    fn one() -> Coeff {
        Complex::new(Rat::one(), Rat::zero())
    }

    #[test]
    fn identity_weight_orders_lexicographically() {
        let beta = WeightMatrix::identity(2);
        assert_eq!(
            beta_compare(&exp(&[2, 1]), &exp(&[1, 3]), &beta).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            beta_compare(&exp(&[2, 1]), &exp(&[2, 1]), &beta).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn straightened_up_weight_compares_by_total_degree_first() {
        let beta = WeightMatrix::straightened_up(2); // T(a) = (a1+a2, a1)
        assert_eq!(
            beta_compare(&exp(&[2, 1]), &exp(&[1, 3]), &beta).unwrap(),
            Ordering::Less
        );
        assert!(beta.is_infinitesimal());
        assert!(!WeightMatrix::identity(2).is_infinitesimal());
    }

    #[test]
    fn singular_weight_rejected() {
        assert!(WeightMatrix::new(vec![vec![1, 1], vec![2, 2]]).is_err());
        assert!(WeightMatrix::new(vec![vec![1, 2], vec![0, 3]]).is_ok());
    }

    #[test]
    fn valuation_picks_the_order_minimal_exponent() {
        let f = SparsePolynomial::from_int_terms(2, &[(1, &[2, 1]), (1, &[1, 3])]).unwrap();
        let (nu, _) = beta_valuation(&f, &WeightMatrix::identity(2)).unwrap();
        assert_eq!(nu, exp(&[1, 3]));
        let (nu, _) = beta_valuation(&f, &WeightMatrix::straightened_up(2)).unwrap();
        assert_eq!(nu, exp(&[2, 1]));
        let m = SparsePolynomial::from_int_terms(2, &[(7, &[4, 5])]).unwrap();
        for beta in [WeightMatrix::identity(2), WeightMatrix::straightened_up(2)] {
            assert_eq!(beta_valuation(&m, &beta).unwrap().0, exp(&[4, 5]));
        }
    }

    #[test]
    fn homogenize_keeps_minimal_weighted_order() {
        // z1^2 + z1 z2, weight e1: minimal z1-order is 1
        let f = SparsePolynomial::from_int_terms(2, &[(1, &[2, 0]), (1, &[1, 1])]).unwrap();
        let h = homogenize(&f, &[1, 0]).unwrap();
        assert_eq!(h, SparsePolynomial::from_int_terms(2, &[(1, &[1, 1])]).unwrap());
        // z1 + z1 z2 + z2^3, weight e1: order 0, kept part is z2^3
        let f = SparsePolynomial::from_int_terms(2, &[(1, &[1, 0]), (1, &[1, 1]), (1, &[0, 3])])
            .unwrap();
        let h = homogenize(&f, &[1, 0]).unwrap();
        assert_eq!(h, SparsePolynomial::from_int_terms(2, &[(1, &[0, 3])]).unwrap());
        // idempotence
        assert_eq!(homogenize(&h, &[1, 0]).unwrap(), h);
    }

    #[test]
    fn iterated_homogenization_isolates_the_valuation_term() {
        let beta = WeightMatrix::straightened_up(3);
        let f = SparsePolynomial::from_int_terms(
            3,
            &[(2, &[1, 2, 0]), (3, &[0, 1, 1]), (-1, &[0, 0, 4]), (5, &[2, 0, 0])],
        )
        .unwrap();
        let mut h = f.clone();
        for row in beta.rows() {
            h = homogenize(&h, row).unwrap();
        }
        let (nu, c) = beta_valuation(&f, &beta).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].1, nu);
        assert_eq!(h.terms()[0].0, c);
    }

    #[test]
    fn flag_valuation_examples() {
        // z1^2 z2 + z1^3 with the standard flag
        let f = SparsePolynomial::from_int_terms(2, &[(1, &[2, 1]), (1, &[3, 0])]).unwrap();
        assert_eq!(flag_valuation(&f, &FlagSpec::identity(2)).unwrap(), exp(&[2, 1]));
        // monomials valuate to their exponent
        let m = SparsePolynomial::from_int_terms(3, &[(4, &[1, 0, 2])]).unwrap();
        assert_eq!(flag_valuation(&m, &FlagSpec::identity(3)).unwrap(), exp(&[1, 0, 2]));
        // swapped flag reads variables in the other order: z2 first has
        // order 0 (the z1^3 term survives the restriction), then z1 order 3
        let swapped = FlagSpec::new(vec![1, 0]).unwrap();
        assert_eq!(flag_valuation(&f, &swapped).unwrap(), exp(&[0, 3]));
    }

    #[test]
    fn flag_additivity_hand_case() {
        let f = SparsePolynomial::from_int_terms(2, &[(1, &[1, 0]), (1, &[0, 2])]).unwrap();
        let g = SparsePolynomial::from_int_terms(2, &[(1, &[1, 1])]).unwrap();
        let flag = FlagSpec::identity(2);
        let nf = flag_valuation(&f, &flag).unwrap();
        let ng = flag_valuation(&g, &flag).unwrap();
        let nfg = flag_valuation(&f.mul(&g).unwrap(), &flag).unwrap();
        assert_eq!(nf, exp(&[0, 2]));
        assert_eq!(ng, exp(&[1, 1]));
        assert_eq!(nfg, exp(&[1, 3]));
        assert_eq!(nfg, nf.add(&ng));
    }

    fn random_poly(rng: &mut StdRng, arity: usize, max_deg: u32, terms: usize) -> SparsePolynomial {
        loop {
            let raw: Vec<(Coeff, Exponent)> = (0..terms)
                .map(|_| {
                    let e = Exponent((0..arity).map(|_| rng.gen_range(0..=max_deg)).collect());
                    let c = Complex::new(
                        Rat::from_integer(rng.gen_range(-9i64..=9).into()),
                        Rat::from_integer(rng.gen_range(-9i64..=9).into()),
                    );
                    (c, e)
                })
                .collect();
            let p = SparsePolynomial::new(arity, raw).unwrap();
            if !p.is_zero() {
                return p;
            }
        }
    }

    fn random_weight(rng: &mut StdRng, arity: usize) -> WeightMatrix {
        loop {
            let rows: Vec<Vec<u64>> = (0..arity)
                .map(|_| (0..arity).map(|_| rng.gen_range(0..4u64)).collect())
                .collect();
            if let Ok(w) = WeightMatrix::new(rows) {
                return w;
            }
        }
    }

    #[test]
    fn valuation_is_additive_on_products() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let arity = rng.gen_range(1..=3);
            let f = random_poly(&mut rng, arity, 6, 4);
            let g = random_poly(&mut rng, arity, 6, 4);
            let fg = f.mul(&g).unwrap();
            if fg.is_zero() {
                continue; // exact cancellation of the whole product
            }
            let beta = random_weight(&mut rng, arity);
            let (nf, _) = beta_valuation(&f, &beta).unwrap();
            let (ng, _) = beta_valuation(&g, &beta).unwrap();
            let (nfg, _) = beta_valuation(&fg, &beta).unwrap();
            assert_eq!(nfg, nf.add(&ng), "beta additivity failed");
            let flag = FlagSpec::identity(arity);
            let a = flag_valuation(&f, &flag).unwrap();
            let b = flag_valuation(&g, &flag).unwrap();
            let ab = flag_valuation(&fg, &flag).unwrap();
            assert_eq!(ab, a.add(&b), "flag additivity failed");
        }
    }

    #[test]
    fn order_is_compatible_with_addition() {
        let mut rng = StdRng::seed_from_u64(0xadd);
        for _ in 0..500 {
            let arity = rng.gen_range(1..=3);
            let beta = random_weight(&mut rng, arity);
            let a = Exponent((0..arity).map(|_| rng.gen_range(0..10)).collect());
            let g = Exponent((0..arity).map(|_| rng.gen_range(0..10)).collect());
            let c = Exponent((0..arity).map(|_| rng.gen_range(0..10)).collect());
            let before = beta_compare(&a, &g, &beta).unwrap();
            let after = beta_compare(&a.add(&c), &g.add(&c), &beta).unwrap();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn flag_valuation_matches_lex_valuation() {
        let mut rng = StdRng::seed_from_u64(0x1e);
        for _ in 0..100 {
            let arity = rng.gen_range(1..=3);
            let f = random_poly(&mut rng, arity, 5, 4);
            let lex = beta_valuation(&f, &WeightMatrix::identity(arity)).unwrap().0;
            let flag = flag_valuation(&f, &FlagSpec::identity(arity)).unwrap();
            assert_eq!(lex, flag);
        }
    }

    #[test]
    fn homogenize_commutes_with_monomial_shift() {
        let mut rng = StdRng::seed_from_u64(0x40);
        for _ in 0..100 {
            let arity = rng.gen_range(1..=3);
            let f = random_poly(&mut rng, arity, 5, 4);
            let shift = Exponent((0..arity).map(|_| rng.gen_range(0..4)).collect());
            let m = SparsePolynomial::monomial(arity, one(), shift.clone()).unwrap();
            let row: Vec<u64> = (0..arity).map(|_| rng.gen_range(0..3u64)).collect();
            let lhs = homogenize(&f.mul(&m).unwrap(), &row).unwrap();
            let rhs = homogenize(&f, &row).unwrap().mul(&m).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn zero_polynomial_is_rejected_everywhere() {
        let z = SparsePolynomial::from_int_terms(2, &[]).unwrap();
        assert!(beta_valuation(&z, &WeightMatrix::identity(2)).is_err());
        assert!(homogenize(&z, &[1, 0]).is_err());
        assert!(flag_valuation(&z, &FlagSpec::identity(2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = SparsePolynomial::from_int_terms(2, &[(3, &[1, 2]), (-1, &[0, 0])]).unwrap();
        let j = SparsePolynomialJson::from(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back: SparsePolynomialJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.lift().unwrap(), f);
    }
}
