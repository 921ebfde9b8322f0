//! Discrete Legendre-Fenchel machinery: full conjugates, the two partial
//! transforms `sup_a {v_a + a t}` / `inf_t {u_t - t a}`, and gradient-image
//! bodies.
//!
//! All transforms are direct max/min scans, O(primal * dual) per line. At
//! desk scale (<= 1e4 nodes per axis) this is faster to trust than to beat;
//! a linear-time lower-hull sweep is a drop-in replacement behind the same
//! signatures if larger grids ever show up.

use rayon::prelude::*;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, Finite, NegInf, PosInf};
use crate::grid::{Grid1D, GridFunctionND};

/// Relative tolerance for discrete convexity checks: second differences may
/// dip below zero by at most this fraction of the value scale.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Slope tolerance used when deciding that a partial infimum escapes the
/// grid (true infimum `-inf`).
const ESCAPE_TOL: f64 = 1e-6;

/// Conjugate of a grid function, together with the window of dual slopes the
/// primal grid can actually represent.
#[derive(Debug, Clone)]
pub struct LegendreTransform {
    pub values: GridFunctionND,
    /// Per dual axis, the range of difference quotients of the input; dual
    /// nodes outside it are extrapolations.
    pub slope_window: Vec<(f64, f64)>,
    /// One flag per dual node (row-major), true when some coordinate left
    /// the slope window.
    pub extrapolated: Vec<bool>,
}

/// `g(a) = max over finite nodes y of (a . y - f(y))`.
///
/// Finite somewhere in, finite everywhere out: the max over a nonempty
/// finite set never produces `+inf` on the dual grid.
pub fn legendre_conjugate(
    f: &GridFunctionND,
    dual_axes: &[Grid1D],
) -> Result<LegendreTransform> {
    if dual_axes.len() != f.dim() {
        return Err(Error::Precondition("dual axis count must match input dimension".into()));
    }
    let finite_nodes: Vec<(Vec<f64>, f64)> = f
        .iter_nodes()
        .filter_map(|(_, coords, v)| v.finite().map(|x| (coords, x)))
        .collect();
    if finite_nodes.is_empty() {
        return Err(Error::Precondition("conjugate of an all-infinite function".into()));
    }

    let slope_window = slope_windows(f);
    let dual = GridFunctionND::tabulate(dual_axes.to_vec(), |a| {
        let mut best = f64::NEG_INFINITY;
        for (y, fy) in &finite_nodes {
            let val = a.iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>() - fy;
            if val > best {
                best = val;
            }
        }
        Finite(best)
    })?;
    let extrapolated = dual
        .iter_nodes()
        .map(|(_, a, _)| {
            a.iter()
                .zip(&slope_window)
                .any(|(&ai, &(lo, hi))| ai < lo - 1e-12 || ai > hi + 1e-12)
        })
        .collect();
    Ok(LegendreTransform { values: dual, slope_window, extrapolated })
}

/// Range of finite difference quotients along each axis.
fn slope_windows(f: &GridFunctionND) -> Vec<(f64, f64)> {
    let shape = f.shape();
    let mut windows = Vec::with_capacity(f.dim());
    for axis in 0..f.dim() {
        let stride: usize = shape[axis + 1..].iter().product();
        let h = f.axes[axis].step();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let lines = f.values.len() / shape[axis];
        for line in 0..lines {
            let outer = line / stride;
            let inner = line % stride;
            let base = outer * stride * shape[axis] + inner;
            for i in 0..shape[axis] - 1 {
                if let (Finite(a), Finite(b)) =
                    (f.values[base + i * stride], f.values[base + (i + 1) * stride])
                {
                    let q = (b - a) / h;
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
            }
        }
        if lo > hi {
            // single finite node along this axis: only the zero slope is safe
            lo = 0.0;
            hi = 0.0;
        }
        windows.push((lo, hi));
    }
    windows
}

/// Row-level engine for `sup_a { v(a) + a t }`, one output row per input row.
pub fn sup_rows(
    rows: &[Vec<ExtReal>],
    alpha_grid: &Grid1D,
    t_grid: &Grid1D,
) -> Result<Vec<Vec<ExtReal>>> {
    for row in rows {
        if row.len() != alpha_grid.count {
            return Err(Error::Precondition("row length does not match the alpha grid".into()));
        }
        if row.iter().all(|v| *v == PosInf) {
            return Err(Error::Precondition("alpha slice identically +inf".into()));
        }
    }
    let alphas: Vec<f64> = alpha_grid.nodes().collect();
    let ts: Vec<f64> = t_grid.nodes().collect();
    Ok(rows
        .par_iter()
        .map(|row| {
            ts.iter()
                .map(|&t| {
                    let mut best = NegInf;
                    for (v, &a) in row.iter().zip(&alphas) {
                        let cand = match v {
                            Finite(x) => Finite(x + a * t),
                            NegInf => continue,
                            PosInf => PosInf,
                        };
                        best = best.max(cand);
                    }
                    best
                })
                .collect()
        })
        .collect())
}

/// Row-level engine for `inf_t { u(t) - t a }`. The infimum is declared
/// `-inf` (escape flag) when the grid minimum sits on the last node and the
/// terminal slope still points downhill by more than `ESCAPE_TOL`.
pub fn inf_rows(
    rows: &[Vec<ExtReal>],
    t_grid: &Grid1D,
    alpha_grid: &Grid1D,
) -> Result<Vec<Vec<ExtReal>>> {
    if t_grid.lo <= 0.0 {
        return Err(Error::Precondition("t grid must start strictly above zero".into()));
    }
    for row in rows {
        if row.len() != t_grid.count {
            return Err(Error::Precondition("row length does not match the t grid".into()));
        }
    }
    let ts: Vec<f64> = t_grid.nodes().collect();
    let alphas: Vec<f64> = alpha_grid.nodes().collect();
    let h = t_grid.step();
    Ok(rows
        .par_iter()
        .map(|row| {
            alphas
                .iter()
                .map(|&a| {
                    let mut best = PosInf;
                    let mut best_i = 0usize;
                    for (i, (v, &t)) in row.iter().zip(&ts).enumerate() {
                        let cand = match v {
                            Finite(x) => Finite(x - t * a),
                            NegInf => NegInf,
                            PosInf => continue,
                        };
                        if cand < best {
                            best = cand;
                            best_i = i;
                        }
                    }
                    if best == PosInf {
                        return PosInf;
                    }
                    if best_i + 1 == row.len() && row.len() >= 2 {
                        if let (Finite(last), Finite(prev)) = (row[row.len() - 1], row[row.len() - 2]) {
                            let terminal_slope = (last - prev) / h;
                            if terminal_slope - a < -ESCAPE_TOL * a.abs().max(1.0) {
                                return NegInf;
                            }
                        }
                    }
                    best
                })
                .collect()
        })
        .collect())
}

/// `sup_a { v(p, a) + a t }` for a two-axis function (axis 0 indexes sample
/// points, axis 1 is the alpha grid).
pub fn partial_sup_transform(v: &GridFunctionND, t_grid: Grid1D) -> Result<GridFunctionND> {
    let (points_axis, alpha_grid, rows) = split_rows(v)?;
    let out = sup_rows(&rows, &alpha_grid, &t_grid)?;
    GridFunctionND::new(vec![points_axis, t_grid], out.into_iter().flatten().collect())
}

/// `inf_t { u(p, t) - t a }` for a two-axis function (axis 0 indexes sample
/// points, axis 1 is the t grid).
pub fn partial_inf_transform(u: &GridFunctionND, alpha_grid: Grid1D) -> Result<GridFunctionND> {
    let (points_axis, t_grid, rows) = split_rows(u)?;
    let out = inf_rows(&rows, &t_grid, &alpha_grid)?;
    GridFunctionND::new(vec![points_axis, alpha_grid], out.into_iter().flatten().collect())
}

fn split_rows(f: &GridFunctionND) -> Result<(Grid1D, Grid1D, Vec<Vec<ExtReal>>)> {
    if f.dim() != 2 {
        return Err(Error::Precondition(
            "partial transforms expect two axes: sample points x parameter".into(),
        ));
    }
    let cols = f.axes[1].count;
    let rows: Vec<Vec<ExtReal>> = f.values.chunks(cols).map(|c| c.to_vec()).collect();
    Ok((f.axes[0], f.axes[1], rows))
}

/// Convex hull of the central-difference gradients at interior nodes.
pub fn gradient_image_body(u: &GridFunctionND) -> Result<ConvexBody> {
    let shape = u.shape();
    if shape.iter().any(|&c| c < 3) {
        return Err(Error::Precondition("gradient image needs at least 3 nodes per axis".into()));
    }
    let n = u.dim();
    let mut gradients: Vec<Vec<f64>> = Vec::new();
    'outer: for (idx, _, v) in u.iter_nodes() {
        if idx.iter().enumerate().any(|(k, &i)| i == 0 || i + 1 == shape[k]) {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::Precondition("function must be finite on the grid interior".into()));
        }
        let mut grad = Vec::with_capacity(n);
        for k in 0..n {
            let mut up = idx.clone();
            up[k] += 1;
            let mut down = idx.clone();
            down[k] -= 1;
            let (a, b) = (u.value(&down), u.value(&up));
            match (a, b) {
                (Finite(a), Finite(b)) => grad.push((b - a) / (2.0 * u.axes[k].step())),
                // boundary-adjacent infinite neighbor: skip this node
                _ => continue 'outer,
            }
        }
        gradients.push(grad);
    }
    if gradients.is_empty() {
        return Err(Error::Precondition("no interior gradients available".into()));
    }
    ConvexBody::hull_f64(n, &gradients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{rat_from_f64, rat_from_int};
    use crate::ext_real::ExtReal;

    fn grid(lo: f64, hi: f64, n: usize) -> Grid1D {
        Grid1D::new(lo, hi, n).unwrap()
    }

    fn tab1(g: Grid1D, f: impl Fn(f64) -> f64) -> GridFunctionND {
        GridFunctionND::tabulate(vec![g], |p| Finite(f(p[0]))).unwrap()
    }

    #[test]
    fn quadratic_is_self_conjugate_up_to_grid_error() {
        let f = tab1(grid(-5.0, 5.0, 101), |y| y * y / 2.0);
        let out = legendre_conjugate(&f, &[grid(-4.0, 4.0, 81)]).unwrap();
        let h = 0.1_f64;
        for (_, a, v) in out.values.iter_nodes() {
            let err = (v.finite().unwrap() - a[0] * a[0] / 2.0).abs();
            assert!(err <= h * h / 8.0 + 1e-12, "a={} err={}", a[0], err);
        }
        assert!(out.extrapolated.iter().all(|&e| !e));
    }

    #[test]
    fn soft_plus_conjugate_at_one() {
        // stationary point of y - 2 log(1+e^y) is e^y = 1, an exact node
        let f = tab1(grid(-5.0, 5.0, 101), |y| 2.0 * (1.0 + y.exp()).ln());
        let out = legendre_conjugate(&f, &[grid(0.5, 1.5, 3)]).unwrap();
        let g1 = out.values.value(&[1]).finite().unwrap();
        assert!((g1 + 2.0 * 2.0_f64.ln()).abs() < 1e-12, "g(1)={g1}");
    }

    #[test]
    fn affine_conjugate_flags_everything_but_the_slope() {
        let (c, b) = (0.7, 1.5);
        let f = tab1(grid(-5.0, 5.0, 101), |y| c + b * y);
        let out = legendre_conjugate(&f, &[grid(0.5, 2.5, 5)]).unwrap();
        // dual node exactly at b = 1.5 is index 2
        assert!((out.values.value(&[2]).finite().unwrap() + c).abs() < 1e-12);
        assert!((out.slope_window[0].0 - b).abs() < 1e-12);
        assert!((out.slope_window[0].1 - b).abs() < 1e-12);
        let flags: Vec<bool> = out.extrapolated.clone();
        assert_eq!(flags, vec![true, true, false, true, true]);
    }

    #[test]
    fn conjugate_of_all_infinite_function_errors() {
        let f = GridFunctionND::new(vec![grid(0.0, 1.0, 2)], vec![NegInf, NegInf]).unwrap();
        assert!(legendre_conjugate(&f, &[grid(0.0, 1.0, 2)]).is_err());
    }

    #[test]
    fn order_reversal_is_exact_on_grids() {
        let f = tab1(grid(-3.0, 3.0, 61), |y| y * y / 2.0);
        let g = tab1(grid(-3.0, 3.0, 61), |y| y * y / 2.0 + 0.25);
        let dual = [grid(-2.0, 2.0, 41)];
        let fc = legendre_conjugate(&f, &dual).unwrap();
        let gc = legendre_conjugate(&g, &dual).unwrap();
        for (a, b) in fc.values.values.iter().zip(&gc.values.values) {
            assert!(a.finite().unwrap() >= b.finite().unwrap());
        }
    }

    #[test]
    fn involution_restores_convex_input() {
        let g = grid(-5.0, 5.0, 201);
        let f = tab1(g, |y| (1.0 + y.exp()).ln() * 2.0);
        let c1 = legendre_conjugate(&f, &[grid(0.05, 1.95, 191)]).unwrap();
        let c2 = legendre_conjugate(&c1.values, &[grid(-3.0, 3.0, 121)]).unwrap();
        let h = g.step();
        for (_, y, v) in c2.values.iter_nodes() {
            let truth = 2.0 * (1.0 + y[0].exp()).ln();
            assert!(
                (v.finite().unwrap() - truth).abs() < 4.0 * h,
                "y={} got={} want={}",
                y[0],
                v.finite().unwrap(),
                truth
            );
        }
    }

    #[test]
    fn partial_sup_of_linear_curve_is_hinge() {
        // v(a) = a G on [0, 1], -inf beyond, G = -1  =>  u(t) = max(t - 1, 0)
        let alpha = grid(-1.0, 1.0, 201);
        let g_val = -1.0;
        let row: Vec<ExtReal> = alpha
            .nodes()
            .map(|a| if a < 0.0 { Finite(0.0) } else { Finite(a * g_val) })
            .collect();
        let t = grid(1e-3, 3.0, 301);
        let out = sup_rows(&[row], &alpha, &t).unwrap();
        for (i, tv) in t.nodes().enumerate() {
            let want = (tv - 1.0).max(0.0);
            let got = out[0][i].finite().unwrap();
            assert!((got - want).abs() < 1.5e-2, "t={tv} got={got} want={want}");
        }
    }

    #[test]
    fn partial_sup_of_degenerate_curve_is_zero() {
        let alpha = grid(-1.0, 1.0, 21);
        let row: Vec<ExtReal> = alpha
            .nodes()
            .map(|a| if a <= 0.0 { Finite(0.0) } else { NegInf })
            .collect();
        let t = grid(0.1, 5.0, 50);
        let out = sup_rows(&[row], &alpha, &t).unwrap();
        assert!(out[0].iter().all(|v| *v == Finite(0.0)));
    }

    #[test]
    fn partial_inf_recovers_linear_curve_and_flags_escape() {
        let t = grid(1e-3, 30.0, 401);
        let lambda = 0.7;
        let g_val = -1.0;
        let row: Vec<ExtReal> = t
            .nodes()
            .map(|tv| Finite(lambda * (g_val + tv).max(0.0)))
            .collect();
        let alpha = grid(-0.5, 1.0, 151);
        let out = inf_rows(&[row], &t, &alpha).unwrap();
        for (i, a) in alpha.nodes().enumerate() {
            if a > lambda + 1e-9 {
                assert_eq!(out[0][i], NegInf, "alpha={a}");
            } else if a >= 0.0 {
                let want = a * g_val;
                let got = out[0][i].finite().unwrap();
                assert!((got - want).abs() < 2e-2, "alpha={a} got={got} want={want}");
            } else {
                // for a < 0 the infimum sits at the left edge t_lo, worth t_lo |a|
                let got = out[0][i].finite().unwrap();
                assert!(got.abs() <= 1e-3 * a.abs() + 1e-12, "alpha={a} got={got}");
            }
        }
    }

    #[test]
    fn partial_inf_of_zero_ray() {
        let t = grid(1e-3, 10.0, 101);
        let row: Vec<ExtReal> = t.nodes().map(|_| Finite(0.0)).collect();
        let alpha = grid(-1.0, 1.0, 21);
        let out = inf_rows(&[row], &t, &alpha).unwrap();
        for (i, a) in alpha.nodes().enumerate() {
            if a > 0.0 {
                assert_eq!(out[0][i], NegInf, "alpha={a}");
            } else {
                // minimum at t -> 0 for a < 0; exactly zero for a = 0
                let got = out[0][i].finite().unwrap();
                assert!(got.abs() < 2e-3, "alpha={a} got={got}");
            }
        }
    }

    #[test]
    fn gradient_image_of_soft_plus_is_subinterval_of_0_2() {
        let u = tab1(grid(-12.0, 12.0, 241), |y| 2.0 * (1.0 + y.exp()).ln());
        let body = gradient_image_body(&u).unwrap();
        let vs = body.vertices_f64();
        let lo = vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        assert!(lo > 0.0 && lo < 0.01);
        assert!(hi < 2.0 && hi > 1.99);
    }

    #[test]
    fn gradient_image_of_quadratic_is_shrunk_cube() {
        let r = 2.0;
        let g = grid(-r, r, 41);
        let u = GridFunctionND::tabulate(vec![g, g], |p| {
            Finite((p[0] * p[0] + p[1] * p[1]) / 2.0)
        })
        .unwrap();
        let body = gradient_image_body(&u).unwrap();
        let h = g.step();
        let corner = vec![
            rat_from_f64(r - h - 1e-9).unwrap(),
            rat_from_f64(r - h - 1e-9).unwrap(),
        ];
        assert!(body.contains(&corner));
        assert!(!body.contains(&vec![rat_from_int(2), rat_from_int(0)]));
    }

    #[test]
    fn gradient_image_of_support_function_recovers_polytope() {
        let g = grid(-6.0, 6.0, 121);
        let u = GridFunctionND::tabulate(vec![g, g], |p| {
            Finite((3.0 * p[0]).max(3.0 * p[1]).max(0.0))
        })
        .unwrap();
        let body = gradient_image_body(&u).unwrap();
        let triangle = ConvexBody::hull(
            2,
            &[
                vec![rat_from_int(0), rat_from_int(0)],
                vec![rat_from_int(3), rat_from_int(0)],
                vec![rat_from_int(0), rat_from_int(3)],
            ],
        )
        .unwrap();
        assert!(body.within_collar_of(&triangle, 1e-9));
        // and every triangle vertex is reproduced
        for v in triangle.vertices() {
            let hit = body
                .vertices_f64()
                .iter()
                .any(|w| {
                    w.iter()
                        .zip(v.iter().map(crate::body::rat_to_f64))
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                        < 1e-9
                });
            assert!(hit);
        }
    }

    #[test]
    fn refinement_grows_gradient_hull() {
        let coarse = gradient_image_body(&tab1(grid(-8.0, 8.0, 41), |y| {
            2.0 * (1.0 + y.exp()).ln()
        }))
        .unwrap();
        let fine = gradient_image_body(&tab1(grid(-8.0, 8.0, 321), |y| {
            2.0 * (1.0 + y.exp()).ln()
        }))
        .unwrap();
        assert!(coarse.within_collar_of(&fine, 1e-6));
    }

    #[test]
    fn too_few_nodes_rejected() {
        let u = tab1(grid(0.0, 1.0, 2), |y| y);
        assert!(gradient_image_body(&u).is_err());
    }

    #[test]
    fn gradients_of_the_conjugate_stay_in_the_primal_domain() {
        // subgradients of f* are maximizers of a.y - f(y), all grid nodes
        let g = grid(-5.0, 5.0, 101);
        let f = tab1(g, |y| 2.0 * (1.0 + y.exp()).ln());
        let conj = legendre_conjugate(&f, &[grid(0.1, 1.9, 91)]).unwrap();
        let hull = gradient_image_body(&conj.values).unwrap();
        let domain = ConvexBody::hull(
            2 - 1,
            &[vec![rat_from_f64(-5.0).unwrap()], vec![rat_from_f64(5.0).unwrap()]],
        )
        .unwrap();
        assert!(hull.within_collar_of(&domain, 1e-9));
    }
}
