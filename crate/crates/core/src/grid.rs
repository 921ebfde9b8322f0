//! Uniform grids and extended-real grid functions in up to four variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, Finite};

/// A uniform grid of `count >= 2` nodes on `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidValue(format!(
                "grid needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidValue(format!(
                "grid needs at least 2 nodes, got {count}"
            )));
        }
        Ok(Grid1D { lo, hi, count })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        // exact endpoints, no drift on the last node
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + self.step() * i as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.node(i))
    }

    /// Index of the grid node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let raw = ((x - self.lo) / self.step()).round();
        (raw.max(0.0) as usize).min(self.count - 1)
    }
}

/// Geometric (log-uniform) sample points on `[lo, hi]`, `lo > 0`.
/// Not a `Grid1D`; used where slope estimation wants dyadic windows.
pub fn geometric_nodes(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidValue("geometric nodes need 0 < lo < hi".into()));
    }
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * ratio.powi(i as i32)
            }
        })
        .collect())
}

/// An extended-real function tabulated on a tensor grid (row-major values,
/// last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionND {
    pub axes: Vec<Grid1D>,
    pub values: Vec<ExtReal>,
}

impl GridFunctionND {
    pub fn new(axes: Vec<Grid1D>, values: Vec<ExtReal>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() {
            return Err(Error::InvalidValue("grid function needs at least one axis".into()));
        }
        if values.len() != expected {
            return Err(Error::InvalidValue(format!(
                "value count {} does not match grid shape ({} nodes)",
                values.len(),
                expected
            )));
        }
        Ok(GridFunctionND { axes, values })
    }

    /// Tabulates `f` at every node of the tensor grid.
    pub fn tabulate(axes: Vec<Grid1D>, f: impl Fn(&[f64]) -> ExtReal) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let total: usize = shape.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        let mut point = vec![0.0; axes.len()];
        for _ in 0..total {
            for (k, &i) in idx.iter().enumerate() {
                point[k] = axes[k].node(i);
            }
            values.push(f(&point));
            // odometer increment, last axis fastest
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        GridFunctionND::new(axes, values)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.axes[k].count);
            flat = flat * self.axes[k].count + i;
        }
        flat
    }

    pub fn value(&self, idx: &[usize]) -> ExtReal {
        self.values[self.flat_index(idx)]
    }

    pub fn has_finite_node(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Iterates `(multi-index, coordinates, value)` over all nodes.
    pub fn iter_nodes(&self) -> NodeIter<'_> {
        NodeIter {
            fun: self,
            flat: 0,
            idx: vec![0; self.axes.len()],
        }
    }

    /// Largest discrete-convexity violation along each axis, over finite
    /// triples: positive return means the second difference dipped below
    /// zero by that amount somewhere.
    pub fn convexity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let shape = self.shape();
        for axis in 0..self.axes.len() {
            let stride: usize = shape[axis + 1..].iter().product();
            let lines: usize = self.values.len() / shape[axis];
            for line in 0..lines {
                // decompose line number into (outer, inner) block offsets
                let outer = line / stride;
                let inner = line % stride;
                let base = outer * stride * shape[axis] + inner;
                for i in 1..shape[axis] - 1 {
                    let a = self.values[base + (i - 1) * stride];
                    let b = self.values[base + i * stride];
                    let c = self.values[base + (i + 1) * stride];
                    if let (Finite(a), Finite(b), Finite(c)) = (a, b, c) {
                        let second = a - 2.0 * b + c;
                        if second < -worst {
                            worst = -second;
                        }
                    }
                }
            }
        }
        worst
    }
}

pub struct NodeIter<'a> {
    fun: &'a GridFunctionND,
    flat: usize,
    idx: Vec<usize>,
}

impl<'a> Iterator for NodeIter<'a> {
    type Item = (Vec<usize>, Vec<f64>, ExtReal);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.fun.values.len() {
            return None;
        }
        let coords: Vec<f64> = self
            .idx
            .iter()
            .enumerate()
            .map(|(k, &i)| self.fun.axes[k].node(i))
            .collect();
        let item = (self.idx.clone(), coords, self.fun.values[self.flat]);
        self.flat += 1;
        for k in (0..self.idx.len()).rev() {
            self.idx[k] += 1;
            if self.idx[k] < self.fun.axes[k].count {
                break;
            }
            self.idx[k] = 0;
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext_real::NegInf;

    #[test]
    fn grid_nodes_hit_endpoints() {
        let g = Grid1D::new(-5.0, 5.0, 101).unwrap();
        assert_eq!(g.node(0), -5.0);
        assert_eq!(g.node(100), 5.0);
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert_eq!(g.nearest(0.449), 54); // nearest to 0.449 is 0.4? no: 0.449 -> index 54.49 -> 54
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn tabulate_row_major_last_axis_fastest() {
        let ax = vec![Grid1D::new(0.0, 1.0, 2).unwrap(), Grid1D::new(0.0, 2.0, 3).unwrap()];
        let f = GridFunctionND::tabulate(ax, |p| Finite(10.0 * p[0] + p[1])).unwrap();
        let got: Vec<f64> = f.values.iter().map(|v| v.finite().unwrap()).collect();
        assert_eq!(got, vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        assert_eq!(f.value(&[1, 2]), Finite(12.0));
    }

    #[test]
    fn convexity_defect_flags_concave_lines() {
        let ax = vec![Grid1D::new(0.0, 2.0, 3).unwrap()];
        let convex = GridFunctionND::new(ax, vec![Finite(1.0), Finite(0.0), Finite(1.0)]).unwrap();
        assert_eq!(convex.convexity_defect(), 0.0);
        let ax = vec![Grid1D::new(0.0, 2.0, 3).unwrap()];
        let concave = GridFunctionND::new(ax, vec![Finite(0.0), Finite(1.0), Finite(0.0)]).unwrap();
        assert!((concave.convexity_defect() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn infinite_nodes_skipped_in_convexity() {
        let ax = vec![Grid1D::new(0.0, 3.0, 4).unwrap()];
        let f =
            GridFunctionND::new(ax, vec![Finite(0.0), Finite(1.0), NegInf, Finite(0.0)]).unwrap();
        assert_eq!(f.convexity_defect(), 0.0);
    }

    #[test]
    fn geometric_nodes_cover_range() {
        let ns = geometric_nodes(1e-3, 30.0, 401).unwrap();
        assert_eq!(ns.len(), 401);
        assert!((ns[0] - 1e-3).abs() < 1e-18);
        assert!((ns[400] - 30.0).abs() < 1e-12);
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }
}
