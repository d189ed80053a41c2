use ndarray::{Array2, ArrayView1};

use crate::catalog::Kernel;
use crate::error::{Error, Result};

fn uniform_breaks(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

fn check_breaks(breaks: &[f64], intervals: usize) -> Result<()> {
    if breaks.len() != intervals + 1 || intervals == 0 {
        return Err(Error::dim(format!(
            "{} breakpoints cannot delimit {intervals} intervals",
            breaks.len()
        )));
    }
    if breaks[0] != 0.0 || breaks[intervals] != 1.0 {
        return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
    }
    if breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }
    Ok(())
}

/// Index of the half-open interval `[b_i, b_{i+1})` containing `u`; the last
/// interval is closed at 1.
fn locate(breaks: &[f64], u: f64) -> usize {
    let m = breaks.len() - 1;
    breaks.partition_point(|&b| b <= u).saturating_sub(1).min(m - 1)
}

/// Sorted union of two partitions of `[0,1]`.
pub fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Step function `[0,1] → ℝ^F`: row `i` of `values` on `[b_i, b_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Array2<f64>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, values: Array2<f64>) -> Result<Self> {
        check_breaks(&breaks, values.nrows())?;
        Ok(PiecewiseConstant { breaks, values })
    }

    /// Uniform partition `{i/n}` with one row per interval.
    pub fn uniform(values: Array2<f64>) -> Result<Self> {
        Self::new(uniform_breaks(values.nrows()), values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn eval(&self, u: f64) -> ArrayView1<'_, f64> {
        self.values.row(locate(&self.breaks, u))
    }

    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.values.rows().into_iter().enumerate() {
            let h = self.breaks[i + 1] - self.breaks[i];
            acc += h * row.iter().map(|x| x * x).sum::<f64>();
        }
        acc.sqrt()
    }
}

/// Exact `L2([0,1]; ℝ^F)` distance, integrating over the merged partition.
pub fn overlay_l2_distance(a: &PiecewiseConstant, b: &PiecewiseConstant) -> Result<f64> {
    if a.channels() != b.channels() {
        return Err(Error::dim(format!(
            "cannot compare functions with {} and {} channels",
            a.channels(),
            b.channels()
        )));
    }
    let (ba, bb) = (&a.breaks, &b.breaks);
    let (mut i, mut j) = (0, 0);
    let mut left = 0.0;
    let mut acc = 0.0;
    while i < a.values.nrows() && j < b.values.nrows() {
        let right = ba[i + 1].min(bb[j + 1]);
        let h = right - left;
        let ra = a.values.row(i);
        let rb = b.values.row(j);
        let sq: f64 = ra.iter().zip(rb.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
        acc += h * sq;
        left = right;
        if ba[i + 1] == right {
            i += 1;
        }
        if bb[j + 1] == right {
            j += 1;
        }
    }
    Ok(acc.sqrt())
}

/// Symmetric step kernel on the product of one partition with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseKernel {
    breaks: Vec<f64>,
    values: Array2<f64>,
}

impl PiecewiseKernel {
    pub fn new(breaks: Vec<f64>, values: Array2<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::dim(format!("kernel values must be square, got {:?}", values.dim())));
        }
        check_breaks(&breaks, values.nrows())?;
        Ok(PiecewiseKernel { breaks, values })
    }

    pub fn uniform(values: Array2<f64>) -> Result<Self> {
        Self::new(uniform_breaks(values.nrows()), values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

impl Kernel for PiecewiseKernel {
    fn value(&self, u: f64, v: f64) -> f64 {
        self.values[[locate(&self.breaks, u), locate(&self.breaks, v)]]
    }

    fn as_piecewise(&self) -> Option<&PiecewiseKernel> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn same_function_on_different_partitions() {
        let a = PiecewiseConstant::uniform(Array2::ones((2, 1))).unwrap();
        let b = PiecewiseConstant::uniform(Array2::ones((3, 1))).unwrap();
        assert_eq!(overlay_l2_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn constant_against_step() {
        let a = PiecewiseConstant::uniform(Array2::ones((1, 1))).unwrap();
        let b = PiecewiseConstant::uniform(array![[1.0], [0.0]]).unwrap();
        let d = overlay_l2_distance(&a, &b).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(overlay_l2_distance(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn channel_mismatch() {
        let a = PiecewiseConstant::uniform(Array2::ones((2, 1))).unwrap();
        let b = PiecewiseConstant::uniform(Array2::ones((2, 2))).unwrap();
        assert!(matches!(overlay_l2_distance(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn evaluation_and_norm() {
        let f = PiecewiseConstant::uniform(array![[1.0], [-2.0]]).unwrap();
        assert_eq!(f.eval(0.0)[0], 1.0);
        assert_eq!(f.eval(0.5)[0], -2.0);
        assert_eq!(f.eval(1.0)[0], -2.0);
        assert!((f.l2_norm() - 2.5f64.sqrt()).abs() < 1e-15);
        let k = PiecewiseKernel::uniform(array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(k.value(0.25, 0.75), 0.0);
        assert_eq!(k.value(0.75, 0.75), 1.0);
    }

    #[test]
    fn merge_dedups_shared_points() {
        let m = merge_breakpoints(&uniform_breaks(2), &uniform_breaks(4));
        assert_eq!(m, uniform_breaks(4));
        assert_eq!(merge_breakpoints(&uniform_breaks(2), &uniform_breaks(3)).len(), 5);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(PiecewiseConstant::new(vec![0.0, 0.6, 0.5, 1.0], Array2::zeros((3, 1))).is_err());
        assert!(PiecewiseConstant::new(vec![0.0, 1.0], Array2::zeros((2, 1))).is_err());
        assert!(PiecewiseKernel::uniform(Array2::zeros((2, 3))).is_err());
    }
}
