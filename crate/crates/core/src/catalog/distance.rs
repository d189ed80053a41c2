use super::Kernel;
use crate::error::{Error, Result};
use crate::sampling::{merge_breakpoints, PiecewiseKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// `‖W_a − W_b‖` in `L1` or `L2` of the unit square. Both are upper bounds
/// on the cut distance.
///
/// Two piecewise-constant kernels are compared exactly on the overlay of
/// their partitions; anything else uses the midpoint rule on an `m × m`
/// grid.
pub fn kernel_distance(a: &dyn Kernel, b: &dyn Kernel, norm: Norm, m: usize) -> Result<f64> {
    if let (Some(pa), Some(pb)) = (a.as_piecewise(), b.as_piecewise()) {
        return Ok(overlay_distance(pa, pb, norm));
    }
    if m < 1 {
        return Err(Error::invalid("quadrature grid needs m >= 1"));
    }
    let mid: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
    let mut acc = 0.0;
    for &u in &mid {
        for &v in &mid {
            let d = a.value(u, v) - b.value(u, v);
            acc += match norm {
                Norm::L1 => d.abs(),
                Norm::L2 => d * d,
            };
        }
    }
    let mean = acc / (m * m) as f64;
    Ok(match norm {
        Norm::L1 => mean,
        Norm::L2 => mean.sqrt(),
    })
}

fn overlay_distance(a: &PiecewiseKernel, b: &PiecewiseKernel, norm: Norm) -> f64 {
    let breaks = merge_breakpoints(a.breakpoints(), b.breakpoints());
    let ia = owner_indices(&breaks, a.breakpoints());
    let ib = owner_indices(&breaks, b.breakpoints());
    let mut acc = 0.0;
    for r in 0..breaks.len() - 1 {
        let hr = breaks[r + 1] - breaks[r];
        for c in 0..breaks.len() - 1 {
            let hc = breaks[c + 1] - breaks[c];
            let d = a.values()[[ia[r], ia[c]]] - b.values()[[ib[r], ib[c]]];
            acc += hr
                * hc
                * match norm {
                    Norm::L1 => d.abs(),
                    Norm::L2 => d * d,
                };
        }
    }
    match norm {
        Norm::L1 => acc,
        Norm::L2 => acc.sqrt(),
    }
}

/// For each interval of the merged partition, the index of the interval of
/// `own` containing it.
pub(crate) fn owner_indices(merged: &[f64], own: &[f64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(merged.len() - 1);
    let mut k = 0;
    for w in merged.windows(2) {
        while k + 2 < own.len() && own[k + 1] <= w[0] {
            k += 1;
        }
        out.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphonSpec;
    use ndarray::{array, Array2};

    struct Constant(f64);
    impl Kernel for Constant {
        fn value(&self, _u: f64, _v: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn constant_kernels() {
        let d = kernel_distance(&Constant(1.0), &Constant(0.0), Norm::L2, 4).unwrap();
        assert_eq!(d, 1.0);
        let tent = GraphonSpec::tent(0.5).unwrap();
        assert_eq!(kernel_distance(&tent, &tent, Norm::L1, 16).unwrap(), 0.0);
    }

    #[test]
    fn block_identity_against_ones() {
        let id = PiecewiseKernel::uniform(array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let ones = PiecewiseKernel::uniform(Array2::ones((3, 3))).unwrap();
        let l2 = kernel_distance(&id, &ones, Norm::L2, 1).unwrap();
        assert!((l2 - 0.5f64.sqrt()).abs() < 1e-15);
        let l1 = kernel_distance(&id, &ones, Norm::L1, 1).unwrap();
        assert!((l1 - 0.5).abs() < 1e-15);
        // Mixed comparison falls back to quadrature and agrees.
        let q = kernel_distance(&id, &Constant(1.0), Norm::L2, 64).unwrap();
        assert!((q - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn owner_lookup() {
        let merged = merge_breakpoints(&[0.0, 0.5, 1.0], &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(owner_indices(&merged, &[0.0, 0.5, 1.0]), vec![0, 0, 1, 1]);
        assert_eq!(
            owner_indices(&merged, &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]),
            vec![0, 1, 1, 2]
        );
    }
}
