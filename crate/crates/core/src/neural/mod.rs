//! Spectral graph convolution with polynomial filters in the shift operator.
//!
//! Layer `ℓ` maps `X` to `ρ(Σ_g Σ_k h_{fgk} S^k X_g)` channel by channel.

mod activation;
mod filters;

pub use activation::Activation;
pub use filters::{FilterBank, Filters, SupBound, TimeLaw, SUP_GRID};

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// One pass through every layer.
pub fn gnn_forward(s: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>, h: &Filters, act: Activation) -> Result<Array2<f64>> {
    check_shapes(s, x, h)?;
    let mut cur = x.to_owned();
    for layer in 0..h.layers() {
        cur = layer_forward(s, cur.view(), h, layer, act);
    }
    Ok(cur)
}

/// Outputs of every layer, input first.
pub fn gnn_forward_layers(
    s: ArrayView2<'_, f64>,
    x: ArrayView2<'_, f64>,
    h: &Filters,
    act: Activation,
) -> Result<Vec<Array2<f64>>> {
    check_shapes(s, x, h)?;
    let mut out = vec![x.to_owned()];
    for layer in 0..h.layers() {
        let next = layer_forward(s, out[layer].view(), h, layer, act);
        out.push(next);
    }
    Ok(out)
}

fn check_shapes(s: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>, h: &Filters) -> Result<()> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::dim(format!("shift operator must be square, got {:?}", s.dim())));
    }
    if x.nrows() != n {
        return Err(Error::dim(format!("features have {} rows, shift has {n}", x.nrows())));
    }
    if x.ncols() != h.channels() {
        return Err(Error::dim(format!(
            "features have {} channels, filters expect {}",
            x.ncols(),
            h.channels()
        )));
    }
    Ok(())
}

fn layer_forward(s: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>, h: &Filters, layer: usize, act: Activation) -> Array2<f64> {
    let (n, f) = x.dim();
    let mut acc = Array2::<f64>::zeros((n, f));
    for g in 0..f {
        let mut power: Array1<f64> = x.column(g).to_owned();
        for k in 0..h.taps() {
            if k > 0 {
                power = s.dot(&power);
            }
            for out in 0..f {
                let coeff = h.get(layer, out, g, k);
                acc.column_mut(out).scaled_add(coeff, &power);
            }
        }
    }
    acc.mapv_inplace(|v| act.apply(v));
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_and_shift_filters() {
        let s = array![[0.5, 0.25], [0.25, 0.5]];
        let x = array![[1.0], [2.0]];
        let id = Filters::new(1, 1, 1, vec![1.0]).unwrap();
        assert_eq!(gnn_forward(s.view(), x.view(), &id, Activation::Identity).unwrap(), x);
        let hop = Filters::new(1, 1, 2, vec![0.0, 1.0]).unwrap();
        assert_eq!(
            gnn_forward(s.view(), x.view(), &hop, Activation::Identity).unwrap(),
            s.dot(&x)
        );
    }

    #[test]
    fn zero_is_fixed() {
        let s = array![[0.5, 0.25], [0.25, 0.5]];
        let x = Array2::zeros((2, 2));
        let h = Filters::new(2, 2, 3, (0..24).map(|i| i as f64 / 10.0 - 1.0).collect()).unwrap();
        for act in [Activation::Relu, Activation::Tanh, Activation::LeakyRelu(0.1)] {
            assert!(gnn_forward(s.view(), x.view(), &h, act).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn two_channel_mixing() {
        let s = array![[0.0, 1.0], [1.0, 0.0]];
        let x = array![[1.0, 10.0], [2.0, 20.0]];
        // out0 = X0 + S X1, out1 = −X1.
        let h = Filters::new(1, 2, 2, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0]).unwrap();
        let y = gnn_forward(s.view(), x.view(), &h, Activation::Identity).unwrap();
        assert_eq!(y, array![[21.0, -10.0], [12.0, -20.0]]);
        let layers = gnn_forward_layers(s.view(), x.view(), &h, Activation::Relu).unwrap();
        assert_eq!(layers.len(), 2);
        assert_eq!(layers[1], array![[21.0, 0.0], [12.0, 0.0]]);
    }

    #[test]
    fn shape_errors() {
        let s = Array2::<f64>::zeros((3, 3));
        let x = Array2::<f64>::zeros((2, 1));
        let h = Filters::new(1, 1, 1, vec![1.0]).unwrap();
        assert!(matches!(
            gnn_forward(s.view(), x.view(), &h, Activation::Relu),
            Err(Error::Dimension(_))
        ));
        let x = Array2::<f64>::zeros((3, 2));
        assert!(gnn_forward(s.view(), x.view(), &h, Activation::Relu).is_err());
    }
}
