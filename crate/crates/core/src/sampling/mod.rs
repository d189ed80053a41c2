//! Graphs and node features sampled from graphons on the uniform grid
//! `u_i = (i−1)/n`, plus their induced step-function representations.

mod features;
mod piecewise;

pub use features::{gauss_legendre, FeatureChannel, FeatureFunction, FeatureKind};
pub use piecewise::{merge_breakpoints, overlay_l2_distance, PiecewiseConstant, PiecewiseKernel};

use std::fmt::Write as _;

use ndarray::Array2;

use crate::catalog::{Cell, GraphonSpec, ValueClass};
use crate::error::{Error, Result};

pub const DEFAULT_QUAD_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphClass {
    Weighted,
    Unweighted,
}

impl GraphClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphClass::Weighted => "weighted",
            GraphClass::Unweighted => "unweighted",
        }
    }
}

/// Dense symmetric adjacency matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    adjacency: Array2<f64>,
    class: GraphClass,
}

impl SampledGraph {
    pub fn new(adjacency: Array2<f64>, class: GraphClass) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 || adjacency.ncols() != n {
            return Err(Error::dim(format!("adjacency must be square and nonempty, got {:?}", adjacency.dim())));
        }
        for i in 0..n {
            for j in 0..n {
                let a = adjacency[[i, j]];
                if a != adjacency[[j, i]] {
                    return Err(Error::invalid(format!("adjacency is not symmetric at ({i},{j})")));
                }
                let ok = match class {
                    GraphClass::Weighted => (0.0..=1.0).contains(&a),
                    GraphClass::Unweighted => a == 0.0 || a == 1.0,
                };
                if !ok {
                    return Err(Error::invalid(format!(
                        "entry {a} at ({i},{j}) is not valid for a {} graph",
                        class.as_str()
                    )));
                }
            }
        }
        Ok(SampledGraph { adjacency, class })
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &Array2<f64> {
        &self.adjacency
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    /// Graph shift operator `A / n`.
    pub fn shift(&self) -> Array2<f64> {
        graph_shift(self)
    }

    /// Subgraph induced by `nodes`, kept in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<SampledGraph> {
        if nodes.is_empty() {
            return Err(Error::invalid("induced subgraph needs at least one node"));
        }
        if let Some(&bad) = nodes.iter().find(|&&v| v >= self.n()) {
            return Err(Error::invalid(format!("node {bad} out of range for n = {}", self.n())));
        }
        let a = Array2::from_shape_fn((nodes.len(), nodes.len()), |(i, j)| {
            self.adjacency[[nodes[i], nodes[j]]]
        });
        Ok(SampledGraph {
            adjacency: a,
            class: self.class,
        })
    }

    /// Edge list: header `n=<n>,class=<class>`, then `i,j,weight` for every
    /// nonzero entry with `i ≤ j`.
    pub fn to_edge_csv(&self) -> String {
        let mut out = format!("n={},class={}\n", self.n(), self.class.as_str());
        for i in 0..self.n() {
            for j in i..self.n() {
                let w = self.adjacency[[i, j]];
                if w != 0.0 {
                    let _ = writeln!(out, "{i},{j},{w}");
                }
            }
        }
        out
    }

    /// Parses an edge list. The header is optional; without it `n` is one
    /// more than the largest index and the class is inferred from the
    /// weights. A missing weight means 1. Lines starting with `#` are
    /// skipped.
    pub fn from_edge_csv(text: &str) -> Result<SampledGraph> {
        let mut declared_n = None;
        let mut declared_class = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if line.starts_with("n=") {
                if declared_n.is_some() || !edges.is_empty() {
                    return Err(perr("header must come first and only once".into()));
                }
                for part in line.split(',') {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| perr(format!("bad header field `{part}`")))?;
                    match k.trim() {
                        "n" => {
                            declared_n = Some(
                                v.trim()
                                    .parse::<usize>()
                                    .map_err(|_| perr(format!("bad node count `{v}`")))?,
                            )
                        }
                        "class" => {
                            declared_class = Some(match v.trim() {
                                "weighted" => GraphClass::Weighted,
                                "unweighted" => GraphClass::Unweighted,
                                other => return Err(perr(format!("unknown class `{other}`"))),
                            })
                        }
                        other => return Err(perr(format!("unknown header field `{other}`"))),
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(perr(format!("expected `i,j[,weight]`, got `{line}`")));
            }
            let i: usize = fields[0]
                .parse()
                .map_err(|_| perr(format!("bad node index `{}`", fields[0])))?;
            let j: usize = fields[1]
                .parse()
                .map_err(|_| perr(format!("bad node index `{}`", fields[1])))?;
            let w: f64 = match fields.get(2) {
                Some(s) => s.parse().map_err(|_| perr(format!("bad weight `{s}`")))?,
                None => 1.0,
            };
            if !(0.0..=1.0).contains(&w) {
                return Err(perr(format!("weight {w} outside [0, 1]")));
            }
            edges.push((line_no, i, j, w));
        }
        let max_idx = edges.iter().map(|&(_, i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        let n = declared_n.unwrap_or(max_idx);
        if n == 0 {
            return Err(Error::Parse {
                line: 0,
                msg: "edge list declares no nodes".into(),
            });
        }
        let mut a = Array2::zeros((n, n));
        for &(line, i, j, w) in &edges {
            if i >= n || j >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge ({i},{j}) exceeds declared n = {n}"),
                });
            }
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
        let class = declared_class.unwrap_or_else(|| {
            if a.iter().all(|&x| x == 0.0 || x == 1.0) {
                GraphClass::Unweighted
            } else {
                GraphClass::Weighted
            }
        });
        SampledGraph::new(a, class)
    }
}

/// Node feature matrix, `n` rows by `F` channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Array2<f64>,
}

impl FeatureMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::dim("feature matrix must have at least one row and column"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("feature matrix has non-finite entries"));
        }
        Ok(FeatureMatrix { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (0..self.channels()).map(|f| format!("z{f}")).collect();
        let mut out = header.join(",");
        out.push('\n');
        for row in self.values.rows() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad feature value `{s}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let f = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != f) {
            return Err(Error::dim("feature rows have unequal lengths"));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let n = if f == 0 { 0 } else { flat.len() / f };
        let values = Array2::from_shape_vec((n, f), flat).map_err(|e| Error::dim(e.to_string()))?;
        FeatureMatrix::new(values)
    }
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / n as f64)
}

/// `A_ij = W(u_i, u_j)` with `u_i = (i−1)/n`.
pub fn sample_weighted(spec: &GraphonSpec, n: usize) -> Result<SampledGraph> {
    if spec.value_class() != ValueClass::Weighted {
        return Err(Error::WrongRegime(format!(
            "`{}` is a binary graphon; use sample_unweighted",
            spec.name()
        )));
    }
    if n < 1 {
        return Err(Error::invalid("need at least one node"));
    }
    let u: Vec<f64> = grid(n).collect();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let w = spec.evaluate(u[i], u[j]);
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
    }
    Ok(SampledGraph {
        adjacency: a,
        class: GraphClass::Weighted,
    })
}

/// `A_ij = 1` iff `[i/n, (i+1)/n) × [j/n, (j+1)/n)` meets the support in
/// positive area.
pub fn sample_unweighted(spec: &GraphonSpec, n: usize) -> Result<SampledGraph> {
    if spec.value_class() != ValueClass::Binary {
        return Err(Error::WrongRegime(format!(
            "`{}` is a weighted graphon; use sample_weighted",
            spec.name()
        )));
    }
    if n < 1 {
        return Err(Error::invalid("need at least one node"));
    }
    let m = n as u64;
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            if spec.cell_intersects_support(&Cell::mesh(m, i as u64, j as u64))? {
                a[[i, j]] = 1.0;
                a[[j, i]] = 1.0;
            }
        }
    }
    Ok(SampledGraph {
        adjacency: a,
        class: GraphClass::Unweighted,
    })
}

/// Samples `W` in the regime matching its value class.
pub fn sample_graph(spec: &GraphonSpec, n: usize) -> Result<SampledGraph> {
    match spec.value_class() {
        ValueClass::Weighted => sample_weighted(spec, n),
        ValueClass::Binary => sample_unweighted(spec, n),
    }
}

/// Row `i` is `Z(u_i)`.
pub fn sample_features_pointwise(z: &FeatureFunction, n: usize) -> Result<FeatureMatrix> {
    if n < 1 {
        return Err(Error::invalid("need at least one node"));
    }
    let mut x = Array2::zeros((n, z.dim()));
    for (i, u) in grid(n).enumerate() {
        z.eval_into(u, x.row_mut(i).as_slice_mut().expect("standard layout"));
    }
    FeatureMatrix::new(x)
}

/// Row `i` is the mean of `Z` over `[i/n, (i+1)/n)` by `q`-point
/// Gauss–Legendre quadrature.
pub fn sample_features_cell_average(z: &FeatureFunction, n: usize, q: usize) -> Result<FeatureMatrix> {
    if n < 1 || q < 1 {
        return Err(Error::invalid("need n >= 1 and q >= 1"));
    }
    let rule = gauss_legendre(q);
    let f = z.dim();
    let mut x = Array2::zeros((n, f));
    let mut buf = vec![0.0; f];
    let h = 1.0 / n as f64;
    for i in 0..n {
        let mid = (i as f64 + 0.5) * h;
        let mut row = x.row_mut(i);
        for &(node, weight) in &rule {
            z.eval_into(mid + 0.5 * h * node, &mut buf);
            for (acc, v) in row.iter_mut().zip(&buf) {
                *acc += 0.5 * weight * v;
            }
        }
    }
    FeatureMatrix::new(x)
}

/// Features in the regime matching the graphon: point samples for weighted
/// graphons, cell averages for binary ones.
pub fn sample_features(spec: &GraphonSpec, z: &FeatureFunction, n: usize) -> Result<FeatureMatrix> {
    match spec.value_class() {
        ValueClass::Weighted => sample_features_pointwise(z, n),
        ValueClass::Binary => sample_features_cell_average(z, n, DEFAULT_QUAD_POINTS),
    }
}

pub fn graph_shift(graph: &SampledGraph) -> Array2<f64> {
    &graph.adjacency / graph.n() as f64
}

pub fn induce_kernel(graph: &SampledGraph) -> PiecewiseKernel {
    PiecewiseKernel::uniform(graph.adjacency.clone()).expect("square nonempty adjacency")
}

pub fn induce_features(features: &Array2<f64>) -> Result<PiecewiseConstant> {
    PiecewiseConstant::uniform(features.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Kernel;
    use ndarray::array;

    fn cos1() -> FeatureFunction {
        FeatureFunction::new(
            FeatureKind::Fourier,
            vec![FeatureChannel::Fourier {
                cos: vec![1.0],
                sin: vec![0.0],
            }],
        )
        .unwrap()
    }

    #[test]
    fn weighted_samples() {
        let g = sample_weighted(&GraphonSpec::tent(1.0).unwrap(), 2).unwrap();
        assert_eq!(g.adjacency(), &array![[1.0, 0.5], [0.5, 1.0]]);
        let g = sample_weighted(&GraphonSpec::tent(0.5).unwrap(), 2).unwrap();
        assert!((g.adjacency()[[0, 1]] - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        let osc = GraphonSpec::by_name("oscillatory").unwrap();
        let g = sample_weighted(&osc, 1).unwrap();
        assert_eq!(g.adjacency()[[0, 0]], osc.evaluate(0.0, 0.0));
        assert!(matches!(
            sample_weighted(&GraphonSpec::by_name("hsbm").unwrap(), 4),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn unweighted_samples() {
        let g = sample_unweighted(&GraphonSpec::checkerboard(2).unwrap(), 2).unwrap();
        assert_eq!(g.adjacency(), &array![[1.0, 0.0], [0.0, 1.0]]);
        let full = GraphonSpec::triadic_carpet([[true; 3]; 3], 3).unwrap();
        let g = sample_unweighted(&full, 5).unwrap();
        assert!(g.adjacency().iter().all(|&a| a == 1.0));
        for name in ["hsbm", "checkerboard", "hexaflake", "sierpinski"] {
            let g = sample_unweighted(&GraphonSpec::by_name(name).unwrap(), 1).unwrap();
            assert_eq!(g.adjacency()[[0, 0]], 1.0);
        }
        assert!(matches!(
            sample_unweighted(&GraphonSpec::tent(1.0).unwrap(), 4),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn pointwise_features() {
        let lin = FeatureFunction::linear(1, 1.0, 0.0).unwrap();
        let x = sample_features_pointwise(&lin, 4).unwrap();
        assert_eq!(x.values().column(0).to_vec(), vec![0.0, 0.25, 0.5, 0.75]);
        let c = sample_features_pointwise(&FeatureFunction::constant(&[2.5]).unwrap(), 3).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
        let x = sample_features_pointwise(&cos1(), 2).unwrap();
        assert_eq!(x.values()[[0, 0]], 1.0);
        assert!((x.values()[[1, 0]] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cell_average_features() {
        let lin = FeatureFunction::linear(1, 1.0, 0.0).unwrap();
        let x = sample_features_cell_average(&lin, 2, 2).unwrap();
        assert!((x.values()[[0, 0]] - 0.25).abs() < 1e-15);
        assert!((x.values()[[1, 0]] - 0.75).abs() < 1e-15);
        let c = sample_features_cell_average(&FeatureFunction::constant(&[-1.5]).unwrap(), 4, 1).unwrap();
        assert!(c.values().iter().all(|&v| (v + 1.5).abs() < 1e-15));
        // ∫₀¹ cos 2πu du = 0; the 8-point rule is off by about 9e-11.
        let x = sample_features_cell_average(&cos1(), 1, 8).unwrap();
        assert!(x.values()[[0, 0]].abs() < 1e-10);
        let x = sample_features_cell_average(&cos1(), 1, 10).unwrap();
        assert!(x.values()[[0, 0]].abs() < 1e-12);
    }

    #[test]
    fn shift_and_induced() {
        let g = SampledGraph::new(array![[1.0, 0.5], [0.5, 1.0]], GraphClass::Weighted).unwrap();
        assert_eq!(graph_shift(&g), array![[0.5, 0.25], [0.25, 0.5]]);
        let ones = SampledGraph::new(Array2::ones((4, 4)), GraphClass::Unweighted).unwrap();
        assert!(graph_shift(&ones).iter().all(|&s| s == 0.25));
        let k = induce_kernel(&g);
        for i in 0..2 {
            for j in 0..2 {
                let mid = |t: usize| (t as f64 + 0.5) / 2.0;
                assert_eq!(k.value(mid(i), mid(j)), g.adjacency()[[i, j]]);
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = sample_weighted(&GraphonSpec::tent(0.5).unwrap(), 7).unwrap();
        let back = SampledGraph::from_edge_csv(&g.to_edge_csv()).unwrap();
        assert_eq!(back, g);
        let h = sample_unweighted(&GraphonSpec::by_name("hexaflake").unwrap(), 9).unwrap();
        assert_eq!(SampledGraph::from_edge_csv(&h.to_edge_csv()).unwrap(), h);
        let x = sample_features_pointwise(&cos1(), 5).unwrap();
        assert_eq!(FeatureMatrix::from_csv(&x.to_csv()).unwrap(), x);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = SampledGraph::from_edge_csv("0,1\n1,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = SampledGraph::from_edge_csv("n=2\n0,1,0.5\n0,5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = SampledGraph::from_edge_csv("0,1,1.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let g = SampledGraph::from_edge_csv("# comment\n0,1\n1,2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.class(), GraphClass::Unweighted);
    }
}
