use ndarray::Array2;

use super::Kernel;
use crate::error::{Error, Result};
use crate::sampling::SampledGraph;

/// Largest motif accepted by the exact enumerators; the cost is `n^v`.
pub const MAX_MOTIF_VERTICES: usize = 4;

/// A small simple graph used as a homomorphism pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Motif {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("motif needs at least one vertex"));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({a},{b}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::invalid(format!("duplicate edge ({a},{b})")));
            }
            normalized.push(e);
        }
        Ok(Motif {
            vertex_count,
            edges: normalized,
        })
    }

    pub fn edge() -> Self {
        Motif::new(2, &[(0, 1)]).expect("valid motif")
    }

    pub fn triangle() -> Self {
        Motif::new(3, &[(0, 1), (1, 2), (0, 2)]).expect("valid motif")
    }

    /// Path with `k` edges.
    pub fn path(k: usize) -> Result<Self> {
        let edges: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        Motif::new(k + 1, &edges)
    }

    pub fn four_cycle() -> Self {
        Motif::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).expect("valid motif")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn guard(&self) -> Result<()> {
        if self.vertex_count > MAX_MOTIF_VERTICES {
            return Err(Error::ComplexityGuard(format!(
                "motif has {} vertices; exact enumeration is limited to {MAX_MOTIF_VERTICES}",
                self.vertex_count
            )));
        }
        Ok(())
    }
}

/// `t(F, A) = n^{-v} Σ_φ Π_{(i,j)∈E(F)} A[φ(i), φ(j)]` by enumerating every
/// vertex map.
pub fn hom_density_matrix(motif: &Motif, a: &Array2<f64>) -> Result<f64> {
    motif.guard()?;
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::dim(format!("expected a square nonempty matrix, got {:?}", a.dim())));
    }
    // Edges are charged at the step where their later endpoint is assigned.
    let v = motif.vertex_count;
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); v];
    for &(x, y) in &motif.edges {
        closing[y].push(x);
    }
    let mut map = vec![0usize; v];
    let total = extend(a, &closing, &mut map, 0, 1.0);
    Ok(total / (n as f64).powi(v as i32))
}

fn extend(a: &Array2<f64>, closing: &[Vec<usize>], map: &mut [usize], depth: usize, weight: f64) -> f64 {
    if depth == map.len() {
        return weight;
    }
    let mut sum = 0.0;
    for img in 0..a.nrows() {
        let mut w = weight;
        for &prev in &closing[depth] {
            w *= a[[map[prev], img]];
        }
        if w == 0.0 {
            continue;
        }
        map[depth] = img;
        sum += extend(a, closing, map, depth + 1, w);
    }
    sum
}

pub fn hom_density_graph(motif: &Motif, graph: &SampledGraph) -> Result<f64> {
    hom_density_matrix(motif, graph.adjacency())
}

/// Midpoint rule with `m` points per coordinate for
/// `∫ Π_{(i,j)∈E(F)} W(x_i, x_j) dx`.
pub fn hom_density_graphon(motif: &Motif, kernel: &dyn Kernel, m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::invalid("quadrature grid needs m >= 1"));
    }
    motif.guard()?;
    let mid = |i: usize| (i as f64 + 0.5) / m as f64;
    let values = Array2::from_shape_fn((m, m), |(i, j)| kernel.value(mid(i), mid(j)));
    hom_density_matrix(motif, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphonSpec;

    struct Constant(f64);
    impl Kernel for Constant {
        fn value(&self, _u: f64, _v: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn edge_density_of_triangle_graph() {
        let k3 = Array2::from_shape_fn((3, 3), |(i, j)| if i == j { 0.0 } else { 1.0 });
        let t = hom_density_matrix(&Motif::edge(), &k3).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
        let tri = hom_density_matrix(&Motif::triangle(), &k3).unwrap();
        assert!((tri - 6.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_kernels() {
        for motif in [Motif::edge(), Motif::triangle(), Motif::four_cycle()] {
            assert_eq!(hom_density_graphon(&motif, &Constant(1.0), 7).unwrap(), 1.0);
        }
        assert_eq!(hom_density_graphon(&Motif::edge(), &Constant(0.0), 7).unwrap(), 0.0);
        let empty = Array2::zeros((5, 5));
        assert_eq!(hom_density_matrix(&Motif::triangle(), &empty).unwrap(), 0.0);
    }

    #[test]
    fn tent_edge_density() {
        let tent = GraphonSpec::tent(1.0).unwrap();
        let t = hom_density_graphon(&Motif::edge(), &tent, 256).unwrap();
        // ∫∫ 1 − |u − v| = 1 − 1/3.
        assert!((t - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            hom_density_matrix(&Motif::path(4).unwrap(), &Array2::ones((2, 2))),
            Err(Error::ComplexityGuard(_))
        ));
        assert!(Motif::new(2, &[(0, 0)]).is_err());
        assert!(Motif::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(hom_density_graphon(&Motif::edge(), &Constant(1.0), 0).is_err());
    }
}
