use super::{Cell, GraphonKind, GraphonSpec};
use crate::analysis::least_squares;
use crate::error::{Error, Result};

/// A planar set described by which mesh cells it meets.
pub trait CellSet {
    fn meets(&self, cell: &Cell) -> Result<bool>;

    /// Number of cells of the uniform `m × m` mesh met by the set.
    fn count(&self, m: u64) -> Result<u64> {
        let mut n = 0;
        for i in 0..m {
            for j in 0..m {
                if self.meets(&Cell::mesh(m, i, j))? {
                    n += 1;
                }
            }
        }
        Ok(n)
    }
}

/// `{(x, y) : x ∈ [0,1]}` for a fixed height `y`.
#[derive(Debug, Clone, Copy)]
pub struct HorizontalSegment {
    pub y: f64,
}

impl CellSet for HorizontalSegment {
    fn meets(&self, cell: &Cell) -> Result<bool> {
        let (_, _, y0, y1) = cell.bounds();
        let top = if cell.y1 == cell.den { f64::INFINITY } else { y1 };
        Ok(self.y >= y0 && self.y < top)
    }

    fn count(&self, m: u64) -> Result<u64> {
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FullSquare;

impl CellSet for FullSquare {
    fn meets(&self, _cell: &Cell) -> Result<bool> {
        Ok(true)
    }

    fn count(&self, m: u64) -> Result<u64> {
        Ok(m * m)
    }
}

/// Support `{W = 1}` of a binary graphon.
#[derive(Debug, Clone, Copy)]
pub struct SupportSet<'a>(pub &'a GraphonSpec);

impl CellSet for SupportSet<'_> {
    fn meets(&self, cell: &Cell) -> Result<bool> {
        self.0.cell_intersects_support(cell)
    }
}

/// Topological boundary of the support: closed cells meeting the closures
/// of both the support and its complement.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySet<'a>(pub &'a GraphonSpec);

impl CellSet for BoundarySet<'_> {
    fn meets(&self, cell: &Cell) -> Result<bool> {
        Ok(self.0.cell_touches_support(cell)? && self.0.cell_touches_complement(cell)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    pub estimate: f64,
    pub stderr: f64,
    /// `(m, N)` pairs: mesh size `δ = 1/m` and number of occupied cells.
    pub counts: Vec<(u64, u64)>,
}

/// Least-squares slope of `log N_δ` against `−log δ` over mesh sizes
/// `δ = 1/m` for each `m` in `mesh`.
pub fn box_counting_dimension(set: &dyn CellSet, mesh: &[u64]) -> Result<BoxCount> {
    if mesh.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "box counting needs at least 2 mesh sizes, got {}",
            mesh.len()
        )));
    }
    if mesh.iter().any(|&m| m < 2) {
        return Err(Error::invalid("mesh sizes must be 1/m with m >= 2"));
    }
    if mesh.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("mesh sizes must be strictly decreasing"));
    }
    let mut counts = Vec::with_capacity(mesh.len());
    for &m in mesh {
        let n = set.count(m)?;
        if n == 0 {
            return Err(Error::LogDomain(format!(
                "no occupied cells at mesh size 1/{m}; the set is empty or finer than the mesh"
            )));
        }
        counts.push((m, n));
    }
    let xs: Vec<f64> = counts.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let fit = least_squares(&xs, &ys)?;
    Ok(BoxCount {
        estimate: fit.slope,
        stderr: fit.stderr,
        counts,
    })
}

/// Mesh denominators matched to the spec's natural scale: powers of three for
/// triadic carpets, powers of two otherwise.
///
/// Below the scale `3^-d` the boundary of a depth-`d` carpet is a finite
/// union of segments and counts grow like `3^j`, so the triadic range
/// `j = 3..6` is clipped to `j ≤ d − 1`.
pub fn default_schedule(spec: &GraphonSpec) -> Vec<u64> {
    match spec.kind() {
        GraphonKind::TriadicCarpet(c) => {
            let hi = 6.min(c.depth().saturating_sub(1)).max(2);
            let lo = 3.min(hi - 1);
            (lo..=hi).map(|j| 3u64.pow(j)).collect()
        }
        _ => (4..=9).map(|j| 2u64.pow(j)).collect(),
    }
}
