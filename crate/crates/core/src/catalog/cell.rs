use super::{BlockPattern, GraphonKind, GraphonSpec, TriadicCarpet, ValueClass};
use crate::error::{Error, Result};

/// Half-open rectangle `[x0/den, x1/den) × [y0/den, y1/den)` with integer
/// numerators, so that alignment with block and triadic grids is decided
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub den: u64,
    pub x0: u64,
    pub x1: u64,
    pub y0: u64,
    pub y1: u64,
}

impl Cell {
    pub fn new(den: u64, x0: u64, x1: u64, y0: u64, y1: u64) -> Result<Self> {
        if den == 0 || x0 >= x1 || y0 >= y1 || x1 > den || y1 > den {
            return Err(Error::invalid(format!(
                "cell [{x0},{x1})x[{y0},{y1}) / {den} is empty or leaves the unit square"
            )));
        }
        Ok(Cell {
            den,
            x0,
            x1,
            y0,
            y1,
        })
    }

    /// Cell `(i, j)` of the uniform `m × m` mesh.
    pub fn mesh(m: u64, i: u64, j: u64) -> Self {
        Cell {
            den: m,
            x0: i,
            x1: i + 1,
            y0: j,
            y1: j + 1,
        }
    }

    pub fn unit() -> Self {
        Cell::mesh(1, 0, 0)
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let d = self.den as f64;
        (
            self.x0 as f64 / d,
            self.x1 as f64 / d,
            self.y0 as f64 / d,
            self.y1 as f64 / d,
        )
    }

    /// Does `[a/s, (a+1)/s)` overlap the cell's x-range in positive length,
    /// or, when `closed`, do the closed intervals touch at all?
    fn hits_x(&self, a: u64, s: u64, closed: bool) -> bool {
        hits(a, s, self.x0, self.x1, self.den, closed)
    }

    fn hits_y(&self, b: u64, s: u64, closed: bool) -> bool {
        hits(b, s, self.y0, self.y1, self.den, closed)
    }

    /// Index range of the `k`-grid intervals met by `[lo/den, hi/den)`, or
    /// touched by `[lo/den, hi/den]` when `closed`.
    fn block_range(lo: u64, hi: u64, den: u64, k: u64, closed: bool) -> (u64, u64) {
        let (lo, hi, den, k) = (lo as u128, hi as u128, den as u128, k as u128);
        let mut first = lo * k / den;
        let mut last = (hi * k).div_ceil(den) - 1;
        if closed {
            if (lo * k) % den == 0 && first > 0 {
                first -= 1;
            }
            last = hi * k / den;
        }
        (first as u64, last.min(k - 1) as u64)
    }
}

fn hits(a: u64, s: u64, lo: u64, hi: u64, den: u64, closed: bool) -> bool {
    let (a, s, lo, hi, den) = (a as u128, s as u128, lo as u128, hi as u128, den as u128);
    if closed {
        a * den <= hi * s && lo * s <= (a + 1) * den
    } else {
        a * den < hi * s && lo * s < (a + 1) * den
    }
}

impl GraphonSpec {
    /// Whether the cell meets the support `{W = 1}` in a set of positive area.
    pub fn cell_intersects_support(&self, cell: &Cell) -> Result<bool> {
        self.cell_meets(cell, true, false)
    }

    /// Whether the cell meets the complement `{W = 0}` in a set of positive
    /// area.
    pub fn cell_intersects_complement(&self, cell: &Cell) -> Result<bool> {
        self.cell_meets(cell, false, false)
    }

    /// Whether the closed cell meets the closure of the support.
    pub fn cell_touches_support(&self, cell: &Cell) -> Result<bool> {
        self.cell_meets(cell, true, true)
    }

    /// Whether the closed cell meets the closure of the complement.
    pub fn cell_touches_complement(&self, cell: &Cell) -> Result<bool> {
        self.cell_meets(cell, false, true)
    }

    fn cell_meets(&self, cell: &Cell, target: bool, closed: bool) -> Result<bool> {
        if self.value_class() != ValueClass::Binary {
            return Err(Error::Unsupported(format!(
                "cell predicates need a binary graphon, `{}` is weighted",
                self.name()
            )));
        }
        Ok(match self.kind() {
            GraphonKind::BlockPattern(p) => block_meets(p, cell, target, closed),
            GraphonKind::TriadicCarpet(c) => carpet_meets(c, cell, target, closed, 0, 0, 0),
            _ => unreachable!("binary kinds are block patterns and carpets"),
        })
    }
}

fn block_meets(p: &BlockPattern, cell: &Cell, target: bool, closed: bool) -> bool {
    let k = p.k() as u64;
    let (i0, i1) = Cell::block_range(cell.x0, cell.x1, cell.den, k, closed);
    let (j0, j1) = Cell::block_range(cell.y0, cell.y1, cell.den, k, closed);
    (i0..=i1).any(|i| (j0..=j1).any(|j| p.get(i as usize, j as usize) == target))
}

/// Depth-first search over retained squares `(a, b)` at `level` that the cell
/// reaches.
fn carpet_meets(c: &TriadicCarpet, cell: &Cell, target: bool, closed: bool, level: u32, a: u64, b: u64) -> bool {
    let side = 3u64.pow(level);
    if !(cell.hits_x(a, side, closed) && cell.hits_y(b, side, closed)) {
        return false;
    }
    if level == c.depth() {
        return target;
    }
    let child = side * 3;
    for du in 0..3u64 {
        for dv in 0..3u64 {
            let (ca, cb) = (3 * a + du, 3 * b + dv);
            if c.mask()[du as usize][dv as usize] {
                if carpet_meets(c, cell, target, closed, level + 1, ca, cb) {
                    return true;
                }
            } else if !target && cell.hits_x(ca, child, closed) && cell.hits_y(cb, child, closed) {
                return true;
            }
        }
    }
    false
}

/// Fallback predicate for cells that do not align with a spec's natural grid:
/// evaluates the four corners, the centre and an `8 × 8` interior lattice.
/// A hit proves intersection; a miss does not prove disjointness.
pub fn probe_intersects_support(spec: &GraphonSpec, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<bool> {
    if spec.value_class() != ValueClass::Binary {
        return Err(Error::Unsupported(format!(
            "cell predicates need a binary graphon, `{}` is weighted",
            spec.name()
        )));
    }
    // Right and top edges are open; nudge the corners inside.
    let xr = f64::max(x0, x1 - (x1 - x0) * 1e-9);
    let yr = f64::max(y0, y1 - (y1 - y0) * 1e-9);
    let mut points = vec![
        (x0, y0),
        (xr, y0),
        (x0, yr),
        (xr, yr),
        (0.5 * (x0 + x1), 0.5 * (y0 + y1)),
    ];
    for i in 0..8 {
        for j in 0..8 {
            let fx = (i as f64 + 0.5) / 8.0;
            let fy = (j as f64 + 0.5) / 8.0;
            points.push((x0 + fx * (x1 - x0), y0 + fy * (y1 - y0)));
        }
    }
    Ok(points.iter().any(|&(u, v)| spec.evaluate(u, v) == 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pattern_cells() {
        let spec = GraphonSpec::hsbm(2, &[true, false, false, true], 1).unwrap();
        let off = Cell::new(2, 0, 1, 1, 2).unwrap();
        assert!(!spec.cell_intersects_support(&off).unwrap());
        assert!(spec.cell_intersects_complement(&off).unwrap());
        assert!(spec.cell_intersects_support(&Cell::unit()).unwrap());
        // [0.25, 0.75)² straddles all four blocks.
        let mid = Cell::new(4, 1, 3, 1, 3).unwrap();
        assert!(spec.cell_intersects_support(&mid).unwrap());
        assert!(spec.cell_intersects_complement(&mid).unwrap());
        // [0, 0.5) x [0, 0.5) touches the off-diagonal block only at an edge.
        let diag = Cell::new(2, 0, 1, 0, 1).unwrap();
        assert!(!spec.cell_intersects_complement(&diag).unwrap());
        assert!(spec.cell_touches_complement(&diag).unwrap());
        let inner = Cell::new(4, 0, 1, 0, 1).unwrap();
        assert!(!spec.cell_touches_complement(&inner).unwrap());
    }

    #[test]
    fn full_carpet_meets_everything() {
        let spec = GraphonSpec::triadic_carpet([[true; 3]; 3], 4).unwrap();
        for m in [1u64, 2, 5, 7, 27] {
            for i in 0..m {
                for j in 0..m {
                    let cell = Cell::mesh(m, i, j);
                    assert!(spec.cell_intersects_support(&cell).unwrap());
                    assert!(!spec.cell_intersects_complement(&cell).unwrap());
                }
            }
        }
    }

    #[test]
    fn sierpinski_hole() {
        let spec = GraphonSpec::sierpinski(3).unwrap();
        let hole = Cell::new(3, 1, 2, 1, 2).unwrap();
        assert!(!spec.cell_intersects_support(&hole).unwrap());
        let inner = Cell::new(9, 4, 5, 4, 5).unwrap();
        assert!(!spec.cell_intersects_support(&inner).unwrap());
        let corner = Cell::new(3, 0, 1, 0, 1).unwrap();
        assert!(spec.cell_intersects_support(&corner).unwrap());
        assert!(spec.cell_intersects_complement(&corner).unwrap());
        let leaf = Cell::new(27, 0, 1, 0, 1).unwrap();
        assert!(!spec.cell_intersects_complement(&leaf).unwrap());
        // A retained leaf whose corner touches the hole [4/27, 5/27) x [1/27, 2/27).
        let edge = Cell::new(9, 1, 2, 0, 1).unwrap();
        assert!(!spec.cell_intersects_complement(&Cell::new(27, 3, 4, 2, 3).unwrap()).unwrap());
        assert!(spec.cell_touches_complement(&Cell::new(27, 3, 4, 2, 3).unwrap()).unwrap());
        assert!(spec.cell_touches_support(&edge).unwrap());
    }

    #[test]
    fn weighted_spec_is_unsupported() {
        let tent = GraphonSpec::tent(1.0).unwrap();
        assert!(matches!(
            tent.cell_intersects_support(&Cell::unit()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn exact_predicate_agrees_with_probe_on_hits() {
        for name in ["hsbm", "checkerboard", "hexaflake", "sierpinski"] {
            let spec = GraphonSpec::by_name(name).unwrap();
            for m in [7u64, 16, 81] {
                for i in 0..m {
                    for j in 0..m {
                        let cell = Cell::mesh(m, i, j);
                        let (x0, x1, y0, y1) = cell.bounds();
                        let probe = probe_intersects_support(&spec, x0, x1, y0, y1).unwrap();
                        if probe {
                            assert!(spec.cell_intersects_support(&cell).unwrap(), "{name} {m} {i} {j}");
                        }
                    }
                }
            }
        }
    }
}
