//! Analytic graphons, their support geometry, and graph-limit statistics.
//!
//! A graphon is a symmetric measurable kernel `W: [0,1]² → [0,1]`. The
//! catalog ships the weighted kernels used for the Hölder-rate experiments
//! (tent, oscillatory) and the `{0,1}`-valued kernels used for the
//! box-dimension experiments (block patterns and triadic carpets).

mod boxdim;
mod cell;
mod distance;
mod motif;

pub use boxdim::{
    box_counting_dimension, default_schedule, BoundarySet, BoxCount, CellSet, FullSquare,
    HorizontalSegment, SupportSet,
};
pub use cell::{probe_intersects_support, Cell};
pub use distance::{kernel_distance, Norm};
pub use motif::{hom_density_graph, hom_density_graphon, hom_density_matrix, Motif, MAX_MOTIF_VERTICES};

use crate::error::{Error, Result};
use crate::record::{join, Record};
use crate::sampling::PiecewiseKernel;

/// Anything that can be evaluated as a kernel on the unit square.
pub trait Kernel {
    fn value(&self, u: f64, v: f64) -> f64;

    /// Exact block structure, when the kernel has one.
    fn as_piecewise(&self) -> Option<&PiecewiseKernel> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueClass {
    Weighted,
    Binary,
}

impl ValueClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueClass::Weighted => "weighted",
            ValueClass::Binary => "binary",
        }
    }
}

/// `|W(u₂,v₂) − W(u₁,v₁)| ≤ a1 (|u₂−u₁| + |v₂−v₁|)^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderMeta {
    pub a1: f64,
    pub alpha: f64,
}

/// Symmetric `{0,1}` pattern on a `k × k` block grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPattern {
    k: usize,
    cells: Vec<bool>,
    levels: u32,
}

impl BlockPattern {
    pub fn new(k: usize, cells: Vec<bool>, levels: u32) -> Result<Self> {
        if k == 0 || cells.len() != k * k {
            return Err(Error::invalid(format!(
                "block pattern needs k*k entries, got k={k} and {} entries",
                cells.len()
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if cells[i * k + j] != cells[j * k + i] {
                    return Err(Error::invalid(format!(
                        "block pattern is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(BlockPattern { k, cells, levels })
    }

    /// `levels`-fold Kronecker power of a symmetric base pattern.
    pub fn kronecker(base_k: usize, base: &[bool], levels: u32) -> Result<Self> {
        if levels < 1 {
            return Err(Error::invalid("kronecker refinement needs at least one level"));
        }
        let base = BlockPattern::new(base_k, base.to_vec(), 1)?;
        let mut k = base.k;
        let mut cells = base.cells.clone();
        for _ in 1..levels {
            let nk = k * base.k;
            let mut next = vec![false; nk * nk];
            for (i, row) in next.chunks_mut(nk).enumerate() {
                for (j, slot) in row.iter_mut().enumerate() {
                    let outer = cells[(i / base.k) * k + j / base.k];
                    let inner = base.cells[(i % base.k) * base.k + j % base.k];
                    *slot = outer && inner;
                }
            }
            k = nk;
            cells = next;
        }
        BlockPattern::new(k, cells, levels)
    }

    pub fn checkerboard(k: usize) -> Result<Self> {
        let cells = (0..k * k).map(|idx| (idx / k + idx % k) % 2 == 0).collect();
        BlockPattern::new(k, cells, 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.k + j]
    }

    fn has_both_values(&self) -> bool {
        self.cells.iter().any(|&c| c) && self.cells.iter().any(|&c| !c)
    }
}

/// Self-similar set on the triadic grid: at every level each retained
/// square keeps the sub-squares flagged in `mask` (row = u digit, column =
/// v digit).
#[derive(Debug, Clone, PartialEq)]
pub struct TriadicCarpet {
    mask: [[bool; 3]; 3],
    depth: u32,
}

impl TriadicCarpet {
    /// Deepest supported recursion; `3^20` still fits comfortably in `u64`
    /// cross-multiplications done in `u128`.
    pub const MAX_DEPTH: u32 = 20;

    pub fn new(mask: [[bool; 3]; 3], depth: u32) -> Result<Self> {
        if depth < 1 || depth > Self::MAX_DEPTH {
            return Err(Error::invalid(format!(
                "carpet depth must lie in [1, {}], got {depth}",
                Self::MAX_DEPTH
            )));
        }
        for i in 0..3 {
            for j in 0..i {
                if mask[i][j] != mask[j][i] {
                    return Err(Error::invalid("carpet mask must be symmetric"));
                }
            }
        }
        if !mask.iter().flatten().any(|&m| m) {
            return Err(Error::invalid("carpet mask retains no sub-square"));
        }
        Ok(TriadicCarpet { mask, depth })
    }

    pub fn mask(&self) -> &[[bool; 3]; 3] {
        &self.mask
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn retained(&self) -> usize {
        self.mask.iter().flatten().filter(|&&m| m).count()
    }

    fn index_at_depth(&self, x: f64) -> u64 {
        let scale = 3u64.pow(self.depth);
        let idx = (x.clamp(0.0, 1.0) * scale as f64).floor() as u64;
        idx.min(scale - 1)
    }

    fn contains(&self, u: f64, v: f64) -> bool {
        let mut iu = self.index_at_depth(u);
        let mut iv = self.index_at_depth(v);
        for _ in 0..self.depth {
            let (du, dv) = ((iu % 3) as usize, (iv % 3) as usize);
            if !self.mask[du][dv] {
                return false;
            }
            iu /= 3;
            iv /= 3;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphonKind {
    /// `W(u,v) = 1 − |u − v|^alpha`.
    Tent { alpha: f64 },
    /// `W(u,v) = (1 + sin(2πfu) sin(2πfv)) / 2`.
    Oscillatory { frequency: f64 },
    /// `W(u,v) = B[⌊k u⌋, ⌊k v⌋]`.
    BlockPattern(BlockPattern),
    TriadicCarpet(TriadicCarpet),
}

/// A named analytic graphon with its regularity metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonSpec {
    name: String,
    kind: GraphonKind,
}

/// CLI names of the shipped graphons.
pub const CATALOG_NAMES: [&str; 7] = [
    "tent",
    "holder-tent",
    "oscillatory",
    "hsbm",
    "checkerboard",
    "hexaflake",
    "sierpinski",
];

pub const DEFAULT_CARPET_DEPTH: u32 = 5;
pub const DEFAULT_HSBM_LEVELS: u32 = 3;
pub const DEFAULT_CHECKERBOARD_K: usize = 10;

impl GraphonSpec {
    pub fn tent(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("tent exponent must lie in (0,1], got {alpha}")));
        }
        let name = if alpha == 1.0 { "tent" } else { "holder-tent" };
        Ok(Self::named(name, GraphonKind::Tent { alpha }))
    }

    pub fn oscillatory(frequency: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::invalid(format!(
                "oscillation frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self::named("oscillatory", GraphonKind::Oscillatory { frequency }))
    }

    /// Hierarchical block model: Kronecker power of a symmetric base pattern.
    pub fn hsbm(base_k: usize, base: &[bool], levels: u32) -> Result<Self> {
        let pattern = BlockPattern::kronecker(base_k, base, levels)?;
        Ok(Self::named("hsbm", GraphonKind::BlockPattern(pattern)))
    }

    pub fn checkerboard(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("checkerboard needs k >= 1"));
        }
        Ok(Self::named(
            "checkerboard",
            GraphonKind::BlockPattern(BlockPattern::checkerboard(k)?),
        ))
    }

    pub fn block_pattern(pattern: BlockPattern) -> Self {
        Self::named("block-pattern", GraphonKind::BlockPattern(pattern))
    }

    pub fn triadic_carpet(mask: [[bool; 3]; 3], depth: u32) -> Result<Self> {
        Ok(Self::named(
            "triadic-carpet",
            GraphonKind::TriadicCarpet(TriadicCarpet::new(mask, depth)?),
        ))
    }

    /// Seven of nine sub-squares: the two anti-diagonal corners are dropped,
    /// which is the hexagonal neighbourhood in axial coordinates.
    pub fn hexaflake(depth: u32) -> Result<Self> {
        let mask = [[true, true, false], [true, true, true], [false, true, true]];
        let mut spec = Self::triadic_carpet(mask, depth)?;
        spec.name = "hexaflake".into();
        Ok(spec)
    }

    pub fn sierpinski(depth: u32) -> Result<Self> {
        let mask = [[true, true, true], [true, false, true], [true, true, true]];
        let mut spec = Self::triadic_carpet(mask, depth)?;
        spec.name = "sierpinski".into();
        Ok(spec)
    }

    /// Catalog entry with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "tent" => Self::tent(1.0),
            "holder-tent" => Self::tent(0.5),
            "oscillatory" => Self::oscillatory(10.0),
            "hsbm" => Self::hsbm(2, &[true, false, false, true], DEFAULT_HSBM_LEVELS),
            "checkerboard" => Self::checkerboard(DEFAULT_CHECKERBOARD_K),
            "hexaflake" => Self::hexaflake(DEFAULT_CARPET_DEPTH),
            "sierpinski" => Self::sierpinski(DEFAULT_CARPET_DEPTH),
            other => Err(Error::invalid(format!(
                "unknown graphon `{other}` (known: {})",
                CATALOG_NAMES.join(", ")
            ))),
        }
    }

    fn named(name: &str, kind: GraphonKind) -> Self {
        GraphonSpec {
            name: name.to_string(),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GraphonKind {
        &self.kind
    }

    pub fn value_class(&self) -> ValueClass {
        match self.kind {
            GraphonKind::Tent { .. } | GraphonKind::Oscillatory { .. } => ValueClass::Weighted,
            GraphonKind::BlockPattern(_) | GraphonKind::TriadicCarpet(_) => ValueClass::Binary,
        }
    }

    pub fn holder_meta(&self) -> Option<HolderMeta> {
        match self.kind {
            GraphonKind::Tent { alpha } => Some(HolderMeta { a1: 1.0, alpha }),
            // |∂W/∂u| ≤ π f, likewise for v.
            GraphonKind::Oscillatory { frequency } => Some(HolderMeta {
                a1: std::f64::consts::PI * frequency,
                alpha: 1.0,
            }),
            _ => None,
        }
    }

    /// Box-counting dimension of the support boundary of the idealised set.
    pub fn nominal_box_dim(&self) -> Option<f64> {
        match &self.kind {
            GraphonKind::BlockPattern(p) if p.has_both_values() => Some(1.0),
            GraphonKind::TriadicCarpet(c) if c.retained() < 9 => {
                Some((c.retained() as f64).ln() / 3f64.ln())
            }
            _ => None,
        }
    }

    /// `alpha` for weighted kernels, nominal box dimension for binary ones.
    pub fn regularity(&self) -> Option<f64> {
        match self.value_class() {
            ValueClass::Weighted => self.holder_meta().map(|h| h.alpha),
            ValueClass::Binary => self.nominal_box_dim(),
        }
    }

    pub fn evaluate(&self, u: f64, v: f64) -> f64 {
        match &self.kind {
            GraphonKind::Tent { alpha } => 1.0 - (u - v).abs().powf(*alpha),
            GraphonKind::Oscillatory { frequency } => {
                let w = 2.0 * std::f64::consts::PI * frequency;
                0.5 * (1.0 + (w * u).sin() * (w * v).sin())
            }
            GraphonKind::BlockPattern(p) => {
                let idx = |x: f64| ((x.clamp(0.0, 1.0) * p.k as f64).floor() as usize).min(p.k - 1);
                if p.get(idx(u), idx(v)) {
                    1.0
                } else {
                    0.0
                }
            }
            GraphonKind::TriadicCarpet(c) => {
                if c.contains(u, v) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("name", &self.name);
        match &self.kind {
            GraphonKind::Tent { alpha } => {
                r.set("kind", "tent");
                r.set("alpha", alpha);
            }
            GraphonKind::Oscillatory { frequency } => {
                r.set("kind", "oscillatory");
                r.set("frequency", frequency);
            }
            GraphonKind::BlockPattern(p) => {
                r.set("kind", "block_pattern");
                r.set("k", p.k);
                r.set("levels", p.levels);
                let bits: Vec<u8> = p.cells.iter().map(|&c| c as u8).collect();
                r.set("pattern", join(&bits));
            }
            GraphonKind::TriadicCarpet(c) => {
                r.set("kind", "triadic_carpet");
                r.set("depth", c.depth);
                let bits: Vec<u8> = c.mask.iter().flatten().map(|&m| m as u8).collect();
                r.set("mask", join(&bits));
            }
        }
        r
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        let kind: String = r.require("kind")?;
        let mut spec = match kind.as_str() {
            "tent" => Self::tent(r.require("alpha")?)?,
            "oscillatory" => Self::oscillatory(r.require("frequency")?)?,
            "block_pattern" => {
                let k: usize = r.require("k")?;
                let levels: u32 = r.parse_or("levels", 1)?;
                let bits = r.parse_list::<u8>("pattern")?.unwrap_or_default();
                let cells = bits.iter().map(|&b| b != 0).collect();
                Self::block_pattern(BlockPattern::new(k, cells, levels)?)
            }
            "triadic_carpet" => {
                let depth: u32 = r.require("depth")?;
                let bits = r.parse_list::<u8>("mask")?.unwrap_or_default();
                if bits.len() != 9 {
                    return Err(Error::invalid("carpet mask needs 9 entries"));
                }
                let mut mask = [[false; 3]; 3];
                for (idx, b) in bits.iter().enumerate() {
                    mask[idx / 3][idx % 3] = *b != 0;
                }
                Self::triadic_carpet(mask, depth)?
            }
            other => return Err(Error::invalid(format!("unknown graphon kind `{other}`"))),
        };
        if let Some(name) = r.get("name") {
            spec.name = name.to_string();
        }
        Ok(spec)
    }
}

impl Kernel for GraphonSpec {
    fn value(&self, u: f64, v: f64) -> f64 {
        self.evaluate(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let tent = GraphonSpec::tent(1.0).unwrap();
        assert_eq!(tent.evaluate(0.25, 0.75), 0.5);
        let holder = GraphonSpec::tent(0.5).unwrap();
        assert_eq!(holder.evaluate(0.0, 0.25), 0.5);
        let osc = GraphonSpec::by_name("oscillatory").unwrap();
        assert!((osc.evaluate(0.025, 0.025) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(GraphonSpec::tent(0.0).is_err());
        assert!(GraphonSpec::tent(1.5).is_err());
        assert!(GraphonSpec::sierpinski(0).is_err());
        assert!(GraphonSpec::oscillatory(-1.0).is_err());
        let asym = [[true, false, true], [true, true, true], [true, true, true]];
        assert!(GraphonSpec::triadic_carpet(asym, 3).is_err());
        assert!(BlockPattern::new(2, vec![true, true, false, true], 1).is_err());
    }

    #[test]
    fn hsbm_default_is_block_diagonal() {
        let spec = GraphonSpec::by_name("hsbm").unwrap();
        let GraphonKind::BlockPattern(p) = spec.kind() else {
            panic!("hsbm is a block pattern");
        };
        assert_eq!(p.k(), 8);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(p.get(i, j), i == j);
            }
        }
        assert_eq!(spec.nominal_box_dim(), Some(1.0));
    }

    #[test]
    fn carpet_membership() {
        let s = GraphonSpec::sierpinski(2).unwrap();
        assert_eq!(s.evaluate(0.5, 0.5), 0.0);
        assert_eq!(s.evaluate(0.1, 0.1), 1.0);
        // Centre of the (0,0) level-1 square is removed at level 2.
        assert_eq!(s.evaluate(1.5 / 9.0, 1.5 / 9.0), 0.0);
        assert_eq!(s.evaluate(1.0, 1.0), 1.0);
        let h = GraphonSpec::hexaflake(1).unwrap();
        assert_eq!(h.evaluate(0.1, 0.9), 0.0);
        assert_eq!(h.evaluate(0.9, 0.1), 0.0);
        assert_eq!(h.evaluate(0.1, 0.1), 1.0);
        let dim = h.nominal_box_dim().unwrap();
        assert!((dim - 7f64.ln() / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn record_round_trip() {
        for name in CATALOG_NAMES {
            let spec = GraphonSpec::by_name(name).unwrap();
            let text = spec.to_record().to_text();
            let back = GraphonSpec::from_record(&Record::parse(&text).unwrap()).unwrap();
            assert_eq!(back, spec, "{name}");
        }
    }
}
