//! Vector representations the orbit maps act on.
//!
//! Four concrete representations cover the models in this crate: finite
//! spectral combinations of eigenvectors, compactly supported block step
//! functions, sampled grid functions, and pairs of spectral vectors for
//! second-order systems rewritten in companion form.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Total-order wrapper so eigenvalues can key an ordered map.
/// Ordering is lexicographic by (re, im) using `total_cmp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenKey(pub Complex64);

impl Eq for EigenKey {}

impl PartialOrd for EigenKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EigenKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .re
            .total_cmp(&other.0.re)
            .then(self.0.im.total_cmp(&other.0.im))
    }
}

/// Finite linear combination sum_mu c_mu f_mu of eigenvectors, stored as
/// eigenvalue -> coefficient. Zero coefficients are pruned on construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralVector {
    entries: BTreeMap<EigenKey, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct WireMode {
    mu: Complex64,
    c: Complex64,
}

impl Serialize for SpectralVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let modes: Vec<WireMode> = self
            .entries
            .iter()
            .map(|(k, c)| WireMode { mu: k.0, c: *c })
            .collect();
        modes.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let modes = Vec::<WireMode>::deserialize(d)?;
        for (i, m) in modes.iter().enumerate() {
            if !(m.mu.is_finite() && m.c.is_finite()) {
                return Err(serde::de::Error::custom(format!(
                    "mode {i} has a non-finite eigenvalue or coefficient"
                )));
            }
        }
        Ok(SpectralVector::from_modes(
            modes.into_iter().map(|m| (m.mu, m.c)),
        ))
    }
}

impl SpectralVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from (eigenvalue, coefficient) pairs; duplicate eigenvalues are
    /// summed and exact-zero coefficients dropped.
    pub fn from_modes(modes: impl IntoIterator<Item = (Complex64, Complex64)>) -> Self {
        let mut entries = BTreeMap::new();
        for (mu, c) in modes {
            let slot = entries.entry(EigenKey(mu)).or_insert(Complex64::ZERO);
            *slot += c;
        }
        entries.retain(|_, c| c.norm_sqr() != 0.0);
        SpectralVector { entries }
    }

    pub fn single(mu: Complex64, c: Complex64) -> Self {
        Self::from_modes([(mu, c)])
    }

    pub fn modes(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.entries.iter().map(|(k, c)| (k.0, *c))
    }

    pub fn coeff(&self, mu: Complex64) -> Complex64 {
        self.entries
            .get(&EigenKey(mu))
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.entries.values().map(|c| c.norm()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_modes(self.modes().chain(other.modes()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_modes(
            self.modes()
                .chain(other.modes().map(|(mu, c)| (mu, -c))),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_modes(self.modes().map(|(mu, c)| (mu, c * s)))
    }

    /// Applies a per-mode multiplier; fails fast on the first mode error.
    pub fn map_modes(
        &self,
        f: &mut dyn FnMut(Complex64, Complex64) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for (mu, c) in self.modes() {
            out.push((mu, f(mu, c)?));
        }
        Ok(Self::from_modes(out))
    }
}

/// One constant block c on the half-open interval [a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Step function given by finitely many disjoint constant blocks, sorted by
/// position. Freshly constructed functions are supported in [0, inf);
/// arithmetic and translation may move blocks anywhere on the line.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BlockFunctionWire")]
pub struct BlockFunction {
    blocks: Vec<Block>,
}

#[derive(Deserialize)]
struct BlockFunctionWire {
    blocks: Vec<Block>,
}

impl TryFrom<BlockFunctionWire> for BlockFunction {
    type Error = Error;

    fn try_from(wire: BlockFunctionWire) -> Result<Self> {
        BlockFunction::new(wire.blocks)
    }
}

impl BlockFunction {
    /// Validates 0 <= a_1, a_k < b_k <= a_{k+1}, finite nonzero amplitudes.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let mut prev_end = 0.0_f64;
        for (i, blk) in blocks.iter().enumerate() {
            if !(blk.a.is_finite() && blk.b.is_finite() && blk.c.is_finite()) {
                return Err(Error::parameter("blocks", format!("block {i} is not finite")));
            }
            if blk.a < prev_end {
                return Err(Error::parameter(
                    "blocks",
                    format!("block {i} starts at {} before {}", blk.a, prev_end),
                ));
            }
            if blk.a >= blk.b {
                return Err(Error::parameter(
                    "blocks",
                    format!("block {i} has a >= b ({} >= {})", blk.a, blk.b),
                ));
            }
            if blk.c == 0.0 {
                return Err(Error::parameter("blocks", format!("block {i} has zero amplitude")));
            }
            prev_end = blk.b;
        }
        Ok(BlockFunction { blocks })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Internal constructor for arithmetic results; assumes sorted disjoint
    /// nonzero blocks but allows negative positions.
    fn from_sorted(blocks: Vec<Block>) -> Self {
        BlockFunction { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        // Blocks are sorted; find the last block starting at or before x.
        let idx = self.blocks.partition_point(|blk| blk.a <= x);
        if idx == 0 {
            return 0.0;
        }
        let blk = &self.blocks[idx - 1];
        if x < blk.b {
            blk.c
        } else {
            0.0
        }
    }

    pub fn translate(&self, dx: f64) -> Self {
        Self::from_sorted(
            self.blocks
                .iter()
                .map(|blk| Block {
                    a: blk.a + dx,
                    b: blk.b + dx,
                    c: blk.c,
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::empty();
        }
        Self::from_sorted(
            self.blocks
                .iter()
                .map(|blk| Block { c: blk.c * s, ..*blk })
                .collect(),
        )
    }

    /// Pointwise difference, re-expressed on the merged breakpoint set with
    /// zero runs dropped and equal neighbours fused.
    pub fn sub(&self, other: &Self) -> Self {
        let mut cuts: Vec<f64> = Vec::with_capacity(2 * (self.blocks.len() + other.blocks.len()));
        for blk in self.blocks.iter().chain(other.blocks.iter()) {
            cuts.push(blk.a);
            cuts.push(blk.b);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut out: Vec<Block> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let c = self.value_at(mid) - other.value_at(mid);
            if c == 0.0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.b == a && last.c == c => last.b = b,
                _ => out.push(Block { a, b, c }),
            }
        }
        Self::from_sorted(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.sub(&other.scale(-1.0))
    }
}

/// Real-valued samples on the uniform symmetric grid x_i = -x_max + i*h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionWire")]
pub struct GridFunction {
    pub h: f64,
    pub x_max: f64,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
struct GridFunctionWire {
    h: f64,
    x_max: f64,
    values: Vec<f64>,
}

impl TryFrom<GridFunctionWire> for GridFunction {
    type Error = Error;

    fn try_from(wire: GridFunctionWire) -> Result<Self> {
        for (i, v) in wire.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::parameter("values", format!("sample {i} is not finite")));
            }
        }
        GridFunction::new(wire.h, wire.x_max, wire.values)
    }
}

/// Hard cap on grid samples; configs asking for more are layout errors, not
/// allocation requests.
const GRID_SAMPLE_CAP: usize = 1 << 20;

fn grid_steps(h: f64, x_max: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::parameter("h", "grid step must be positive and finite"));
    }
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::parameter("x_max", "grid extent must be positive and finite"));
    }
    let steps = 2.0 * x_max / h;
    if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::parameter("x_max", "2*x_max must be an integer multiple of h"));
    }
    if steps.round() >= GRID_SAMPLE_CAP as f64 {
        return Err(Error::parameter(
            "h",
            format!("grid would need more than {GRID_SAMPLE_CAP} samples"),
        ));
    }
    Ok(steps.round() as usize)
}

impl GridFunction {
    pub fn new(h: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        let n = grid_steps(h, x_max)? + 1;
        if values.len() != n {
            return Err(Error::Length(format!(
                "grid needs {n} samples for h = {h}, x_max = {x_max}; got {}",
                values.len()
            )));
        }
        Ok(GridFunction { h, x_max, values })
    }

    pub fn from_fn(h: f64, x_max: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let steps = grid_steps(h, x_max)?;
        let values = (0..=steps).map(|i| f(-x_max + i as f64 * h)).collect();
        Self::new(h, x_max, values)
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_max + i as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.h != other.h || self.x_max != other.x_max || self.values.len() != other.values.len()
        {
            return Err(Error::Domain("grid layouts differ".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction { h: self.h, x_max: self.x_max, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GridFunction { h: self.h, x_max: self.x_max, values })
    }

    pub fn scale(&self, s: f64) -> Self {
        GridFunction {
            h: self.h,
            x_max: self.x_max,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// Two spectral components (u, v) for companion-form second-order systems.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectralPair {
    pub first: SpectralVector,
    pub second: SpectralVector,
}

impl SpectralPair {
    pub fn new(first: SpectralVector, second: SpectralVector) -> Self {
        SpectralPair { first, second }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SpectralPair {
            first: self.first.sub(&other.first),
            second: self.second.sub(&other.second),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SpectralPair {
            first: self.first.add(&other.first),
            second: self.second.add(&other.second),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SpectralPair {
            first: self.first.scale(s),
            second: self.second.scale(s),
        }
    }
}

/// Tagged union over the concrete representations. Binary operations demand
/// matching variants; nothing is silently converted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", content = "data", rename_all = "snake_case")]
pub enum Element {
    Spectral(SpectralVector),
    Block(BlockFunction),
    Grid(GridFunction),
    Pair(SpectralPair),
}

impl Element {
    pub fn repr(&self) -> &'static str {
        match self {
            Element::Spectral(_) => "spectral",
            Element::Block(_) => "block",
            Element::Grid(_) => "grid",
            Element::Pair(_) => "pair",
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Element> {
        match (self, other) {
            (Element::Spectral(a), Element::Spectral(b)) => Ok(Element::Spectral(a.sub(b))),
            (Element::Block(a), Element::Block(b)) => Ok(Element::Block(a.sub(b))),
            (Element::Grid(a), Element::Grid(b)) => Ok(Element::Grid(a.sub(b)?)),
            (Element::Pair(a), Element::Pair(b)) => Ok(Element::Pair(a.sub(b))),
            (a, b) => Err(Error::Representation(a.repr(), b.repr())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Element> {
        match (self, other) {
            (Element::Spectral(a), Element::Spectral(b)) => Ok(Element::Spectral(a.add(b))),
            (Element::Block(a), Element::Block(b)) => Ok(Element::Block(a.add(b))),
            (Element::Grid(a), Element::Grid(b)) => Ok(Element::Grid(a.add(b)?)),
            (Element::Pair(a), Element::Pair(b)) => Ok(Element::Pair(a.add(b))),
            (a, b) => Err(Error::Representation(a.repr(), b.repr())),
        }
    }

    pub fn scale_real(&self, s: f64) -> Element {
        match self {
            Element::Spectral(v) => Element::Spectral(v.scale(Complex64::new(s, 0.0))),
            Element::Block(f) => Element::Block(f.scale(s)),
            Element::Grid(g) => Element::Grid(g.scale(s)),
            Element::Pair(p) => Element::Pair(p.scale(Complex64::new(s, 0.0))),
        }
    }

    /// The zero vector in the same representation (and on the same grid).
    pub fn zero_like(&self) -> Element {
        match self {
            Element::Spectral(_) => Element::Spectral(SpectralVector::new()),
            Element::Block(_) => Element::Block(BlockFunction::empty()),
            Element::Grid(g) => Element::Grid(GridFunction {
                h: g.h,
                x_max: g.x_max,
                values: vec![0.0; g.values.len()],
            }),
            Element::Pair(_) => Element::Pair(SpectralPair::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_merges_duplicates_and_prunes_zeros() {
        let v = SpectralVector::from_modes([
            (c(1.0, 0.0), c(2.0, 0.0)),
            (c(1.0, 0.0), c(-2.0, 0.0)),
            (c(0.0, 1.0), c(3.0, 0.0)),
        ]);
        assert_eq!(v.len(), 1);
        assert_eq!(v.coeff(c(0.0, 1.0)), c(3.0, 0.0));
        assert_eq!(v.coeff(c(1.0, 0.0)), Complex64::ZERO);
    }

    #[test]
    fn spectral_sub_cancels_exactly() {
        let v = SpectralVector::from_modes([(c(1.0, 2.0), c(0.5, -0.5))]);
        assert!(v.sub(&v).is_empty());
    }

    #[test]
    fn spectral_keys_ordered_deterministically() {
        let v = SpectralVector::from_modes([
            (c(2.0, 0.0), c(1.0, 0.0)),
            (c(-1.0, 5.0), c(1.0, 0.0)),
            (c(-1.0, -5.0), c(1.0, 0.0)),
        ]);
        let keys: Vec<Complex64> = v.modes().map(|(mu, _)| mu).collect();
        assert_eq!(keys, vec![c(-1.0, -5.0), c(-1.0, 5.0), c(2.0, 0.0)]);
    }

    #[test]
    fn block_new_rejects_overlap_and_zero_amplitude() {
        assert!(BlockFunction::new(vec![
            Block { a: 0.0, b: 2.0, c: 1.0 },
            Block { a: 1.0, b: 3.0, c: 1.0 },
        ])
        .is_err());
        assert!(BlockFunction::new(vec![Block { a: 0.0, b: 1.0, c: 0.0 }]).is_err());
        assert!(BlockFunction::new(vec![Block { a: -1.0, b: 1.0, c: 1.0 }]).is_err());
    }

    #[test]
    fn block_value_at_half_open() {
        let f = BlockFunction::new(vec![Block { a: 1.0, b: 2.0, c: 3.0 }]).unwrap();
        assert_eq!(f.value_at(1.0), 3.0);
        assert_eq!(f.value_at(2.0), 0.0);
        assert_eq!(f.value_at(0.5), 0.0);
    }

    #[test]
    fn block_sub_refines_and_fuses() {
        let f = BlockFunction::new(vec![Block { a: 0.0, b: 4.0, c: 2.0 }]).unwrap();
        let g = BlockFunction::new(vec![Block { a: 1.0, b: 2.0, c: 2.0 }]).unwrap();
        let d = f.sub(&g);
        assert_eq!(
            d.blocks(),
            &[
                Block { a: 0.0, b: 1.0, c: 2.0 },
                Block { a: 2.0, b: 4.0, c: 2.0 }
            ]
        );
        assert!(f.sub(&f).is_zero());
        // Equal-amplitude neighbours fuse back into one block.
        let e = f.sub(&BlockFunction::empty());
        assert_eq!(e.blocks(), f.blocks());
    }

    #[test]
    fn block_translate_moves_support() {
        let f = BlockFunction::new(vec![Block { a: 1.0, b: 2.0, c: 1.0 }]).unwrap();
        let g = f.translate(-1.5);
        assert_eq!(g.blocks()[0].a, -0.5);
        assert_eq!(g.value_at(-0.25), 1.0);
    }

    #[test]
    fn grid_layout_is_validated() {
        assert!(GridFunction::new(0.5, 1.0, vec![0.0; 5]).is_ok());
        assert!(GridFunction::new(0.5, 1.0, vec![0.0; 4]).is_err());
        assert!(GridFunction::new(0.3, 1.0, vec![0.0; 7]).is_err());
    }

    #[test]
    fn element_mixed_ops_rejected() {
        let a = Element::Spectral(SpectralVector::single(c(1.0, 0.0), c(1.0, 0.0)));
        let b = Element::Block(BlockFunction::empty());
        assert!(matches!(a.sub(&b), Err(Error::Representation(_, _))));
    }

    #[test]
    fn element_serde_round_trip() {
        let e = Element::Spectral(SpectralVector::from_modes([
            (c(1.0, -1.0), c(0.25, 0.75)),
            (c(-2.0, 0.0), c(1.0, 0.0)),
        ]));
        let s = serde_json::to_string(&e).unwrap();
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(e, back);

        let f = Element::Block(
            BlockFunction::new(vec![Block { a: 1.0, b: 2.0, c: -1.0 }]).unwrap(),
        );
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(f, serde_json::from_str::<Element>(&s).unwrap());
    }
}
