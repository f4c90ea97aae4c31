//! A finite family of affine contractions with an optional probability
//! vector and a certified bounding box.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ifs::map::{AffineMap, ProbVector};

/// Deepest composition length tried when certifying a bounding box.
const CERT_MAX_DEPTH: u32 = 14;
/// Cap on the number of composed words examined per certification depth.
const CERT_WORD_BUDGET: u64 = 1 << 21;

/// An iterated function system on R^1 or R^2.
///
/// The bounding box must contain the attractor. That is certified at
/// construction: the builder searches for a composition depth `k` such that
/// every k-fold composition of the maps sends the box into itself (up to a
/// 1e-9 relative pad). Depth 1 is the classical invariant-box property; some
/// systems, notably the Peano family, admit no invariant axis-aligned box at
/// all yet certify at a modest depth, which still pins the attractor inside.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
    pi: Option<ProbVector>,
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    lambda: f64,
    cert_depth: u32,
}

impl IfsSystem {
    pub fn new(
        maps: Vec<AffineMap>,
        pi: Option<ProbVector>,
        box_lo: &[f64],
        box_hi: &[f64],
    ) -> Result<Self> {
        if maps.len() < 2 {
            return Err(invalid("a system needs at least 2 maps"));
        }
        let dim = maps[0].dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(invalid("all maps must share one dimension"));
        }
        if let Some(p) = &pi {
            if p.len() != maps.len() {
                return Err(invalid(format!(
                    "probability vector has {} weights for {} maps",
                    p.len(),
                    maps.len()
                )));
            }
        }
        if box_lo.len() != dim || box_hi.len() != dim {
            return Err(invalid("bounding box dimension does not match the maps"));
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        lo[..dim].copy_from_slice(box_lo);
        hi[..dim].copy_from_slice(box_hi);
        for ax in 0..dim {
            if !lo[ax].is_finite() || !hi[ax].is_finite() || lo[ax] >= hi[ax] {
                return Err(invalid("bounding box must have positive extent per axis"));
            }
        }
        let lambda = maps
            .iter()
            .map(AffineMap::lipschitz)
            .fold(0.0_f64, f64::max);
        let cert_depth = certify_box(&maps, dim, lo, hi)?;
        Ok(Self {
            maps,
            pi,
            dim,
            lo,
            hi,
            lambda,
            cert_depth,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn map(&self, i: usize) -> &AffineMap {
        &self.maps[i]
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn pi(&self) -> Option<&ProbVector> {
        self.pi.as_ref()
    }

    /// Contraction factor of the whole family: the largest map Lipschitz
    /// constant.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn box_lo(&self) -> &[f64] {
        &self.lo[..self.dim]
    }

    pub fn box_hi(&self) -> &[f64] {
        &self.hi[..self.dim]
    }

    /// Composition depth at which the bounding box was certified to absorb
    /// the system. 1 means the box is invariant under every single map.
    pub fn cert_depth(&self) -> u32 {
        self.cert_depth
    }

    /// Euclidean diameter of the bounding box.
    pub fn box_diameter(&self) -> f64 {
        let mut s = 0.0;
        for ax in 0..self.dim {
            s += (self.hi[ax] - self.lo[ax]).powi(2);
        }
        s.sqrt()
    }

    /// Midpoint of the bounding box.
    pub fn box_center(&self) -> Vec<f64> {
        (0..self.dim).map(|ax| 0.5 * (self.lo[ax] + self.hi[ax])).collect()
    }

    /// Closed-box membership test against the bounding box.
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.len() == self.dim
            && (0..self.dim).all(|ax| x[ax] >= self.lo[ax] - slack && x[ax] <= self.hi[ax] + slack)
    }

    /// Iterations after which the Hutchinson operator provably brings any
    /// starting set within `eps` of the attractor: the smallest n with
    /// lambda^n * diam(box) <= eps.
    pub fn a_priori_iterations(&self, eps: f64) -> u32 {
        let diam = self.box_diameter();
        if diam <= eps {
            return 0;
        }
        ((eps / diam).ln() / self.lambda.ln()).ceil().max(0.0) as u32
    }

    /// Parse a system from its JSON description.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SystemSpecFile = serde_json::from_str(text)?;
        spec.build()
    }

    /// Read a system from a JSON file on disk.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Serialize the system to the same JSON schema `from_json` accepts.
    pub fn to_json(&self) -> String {
        let spec = SystemSpecFile {
            dim: self.dim,
            bounding_box: vec![self.box_lo().to_vec(), self.box_hi().to_vec()],
            maps: self
                .maps
                .iter()
                .map(|m| MapSpec {
                    matrix: m.matrix_rows(),
                    offset: m.offset_vec(),
                })
                .collect(),
            pi: self.pi.as_ref().map(|p| p.weights().to_vec()),
        };
        serde_json::to_string_pretty(&spec).expect("spec serialization cannot fail")
    }
}

/// On-disk JSON schema for a system.
#[derive(Serialize, Deserialize)]
struct SystemSpecFile {
    dim: usize,
    /// Two rows: the lower corner and the upper corner.
    bounding_box: Vec<Vec<f64>>,
    maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MapSpec {
    matrix: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl SystemSpecFile {
    fn build(self) -> Result<IfsSystem> {
        if self.bounding_box.len() != 2 {
            return Err(invalid("bounding_box must list a lower and an upper corner"));
        }
        let maps = self
            .maps
            .iter()
            .map(|m| {
                if m.offset.len() != self.dim {
                    return Err(invalid("map offset dimension disagrees with dim"));
                }
                AffineMap::new(&m.matrix, &m.offset)
            })
            .collect::<Result<Vec<_>>>()?;
        let pi = self.pi.map(ProbVector::new).transpose()?;
        IfsSystem::new(maps, pi, &self.bounding_box[0], &self.bounding_box[1])
    }
}

/// Find the smallest depth `k` such that every composition of `k` maps sends
/// the bounding box inside itself, within a small relative pad. Success at
/// any depth pins the attractor inside the box, because the k-fold family
/// has the same attractor and maps the box into itself.
fn certify_box(maps: &[AffineMap], dim: usize, lo: [f64; 2], hi: [f64; 2]) -> Result<u32> {
    let mut pad = [0.0; 2];
    for ax in 0..dim {
        pad[ax] = 1e-9 * (hi[ax] - lo[ax]).max(1.0);
    }
    let n = maps.len() as u64;
    let mut words_at_depth = 1u64;
    for depth in 1..=CERT_MAX_DEPTH {
        words_at_depth = words_at_depth.saturating_mul(n);
        if words_at_depth > CERT_WORD_BUDGET {
            break;
        }
        if maps
            .iter()
            .all(|m| words_within(maps, m, depth - 1, lo, hi, pad, dim))
        {
            return Ok(depth);
        }
    }
    Err(invalid(
        "bounding box could not be certified to contain the attractor; \
         enlarge the box or pad it away from the attractor",
    ))
}

/// Depth-first walk over all words extending `composed` by `left` more maps,
/// checking the image hull of the box at each leaf.
fn words_within(
    maps: &[AffineMap],
    composed: &AffineMap,
    left: u32,
    lo: [f64; 2],
    hi: [f64; 2],
    pad: [f64; 2],
    dim: usize,
) -> bool {
    if left == 0 {
        let (ilo, ihi) = composed.image_hull(lo, hi);
        return (0..dim).all(|ax| ilo[ax] >= lo[ax] - pad[ax] && ihi[ax] <= hi[ax] + pad[ax]);
    }
    maps.iter()
        .all(|m| words_within(maps, &composed.compose(m), left - 1, lo, hi, pad, dim))
}

/// The two-map system whose attractor is the middle-gap Cantor set on [0,1]:
/// `x/c` and `x/c + (1 - 1/c)`, with uniform probabilities.
///
/// Requires `c > 2`; at `c = 2` the two pieces touch and the construction
/// below does not produce a Cantor set.
pub fn cantor_system(c: f64) -> Result<IfsSystem> {
    if !c.is_finite() || c <= 2.0 {
        return Err(invalid(format!("cantor ratio must exceed 2, got {c}")));
    }
    let maps = vec![
        AffineMap::one_d(1.0 / c, 0.0)?,
        AffineMap::one_d(1.0 / c, 1.0 - 1.0 / c)?,
    ];
    IfsSystem::new(maps, Some(ProbVector::uniform(2)?), &[0.0], &[1.0])
}

/// The two de Rham maps `z -> a*conj(z)` and `z -> (1-a)*conj(z) + a` written
/// as real 2x2 affine maps. `a = (re, im)` is the complex parameter; the
/// classical Koch curve uses `a = 1/2 + i*sqrt(3)/6` and the Peano
/// space-filler `a = 1/2 + i/2`.
///
/// Multiplication by `a` after conjugation gives the matrix rows
/// `[re, im; im, -re]` for the first map, and similarly with `1-a` plus the
/// translation `a` for the second. Both maps are similarities, so their
/// Lipschitz constants are exactly `|a|` and `|1-a|`; constructors reject
/// parameters for which either modulus reaches 1.
pub fn koch_maps(re: f64, im: f64) -> Result<[AffineMap; 2]> {
    let f1 = AffineMap::two_d([[re, im], [im, -re]], [0.0, 0.0])?;
    let wr = 1.0 - re;
    let wi = -im;
    let f2 = AffineMap::two_d([[wr, wi], [wi, -wr]], [re, im])?;
    Ok([f1, f2])
}

/// Convenience builder wrapping [`koch_maps`] into a full system with
/// uniform probabilities. The bounding box starts from the hull of the
/// triangle `{0, a, 1}` and is padded outward until certification succeeds.
pub fn koch_system(re: f64, im: f64) -> Result<IfsSystem> {
    let [f1, f2] = koch_maps(re, im)?;
    let lo0 = [0.0_f64.min(re).min(1.0), 0.0_f64.min(im)];
    let hi0 = [0.0_f64.max(re).max(1.0), 0.0_f64.max(im)];
    let diam = (hi0[0] - lo0[0]).hypot(hi0[1] - lo0[1]);
    for pad_frac in [0.1, 0.2, 0.4, 0.8, 1.6] {
        let pad = pad_frac * diam;
        let lo = [lo0[0] - pad, lo0[1] - pad];
        let hi = [hi0[0] + pad, hi0[1] + pad];
        if let Ok(sys) = IfsSystem::new(
            vec![f1.clone(), f2.clone()],
            Some(ProbVector::uniform(2)?),
            &lo,
            &hi,
        ) {
            return Ok(sys);
        }
    }
    Err(invalid("no certifiable bounding box found for these parameters"))
}

/// A finite symbol sequence addressing a point of the attractor. The first
/// symbol is the outermost map in the composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Address {
    symbols: Vec<usize>,
}

impl Address {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self { symbols }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl From<Vec<usize>> for Address {
    fn from(symbols: Vec<usize>) -> Self {
        Self::new(symbols)
    }
}

/// Image of `x0` under the composition `f_{s1} o f_{s2} o ... o f_{sk}`
/// named by the address symbols `s1..sk`. The empty address is the identity.
pub fn address_point(sys: &IfsSystem, addr: &Address, x0: &[f64]) -> Result<Vec<f64>> {
    if x0.len() != sys.dim() {
        return Err(invalid("x0 dimension does not match the system"));
    }
    if let Some(&bad) = addr.symbols().iter().find(|&&s| s >= sys.len()) {
        return Err(invalid(format!(
            "address symbol {bad} out of range for {} maps",
            sys.len()
        )));
    }
    let mut buf = [0.0; 2];
    buf[..x0.len()].copy_from_slice(x0);
    // Innermost map first: walk the symbols from the tail.
    for &s in addr.symbols().iter().rev() {
        buf = sys.map(s).apply_buf(buf);
    }
    Ok(buf[..sys.dim()].to_vec())
}

/// The Baire metric on equal-length addresses: `2^-j` where `j` is the
/// 1-based index of the first disagreement, 0 if the addresses coincide.
pub fn baire_distance(a: &Address, b: &Address) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("baire distance needs addresses of equal length"));
    }
    for (j, (x, y)) in a.symbols().iter().zip(b.symbols()).enumerate() {
        if x != y {
            return Ok(0.5_f64.powi(j as i32 + 1));
        }
    }
    Ok(0.0)
}
