//! Grid-cell approximations of compact sets, the Hutchinson operator on
//! them, and the attractor iteration.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{invalid, Result};
use crate::ifs::system::IfsSystem;

/// Relative slack, in cell units, used when deciding whether an image box
/// reaches into a grid cell. Image endpoints that land on a grid line within
/// this slack are treated as lying exactly on it, so cells touched only in a
/// zero-width slice are not occupied. Genuine overlaps are never dropped:
/// anything reaching deeper than 1e-9 of a cell is covered.
const GRID_SNAP: f64 = 1e-9;

/// A finite set of half-open grid cells at resolution `epsilon`, anchored at
/// `origin`. Cell `(j1, .., jd)` is the product of `[o_i + j_i*eps,
/// o_i + (j_i+1)*eps)`. Used as a discrete stand-in for a compact subset of
/// the line or the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet {
    dim: usize,
    epsilon: f64,
    origin: [f64; 2],
    cells: BTreeSet<[i64; 2]>,
}

impl BoxSet {
    pub fn empty(dim: usize, epsilon: f64, origin: &[f64]) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(invalid("box sets live in dimension 1 or 2"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid("epsilon must be positive"));
        }
        if origin.len() != dim {
            return Err(invalid("origin length must equal dim"));
        }
        let mut o = [0.0; 2];
        o[..dim].copy_from_slice(origin);
        Ok(Self {
            dim,
            epsilon,
            origin: o,
            cells: BTreeSet::new(),
        })
    }

    /// The cells covering a closed box `[lo, hi]`, excluding cells that meet
    /// it only in a zero-width boundary slice. In particular the right
    /// endpoint of the box belongs to the last covering cell, not to an
    /// extra one.
    pub fn cover(dim: usize, epsilon: f64, origin: &[f64], lo: &[f64], hi: &[f64]) -> Result<Self> {
        let mut set = Self::empty(dim, epsilon, origin)?;
        if lo.len() != dim || hi.len() != dim {
            return Err(invalid("box corners must have length dim"));
        }
        let mut lo2 = [0.0; 2];
        let mut hi2 = [0.0; 2];
        lo2[..dim].copy_from_slice(lo);
        hi2[..dim].copy_from_slice(hi);
        set.insert_box(lo2, hi2);
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = &[i64; 2]> {
        self.cells.iter()
    }

    pub fn contains_cell(&self, cell: [i64; 2]) -> bool {
        self.cells.contains(&cell)
    }

    pub fn insert_cell(&mut self, cell: [i64; 2]) {
        let mut c = cell;
        if self.dim == 1 {
            c[1] = 0;
        }
        self.cells.insert(c);
    }

    /// Center of a cell in world coordinates.
    pub fn cell_center(&self, cell: [i64; 2]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for ax in 0..self.dim {
            p[ax] = self.origin[ax] + (cell[ax] as f64 + 0.5) * self.epsilon;
        }
        p
    }

    /// Total measure of the occupied cells: `count * eps^dim`.
    pub fn total_measure(&self) -> f64 {
        self.cells.len() as f64 * self.epsilon.powi(self.dim as i32)
    }

    /// The cell containing a point under the half-open convention: a point
    /// exactly on a cell boundary belongs to the higher-index cell.
    pub fn point_cell(&self, x: &[f64]) -> [i64; 2] {
        let mut c = [0i64; 2];
        for ax in 0..self.dim {
            c[ax] = ((x[ax] - self.origin[ax]) / self.epsilon).floor() as i64;
        }
        c
    }

    /// Number of maximal runs of consecutive occupied cells. Only defined on
    /// the line.
    pub fn interval_groups(&self) -> Option<usize> {
        if self.dim != 1 {
            return None;
        }
        let mut groups = 0;
        let mut prev: Option<i64> = None;
        for cell in &self.cells {
            if prev != Some(cell[0] - 1) {
                groups += 1;
            }
            prev = Some(cell[0]);
        }
        Some(groups)
    }

    /// Occupy every cell that overlaps the closed box `[lo, hi]` in a set of
    /// positive width per axis (see `GRID_SNAP`).
    fn insert_box(&mut self, lo: [f64; 2], hi: [f64; 2]) {
        let mut mlo = [0i64; 2];
        let mut mhi = [0i64; 2];
        for ax in 0..self.dim {
            let a = (lo[ax] - self.origin[ax]) / self.epsilon;
            let b = (hi[ax] - self.origin[ax]) / self.epsilon;
            let lo_cell = (a + GRID_SNAP).floor() as i64;
            let hi_cell = (b - GRID_SNAP).ceil() as i64 - 1;
            // A sliver aligned exactly with a grid line still occupies the
            // half-open cell it belongs to.
            mlo[ax] = lo_cell;
            mhi[ax] = hi_cell.max(lo_cell);
        }
        match self.dim {
            1 => {
                for i in mlo[0]..=mhi[0] {
                    self.cells.insert([i, 0]);
                }
            }
            _ => {
                for i in mlo[0]..=mhi[0] {
                    for j in mlo[1]..=mhi[1] {
                        self.cells.insert([i, j]);
                    }
                }
            }
        }
    }

    /// Write the set as CSV: a `epsilon,origin` header, one line with their
    /// values, then one cell tuple per line in sorted order.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "epsilon,origin")?;
        write!(w, "{:.16e}", self.epsilon)?;
        for ax in 0..self.dim {
            write!(w, ",{:.16e}", self.origin[ax])?;
        }
        writeln!(w)?;
        for cell in &self.cells {
            if self.dim == 1 {
                writeln!(w, "{}", cell[0])?;
            } else {
                writeln!(w, "{},{}", cell[0], cell[1])?;
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }

    /// Parse the CSV format produced by [`BoxSet::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| invalid("empty box set file"))?;
        if header.trim() != "epsilon,origin" {
            return Err(invalid("box set file must start with `epsilon,origin`"));
        }
        let meta = lines
            .next()
            .transpose()?
            .ok_or_else(|| invalid("box set file missing metadata line"))?;
        let vals = parse_floats(&meta)?;
        if vals.len() < 2 || vals.len() > 3 {
            return Err(invalid("metadata line must hold epsilon and a 1- or 2-d origin"));
        }
        let dim = vals.len() - 1;
        let mut set = Self::empty(dim, vals[0], &vals[1..])?;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.trim().split(',').collect();
            if parts.len() != dim {
                return Err(invalid("cell tuple arity does not match the origin"));
            }
            let mut cell = [0i64; 2];
            for (ax, p) in parts.iter().enumerate() {
                cell[ax] = p
                    .parse()
                    .map_err(|_| invalid(format!("bad cell index: {p}")))?;
            }
            set.cells.insert(cell);
        }
        Ok(set)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// Reinterpret the grid under an increasing affine change of coordinates
    /// `x -> scale*x + shift` applied axis by axis. Cell indices are
    /// unchanged; epsilon and origin are rescaled.
    pub fn rescaled(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid("scale must be positive"));
        }
        if shift.len() != self.dim {
            return Err(invalid("shift length must equal dim"));
        }
        let mut origin = [0.0; 2];
        for ax in 0..self.dim {
            origin[ax] = self.origin[ax] * scale + shift[ax];
        }
        Ok(Self {
            dim: self.dim,
            epsilon: self.epsilon * scale,
            origin,
            cells: self.cells.clone(),
        })
    }
}

fn parse_floats(line: &str) -> Result<Vec<f64>> {
    line.trim()
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number: {p}")))
        })
        .collect()
}

/// One application of the Hutchinson operator at fixed grid resolution: map
/// the closed corners of every occupied cell through every map of the
/// system and occupy the cells covering each image hull.
///
/// The covering errs on the side of occupying too much (the image hull is a
/// superset of the true image), so iterating never loses parts of the
/// attractor; only zero-width boundary contact is dropped.
pub fn hutchinson_step(sys: &IfsSystem, b: &BoxSet) -> Result<BoxSet> {
    if b.is_empty() {
        return Err(invalid("hutchinson step needs a nonempty box set"));
    }
    if b.dim() != sys.dim() {
        return Err(invalid("box set dimension does not match the system"));
    }
    let mut out = BoxSet::empty(b.dim(), b.epsilon(), b.origin())?;
    let eps = b.epsilon();
    for cell in b.cells() {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for ax in 0..b.dim() {
            lo[ax] = b.origin()[ax] + cell[ax] as f64 * eps;
            hi[ax] = lo[ax] + eps;
        }
        for m in sys.maps() {
            let (ilo, ihi) = m.image_hull(lo, hi);
            out.insert_box(ilo, ihi);
        }
    }
    Ok(out)
}

/// Hausdorff distance between two box sets on the same grid, measured
/// between cell centers. Both sets must be nonempty and share epsilon and
/// origin.
pub fn hausdorff_distance(u: &BoxSet, v: &BoxSet) -> Result<f64> {
    if u.is_empty() || v.is_empty() {
        return Err(invalid("hausdorff distance needs nonempty box sets"));
    }
    if u.dim() != v.dim() {
        return Err(invalid("box sets differ in dimension"));
    }
    let eps = u.epsilon();
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * eps.max(1e-300);
    if (u.epsilon() - v.epsilon()).abs() > 1e-9 * eps {
        return Err(invalid("box sets live on different grids (epsilon)"));
    }
    for ax in 0..u.dim() {
        if !rel(u.origin()[ax], v.origin()[ax]) {
            return Err(invalid("box sets live on different grids (origin)"));
        }
    }
    let d2 = directed_sq(u, v).max(directed_sq(v, u));
    Ok(eps * (d2 as f64).sqrt())
}

/// Largest over cells of `u` of the squared lattice distance to the nearest
/// cell of `v`.
fn directed_sq(u: &BoxSet, v: &BoxSet) -> i64 {
    if u.dim() == 1 {
        let vs: Vec<i64> = v.cells().map(|c| c[0]).collect();
        let mut worst = 0i64;
        for cell in u.cells() {
            let i = cell[0];
            let pos = vs.partition_point(|&x| x < i);
            let mut best = i64::MAX;
            if pos < vs.len() {
                best = best.min((vs[pos] - i).pow(2));
            }
            if pos > 0 {
                best = best.min((vs[pos - 1] - i).pow(2));
            }
            worst = worst.max(best);
        }
        return worst;
    }
    let vset: HashSet<[i64; 2]> = v.cells().copied().collect();
    let v0 = *v.cells().next().expect("checked nonempty");
    let mut worst = 0i64;
    for cell in u.cells() {
        if vset.contains(cell) {
            continue;
        }
        let mut best =
            (cell[0] - v0[0]).pow(2) + (cell[1] - v0[1]).pow(2);
        let mut r = 1i64;
        // Rings at Chebyshev radius r contain nothing closer than r, so once
        // r*r reaches the best square distance the search is complete.
        while r * r < best {
            for (dx, dy) in ring_offsets(r) {
                let c = [cell[0] + dx, cell[1] + dy];
                if vset.contains(&c) {
                    best = best.min(dx * dx + dy * dy);
                }
            }
            r += 1;
        }
        worst = worst.max(best);
    }
    worst
}

/// Offsets of the square ring at Chebyshev radius `r >= 1`.
fn ring_offsets(r: i64) -> impl Iterator<Item = (i64, i64)> {
    let top = (-r..=r).map(move |x| (x, r));
    let bottom = (-r..=r).map(move |x| (x, -r));
    let left = (-r + 1..r).map(move |y| (-r, y));
    let right = (-r + 1..r).map(move |y| (r, y));
    top.chain(bottom).chain(left).chain(right)
}

/// Result of the attractor iteration.
#[derive(Clone, Debug)]
pub struct AttractorResult {
    /// Final grid approximation of the attractor.
    pub boxes: BoxSet,
    /// Hutchinson steps actually taken.
    pub iterations: u32,
    /// Hausdorff distance between the last two iterates.
    pub final_dh: f64,
    /// Whether `final_dh <= epsilon` was reached within `max_iter`.
    pub converged: bool,
    /// Iteration count guaranteed sufficient by the contraction factor:
    /// smallest n with lambda^n * diam(box) <= epsilon.
    pub a_priori_iterations: u32,
}

/// Iterate the Hutchinson operator from the cover of the bounding box until
/// successive iterates are within `epsilon` in the Hausdorff metric, or
/// `max_iter` steps have run. A run that exhausts `max_iter` still returns
/// its final set, flagged as not converged.
pub fn compute_attractor(sys: &IfsSystem, epsilon: f64, max_iter: u32) -> Result<AttractorResult> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    if max_iter == 0 {
        return Err(invalid("max_iter must be at least 1"));
    }
    let mut current = BoxSet::cover(
        sys.dim(),
        epsilon,
        sys.box_lo(),
        sys.box_lo(),
        sys.box_hi(),
    )?;
    let mut final_dh = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let next = hutchinson_step(sys, &current)?;
        final_dh = hausdorff_distance(&next, &current)?;
        current = next;
        iterations += 1;
        if final_dh <= epsilon {
            converged = true;
            break;
        }
    }
    Ok(AttractorResult {
        boxes: current,
        iterations,
        final_dh,
        converged,
        a_priori_iterations: sys.a_priori_iterations(epsilon),
    })
}
