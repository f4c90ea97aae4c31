//! Affine contractions and probability vectors, the raw material of an IFS.

use crate::error::{invalid, Error, Result};

/// Largest dimension supported. Everything in this crate lives on the line
/// or in the plane.
pub const MAX_DIM: usize = 2;

/// An affine map `x -> M x + t` on R^1 or R^2 that contracts strictly.
///
/// The Lipschitz constant (largest singular value of `M`) is computed once at
/// construction and cached; constructors reject maps whose constant is not in
/// the open interval (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    /// Row-major matrix entries. A 1-d map uses `m[0]` only.
    m: [f64; 4],
    /// Translation. A 1-d map uses `t[0]` only.
    t: [f64; 2],
    lipschitz: f64,
}

impl AffineMap {
    /// Build a map from `matrix` (dim x dim, row major) and `offset` (dim).
    pub fn new(matrix: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("map dimension must be 1 or 2, got {dim}")));
        }
        if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
            return Err(invalid("matrix shape does not match offset dimension"));
        }
        let mut m = [0.0; 4];
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[2 * i + j] = v;
            }
        }
        let mut t = [0.0; 2];
        t[..dim].copy_from_slice(offset);
        if m.iter().chain(t.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("matrix and offset entries must be finite"));
        }
        let lipschitz = if dim == 1 {
            m[0].abs()
        } else {
            largest_singular_value(m)
        };
        if lipschitz == 0.0 {
            return Err(invalid("matrix has zero norm"));
        }
        if lipschitz >= 1.0 {
            return Err(Error::NotContractive(lipschitz));
        }
        Ok(Self { dim, m, t, lipschitz })
    }

    /// Convenience constructor for a 1-d map `x -> slope*x + offset`.
    pub fn one_d(slope: f64, offset: f64) -> Result<Self> {
        Self::new(&[vec![slope]], &[offset])
    }

    /// Convenience constructor for a 2-d map.
    pub fn two_d(matrix: [[f64; 2]; 2], offset: [f64; 2]) -> Result<Self> {
        Self::new(&[matrix[0].to_vec(), matrix[1].to_vec()], &offset)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cached Lipschitz constant, the largest singular value of the matrix.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Matrix entry at `(i, j)`.
    pub fn matrix(&self, i: usize, j: usize) -> f64 {
        self.m[2 * i + j]
    }

    /// Offset component `i`.
    pub fn offset(&self, i: usize) -> f64 {
        self.t[i]
    }

    pub fn det(&self) -> f64 {
        if self.dim == 1 {
            self.m[0]
        } else {
            self.m[0] * self.m[3] - self.m[1] * self.m[2]
        }
    }

    /// Apply the map to a point, writing into a fixed-size buffer.
    /// `x[..dim]` is read, the rest ignored.
    #[inline]
    pub fn apply_buf(&self, x: [f64; 2]) -> [f64; 2] {
        if self.dim == 1 {
            [self.m[0] * x[0] + self.t[0], 0.0]
        } else {
            [
                self.m[0] * x[0] + self.m[1] * x[1] + self.t[0],
                self.m[2] * x[0] + self.m[3] * x[1] + self.t[1],
            ]
        }
    }

    /// Apply the map to a point given as a slice of length `dim`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(invalid(format!(
                "point has dimension {}, map expects {}",
                x.len(),
                self.dim
            )));
        }
        let mut buf = [0.0; 2];
        buf[..self.dim].copy_from_slice(x);
        let y = self.apply_buf(buf);
        Ok(y[..self.dim].to_vec())
    }

    /// The unique fixed point `p` with `M p + t = p`.
    pub fn fixed_point(&self) -> [f64; 2] {
        if self.dim == 1 {
            [self.t[0] / (1.0 - self.m[0]), 0.0]
        } else {
            // Solve (I - M) p = t by 2x2 Cramer. I - M is invertible because
            // the spectral radius of M is below 1.
            let a = 1.0 - self.m[0];
            let b = -self.m[1];
            let c = -self.m[2];
            let d = 1.0 - self.m[3];
            let det = a * d - b * c;
            [
                (self.t[0] * d - b * self.t[1]) / det,
                (a * self.t[1] - c * self.t[0]) / det,
            ]
        }
    }

    /// Axis-aligned hull of the image of the box `[lo, hi]`: the map sends
    /// the box to a parallelotope, and the hull of the mapped corners equals
    /// the hull of the full image because the map is affine.
    pub fn image_hull(&self, lo: [f64; 2], hi: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let mut out_lo = [f64::INFINITY; 2];
        let mut out_hi = [f64::NEG_INFINITY; 2];
        let corners = 1usize << self.dim;
        for mask in 0..corners {
            let mut c = [0.0; 2];
            for ax in 0..self.dim {
                c[ax] = if mask & (1 << ax) == 0 { lo[ax] } else { hi[ax] };
            }
            let y = self.apply_buf(c);
            for ax in 0..self.dim {
                out_lo[ax] = out_lo[ax].min(y[ax]);
                out_hi[ax] = out_hi[ax].max(y[ax]);
            }
        }
        (out_lo, out_hi)
    }

    /// Compose `self` after `inner`: the returned map is `x -> self(inner(x))`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.dim, inner.dim);
        let mut m = [0.0; 4];
        let mut t = [0.0; 2];
        if self.dim == 1 {
            m[0] = self.m[0] * inner.m[0];
            t[0] = self.m[0] * inner.t[0] + self.t[0];
        } else {
            m[0] = self.m[0] * inner.m[0] + self.m[1] * inner.m[2];
            m[1] = self.m[0] * inner.m[1] + self.m[1] * inner.m[3];
            m[2] = self.m[2] * inner.m[0] + self.m[3] * inner.m[2];
            m[3] = self.m[2] * inner.m[1] + self.m[3] * inner.m[3];
            t[0] = self.m[0] * inner.t[0] + self.m[1] * inner.t[1] + self.t[0];
            t[1] = self.m[2] * inner.t[0] + self.m[3] * inner.t[1] + self.t[1];
        }
        AffineMap {
            dim: self.dim,
            m,
            t,
            // Submultiplicative bound; exact value is not needed where
            // compositions are used (box certification hulls).
            lipschitz: (self.lipschitz * inner.lipschitz).min(1.0),
            ..*self
        }
    }

    pub(crate) fn matrix_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.matrix(i, j)).collect())
            .collect()
    }

    pub(crate) fn offset_vec(&self) -> Vec<f64> {
        self.t[..self.dim].to_vec()
    }
}

/// Largest singular value of a 2x2 row-major matrix, from the closed-form
/// eigenvalues of M^T M.
fn largest_singular_value(m: [f64; 4]) -> f64 {
    let s1 = m[0] * m[0] + m[2] * m[2];
    let s2 = m[1] * m[1] + m[3] * m[3];
    let cross = m[0] * m[1] + m[2] * m[3];
    let mean = 0.5 * (s1 + s2);
    let disc = (0.5 * (s1 - s2)).hypot(cross);
    (mean + disc).max(0.0).sqrt()
}

/// A probability vector over map indices: strictly positive weights that sum
/// to one within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    w: Vec<f64>,
    /// Cumulative sums with the final entry pinned to exactly 1.0.
    cum: Vec<f64>,
}

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(invalid("probability vector needs at least 2 weights"));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(invalid("probability weights must be strictly positive"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("probability weights sum to {sum}, not 1")));
        }
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in &weights {
            acc += w;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self { w: weights, cum })
    }

    /// Uniform vector of length `n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.w[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Inverse-CDF draw: the smallest index whose cumulative weight exceeds
    /// `u`, scanning in index order. `u` must lie in [0, 1).
    #[inline]
    pub fn sample(&self, u: f64) -> usize {
        for (i, &c) in self.cum.iter().enumerate() {
            if u < c {
                return i;
            }
        }
        self.w.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_lipschitz_is_abs_slope() {
        let f = AffineMap::one_d(-1.0 / 3.0, 0.5).unwrap();
        assert!((f.lipschitz() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_expansion_and_zero() {
        assert!(matches!(
            AffineMap::one_d(1.0, 0.0),
            Err(Error::NotContractive(_))
        ));
        assert!(matches!(
            AffineMap::one_d(-1.5, 0.0),
            Err(Error::NotContractive(_))
        ));
        assert!(AffineMap::one_d(0.0, 0.3).is_err());
    }

    #[test]
    fn singular_value_of_rotation_scale() {
        // 0.5 * rotation has both singular values 0.5.
        let th: f64 = 0.7;
        let f = AffineMap::two_d(
            [
                [0.5 * th.cos(), -0.5 * th.sin()],
                [0.5 * th.sin(), 0.5 * th.cos()],
            ],
            [0.1, 0.2],
        )
        .unwrap();
        assert!((f.lipschitz() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn singular_value_of_diagonal() {
        let f = AffineMap::two_d([[0.25, 0.0], [0.0, 0.9]], [0.0, 0.0]).unwrap();
        assert!((f.lipschitz() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn apply_and_fixed_point() {
        let f = AffineMap::one_d(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(f.apply(&[1.0]).unwrap(), vec![1.0]);
        assert!((f.fixed_point()[0] - 1.0).abs() < 1e-15);

        let g = AffineMap::two_d([[0.5, 0.0], [0.0, 0.5]], [0.5, 0.25]).unwrap();
        let p = g.fixed_point();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn apply_checks_dimension() {
        let f = AffineMap::one_d(0.5, 0.0).unwrap();
        assert!(f.apply(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn compose_matches_pointwise() {
        let f = AffineMap::two_d([[0.3, -0.1], [0.2, 0.4]], [1.0, -2.0]).unwrap();
        let g = AffineMap::two_d([[0.5, 0.2], [0.0, -0.6]], [0.3, 0.7]).unwrap();
        let fg = f.compose(&g);
        let x = [0.37, -1.2];
        let direct = f.apply_buf(g.apply_buf(x));
        let composed = fg.apply_buf(x);
        assert!((direct[0] - composed[0]).abs() < 1e-14);
        assert!((direct[1] - composed[1]).abs() < 1e-14);
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![1.0]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.5001]).is_err());
        assert!(ProbVector::new(vec![0.0, 1.0]).is_err());
        assert!(ProbVector::new(vec![-0.1, 1.1]).is_err());
        let p = ProbVector::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn inverse_cdf_sampling() {
        let p = ProbVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p.sample(0.0), 0);
        assert_eq!(p.sample(0.1999), 0);
        assert_eq!(p.sample(0.2), 1);
        assert_eq!(p.sample(0.4999), 1);
        assert_eq!(p.sample(0.5), 2);
        assert_eq!(p.sample(0.999999), 2);
    }
}
