//! Random iteration of a function system and empirical tests of the
//! invariant measure.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::ifs::system::IfsSystem;
use crate::rng::SplitMix64;

/// An ordered sequence of points in dimension 1 or 2, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(invalid("point clouds live in dimension 1 or 2"));
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
        })
    }

    pub fn with_capacity(dim: usize, n: usize) -> Result<Self> {
        let mut c = Self::new(dim)?;
        c.coords.reserve(n * dim);
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(invalid("point has the wrong dimension"));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Componentwise min and max corners. Errors on an empty cloud.
    pub fn bbox(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.is_empty() {
            return Err(invalid("empty point cloud has no bounding box"));
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for ax in 0..self.dim {
                lo[ax] = lo[ax].min(p[ax]);
                hi[ax] = hi[ax].max(p[ax]);
            }
        }
        Ok((lo, hi))
    }

    /// One point per row, comma separated, 17 significant digits per
    /// coordinate so values round-trip exactly. No header.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for p in self.points() {
            for (ax, v) in p.iter().enumerate() {
                if ax > 0 {
                    write!(w, ",")?;
                }
                write!(w, "{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut cloud: Option<PointCloud> = None;
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let vals: Vec<f64> = t
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad coordinate: {p}")))
                })
                .collect::<Result<_>>()?;
            let c = match &mut cloud {
                Some(c) => c,
                None => cloud.insert(PointCloud::new(vals.len())?),
            };
            c.push(&vals)?;
        }
        cloud.ok_or_else(|| invalid("empty point cloud file"))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Random iteration `Z_{k+1} = f_sigma(Z_k)` with `sigma` drawn from the
/// system's probability vector by inverse CDF over a seeded [`SplitMix64`]
/// stream. Generates `n` states from `x0` and returns the last
/// `n - burn_in`. Identical inputs and seed give an identical cloud.
pub fn chaos_game(
    sys: &IfsSystem,
    x0: &[f64],
    n: u64,
    burn_in: u64,
    seed: u64,
) -> Result<PointCloud> {
    let pi = sys.pi().ok_or(Error::MissingProbability)?;
    if x0.len() != sys.dim() {
        return Err(invalid("x0 has the wrong dimension"));
    }
    if !sys.contains(x0, 0.0) {
        return Err(invalid("x0 lies outside the bounding box"));
    }
    if n <= burn_in {
        return Err(invalid("n must exceed burn_in"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut state = [0.0; 2];
    state[..sys.dim()].copy_from_slice(x0);
    let mut cloud = PointCloud::with_capacity(sys.dim(), (n - burn_in) as usize)?;
    for k in 0..n {
        let i = pi.sample(rng.next_f64());
        state = sys.map(i).apply_buf(state);
        if k >= burn_in {
            cloud.push(&state[..sys.dim()])?;
        }
    }
    Ok(cloud)
}

fn in_closed_box(p: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    p.iter()
        .zip(lo.iter().zip(hi))
        .all(|(x, (a, b))| *a <= *x && *x <= *b)
}

/// Empirical test of measure invariance: the invariant measure satisfies
/// `rho(Y) = sum_i pi_i * rho(f_i^{-1}(Y))`. For the empirical measure of
/// `cloud` this returns the worst absolute defect over the given test boxes.
/// Preimage membership is decided exactly through `p in f^{-1}(Y) iff
/// f(p) in Y`, so the maps are never inverted numerically, but they must be
/// invertible for the preimage to be well defined.
pub fn balanced_measure_residual(
    sys: &IfsSystem,
    cloud: &PointCloud,
    test_sets: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64> {
    let pi = sys.pi().ok_or(Error::MissingProbability)?;
    if cloud.is_empty() {
        return Err(invalid("point cloud is empty"));
    }
    if cloud.dim() != sys.dim() {
        return Err(invalid("point cloud dimension does not match the system"));
    }
    if test_sets.is_empty() {
        return Err(invalid("at least one test set is required"));
    }
    for m in sys.maps() {
        if !(m.det().abs() > 0.0) {
            return Err(Error::CannotInvert);
        }
    }
    for (lo, hi) in test_sets {
        if lo.len() != sys.dim() || hi.len() != sys.dim() {
            return Err(invalid("test set dimension does not match the system"));
        }
        for ax in 0..sys.dim() {
            if !(lo[ax].is_finite() && hi[ax].is_finite() && lo[ax] <= hi[ax]) {
                return Err(invalid("test set corners must be finite with lo <= hi"));
            }
        }
    }
    let n = cloud.len() as f64;
    let mut worst = 0.0f64;
    for (lo, hi) in test_sets {
        let mut in_y = 0u64;
        let mut in_pre = vec![0u64; sys.len()];
        for p in cloud.points() {
            if in_closed_box(p, lo, hi) {
                in_y += 1;
            }
            let mut buf = [0.0; 2];
            buf[..sys.dim()].copy_from_slice(p);
            for (i, m) in sys.maps().iter().enumerate() {
                let img = m.apply_buf(buf);
                if in_closed_box(&img[..sys.dim()], lo, hi) {
                    in_pre[i] += 1;
                }
            }
        }
        let rhs: f64 = pi
            .weights()
            .iter()
            .zip(&in_pre)
            .map(|(w, c)| w * (*c as f64 / n))
            .sum();
        worst = worst.max((in_y as f64 / n - rhs).abs());
    }
    Ok(worst)
}

/// Greedy digit test for membership in the middle-excluded Cantor set with
/// contraction ratio `1/c` on `[0, 1]`: at each of `depth` levels the point
/// must lie in the left or right closed interval of length `1/c`, within a
/// per-level slack of `tol`. Depth is capped by the caller; doubles run out
/// of digits near `c^-33` for c = 3.
pub fn cantor_membership(x: f64, c: f64, depth: u32, tol: f64) -> Result<bool> {
    if !(c.is_finite() && c > 2.0) {
        return Err(invalid("cantor ratio c must exceed 2"));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    let mut y = x;
    if !(-tol..=1.0 + tol).contains(&y) {
        return Ok(false);
    }
    let third = 1.0 / c;
    for _ in 0..depth {
        if y <= third + tol {
            y = (y * c).clamp(-tol, 1.0 + tol);
        } else if y >= 1.0 - third - tol {
            y = ((y - (1.0 - third)) * c).clamp(-tol, 1.0 + tol);
        } else {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::system::cantor_system;

    fn unit_tests_cantor() -> IfsSystem {
        cantor_system(3.0).unwrap()
    }

    #[test]
    fn membership_accepts_endpoints_and_rejects_middle() {
        assert!(cantor_membership(0.0, 3.0, 20, 1e-9).unwrap());
        assert!(cantor_membership(1.0, 3.0, 20, 1e-9).unwrap());
        assert!(cantor_membership(1.0 / 3.0, 3.0, 20, 1e-9).unwrap());
        assert!(cantor_membership(0.25, 3.0, 20, 1e-9).unwrap()); // 0.020202... base 3
        assert!(!cantor_membership(0.5, 3.0, 20, 1e-9).unwrap());
        assert!(!cantor_membership(0.4, 3.0, 3, 1e-9).unwrap());
        assert!(!cantor_membership(-0.1, 3.0, 20, 1e-9).unwrap());
    }

    #[test]
    fn game_points_land_on_the_cantor_set() {
        let sys = unit_tests_cantor();
        let cloud = chaos_game(&sys, &[0.5], 5040, 40, 7).unwrap();
        assert_eq!(cloud.len(), 5000);
        for p in cloud.points() {
            assert!(cantor_membership(p[0], 3.0, 20, 1e-9).unwrap(), "{}", p[0]);
        }
    }

    #[test]
    fn game_started_on_the_attractor_stays_there() {
        let sys = unit_tests_cantor();
        let cloud = chaos_game(&sys, &[0.0], 200, 0, 3).unwrap();
        for p in cloud.points() {
            assert!(cantor_membership(p[0], 3.0, 20, 1e-9).unwrap(), "{}", p[0]);
        }
    }

    #[test]
    fn game_length_contract_and_errors() {
        let sys = unit_tests_cantor();
        let one = chaos_game(&sys, &[0.5], 41, 40, 0).unwrap();
        assert_eq!(one.len(), 1);
        assert!(chaos_game(&sys, &[0.5], 40, 40, 0).is_err());
        assert!(chaos_game(&sys, &[1.5], 100, 0, 0).is_err());
        let no_pi = IfsSystem::new(sys.maps().to_vec(), None, &[0.0], &[1.0]).unwrap();
        let err = chaos_game(&no_pi, &[0.5], 100, 0, 0).unwrap_err();
        assert!(matches!(err, Error::MissingProbability));
    }

    #[test]
    fn game_is_deterministic_in_the_seed() {
        let sys = unit_tests_cantor();
        let a = chaos_game(&sys, &[0.5], 1000, 10, 42).unwrap();
        let b = chaos_game(&sys, &[0.5], 1000, 10, 42).unwrap();
        let c = chaos_game(&sys, &[0.5], 1000, 10, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn residual_is_zero_on_the_bounding_box() {
        let sys = unit_tests_cantor();
        let cloud = chaos_game(&sys, &[0.5], 1000, 10, 1).unwrap();
        let whole = vec![(vec![0.0], vec![1.0])];
        let r = balanced_measure_residual(&sys, &cloud, &whole).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn residual_shrinks_with_sample_size() {
        let sys = unit_tests_cantor();
        let tests = vec![
            (vec![0.0], vec![1.0 / 3.0]),
            (vec![2.0 / 3.0], vec![1.0]),
            (vec![0.0], vec![1.0 / 9.0]),
            (vec![0.0], vec![1.0]),
        ];
        let small = chaos_game(&sys, &[0.5], 1_100, 100, 11).unwrap();
        let large = chaos_game(&sys, &[0.5], 101_000, 1000, 11).unwrap();
        let r_small = balanced_measure_residual(&sys, &small, &tests).unwrap();
        let r_large = balanced_measure_residual(&sys, &large, &tests).unwrap();
        assert!(r_small <= 5.0 / (small.len() as f64).sqrt(), "{r_small}");
        assert!(r_large <= 5.0 / (large.len() as f64).sqrt(), "{r_large}");
        // The left third carries exactly half the mass.
        let mut left = 0;
        for p in large.points() {
            if p[0] <= 1.0 / 3.0 {
                left += 1;
            }
        }
        let frac = left as f64 / large.len() as f64;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
    }

    #[test]
    fn residual_needs_invertible_maps() {
        use crate::ifs::map::AffineMap;
        let singular = AffineMap::two_d([[0.5, 0.0], [0.0, 0.0]], [0.0, 0.0]).unwrap();
        let other = AffineMap::two_d([[0.5, 0.0], [0.0, 0.5]], [0.5, 0.5]).unwrap();
        let sys = IfsSystem::new(
            vec![singular, other],
            Some(crate::ifs::map::ProbVector::new(vec![0.5, 0.5]).unwrap()),
            &[-0.1, -0.1],
            &[1.1, 1.1],
        )
        .unwrap();
        let mut cloud = PointCloud::new(2).unwrap();
        cloud.push(&[0.2, 0.2]).unwrap();
        let tests = vec![(vec![0.0, 0.0], vec![1.0, 1.0])];
        let err = balanced_measure_residual(&sys, &cloud, &tests).unwrap_err();
        assert!(matches!(err, Error::CannotInvert));
    }

    #[test]
    fn cloud_csv_round_trips_exactly() {
        let sys = unit_tests_cantor();
        let cloud = chaos_game(&sys, &[0.5], 300, 20, 9).unwrap();
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let back = PointCloud::read_csv(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back, cloud);
    }

    use crate::ifs::system::IfsSystem;
}
