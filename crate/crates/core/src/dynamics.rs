//! Scalar discrete dynamical systems on a closed interval: iteration,
//! periodic-orbit search, the Sharkovskii order, and finite-horizon chaos
//! diagnostics.

use crate::error::{invalid, Result};

const SPOT_CHECK_POINTS: u32 = 1024;
const BISECT_WIDTH: f64 = 1e-10;
const ORBIT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
enum MapKind {
    Tent,
    Logistic(f64),
    Piecewise(Vec<(f64, f64)>),
}

/// A continuous self-map of a closed interval, given as a named family or a
/// piecewise-linear table. Construction spot-checks on a 1024-point
/// interior grid that evaluations stay inside the interval.
#[derive(Clone, Debug)]
pub struct ScalarMap {
    kind: MapKind,
    lo: f64,
    hi: f64,
}

impl ScalarMap {
    /// The tent map `x -> 1 - |2x - 1|` on `[0, 1]`.
    pub fn tent() -> Self {
        Self {
            kind: MapKind::Tent,
            lo: 0.0,
            hi: 1.0,
        }
    }

    /// The logistic map `x -> r x (1 - x)` on `[0, 1]`, a self-map for
    /// `0 < r <= 4`. Included as a test subject.
    pub fn logistic(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0 && r <= 4.0) {
            return Err(invalid("logistic parameter must lie in (0, 4]"));
        }
        let m = Self {
            kind: MapKind::Logistic(r),
            lo: 0.0,
            hi: 1.0,
        };
        m.spot_check()?;
        Ok(m)
    }

    /// Piecewise-linear interpolation through breakpoints with strictly
    /// increasing x; the interval is spanned by the first and last x.
    pub fn piecewise(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a piecewise map needs at least two breakpoints"));
        }
        for (x, y) in points {
            if !(x.is_finite() && y.is_finite()) {
                return Err(invalid("breakpoints must be finite"));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(invalid("breakpoint x values must be strictly increasing"));
            }
        }
        let m = Self {
            kind: MapKind::Piecewise(points.to_vec()),
            lo: points[0].0,
            hi: points[points.len() - 1].0,
        };
        m.spot_check()?;
        Ok(m)
    }

    /// Parse a map description: `tent`, `logistic:<r>`, or a JSON list of
    /// breakpoints `[[x, y], ..]`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s == "tent" {
            return Ok(Self::tent());
        }
        if let Some(r) = s.strip_prefix("logistic:") {
            let r: f64 = r
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad logistic parameter: {r}")))?;
            return Self::logistic(r);
        }
        let pts: Vec<[f64; 2]> =
            serde_json::from_str(s).map_err(|_| invalid("map spec is neither a named family nor a breakpoint list"))?;
        let pts: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
        Self::piecewise(&pts)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    fn spot_check(&self) -> Result<()> {
        let span = self.hi - self.lo;
        let slack = 1e-12 * span.max(1.0);
        for i in 0..SPOT_CHECK_POINTS {
            let x = self.lo + (i as f64 + 0.5) * span / SPOT_CHECK_POINTS as f64;
            let y = self.eval_raw(x);
            if !(y >= self.lo - slack && y <= self.hi + slack) {
                return Err(invalid(format!(
                    "map leaves the interval: f({x}) = {y}"
                )));
            }
        }
        Ok(())
    }

    fn eval_raw(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Tent => 1.0 - (2.0 * x - 1.0).abs(),
            MapKind::Logistic(r) => r * x * (1.0 - x),
            MapKind::Piecewise(pts) => {
                if x <= pts[0].0 {
                    return pts[0].1;
                }
                if x >= pts[pts.len() - 1].0 {
                    return pts[pts.len() - 1].1;
                }
                // Last segment whose left breakpoint is <= x; a breakpoint
                // hit returns its table value exactly.
                let i = pts.partition_point(|p| p.0 <= x) - 1;
                let (x0, y0) = pts[i];
                let (x1, y1) = pts[i + 1];
                if x == x0 {
                    return y0;
                }
                let t = (x - x0) / (x1 - x0);
                y0 + t * (y1 - y0)
            }
        }
    }

    /// Evaluate the map; the argument must lie in the interval.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(invalid(format!("{x} lies outside [{}, {}]", self.lo, self.hi)));
        }
        Ok(self.eval_raw(x))
    }

    fn eval_n(&self, mut x: f64, n: u32) -> f64 {
        for _ in 0..n {
            x = self.eval_raw(x);
        }
        x
    }
}

/// The orbit `(x, f(x), .., f^n(x))`, length `n + 1`.
pub fn iterate(m: &ScalarMap, x: f64, n: u32) -> Result<Vec<f64>> {
    m.eval(x)?;
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(x);
    let mut cur = x;
    for _ in 0..n {
        cur = m.eval_raw(cur);
        out.push(cur);
    }
    Ok(out)
}

/// A cycle of minimal period `period`; `points[0]` is the root the search
/// refined and the rest follow by iteration.
#[derive(Clone, Debug)]
pub struct PeriodicOrbit {
    pub points: Vec<f64>,
    pub period: u32,
}

impl PeriodicOrbit {
    pub fn leftmost(&self) -> f64 {
        self.points.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Find periodic orbits of every minimal period up to `max_period` by
/// scanning `f^p(x) - x` for sign changes on a uniform grid and refining
/// each bracket by bisection. Tangential roots between grid nodes can be
/// missed; the default grid of 4096 nodes keeps that unlikely for maps of
/// moderate slope.
pub fn find_periodic_orbits(
    m: &ScalarMap,
    max_period: u32,
    grid: u32,
) -> Result<Vec<PeriodicOrbit>> {
    if max_period < 1 {
        return Err(invalid("max_period must be at least 1"));
    }
    if grid < 64 {
        return Err(invalid("grid must have at least 64 nodes"));
    }
    let span = m.hi() - m.lo();
    let step = span / (grid - 1) as f64;
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    for p in 1..=max_period {
        let g = |x: f64| m.eval_n(x, p) - x;
        let xs: Vec<f64> = (0..grid).map(|i| m.lo() + i as f64 * step).collect();
        let vals: Vec<f64> = xs.iter().map(|x| g(*x)).collect();
        let mut roots = Vec::new();
        for i in 0..(grid as usize - 1) {
            if vals[i] == 0.0 {
                roots.push(xs[i]);
            } else if vals[i] * vals[i + 1] < 0.0 {
                let (mut a, mut b) = (xs[i], xs[i + 1]);
                let mut fa = vals[i];
                while b - a > BISECT_WIDTH {
                    let mid = 0.5 * (a + b);
                    let fm = g(mid);
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if (fa < 0.0) != (fm < 0.0) {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        if vals[grid as usize - 1] == 0.0 {
            roots.push(xs[grid as usize - 1]);
        }
        roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
        roots.dedup_by(|b, a| (*b - *a).abs() <= ORBIT_TOL);
        'root: for r in roots {
            for q in 1..p {
                if p % q == 0 && (m.eval_n(r, q) - r).abs() <= ORBIT_TOL {
                    continue 'root;
                }
            }
            let mut cycle = Vec::with_capacity(p as usize);
            cycle.push(r);
            for _ in 1..p {
                let last = *cycle.last().expect("nonempty");
                cycle.push(m.eval_raw(last));
            }
            let leftmost = cycle.iter().copied().fold(f64::INFINITY, f64::min);
            let seen = orbits
                .iter()
                .any(|o| o.period == p && (o.leftmost() - leftmost).abs() <= ORBIT_TOL);
            if !seen {
                orbits.push(PeriodicOrbit { points: cycle, period: p });
            }
        }
    }
    orbits.sort_by(|a, b| {
        (a.period, a.leftmost())
            .partial_cmp(&(b.period, b.leftmost()))
            .expect("orbit keys are finite")
    });
    Ok(orbits)
}

/// Whether `n` strictly precedes `m` in the Sharkovskii order: odd numbers
/// at least 3 ascending, then 2 times the odds, 4 times the odds, and so
/// on, finishing with the powers of two in descending order down to 1.
pub fn sharkovskii_precedes(n: u64, m: u64) -> Result<bool> {
    if n == 0 || m == 0 {
        return Err(invalid("the order is defined on positive integers"));
    }
    if n == m {
        return Ok(false);
    }
    let split = |k: u64| {
        let a = k.trailing_zeros();
        (a, k >> a)
    };
    let (an, on) = split(n);
    let (am, om) = split(m);
    Ok(match (on > 1, om > 1) {
        (true, true) => an < am || (an == am && on < om),
        (true, false) => true,
        (false, true) => false,
        (false, false) => n > m,
    })
}

/// Iterate a pair of starting points and report the largest and smallest
/// separation over the final `tail` steps: a finite-horizon proxy for the
/// limsup/liminf pair in the scrambled-pair definition of chaos.
pub fn liyorke_pair_stats(
    m: &ScalarMap,
    x: f64,
    y: f64,
    horizon: u32,
    tail: u32,
) -> Result<(f64, f64)> {
    if x == y {
        return Err(invalid("the pair must be two distinct points"));
    }
    if !(tail >= 1 && horizon > tail) {
        return Err(invalid("need horizon > tail >= 1"));
    }
    m.eval(x)?;
    m.eval(y)?;
    let (mut a, mut b) = (x, y);
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for n in 1..=horizon {
        a = m.eval_raw(a);
        b = m.eval_raw(b);
        if n > horizon - tail {
            let gap = (a - b).abs();
            sup = sup.max(gap);
            inf = inf.min(gap);
        }
    }
    Ok((sup, inf))
}

/// Probe for sensitive dependence at `x`: track 64 evenly placed sample
/// points inside the delta-neighborhood (clipped to the interval) and
/// return the first step at which every sample has separated from the
/// reference orbit by more than `eps_target`, if any. A returned witness is
/// evidence of sensitivity on the sampled set, not a proof over the full
/// neighborhood.
pub fn sensitivity_probe(
    m: &ScalarMap,
    x: f64,
    eps_target: f64,
    delta: f64,
    horizon: u32,
) -> Result<Option<u32>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    if horizon < 1 {
        return Err(invalid("horizon must be at least 1"));
    }
    if !eps_target.is_finite() {
        return Err(invalid("eps_target must be finite"));
    }
    m.eval(x)?;
    let a = m.lo().max(x - delta);
    let b = m.hi().min(x + delta);
    let mut samples: Vec<f64> = (1..=64)
        .map(|j| a + j as f64 * (b - a) / 65.0)
        .filter(|y| *y != x)
        .collect();
    if samples.is_empty() {
        return Ok(None);
    }
    let mut ref_x = x;
    for n in 1..=horizon {
        ref_x = m.eval_raw(ref_x);
        let mut min_gap = f64::INFINITY;
        for y in samples.iter_mut() {
            *y = m.eval_raw(*y);
            min_gap = min_gap.min((ref_x - *y).abs());
        }
        if min_gap > eps_target {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halving() -> ScalarMap {
        ScalarMap::piecewise(&[(0.0, 0.0), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn tent_orbit_of_two_ninths() {
        let m = ScalarMap::tent();
        let orbit = iterate(&m, 2.0 / 9.0, 3).unwrap();
        assert_eq!(orbit.len(), 4);
        assert_eq!(orbit[0], 2.0 / 9.0);
        assert_eq!(orbit[1], 4.0 / 9.0);
        assert_eq!(orbit[2], 8.0 / 9.0);
        // The cycle closes only to roundoff: 1 - (2*(8/9) - 1) re-rounds.
        assert!((orbit[3] - 2.0 / 9.0).abs() <= 1e-15);
    }

    #[test]
    fn iterate_identity_and_fixed_point() {
        let m = ScalarMap::tent();
        assert_eq!(iterate(&m, 0.7, 0).unwrap(), vec![0.7]);
        let constant = iterate(&m, 0.0, 5).unwrap();
        assert_eq!(constant, vec![0.0; 6]);
        assert!(iterate(&m, 1.5, 2).is_err());
    }

    #[test]
    fn construction_rejects_maps_leaving_the_interval() {
        assert!(ScalarMap::piecewise(&[(0.0, 0.0), (1.0, 2.0)]).is_err());
        assert!(ScalarMap::piecewise(&[(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(ScalarMap::logistic(4.5).is_err());
        assert!(ScalarMap::logistic(4.0).is_ok());
    }

    #[test]
    fn spec_parsing_covers_the_three_forms() {
        assert!(ScalarMap::from_spec("tent").is_ok());
        assert!(ScalarMap::from_spec("logistic:3.7").is_ok());
        assert!(ScalarMap::from_spec("[[0,0],[0.5,1],[1,0]]").is_ok());
        assert!(ScalarMap::from_spec("paraboloid").is_err());
    }

    #[test]
    fn tent_fixed_points() {
        let m = ScalarMap::tent();
        let orbits = find_periodic_orbits(&m, 1, 4096).unwrap();
        assert_eq!(orbits.len(), 2);
        assert!((orbits[0].points[0] - 0.0).abs() <= 1e-9);
        assert!((orbits[1].points[0] - 2.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn tent_orbit_census_through_period_seven() {
        // Fixed points of T^p number 2^p; Moebius counting over divisors
        // gives the minimal-orbit census below.
        let m = ScalarMap::tent();
        let orbits = find_periodic_orbits(&m, 7, 4096).unwrap();
        let count = |p: u32| orbits.iter().filter(|o| o.period == p).count();
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 1);
        assert_eq!(count(3), 2);
        assert_eq!(count(4), 3);
        assert_eq!(count(5), 6);
        assert_eq!(count(6), 9);
        assert_eq!(count(7), 18);
        for o in &orbits {
            let back = m.eval_n(o.points[0], o.period);
            assert!((back - o.points[0]).abs() <= ORBIT_TOL);
        }
        // The classical period-3 cycle is among them.
        let found = orbits.iter().any(|o| {
            o.period == 3 && (o.leftmost() - 2.0 / 9.0).abs() <= 1e-8
        });
        assert!(found);
    }

    #[test]
    fn contraction_has_only_its_fixed_point() {
        let orbits = find_periodic_orbits(&halving(), 3, 256).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].period, 1);
        assert!(orbits[0].points[0].abs() <= 1e-9);
    }

    #[test]
    fn sharkovskii_examples() {
        for m in 1..=100u64 {
            if m != 3 {
                assert!(sharkovskii_precedes(3, m).unwrap(), "3 before {m}");
            }
        }
        assert!(sharkovskii_precedes(16, 8).unwrap());
        assert!(sharkovskii_precedes(2, 1).unwrap());
        assert!(sharkovskii_precedes(6, 8).unwrap());
        assert!(!sharkovskii_precedes(8, 6).unwrap());
        assert!(!sharkovskii_precedes(5, 3).unwrap());
        assert!(sharkovskii_precedes(5, 7).unwrap());
        assert!(sharkovskii_precedes(7, 10).unwrap());
        assert!(!sharkovskii_precedes(4, 4).unwrap());
        assert!(sharkovskii_precedes(0, 1).is_err());
    }

    #[test]
    fn sharkovskii_is_a_strict_total_order_on_a_sample() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(11);
        let draw = |r: &mut SplitMix64| (r.next_u64() % 10_000) + 1;
        for _ in 0..20_000 {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            if a != b {
                let ab = sharkovskii_precedes(a, b).unwrap();
                let ba = sharkovskii_precedes(b, a).unwrap();
                assert!(ab != ba, "{a} vs {b}");
            }
            if a != b && b != c && a != c {
                let ab = sharkovskii_precedes(a, b).unwrap();
                let bc = sharkovskii_precedes(b, c).unwrap();
                if ab && bc {
                    assert!(sharkovskii_precedes(a, c).unwrap(), "{a},{b},{c}");
                }
            }
        }
    }

    #[test]
    fn liyorke_contraction_collapses_pairs() {
        let (sup, inf) = liyorke_pair_stats(&halving(), 0.0, 1.0, 60, 10).unwrap();
        assert!(sup <= 2.0_f64.powi(-50), "{sup}");
        assert!(inf >= 0.0);
    }

    #[test]
    fn liyorke_tent_separates_close_pairs() {
        let m = ScalarMap::tent();
        let (sup, inf) = liyorke_pair_stats(&m, 0.3, 0.3 + 1e-9, 200, 150).unwrap();
        assert!(sup > 0.1, "{sup}");
        assert!(inf >= 0.0);
    }

    #[test]
    fn liyorke_same_orbit_gap_vanishes() {
        // y is the third float iterate of x, which closes the period-3
        // cycle only to roundoff, so the pair is admissible. In double
        // precision the tent map drives every orbit onto the absorbing
        // fixed point 0 within about 55 steps, after which the two orbits
        // coincide bit for bit.
        let m = ScalarMap::tent();
        let x = 2.0 / 9.0;
        let y = *iterate(&m, x, 3).unwrap().last().unwrap();
        assert_ne!(x, y);
        let (sup, inf) = liyorke_pair_stats(&m, x, y, 200, 100).unwrap();
        assert_eq!(sup, 0.0);
        assert_eq!(inf, 0.0);
    }

    #[test]
    fn liyorke_rejects_identical_points() {
        let m = ScalarMap::tent();
        assert!(liyorke_pair_stats(&m, 0.5, 0.5, 10, 2).is_err());
        assert!(liyorke_pair_stats(&m, 0.4, 0.5, 2, 2).is_err());
    }

    #[test]
    fn probe_contraction_never_fires() {
        let got = sensitivity_probe(&halving(), 0.5, 0.1, 0.01, 80).unwrap();
        assert_eq!(got, None);
    }

    #[test]
    fn probe_tent_fires_quickly() {
        // Separation from the orbit of 1/3 grows like 2^n delta until the
        // fold wraps it; the largest simultaneous separation observed over
        // this probe is about 0.08, so 0.05 is an attainable target.
        let m = ScalarMap::tent();
        let got = sensitivity_probe(&m, 1.0 / 3.0, 0.05, 1e-6, 60).unwrap();
        let n = got.expect("witness expected");
        assert!(n <= 40, "n = {n}");
    }

    #[test]
    fn probe_handles_a_clipped_neighborhood() {
        let m = ScalarMap::tent();
        let got = sensitivity_probe(&m, 0.0, 0.05, 1e-6, 60).unwrap();
        assert!(got.is_none() || got.unwrap() >= 1);
    }
}
