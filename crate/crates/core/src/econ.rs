//! Two economic applications of contractive random iteration: random
//! utility processes and the closed-form optimal stochastic growth model,
//! whose log-capital dynamics form a two-map affine system conjugate to the
//! ternary Cantor system.

use std::io::Write;
use std::path::Path;

use crate::error::{invalid, Result};
use crate::ifs::boxset::{compute_attractor, AttractorResult, BoxSet};
use crate::ifs::map::{AffineMap, ProbVector};
use crate::ifs::system::IfsSystem;
use crate::rng::SplitMix64;

/// Utility recursion `U_n = xi_n U_{n-1}` with `xi_n` drawn from a finite
/// set of contraction factors.
#[derive(Clone, Debug)]
pub struct MultiplicativeUtilityParams {
    rhos: Vec<f64>,
    pi: ProbVector,
    k0: f64,
}

impl MultiplicativeUtilityParams {
    pub fn new(rhos: Vec<f64>, pi: Vec<f64>, k0: f64) -> Result<Self> {
        if rhos.len() < 2 {
            return Err(invalid("at least two contraction factors are required"));
        }
        for r in &rhos {
            if !(r.is_finite() && *r > 0.0 && *r < 1.0) {
                return Err(invalid("every factor must lie strictly in (0, 1)"));
            }
        }
        for i in 0..rhos.len() {
            for j in i + 1..rhos.len() {
                if rhos[i] == rhos[j] {
                    return Err(invalid("contraction factors must be pairwise distinct"));
                }
            }
        }
        let pi = ProbVector::new(pi)?;
        if pi.len() != rhos.len() {
            return Err(invalid("probability vector length must match the factors"));
        }
        if !k0.is_finite() {
            return Err(invalid("k0 must be finite"));
        }
        Ok(Self { rhos, pi, k0 })
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn pi(&self) -> &ProbVector {
        &self.pi
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Mean of `log rho` under pi: the almost-sure decay rate of
    /// `(1/n) log(U_n / k0)`.
    pub fn mean_log_rho(&self) -> f64 {
        self.rhos
            .iter()
            .zip(self.pi.weights())
            .map(|(r, w)| w * r.ln())
            .sum()
    }
}

/// Utility recursion `U_n = rho U_{n-1} + eps_n` with shocks drawn from a
/// finite set of nonnegative levels.
#[derive(Clone, Debug)]
pub struct AffineUtilityParams {
    rho: f64,
    rs: Vec<f64>,
    pi: ProbVector,
    k0: f64,
}

impl AffineUtilityParams {
    /// The shock levels may include zero (so the ternary Cantor recursion
    /// is representable) but must be pairwise distinct with at least one
    /// strictly positive.
    pub fn new(rho: f64, rs: Vec<f64>, pi: Vec<f64>, k0: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0 && rho < 1.0) {
            return Err(invalid("rho must lie strictly in (0, 1)"));
        }
        if rs.len() < 2 {
            return Err(invalid("at least two shock levels are required"));
        }
        for r in &rs {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(invalid("shock levels must be finite and nonnegative"));
            }
        }
        if !rs.iter().any(|r| *r > 0.0) {
            return Err(invalid("at least one shock level must be positive"));
        }
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                if rs[i] == rs[j] {
                    return Err(invalid("shock levels must be pairwise distinct"));
                }
            }
        }
        let pi = ProbVector::new(pi)?;
        if pi.len() != rs.len() {
            return Err(invalid("probability vector length must match the shocks"));
        }
        if !k0.is_finite() {
            return Err(invalid("k0 must be finite"));
        }
        Ok(Self { rho, rs, pi, k0 })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    pub fn pi(&self) -> &ProbVector {
        &self.pi
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }
}

fn draw_indices(pi: &ProbVector, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| pi.sample(rng.next_f64())).collect()
}

/// `(U_0 .. U_n)` by the recursion `U_k = rhos[s_k] U_{k-1}` on an explicit
/// shock-index sequence. Exposed so tests can force a draw.
pub fn simulate_multiplicative_utility_with_shocks(
    p: &MultiplicativeUtilityParams,
    shocks: &[usize],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(shocks.len() + 1);
    out.push(p.k0);
    for s in shocks {
        let rho = *p
            .rhos
            .get(*s)
            .ok_or_else(|| invalid("shock index out of range"))?;
        let last = *out.last().expect("nonempty");
        out.push(rho * last);
    }
    Ok(out)
}

/// `(U_0 .. U_n)` with the shock indices drawn from pi by inverse CDF on a
/// seeded stream.
pub fn simulate_multiplicative_utility(
    p: &MultiplicativeUtilityParams,
    n: u32,
    seed: u64,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let shocks = draw_indices(&p.pi, n as usize, seed);
    simulate_multiplicative_utility_with_shocks(p, &shocks)
}

/// Closed form `U_n = k0 * prod rhos[s_i]`, evaluated as a running product
/// in draw order.
pub fn multiplicative_closed_form(
    p: &MultiplicativeUtilityParams,
    shocks: &[usize],
) -> Result<f64> {
    let mut prod = 1.0;
    for s in shocks {
        prod *= *p
            .rhos
            .get(*s)
            .ok_or_else(|| invalid("shock index out of range"))?;
    }
    Ok(p.k0 * prod)
}

/// `(U_0 .. U_n)` by the recursion `U_k = rho U_{k-1} + rs[s_k]` on an
/// explicit shock-index sequence.
pub fn simulate_affine_utility_with_shocks(
    p: &AffineUtilityParams,
    shocks: &[usize],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(shocks.len() + 1);
    out.push(p.k0);
    for s in shocks {
        let r = *p
            .rs
            .get(*s)
            .ok_or_else(|| invalid("shock index out of range"))?;
        let last = *out.last().expect("nonempty");
        out.push(p.rho * last + r);
    }
    Ok(out)
}

/// `(U_0 .. U_n)` with seeded draws.
pub fn simulate_affine_utility(p: &AffineUtilityParams, n: u32, seed: u64) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let shocks = draw_indices(&p.pi, n as usize, seed);
    simulate_affine_utility_with_shocks(p, &shocks)
}

/// Closed form `U_n = rho^n k0 + sum_{i=1..n} rho^(n-i) eps_i`, evaluated
/// with explicit powers so it shares no operation order with the recursion.
pub fn affine_closed_form(p: &AffineUtilityParams, shocks: &[usize]) -> Result<f64> {
    let n = shocks.len() as i32;
    let mut acc = p.rho.powi(n) * p.k0;
    for (i, s) in shocks.iter().enumerate() {
        let r = *p
            .rs
            .get(*s)
            .ok_or_else(|| invalid("shock index out of range"))?;
        acc += p.rho.powi(n - 1 - i as i32) * r;
    }
    Ok(acc)
}

/// Parameters of the log-utility, cube-root-technology growth economy with
/// a two-point productivity shock.
#[derive(Clone, Copy, Debug)]
pub struct GrowthParams {
    rho: f64,
    lambda_a: f64,
    lambda_b: f64,
    q: f64,
}

impl GrowthParams {
    /// Requires `lambda_a > 1 > lambda_b > 0`, a discount factor in
    /// (0, 1), and a shock probability in (0, 1). The text motivating the
    /// model also caps the expansive shock at `1/lambda_b`; that cap is
    /// not enforced here because the standard worked parameter set
    /// `(1.2, 0.9)` sits outside it and nothing downstream depends on it.
    pub fn new(rho: f64, lambda_a: f64, lambda_b: f64, q: f64) -> Result<Self> {
        for v in [rho, lambda_a, lambda_b, q] {
            if !v.is_finite() {
                return Err(invalid("growth parameters must be finite"));
            }
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid("discount factor must lie in (0, 1)"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("shock probability must lie in (0, 1)"));
        }
        if !(lambda_b > 0.0 && lambda_b < 1.0) {
            return Err(invalid("lambda_b must lie in (0, 1)"));
        }
        if !(lambda_a > 1.0) {
            return Err(invalid("lambda_a must exceed 1"));
        }
        Ok(Self {
            rho,
            lambda_a,
            lambda_b,
            q,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn offset(&self, lambda: f64) -> f64 {
        lambda.ln() + self.rho.ln() - 3.0_f64.ln()
    }

    /// Left endpoint of the invariant log-capital interval: the fixed point
    /// of the bad-shock map.
    pub fn alpha(&self) -> f64 {
        1.5 * self.offset(self.lambda_b)
    }

    /// Right endpoint: the fixed point of the good-shock map.
    pub fn beta(&self) -> f64 {
        1.5 * self.offset(self.lambda_a)
    }
}

/// The closed-form optimal policy: split output `y` into consumption
/// `(1 - rho/3) y` and next-period capital `rho y / 3`. Savings are computed
/// as the residual `k = y - c`; because `c` lies in `[y/2, y]` that
/// subtraction is exact (Sterbenz), so `c + k == y` holds bit for bit while
/// `k` still equals `rho*y/3` to rounding.
pub fn growth_policy(g: &GrowthParams, y: f64) -> Result<(f64, f64)> {
    if !(y.is_finite() && y > 0.0) {
        return Err(invalid("output must be positive"));
    }
    let c = y - g.rho * y / 3.0;
    let k_next = y - c;
    Ok((c, k_next))
}

fn expected_inverse_consumption(g: &GrowthParams, k_next: f64, theta: f64) -> f64 {
    // E[xi u'(c')] with c' = theta * xi * k'^(1/3): xi cancels against u',
    // but evaluate literally so the identity is tested, not assumed.
    let fk = k_next.cbrt();
    let c_a = theta * (g.lambda_a * fk);
    let c_b = theta * (g.lambda_b * fk);
    g.q * g.lambda_a / c_a + (1.0 - g.q) * g.lambda_b / c_b
}

/// Relative defect of the Euler equation `u'(c) = rho f'(k') E[xi u'(c')]`
/// under the constant consumption-ratio policy `c = theta y`.
pub fn policy_euler_residual(g: &GrowthParams, y: f64, theta: f64) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(invalid("output must be positive"));
    }
    if !(theta.is_finite() && theta > 0.0 && theta < 1.0) {
        return Err(invalid("the consumption ratio must lie in (0, 1)"));
    }
    let c = theta * y;
    let k_next = y - c;
    let lhs = 1.0 / c;
    let f_prime = 1.0 / (3.0 * k_next.cbrt().powi(2));
    let rhs = g.rho * f_prime * expected_inverse_consumption(g, k_next, theta);
    Ok((lhs - rhs).abs() / lhs)
}

/// Relative Euler defect of the closed-form policy at output `y`. Zero in
/// exact arithmetic; in doubles it sits at roundoff level.
pub fn euler_residual(g: &GrowthParams, y: f64) -> Result<f64> {
    let (c, k_next) = growth_policy(g, y)?;
    let lhs = 1.0 / c;
    let f_prime = 1.0 / (3.0 * k_next.cbrt().powi(2));
    let theta = c / y;
    let rhs = g.rho * f_prime * expected_inverse_consumption(g, k_next, theta);
    Ok((lhs - rhs).abs() / lhs)
}

/// Output grid and consumption policy produced by value-function
/// iteration.
#[derive(Clone, Debug)]
pub struct GrowthSolution {
    /// Log-spaced output grid.
    pub ys: Vec<f64>,
    /// Consumption at each grid output.
    pub c: Vec<f64>,
    /// Bellman sweeps performed.
    pub iterations: u32,
    /// Final sup-norm change of the value function.
    pub sup_delta: f64,
    /// Whether the sup-norm change reached 1e-10 within the sweep budget.
    pub converged: bool,
}

const VFI_Y_LO: f64 = 0.05;
const VFI_Y_HI: f64 = 5.0;
const VFI_TOL: f64 = 1e-10;

/// Numerical oracle for the growth policy: value-function iteration with
/// log-utility and cube-root technology on a log-spaced output grid over
/// `[0.05, 5]`, linear interpolation of the value in log output (exact for
/// the problem's log-linear value function, flat beyond the edges), and
/// golden-section search for the inner maximization. Exhausting `iters`
/// without reaching the tolerance returns a result flagged unconverged.
pub fn solve_growth_numerically(
    g: &GrowthParams,
    grid_size: u32,
    iters: u32,
) -> Result<GrowthSolution> {
    if grid_size < 200 {
        return Err(invalid("the oracle grid needs at least 200 points"));
    }
    if iters < 100 {
        return Err(invalid("the oracle needs an iteration budget of at least 100"));
    }
    let n = grid_size as usize;
    let log_lo = VFI_Y_LO.ln();
    let log_hi = VFI_Y_HI.ln();
    let step = (log_hi - log_lo) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|i| (log_lo + i as f64 * step).exp()).collect();
    let interp = |v: &[f64], y: f64| -> f64 {
        let t = (y.ln() - log_lo) / step;
        if t <= 0.0 {
            return v[0];
        }
        if t >= (n - 1) as f64 {
            return v[n - 1];
        }
        let i = t.floor() as usize;
        let frac = t - i as f64;
        v[i] + frac * (v[i + 1] - v[i])
    };
    let continuation = |v: &[f64], k: f64| -> f64 {
        let fk = k.cbrt();
        g.q * interp(v, g.lambda_a * fk) + (1.0 - g.q) * interp(v, g.lambda_b * fk)
    };
    let maximize = |v: &[f64], y: f64| -> (f64, f64) {
        let h = |k: f64| (y - k).ln() + g.rho * continuation(v, k);
        let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let mut a = 1e-9 * y;
        let mut b = (1.0 - 1e-9) * y;
        let mut c1 = b - inv_phi * (b - a);
        let mut c2 = a + inv_phi * (b - a);
        let mut h1 = h(c1);
        let mut h2 = h(c2);
        for _ in 0..100 {
            if b - a <= 1e-12 * y {
                break;
            }
            if h1 >= h2 {
                b = c2;
                c2 = c1;
                h2 = h1;
                c1 = b - inv_phi * (b - a);
                h1 = h(c1);
            } else {
                a = c1;
                c1 = c2;
                h1 = h2;
                c2 = a + inv_phi * (b - a);
                h2 = h(c2);
            }
        }
        let k = 0.5 * (a + b);
        (h(k), k)
    };
    let mut v = vec![0.0; n];
    let mut iterations = 0;
    let mut sup_delta = f64::INFINITY;
    while iterations < iters {
        let mut delta = 0.0f64;
        let mut v_new = vec![0.0; n];
        for i in 0..n {
            let (val, _) = maximize(&v, ys[i]);
            delta = delta.max((val - v[i]).abs());
            v_new[i] = val;
        }
        v = v_new;
        iterations += 1;
        sup_delta = delta;
        if delta <= VFI_TOL {
            break;
        }
    }
    let c: Vec<f64> = ys
        .iter()
        .map(|y| {
            let (_, k) = maximize(&v, *y);
            y - k
        })
        .collect();
    Ok(GrowthSolution {
        ys,
        c,
        iterations,
        sup_delta,
        converged: sup_delta <= VFI_TOL,
    })
}

/// The two-map affine system governing log capital: `l_s(kappa) = kappa/3 +
/// (log lambda_s + log rho - log 3)`, maps ordered (bad shock, good shock)
/// with weights `(1-q, q)`, on the interval between the two fixed points.
pub fn log_capital_ifs(g: &GrowthParams) -> Result<IfsSystem> {
    let (alpha, beta) = (g.alpha(), g.beta());
    let l_b = AffineMap::one_d(1.0 / 3.0, g.offset(g.lambda_b))?;
    let l_a = AffineMap::one_d(1.0 / 3.0, g.offset(g.lambda_a))?;
    for (m, fix) in [(&l_b, alpha), (&l_a, beta)] {
        let image = m.apply(&[fix])?;
        if (image[0] - fix).abs() > 1e-12 {
            return Err(invalid("interval endpoint is not a map fixed point"));
        }
    }
    IfsSystem::new(
        vec![l_b, l_a],
        Some(ProbVector::new(vec![1.0 - g.q, g.q])?),
        &[alpha],
        &[beta],
    )
}

/// Affine change of coordinates sending the log-capital interval onto
/// `[0, 1]`: `tau = (kappa - alpha) / (beta - alpha)`. It intertwines the
/// bad-shock map with `t -> t/3` and the good-shock map with
/// `t -> t/3 + 2/3`.
pub fn conjugacy_to_unit(g: &GrowthParams, kappa: f64) -> Result<f64> {
    let (alpha, beta) = (g.alpha(), g.beta());
    if !(kappa >= alpha && kappa <= beta) {
        return Err(invalid(format!(
            "kappa = {kappa} lies outside [{alpha}, {beta}]"
        )));
    }
    Ok((kappa - alpha) / (beta - alpha))
}

/// A simulated trajectory of the growth economy; all sequences share the
/// index range `0..=T`.
#[derive(Clone, Debug)]
pub struct GrowthPath {
    pub k: Vec<f64>,
    pub y: Vec<f64>,
    pub c: Vec<f64>,
    pub i: Vec<f64>,
    pub xi: Vec<f64>,
}

impl GrowthPath {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// CSV with header `n,k,y,c,i,xi`, floats at 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "n,k,y,c,i,xi")?;
        for n in 0..self.len() {
            writeln!(
                w,
                "{n},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.k[n], self.y[n], self.c[n], self.i[n], self.xi[n]
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }
}

/// Simulate the closed-form economy on an explicit shock-index sequence
/// (0 = bad shock, 1 = good shock, matching [`log_capital_ifs`]). The
/// accounting identities `y_n = c_n + i_n` and `i_n = k_{n+1}` hold
/// bit-exactly by construction.
pub fn simulate_growth_with_shocks(
    g: &GrowthParams,
    k0: f64,
    shocks: &[usize],
) -> Result<GrowthPath> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(invalid("initial capital must be positive"));
    }
    if shocks.is_empty() {
        return Err(invalid("at least one period is required"));
    }
    let mut path = GrowthPath {
        k: Vec::with_capacity(shocks.len()),
        y: Vec::with_capacity(shocks.len()),
        c: Vec::with_capacity(shocks.len()),
        i: Vec::with_capacity(shocks.len()),
        xi: Vec::with_capacity(shocks.len()),
    };
    let mut k = k0;
    for s in shocks {
        let xi = match s {
            0 => g.lambda_b,
            1 => g.lambda_a,
            _ => return Err(invalid("shock index out of range")),
        };
        let y = xi * k.cbrt();
        let (c, k_next) = growth_policy(g, y)?;
        path.k.push(k);
        path.y.push(y);
        path.c.push(c);
        path.i.push(k_next);
        path.xi.push(xi);
        k = k_next;
    }
    Ok(path)
}

/// Simulate `T + 1` periods with shocks drawn from `(1-q, q)` on a seeded
/// stream.
pub fn simulate_growth(g: &GrowthParams, k0: f64, t: u32, seed: u64) -> Result<GrowthPath> {
    if t < 1 {
        return Err(invalid("T must be at least 1"));
    }
    let pi = ProbVector::new(vec![1.0 - g.q, g.q])?;
    let shocks = draw_indices(&pi, t as usize + 1, seed);
    simulate_growth_with_shocks(g, k0, &shocks)
}

/// Compute the log-capital attractor at the kappa-space resolution
/// corresponding to `eps_unit` on the conjugated unit interval, and return
/// it together with its image under the conjugacy. The conjugated set
/// lives on the grid `(eps_unit', origin 0)` with `eps_unit'` equal to
/// `eps_unit` up to roundoff, so it can be compared directly against unit
/// Cantor box sets.
pub fn growth_attractor_conjugated(
    g: &GrowthParams,
    eps_unit: f64,
    max_iter: u32,
) -> Result<(AttractorResult, BoxSet)> {
    if !(eps_unit.is_finite() && eps_unit > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    let sys = log_capital_ifs(g)?;
    let width = g.beta() - g.alpha();
    let res = compute_attractor(&sys, eps_unit * width, max_iter)?;
    let conj = res
        .boxes
        .rescaled(1.0 / width, &[-g.alpha() / width])?;
    Ok((res, conj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::chaos::cantor_membership;

    fn growth_params() -> GrowthParams {
        GrowthParams::new(0.9, 1.2, 0.9, 0.5).unwrap()
    }

    #[test]
    fn multiplicative_params_reject_duplicates() {
        assert!(MultiplicativeUtilityParams::new(vec![0.5, 0.5], vec![0.5, 0.5], 1.0).is_err());
        assert!(MultiplicativeUtilityParams::new(vec![0.5, 1.0], vec![0.5, 0.5], 1.0).is_err());
        assert!(MultiplicativeUtilityParams::new(vec![0.5, 0.25], vec![0.5, 0.5], 1.0).is_ok());
    }

    #[test]
    fn multiplicative_recursion_equals_product() {
        let p = MultiplicativeUtilityParams::new(vec![0.5, 0.25], vec![0.5, 0.5], 1.0).unwrap();
        let seq = simulate_multiplicative_utility(&p, 60, 4).unwrap();
        assert_eq!(seq.len(), 61);
        assert_eq!(seq[0], 1.0);
        let shocks = draw_indices(p.pi(), 60, 4);
        let closed = multiplicative_closed_form(&p, &shocks).unwrap();
        let last = *seq.last().unwrap();
        assert!(((last - closed) / closed).abs() <= 1e-12);
    }

    #[test]
    fn multiplicative_log_rate_approaches_the_mean() {
        // Factors near 1 keep U_n in floating range over a long horizon.
        let p =
            MultiplicativeUtilityParams::new(vec![0.9995, 0.9985], vec![0.5, 0.5], 1.0).unwrap();
        let n = 20_000;
        let seq = simulate_multiplicative_utility(&p, n, 10).unwrap();
        let rate = (seq[n as usize] / p.k0()).ln() / n as f64;
        assert!((rate - p.mean_log_rho()).abs() <= 0.02, "rate {rate}");
    }

    #[test]
    fn affine_recursion_equals_power_sum() {
        let p = AffineUtilityParams::new(0.7, vec![0.2, 1.3], vec![0.3, 0.7], 0.5).unwrap();
        let shocks = draw_indices(p.pi(), 300, 9);
        let seq = simulate_affine_utility_with_shocks(&p, &shocks).unwrap();
        for n in [1usize, 7, 50, 300] {
            let closed = affine_closed_form(&p, &shocks[..n]).unwrap();
            let rel = ((seq[n] - closed) / closed).abs();
            assert!(rel <= 1e-12, "n={n}: {rel}");
        }
    }

    #[test]
    fn affine_process_stays_in_its_band() {
        let p = AffineUtilityParams::new(0.6, vec![0.4, 1.0], vec![0.5, 0.5], 1.5).unwrap();
        let lo = 0.4 / (1.0 - 0.6);
        let hi = 1.0 / (1.0 - 0.6);
        assert!(p.k0() >= lo && p.k0() <= hi);
        let seq = simulate_affine_utility(&p, 2_000, 3).unwrap();
        for u in &seq {
            assert!(*u >= lo - 1e-12 && *u <= hi + 1e-12);
        }
    }

    #[test]
    fn affine_cantor_recursion_lands_on_the_cantor_set() {
        let p = AffineUtilityParams::new(
            1.0 / 3.0,
            vec![0.0, 2.0 / 3.0],
            vec![0.5, 0.5],
            0.5,
        )
        .unwrap();
        let seq = simulate_affine_utility(&p, 1_040, 12).unwrap();
        for u in &seq[40..] {
            assert!(cantor_membership(*u, 3.0, 20, 1e-9).unwrap(), "{u}");
        }
    }

    #[test]
    fn affine_params_reject_bad_shock_sets() {
        assert!(AffineUtilityParams::new(0.5, vec![0.3, 0.3], vec![0.5, 0.5], 1.0).is_err());
        assert!(AffineUtilityParams::new(0.5, vec![0.0, 0.0], vec![0.5, 0.5], 1.0).is_err());
        assert!(AffineUtilityParams::new(0.5, vec![-0.1, 0.3], vec![0.5, 0.5], 1.0).is_err());
        assert!(AffineUtilityParams::new(0.5, vec![0.0, 0.3], vec![0.5, 0.5], 1.0).is_ok());
    }

    #[test]
    fn policy_splits_output_exactly() {
        let g = growth_params();
        let (c, k) = growth_policy(&g, 1.0).unwrap();
        assert!((c - 0.7).abs() <= 1e-15);
        assert!((k - 0.3).abs() <= 1e-15);
        let mut rng = SplitMix64::new(5);
        for _ in 0..1_000 {
            let y = 0.01 + 20.0 * rng.next_f64();
            let (c, k) = growth_policy(&g, y).unwrap();
            assert_eq!(c + k, y);
            assert!(((c / y) - (1.0 - g.rho() / 3.0)).abs() <= 1e-15);
        }
        assert!(growth_policy(&g, 0.0).is_err());
        assert!(growth_policy(&g, -1.0).is_err());
    }

    #[test]
    fn euler_residual_vanishes_for_the_closed_form() {
        let g = growth_params();
        for y in [0.1, 1.0, 10.0] {
            let r = euler_residual(&g, y).unwrap();
            assert!(r <= 1e-12, "y={y}: {r}");
        }
        let r_small = euler_residual(&g, 0.1).unwrap();
        let r_large = euler_residual(&g, 10.0).unwrap();
        assert!((r_small - r_large).abs() <= 1e-12);
    }

    #[test]
    fn perturbed_policy_fails_the_euler_equation() {
        let g = growth_params();
        let theta = (1.0 - g.rho() / 3.0) * 1.01;
        let r = policy_euler_residual(&g, 1.0, theta).unwrap();
        assert!(r > 1e-3, "{r}");
        // rhs/lhs = rho / (1.01 rho - 0.03) at the perturbed ratio.
        let expected = (1.0 - g.rho() / (1.01 * g.rho() - 0.03)).abs();
        assert!((r - expected).abs() <= 1e-12);
    }

    #[test]
    fn growth_params_enforce_the_shock_band() {
        assert!(GrowthParams::new(0.9, 1.2, 0.9, 0.5).is_ok());
        assert!(GrowthParams::new(0.9, 0.9, 0.9, 0.5).is_err());
        assert!(GrowthParams::new(0.9, 1.2, 1.0, 0.5).is_err());
        assert!(GrowthParams::new(0.9, 1.3, 0.8, 0.5).is_ok());
        assert!(GrowthParams::new(0.9, 1.3, 0.8, 1.0).is_err());
        assert!(GrowthParams::new(1.0, 1.2, 0.9, 0.5).is_err());
    }

    #[test]
    fn log_capital_interval_matches_hand_values() {
        let g = growth_params();
        assert!((g.alpha() - -1.9639999799756434).abs() <= 1e-12);
        assert!((g.beta() - -1.5324768712979722).abs() <= 1e-12);
        let width = 1.5 * (g.lambda_a() / g.lambda_b()).ln();
        assert!((g.beta() - g.alpha() - width).abs() <= 1e-12);
    }

    #[test]
    fn log_capital_system_shape() {
        let g = growth_params();
        let sys = log_capital_ifs(&g).unwrap();
        assert_eq!(sys.dim(), 1);
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.cert_depth(), 1);
        assert!((sys.lambda() - 1.0 / 3.0).abs() <= 1e-15);
        let pi = sys.pi().unwrap();
        assert_eq!(pi.weights(), &[0.5, 0.5]);
        // Map 0 fixes alpha, map 1 fixes beta.
        let a = sys.map(0).apply(&[g.alpha()]).unwrap();
        assert!((a[0] - g.alpha()).abs() <= 1e-12);
        let b = sys.map(1).apply(&[g.beta()]).unwrap();
        assert!((b[0] - g.beta()).abs() <= 1e-12);
    }

    #[test]
    fn conjugacy_maps_endpoints_and_midpoint() {
        let g = growth_params();
        assert_eq!(conjugacy_to_unit(&g, g.alpha()).unwrap(), 0.0);
        assert_eq!(conjugacy_to_unit(&g, g.beta()).unwrap(), 1.0);
        let mid = 0.5 * (g.alpha() + g.beta());
        assert!((conjugacy_to_unit(&g, mid).unwrap() - 0.5).abs() <= 1e-12);
        assert!(conjugacy_to_unit(&g, g.beta() + 0.1).is_err());
    }

    #[test]
    fn conjugacy_intertwines_the_maps() {
        let g = growth_params();
        let sys = log_capital_ifs(&g).unwrap();
        let mut rng = SplitMix64::new(21);
        for _ in 0..10_000 {
            let kappa = g.alpha() + (g.beta() - g.alpha()) * rng.next_f64();
            let tau = conjugacy_to_unit(&g, kappa).unwrap();
            let kb = sys.map(0).apply(&[kappa]).unwrap()[0];
            let ka = sys.map(1).apply(&[kappa]).unwrap()[0];
            let tb = conjugacy_to_unit(&g, kb).unwrap();
            let ta = conjugacy_to_unit(&g, ka).unwrap();
            assert!((tb - tau / 3.0).abs() <= 1e-12);
            assert!((ta - (tau / 3.0 + 2.0 / 3.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn growth_path_identities_hold_bit_exactly() {
        let g = growth_params();
        let path = simulate_growth(&g, 1.0, 1_000, 8).unwrap();
        assert_eq!(path.len(), 1_001);
        for n in 0..path.len() {
            assert_eq!(path.c[n] + path.i[n], path.y[n]);
            assert_eq!(path.y[n], path.xi[n] * path.k[n].cbrt());
            assert!(path.k[n] > 0.0 && path.c[n] > 0.0 && path.i[n] > 0.0);
            if n + 1 < path.len() {
                assert_eq!(path.i[n], path.k[n + 1]);
            }
        }
    }

    #[test]
    fn log_capital_is_absorbed_into_the_interval() {
        let g = growth_params();
        for k0 in [1e-6, 1.0, 1e6] {
            let path = simulate_growth(&g, k0, 300, 14).unwrap();
            for n in 80..path.len() {
                let kappa = path.k[n].ln();
                assert!(
                    kappa >= g.alpha() - 1e-9 && kappa <= g.beta() + 1e-9,
                    "k0={k0} n={n} kappa={kappa}"
                );
            }
        }
    }

    #[test]
    fn forced_good_shocks_converge_to_beta() {
        let g = growth_params();
        let shocks = vec![1usize; 60];
        let path = simulate_growth_with_shocks(&g, 1.0, &shocks).unwrap();
        let kappa_last = path.k[59].ln();
        let start_gap = (1.0_f64.ln() - g.beta()).abs();
        let bound = start_gap * 3.0_f64.powi(-50) + 1e-12;
        assert!((kappa_last - g.beta()).abs() <= bound.max(1e-12) * 10.0);
    }

    #[test]
    fn growth_csv_has_the_documented_header() {
        let g = growth_params();
        let path = simulate_growth(&g, 1.0, 3, 0).unwrap();
        let mut buf = Vec::new();
        path.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,k,y,c,i,xi");
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn conjugated_attractor_matches_the_unit_cantor_set() {
        use crate::ifs::boxset::hausdorff_distance;
        use crate::ifs::system::cantor_system;
        let g = growth_params();
        let eps = 3.0_f64.powi(-5);
        let (res, conj) = growth_attractor_conjugated(&g, eps, 64).unwrap();
        assert!(res.converged);
        let unit = compute_attractor(&cantor_system(3.0).unwrap(), eps, 64).unwrap();
        let dh = hausdorff_distance(&conj, &unit.boxes).unwrap();
        assert!(dh <= 2.0 * eps, "dh = {dh}");
    }

    #[test]
    fn value_iteration_recovers_the_closed_form_ratio() {
        let g = GrowthParams::new(0.5, 1.2, 0.9, 0.5).unwrap();
        let sol = solve_growth_numerically(&g, 200, 150).unwrap();
        assert!(sol.converged, "sup delta {}", sol.sup_delta);
        let target = 1.0 - g.rho() / 3.0;
        let n = sol.ys.len();
        let (lo, hi) = (n / 10, n - n / 10);
        for i in lo..hi {
            let ratio = sol.c[i] / sol.ys[i];
            assert!((ratio - target).abs() <= 1e-3, "y={} ratio={ratio}", sol.ys[i]);
        }
        // Consumption is monotone in output.
        for w in sol.c.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }
}
