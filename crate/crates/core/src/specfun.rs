//! Real-argument special functions: polylogarithms Li_s(z), the inverse of
//! Li_{3/2} on both statistics branches, Riemann zeta, gamma and upper
//! incomplete gamma, and harmonic numbers.
//!
//! Everything here is pure `f64` arithmetic with no global state, so all
//! routines are reentrant and safe to call from worker threads.
//!
//! Evaluation strategy for Li_s(z), z ≤ 1:
//!
//! * nonpositive integer s: closed-form rational function of z, valid for
//!   every z < 1;
//! * |z| ≤ 1/2: the defining series Σ_{k≥1} z^k/k^s;
//! * z in (1/2, 1): expansion of Li_s(e^u) in powers of u = ln z, which
//!   converges precisely where the direct series slows down (the region
//!   where condensation physics lives);
//! * z in [−e^{2.4}, −1/2): expansion of Li_s(−e^y) in powers of y = ln(−z)
//!   with eta-function coefficients (convergence radius π in y);
//! * z < −e^{2.4}, s > 0: Gauss-Legendre quadrature of the Fermi integral
//!   representation after the substitution t = u^2.
//!
//! The quadrature fallback is built from runtime-generated Legendre nodes
//! and shares nothing with the adaptive Gauss-Kronrod reference integrator
//! in [`crate::oracles`], so the two can legitimately check each other.

use crate::error::{Error, Result};

/// ζ(3/2), the degeneracy threshold of λ³ρ for an ideal Bose gas.
pub const ZETA_3_2: f64 = 2.612_375_348_685_488;
/// ζ(5/2), which fixes the pressure of a saturated ideal Bose gas.
pub const ZETA_5_2: f64 = 1.341_487_257_250_917;

/// Polylogarithm order. Orders within 1e-9 of an integer are evaluated on
/// the integer branch; physical orders are exact integers or half-integers,
/// so the window only guards against representation noise.
pub type PolylogOrder = f64;

const ORDER_INT_TOL: f64 = 1e-9;

/// Accuracy request shared by the series and root-finding routines.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct EvalAccuracy {
    /// Relative tolerance on the returned value.
    pub rel_tol: f64,
    /// Absolute tolerance floor, used where the target may be near zero.
    pub abs_tol: f64,
    /// Hard cap on series terms or iterations.
    pub max_terms: usize,
}

impl Default for EvalAccuracy {
    /// Defaults leave headroom for the root-finders layered on top:
    /// rel_tol 1e-12, abs_tol 1e-14, max_terms 10^6.
    fn default() -> Self {
        EvalAccuracy { rel_tol: 1e-12, abs_tol: 1e-14, max_terms: 1_000_000 }
    }
}

impl EvalAccuracy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_terms < 1 {
            return Err(Error::domain(
                "EvalAccuracy",
                "requires rel_tol > 0, abs_tol > 0, max_terms >= 1",
            ));
        }
        Ok(())
    }

    /// Tightened copy for inner evaluations inside root-finders, so that
    /// polylog truncation noise stays below the outer residual target.
    fn inner(&self) -> EvalAccuracy {
        EvalAccuracy {
            rel_tol: (self.rel_tol * 1e-2).max(2e-16),
            abs_tol: (self.abs_tol * 1e-2).max(1e-300),
            max_terms: self.max_terms,
        }
    }
}

fn as_integer(s: f64) -> Option<i64> {
    let r = s.round();
    if (s - r).abs() < ORDER_INT_TOL && r.abs() < 1e15 {
        Some(r as i64)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Gamma function (Lanczos approximation, g = 7, 9 coefficients).
// ---------------------------------------------------------------------------

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real argument. Poles at nonpositive integers return
/// non-finite values (inf or NaN) rather than an error; callers on series
/// paths exclude those orders before dispatching here.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection through Γ(x)Γ(1-x) = π/sin(πx).
        let s = sin_pi(x);
        std::f64::consts::PI / (s * gamma(1.0 - x))
    } else {
        let xg = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (xg + i as f64);
        }
        let t = xg + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(xg + 0.5) * (-t).exp() * acc
    }
}

/// sin(πx) with the argument reduced modulo 2 first, so large |x| does not
/// lose the near-integer structure to rounding in the multiplication by π.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == r.floor() {
        return 0.0;
    }
    (std::f64::consts::PI * r).sin()
}

/// Harmonic number H_n = Σ_{i=1}^{n} 1/i, with H_0 = 0.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|i| 1.0 / f64::from(i)).sum()
}

// ---------------------------------------------------------------------------
// Riemann zeta.
// ---------------------------------------------------------------------------

/// Stieltjes constants γ_0..γ_8 for the Laurent expansion of ζ about s = 1.
const STIELTJES: [f64; 9] = [
    0.577_215_664_901_532_9,
    -0.072_815_845_483_676_72,
    -0.009_690_363_192_872_318,
    0.002_053_834_420_303_346,
    0.002_325_370_065_467_3,
    0.000_793_323_817_301_062,
    -0.000_238_769_345_430_199,
    -0.000_527_289_567_057_751,
    -0.000_352_123_353_803_039,
];

const BORWEIN_N: usize = 40;

/// Dirichlet eta η(s) = Σ (−1)^{k+1} k^{−s} by Borwein's Chebyshev-weighted
/// alternating sum. With n = 40 the truncation error is below 1e-28 for the
/// real orders this crate uses (s ≥ −1/2 after reflection).
fn eta_borwein(s: f64) -> f64 {
    let n = BORWEIN_N;
    // d_k = n Σ_{i≤k} t_i with t_i = (n+i-1)! 4^i / ((n-i)! (2i)!).
    let mut t = vec![0.0f64; n + 1];
    t[0] = 1.0 / n as f64;
    for i in 1..=n {
        let (nf, inf_) = (n as f64, i as f64);
        t[i] = t[i - 1] * 4.0 * (nf + inf_ - 1.0) * (nf - inf_ + 1.0)
            / ((2.0 * inf_) * (2.0 * inf_ - 1.0));
    }
    let mut d = vec![0.0f64; n + 1];
    let mut run = 0.0;
    for i in 0..=n {
        run += t[i];
        d[i] = n as f64 * run;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
        sign = -sign;
    }
    -sum / d[n]
}

/// ζ(s) on the full real line except the pole at s = 1.
///
/// Branches: Laurent-Stieltjes expansion for |s-1| ≤ 0.15, Borwein eta sum
/// for s ≥ 1/2, and the functional equation
/// ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s) for s < 1/2. Trivial zeros at
/// negative even integers are returned exactly.
fn zeta_any(s: f64) -> f64 {
    if s == 1.0 {
        return f64::NAN;
    }
    if s == 0.0 {
        // The reflection ζ(1-s) hits the pole here; the finite limit is -1/2.
        return -0.5;
    }
    let d = s - 1.0;
    if d.abs() <= 0.15 {
        let mut sum = 1.0 / d;
        let mut dk = 1.0; // (-(s-1))^k / k!
        for (k, g) in STIELTJES.iter().enumerate() {
            sum += g * dk;
            dk *= -d / (k as f64 + 1.0);
        }
        return sum;
    }
    if s >= 0.5 {
        return eta_borwein(s) / (1.0 - 2.0f64.powf(1.0 - s));
    }
    if let Some(n) = as_integer(s) {
        if n < 0 && n % 2 == 0 {
            return 0.0;
        }
    }
    let pi = std::f64::consts::PI;
    2.0f64.powf(s) * pi.powf(s - 1.0) * sin_pi(s / 2.0) * gamma(1.0 - s) * zeta_any(1.0 - s)
}

/// Riemann zeta on the convergent half-line s > 1, accurate to better than
/// 1e-12 relative.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain("zeta", format!("requires s > 1, got {s}")));
    }
    Ok(zeta_any(s))
}

/// η(s) with the removable point η(1) = ln 2 filled in.
fn eta_any(s: f64) -> f64 {
    if s == 1.0 {
        return std::f64::consts::LN_2;
    }
    (1.0 - 2.0f64.powf(1.0 - s)) * zeta_any(s)
}

// ---------------------------------------------------------------------------
// Polylogarithm branches.
// ---------------------------------------------------------------------------

/// Li_{-n}(z) for n ≥ 0 as a rational function of z, valid for every z < 1.
/// The numerator polynomial P_n obeys P_{n+1} = z((1-z)P_n' + (n+1)P_n)
/// with P_0 = z, and Li_{-n}(z) = P_n(z)/(1-z)^{n+1}.
fn polylog_neg_int(n: u32, z: f64) -> Result<f64> {
    if n > 40 {
        return Err(Error::domain(
            "polylog",
            format!("nonpositive integer order -{n} below supported depth -40"),
        ));
    }
    // coeffs[k] is the z^k coefficient of P_m.
    let mut coeffs: Vec<f64> = vec![0.0, 1.0];
    for m in 0..n {
        let deg = coeffs.len() - 1;
        // q = (1-z) P' + (m+1) P
        let mut q = vec![0.0f64; deg + 2];
        for k in 1..=deg {
            let dp = k as f64 * coeffs[k]; // z^{k-1} term of P'
            q[k - 1] += dp;
            q[k] -= dp;
        }
        for k in 0..=deg {
            q[k] += (m as f64 + 1.0) * coeffs[k];
        }
        // P_{m+1} = z q
        let mut next = vec![0.0f64; q.len() + 1];
        next[1..].copy_from_slice(&q);
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        coeffs = next;
    }
    let mut p = 0.0;
    for &c in coeffs.iter().rev() {
        p = p * z + c;
    }
    Ok(p / (1.0 - z).powi(n as i32 + 1))
}

/// Direct defining series, for |z| ≤ 1/2 where it converges geometrically.
fn series_direct(s: f64, z: f64, acc: &EvalAccuracy) -> Result<f64> {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..=acc.max_terms {
        zk *= z;
        let t = zk / (k as f64).powf(s);
        sum += t;
        if k >= 3 && t.abs() <= acc.rel_tol * sum.abs() + acc.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::convergence("polylog", format!("direct series stalled at s={s}, z={z}")))
}

/// Li_s(-e^y) through the eta-coefficient expansion
/// Li_s(-e^y) = -Σ_{k≥0} η(s-k) y^k / k!, |y| < π.
///
/// Callers keep |y| ≤ 2.4 so the sum settles well before k = 160, which in
/// turn keeps the reflected Γ(1+k-s) factors inside η finite for s ≥ -1/2.
fn eta_expansion(s: f64, y: f64, acc: &EvalAccuracy) -> Result<f64> {
    let mut sum = 0.0;
    let mut ypow = 1.0; // y^k / k!
    let mut below = 0u32;
    for k in 0..=160u32 {
        let coeff = eta_any(s - k as f64);
        let term = coeff * ypow;
        if !term.is_finite() {
            // Deep negative orders overflow the eta coefficient before the
            // y^k/k! factor can tame it; only reachable for s far outside
            // the physical range.
            return Err(Error::convergence(
                "polylog",
                format!("eta expansion coefficients overflow at s={s}, y={y}"),
            ));
        }
        sum -= term;
        if term.abs() <= acc.rel_tol * sum.abs() + acc.abs_tol {
            below += 1;
            if below >= 3 && k >= 4 {
                return Ok(sum);
            }
        } else {
            below = 0;
        }
        ypow *= y / (k as f64 + 1.0);
    }
    Err(Error::convergence("polylog", format!("eta expansion stalled at s={s}, y={y}")))
}

/// Gauss-Legendre nodes and weights on [-1, 1], generated by Newton
/// iteration on the Legendre recurrence. Deterministic and accurate to
/// machine precision; avoids any tabulated constants.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut xi = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = xi;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * xi * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (xi * p1 - p0) / (xi * xi - 1.0);
            let dx = p1 / dp;
            xi -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// -Li_s(-e^y) for s > 0 and large positive y, from the integral
/// representation (1/Γ(s)) ∫_0^∞ t^{s-1}/(e^{t-y}+1) dt with t = u².
/// Composite Gauss-Legendre with panel doubling until two refinements agree.
fn fermi_quadrature(s: f64, y: f64) -> Result<f64> {
    let upper = (y + 60.0).sqrt();
    let split = y.sqrt().min(upper);
    let (nodes, weights) = gauss_legendre(24);
    let integrand = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        2.0 * u.powf(2.0 * s - 1.0) / ((u * u - y).exp() + 1.0)
    };
    let panel = |a: f64, b: f64| {
        let c = 0.5 * (b - a);
        let d = 0.5 * (b + a);
        let mut acc = 0.0;
        for (xi, wi) in nodes.iter().zip(&weights) {
            acc += wi * integrand(c * xi + d);
        }
        c * acc
    };
    let composite = |a: f64, b: f64, m: usize| {
        let h = (b - a) / m as f64;
        (0..m).map(|j| panel(a + h * j as f64, a + h * (j as f64 + 1.0))).sum::<f64>()
    };
    let mut total = 0.0;
    for (a, b) in [(0.0, split), (split, upper)] {
        if b <= a {
            continue;
        }
        let mut m = 2;
        let mut prev = composite(a, b, m);
        loop {
            m *= 2;
            let cur = composite(a, b, m);
            if (cur - prev).abs() <= 1e-13 * cur.abs().max(1e-280) || m >= 256 {
                if (cur - prev).abs() > 1e-10 * cur.abs().max(1e-280) {
                    return Err(Error::convergence(
                        "polylog",
                        format!("Fermi integral quadrature stalled at s={s}, y={y}"),
                    ));
                }
                total += cur;
                break;
            }
            prev = cur;
        }
    }
    Ok(total / gamma(s))
}

/// Polylogarithm Li_s(z) = Σ_{k≥1} z^k/k^s for real order and real z ≤ 1.
///
/// Negative z evaluates the alternating (Fermi) branch. Errors: `Domain`
/// for z > 1, `Divergence` for z = 1 with s ≤ 1.
pub fn polylog(s: PolylogOrder, z: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !s.is_finite() || !z.is_finite() {
        return Err(Error::domain("polylog", format!("non-finite input s={s}, z={z}")));
    }
    if z > 1.0 {
        return Err(Error::domain("polylog", format!("argument z={z} exceeds 1")));
    }
    if z == 1.0 {
        if s > 1.0 {
            return Ok(zeta_any(s));
        }
        return Err(Error::divergence("polylog", format!("series diverges at z=1 for s={s} <= 1")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if let Some(n) = as_integer(s) {
        if n <= 0 {
            return polylog_neg_int((-n) as u32, z);
        }
    }
    if z.abs() <= 0.5 {
        return series_direct(s, z, acc);
    }
    if z > 0.0 {
        return polylog_small_mu(s, z.ln(), acc);
    }
    let y = (-z).ln();
    if y <= 2.4 {
        return eta_expansion(s, y, acc);
    }
    if s > 0.05 {
        return Ok(-fermi_quadrature(s, y)?);
    }
    Err(Error::domain(
        "polylog",
        format!("z={z} too negative for order s={s}; quadrature branch needs s > 0"),
    ))
}

/// Li_s(e^{βμ}) for μ ≤ 0 from the expansion about the series boundary.
///
/// For non-integer s:
/// Li_s(e^u) = Γ(1-s)(-u)^{s-1} + Σ_{k≥0} ζ(s-k) u^k/k!.
/// For positive integer s the k = s-1 term is replaced by its removable
/// limit u^{s-1}/(s-1)! (H_{s-1} - ln(-u)).
///
/// The expansion converges for |βμ| < 2π; this routine accepts the window
/// -1 < βμ ≤ 0 it is contracted for. Nonpositive integer orders are
/// rejected (the rational closed form covers them instead).
pub fn polylog_small_mu(s: PolylogOrder, beta_mu: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !(beta_mu <= 0.0 && beta_mu > -1.0) {
        return Err(Error::domain(
            "polylog_small_mu",
            format!("expansion regime is -1 < beta*mu <= 0, got {beta_mu}"),
        ));
    }
    let int_s = as_integer(s);
    if let Some(n) = int_s {
        if n <= 0 {
            return Err(Error::domain(
                "polylog_small_mu",
                format!("nonpositive integer order s={s} excluded; use the rational closed form"),
            ));
        }
    }
    if beta_mu == 0.0 {
        if s > 1.0 {
            return Ok(zeta_any(s));
        }
        return Err(Error::divergence(
            "polylog_small_mu",
            format!("diverges at mu=0 for s={s} <= 1"),
        ));
    }
    let u = beta_mu;
    let mut sum = match int_s {
        Some(n) => {
            // u^{n-1}/(n-1)! (H_{n-1} - ln(-u))
            let nm1 = (n - 1) as u32;
            let mut upow = 1.0;
            for i in 1..=nm1 {
                upow *= u / i as f64;
            }
            upow * (harmonic(nm1) - (-u).ln())
        }
        None => gamma(1.0 - s) * (-u).powf(s - 1.0),
    };
    let skip = int_s.map(|n| n - 1);
    let mut upow = 1.0; // u^k / k!
    let mut below = 0u32;
    for k in 0..=150i64 {
        if Some(k) != skip {
            let term = zeta_any(s - k as f64) * upow;
            sum += term;
            if term.abs() <= acc.rel_tol * sum.abs() + acc.abs_tol {
                below += 1;
                if below >= 3 && k >= 4 {
                    return Ok(sum);
                }
            } else {
                below = 0;
            }
        }
        upow *= u / (k as f64 + 1.0);
    }
    Err(Error::convergence(
        "polylog_small_mu",
        format!("expansion stalled at s={s}, beta_mu={beta_mu}"),
    ))
}

/// Inverse of y = Li_{3/2}(z) on the Bose branch z ∈ [0, 1].
///
/// Domain 0 ≤ y ≤ ζ(3/2); y above ζ(3/2) signals a density beyond the
/// condensation threshold and is a `Domain` error so the caller can switch
/// to condensate asymptotics.
pub fn polylog_inverse_3_2(y: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !y.is_finite() || y < 0.0 {
        return Err(Error::domain("polylog_inverse_3_2", format!("requires y >= 0, got {y}")));
    }
    if y > ZETA_3_2 {
        return Err(Error::domain(
            "polylog_inverse_3_2",
            format!("y={y} exceeds zeta(3/2); density above the condensation threshold"),
        ));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == ZETA_3_2 {
        return Ok(1.0);
    }
    let inner = acc.inner();
    let f = |z: f64| -> Result<f64> { Ok(polylog(1.5, z, &inner)? - y) };
    // Largest float strictly below 1; the derivative Li_{1/2}(z)/z diverges
    // at 1 itself, so iterates never sit exactly on the boundary.
    let one_below = 1.0 - f64::EPSILON / 2.0;
    // Initial guess: series inversion for small y, boundary asymptotics
    // Li_{3/2}(e^u) ~ zeta(3/2) - 2 sqrt(pi) sqrt(-u) near z = 1.
    let mut z = if y > 2.0 {
        let d = (ZETA_3_2 - y) / (2.0 * std::f64::consts::PI.sqrt());
        (-d * d).exp().min(one_below)
    } else {
        (y * 0.7).min(0.5).max(f64::MIN_POSITIVE)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut flo, mut fhi) = (-y, ZETA_3_2 - y);
    let tol = y * acc.rel_tol + f64::MIN_POSITIVE;
    for _ in 0..300 {
        let fz = f(z)?;
        if fz.abs() <= tol {
            return Ok(z);
        }
        if fz > 0.0 {
            hi = z;
            fhi = fz;
        } else {
            lo = z;
            flo = fz;
        }
        if hi - lo <= hi * 2.3e-16 {
            // Bracket collapsed to adjacent floats; near the condensation
            // boundary the residual floor is set by the slope of Li_{3/2}
            // per ulp of z, so the better endpoint is the rounded inverse.
            return Ok(if flo.abs() <= fhi.abs() { lo } else { hi });
        }
        // Newton step with d Li_{3/2}/dz = Li_{1/2}(z)/z, safeguarded by
        // bisection whenever it leaves the bracket.
        let deriv = polylog(0.5, z, &inner)? / z;
        let mut znew = z - fz / deriv;
        if !(znew > lo && znew < hi) || !znew.is_finite() {
            znew = 0.5 * (lo + hi);
        }
        znew = znew.clamp(f64::MIN_POSITIVE, one_below);
        if znew == z {
            znew = (0.5 * (lo + hi)).clamp(f64::MIN_POSITIVE, one_below);
            if znew == z {
                return Ok(z);
            }
        }
        z = znew;
    }
    Err(Error::convergence("polylog_inverse_3_2", format!("no convergence at y={y}")))
}

/// Inverse of y = -Li_{3/2}(-w) on the Fermi branch w ≥ 0 (both arguments
/// negated relative to the Bose branch). Defined for every y ≥ 0.
pub fn polylog_inverse_3_2_negated(y: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !y.is_finite() || y < 0.0 {
        return Err(Error::domain(
            "polylog_inverse_3_2_negated",
            format!("requires y >= 0, got {y}"),
        ));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let inner = acc.inner();
    let g = |w: f64| -> Result<f64> { Ok(-polylog(1.5, -w, &inner)? - y) };
    // Sommerfeld-style bracket guess: -Li_{3/2}(-w) ~ (ln w)^{3/2}/Γ(5/2).
    let mut hi = if y > 1.5 {
        ((y * gamma(2.5)).powf(2.0 / 3.0)).exp() * 1.5 + 2.0 * y
    } else {
        2.0 * y + 1.0
    };
    let mut ghi = g(hi)?;
    for _ in 0..200 {
        if ghi >= 0.0 {
            break;
        }
        hi *= 2.0;
        ghi = g(hi)?;
    }
    let (mut lo, mut glo) = (0.0f64, -y);
    let mut w = (hi * 0.5).min(y.max(f64::MIN_POSITIVE));
    let tol = y * acc.rel_tol + f64::MIN_POSITIVE;
    for _ in 0..300 {
        let gw = g(w)?;
        if gw.abs() <= tol {
            return Ok(w);
        }
        if gw > 0.0 {
            hi = w;
            ghi = gw;
        } else {
            lo = w;
            glo = gw;
        }
        if hi - lo <= hi * 2.3e-16 {
            return Ok(if glo.abs() <= ghi.abs() { lo } else { hi });
        }
        // d/dw [-Li_{3/2}(-w)] = -Li_{1/2}(-w)/w > 0.
        let deriv = -polylog(0.5, -w, &inner)? / w;
        let mut wnew = w - gw / deriv;
        if !(wnew > lo && wnew < hi) || !wnew.is_finite() {
            // Geometric bisection spans wide brackets in few steps.
            wnew = if hi > 4.0 * lo.max(1e-300) && hi - lo > 1.0 {
                (lo.max(hi * 1e-6) * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
        }
        if wnew == w {
            wnew = 0.5 * (lo + hi);
            if wnew == w {
                return Ok(w);
            }
        }
        w = wnew;
    }
    Err(Error::convergence("polylog_inverse_3_2_negated", format!("no convergence at y={y}")))
}

// ---------------------------------------------------------------------------
// Upper incomplete gamma.
// ---------------------------------------------------------------------------

/// Lower incomplete gamma γ(s,x) from the ascending series
/// x^s e^{-x} Σ_{k≥0} x^k / (s(s+1)...(s+k)); requires s > 0, good for
/// x < s + 1.
fn lower_gamma_series(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    for k in 1..10_000 {
        term *= x / (s + k as f64);
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            return Ok(x.powf(s) * (-x).exp() * sum);
        }
    }
    Err(Error::convergence("gamma_upper", format!("ascending series stalled at s={s}, x={x}")))
}

/// Γ(s,x) by the modified-Lentz continued fraction
/// e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...))), for x ≥ 1 or
/// x ≥ s+1.
fn upper_gamma_cf(s: f64, x: f64) -> Result<f64> {
    let tiny = 1e-300;
    let b0 = x + 1.0 - s;
    let mut f = if b0.abs() < tiny { tiny } else { b0 };
    let mut c = f;
    let mut d = 0.0f64;
    for i in 1..=500 {
        let ai = -(i as f64) * (i as f64 - s);
        let bi = x + 2.0 * i as f64 + 1.0 - s;
        d = bi + ai * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = bi + ai / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 3e-15 {
            return Ok((s * x.ln() - x).exp() / f);
        }
    }
    Err(Error::convergence("gamma_upper", format!("continued fraction stalled at s={s}, x={x}")))
}

/// Exponential integral E_1(x) = Γ(0,x) from the alternating power series,
/// reliable for x ≤ 1.
fn e1_series(x: f64) -> f64 {
    let mut sum = -STIELTJES[0] - x.ln();
    let mut term = 1.0; // (-x)^k / k!
    for k in 1..60 {
        term *= -x / k as f64;
        sum -= term / k as f64;
        if term.abs() / k as f64 <= 1e-17 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Upper incomplete gamma Γ(s,x) for real s and x ≥ 0.
///
/// Branches: ascending series for s > 0, x < s+1; continued fraction for
/// large x; for s ≤ 0 and small x, the ascending series one unit above
/// (or E_1 at integer s) walked down through
/// Γ(s-1,x) = (Γ(s,x) - x^{s-1}e^{-x})/(s-1), which is stable in that
/// direction because the value grows as s decreases.
pub fn gamma_upper(s: f64, x: f64) -> Result<f64> {
    if !s.is_finite() || !x.is_finite() || x < 0.0 {
        return Err(Error::domain("gamma_upper", format!("requires finite s and x >= 0, got s={s}, x={x}")));
    }
    if x == 0.0 {
        if s > 0.0 {
            return Ok(gamma(s));
        }
        return Err(Error::divergence(
            "gamma_upper",
            format!("integral diverges at x=0 for s={s} <= 0"),
        ));
    }
    if s > 0.0 {
        if x < s + 1.0 {
            return Ok(gamma(s) - lower_gamma_series(s, x)?);
        }
        return upper_gamma_cf(s, x);
    }
    if x >= 1.0 {
        return upper_gamma_cf(s, x);
    }
    let emx = (-x).exp();
    let nonpos_int = as_integer(s).filter(|&n| n <= 0 && (s - n as f64).abs() < 1e-12);
    let (start_s, mut g) = match nonpos_int {
        Some(_) => (0.0, e1_series(x)),
        None => {
            let m = (-s).ceil();
            let sp = s + m + 1.0; // in (1, 2]
            let sp = if sp > 1.0 + 1e-12 { sp - 1.0 } else { sp }; // keep in (0, 1] when possible
            (sp, gamma(sp) - lower_gamma_series(sp, x)?)
        }
    };
    let mut scur = start_s;
    while scur > s + 1e-9 {
        let target = scur - 1.0;
        g = (g - x.powf(target) * emx) / target;
        scur = target;
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
