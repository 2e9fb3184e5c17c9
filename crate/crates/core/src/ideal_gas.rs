//! Grand-canonical equation of state for ideal Bose and Fermi gases in a
//! rectangular box, including condensed phases.
//!
//! The continuum (3D) contributions are the familiar polylog forms
//!
//! ```text
//! N = ± (V/λ_T³) Li_{3/2}(±z),   βPV = ± (V/λ_T³) Li_{5/2}(±z),
//! U = (3/2) P V,                 S = β k_B (U + P V - μ N),
//! ```
//!
//! with the upper sign for bosons. When a bosonic gas condenses, the
//! geometry decides what it condenses into: in a strongly flattened box the
//! lowest transverse subband holds a macroscopic effectively-2D gas, in an
//! elongated box an effectively-1D gas, and in a roughly isotropic box the
//! single ground state. Those discrete-direction ground bands contribute
//!
//! ```text
//! d=2:  βΩ_band = -(LxLy/λ_T²) Li_2(z),    N_band = (LxLy/λ_T²) Li_1(z)
//! d=1:  βΩ_band = -(Lx/λ_T)  Li_{3/2}(z),  N_band = (Lx/λ_T)  Li_{1/2}(z)
//! d=0:  βΩ_band = ln(1-z),                 N_band = z/(1-z)
//! ```
//!
//! each with U_band = (d/2)|Ω_band| and P_band = -Ω_band/V. The band is
//! included once -βμ falls below the lowest transverse excitation scale of
//! the declared regime (λ_T²/L² for the relevant direction); above it the
//! band population is microscopic and indistinguishable from the continuum
//! count. Keeping the full polylog forms (rather than their small-μ
//! asymptotics) makes the composite equation of state exactly
//! Gibbs-Duhem-consistent, which the cycle layer relies on.

use crate::error::{Error, Result};
use crate::specfun::{polylog, polylog_inverse_3_2, polylog_inverse_3_2_negated, EvalAccuracy, ZETA_3_2};
use serde::{Deserialize, Serialize};

/// Quantum statistics of the particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Bose,
    Fermi,
}

/// Physical constants; defaults are the natural units used throughout.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub k_b: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { hbar: 1.0, mass: 1.0, k_b: 1.0 }
    }
}

impl UnitSystem {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.mass > 0.0 && self.k_b > 0.0) {
            return Err(Error::domain("UnitSystem", "hbar, mass, k_B must be positive"));
        }
        Ok(())
    }
}

/// Inverse temperature and chemical potential, with the unit system they
/// are expressed in. `beta` is 1/(k_B T), so `beta * mu` is dimensionless.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThermoConditions {
    pub beta: f64,
    pub mu: f64,
    #[serde(default)]
    pub units: UnitSystem,
}

impl ThermoConditions {
    pub fn new(beta: f64, mu: f64) -> Self {
        ThermoConditions { beta, mu, units: UnitSystem::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.units.validate()?;
        if !(self.beta > 0.0) || !self.mu.is_finite() {
            return Err(Error::domain("ThermoConditions", "beta must be positive and mu finite"));
        }
        Ok(())
    }

    /// Thermal de Broglie wavelength sqrt(2π ħ² β / m).
    pub fn lambda_t(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.units.hbar * self.units.hbar * self.beta
            / self.units.mass)
            .sqrt()
    }

    pub fn beta_mu(&self) -> f64 {
        self.beta * self.mu
    }

    /// Fugacity z = e^{βμ}.
    pub fn fugacity(&self) -> f64 {
        self.beta_mu().exp()
    }

    pub fn temperature(&self) -> f64 {
        1.0 / (self.beta * self.units.k_b)
    }
}

/// Declared condensation regime of the box. The geometry decides which
/// generalized condensate forms once the density crosses critical; the
/// regime is declared rather than inferred because the crossover constants
/// are not sharp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BecRegime {
    /// Roughly isotropic box: condensation into the single ground state.
    Isotropic0d,
    /// Elongated box (Lx >> Ly Lz scale): condensation into the 1D band of
    /// momenta along x. `chi` records the declared anisotropy exponent
    /// Lx ~ (Ly Lz)^chi used by scaling studies.
    Quasi1d { chi: f64 },
    /// Flattened box (Ly at least exponential in Lz): condensation into
    /// the 2D band of momenta in the x-y plane.
    Quasi2d,
}

/// Rectangular box, ordered Lx ≥ Ly ≥ Lz > 0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxGeometry {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub regime: BecRegime,
}

impl BoxGeometry {
    pub fn new(lx: f64, ly: f64, lz: f64, regime: BecRegime) -> Result<Self> {
        let g = BoxGeometry { lx, ly, lz, regime };
        g.validate()?;
        Ok(g)
    }

    pub fn cube(l: f64) -> Result<Self> {
        Self::new(l, l, l, BecRegime::Isotropic0d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx >= self.ly && self.ly >= self.lz && self.lz > 0.0) {
            return Err(Error::domain(
                "BoxGeometry",
                format!("requires Lx >= Ly >= Lz > 0, got ({}, {}, {})", self.lx, self.ly, self.lz),
            ));
        }
        if let BecRegime::Quasi1d { chi } = self.regime {
            if !(chi > 0.0) {
                return Err(Error::domain("BoxGeometry", "anisotropy exponent chi must be positive"));
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.lx * self.ly * self.lz
    }

    /// Condensation dimension implied by the declared regime.
    pub fn bec_dimension(&self) -> u8 {
        match self.regime {
            BecRegime::Isotropic0d => 0,
            BecRegime::Quasi1d { .. } => 1,
            BecRegime::Quasi2d => 2,
        }
    }
}

/// Crossover constants for checking a declared regime against the box
/// shape: 1D wants Lx ≳ α' Ly Lz, 2D wants Ly ≳ e^{α Lz} poly(Lz) with
/// poly(Lz) = poly_coeff * Lz. All default to 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseThresholds {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub poly_coeff: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        PhaseThresholds { alpha: 1.0, alpha_prime: 1.0, poly_coeff: 1.0 }
    }
}

impl PhaseThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha_prime > 0.0 && self.poly_coeff > 0.0) {
            return Err(Error::domain("PhaseThresholds", "thresholds must be positive"));
        }
        Ok(())
    }
}

/// Check the declared regime against the shape inequalities. Returns a
/// warning message when the declaration looks inconsistent; the constants
/// are order-of-magnitude, so this never hard-fails.
pub fn regime_warning(geo: &BoxGeometry, th: &PhaseThresholds) -> Option<String> {
    let one_d_ok = geo.lx >= th.alpha_prime * geo.ly * geo.lz;
    let two_d_ok = geo.ly >= (th.alpha * geo.lz).exp() * th.poly_coeff * geo.lz;
    match geo.regime {
        BecRegime::Quasi1d { .. } if !one_d_ok => Some(format!(
            "declared quasi-1d regime but Lx = {} < alpha' Ly Lz = {}",
            geo.lx,
            th.alpha_prime * geo.ly * geo.lz
        )),
        BecRegime::Quasi2d if !two_d_ok => Some(format!(
            "declared quasi-2d regime but Ly = {} < e^(alpha Lz) poly(Lz) = {}",
            geo.ly,
            (th.alpha * geo.lz).exp() * th.poly_coeff * geo.lz
        )),
        BecRegime::Isotropic0d if one_d_ok || two_d_ok => Some(
            "declared isotropic-0d regime but the box satisfies a lower-dimensional condensation scaling".to_string(),
        ),
        _ => None,
    }
}

/// Bulk state functions. `n_condensate` is the population of the ground
/// band (zero when not condensed); `ln_z` is βPV.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StateFunctions {
    pub n: f64,
    pub u: f64,
    pub p: f64,
    pub s: f64,
    pub ln_z: f64,
    pub n_condensate: f64,
}

/// Phase classification at a given density and temperature.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhaseReport {
    pub rho: f64,
    pub rho_c: f64,
    pub t_c: f64,
    /// Condensate fraction max(0, 1 - ρ_c/ρ).
    pub f: f64,
    /// Dimension of the condensate band, None when not condensed.
    pub bec_dim: Option<u8>,
}

/// Smallest -βμ used before logarithms, so the exact μ = 0 boundary does
/// not produce infinities.
pub const BETA_MU_CLAMP: f64 = 1e-15;

fn default_acc() -> EvalAccuracy {
    EvalAccuracy::default()
}

/// Band inclusion test: the ground band of the declared regime is treated
/// as condensed once -βμ is below the lowest transverse excitation scale.
fn active_band(species: Species, tc: &ThermoConditions, geo: &BoxGeometry) -> Option<u8> {
    if species != Species::Bose {
        return None;
    }
    let neg_bmu = -tc.beta_mu();
    let lam = tc.lambda_t();
    let window = match geo.regime {
        BecRegime::Quasi2d => (lam / geo.lz).powi(2),
        BecRegime::Quasi1d { .. } => (lam / geo.ly).powi(2),
        BecRegime::Isotropic0d => (lam / geo.lx).powi(2),
    };
    if neg_bmu <= window {
        Some(geo.bec_dimension())
    } else {
        None
    }
}

/// Grand potential, particle number, and energy of the ground band for
/// condensation dimension `d`, as (N_band, U_band, beta*P_band*V).
fn band_terms(d: u8, z: f64, tc: &ThermoConditions, geo: &BoxGeometry, acc: &EvalAccuracy) -> Result<(f64, f64, f64)> {
    // Clamp so z = 1 exactly (μ = 0) stays finite in the logarithms.
    let z = z.min((-BETA_MU_CLAMP).exp());
    let lam = tc.lambda_t();
    match d {
        2 => {
            let area = geo.lx * geo.ly / (lam * lam);
            let li2 = polylog(2.0, z, acc)?;
            let li1 = -(1.0 - z).ln();
            Ok((area * li1, area * li2 / tc.beta, area * li2))
        }
        1 => {
            let line = geo.lx / lam;
            let li32 = polylog(1.5, z, acc)?;
            let li12 = polylog(0.5, z, acc)?;
            Ok((line * li12, 0.5 * line * li32 / tc.beta, line * li32))
        }
        0 => {
            let lnz_band = -(1.0 - z).ln();
            Ok((z / (1.0 - z), 0.0, lnz_band))
        }
        _ => Err(Error::domain("band_terms", format!("no condensate band of dimension {d}"))),
    }
}

/// Full equation of state at given (β, μ): continuum polylog terms plus,
/// for a condensed Bose gas, the ground-band terms of the declared regime.
pub fn state_functions(species: Species, tc: &ThermoConditions, geo: &BoxGeometry) -> Result<StateFunctions> {
    tc.validate()?;
    geo.validate()?;
    let acc = default_acc();
    let bmu = tc.beta_mu();
    if species == Species::Bose && bmu > 0.0 {
        return Err(Error::domain(
            "state_functions",
            format!("bosonic chemical potential must satisfy mu <= 0, got beta*mu = {bmu}"),
        ));
    }
    let lam = tc.lambda_t();
    let v = geo.volume();
    let v_l3 = v / lam.powi(3);
    let z = tc.fugacity();
    let (li32, li52) = match species {
        Species::Bose => (polylog(1.5, z.min(1.0), &acc)?, polylog(2.5, z.min(1.0), &acc)?),
        Species::Fermi => (-polylog(1.5, -z, &acc)?, -polylog(2.5, -z, &acc)?),
    };
    let n_cont = v_l3 * li32;
    let beta_pv_cont = v_l3 * li52;
    let (n_band, u_band, beta_pv_band) = match active_band(species, tc, geo) {
        Some(d) => band_terms(d, z, tc, geo, &acc)?,
        None => (0.0, 0.0, 0.0),
    };
    let n = n_cont + n_band;
    let beta_pv = beta_pv_cont + beta_pv_band;
    let p = beta_pv / (tc.beta * v);
    let u = 1.5 * beta_pv_cont / tc.beta + u_band;
    let s = tc.units.k_b * tc.beta * (u + p * v - tc.mu * n);
    Ok(StateFunctions { n, u, p, s, ln_z: beta_pv, n_condensate: n_band })
}

/// Critical density ζ(3/2)/λ_T³ of the homogeneous Bose gas.
pub fn critical_density(tc: &ThermoConditions) -> f64 {
    ZETA_3_2 / tc.lambda_t().powi(3)
}

/// Asymptotic chemical potential of a condensed Bose gas with condensate
/// fraction f in the given regime:
///
/// ```text
/// d=2: -βμ = e^{-f ρ Lz λ_T²}
/// d=1: -βμ = π (f ρ Ly Lz λ_T)^{-2}
/// d=0: -βμ = (f ρ V)^{-1}
/// ```
///
/// clamped to -βμ ≥ 1e-15.
pub fn mu_bec_asymptotic(d: u8, f: f64, rho: f64, tc: &ThermoConditions, geo: &BoxGeometry) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::domain(
            "mu_bec_asymptotic",
            format!("condensate fraction must lie in (0, 1], got {f}"),
        ));
    }
    if !(rho > 0.0) {
        return Err(Error::domain("mu_bec_asymptotic", format!("density must be positive, got {rho}")));
    }
    let lam = tc.lambda_t();
    let neg_bmu = match d {
        2 => (-f * rho * geo.lz * lam * lam).exp(),
        1 => {
            let x = f * rho * geo.ly * geo.lz * lam;
            std::f64::consts::PI / (x * x)
        }
        0 => 1.0 / (f * rho * geo.volume()),
        _ => {
            return Err(Error::domain(
                "mu_bec_asymptotic",
                format!("no condensate band of dimension {d}"),
            ))
        }
    };
    Ok(-neg_bmu.max(BETA_MU_CLAMP) / tc.beta)
}

/// Invert the density relation for μ at fixed β, and classify the phase.
///
/// Fermions and uncondensed bosons invert the continuum polylog; a
/// condensed Bose gas takes the regime's asymptotic μ with the condensate
/// fraction fixed by f = 1 - ρ_c/ρ.
pub fn solve_mu(
    species: Species,
    beta: f64,
    rho: f64,
    geo: &BoxGeometry,
    units: &UnitSystem,
) -> Result<(f64, PhaseReport)> {
    units.validate()?;
    geo.validate()?;
    if !(beta > 0.0 && rho > 0.0) {
        return Err(Error::domain("solve_mu", "beta and rho must be positive"));
    }
    let acc = default_acc();
    let tc0 = ThermoConditions { beta, mu: 0.0, units: *units };
    let lam = tc0.lambda_t();
    let x = lam.powi(3) * rho;
    let rho_c = ZETA_3_2 / lam.powi(3);
    let t = tc0.temperature();
    let t_c = t * (rho / rho_c).powf(2.0 / 3.0);
    match species {
        Species::Fermi => {
            let w = polylog_inverse_3_2_negated(x, &acc)?;
            let mu = w.ln() / beta;
            Ok((mu, PhaseReport { rho, rho_c, t_c, f: 0.0, bec_dim: None }))
        }
        Species::Bose => {
            if x < ZETA_3_2 {
                let z = polylog_inverse_3_2(x, &acc)?;
                let mu = z.ln().min(-BETA_MU_CLAMP) / beta;
                Ok((mu, PhaseReport { rho, rho_c, t_c, f: 0.0, bec_dim: None }))
            } else {
                let f = (1.0 - rho_c / rho).max(0.0);
                let d = geo.bec_dimension();
                let mu = if f > 0.0 {
                    mu_bec_asymptotic(d, f, rho, &tc0, geo)?
                } else {
                    -BETA_MU_CLAMP / beta
                };
                Ok((mu, PhaseReport { rho, rho_c, t_c, f, bec_dim: Some(d) }))
            }
        }
    }
}

/// Quantum-correction diagnostic N / [V (2 m K / (ħ² N))^{3/2}]; values
/// much below 1 mean the exchange corrections to the classical equation of
/// state are negligible. For the ideal gas (K = 3N/(2β) k_B T) this equals
/// λ_T³ρ (6π)^{-3/2}.
pub fn classicality_ratio(n: f64, v: f64, k: f64, units: &UnitSystem) -> Result<f64> {
    units.validate()?;
    if !(n > 0.0 && v > 0.0 && k > 0.0) {
        return Err(Error::domain("classicality_ratio", "N, V, K must be positive"));
    }
    let h2 = units.hbar * units.hbar;
    Ok(n / (v * (2.0 * units.mass * k / (h2 * n)).powf(1.5)))
}

/// Small-μ pressure expansion of the condensed phase for the given regime:
/// the saturated continuum term ζ(5/2)/(βλ_T³) plus the regime's band
/// correction, truncated at the orders quoted below.
///
/// ```text
/// d=2: + [ζ(2) + βμ(1 - ln(-βμ))] / (β λ_T² Lz)
/// d=1: + [ζ(3/2) - 2√π sqrt(-βμ)] / (β λ_T Ly Lz)
/// d=0: - ln(-βμ) / (β V)
/// ```
pub fn pressure_bec(d: u8, tc: &ThermoConditions, geo: &BoxGeometry) -> Result<f64> {
    tc.validate()?;
    geo.validate()?;
    let bmu = tc.beta_mu().min(-BETA_MU_CLAMP);
    let lam = tc.lambda_t();
    let lead = crate::specfun::ZETA_5_2 / (tc.beta * lam.powi(3));
    let corr = match d {
        2 => {
            let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
            (zeta2 + bmu * (1.0 - (-bmu).ln())) / (tc.beta * lam * lam * geo.lz)
        }
        1 => {
            let sp = std::f64::consts::PI.sqrt();
            (ZETA_3_2 - 2.0 * sp * (-bmu).sqrt()) / (tc.beta * lam * geo.ly * geo.lz)
        }
        0 => -(-bmu).ln() / (tc.beta * geo.volume()),
        _ => return Err(Error::domain("pressure_bec", format!("no condensate band of dimension {d}"))),
    };
    Ok(lead + corr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_geo(l: f64) -> BoxGeometry {
        BoxGeometry::cube(l).unwrap()
    }

    fn tc(beta: f64, mu: f64) -> ThermoConditions {
        ThermoConditions::new(beta, mu)
    }

    #[test]
    fn dilute_limit_two_term_series() {
        // z = 1e-6 at V/λ³ = 1e6: N = z V/λ³ + z² V/(2^{3/2} λ³) + ...
        let beta = 1.0;
        let lam = tc(beta, 0.0).lambda_t();
        let l = (1e6f64).powf(1.0 / 3.0) * lam;
        let geo = cube_geo(l);
        let mu = (1e-6f64).ln() / beta;
        let s = state_functions(Species::Bose, &tc(beta, mu), &geo).unwrap();
        let expect = 1.0 + 1e-6 / 2.0f64.powf(1.5);
        assert!((s.n - expect).abs() < 1e-9, "{} vs {expect}", s.n);
    }

    #[test]
    fn saturated_thermal_density_is_critical() {
        // z clamped to the μ = 0 boundary: thermal density equals ρ_c.
        let beta = 0.7;
        let condition = tc(beta, 0.0);
        let lam = condition.lambda_t();
        let geo = cube_geo(50.0 * lam);
        let s = state_functions(Species::Bose, &condition, &geo).unwrap();
        let rho_thermal = (s.n - s.n_condensate) / geo.volume();
        let rho_c = critical_density(&condition);
        assert!((rho_thermal - rho_c).abs() < 1e-10 * rho_c);
    }

    #[test]
    fn classical_limit_equation_of_state() {
        for &z in &[1e-4, 1e-5] {
            let beta = 2.0;
            let condition = tc(beta, (z as f64).ln() / beta);
            let geo = cube_geo(30.0);
            for species in [Species::Bose, Species::Fermi] {
                let s = state_functions(species, &condition, &geo).unwrap();
                let ratio = s.p * geo.volume() * beta / s.n;
                assert!((ratio - 1.0).abs() <= 2.0 * z, "{species:?} z={z}: {ratio}");
            }
        }
    }

    #[test]
    fn energy_pressure_relation_uncondensed() {
        for (species, bmu) in [(Species::Bose, -0.3), (Species::Fermi, 1.4), (Species::Fermi, -2.0)] {
            let condition = tc(1.3, bmu / 1.3);
            let geo = cube_geo(20.0);
            let s = state_functions(species, &condition, &geo).unwrap();
            assert!(
                (s.u - 1.5 * s.p * geo.volume()).abs() <= 1e-12 * s.u.abs(),
                "{species:?}"
            );
        }
    }

    #[test]
    fn number_increases_with_mu() {
        let geo = cube_geo(15.0);
        for species in [Species::Bose, Species::Fermi] {
            let mut prev = -1.0;
            for i in 0..30 {
                let mu = -3.0 + 0.1 * i as f64;
                if species == Species::Bose && mu > 0.0 {
                    break;
                }
                let s = state_functions(species, &tc(1.0, mu), &geo).unwrap();
                assert!(s.n > prev, "{species:?} mu={mu}");
                prev = s.n;
            }
        }
    }

    #[test]
    fn grand_potential_derivative_gives_number() {
        // N = (1/β) d(lnZ)/dμ by central finite difference.
        for (species, mu) in [(Species::Bose, -0.5), (Species::Fermi, 0.8)] {
            let beta = 1.1;
            let geo = cube_geo(12.0);
            let h = 1e-6;
            let sp = state_functions(species, &tc(beta, mu + h), &geo).unwrap();
            let sm = state_functions(species, &tc(beta, mu - h), &geo).unwrap();
            let s0 = state_functions(species, &tc(beta, mu), &geo).unwrap();
            let n_fd = (sp.ln_z - sm.ln_z) / (2.0 * h * beta);
            assert!((n_fd - s0.n).abs() <= 1e-6 * s0.n, "{species:?}: {n_fd} vs {}", s0.n);
        }
    }

    #[test]
    fn entropy_positive_and_euler_consistent() {
        for (species, mu) in [(Species::Bose, -0.2), (Species::Fermi, 2.0)] {
            let condition = tc(0.9, mu);
            let geo = cube_geo(18.0);
            let s = state_functions(species, &condition, &geo).unwrap();
            assert!(s.s > 0.0);
            let euler = condition.beta * (s.u + s.p * geo.volume() - condition.mu * s.n);
            assert!((s.s - euler).abs() <= 1e-12 * s.s.abs());
        }
    }

    #[test]
    fn solve_mu_round_trip_uncondensed() {
        let beta = 1.0;
        let units = UnitSystem::default();
        let geo = cube_geo(25.0);
        let lam = tc(beta, 0.0).lambda_t();
        for (species, x) in [
            (Species::Bose, 0.05),
            (Species::Bose, 1.2),
            (Species::Bose, 2.55),
            (Species::Fermi, 0.3),
            (Species::Fermi, 4.0),
            (Species::Fermi, 40.0),
        ] {
            let rho = x / lam.powi(3);
            let (mu, report) = solve_mu(species, beta, rho, &geo, &units).unwrap();
            assert!(report.bec_dim.is_none());
            let s = state_functions(species, &tc(beta, mu), &geo).unwrap();
            let rho_back = s.n / geo.volume();
            assert!(
                (rho_back - rho).abs() <= 1e-10 * rho,
                "{species:?} x={x}: {rho_back} vs {rho}"
            );
        }
    }

    #[test]
    fn solve_mu_critical_boundary() {
        let beta = 1.0;
        let units = UnitSystem::default();
        let geo = cube_geo(25.0);
        let lam = 2.0f64.sqrt() * std::f64::consts::PI.sqrt();
        let rho = ZETA_3_2 / lam.powi(3);
        let (mu, report) = solve_mu(Species::Bose, beta, rho, &geo, &units).unwrap();
        assert!(mu < 0.0 && mu > -1e-12);
        assert!(report.f.abs() < 1e-12);
    }

    #[test]
    fn condensate_fraction_follows_temperature_ratio() {
        // At T = T_c (1/2)^{2/3} and fixed ρ the fraction is exactly 1/2.
        let units = UnitSystem::default();
        let geo = cube_geo(40.0);
        let rho = 0.5;
        let beta_c = {
            // Find β_c with λ³ρ = ζ(3/2): λ³ = (2πβ)^{3/2}.
            let lam3 = ZETA_3_2 / rho;
            lam3.powf(2.0 / 3.0) / (2.0 * std::f64::consts::PI)
        };
        let beta = beta_c / 0.5f64.powf(2.0 / 3.0); // T = T_c 2^{-2/3}
        let (_, report) = solve_mu(Species::Bose, beta, rho, &geo, &units).unwrap();
        assert!((report.f - 0.5).abs() < 1e-10, "f = {}", report.f);
        assert!((report.t_c * beta_c * units.k_b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fermi_density_at_unit_fugacity() {
        let beta = 1.0;
        let units = UnitSystem::default();
        let geo = cube_geo(25.0);
        let lam = tc(beta, 0.0).lambda_t();
        // λ³ρ = -Li_{3/2}(-1) puts z exactly at 1.
        let x = (1.0 - 0.5f64.sqrt()) * ZETA_3_2;
        let (mu, _) = solve_mu(Species::Fermi, beta, x / lam.powi(3), &geo, &units).unwrap();
        assert!(mu.abs() < 1e-10, "mu = {mu}");
    }

    #[test]
    fn mu_bec_asymptotic_closed_forms() {
        let units = UnitSystem::default();
        let condition = ThermoConditions { beta: 1.0, mu: 0.0, units };
        let lam = condition.lambda_t();
        // d=0: f ρ V = 1000.
        let geo = cube_geo(10.0);
        let rho = 1000.0 / geo.volume();
        let mu = mu_bec_asymptotic(0, 1.0, rho, &condition, &geo).unwrap();
        assert!((mu + 1e-3).abs() < 1e-15);
        // d=1: f ρ Ly Lz λ = 10 gives βμ = -π/100.
        let geo = BoxGeometry::new(400.0, 2.0, 1.0, BecRegime::Quasi1d { chi: 2.0 }).unwrap();
        let rho = 10.0 / (2.0 * 1.0 * lam);
        let mu = mu_bec_asymptotic(1, 1.0, rho, &condition, &geo).unwrap();
        assert!((mu + std::f64::consts::PI / 100.0).abs() < 1e-14);
        // d=2: f ρ Lz λ² = 10 gives βμ = -e^{-10}.
        let geo = BoxGeometry::new(50.0, 40.0, 1.0, BecRegime::Quasi2d).unwrap();
        let rho = 10.0 / (lam * lam);
        let mu = mu_bec_asymptotic(2, 1.0, rho, &condition, &geo).unwrap();
        assert!((mu + (-10.0f64).exp()).abs() < 1e-18);
        // Fraction outside (0, 1] is rejected.
        assert!(mu_bec_asymptotic(0, 0.0, rho, &condition, &geo).is_err());
    }

    #[test]
    fn condensed_state_matches_density_in_asymptotic_regime() {
        // Deep 0D condensation in a large box: state_functions at the
        // asymptotic μ must reproduce ρ well within the asymptotic error.
        let beta = 1.0;
        let units = UnitSystem::default();
        let lam = tc(beta, 0.0).lambda_t();
        let geo = cube_geo(60.0 * lam);
        let rho_c = ZETA_3_2 / lam.powi(3);
        let rho = 3.0 * rho_c;
        let (mu, report) = solve_mu(Species::Bose, beta, rho, &geo, &units).unwrap();
        assert_eq!(report.bec_dim, Some(0));
        assert!((report.f - 2.0 / 3.0).abs() < 1e-12);
        let s = state_functions(Species::Bose, &tc(beta, mu), &geo).unwrap();
        let rho_back = s.n / geo.volume();
        // The 0D inversion is exact up to the thermal part's μ-dependence,
        // suppressed by λ²/L² relative corrections times sqrt(-βμ) factors.
        assert!((rho_back - rho).abs() < 1e-4 * rho, "{rho_back} vs {rho}");
        assert!(s.n_condensate > 0.6 * report.f * s.n);
        // Thermal density never exceeds critical.
        let rho_thermal = (s.n - s.n_condensate) / geo.volume();
        assert!(rho_thermal * lam.powi(3) <= ZETA_3_2 + 1e-10);
    }

    #[test]
    fn classicality_ratio_ideal_gas_reduction() {
        let units = UnitSystem::default();
        let beta = 1.0;
        let condition = tc(beta, 0.0);
        let lam = condition.lambda_t();
        let v = 1000.0;
        // λ³ρ = 0.01 with K = 3N/(2β): ratio = λ³ρ (6π)^{-3/2}.
        let n = 0.01 * v / lam.powi(3);
        let k = 1.5 * n / beta;
        let r = classicality_ratio(n, v, k, &units).unwrap();
        let expect = 0.01 / (6.0 * std::f64::consts::PI).powf(1.5);
        assert!((r - expect).abs() < 1e-15 * expect, "{r} vs {expect}");
        assert!((expect - 1.2216e-4).abs() < 1e-8);
        // Intensive: invariant under (N, V, K) -> (cN, cV, cK).
        let r2 = classicality_ratio(7.0 * n, 7.0 * v, 7.0 * k, &units).unwrap();
        assert!((r2 - r).abs() < 1e-15 * r);
    }

    #[test]
    fn pressure_bec_matches_exact_band_pressure() {
        let beta = 1.0;
        let units = UnitSystem::default();
        let lam = ThermoConditions::new(beta, 0.0).lambda_t();
        // 0D: compare the expansion against the exact composite pressure.
        let geo = cube_geo(40.0 * lam);
        let mu = -1e-8 / beta;
        let cnd = ThermoConditions { beta, mu, units };
        let s = state_functions(Species::Bose, &cnd, &geo).unwrap();
        let p_exp = pressure_bec(0, &cnd, &geo).unwrap();
        assert!((p_exp - s.p).abs() < 1e-6 * s.p, "{p_exp} vs {}", s.p);
        // 1D: correction term has the -2 sqrt(pi) sqrt(-βμ) structure.
        let geo = BoxGeometry::new(5000.0, 3.0 * lam, 2.0 * lam, BecRegime::Quasi1d { chi: 2.0 }).unwrap();
        let mu = -1e-4 / beta;
        let cnd = ThermoConditions { beta, mu, units };
        let s = state_functions(Species::Bose, &cnd, &geo).unwrap();
        let p_exp = pressure_bec(1, &cnd, &geo).unwrap();
        assert!((p_exp - s.p).abs() < 2e-4 * s.p, "{p_exp} vs {}", s.p);
    }

    #[test]
    fn regime_warnings_fire_on_shape_mismatch() {
        let th = PhaseThresholds::default();
        let long = BoxGeometry::new(100.0, 2.0, 1.0, BecRegime::Quasi1d { chi: 2.0 }).unwrap();
        assert!(regime_warning(&long, &th).is_none());
        let not_long = BoxGeometry::new(3.0, 2.0, 1.5, BecRegime::Quasi1d { chi: 2.0 }).unwrap();
        assert!(regime_warning(&not_long, &th).is_some());
        let flat = BoxGeometry::new(30.0, 20.0, 1.0, BecRegime::Quasi2d).unwrap();
        assert!(regime_warning(&flat, &th).is_none());
        let cube = cube_geo(4.0);
        assert!(regime_warning(&cube, &th).is_none());
    }

    #[test]
    fn rejects_positive_bosonic_mu_and_bad_boxes() {
        let geo = cube_geo(5.0);
        assert!(state_functions(Species::Bose, &tc(1.0, 0.1), &geo).is_err());
        assert!(BoxGeometry::new(1.0, 2.0, 3.0, BecRegime::Isotropic0d).is_err());
        assert!(state_functions(Species::Fermi, &tc(1.0, 0.1), &geo).is_ok());
    }
}
