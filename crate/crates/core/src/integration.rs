//! Monte Carlo integration of the differential cross sections: detector
//! averages, total cross sections with an infrared cutoff, and collider
//! event rates.
//!
//! The integrator stratifies the first two unit-cube coordinates on a
//! square grid and samples the remaining ones uniformly. Each stratum owns
//! an independent ChaCha8 stream (`seed_from_u64(seed)`, stream = stratum
//! index), and strata are reduced in index order with compensated sums, so
//! results depend only on `(seed, budget, integrand)` and never on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cross_section::{double_compton_dsigma, single_compton_dsigma, unpolarized_sigma5};
use crate::error::{Error, Result};
use crate::kinematics::{CollisionSetup, Direction, FinalStateConfig};

/// Minimum number of samples per stratum (needed for a variance estimate).
const MIN_PER_STRATUM: u64 = 2;
/// Upper bound on strata per stratified axis.
const MAX_STRATA_PER_AXIS: u64 = 64;
/// Number of stratified coordinates.
const STRATIFIED_DIMS: usize = 2;

/// Monte Carlo estimate with its one-standard-deviation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub statistical_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Integrates `f` over the unit cube `[0,1)^dim`. `f` returns the already
/// weighted integrand (value divided by the sampling density).
pub fn stratified<F>(dim: usize, budget: u64, seed: u64, f: F) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if dim < STRATIFIED_DIMS {
        return Err(Error::InvalidArgument(format!(
            "integration dimension {dim} below {STRATIFIED_DIMS}"
        )));
    }
    let needed = MIN_PER_STRATUM;
    if budget < needed {
        return Err(Error::Budget {
            given: budget,
            needed,
        });
    }
    let side = ((budget / MIN_PER_STRATUM) as f64).sqrt().floor() as u64;
    let side = side.clamp(1, MAX_STRATA_PER_AXIS);
    let strata = side * side;
    let per = budget / strata;
    let volume = 1.0 / strata as f64;

    let moments: Vec<Result<(f64, f64)>> = (0..strata)
        .into_par_iter()
        .map(|h| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(h);
            let (i, j) = ((h / side) as f64, (h % side) as f64);
            let mut x = vec![0.0; dim];
            let mut sum = CompensatedSum::default();
            let mut sum_sq = CompensatedSum::default();
            for _ in 0..per {
                x[0] = (i + rng.random::<f64>()) / side as f64;
                x[1] = (j + rng.random::<f64>()) / side as f64;
                for v in &mut x[STRATIFIED_DIMS..] {
                    *v = rng.random::<f64>();
                }
                let y = f(&x)?;
                sum.add(y);
                sum_sq.add(y * y);
            }
            let n = per as f64;
            let mean = sum.value() / n;
            let var = ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
            Ok((mean, var / n))
        })
        .collect();

    let mut value = CompensatedSum::default();
    let mut variance = CompensatedSum::default();
    for m in moments {
        let (mean, var_of_mean) = m?;
        value.add(volume * mean);
        variance.add(volume * volume * var_of_mean);
    }
    Ok(IntegrationResult {
        value: value.value(),
        statistical_error: variance.value().max(0.0).sqrt(),
        n_samples: strata * per,
        seed,
    })
}

/// Log-uniform map of `u ∈ [0,1)` onto `[lo, hi]`; returns `(ω, dω/du)`.
fn log_uniform(u: f64, lo: f64, hi: f64) -> (f64, f64) {
    let span = (hi / lo).ln();
    let w = lo * (u * span).exp();
    (w.min(hi), w * span)
}

/// Direction sampling for total cross sections.
#[derive(Debug, Clone, Copy)]
enum AngularMap {
    /// `cos θ` and `φ` uniform.
    Isotropic,
    /// Backscatter cone around `θ = π` with `u = (π - θ)/scale`, radial
    /// density `∝ u/(1+u²)^{3/2}` truncated at `u_max = π/scale`.
    Cone { scale: f64, cdf_max: f64 },
}

impl AngularMap {
    fn for_setup(setup: &CollisionSetup) -> Self {
        if setup.is_rest_frame() {
            return AngularMap::Isotropic;
        }
        let scale = setup.mass / setup.electron_energy;
        let u_max = std::f64::consts::PI / scale;
        AngularMap::Cone {
            scale,
            cdf_max: 1.0 - 1.0 / (1.0 + u_max * u_max).sqrt(),
        }
    }

    /// Maps two unit coordinates to a direction and its solid-angle weight.
    fn sample(&self, a: f64, b: f64) -> (Direction, f64) {
        use std::f64::consts::PI;
        let phi = 2.0 * PI * b;
        match *self {
            AngularMap::Isotropic => {
                let cos = 1.0 - 2.0 * a;
                (Direction::new(cos.clamp(-1.0, 1.0).acos(), phi), 4.0 * PI)
            }
            AngularMap::Cone { scale, cdf_max } => {
                // Inverse of F(u) = 1 - (1+u²)^{-1/2}, written to avoid cancellation at small F.
                let f = a * cdf_max;
                let u = (f * (2.0 - f)).sqrt() / (1.0 - f);
                let delta = u * scale;
                // sin θ dθ dφ over the density u/(1+u²)^{3/2}/cdf_max · du dφ/2π.
                let weight = if u > 0.0 {
                    2.0 * PI * scale * delta.sin() * cdf_max * (1.0 + u * u).powf(1.5) / u
                } else {
                    2.0 * PI * scale * scale * cdf_max
                };
                (Direction::new(PI - delta, phi), weight)
            }
        }
    }
}

/// Which final state a total cross section integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Single,
    Double,
    Triple,
}

impl Process {
    pub const ALL: [Process; 3] = [Process::Single, Process::Double, Process::Triple];

    pub fn name(&self) -> &'static str {
        match self {
            Process::Single => "single",
            Process::Double => "double",
            Process::Triple => "triple",
        }
    }

    pub fn photons(&self) -> usize {
        match self {
            Process::Single => 1,
            Process::Double => 2,
            Process::Triple => 3,
        }
    }
}

impl std::str::FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Process::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("unknown process '{s}' (single, double, triple)"))
            })
    }
}

fn skip_degenerate(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::DegenerateDirection { .. }) => Ok(0.0),
        other => other,
    }
}

/// Total cross section in barn. Photon energies below `threshold` are not
/// counted; the double and triple processes need `threshold > 0`. The
/// ordered phase-space integral is divided by `n!` for `n` identical
/// photons.
pub fn total_cross_section(
    setup: &CollisionSetup,
    threshold: f64,
    process: Process,
    budget: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    let w_max = setup.max_photon_energy();
    if process != Process::Single && !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{} Compton totals need a positive infrared cutoff",
            process.name()
        )));
    }
    if !(threshold >= 0.0) || threshold >= w_max {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} MeV outside [0, {w_max}) MeV"
        )));
    }
    let map = AngularMap::for_setup(setup);
    match process {
        Process::Single => stratified(2, budget, seed, |x| {
            let (d, wd) = map.sample(x[0], x[1]);
            Ok(wd * skip_degenerate(single_compton_dsigma(setup, &d, threshold))?)
        }),
        Process::Double => stratified(5, budget, seed, |x| {
            let (w1, j1) = log_uniform(x[0], threshold, w_max);
            let (d1, wd1) = map.sample(x[1], x[2]);
            let (d2, wd2) = map.sample(x[3], x[4]);
            let v = skip_degenerate(double_compton_dsigma(setup, &[d1, d2], w1, threshold))?;
            Ok(v * j1 * wd1 * wd2 / 2.0)
        }),
        Process::Triple => stratified(8, budget, seed, |x| {
            let (w1, j1) = log_uniform(x[0], threshold, w_max);
            let (w2, j2) = log_uniform(x[1], threshold, w_max);
            let (d1, wd1) = map.sample(x[2], x[3]);
            let (d2, wd2) = map.sample(x[4], x[5]);
            let (d3, wd3) = map.sample(x[6], x[7]);
            let cfg = FinalStateConfig::new([d1, d2, d3], w1, w2);
            let v = skip_degenerate(unpolarized_sigma5(setup, &cfg, threshold))?;
            Ok(v * j1 * j2 * wd1 * wd2 * wd3 / 6.0)
        }),
    }
}

/// Angular window of one detector: `φ ± √Ω/2`, `θ ± arcsin(√Ω/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorWindow {
    pub cos_lo: f64,
    pub cos_hi: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
}

impl DetectorWindow {
    pub fn new(center: &Direction, solid_angle: f64) -> Result<Self> {
        if !(solid_angle > 0.0) || !solid_angle.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "solid angle must be positive, got {solid_angle}"
            )));
        }
        let half = solid_angle.sqrt() / 2.0;
        if half > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "solid angle {solid_angle} sr too large for a window"
            )));
        }
        let dtheta = half.asin();
        let (lo, hi) = (center.theta - dtheta, center.theta + dtheta);
        if lo <= 0.0 || hi >= std::f64::consts::PI {
            return Err(Error::InvalidArgument(format!(
                "detector window θ ∈ [{lo}, {hi}] leaves (0, π)"
            )));
        }
        Ok(DetectorWindow {
            cos_lo: hi.cos(),
            cos_hi: lo.cos(),
            phi_lo: center.phi - half,
            phi_hi: center.phi + half,
        })
    }

    /// Solid angle actually covered by the window.
    pub fn solid_angle(&self) -> f64 {
        (self.cos_hi - self.cos_lo) * (self.phi_hi - self.phi_lo)
    }

    /// Uniform point in `(cos θ, φ)`.
    fn sample(&self, a: f64, b: f64) -> Direction {
        let cos = self.cos_lo + a * (self.cos_hi - self.cos_lo);
        Direction::new(cos.acos(), self.phi_lo + b * (self.phi_hi - self.phi_lo))
    }
}

/// Detector-averaged unpolarized cross section `⟨σ⟩` in barn/sr³: σ5
/// averaged over the three angular windows and integrated over
/// `ω₁, ω₂ ∈ [ε, ω_max]`, with `ω₃ ≥ ε` enforced by the integrand.
pub fn detector_average(
    setup: &CollisionSetup,
    centers: &[Direction; 3],
    solid_angle: f64,
    threshold: f64,
    budget: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    let windows = [
        DetectorWindow::new(&centers[0], solid_angle)?,
        DetectorWindow::new(&centers[1], solid_angle)?,
        DetectorWindow::new(&centers[2], solid_angle)?,
    ];
    let w_max = setup.max_photon_energy();
    if !(threshold > 0.0) || threshold >= w_max {
        return Err(Error::InvalidArgument(format!(
            "detector threshold {threshold} MeV outside (0, {w_max}) MeV"
        )));
    }
    stratified(8, budget, seed, |x| {
        let (w1, j1) = log_uniform(x[0], threshold, w_max);
        let (w2, j2) = log_uniform(x[1], threshold, w_max);
        let d = [
            windows[0].sample(x[2], x[3]),
            windows[1].sample(x[4], x[5]),
            windows[2].sample(x[6], x[7]),
        ];
        let cfg = FinalStateConfig::new(d, w1, w2);
        Ok(j1 * j2 * skip_degenerate(unpolarized_sigma5(setup, &cfg, threshold))?)
    })
}

/// σ5 integrated over `ω₁, ω₂ ∈ [ε, ω_max]` at fixed directions,
/// barn/sr³.
pub fn energy_integrated_sigma5(
    setup: &CollisionSetup,
    directions: &[Direction; 3],
    threshold: f64,
    budget: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    let w_max = setup.max_photon_energy();
    if !(threshold > 0.0) || threshold >= w_max {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} MeV outside (0, {w_max}) MeV"
        )));
    }
    stratified(2, budget, seed, |x| {
        let (w1, j1) = log_uniform(x[0], threshold, w_max);
        let (w2, j2) = log_uniform(x[1], threshold, w_max);
        let cfg = FinalStateConfig::new(*directions, w1, w2);
        Ok(j1 * j2 * skip_degenerate(unpolarized_sigma5(setup, &cfg, threshold))?)
    })
}

/// Colliding-beam parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamParameters {
    pub photons_per_pulse: f64,
    pub electrons_per_bunch: f64,
    /// Transverse beam diameter, μm.
    pub transverse_size_um: f64,
    pub repetition_rate_hz: f64,
}

impl BeamParameters {
    /// LCLS-like defaults.
    pub const LCLS: BeamParameters = BeamParameters {
        photons_per_pulse: 2e13,
        electrons_per_bunch: 1e9,
        transverse_size_um: 40.0,
        repetition_rate_hz: 120.0,
    };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("photons_per_pulse", self.photons_per_pulse),
            ("electrons_per_bunch", self.electrons_per_bunch),
            ("transverse_size_um", self.transverse_size_um),
            ("repetition_rate_hz", self.repetition_rate_hz),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.transverse_size_um == 0.0 {
            return Err(Error::InvalidArgument(
                "transverse_size_um must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Overlap area `π(d/2)²` in m², assuming perfect transverse overlap.
    pub fn overlap_area_m2(&self) -> f64 {
        let r = 0.5 * self.transverse_size_um * 1e-6;
        std::f64::consts::PI * r * r
    }
}

/// Events per second for a cross section in barn.
pub fn event_rate(sigma_barn: f64, beams: &BeamParameters) -> f64 {
    sigma_barn * crate::constants::BARN_M2 * beams.photons_per_pulse * beams.electrons_per_bunch
        / beams.overlap_area_m2()
        * beams.repetition_rate_hz
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-13).abs() < 1e-20);
    }

    #[test]
    fn stratified_integrates_polynomial() {
        let r = stratified(3, 20_000, 7, |x| Ok(x[0] * x[1] + x[2] * x[2])).unwrap();
        let exact = 0.25 + 1.0 / 3.0;
        assert!((r.value - exact).abs() < 4.0 * r.statistical_error + 1e-12);
        assert!(r.statistical_error > 0.0 && r.statistical_error < 1e-2);
    }

    #[test]
    fn stratified_rejects_tiny_budget() {
        assert!(matches!(
            stratified(2, 1, 0, |_| Ok(1.0)),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn cone_map_covers_sphere() {
        // ∫dΩ over the full sphere via the cone weight must give 4π.
        let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
        let map = AngularMap::for_setup(&setup);
        let r = stratified(2, 40_000, 3, |x| Ok(map.sample(x[0], x[1]).1)).unwrap();
        assert!(
            (r.value - 4.0 * PI).abs() < 4.0 * r.statistical_error,
            "{r:?}"
        );
    }

    #[test]
    fn log_map_jacobian() {
        let r = stratified(2, 4000, 1, |x| {
            let (w, j) = log_uniform(x[0], 0.01, 1.0);
            Ok(j / w)
        })
        .unwrap();
        assert!((r.value - 100f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn detector_window_normalization() {
        let w = DetectorWindow::new(&Direction::new(PI / 2.0, 0.0), 0.378).unwrap();
        assert!((w.solid_angle() - 0.378).abs() < 1e-12);
        assert!(DetectorWindow::new(&Direction::new(0.1, 0.0), 0.378).is_err());
        assert!(DetectorWindow::new(&Direction::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn event_rate_lcls() {
        let r = event_rate(2e-5, &BeamParameters::LCLS);
        assert!((r - 3.8197).abs() < 1e-3, "{r}");
        assert_eq!(event_rate(0.0, &BeamParameters::LCLS), 0.0);
        let doubled = BeamParameters {
            electrons_per_bunch: 2e9,
            ..BeamParameters::LCLS
        };
        assert_eq!(event_rate(2e-5, &doubled), 2.0 * r);
    }

    #[test]
    fn process_names_round_trip() {
        for p in Process::ALL {
            assert_eq!(p.name().parse::<Process>().unwrap(), p);
        }
        assert!("quadruple".parse::<Process>().is_err());
    }
}
