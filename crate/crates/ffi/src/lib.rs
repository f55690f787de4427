//! C ABI for the triple Compton engine.
//!
//! # Conventions
//!
//! Every function returns a [`TcStatus`]; results go through out-pointers
//! that are written only on success. On failure a human-readable message
//! is available from [`tc_last_error_message`] on the same thread.
//!
//! Objects ([`TcSetup`], [`TcDensity`]) are opaque handles created by a
//! `*_new`/`*_from_*` function and released with the matching `*_free`.
//! Angles are radians, energies MeV, cross sections barn. Photon and beam
//! polarization labels are 1 or 2; matrices are 8×8, row-major, with
//! basis index `4(λ₁−1) + 2(λ₂−1) + (λ₃−1)`.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the documented number of
//! elements for the duration of the call. Null pointers are reported as
//! [`TcStatus::NullPointer`]; panics never cross the boundary.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use triple_compton::algebra::Pol;
use triple_compton::amplitude::BeamPolarization;
use triple_compton::cross_section::spin_summed_sigma5;
use triple_compton::entanglement::{density_from_amplitudes, gme_tau, DensityMatrix};
use triple_compton::integration::{
    detector_average, event_rate, total_cross_section, BeamParameters, Process,
};
use triple_compton::kinematics::{CollisionSetup, Direction, FinalStateConfig};
use triple_compton::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Unphysical point or vanishing amplitudes.
    Unphysical = 3,
    NonConvergence = 4,
    /// Any other numerical failure (propagator pole, degenerate direction).
    Numerical = 5,
    Panic = 6,
}

/// Collision kinematics: incoming electron energy and photon energy.
pub struct TcSetup(CollisionSetup);

/// Validated 8×8 polarization density matrix of the photon triplet.
pub struct TcDensity(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidDensity(_)
        | Error::Budget { .. }
        | Error::Config { .. }
        | Error::Parse { .. } => TcStatus::InvalidArgument,
        Error::Unphysical | Error::VanishingAmplitudes => TcStatus::Unphysical,
        Error::NonConvergence { .. } => TcStatus::NonConvergence,
        _ => TcStatus::Numerical,
    }
}

struct Failure(TcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: String) -> Failure {
    Failure(TcStatus::InvalidArgument, message)
}

/// Runs `f`, converting errors and panics into a status and message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            TcStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, what: &str, value: T) -> Result<(), Failure> {
    let slot = p.as_mut().ok_or_else(|| null(what))?;
    *slot = value;
    Ok(())
}

unsafe fn array3(p: *const f64, what: &str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::array::from_fn(|i| *p.add(i)))
}

unsafe fn directions(theta: *const f64, phi: *const f64) -> Result<[Direction; 3], Failure> {
    let t = array3(theta, "theta")?;
    let p = array3(phi, "phi")?;
    Ok(std::array::from_fn(|j| Direction::new(t[j], p[j])))
}

fn pol(label: u32, what: &str) -> Result<Pol, Failure> {
    match label {
        1 => Ok(Pol::First),
        2 => Ok(Pol::Second),
        _ => Err(invalid(format!("{what} must be 1 or 2, got {label}"))),
    }
}

/// Message of the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a head-on collision; `electron_energy_mev` equal to the
/// electron mass puts the electron at rest.
#[no_mangle]
pub unsafe extern "C" fn tc_setup_new(
    electron_energy_mev: f64,
    omega0_mev: f64,
    out: *mut *mut TcSetup,
) -> TcStatus {
    guard(|| {
        let setup = CollisionSetup::new(electron_energy_mev, omega0_mev)?;
        write(out, "out", Box::into_raw(Box::new(TcSetup(setup))))
    })
}

/// Creates a collision with the electron at rest.
#[no_mangle]
pub unsafe extern "C" fn tc_setup_rest_frame(omega0_mev: f64, out: *mut *mut TcSetup) -> TcStatus {
    guard(|| {
        let setup = CollisionSetup::rest_frame(omega0_mev)?;
        write(out, "out", Box::into_raw(Box::new(TcSetup(setup))))
    })
}

/// Releases a setup; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tc_setup_free(setup: *mut TcSetup) {
    if !setup.is_null() {
        drop(Box::from_raw(setup));
    }
}

/// Electron-spin-summed σ5 (½ Σ over both spins) for beam polarization
/// `beam_label` and final labels `labels[3]`, barn·MeV⁻²·sr⁻³. Zero
/// outside the physical region or below `threshold_mev`.
#[no_mangle]
pub unsafe extern "C" fn tc_sigma5(
    setup: *const TcSetup,
    theta: *const f64,
    phi: *const f64,
    omega1_mev: f64,
    omega2_mev: f64,
    beam_label: u32,
    labels: *const u32,
    threshold_mev: f64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        let setup = &read(setup, "setup")?.0;
        let dirs = directions(theta, phi)?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let l = [
            pol(*labels, "labels[0]")?,
            pol(*labels.add(1), "labels[1]")?,
            pol(*labels.add(2), "labels[2]")?,
        ];
        let beam = BeamPolarization::Basis(pol(beam_label, "beam_label")?);
        let cfg = FinalStateConfig::new(dirs, omega1_mev, omega2_mev);
        let v = spin_summed_sigma5(setup, &cfg, beam, l, threshold_mev)?;
        write(out, "out", v)
    })
}

/// Spin-summed photon polarization density matrix at one phase-space
/// point.
#[no_mangle]
pub unsafe extern "C" fn tc_density_from_amplitudes(
    setup: *const TcSetup,
    theta: *const f64,
    phi: *const f64,
    omega1_mev: f64,
    omega2_mev: f64,
    beam_label: u32,
    out: *mut *mut TcDensity,
) -> TcStatus {
    guard(|| {
        let setup = &read(setup, "setup")?.0;
        let dirs = directions(theta, phi)?;
        let beam = BeamPolarization::Basis(pol(beam_label, "beam_label")?);
        let rho = density_from_amplitudes(setup, &dirs, omega1_mev, omega2_mev, beam)?;
        write(out, "out", Box::into_raw(Box::new(TcDensity(rho))))
    })
}

/// Validates and wraps a density matrix given as 64 real and 64
/// imaginary parts (row-major).
#[no_mangle]
pub unsafe extern "C" fn tc_density_from_elements(
    re: *const f64,
    im: *const f64,
    out: *mut *mut TcDensity,
) -> TcStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let re: [f64; 64] = std::array::from_fn(|k| *re.add(k));
        let im: [f64; 64] = std::array::from_fn(|k| *im.add(k));
        let rho = DensityMatrix::from_parts(&re, &im)?;
        write(out, "out", Box::into_raw(Box::new(TcDensity(rho))))
    })
}

/// Copies the 64 real and 64 imaginary parts (row-major) into `re`, `im`.
#[no_mangle]
pub unsafe extern "C" fn tc_density_elements(
    density: *const TcDensity,
    re: *mut f64,
    im: *mut f64,
) -> TcStatus {
    guard(|| {
        let rho = &read(density, "density")?.0;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let (r, i) = rho.to_parts();
        std::ptr::copy_nonoverlapping(r.as_ptr(), re, 64);
        std::ptr::copy_nonoverlapping(i.as_ptr(), im, 64);
        Ok(())
    })
}

/// Releases a density matrix; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tc_density_free(density: *mut TcDensity) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}

/// Genuine tripartite entanglement measure τ ∈ [0, ½], solved to
/// `tolerance` (e.g. 1e-7).
#[no_mangle]
pub unsafe extern "C" fn tc_gme_tau(
    density: *const TcDensity,
    tolerance: f64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        let rho = &read(density, "density")?.0;
        let r = gme_tau(rho, tolerance)?;
        write(out, "out", r.tau)
    })
}

/// Events per second for a cross section in barn and colliding beams of
/// the given intensities, transverse diameter (μm) and repetition rate.
#[no_mangle]
pub unsafe extern "C" fn tc_event_rate(
    sigma_barn: f64,
    photons_per_pulse: f64,
    electrons_per_bunch: f64,
    transverse_size_um: f64,
    repetition_rate_hz: f64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        let beams = BeamParameters {
            photons_per_pulse,
            electrons_per_bunch,
            transverse_size_um,
            repetition_rate_hz,
        };
        beams.validate()?;
        if !(sigma_barn >= 0.0) || !sigma_barn.is_finite() {
            return Err(invalid(format!(
                "cross section must be non-negative, got {sigma_barn}"
            )));
        }
        write(out, "out", event_rate(sigma_barn, &beams))
    })
}

/// Detector-averaged unpolarized cross section (b/sr³) for three detectors
/// centred on `theta[3]`, `phi[3]`, each of solid angle `solid_angle_sr`.
#[no_mangle]
pub unsafe extern "C" fn tc_detector_average(
    setup: *const TcSetup,
    theta: *const f64,
    phi: *const f64,
    solid_angle_sr: f64,
    threshold_mev: f64,
    budget: u64,
    seed: u64,
    value: *mut f64,
    error: *mut f64,
) -> TcStatus {
    guard(|| {
        let setup = &read(setup, "setup")?.0;
        let dirs = directions(theta, phi)?;
        if value.is_null() || error.is_null() {
            return Err(null("value/error"));
        }
        let r = detector_average(setup, &dirs, solid_angle_sr, threshold_mev, budget, seed)?;
        write(value, "value", r.value)?;
        write(error, "error", r.statistical_error)
    })
}

/// Total cross section (barn) for `photons` = 1, 2 or 3 emitted photons
/// above `threshold_mev`.
#[no_mangle]
pub unsafe extern "C" fn tc_total_cross_section(
    setup: *const TcSetup,
    photons: u32,
    threshold_mev: f64,
    budget: u64,
    seed: u64,
    value: *mut f64,
    error: *mut f64,
) -> TcStatus {
    guard(|| {
        let setup = &read(setup, "setup")?.0;
        let process = match photons {
            1 => Process::Single,
            2 => Process::Double,
            3 => Process::Triple,
            _ => return Err(invalid(format!("photons must be 1, 2 or 3, got {photons}"))),
        };
        if value.is_null() || error.is_null() {
            return Err(null("value/error"));
        }
        let r = total_cross_section(setup, threshold_mev, process, budget, seed)?;
        write(value, "value", r.value)?;
        write(error, "error", r.statistical_error)
    })
}
