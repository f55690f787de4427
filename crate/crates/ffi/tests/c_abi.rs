use std::f64::consts::PI;
use std::ffi::CStr;
use std::ptr;

use triple_compton_ffi::*;

const XFEL_THETA: f64 = PI - 1.5e-3;
const XFEL_PHI: [f64; 3] = [2.0 * PI / 3.0, 4.0 * PI / 3.0, 2.0 * PI];

fn last_error() -> String {
    unsafe { CStr::from_ptr(tc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn xfel_setup() -> *mut TcSetup {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tc_setup_new(5000.0, 1e-3, &mut s) }, TcStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(tc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_setup_reports_a_message() {
    let mut s = ptr::null_mut();
    let status = unsafe { tc_setup_new(5000.0, -1.0, &mut s) };
    assert_eq!(status, TcStatus::InvalidArgument);
    assert!(s.is_null());
    assert!(last_error().contains("photon energy"), "{}", last_error());
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(
        unsafe { tc_setup_new(5000.0, 1e-3, ptr::null_mut()) },
        TcStatus::NullPointer
    );
    let mut out = 0.0;
    let status = unsafe { tc_gme_tau(ptr::null(), 1e-7, &mut out) };
    assert_eq!(status, TcStatus::NullPointer);
    unsafe {
        tc_setup_free(ptr::null_mut());
        tc_density_free(ptr::null_mut());
    }
}

#[test]
fn sigma5_matches_the_library() {
    use triple_compton::algebra::Pol;
    use triple_compton::amplitude::BeamPolarization;
    use triple_compton::cross_section::spin_summed_sigma5;
    use triple_compton::kinematics::{CollisionSetup, FinalStateConfig};

    let s = xfel_setup();
    let theta = [XFEL_THETA; 3];
    let labels = [2u32, 1, 2];
    let mut v = 0.0;
    let status = unsafe {
        tc_sigma5(
            s,
            theta.as_ptr(),
            XFEL_PHI.as_ptr(),
            400.0,
            500.0,
            1,
            labels.as_ptr(),
            50.0,
            &mut v,
        )
    };
    assert_eq!(status, TcStatus::Ok, "{}", last_error());

    let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
    let cfg = FinalStateConfig::from_angles(theta, XFEL_PHI, 400.0, 500.0);
    let expected = spin_summed_sigma5(
        &setup,
        &cfg,
        BeamPolarization::Basis(Pol::First),
        [Pol::Second, Pol::First, Pol::Second],
        50.0,
    )
    .unwrap();
    assert_eq!(v, expected);
    assert!(v > 0.0);

    let bad = [1u32, 3, 1];
    let status = unsafe {
        tc_sigma5(
            s,
            theta.as_ptr(),
            XFEL_PHI.as_ptr(),
            400.0,
            500.0,
            1,
            bad.as_ptr(),
            50.0,
            &mut v,
        )
    };
    assert_eq!(status, TcStatus::InvalidArgument);
    unsafe { tc_setup_free(s) };
}

#[test]
fn density_round_trip_and_tau() {
    let s = xfel_setup();
    let theta = [XFEL_THETA; 3];
    let mut rho = ptr::null_mut();
    let status = unsafe {
        tc_density_from_amplitudes(
            s,
            theta.as_ptr(),
            XFEL_PHI.as_ptr(),
            400.0,
            700.0,
            1,
            &mut rho,
        )
    };
    assert_eq!(status, TcStatus::Ok, "{}", last_error());

    let (mut re, mut im) = ([0.0; 64], [0.0; 64]);
    assert_eq!(
        unsafe { tc_density_elements(rho, re.as_mut_ptr(), im.as_mut_ptr()) },
        TcStatus::Ok
    );
    let trace: f64 = (0..8).map(|i| re[9 * i]).sum();
    assert!((trace - 1.0).abs() < 1e-12);

    let mut copy = ptr::null_mut();
    assert_eq!(
        unsafe { tc_density_from_elements(re.as_ptr(), im.as_ptr(), &mut copy) },
        TcStatus::Ok
    );

    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(
        unsafe { tc_gme_tau(rho, 1e-7, &mut a) },
        TcStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(unsafe { tc_gme_tau(copy, 1e-7, &mut b) }, TcStatus::Ok);
    assert_eq!(a, b);
    assert!(a > 0.01 && a <= 0.5, "{a}");
    unsafe {
        tc_density_free(rho);
        tc_density_free(copy);
        tc_setup_free(s);
    }
}

#[test]
fn ghz_elements_give_half() {
    let mut re = [0.0; 64];
    let im = [0.0; 64];
    for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        re[8 * i + j] = 0.5;
    }
    let mut rho = ptr::null_mut();
    assert_eq!(
        unsafe { tc_density_from_elements(re.as_ptr(), im.as_ptr(), &mut rho) },
        TcStatus::Ok
    );
    let mut tau = 0.0;
    assert_eq!(unsafe { tc_gme_tau(rho, 1e-7, &mut tau) }, TcStatus::Ok);
    assert!((tau - 0.5).abs() < 1e-4, "{tau}");
    unsafe { tc_density_free(rho) };

    re[0] = 0.6;
    let status = unsafe { tc_density_from_elements(re.as_ptr(), im.as_ptr(), &mut rho) };
    assert_eq!(status, TcStatus::InvalidArgument);
    assert!(last_error().contains("trace"), "{}", last_error());
}

#[test]
fn event_rate_at_lcls_parameters() {
    let mut r = 0.0;
    assert_eq!(
        unsafe { tc_event_rate(2e-5, 2e13, 1e9, 40.0, 120.0, &mut r) },
        TcStatus::Ok
    );
    // 2e-5 b · 1e-28 m²/b · 2e13 · 1e9 / (π (20 μm)²) · 120 Hz
    let expected = 2e-5 * 1e-28 * 2e13 * 1e9 / (PI * (20e-6f64).powi(2)) * 120.0;
    assert!((r - expected).abs() < 1e-12 * expected);
    assert_eq!(
        unsafe { tc_event_rate(2e-5, 2e13, 1e9, 40.0, 0.0, &mut r) },
        TcStatus::Ok
    );
    assert_eq!(r, 0.0);
    assert_eq!(
        unsafe { tc_event_rate(2e-5, 2e13, 1e9, 0.0, 120.0, &mut r) },
        TcStatus::InvalidArgument
    );
}

#[test]
fn integrals_are_deterministic() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tc_setup_rest_frame(0.662, &mut s) }, TcStatus::Ok);
    let theta = [PI / 2.0; 3];
    let phi = [2.0 * PI / 3.0, 4.0 * PI / 3.0, 0.0];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let (mut v, mut e) = (0.0, 0.0);
        let status = unsafe {
            tc_detector_average(
                s,
                theta.as_ptr(),
                phi.as_ptr(),
                0.378,
                0.013,
                2000,
                7,
                &mut v,
                &mut e,
            )
        };
        assert_eq!(status, TcStatus::Ok, "{}", last_error());
        assert!(v > 0.0 && e > 0.0);
        runs.push((v, e));
    }
    assert_eq!(runs[0], runs[1]);

    let (mut v, mut e) = (0.0, 0.0);
    let status = unsafe {
        tc_detector_average(
            s,
            theta.as_ptr(),
            phi.as_ptr(),
            0.0,
            0.013,
            2000,
            7,
            &mut v,
            &mut e,
        )
    };
    assert_eq!(status, TcStatus::InvalidArgument);
    let status = unsafe { tc_total_cross_section(s, 1, 0.0, 2000, 7, &mut v, &mut e) };
    assert_eq!(status, TcStatus::Ok, "{}", last_error());
    assert!(v > 0.0);
    assert_eq!(
        unsafe { tc_total_cross_section(s, 4, 0.0, 2000, 7, &mut v, &mut e) },
        TcStatus::InvalidArgument
    );
    unsafe { tc_setup_free(s) };
}

#[test]
fn generated_header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/triple_compton.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "tc_setup_new",
        "tc_setup_free",
        "tc_sigma5",
        "tc_density_from_amplitudes",
        "tc_gme_tau",
        "tc_event_rate",
        "tc_detector_average",
        "tc_total_cross_section",
        "tc_last_error_message",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-x",
            "c",
            header,
        ])
        .status()
    else {
        eprintln!("no C compiler available; syntax check skipped");
        return;
    };
    assert!(status.success(), "header does not compile as C99");
}
