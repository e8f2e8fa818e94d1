use gl3gps::kernels::{KernelTag, SignedTorusPoint};
use gl3gps::kloosterman::CharacterIndex;
use gl3gps::kuznetsov::{
    error_diagnostics, geometric_side, h_identity_gaussian, h_transform, kl_roundtrip_report,
    kl_sharp, smoothed_indicator, weyl_main_term, weyl_main_term_quadrature, KlGrid,
    SpectralWindow, TestFunction,
};
use gl3gps::whittaker::{TorusPoint, WhittakerVector};
use gl3gps::C64;
use proptest::prelude::*;

fn ci(t: f64) -> C64 {
    C64::new(0.0, t)
}

fn gaussian() -> TestFunction {
    TestFunction::gaussian(C64::new(0.0, 0.0))
}

#[test]
fn roundtrip_recovers_test_functions() {
    let grid = KlGrid::standard();
    let cases = [
        (gaussian(), 2, vec![ci(0.3), ci(0.8)]),
        (gaussian(), 3, vec![ci(0.5)]),
        (TestFunction::gaussian_moment(), 2, vec![ci(0.5)]),
        (TestFunction::gaussian_moment(), 3, vec![ci(0.5)]),
    ];
    for (f, d, samples) in cases {
        let rep = kl_roundtrip_report(&f, d, &samples, &grid, 1e-6).unwrap();
        for (r, want, got, dev) in &rep.samples {
            println!("d = {d}, r = {r}: F = {want:.8}, (F^b)^# = {got:.8}, deviation {dev:.2e}");
        }
        assert!(rep.max_deviation <= 1e-3, "d = {d}: {}", rep.max_deviation);
    }
}

#[test]
fn roundtrip_of_zero_is_zero() {
    let grid = KlGrid::new(-3.0, 1.0, 12).unwrap();
    let rep = kl_roundtrip_report(&TestFunction::zero(), 2, &[ci(0.4)], &grid, 1e-6).unwrap();
    assert_eq!(rep.samples[0].2, C64::new(0.0, 0.0));
}

#[test]
fn sharp_transform_is_linear() {
    let grid = KlGrid::new(-3.0, 1.0, 16).unwrap();
    let f = |y: TorusPoint| WhittakerVector {
        d: 2,
        entries: (0..5).map(|k| C64::new((-y.y1 - y.y2).exp(), k as f64 * y.y1 * y.y2 * (-y.y1).exp())).collect(),
    };
    let alpha = C64::new(0.7, -1.3);
    let g = |y: TorusPoint| {
        let v = f(y);
        WhittakerVector { d: 2, entries: v.entries.iter().map(|e| e * alpha).collect() }
    };
    let a = kl_sharp(&f, &grid, 2, ci(0.4), 1e-8).unwrap();
    let b = kl_sharp(&g, &grid, 2, ci(0.4), 1e-8).unwrap();
    assert!((b - a * alpha).norm() < 1e-12 * b.norm().max(1e-300));
}

#[test]
fn geometric_side_structure() {
    let f = gaussian();
    let one = CharacterIndex::new(1, 1).unwrap();
    let rep = geometric_side(&f, 2, one, one, 2, 1e-6).unwrap();
    assert!((rep.k_identity.re - h_identity_gaussian(2)).abs() < 1e-10);
    // m = n makes every partial sum real, and the two degenerate cells mirror
    // each other under the duality swapping the torus coordinates
    for k in [rep.k_identity, rep.k4, rep.k5, rep.kl] {
        assert!(k.im.abs() < 1e-12 * k.norm().max(1e-300), "{rep:?}");
    }
    assert!((rep.k4 - rep.k5).norm() < 1e-9 * rep.k4.norm());
    // only c1 = c2^2 contributes to the w4 term, so the shell c = 2 is empty
    assert_eq!(rep.last_shell[0], 0.0);
    assert!(rep.terms[2] > rep.terms[0]);

    let other = CharacterIndex::new(2, 1).unwrap();
    let rep = geometric_side(&f, 2, one, other, 1, 1e-6).unwrap();
    assert_eq!(rep.k_identity, C64::new(0.0, 0.0));
}

#[test]
fn transforms_of_conjugate_points() {
    // K_w5 at y reads K_w4 at (-y2, y1), and the 1/|y1 y2| factor agrees
    let f = gaussian();
    let y = SignedTorusPoint::new(1.0, -0.4).unwrap();
    let a = h_transform(KernelTag::W5, &f, 3, y, 1e-8).unwrap();
    let b = h_transform(KernelTag::W4, &f, 3, y.w5_argument(), 1e-8).unwrap();
    assert!(a.norm() > 0.0);
    // the w5 kernel uses the reflected spectral parameter, and the Gaussian
    // weight is even, so the two integrals agree
    assert!((a - b).norm() < 1e-8 * a.norm(), "{a} {b}");
}

#[test]
fn weyl_main_term_scaling() {
    for d in [2usize, 3, 6] {
        for t in [10.0, 20.0, 40.0].map(|k| k * d as f64) {
            let window = |s: f64| SpectralWindow::Box { lo: -1.0, hi: 1.0, scale: s };
            let observed = (weyl_main_term(&window(2.0 * t), d).unwrap() / weyl_main_term(&window(t), d).unwrap()).log2();
            let df = d as f64;
            let predicted = ((2.0 * t * (df + 2.0 * t).powi(2)) / (t * (df + t).powi(2))).log2();
            assert!((observed - predicted).abs() <= 0.1 * predicted, "d = {d}, T = {t}: {observed} vs {predicted}");
        }
    }
}

#[test]
fn error_integrals() {
    let f = gaussian();
    let e: Vec<(f64, f64)> = (2..6).map(|d| error_diagnostics(&f, d, 0.01, 0.01).unwrap()).collect();
    assert!(e.iter().all(|(a, b)| a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0));
    assert!(e.windows(2).all(|w| w[1].0 > w[0].0));
    let wide = TestFunction::new(|r| (r * r / 4.0).exp(), f64::INFINITY, 2.0).unwrap();
    assert!(error_diagnostics(&wide, 3, 0.01, 0.01).unwrap().0 > e[1].0);
}

#[test]
fn smoothed_indicator_profile() {
    let (d, t) = (3, 30.0);
    let window = SpectralWindow::Box { lo: -1.0, hi: 2.0, scale: t };
    let f = smoothed_indicator(&window, d).unwrap();
    for s in [-20.0, -5.0, 0.0, 25.0, 45.0] {
        let v = f.eval(ci(s));
        assert!((v - 1.0).norm() < 1e-6, "interior {s}: {v}");
    }
    for s in [-80.0, -60.0, 90.0, 120.0, 500.0] {
        let v = f.eval(ci(s));
        let bound = (s.abs() + d as f64 + t).powf(-90.0);
        assert!(v.norm() < bound, "exterior {s}: {v}");
    }
    // growth off the axis stays within (d + T)^{Re r^2 + eps}
    for x in [0.3, 0.6, 0.9] {
        let v = f.eval(C64::new(x, 10.0));
        assert!(v.norm() <= (d as f64 + t).powf(x * x + 0.05), "Re r = {x}: {v}");
    }
    assert!(f.check_decay().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn main_term_matches_quadrature(lo in -3.0f64..3.0, len in 0.0f64..4.0, scale in 1.0f64..50.0, d in 2usize..12) {
        let w = SpectralWindow::Box { lo, hi: lo + len, scale };
        let a = weyl_main_term(&w, d).unwrap();
        let b = weyl_main_term_quadrature(&w, d, 8).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}
