use std::time::Instant;

use gl3gps::stade::{stade_closed, stade_oracle_direct, stade_oracle_elementary, DirectGrid, StadeParams};
use gl3gps::C64;

#[test]
fn elementary_oracle_on_the_full_grid() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 5] {
        for (a, b) in [(0.1, 0.7), (0.6, 0.3), (1.5, 1.1)] {
            for t in [0.3, 0.45, 0.6] {
                let p = StadeParams::imaginary(d, a, b, t).unwrap();
                let c = stade_closed(&p).unwrap();
                let e = stade_oracle_elementary(&p, 1e-8).unwrap();
                worst = worst.max((e - c).norm() / c.norm());
            }
        }
    }
    eprintln!("worst relative error {worst:.2e} in {:.2?}", start.elapsed());
    assert!(worst < 1e-6);
}

#[test]
fn direct_oracle_spot_cases() {
    for (d, a, b, t) in [(2, 0.3, -0.3, 1.0), (2, 0.3, 0.2, 1.0), (3, 0.5, -0.5, 1.2), (2, 0.2, 0.5, 0.8)] {
        let start = Instant::now();
        let p = StadeParams::imaginary(d, a, b, t).unwrap();
        let c = stade_closed(&p).unwrap();
        let v = stade_oracle_direct(&p, &DirectGrid::for_t(t, 1e-5), 1e-9).unwrap();
        eprintln!("{d} {a} {b} {t}: {:.2e} in {:.2?}", (v - c).norm() / c.norm(), start.elapsed());
        assert!((v - c).norm() < 1e-3 * c.norm(), "{v} {c}");
    }
}

#[test]
fn direct_oracle_is_real_for_conjugate_pairs() {
    let p = StadeParams::new(2, C64::new(0.0, 0.4), C64::new(0.0, -0.4), C64::new(1.0, 0.0)).unwrap();
    let v = stade_oracle_direct(&p, &DirectGrid::for_t(1.0, 1e-5), 1e-9).unwrap();
    assert!(v.im.abs() < 1e-6 * v.norm());
}

#[test]
fn direct_oracle_grid_refinement() {
    let p = StadeParams::imaginary(2, 0.3, 0.2, 1.0).unwrap();
    let g = DirectGrid::for_t(1.0, 1e-5);
    let a = stade_oracle_direct(&p, &g, 1e-9).unwrap();
    let b = stade_oracle_direct(&p, &g.refined(), 1e-9).unwrap();
    assert!((a - b).norm() < 1e-5 * a.norm());
}
