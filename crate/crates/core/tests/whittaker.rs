use gl3gps::stade::spectral_weights;
use gl3gps::whittaker::{dual_check, lambda_star, whittaker_vector, SpectralPoint, TorusPoint};
use gl3gps::C64;

const Y_POINTS: [(f64, f64); 3] = [(0.15, 0.3), (0.25, 0.25), (0.4, 0.12)];

#[test]
fn dual_functional_equation() {
    for d in 2..=5 {
        let p = SpectralPoint::imaginary(d, 0.35).unwrap();
        for (y1, y2) in Y_POINTS {
            let y = TorusPoint::new(y1, y2).unwrap();
            let res = dual_check(&p, y, 1e-10).unwrap();
            let size = whittaker_vector(&p, y, [1.0, 1.0], 1e-10).unwrap().max_abs();
            eprintln!("d = {d}, y = ({y1}, {y2}): residual {res:.2e}, max |W| {size:.2e}");
            assert!(res <= 1e-6 && res <= 1e-6 * size, "d = {d}, y = ({y1}, {y2}): {res:e}");
        }
    }
}

#[test]
fn completion_factor_norm() {
    // |Lambda*(r)|^2 pi^d / (d-1)! equals the inverse cos weight on i R
    let mut factorial = 1.0;
    for d in 2..=8usize {
        factorial *= (d - 1) as f64;
        for t in [0.2, 0.7, 1.5] {
            let p = SpectralPoint::imaginary(d, t).unwrap();
            let lhs = lambda_star(&p).unwrap().norm_sqr() * std::f64::consts::PI.powi(d as i32) / factorial;
            let inv_cos = spectral_weights(&p).unwrap().cos_weight.inv();
            assert!((C64::new(lhs, 0.0) - inv_cos).norm() <= 1e-10 * lhs, "d = {d}, t = {t}: {lhs} vs {inv_cos}");
        }
    }
}
