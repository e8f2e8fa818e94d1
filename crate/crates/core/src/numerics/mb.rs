//! Mellin-Barnes integrals along vertical lines.
//!
//! An integral `(2 pi i)^{-n} \int f(s) ds` over `Re s_k = sigma_k` is
//! approximated by the trapezoid rule in `t = Im s`.  For integrands built
//! from gamma functions the discretisation error behaves like
//! `exp(-2 pi delta / h)`, `delta` being the distance from the contour to the
//! nearest pole, and the truncation error is governed by the decay of the
//! integrand.  Both are controlled adaptively.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::C64;

/// Margin below which a pole is considered to lie on the contour.
pub const POLE_MARGIN: f64 = 1e-6;

/// Maximal number of refinements of either the height or the step.
pub const MAX_REFINEMENTS: usize = 20;
/// Maximum number of height doublings in the Richardson table.
pub const RICHARDSON_LEVELS: usize = 8;

/// Argument `constant + sum_k coeffs[k] s_k` of a gamma factor in the
/// numerator of an integrand.
///
/// The contour must keep every such argument in the right half plane
/// (Barnes convention), which is checked before integrating.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaArg {
    pub constant: C64,
    pub coeffs: Vec<f64>,
    pub label: String,
}

impl GammaArg {
    pub fn new(constant: C64, coeffs: &[f64], label: &str) -> Self {
        Self { constant, coeffs: coeffs.to_vec(), label: label.to_string() }
    }

    /// Real part of the argument along the contour, constant in `Im s`.
    pub fn real_part_on(&self, abscissae: &[f64]) -> f64 {
        self.constant.re + self.coeffs.iter().zip(abscissae).map(|(c, s)| c * s).sum::<f64>()
    }

    /// Distance in `s`-space from the contour to the nearest pole of this factor.
    pub fn distance(&self, abscissae: &[f64]) -> f64 {
        let norm = self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        self.real_part_on(abscissae) / norm
    }
}

/// A vertical line `Re s = abscissa`, truncated to `|Im s| <= height` and
/// sampled with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub height: f64,
    pub step: f64,
}

impl ContourSpec {
    pub fn new(abscissa: f64, height: f64, step: f64) -> Self {
        Self { abscissa, height, step }
    }

    /// Nodes `k h`, `|k| <= J` with `J = round(H / h)`, and trapezoid weights
    /// (halved at the ends, so that the truncation error is a power series in
    /// `1 / H` for algebraically decaying integrands).
    fn nodes(&self) -> Vec<(f64, f64)> {
        let j = ((self.height / self.step).round() as i64).max(1);
        (-j..=j).map(|k| (k as f64 * self.step, if k.abs() == j { 0.5 } else { 1.0 })).collect()
    }
}

/// How the truncation error decays when the height grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Exponential decay: plain doubling of the height converges fast.
    Geometric,
    /// Algebraic decay: the truncation error behaves like
    /// `H^{-p} (c_0 + c_1 / H + ...)` with the given leading exponent `p`, and is
    /// removed by Richardson extrapolation in the height.
    InversePower(C64),
}

/// Step giving a discretisation error of about `tol` for a pole distance `delta`.
pub fn step_for(delta: f64, tol: f64) -> f64 {
    2.0 * PI * delta / ((1.0 / tol).ln() + 3.0)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbResult {
    pub value: C64,
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Integrand of a Mellin-Barnes integral with its gamma-factor poles.
pub struct MbIntegrand<'a> {
    pub f: &'a (dyn Fn(&[C64]) -> Result<C64> + Sync),
    pub poles: Vec<GammaArg>,
    pub tail: TailModel,
    /// Magnitude below which errors are measured absolutely (for integrals
    /// that may vanish).
    pub floor: f64,
}

/// Check that each gamma argument keeps positive real part on the contour.
pub fn check_contour(poles: &[GammaArg], abscissae: &[f64]) -> Result<()> {
    for p in poles {
        if p.coeffs.len() != abscissae.len() {
            return Err(Error::DimensionMismatch { expected: abscissae.len(), got: p.coeffs.len() });
        }
        let d = p.distance(abscissae);
        if d.abs() < POLE_MARGIN {
            return Err(Error::PoleOnContour { what: p.label.clone(), distance: d.abs() });
        }
        if d < 0.0 {
            return Err(Error::ContourSeparation(format!(
                "gamma factor {} has real part {:.3} on the contour",
                p.label,
                p.real_part_on(abscissae)
            )));
        }
    }
    Ok(())
}

/// Trapezoid sum `(2 pi)^{-n} h^n sum f(sigma + i t)` on a fixed grid.
pub fn trapezoid(f: &(dyn Fn(&[C64]) -> Result<C64> + Sync), contours: &[ContourSpec]) -> Result<(C64, usize)> {
    let n = contours.len();
    if !(1..=3).contains(&n) {
        return Err(Error::DimensionMismatch { expected: 3, got: n });
    }
    let grids: Vec<Vec<(f64, f64)>> = contours.iter().map(|c| c.nodes()).collect();
    let count: usize = grids.iter().map(|g| g.len()).product();
    // parallel over the outermost variable, ordered summation for determinism
    let partial: Vec<Result<C64>> = grids[0]
        .par_iter()
        .map(|&(t0, w0)| {
            let mut s = vec![C64::new(contours[0].abscissa, t0); n];
            let mut acc = C64::new(0.0, 0.0);
            match n {
                1 => acc += f(&s)?,
                2 => {
                    for &(t1, w1) in &grids[1] {
                        s[1] = C64::new(contours[1].abscissa, t1);
                        acc += f(&s)? * w1;
                    }
                }
                _ => {
                    for &(t1, w1) in &grids[1] {
                        s[1] = C64::new(contours[1].abscissa, t1);
                        let mut inner = C64::new(0.0, 0.0);
                        for &(t2, w2) in &grids[2] {
                            s[2] = C64::new(contours[2].abscissa, t2);
                            inner += f(&s)? * w2;
                        }
                        acc += inner * w1;
                    }
                }
            }
            Ok(acc * w0)
        })
        .collect();
    let mut total = C64::new(0.0, 0.0);
    for p in partial {
        total += p?;
    }
    let scale: f64 = contours.iter().map(|c| c.step / (2.0 * PI)).product();
    Ok((finite(total * scale, "trapezoid sum")?, count))
}

/// Adaptive Mellin-Barnes integration.
///
/// The step is halved until the value stabilises, then the height is grown
/// (with Richardson extrapolation for [`TailModel::InversePower`]).  The loop
/// alternates until both refinements change the value by less than `tol`
/// relative to its size.
pub fn mb_integrate(integrand: &MbIntegrand, contours: &[ContourSpec], tol: f64) -> Result<MbResult> {
    let abscissae: Vec<f64> = contours.iter().map(|c| c.abscissa).collect();
    check_contour(&integrand.poles, &abscissae)?;
    let scale = |v: C64| v.norm().max(integrand.floor).max(tol);
    let mut cur: Vec<ContourSpec> = contours.to_vec();
    let mut nodes = 0usize;
    let (mut value, n0) = trapezoid(integrand.f, &cur)?;
    nodes += n0;
    for _round in 0..4 {
        // refine the step; the discretisation error squares when the step is
        // halved, so the finer value is accurate once the difference is below
        // sqrt(tol)
        let mut step_err = None;
        for _ in 0..MAX_REFINEMENTS {
            let finer: Vec<ContourSpec> = cur.iter().map(|c| ContourSpec { step: c.step / 2.0, ..*c }).collect();
            let (v, n1) = trapezoid(integrand.f, &finer)?;
            nodes += n1;
            let diff = (v - value).norm();
            cur = finer;
            value = v;
            if diff <= 0.1 * tol.sqrt() * scale(value) {
                step_err = Some(diff * diff / scale(value));
                break;
            }
        }
        let step_err = step_err.ok_or_else(|| Error::NonConvergent {
            what: "Mellin-Barnes step refinement".into(),
            iterations: MAX_REFINEMENTS,
        })?;
        let ext = extend_height(integrand, &cur, value, tol)?;
        nodes += ext.nodes;
        // in higher dimensions the added shell lies where the integrand has
        // decayed, so its aliasing error is negligible; in one dimension the
        // step is re-checked at the final height
        if cur.len() > 1 || ext.contours == cur {
            return Ok(MbResult { value: ext.value, error_estimate: ext.error.max(step_err), nodes });
        }
        let finer: Vec<ContourSpec> = ext.contours.iter().map(|c| ContourSpec { step: c.step / 2.0, ..*c }).collect();
        let (v, n3) = trapezoid(integrand.f, &finer)?;
        nodes += n3;
        if (v - ext.raw).norm() <= 0.1 * tol.sqrt() * scale(v) {
            return Ok(MbResult { value: ext.value, error_estimate: ext.error.max(step_err), nodes });
        }
        cur = finer;
        value = v;
    }
    Err(Error::NonConvergent { what: "Mellin-Barnes height/step alternation".into(), iterations: 4 })
}

struct Extension {
    value: C64,
    raw: C64,
    error: f64,
    nodes: usize,
    contours: Vec<ContourSpec>,
}

fn extend_height(integrand: &MbIntegrand, cur: &[ContourSpec], base: C64, tol: f64) -> Result<Extension> {
    let mut nodes = 0;
    let mut contours = cur.to_vec();
    match integrand.tail {
        TailModel::Geometric => {
            // with exponential decay a thin shell beyond the current height
            // bounds the whole tail; keep it thin in higher dimensions
            let factor = if contours.len() == 1 { 2.0 } else { 1.25 };
            let mut value = base;
            for _ in 0..MAX_REFINEMENTS {
                let taller: Vec<ContourSpec> =
                    contours.iter().map(|c| ContourSpec { height: c.height * factor, ..*c }).collect();
                let (v, n) = trapezoid(integrand.f, &taller)?;
                nodes += n;
                let diff = (v - value).norm();
                contours = taller;
                value = v;
                if diff <= tol * value.norm().max(integrand.floor).max(tol) {
                    return Ok(Extension { value, raw: value, error: diff, nodes, contours });
                }
            }
            Err(Error::NonConvergent { what: "Mellin-Barnes height doubling".into(), iterations: MAX_REFINEMENTS })
        }
        TailModel::InversePower(p) => {
            // Richardson table in H with exponents p, p + 1, p + 2, ...
            let mut table: Vec<Vec<C64>> = vec![vec![base]];
            for level in 1..MAX_REFINEMENTS {
                let taller: Vec<ContourSpec> =
                    contours.iter().map(|c| ContourSpec { height: c.height * 2.0, ..*c }).collect();
                let (v, n) = trapezoid(integrand.f, &taller)?;
                nodes += n;
                contours = taller;
                let mut row = vec![v];
                for k in 1..=level {
                    let f = C64::new(2.0, 0.0).powc(p + (k as f64 - 1.0));
                    let prev = table[level - 1][k - 1];
                    row.push((row[k - 1] * f - prev) / (f - 1.0));
                }
                let best = row[level];
                let prev_best = table[level - 1][level - 1];
                table.push(row);
                let diff = (best - prev_best).norm();
                if level >= 2 && diff <= tol * best.norm().max(integrand.floor).max(tol) {
                    return Ok(Extension { value: best, raw: v, error: diff, nodes, contours });
                }
                if level >= RICHARDSON_LEVELS {
                    break;
                }
            }
            Err(Error::NonConvergent { what: "Richardson extrapolation in the height".into(), iterations: RICHARDSON_LEVELS })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::ln_gamma;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reflection_kernel_gives_one_over_one_plus_x() {
        // (2 pi i)^{-1} \int Gamma(s) Gamma(1-s) x^{-s} ds = 1/(1+x) for 0 < Re s < 1
        let x: f64 = 2.0;
        let f = move |s: &[C64]| -> Result<C64> {
            Ok((ln_gamma(s[0])? + ln_gamma(C64::new(1.0, 0.0) - s[0])? - s[0] * x.ln()).exp())
        };
        let integrand = MbIntegrand {
            f: &f,
            poles: vec![
                GammaArg::new(c(0.0, 0.0), &[1.0], "s"),
                GammaArg::new(c(1.0, 0.0), &[-1.0], "1-s"),
            ],
            tail: TailModel::Geometric,
            floor: 0.0,
        };
        let r = mb_integrate(&integrand, &[ContourSpec::new(0.5, 10.0, 0.5)], 1e-12).unwrap();
        assert!((r.value - c(1.0 / 3.0, 0.0)).norm() < 1e-11, "{:?}", r);
    }

    #[test]
    fn barnes_first_lemma_at_one_sixth() {
        // a = b = c = d = 1/2: Gamma(1)^4 / Gamma(2) = 1
        let f = |s: &[C64]| -> Result<C64> {
            let h = C64::new(0.5, 0.0);
            Ok((ln_gamma(h + s[0])? * 2.0 + ln_gamma(h - s[0])? * 2.0).exp())
        };
        let integrand = MbIntegrand {
            f: &f,
            poles: vec![
                GammaArg::new(c(0.5, 0.0), &[1.0], "a+s"),
                GammaArg::new(c(0.5, 0.0), &[-1.0], "c-s"),
            ],
            tail: TailModel::Geometric,
            floor: 0.0,
        };
        let r = mb_integrate(&integrand, &[ContourSpec::new(0.0, 10.0, 0.5)], 1e-12).unwrap();
        assert!((r.value - c(1.0, 0.0)).norm() < 1e-10, "{:?}", r);
    }

    #[test]
    fn three_dimensional_product() {
        // each factor Gamma(s) Gamma(2 - s) integrates to Gamma(2) 2^{-2} at x = 1
        let f = |s: &[C64]| -> Result<C64> {
            let mut acc = C64::new(0.0, 0.0);
            for z in s {
                acc += ln_gamma(*z)? + ln_gamma(C64::new(2.0, 0.0) - *z)?;
            }
            Ok(acc.exp())
        };
        let poles = (0..3)
            .flat_map(|k| {
                let mut e = [0.0; 3];
                e[k] = 1.0;
                let mut m = [0.0; 3];
                m[k] = -1.0;
                vec![GammaArg::new(c(0.0, 0.0), &e, "s"), GammaArg::new(c(2.0, 0.0), &m, "2-s")]
            })
            .collect();
        let integrand = MbIntegrand { f: &f, poles, tail: TailModel::Geometric, floor: 0.0 };
        let cs = [ContourSpec::new(1.0, 8.0, 0.4); 3];
        let r = mb_integrate(&integrand, &cs, 1e-6).unwrap();
        assert!((r.value.re - 1.0 / 64.0).abs() < 1e-8, "{:?}", r);
    }

    #[test]
    fn pole_checks() {
        let f = |_: &[C64]| -> Result<C64> { Ok(C64::new(0.0, 0.0)) };
        let on = MbIntegrand {
            f: &f,
            poles: vec![GammaArg::new(c(0.0, 0.0), &[1.0], "s")],
            tail: TailModel::Geometric,
            floor: 1.0,
        };
        assert!(matches!(
            mb_integrate(&on, &[ContourSpec::new(0.0, 4.0, 0.5)], 1e-8),
            Err(Error::PoleOnContour { .. })
        ));
        assert!(matches!(
            mb_integrate(&on, &[ContourSpec::new(-0.5, 4.0, 0.5)], 1e-8),
            Err(Error::ContourSeparation(_))
        ));
        assert!(matches!(
            mb_integrate(&on, &[ContourSpec::new(0.5, 4.0, 0.5), ContourSpec::new(0.5, 4.0, 0.5)], 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
