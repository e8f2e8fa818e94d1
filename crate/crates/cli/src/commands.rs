//! Subcommand definitions and their implementations.
//!
//! Spectral parameters given as `--r`, `--rprime` or window ends are imaginary
//! parts: `--r 0.3` means `r = 0.3 i` on the tempered axis.

use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use gl3gps::identities::{random_sweep, IdentityTag};
use gl3gps::kernels::{kernel_eval_mb, kernel_eval_series, KernelTag, SignedTorusPoint};
use gl3gps::kloosterman::{kloosterman_bruteforce, kloosterman_fast, CharacterIndex, Modulus};
use gl3gps::kuznetsov::{
    error_diagnostics, geometric_side, h_transform, kl_roundtrip_report, smoothed_indicator, weyl_main_term,
    weyl_main_term_quadrature, KlGrid, SpectralWindow, TestFunction,
};
use gl3gps::stade::{stade_closed, stade_oracle_direct, stade_oracle_elementary, DirectGrid, StadeParams};
use gl3gps::weyl_group::parse_signs;
use gl3gps::whittaker::{whittaker_vector, SpectralPoint, TorusPoint};
use gl3gps::C64;

use crate::config::RunConfig;
use crate::report::{Cell, Report};
use crate::{CliError, Outcome};

/// Relative tolerance the elementary Stade oracle must meet.
const STADE_ELEMENTARY_TOL: f64 = 1e-6;
/// Relative tolerance the direct Stade oracle must meet.
const STADE_DIRECT_TOL: f64 = 1e-3;
/// Largest deviation accepted by the Kontorovich-Lebedev round trip.
const ROUNDTRIP_TOL: f64 = 1e-3;
/// Agreement required between fast and brute-force Kloosterman sums.
const KLOOSTERMAN_TOL: f64 = 1e-10;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the vector-valued Whittaker function W(y, r).
    Whittaker(WhittakerArgs),
    /// Compare the closed-form Stade integral with an independent oracle.
    StadeCheck(StadeArgs),
    /// Evaluate a Kuznetsov kernel by its power series and/or Mellin-Barnes integral.
    Kernel(KernelArgs),
    /// Evaluate a Kloosterman sum, or verify the fast path against brute force.
    Kloosterman(KloostermanArgs),
    /// Integral transform H_w(F; y) of a test function.
    Transform(TransformArgs),
    /// Truncated geometric side of the Kuznetsov formula.
    Geometric(GeometricArgs),
    /// Kontorovich-Lebedev round trip F -> F^flat -> (F^flat)^sharp.
    KlRoundtrip(RoundtripArgs),
    /// Weyl-law main term for a spectral window, with diagnostics.
    Weyl(WeylArgs),
    /// Randomized sweeps over the special-function identity catalogue.
    Identities(IdentitiesArgs),
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Whittaker(a) => whittaker(a, cfg),
        Command::StadeCheck(a) => stade_check(a, cfg),
        Command::Kernel(a) => kernel(a, cfg),
        Command::Kloosterman(a) => kloosterman(a),
        Command::Transform(a) => transform(a, cfg),
        Command::Geometric(a) => geometric(a, cfg),
        Command::KlRoundtrip(a) => kl_roundtrip(a, cfg),
        Command::Weyl(a) => weyl(a),
        Command::Identities(a) => identities(a, cfg),
    }
}

/// Parses `a,b` into a pair.
fn pair<T: FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("cannot parse {x:?}"));
    Ok((parse(a)?, parse(b)?))
}

fn tag(s: &str) -> Result<KernelTag, String> {
    s.parse().map_err(|e: gl3gps::Error| e.to_string())
}

fn character(s: &str) -> Result<CharacterIndex, String> {
    let (a, b) = pair::<i64>(s)?;
    CharacterIndex::new(a, b).map_err(|e| e.to_string())
}

fn modulus(s: &str) -> Result<Modulus, String> {
    let (a, b) = pair::<i64>(s)?;
    Modulus::new(a, b).map_err(|e| e.to_string())
}

fn ci(t: f64) -> C64 {
    C64::new(0.0, t)
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    /// exp(r^2)
    Gaussian,
    /// r^2 exp(r^2)
    Moment,
}

impl TestKind {
    fn build(self) -> TestFunction {
        match self {
            TestKind::Gaussian => TestFunction::gaussian(C64::new(0.0, 0.0)),
            TestKind::Moment => TestFunction::gaussian_moment(),
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct WhittakerArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Imaginary part of the spectral parameter.
    #[arg(long, default_value_t = 0.3)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    y1: f64,
    #[arg(long, default_value_t = 1.0)]
    y2: f64,
    /// Print a single entry -d <= m' <= d.
    #[arg(long)]
    mprime: Option<i64>,
}

fn whittaker(a: WhittakerArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Some(m) = a.mprime {
        if m.unsigned_abs() as usize > a.d {
            return Err(CliError::Usage("mprime out of range".into()));
        }
    }
    let p = SpectralPoint::imaginary(a.d, a.r)?;
    let y = TorusPoint::new(a.y1, a.y2)?;
    let w = whittaker_vector(&p, y, [1.0, 1.0], cfg.tol)?;
    let mut rep = Report::new("whittaker");
    rep.field("d", a.d).field("r_im", a.r).field("y1", a.y1).field("y2", a.y2);
    rep.columns(&["m_prime", "re", "im"]);
    let d = a.d as i64;
    for m in -d..=d {
        if a.mprime.is_none_or(|k| k == m) {
            let v = w.get(m);
            rep.row(vec![Cell::Int(m), v.re.into(), v.im.into()]);
        }
    }
    Ok(Outcome::ok(rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Elementary,
    Direct,
    Both,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct StadeArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Imaginary part of r.
    #[arg(long, default_value_t = 0.3)]
    r: f64,
    /// Imaginary part of r'.
    #[arg(long, default_value_t = 0.2)]
    rprime: f64,
    #[arg(long, default_value_t = 0.4)]
    t: f64,
    #[arg(long, value_enum, default_value_t = Oracle::Elementary)]
    oracle: Oracle,
}

fn stade_check(a: StadeArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let elementary = matches!(a.oracle, Oracle::Elementary | Oracle::Both);
    let direct = matches!(a.oracle, Oracle::Direct | Oracle::Both);
    if elementary && !(a.t > 0.0 && a.t < 2.0 / 3.0) {
        return Err(CliError::Usage("t outside (0,2/3)".into()));
    }
    let p = StadeParams::imaginary(a.d, a.r, a.rprime, a.t)?;
    let closed = stade_closed(&p)?;
    let mut rep = Report::new("stade-check");
    rep.field("d", a.d).field("r_im", a.r).field("rprime_im", a.rprime).field("t", a.t);
    rep.field("closed_re", closed.re).field("closed_im", closed.im);
    rep.columns(&["oracle", "re", "im", "rel_error", "tolerance", "status"]);
    let mut passed = true;
    let mut check = |name: &str, v: C64, tol: f64| {
        let err = rel_err(closed, v);
        let ok = err <= tol;
        passed &= ok;
        rep.row(vec![name.into(), v.re.into(), v.im.into(), err.into(), tol.into(), ok.into()]);
    };
    if elementary {
        let v = stade_oracle_elementary(&p, cfg.tol)?;
        check("elementary", v, STADE_ELEMENTARY_TOL);
    }
    if direct {
        let v = stade_oracle_direct(&p, &DirectGrid::for_t(a.t, 1e-5), cfg.tol)?;
        check("direct", v, STADE_DIRECT_TOL);
    }
    Ok(Outcome { report: rep, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelMethod {
    Series,
    Mb,
    Both,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    /// Weyl element: i, w4, w5 or wl.
    #[arg(long, value_parser = tag)]
    tag: KernelTag,
    /// Sign pattern such as `+-`, applied to |y1| and |y2|.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Imaginary part of r.
    #[arg(long, default_value_t = 0.3)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    y1: f64,
    #[arg(long, default_value_t = 1.0)]
    y2: f64,
    #[arg(long, value_enum, default_value_t = KernelMethod::Series)]
    method: KernelMethod,
}

fn kernel(a: KernelArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let y = match &a.eps {
        Some(e) => SignedTorusPoint::from_signs(parse_signs(e)?, a.y1.abs(), a.y2.abs())?,
        None => SignedTorusPoint::new(a.y1, a.y2)?,
    };
    let p = SpectralPoint::imaginary(a.d, a.r)?;
    let mut rep = Report::new("kernel");
    rep.field("tag", a.tag.name()).field("d", a.d).field("r_im", a.r).field("y1", y.y1).field("y2", y.y2);
    rep.columns(&["method", "re", "im"]);
    let mut values = Vec::new();
    if matches!(a.method, KernelMethod::Series | KernelMethod::Both) {
        let v = kernel_eval_series(a.tag, &p, y, cfg.tol)?;
        rep.row(vec!["series".into(), v.re.into(), v.im.into()]);
        values.push(v);
    }
    if matches!(a.method, KernelMethod::Mb | KernelMethod::Both) {
        let v = kernel_eval_mb(a.tag, &p, y, None, cfg.tol)?;
        rep.row(vec!["mb".into(), v.re.into(), v.im.into()]);
        values.push(v);
    }
    if let [s, m] = values[..] {
        rep.field("difference", (s - m).norm());
    }
    Ok(Outcome::ok(rep))
}

#[derive(Debug, Args)]
pub struct KloostermanArgs {
    /// Verify the fast path against brute force for all c1, c2 <= C.
    #[arg(long, value_name = "C", conflicts_with_all = ["tag", "m", "n", "c"])]
    verify: Option<i64>,
    /// Weyl element: i, w4, w5 or wl.
    #[arg(long, value_parser = tag, required_unless_present = "verify")]
    tag: Option<KernelTag>,
    /// Character m as `m1,m2`.
    #[arg(long, value_parser = character, allow_hyphen_values = true, required_unless_present = "verify")]
    m: Option<CharacterIndex>,
    /// Character n as `n1,n2`.
    #[arg(long, value_parser = character, allow_hyphen_values = true, required_unless_present = "verify")]
    n: Option<CharacterIndex>,
    /// Modulus as `c1,c2`.
    #[arg(long, value_parser = modulus, required_unless_present = "verify")]
    c: Option<Modulus>,
    /// Also evaluate by brute force and compare.
    #[arg(long)]
    check: bool,
}

/// Character pairs used by `--verify`: four left characters times four right ones.
const VERIFY_M: [(i64, i64); 4] = [(1, 1), (-1, 2), (2, -1), (-2, -2)];
const VERIFY_N: [(i64, i64); 4] = [(1, 1), (2, 1), (-1, -2), (1, -2)];

fn kloosterman(a: KloostermanArgs) -> Result<Outcome, CliError> {
    if let Some(cmax) = a.verify {
        return kloosterman_verify(cmax);
    }
    let (Some(w), Some(m), Some(n), Some(c)) = (a.tag, a.m, a.n, a.c) else {
        return Err(CliError::Usage("--tag, --m, --n and --c are required".into()));
    };
    let fast = kloosterman_fast(w, m, n, c);
    let mut rep = Report::new("kloosterman");
    rep.field("tag", w.name()).field("c1", c.c1).field("c2", c.c2);
    rep.field("re", fast.value.re).field("im", fast.value.im).field("terms", fast.terms as usize);
    let mut passed = true;
    if a.check {
        let brute = kloosterman_bruteforce(w, m, n, c)?;
        let diff = (brute.value - fast.value).norm();
        passed = diff <= KLOOSTERMAN_TOL && brute.terms == fast.terms;
        rep.field("bruteforce_re", brute.value.re).field("bruteforce_im", brute.value.im).field("difference", diff);
        rep.field("status", passed);
    }
    Ok(Outcome { report: rep, passed })
}

fn kloosterman_verify(cmax: i64) -> Result<Outcome, CliError> {
    if cmax < 1 {
        return Err(CliError::Usage("--verify needs C >= 1".into()));
    }
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for w in [KernelTag::W4, KernelTag::W5, KernelTag::Wl] {
        for c1 in 1..=cmax {
            for c2 in 1..=cmax {
                let c = Modulus::new(c1, c2)?;
                for &(m1, m2) in &VERIFY_M {
                    for &(n1, n2) in &VERIFY_N {
                        let m = CharacterIndex::new(m1, m2)?;
                        let n = CharacterIndex::new(n1, n2)?;
                        let fast = kloosterman_fast(w, m, n, c);
                        let brute = kloosterman_bruteforce(w, m, n, c)?;
                        let diff = (fast.value - brute.value).norm();
                        worst = worst.max(diff);
                        cases += 1;
                        if diff > KLOOSTERMAN_TOL || fast.terms != brute.terms {
                            failures.push(format!("{} m=({m1},{m2}) n=({n1},{n2}) c=({c1},{c2}): diff {diff:e}", w.name()));
                        }
                    }
                }
            }
        }
    }
    let passed = failures.is_empty();
    let mut rep = Report::new("kloosterman-verify");
    rep.field("cases", cases).field("max_difference", worst).field("status", passed);
    if passed {
        rep.note(format!("fast==bruteforce: OK ({cases} cases)"));
    } else {
        rep.note(format!("fast==bruteforce: FAIL ({} of {cases} cases)", failures.len()));
        for f in failures {
            rep.note(f);
        }
    }
    Ok(Outcome { report: rep, passed })
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TransformArgs {
    /// Weyl element: i, w4, w5 or wl.
    #[arg(long, value_parser = tag)]
    tag: KernelTag,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    y1: f64,
    #[arg(long, default_value_t = -1.0)]
    y2: f64,
    #[arg(long, value_enum, default_value_t = TestKind::Gaussian)]
    test: TestKind,
}

fn transform(a: TransformArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let y = SignedTorusPoint::new(a.y1, a.y2)?;
    let v = h_transform(a.tag, &a.test.build(), a.d, y, cfg.tol)?;
    let mut rep = Report::new("transform");
    rep.field("tag", a.tag.name()).field("d", a.d).field("y1", a.y1).field("y2", a.y2);
    rep.field("re", v.re).field("im", v.im);
    Ok(Outcome::ok(rep))
}

#[derive(Debug, Args)]
pub struct GeometricArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Character m as `m1,m2`.
    #[arg(long, value_parser = character, allow_hyphen_values = true, default_value = "1,1")]
    m: CharacterIndex,
    /// Character n as `n1,n2`.
    #[arg(long, value_parser = character, allow_hyphen_values = true, default_value = "1,1")]
    n: CharacterIndex,
    /// Largest modulus entry included.
    #[arg(long, default_value_t = 2)]
    cutoff: i64,
    #[arg(long, value_enum, default_value_t = TestKind::Gaussian)]
    test: TestKind,
}

fn geometric(a: GeometricArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if a.cutoff < 1 {
        return Err(CliError::Usage("--cutoff must be at least 1".into()));
    }
    let g = geometric_side(&a.test.build(), a.d, a.m, a.n, a.cutoff, cfg.tol)?;
    let mut rep = Report::new("geometric");
    rep.field("d", a.d).field("cutoff", a.cutoff);
    rep.columns(&["term", "re", "im", "last_shell", "terms"]);
    rep.row(vec!["identity".into(), g.k_identity.re.into(), g.k_identity.im.into(), Cell::Float(0.0), Cell::Int(1)]);
    let cells = [("w4", g.k4), ("w5", g.k5), ("wl", g.kl)];
    for (k, (name, v)) in cells.into_iter().enumerate() {
        rep.row(vec![name.into(), v.re.into(), v.im.into(), g.last_shell[k].into(), g.terms[k].into()]);
    }
    Ok(Outcome::ok(rep))
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_enum, default_value_t = TestKind::Gaussian)]
    test: TestKind,
    /// Comma-separated imaginary parts of the sample points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,0.8")]
    r: Vec<f64>,
}

fn kl_roundtrip(a: RoundtripArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let samples: Vec<C64> = a.r.iter().copied().map(ci).collect();
    let rt = kl_roundtrip_report(&a.test.build(), a.d, &samples, &KlGrid::standard(), cfg.tol)?;
    let passed = rt.max_deviation <= ROUNDTRIP_TOL;
    let mut rep = Report::new("kl-roundtrip");
    rep.field("d", a.d).field("max_deviation", rt.max_deviation).field("status", passed);
    rep.columns(&["r_im", "f_re", "f_im", "roundtrip_re", "roundtrip_im", "deviation"]);
    for (r, want, got, dev) in rt.samples {
        rep.row(vec![r.im.into(), want.re.into(), want.im.into(), got.re.into(), got.im.into(), dev.into()]);
    }
    Ok(Outcome { report: rep, passed })
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct WeylArgs {
    /// Box window `lo,hi`: imaginary parts of the ends of Omega.
    #[arg(long, value_parser = pair::<f64>, allow_hyphen_values = true, conflicts_with = "ball")]
    window: Option<(f64, f64)>,
    /// Ball window `center,radius`: |r - T i center| < radius.
    #[arg(long, value_parser = pair::<f64>, allow_hyphen_values = true)]
    ball: Option<(f64, f64)>,
    /// Scale T.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Also report the error integrals of the smoothed window indicator.
    #[arg(long)]
    errors: bool,
}

fn weyl(a: WeylArgs) -> Result<Outcome, CliError> {
    let window = match (a.window, a.ball) {
        (Some((lo, hi)), None) => SpectralWindow::Box { lo, hi, scale: a.scale },
        (None, Some((center, radius))) => SpectralWindow::Ball { center, radius, scale: a.scale },
        _ => return Err(CliError::Usage("give exactly one of --window or --ball".into())),
    };
    let (lo, hi) = window.interval()?;
    let main = weyl_main_term(&window, a.d)?;
    let quad = weyl_main_term_quadrature(&window, a.d, 64)?;
    let df = a.d as f64;
    let t = a.scale;
    let mut rep = Report::new("weyl");
    rep.field("d", a.d).field("scale", t).field("window_lo", lo).field("window_hi", hi);
    rep.field("main_term", main).field("quadrature", quad);
    rep.field("quadrature_rel_diff", (main - quad).abs() / main.abs().max(f64::MIN_POSITIVE));
    rep.field("main_over_dT(d+T)^2", main / (df * t * (df + t).powi(2)));
    if a.errors {
        let f = smoothed_indicator(&window, a.d)?;
        let (e1, e2) = error_diagnostics(&f, a.d, 0.01, 0.01)?;
        rep.field("error_e1", e1).field("error_e2", e2);
    }
    Ok(Outcome::ok(rep))
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    /// Random cases per identity.
    #[arg(long, default_value_t = 25)]
    sweep: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Restrict to one identity.
    #[arg(long)]
    tag: Option<String>,
}

fn identities(a: IdentitiesArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tags = match &a.tag {
        Some(t) => vec![t.parse::<IdentityTag>()?],
        None => IdentityTag::ALL.to_vec(),
    };
    let mut rep = Report::new("identities");
    rep.field("sweep", a.sweep).field("seed", a.seed as usize).field("tol", cfg.tol);
    rep.columns(&["tag", "cases", "max_error", "failures", "status"]);
    let mut passed = true;
    for t in tags {
        let s = random_sweep(t, a.sweep, a.seed, cfg.tol);
        passed &= s.passed();
        rep.row(vec![t.name().into(), s.count.into(), s.max_error.into(), s.failures.len().into(), s.passed().into()]);
    }
    Ok(Outcome { report: rep, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_indices() {
        assert_eq!(pair::<i64>("-1, 2"), Ok((-1, 2)));
        assert!(pair::<i64>("3").is_err());
        assert!(character("0,1").is_err());
        assert!(modulus("0,1").is_err());
    }
}
