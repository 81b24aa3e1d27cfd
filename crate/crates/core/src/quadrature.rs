//! Adaptive Gauss-Kronrod quadrature, half-line integrals and nested
//! integration over `[1, ∞)^N`.

use crate::error::{Error, Result};
use crate::scalar::Real;

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_113_335,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances and limits for the adaptive integrators.
///
/// Convergence is declared when the estimated absolute error drops below
/// `max(abs_tol, rel_tol * |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Bisections allowed per one-dimensional integral.
    pub max_subdivisions: usize,
    /// Truncate half-line integrals at this value instead of mapping the whole half line.
    pub nu_max: Option<T>,
    /// With `nu_max`, add a power-law estimate of the tail beyond the cutoff.
    pub tail_extrapolation: bool,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_subdivisions: 200,
            nu_max: None,
            tail_extrapolation: false,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol >= T::zero()) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least one".into()));
        }
        if let Some(m) = self.nu_max {
            if !(m > T::one()) {
                return Err(Error::Config("nu_max must exceed one".into()));
            }
        }
        Ok(())
    }

    /// Same configuration with a new relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Same configuration with the absolute tolerance disabled, for
    /// integrals whose magnitude is far below one.
    pub fn relative_only(mut self) -> Self {
        self.abs_tol = T::zero();
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += T::lit(WGK[j]) * (f1 + f2);
        abs_sum += T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * T::lit(0.5);
    let mut asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        asc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let abs_half = half.abs();
    let res_abs = abs_sum * abs_half;
    let res_asc = asc * abs_half;
    let mut err = ((kronrod - gauss) * half).abs();
    // QUADPACK error rescaling
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let eps = T::default_epsilon();
    if res_abs > T::tiny() / (T::lit(50.0) * eps) {
        err = err.max(T::lit(50.0) * eps * res_abs);
    }
    (result, err)
}

/// Adaptive 21-point Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    cfg.validate()?;
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            abs_error: T::zero(),
            evaluations: 0,
        });
    }
    let (value, error) = gauss_kronrod(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 21;
    loop {
        if !total.finite() || !total_err.finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if segments.len() > cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: total.to_f64_lossy(),
                error: total_err.to_f64_lossy(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).expect("finite errors"))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let span = seg.a.abs().max(seg.b.abs());
        if (seg.b - seg.a).abs() <= T::lit(100.0) * T::default_epsilon() * span {
            return Err(Error::QuadratureNonConvergence {
                estimate: total.to_f64_lossy(),
                error: total_err.to_f64_lossy(),
            });
        }
        let mid = (seg.a + seg.b) * T::lit(0.5);
        let (v1, e1) = gauss_kronrod(&mut f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(&mut f, mid, seg.b);
        evaluations += 42;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
    let abs_error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    Ok(Estimate {
        value,
        abs_error,
        evaluations,
    })
}

/// `∫_lower^∞ f(ν) dν` for `lower > 0` through the substitution `ν = lower / t`.
///
/// With `cfg.nu_max` the integral is truncated at the cutoff; with
/// `cfg.tail_extrapolation` a power-law tail `f ~ ν^{-p}` fitted at the
/// cutoff is added.
pub fn integrate_half_line<T, F>(mut f: F, lower: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(lower > T::zero()) {
        return Err(Error::Domain("half-line integrals need a positive lower limit".into()));
    }
    let t_min = match cfg.nu_max {
        Some(m) if m > lower => lower / m,
        Some(_) => return Err(Error::Config("nu_max must exceed the lower limit".into())),
        None => T::zero(),
    };
    let mut est = integrate(
        |t| {
            if t == T::zero() {
                return T::zero();
            }
            let nu = lower / t;
            f(nu) * lower / (t * t)
        },
        t_min,
        T::one(),
        cfg,
    )?;
    if let (Some(m), true) = (cfg.nu_max, cfg.tail_extrapolation) {
        let f1 = f(m);
        let f2 = f(m + m);
        est.evaluations += 2;
        let tail = if f1 == T::zero() && f2 == T::zero() {
            T::zero()
        } else if f1 > T::zero() && f2 > T::zero() {
            let p = (f1 / f2).ln() / T::LN_2();
            if p <= T::one() {
                return Err(Error::Domain("tail decays too slowly to extrapolate".into()));
            }
            f1 * m / (p - T::one())
        } else {
            return Err(Error::Domain("tail is not a positive power law".into()));
        };
        est.value += tail;
    }
    Ok(est)
}

/// `∫_{[1,∞)^N} f(ν₁, …, ν_N) dν` by nested adaptive quadrature.
///
/// `ν₁` is the outermost variable, so integrands with a non-smooth factor in
/// one coordinate should put it first.
pub fn integrate_spectral<T, F>(modes: usize, mut f: F, cfg: &QuadratureConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    if modes == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    let mut point = vec![T::one(); modes];
    let mut failure = None;
    let mut evaluations = 0usize;
    let est = integrate_half_line(
        |nu| {
            point[0] = nu;
            nested_level(1, &mut point, &mut f, cfg, &mut failure, &mut evaluations)
        },
        T::one(),
        cfg,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    let mut est = est?;
    est.evaluations = evaluations;
    Ok(est)
}

fn nested_level<T: Real>(
    level: usize,
    point: &mut [T],
    f: &mut dyn FnMut(&[T]) -> T,
    cfg: &QuadratureConfig<T>,
    failure: &mut Option<Error>,
    evaluations: &mut usize,
) -> T {
    if level == point.len() {
        *evaluations += 1;
        return f(point);
    }
    if failure.is_some() {
        return T::lit(f64::NAN);
    }
    let inner = integrate_half_line(
        |nu| {
            point[level] = nu;
            nested_level(level + 1, point, f, cfg, failure, evaluations)
        },
        T::one(),
        cfg,
    );
    match inner {
        Ok(est) => est.value,
        Err(err) => {
            failure.get_or_insert(err);
            T::lit(f64::NAN)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::<f64>::default();
        let est = integrate(|x| 3.0 * x * x, 0.0, 2.0, &cfg).unwrap();
        assert_relative_eq!(est.value, 8.0, max_relative = 1e-15);
        assert_eq!(est.evaluations, 21);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let cfg = QuadratureConfig::<f64>::default();
        let est = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn power_law_half_line() {
        let cfg = QuadratureConfig::<f64>::default();
        let est = integrate_half_line(|nu: f64| nu.powf(-2.5), 1.0, &cfg).unwrap();
        assert_relative_eq!(est.value, 2.0 / 3.0, max_relative = 1e-10);
        let est = integrate_half_line(|nu: f64| (-nu).exp(), 2.0, &cfg).unwrap();
        assert_relative_eq!(est.value, (-2.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn cutoff_with_tail_extrapolation() {
        let exact = 2.0 / 3.0;
        let truncated = QuadratureConfig {
            nu_max: Some(50.0),
            ..QuadratureConfig::<f64>::default()
        };
        let est = integrate_half_line(|nu: f64| nu.powf(-2.5), 1.0, &truncated).unwrap();
        assert!(est.value < exact - 1e-3);
        let extrapolated = QuadratureConfig {
            tail_extrapolation: true,
            ..truncated
        };
        let est = integrate_half_line(|nu: f64| nu.powf(-2.5), 1.0, &extrapolated).unwrap();
        assert_relative_eq!(est.value, exact, max_relative = 1e-10);
    }

    #[test]
    fn nested_separable_product() {
        let cfg = QuadratureConfig::<f64>::default();
        let est = integrate_spectral(3, |v| (v[0] * v[1] * v[2]).powf(-3.0), &cfg).unwrap();
        assert_relative_eq!(est.value, 0.125, max_relative = 1e-10);
    }

    #[test]
    fn divergent_integral_fails() {
        let cfg = QuadratureConfig::<f64>::default();
        let res = integrate_half_line(|nu: f64| 1.0 / nu, 1.0, &cfg);
        assert!(res.is_err());
        let res = integrate_spectral(2, |v| 1.0 / v[1], &cfg);
        assert!(res.is_err());
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..QuadratureConfig::<f64>::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = QuadratureConfig {
            nu_max: Some(0.5),
            ..QuadratureConfig::<f64>::default()
        };
        assert!(bad.validate().is_err());
    }
}
