//! Globally adaptive Gauss-Kronrod (10, 21) quadrature.
//!
//! Intervals live in a max-heap keyed by their error estimate; the worst one
//! is bisected until the summed error meets the tolerance. Semi-infinite
//! integrals are handled by a finite adaptive part followed by doubling tail
//! panels, so no variable transformation distorts the Bose kernels.

use super::Real;
use crate::{Error, Result};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    /// Upper limit of the adaptive part of a semi-infinite integral, in
    /// units of the integrand's decay scale.
    pub tail_cutoff: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        // 1e-12 in double precision; never tighter than 50 ulp.
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(50.0));
        QuadratureConfig {
            rel_tol: rel,
            abs_tol: T::zero(),
            max_subdivisions: 2000,
            tail_cutoff: T::lit(30.0),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn with_tail_cutoff(mut self, cutoff: T) -> Self {
        self.tail_cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) {
            return Err(Error::domain("rel_tol must be positive"));
        }
        if !(self.abs_tol >= T::zero()) {
            return Err(Error::domain("abs_tol must be non-negative"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if !(self.tail_cutoff > T::zero()) {
            return Err(Error::domain("tail_cutoff must be positive"));
        }
        Ok(())
    }

    fn tolerance(&self, value: T, resabs: T) -> T {
        let roundoff = T::lit(100.0) * T::epsilon() * resabs;
        self.abs_tol.max(self.rel_tol * value.abs()).max(roundoff)
    }
}

/// Integral value with its error estimate and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

impl<T: Real> Estimate<T> {
    fn zero() -> Self {
        Estimate {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        }
    }

    pub(crate) fn accumulate(&mut self, other: &Estimate<T>) {
        self.value = self.value + other.value;
        self.error = self.error + other.error;
        self.evaluations += other.evaluations;
        self.subdivisions += other.subdivisions;
    }

    /// Scale value and error by a constant.
    pub fn scaled(self, factor: T) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    pub fn relative_error(&self) -> T {
        if self.value == T::zero() {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    resabs: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Segment<T> {}

impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.as_f64().total_cmp(&other.error.as_f64())
    }
}

/// One 21-point Kronrod panel. The error is the raw |K21 - G10|.
fn gk21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<Segment<T>> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let fc = f(center);
    check_finite(fc, center)?;
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut resabs = fc.abs() * T::lit(WGK[10]);

    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let (x1, x2) = (center - dx, center + dx);
        let f1 = f(x1);
        check_finite(f1, x1)?;
        let f2 = f(x2);
        check_finite(f2, x2)?;
        let w = T::lit(WGK[j]);
        kronrod = kronrod + w * (f1 + f2);
        resabs = resabs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let scale = half_len.abs();
    Ok(Segment {
        a,
        b,
        value: kronrod * half_len,
        error: ((kronrod - gauss) * half_len).abs(),
        resabs: resabs * scale,
    })
}

fn check_finite<T: Real>(y: T, x: T) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "integrand is not finite at x = {:e}",
            x.as_f64()
        )))
    }
}

/// Integrate over [points[0], points[last]] with the listed interior points
/// as forced breakpoints. `points` must be sorted.
pub fn integrate_with_breakpoints<T, F>(
    mut f: F,
    points: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::domain("need at least two integration limits"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("breakpoints must be sorted"));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&mut f, w[0], w[1])?);
            evaluations += 21;
        }
    }
    let mut subdivisions = 0;

    loop {
        let (value, error, resabs) = heap
            .iter()
            .fold((T::zero(), T::zero(), T::zero()), |(v, e, r), s| {
                (v + s.value, e + s.error, r + s.resabs)
            });
        if error <= cfg.tolerance(value, resabs) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
                subdivisions,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => unreachable!("error above tolerance implies a segment"),
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let too_small = !(mid > worst.a && mid < worst.b);
        if subdivisions >= cfg.max_subdivisions || too_small {
            return Err(Error::Quadrature {
                partial: value.as_f64(),
                error: error.as_f64(),
                subdivisions,
            });
        }
        heap.push(gk21(&mut f, worst.a, mid)?);
        heap.push(gk21(&mut f, mid, worst.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Integrate f over the finite interval [a, b].
pub fn integrate<T, F>(f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if b < a {
        return integrate_with_breakpoints(f, &[b, a], cfg).map(|e| e.scaled(-T::one()));
    }
    integrate_with_breakpoints(f, &[a, b], cfg)
}

/// Integrate f over [0, inf) for an integrand decaying like e^{-x/scale}.
///
/// The adaptive part covers [0, tail_cutoff * scale]. Beyond it, panels of
/// doubling width are added until one contributes less than a tenth of the
/// tolerance.
pub fn integrate_semi_infinite<T, F>(
    f: F,
    scale: T,
    cfg: &QuadratureConfig<T>,
) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_semi_infinite_with_breakpoints(f, scale, &[], cfg)
}

/// As [`integrate_semi_infinite`] with extra interior breakpoints (for
/// example around a narrow resonance). Points beyond the adaptive range
/// extend it.
pub fn integrate_semi_infinite_with_breakpoints<T, F>(
    mut f: F,
    scale: T,
    breakpoints: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    cfg.validate()?;
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::domain("decay scale must be positive and finite"));
    }
    let mut upper = cfg.tail_cutoff * scale;
    let mut points = vec![T::zero()];
    let mut interior: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > T::zero() && p.is_finite())
        .collect();
    interior.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    if let Some(&last) = interior.last() {
        if last >= upper {
            upper = last + cfg.tail_cutoff * scale;
        }
    }
    points.extend(interior);
    points.push(upper);

    let mut total = integrate_with_breakpoints(&mut f, &points, cfg)?;

    let mut lo = upper;
    let mut width = upper;
    for _ in 0..64 {
        let panel = integrate(&mut f, lo, lo + width, cfg)?;
        total.accumulate(&panel);
        let tol = cfg.tolerance(total.value, T::zero());
        if panel.value.abs() + panel.error <= T::lit(0.1) * tol || panel.value == T::zero() {
            return Ok(total);
        }
        lo = lo + width;
        width = width + width;
    }
    Err(Error::Quadrature {
        partial: total.value.as_f64(),
        error: total.error.as_f64(),
        subdivisions: total.subdivisions,
    })
}

impl<T: Real> Default for Estimate<T> {
    fn default() -> Self {
        Estimate::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        // G10 is exact through degree 19, so the pair agrees at once.
        let est = integrate(|x: f64| x.powi(19), 0.0, 1.0, &cfg()).unwrap();
        assert!((est.value - 1.0 / 20.0).abs() < 1e-16);
        assert_eq!(est.subdivisions, 0);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let est = integrate(|x: f64| x.sin(), PI, 0.0, &cfg()).unwrap();
        assert!((est.value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand_adapts() {
        // Int_{-1}^{1} 1/(1e-4 + x^2) = 2 atan(100)/1e-2
        let est = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg()).unwrap();
        let exact = 2.0 * (100.0_f64).atan() / 1e-2;
        assert!((est.value - exact).abs() / exact < 1e-12);
        assert!(est.subdivisions > 0);
        assert!(est.error >= (est.value - exact).abs());
    }

    #[test]
    fn exponential_tail() {
        let est = integrate_semi_infinite(|x: f64| (-x).exp(), 1.0, &cfg()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn slow_tail_needs_extension() {
        // x^8/(e^x - 1) still carries ~1e-6 relative weight beyond x = 30.
        let f = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                x.powi(8) / x.exp_m1()
            }
        };
        let est = integrate_semi_infinite(f, 1.0, &cfg()).unwrap();
        let exact = 40_400.978_398_747_63; // 8! zeta(9), mpmath
        assert!((est.value - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn breakpoints_capture_narrow_peak() {
        let w = 1e-6;
        let x0 = 7.0;
        let f = |x: f64| w / PI / ((x - x0).powi(2) + w * w) * (-x / 10.0).exp();
        let bps = [x0 - 10.0 * w, x0, x0 + 10.0 * w];
        let est = integrate_semi_infinite_with_breakpoints(f, 10.0, &bps, &cfg()).unwrap();
        assert!((est.value - (-0.7_f64).exp()).abs() < 1e-5);
    }

    #[test]
    fn subdivision_limit_reports_partial() {
        let small = cfg().with_max_subdivisions(2);
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &small).unwrap_err();
        match err {
            Error::Quadrature {
                partial,
                subdivisions,
                ..
            } => {
                assert!(partial > 0.0);
                assert_eq!(subdivisions, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_domain_error() {
        let err = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &cfg());
        assert!(err.is_err());
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn bad_config_rejected() {
        let bad = cfg().with_rel_tol(0.0);
        assert!(integrate(|x: f64| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn single_precision() {
        let c = QuadratureConfig::<f32>::default();
        let est = integrate_semi_infinite(|x: f32| x * x * (-x).exp(), 1.0, &c).unwrap();
        assert!((est.value - 2.0).abs() < 1e-5);
    }
}
