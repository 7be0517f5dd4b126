//! Statistics for the benchmark harnesses: paired t-tests for per-seed
//! comparisons, a Kolmogorov-Smirnov check for the simplex sampler, and a
//! log-log slope fit for variance-scaling checks.

use crate::error::{Error, Result};

/// Sample mean and unbiased variance.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var)
}

/// Result of a paired t-test on per-seed differences.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TTest {
    pub mean_diff: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    /// P(T >= t): evidence that the mean difference is positive.
    pub p_one_sided_greater: f64,
    pub p_two_sided: f64,
}

/// Paired t-test over a slice of per-seed differences.
pub fn paired_t_test(diffs: &[f64]) -> Result<TTest> {
    if diffs.len() < 2 {
        return Err(Error::InvalidArgument(
            "paired test needs at least two differences".into(),
        ));
    }
    let n = diffs.len();
    let (mean, var) = mean_and_variance(diffs);
    let se = (var / n as f64).sqrt();
    let df = n - 1;
    let t = if se == 0.0 {
        if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / se
    };
    let cdf = student_t_cdf(t, df as f64);
    Ok(TTest {
        mean_diff: mean,
        t_statistic: t,
        degrees_of_freedom: df,
        p_one_sided_greater: 1.0 - cdf,
        p_two_sided: 2.0 * cdf.min(1.0 - cdf),
    })
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = df / (df + t * t);
    let tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Regularized incomplete beta function `I_x(a, b)` via Lentz's continued
/// fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fastest for x < (a+1)/(a+b+2).
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-14;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation of `ln Gamma(x)` for positive `x`.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Large-sample KS critical value at significance `alpha` (0.01 or 0.05).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let c = if alpha <= 0.01 { 1.628 } else { 1.358 };
    c / (n as f64).sqrt()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope needs two equal-length series".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument("degenerate x values".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        // Gamma(5) = 24, Gamma(0.5) = sqrt(pi).
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-10);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_known_values() {
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-12);
        assert!((regularized_incomplete_beta(0.5, 0.5, 0.5) - 0.5).abs() < 1e-10);
        assert!((regularized_incomplete_beta(2.0, 3.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_cdf_matches_tabulated_critical_values() {
        // Two-sided 5% points: t(10) = 2.228, t(20) = 2.086.
        let p10 = 2.0 * (1.0 - student_t_cdf(2.228, 10.0));
        assert!((p10 - 0.05).abs() < 1e-3, "p {p10}");
        let p20 = 2.0 * (1.0 - student_t_cdf(2.086, 20.0));
        assert!((p20 - 0.05).abs() < 1e-3, "p {p20}");
        // Symmetry.
        assert!((student_t_cdf(-1.3, 7.0) + student_t_cdf(1.3, 7.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paired_test_detects_a_clear_shift() {
        let diffs: Vec<f64> = (0..20).map(|k| 0.5 + 0.01 * (k % 5) as f64).collect();
        let t = paired_t_test(&diffs).unwrap();
        assert!(t.p_one_sided_greater < 1e-6);
        assert!(t.mean_diff > 0.49);
    }

    #[test]
    fn paired_test_is_calm_on_noise() {
        let diffs: Vec<f64> = (0..30)
            .map(|k| if k % 2 == 0 { 0.1 } else { -0.1 })
            .collect();
        let t = paired_t_test(&diffs).unwrap();
        assert!(t.p_one_sided_greater > 0.2);
    }

    #[test]
    fn ks_accepts_the_true_cdf_and_rejects_a_wrong_one() {
        use rand::Rng as _;
        let mut rng = crate::seed::rng_from_seed(5);
        let mut samples: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_statistic(&mut samples, |x| x.clamp(0.0, 1.0));
        assert!(d < ks_critical(20_000, 0.01), "d = {d}");
        let d_wrong = ks_statistic(&mut samples, |x| (x * x).clamp(0.0, 1.0));
        assert!(d_wrong > ks_critical(20_000, 0.01));
    }

    #[test]
    fn slope_recovers_a_power_law() {
        let x: Vec<f64> = [100.0, 1000.0, 10000.0].iter().map(|v: &f64| v.ln()).collect();
        let y: Vec<f64> = [100.0, 1000.0, 10000.0]
            .iter()
            .map(|v: &f64| (1.0 / v).ln())
            .collect();
        let s = slope(&x, &y).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
    }
}
