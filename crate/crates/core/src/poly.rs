//! Small numerical helpers shared by the analytic modules: quadratic roots,
//! bracketed one-dimensional maximisation and least-squares line fits.

/// Real roots of `a x^2 + b x + c = 0` computed without cancellation.
///
/// Returns `None` when the discriminant is negative or the equation is not
/// quadratic. Roots are returned in increasing order.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum_or_one() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a, c / q)
    };
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximiser of a unimodal `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `rel_tol * max(1, |x|)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        let mid = 0.5 * (a + b);
        if (b - a) <= rel_tol * mid.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Maximises `f` on the closed interval `[a, b]`.
///
/// The sign of `df` is sampled at `probes` interior points. If it changes at
/// most once, from positive to negative, the function is treated as
/// unimodal and refined by golden section; otherwise a dense grid search
/// followed by golden refinement around the best cell is used. Endpoints are
/// always candidates. Returns `(argmax, max)`.
pub fn maximise_on_interval<F, G>(f: F, df: G, a: f64, b: f64, probes: usize, rel_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let h = (b - a) / (probes + 1) as f64;
    let signs: Vec<f64> = (1..=probes).map(|k| df(a + k as f64 * h)).collect();
    let changes: Vec<usize> = signs
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] > 0.0) != (w[1] > 0.0))
        .map(|(k, _)| k)
        .collect();

    let mut candidates = vec![a, b];
    let unimodal = match changes.as_slice() {
        [] => true,
        [_] => signs[0] > 0.0,
        _ => false,
    };
    if unimodal {
        if let [k] = changes.as_slice() {
            let lo = a + (*k + 1) as f64 * h;
            let hi = a + (*k + 2) as f64 * h;
            candidates.push(golden_section_max(&f, lo, hi, rel_tol));
        }
    } else {
        let n = 10_000;
        let step = (b - a) / n as f64;
        let best = (0..=n)
            .map(|k| a + k as f64 * step)
            .max_by(|x, y| f(*x).total_cmp(&f(*y)))
            .unwrap_or(a);
        let lo = (best - step).max(a);
        let hi = (best + step).min(b);
        candidates.push(golden_section_max(&f, lo, hi, rel_tol));
    }
    candidates
        .into_iter()
        .map(|x| (x, f(x)))
        .max_by(|l, r| l.1.total_cmp(&r.1))
        .expect("candidate list is never empty")
}

/// Least-squares straight line through `(x, y)` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_are_ordered_and_accurate() {
        let (r1, r2) = quadratic_roots(1.0, -0.4, 0.03).unwrap();
        assert!((r1 - 0.1).abs() < 1e-15);
        assert!((r2 - 0.3).abs() < 1e-15);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_none());
        assert!(quadratic_roots(0.0, 1.0, 1.0).is_none());
    }

    #[test]
    fn small_root_survives_cancellation() {
        // x^2 - 1e8 x + 1 has a root near 1e-8 that the textbook formula loses.
        let (r1, _) = quadratic_roots(1.0, -1e8, 1.0).unwrap();
        assert!((r1 - 1e-8).abs() / 1e-8 < 1e-12);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let x = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn maximise_handles_monotone_and_bimodal() {
        let (x, fx) = maximise_on_interval(|x| 1.0 - x, |_| -1.0, 0.0, 1.0, 50, 1e-10);
        assert_eq!((x, fx), (0.0, 1.0));
        let f = |x: f64| (6.0 * std::f64::consts::PI * x).sin() + x;
        let df = |x: f64| 6.0 * std::f64::consts::PI * (6.0 * std::f64::consts::PI * x).cos() + 1.0;
        let (_, fx) = maximise_on_interval(f, df, 0.0, 1.0, 50, 1e-10);
        let brute = (0..=100_000).map(|k| f(k as f64 / 1e5)).fold(f64::MIN, f64::max);
        assert!((fx - brute).abs() < 1e-8);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }
}
