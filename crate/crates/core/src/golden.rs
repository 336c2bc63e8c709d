//! Golden-section search on an interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[a, b]` until the bracket is shorter than `tol`.
/// Returns the best point seen and its value; `+∞` values are allowed.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64, max_iters: usize) -> (f64, f64, usize)
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    let mut iters = 0;
    while (b - a).abs() > tol && (b - a).abs() > 4.0 * f64::EPSILON * a.abs().max(b.abs()) && iters < max_iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
        iters += 1;
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    evals += 1;
    let mut best = (m, fm);
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    (best.0, best.1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let (x, v, _) = golden_section(|t| (t - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn finds_kink_minimum() {
        let (x, _, _) = golden_section(|t| (t + 0.7).abs(), -1.0, 1.0, 1e-10, 200);
        assert!((x + 0.7).abs() < 1e-8);
    }

    #[test]
    fn tolerates_infinite_values() {
        let f = |t: f64| if t < 0.0 { f64::INFINITY } else { (t - 0.5).powi(2) };
        let (x, _, _) = golden_section(f, -1.0, 1.0, 1e-10, 200);
        assert!((x - 0.5).abs() < 1e-8);
    }
}
