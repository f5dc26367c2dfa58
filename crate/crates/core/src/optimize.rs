//! Derivative-free one-dimensional minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns `(x, f(x))` at the best point seen.
pub fn golden_section_minimize<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Coarse scan of `points` evenly spaced samples followed by a golden-section
/// refinement inside the cell pair around the best sample. Safer than a bare
/// golden-section search when `f` has several local minima on `[a, b]`.
///
/// Returns `(x, f(x), evaluations)`.
pub fn scan_then_refine<F>(mut f: F, a: f64, b: f64, points: usize, tol: f64) -> (f64, f64, usize)
where
    F: FnMut(f64) -> f64,
{
    let points = points.max(2);
    let h = (b - a) / (points - 1) as f64;
    let mut best = (a, f64::INFINITY);
    let mut best_i = 0;
    for i in 0..points {
        let x = a + h * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let mut evaluations = points;
    if h == 0.0 {
        return (best.0, best.1, evaluations);
    }
    let lo = a + h * best_i.saturating_sub(1) as f64;
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let mut counted = |x: f64| {
        evaluations += 1;
        f(x)
    };
    let (x, v) = golden_section_minimize(&mut counted, lo, hi, tol);
    if v < best.1 {
        (x, v, evaluations)
    } else {
        (best.0, best.1, evaluations)
    }
}
