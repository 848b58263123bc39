//! One-dimensional grid-then-refine minimization shared by the receiver
//! optimizations.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimize `f` on `[lo, hi]`: dense grid scan, then golden-section
/// refinement started from the `n_starts` best grid points. Returns the best
/// `(x, f(x))` over every point evaluated, so the result can never be worse
/// than the best grid point.
pub(crate) fn grid_then_golden<F>(
    f: F,
    lo: f64,
    hi: f64,
    step: f64,
    xtol: f64,
    n_starts: usize,
) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(hi > lo && step > 0.0);
    let n = ((hi - lo) / step).ceil() as usize;
    let mut grid: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = (lo + i as f64 * step).min(hi);
            (x, f(x))
        })
        .collect();
    let mut best = grid
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");

    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    for &(x0, _) in grid.iter().take(n_starts) {
        let a = (x0 - step).max(lo);
        let b = (x0 + step).min(hi);
        let (x, v) = golden_section(&f, a, b, xtol);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let (x, v) = grid_then_golden(|x| (x - 1.3) * (x - 1.3), 0.0, 4.0, 0.01, 1e-6, 3);
        assert!((x - 1.3).abs() < 1e-4);
        assert!(v < 1e-8);
    }

    #[test]
    fn handles_minimum_at_boundary() {
        let (x, _) = grid_then_golden(|x| x, 0.0, 2.0, 0.1, 1e-6, 3);
        assert!(x < 1e-4);
    }

    #[test]
    fn picks_global_of_two_wells() {
        // left well is shallower
        let f = |x: f64| {
            let l = (x - 1.0) * (x - 1.0) + 0.1;
            let r = (x - 3.0) * (x - 3.0);
            l.min(r)
        };
        let (x, _) = grid_then_golden(f, 0.0, 4.0, 0.05, 1e-6, 3);
        assert!((x - 3.0).abs() < 1e-4);
    }
}
