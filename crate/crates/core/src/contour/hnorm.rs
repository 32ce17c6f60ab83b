//! Sup-norms of `h_{w,z}(x) = (x - w) / (x - z)` and `h_z(x) = 1 / (x - z)`
//! over real intervals, and membership in the sublevel regions of the former.

use num_complex::Complex64;

use crate::contour::sets::SpectrumSet;

/// `max_{x in [a, b]} |x - w| / |x - z|` for real `w`. Infinite when `z` is
/// a real point of the interval.
pub fn h_norm_interval(w: f64, z: Complex64, a: f64, b: f64) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let at = |x: f64| (x - w).abs() / (Complex64::new(x, 0.0) - z).norm();
    if z.im == 0.0 && z.re >= a && z.re <= b {
        return if z.re == w && a == b { 1.0 } else { f64::INFINITY };
    }
    let mut m = at(a).max(at(b));
    if z.im != 0.0 && z.re != w {
        let x_star = (z.re * z.re + z.im * z.im - z.re * w) / (z.re - w);
        if x_star >= a && x_star <= b {
            m = m.max((z - w).norm() / z.im.abs());
        }
    }
    m
}

/// `max_{x in [a, b]} 1 / |x - z|`.
pub fn hz_norm_interval(z: Complex64, a: f64, b: f64) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if z.re < a {
        1.0 / (Complex64::new(a, 0.0) - z).norm()
    } else if z.re > b {
        1.0 / (Complex64::new(b, 0.0) - z).norm()
    } else if z.im == 0.0 {
        f64::INFINITY
    } else {
        1.0 / z.im.abs()
    }
}

/// Relative tolerance used to decide boundary membership.
pub const REGION_TOL: f64 = 1e-12;

/// Whether `z` lies in `X_r = union_{x in S} D(x, |x - w| / r)`, decided by
/// minimizing `r |x - z| - |x - w|` over each piece of `S` on which it is
/// convex (pieces are split at `w`) with golden-section search.
pub fn region_membership(w: f64, set: &SpectrumSet, r: f64, z: Complex64) -> bool {
    let g = |x: f64| r * (Complex64::new(x, 0.0) - z).norm() - (x - w).abs();
    let scale = z.norm() + w.abs() + set.hull().map(|(a, b)| a.abs().max(b.abs())).unwrap_or(0.0) + 1.0;
    let tol = REGION_TOL * scale * r.max(1.0);
    for (a, b) in set.pieces() {
        let mut cuts = vec![a];
        if w > a && w < b {
            cuts.push(w);
        }
        cuts.push(b);
        for piece in cuts.windows(2) {
            if golden_min(&g, piece[0], piece[1]) <= tol {
                return true;
            }
        }
    }
    false
}

/// Minimum of a convex function on `[a, b]`.
fn golden_min(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut best = g(a).min(g(b));
    if b <= a {
        return best;
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (lo.abs() + hi.abs() + 1e-300) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = g(x2);
        }
        best = best.min(f1).min(f2);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interval_examples() {
        assert!((h_norm_interval(0.0, c(0.0, 1.0), 0.0, 1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((h_norm_interval(0.0, c(2.0, 0.0), 0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((hz_norm_interval(c(0.5, 1.0), 0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((hz_norm_interval(c(-1.0, 0.0), 0.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_norm_matches_dense_sampling() {
        let cases = [(0.0, c(3.0, 0.5), 1.0, 4.0), (-1.0, c(2.0, 2.0), 0.5, 6.0), (0.5, c(-2.0, 0.1), 1.0, 2.0), (10.0, c(1.0, -3.0), 0.0, 5.0)];
        for (w, z, a, b) in cases {
            let exact = h_norm_interval(w, z, a, b);
            let sampled = (0..=200_000)
                .map(|i| a + (b - a) * i as f64 / 200_000.0)
                .map(|x| (x - w).abs() / (c(x, 0.0) - z).norm())
                .fold(0.0f64, f64::max);
            assert!(exact >= sampled * (1.0 - 1e-12));
            assert!((exact - sampled).abs() <= 1e-6 * exact, "{exact} vs {sampled}");
        }
    }

    #[test]
    fn region_boundary_example() {
        let s = SpectrumSet::interval(1.0, 2.0).unwrap();
        assert!(region_membership(0.0, &s, 1.0, c(4.0, 0.0)));
        assert!(!region_membership(0.0, &s, 1.0, c(4.1, 0.0)));
        assert!(region_membership(0.0, &s, 1.0, c(3.9, 0.0)));
    }
}
