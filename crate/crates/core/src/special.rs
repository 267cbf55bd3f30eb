//! Legendre polynomials, Gauss–Legendre quadrature and Riccati–Bessel functions.

use std::f64::consts::PI;

/// `P_n(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// `P_0(x) ..= P_n(x)` written into `out` (resized to `n + 1`).
pub fn legendre_all(n: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(x);
    for k in 1..n {
        let kf = k as f64;
        let p = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(p);
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let (pn, pm) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            if n == 1 {
                dp = 1.0;
            }
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    (x.iter().map(|&t| m + h * t).collect(), w.iter().map(|&v| h * v).collect())
}

/// Riccati–Bessel functions `ĵ_l(x) = x j_l(x)` and `ŷ_l(x) = x y_l(x)` for
/// `l = 0..=lmax`, with `ĵ_l ~ sin(x − lπ/2)` and `ŷ_l ~ −cos(x − lπ/2)`.
pub fn riccati_bessel(lmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(x > 0.0, "Riccati-Bessel argument must be positive");
    let (s, c) = x.sin_cos();

    let mut y = Vec::with_capacity(lmax + 1);
    y.push(-c);
    if lmax >= 1 {
        y.push(-c / x - s);
    }
    for l in 1..lmax {
        let v = (2.0 * l as f64 + 1.0) / x * y[l] - y[l - 1];
        y.push(v);
    }

    // Upward recurrence is stable for l < x; above that use Miller's
    // downward recurrence normalised to the upward value at the seam.
    let mut j = Vec::with_capacity(lmax + 1);
    j.push(s);
    if lmax >= 1 {
        j.push(s / x - c);
    }
    let seam = lmax.min((x as usize).max(1));
    for l in 1..seam {
        let v = (2.0 * l as f64 + 1.0) / x * j[l] - j[l - 1];
        j.push(v);
    }
    if lmax > seam {
        j.resize(lmax + 1, 0.0);
        let start = lmax + 20 + (10.0 * (lmax as f64).sqrt()) as usize;
        let mut down = vec![0.0; lmax + 1];
        let (mut f_up, mut f) = (0.0f64, 1e-300f64);
        for l in (seam..=start).rev() {
            if l <= lmax {
                down[l] = f;
            }
            let f_down = (2.0 * l as f64 + 1.0) / x * f - f_up;
            f_up = f;
            f = f_down;
            if f.abs() > 1e250 {
                f *= 1e-250;
                f_up *= 1e-250;
                for v in down.iter_mut() {
                    *v *= 1e-250;
                }
            }
        }
        // match on whichever of l = seam-1, seam is larger
        let (anchor, value) = if j[seam - 1].abs() > j[seam].abs() { (seam - 1, f) } else { (seam, down[seam]) };
        let norm = j[anchor] / value;
        for l in seam + 1..=lmax {
            j[l] = down[l] * norm;
        }
    }
    (j, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_closed_forms() {
        for &x in &[-1.0, -0.3, 0.0, 0.45, 1.0] {
            assert!((legendre(2, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
            assert!((legendre(3, x) - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
            let mut all = Vec::new();
            legendre_all(12, x, &mut all);
            for (n, p) in all.iter().enumerate() {
                assert!((p - legendre(n, x)).abs() < 1e-14);
            }
        }
        assert!((legendre(50, 1.0) - 1.0).abs() < 1e-12);
        assert!((legendre(51, -1.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-12, "n={n} p={p}: {q} vs {exact}");
            }
        }
        let (x, w) = gauss_legendre_on(20, 0.0, PI);
        let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.sin()).sum();
        assert!((q - 2.0).abs() < 1e-13);
    }

    #[test]
    fn riccati_bessel_low_orders() {
        for &x in &[0.3, 1.0, 4.7, 25.0, 300.0] {
            let (j, y) = riccati_bessel(3, x);
            let (s, c) = (x.sin(), x.cos());
            let j2 = (3.0 / (x * x) - 1.0) * s - 3.0 * c / x;
            let y2 = -(3.0 / (x * x) - 1.0) * c - 3.0 * s / x;
            assert!((j[0] - s).abs() < 1e-12);
            assert!((j[1] - (s / x - c)).abs() < 1e-12);
            assert!((j[2] - j2).abs() < 1e-11 * j2.abs().max(1.0), "x={x}");
            assert!((y[2] - y2).abs() < 1e-11 * y2.abs().max(1.0));
        }
    }

    #[test]
    fn riccati_bessel_wronskian() {
        // ĵ_l ŷ_{l-1} − ĵ_{l-1} ŷ_l = 1
        for &x in &[0.8, 5.0, 40.0, 600.0] {
            let lmax = 700;
            let (j, y) = riccati_bessel(lmax, x);
            for l in 1..=lmax {
                let w = j[l] * y[l - 1] - j[l - 1] * y[l];
                if y[l].abs() > 1e200 {
                    break;
                }
                assert!((w - 1.0).abs() < 1e-8, "x={x} l={l} w={w}");
            }
        }
    }
}
