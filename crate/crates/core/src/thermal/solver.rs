//! Five-point finite-volume systems on structured grids and their iterative
//! solution.

use crate::error::{Error, Result};

/// Symmetric positive-definite five-point system on an `nx × ny` grid.
///
/// Unknowns are nodal temperature offsets from the Dirichlet value; inactive
/// nodes are held at zero. `gx[i + nx*j]` couples node `(i, j)` to
/// `(i + 1, j)`, `gy` couples `(i, j)` to `(i, j + 1)`. Couplings to inactive
/// nodes (and cut boundary links) contribute to `diag` only.
#[derive(Debug, Clone)]
pub struct StructuredSystem {
    pub nx: usize,
    pub ny: usize,
    pub active: Vec<bool>,
    pub diag: Vec<f64>,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `max_i |r_i / A_ii|`, in the units of the unknown.
    pub residual: f64,
    /// Euclidean norm of the Jacobi-scaled residual after each iteration.
    pub history: Vec<f64>,
}

impl StructuredSystem {
    pub fn new(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Self {
            nx,
            ny,
            active: vec![false; n],
            diag: vec![0.0; n],
            gx: vec![0.0; n],
            gy: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    /// Adds a link conductance between two nodes; links to inactive nodes
    /// only load the diagonal of the active end.
    pub fn link_x(&mut self, i: usize, j: usize, g: f64) {
        let a = self.idx(i, j);
        let b = self.idx(i + 1, j);
        self.couple(a, b, g, true);
    }

    pub fn link_y(&mut self, i: usize, j: usize, g: f64) {
        let a = self.idx(i, j);
        let b = self.idx(i, j + 1);
        self.couple(a, b, g, false);
    }

    fn couple(&mut self, a: usize, b: usize, g: f64, along_x: bool) {
        let (aa, ab) = (self.active[a], self.active[b]);
        if aa {
            self.diag[a] += g;
        }
        if ab {
            self.diag[b] += g;
        }
        if aa && ab {
            if along_x {
                self.gx[a] += g;
            } else {
                self.gy[a] += g;
            }
        }
    }

    /// `y = A x` restricted to active nodes.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = i + nx * j;
                if !self.active[k] {
                    y[k] = 0.0;
                    continue;
                }
                let mut v = self.diag[k] * x[k];
                if i + 1 < nx {
                    v -= self.gx[k] * x[k + 1];
                }
                if i > 0 {
                    v -= self.gx[k - 1] * x[k - 1];
                }
                if j + 1 < ny {
                    v -= self.gy[k] * x[k + nx];
                }
                if j > 0 {
                    v -= self.gy[k - nx] * x[k - nx];
                }
                y[k] = v;
            }
        }
    }

    /// Jacobi-scaled conjugate-residual iteration.
    ///
    /// The scaled system `D^{-1/2} A D^{-1/2}` is symmetric, so the Euclidean
    /// norm of its residual decreases monotonically. Iteration stops when
    /// `max_i |r_i / A_ii| < tol`.
    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
        let n = self.nx * self.ny;
        let s: Vec<f64> = (0..n)
            .map(|k| if self.active[k] && self.diag[k] > 0.0 { 1.0 / self.diag[k].sqrt() } else { 0.0 })
            .collect();
        if (0..n).any(|k| self.active[k] && !(self.diag[k] > 0.0)) {
            return Err(Error::config("active node without any conductance"));
        }
        let scaled = |x: &[f64], out: &mut [f64], tmp: &mut [f64], buf: &mut [f64]| {
            for k in 0..n {
                tmp[k] = s[k] * x[k];
            }
            self.apply(tmp, buf);
            for k in 0..n {
                out[k] = s[k] * buf[k];
            }
        };
        let stop = |r: &[f64]| -> f64 {
            (0..n).filter(|&k| self.active[k]).map(|k| (r[k] * s[k]).abs()).fold(0.0, f64::max)
        };

        let mut y = vec![0.0; n];
        let mut r: Vec<f64> = (0..n).map(|k| s[k] * self.rhs[k]).collect();
        let mut tmp = vec![0.0; n];
        let mut buf = vec![0.0; n];
        let mut ar = vec![0.0; n];
        scaled(&r, &mut ar, &mut tmp, &mut buf);
        let mut p = r.clone();
        let mut ap = ar.clone();
        let mut rar = dot(&r, &ar);
        let mut stats = SolveStats {
            iterations: 0,
            residual: stop(&r),
            history: vec![dot(&r, &r).sqrt()],
        };
        while stats.residual >= tol {
            if stats.iterations >= max_iter {
                return Err(Error::numerical(
                    "thermal_balance",
                    format!(
                        "heat solver did not converge in {max_iter} iterations (residual {:.3e} K, tolerance {tol:.3e} K)",
                        stats.residual
                    ),
                ));
            }
            let apap = dot(&ap, &ap);
            if apap == 0.0 {
                break;
            }
            let alpha = rar / apap;
            for k in 0..n {
                y[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            scaled(&r, &mut ar, &mut tmp, &mut buf);
            let rar_new = dot(&r, &ar);
            let beta = rar_new / rar;
            rar = rar_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
                ap[k] = ar[k] + beta * ap[k];
            }
            stats.iterations += 1;
            stats.residual = stop(&r);
            stats.history.push(dot(&r, &r).sqrt());
        }
        let x: Vec<f64> = (0..n).map(|k| s[k] * y[k]).collect();
        Ok((x, stats))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Series (harmonic) conductance factor `L / ∫ ds / k` along a straight
/// segment, sampled at `n` midpoints.
pub(crate) fn series_conductivity(k: impl Fn(f64, f64) -> f64, p: (f64, f64), q: (f64, f64), n: usize) -> f64 {
    let mut resist = 0.0;
    for m in 0..n {
        let t = (m as f64 + 0.5) / n as f64;
        resist += 1.0 / k(p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
    }
    n as f64 / resist
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D rod of unit conductance links with Dirichlet ends and a uniform source.
    #[test]
    fn rod_matches_discrete_parabola() {
        let n = 21;
        let mut sys = StructuredSystem::new(n, 1);
        for i in 1..n - 1 {
            sys.active[i] = true;
            sys.rhs[i] = 1.0;
        }
        for i in 0..n - 1 {
            sys.link_x(i, 0, 1.0);
        }
        let (x, stats) = sys.solve(1e-12, 1000).unwrap();
        for i in 0..n {
            let expect = 0.5 * i as f64 * (n - 1 - i) as f64;
            assert!((x[i] - expect).abs() < 1e-9, "{i}: {} vs {expect}", x[i]);
        }
        assert!(stats.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn zero_source_gives_zero() {
        let mut sys = StructuredSystem::new(5, 5);
        for j in 1..4 {
            for i in 1..4 {
                let k = sys.idx(i, j);
                sys.active[k] = true;
            }
        }
        for j in 0..5 {
            for i in 0..4 {
                sys.link_x(i, j, 1.0);
            }
        }
        for j in 0..4 {
            for i in 0..5 {
                sys.link_y(i, j, 1.0);
            }
        }
        let (x, stats) = sys.solve(1e-12, 100).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_numerical_error() {
        let n = 200;
        let mut sys = StructuredSystem::new(n, 1);
        for i in 1..n - 1 {
            sys.active[i] = true;
            sys.rhs[i] = 1.0;
        }
        for i in 0..n - 1 {
            sys.link_x(i, 0, 1.0);
        }
        match sys.solve(1e-12, 3) {
            Err(Error::Numerical { module, .. }) => assert_eq!(module, "thermal_balance"),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn series_conductivity_of_two_layers() {
        let k = |x: f64, _y: f64| if x < 0.5 { 1.0 } else { 3.0 };
        let g = series_conductivity(k, (0.0, 0.0), (1.0, 0.0), 64);
        // 1 / (0.5/1 + 0.5/3)
        assert!((g - 1.5).abs() < 1e-12);
    }
}
