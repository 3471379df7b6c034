//! Finite-difference residuals of the minimal graph equations and
//! boundary-decay diagnostics.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::SurfaceMesh;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResidualError {
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("window does not meet the grid near x = 0")]
    WindowOutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `t = u(x, y)`.
    Vertical,
    /// `y = v(x, t)`.
    Horizontal,
}

/// Samples on a uniform grid; `values[[i, j]]` sits at `(x0 + i·hx, c0 + j·hc)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction<T> {
    pub orientation: Orientation,
    pub x: (T, T),
    pub c: (T, T),
    pub values: Array2<T>,
}

impl<T: Scalar> GraphFunction<T> {
    pub fn new(orientation: Orientation, x: (T, T), c: (T, T), values: Array2<T>) -> Result<Self, ResidualError> {
        let (nx, nc) = values.dim();
        if nx < 2 || nc < 2 {
            return Err(ResidualError::ShapeError(format!("grid {nx}x{nc} too small")));
        }
        if !(x.0 >= T::zero() && x.1 > x.0 && c.1 > c.0) {
            return Err(ResidualError::ShapeError("need 0 ≤ x0 < x1 and c0 < c1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ResidualError::ShapeError("non-finite sample".into()));
        }
        Ok(Self { orientation, x, c, values })
    }

    pub fn sample(
        orientation: Orientation,
        x: (T, T),
        c: (T, T),
        nx: usize,
        nc: usize,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self, ResidualError> {
        if nx < 2 || nc < 2 {
            return Err(ResidualError::ShapeError(format!("grid {nx}x{nc} too small")));
        }
        let hx = (x.1 - x.0) / T::from_usize_lossy(nx - 1);
        let hc = (c.1 - c.0) / T::from_usize_lossy(nc - 1);
        let values = Array2::from_shape_fn((nx, nc), |(i, j)| f(x.0 + hx * T::from_usize_lossy(i), c.0 + hc * T::from_usize_lossy(j)));
        Self::new(orientation, x, c, values)
    }

    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn spacing(&self) -> (T, T) {
        let (nx, nc) = self.dim();
        (
            (self.x.1 - self.x.0) / T::from_usize_lossy(nx - 1),
            (self.c.1 - self.c.0) / T::from_usize_lossy(nc - 1),
        )
    }

    pub fn xi(&self, i: usize) -> T {
        self.x.0 + self.spacing().0 * T::from_usize_lossy(i)
    }

    pub fn cj(&self, j: usize) -> T {
        self.c.0 + self.spacing().1 * T::from_usize_lossy(j)
    }
}

/// Residual samples on a sub-grid of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub sup_norm: T,
    pub l2_norm: T,
    /// `(i, j, residual)` per evaluated node.
    pub cells: Vec<(usize, usize, T)>,
    pub spacing: (T, T),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub sup: f64,
    pub l2: f64,
    pub h: (f64, f64),
}

impl<T: Scalar> ResidualReport<T> {
    fn from_cells(cells: Vec<(usize, usize, T)>, spacing: (T, T)) -> Self {
        let sup_norm = cells.iter().fold(T::zero(), |m, c| m.max(c.2.abs()));
        let l2_norm = (cells.iter().fold(T::zero(), |s, c| s + c.2 * c.2) * spacing.0 * spacing.1).sqrt();
        Self {
            sup_norm,
            l2_norm,
            cells,
            spacing,
        }
    }

    pub fn summary(&self) -> ResidualSummary {
        ResidualSummary {
            sup: self.sup_norm.as_f64(),
            l2: self.l2_norm.as_f64(),
            h: (self.spacing.0.as_f64(), self.spacing.1.as_f64()),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,residual\n");
        for (i, j, r) in &self.cells {
            let _ = writeln!(s, "{i},{j},{:e}", r.as_f64());
        }
        s
    }
}

/// First and second derivatives at a node: `(f_x, f_c, f_xx, f_cc, f_xc)`.
/// One-sided second-order stencils in `x` at `i = 0`.
pub(crate) fn derivatives<T: Scalar>(v: &Array2<T>, i: usize, j: usize, hx: T, hc: T) -> [T; 5] {
    let two = T::two();
    let (fx, fxx) = if i == 0 {
        (
            (-T::lit(3.0) * v[[0, j]] + T::lit(4.0) * v[[1, j]] - v[[2, j]]) / (two * hx),
            (two * v[[0, j]] - T::lit(5.0) * v[[1, j]] + T::lit(4.0) * v[[2, j]] - v[[3, j]]) / (hx * hx),
        )
    } else {
        (
            (v[[i + 1, j]] - v[[i - 1, j]]) / (two * hx),
            (v[[i + 1, j]] - two * v[[i, j]] + v[[i - 1, j]]) / (hx * hx),
        )
    };
    let fc = (v[[i, j + 1]] - v[[i, j - 1]]) / (two * hc);
    let fcc = (v[[i, j + 1]] - two * v[[i, j]] + v[[i, j - 1]]) / (hc * hc);
    let fxc = if i == 0 {
        let d = |k: usize| (v[[k, j + 1]] - v[[k, j - 1]]) / (two * hc);
        (-T::lit(3.0) * d(0) + T::lit(4.0) * d(1) - d(2)) / (two * hx)
    } else {
        (v[[i + 1, j + 1]] - v[[i + 1, j - 1]] - v[[i - 1, j + 1]] + v[[i - 1, j - 1]]) / (T::lit(4.0) * hx * hc)
    };
    [fx, fc, fxx, fcc, fxc]
}

/// `u_xx(1+x²u_y²) + u_yy(1+x²u_x²) − 2x²u_xy u_x u_y − x u_x(u_x²+u_y²)`.
pub fn vertical_operator<T: Scalar>(x: T, d: [T; 5]) -> T {
    let [ux, uy, uxx, uyy, uxy] = d;
    let x2 = x * x;
    uxx * (T::one() + x2 * uy * uy) + uyy * (T::one() + x2 * ux * ux) - T::two() * x2 * uxy * ux * uy - x * ux * (uy * uy + ux * ux)
}

/// `v_xx(x²+v_t²) + v_tt(1+v_x²) − 2v_xt v_x v_t − x v_x(1+v_x²)`.
pub fn horizontal_operator<T: Scalar>(x: T, d: [T; 5]) -> T {
    let [vx, vt, vxx, vtt, vxt] = d;
    vxx * (x * x + vt * vt) + vtt * (T::one() + vx * vx) - T::two() * vxt * vx * vt - x * vx * (T::one() + vx * vx)
}

fn check_orientation<T: Scalar>(g: &GraphFunction<T>, o: Orientation) -> Result<(), ResidualError> {
    let (nx, nc) = g.dim();
    if g.orientation != o {
        return Err(ResidualError::ShapeError(format!("expected {o:?} graph")));
    }
    if nx < 4 || nc < 3 {
        return Err(ResidualError::ShapeError(format!("grid {nx}x{nc} has no interior")));
    }
    Ok(())
}

/// Residual on interior nodes, plus the `x = 0` column when the grid reaches it.
pub fn vertical_residual<T: Scalar>(u: &GraphFunction<T>) -> Result<ResidualReport<T>, ResidualError> {
    check_orientation(u, Orientation::Vertical)?;
    let (nx, nc) = u.dim();
    let (hx, hc) = u.spacing();
    let first = if u.x.0 == T::zero() { 0 } else { 1 };
    let mut cells = Vec::with_capacity(nx * nc);
    for i in first..nx - 1 {
        let x = u.xi(i);
        for j in 1..nc - 1 {
            cells.push((i, j, vertical_operator(x, derivatives(&u.values, i, j, hx, hc))));
        }
    }
    Ok(ResidualReport::from_cells(cells, (hx, hc)))
}

/// Residual on interior nodes with `x > 0`.
pub fn horizontal_residual<T: Scalar>(v: &GraphFunction<T>) -> Result<ResidualReport<T>, ResidualError> {
    check_orientation(v, Orientation::Horizontal)?;
    let (nx, nc) = v.dim();
    let (hx, hc) = v.spacing();
    let mut cells = Vec::with_capacity(nx * nc);
    for i in 1..nx - 1 {
        let x = v.xi(i);
        if !(x > T::zero()) {
            continue;
        }
        for j in 1..nc - 1 {
            cells.push((i, j, horizontal_operator(x, derivatives(&v.values, i, j, hx, hc))));
        }
    }
    Ok(ResidualReport::from_cells(cells, (hx, hc)))
}

fn window_rows<T: Scalar>(v: &GraphFunction<T>, window: (T, T)) -> Result<Vec<usize>, ResidualError> {
    if v.orientation != Orientation::Horizontal {
        return Err(ResidualError::ShapeError("expected Horizontal graph".into()));
    }
    if !(v.x.0 == T::zero() || v.x.0 < T::lit(0.01)) {
        return Err(ResidualError::WindowOutOfRange);
    }
    let rows: Vec<usize> = (0..v.dim().1).filter(|j| v.cj(*j) >= window.0 && v.cj(*j) <= window.1).collect();
    if rows.is_empty() {
        return Err(ResidualError::WindowOutOfRange);
    }
    Ok(rows)
}

/// `max |v(x, t)|/x` over the three smallest positive grid columns and `t` in the window.
pub fn lipschitz_constant<T: Scalar>(v: &GraphFunction<T>, t_window: (T, T)) -> Result<T, ResidualError> {
    let rows = window_rows(v, t_window)?;
    let cols: Vec<usize> = (0..v.dim().0).filter(|i| v.xi(*i) > T::zero()).take(3).collect();
    let mut m = T::zero();
    for i in cols {
        for j in &rows {
            m = m.max(v.values[[i, *j]].abs() / v.xi(i));
        }
    }
    Ok(m)
}

/// Table `[p][q] = sup |(x∂x)^p ∂t^q v| / x` for `p, q ≤ 2`, sampled on
/// roughly log-spaced columns `x ≈ x_max·2^{-k}` and `t` in the window.
pub fn conormal_diagnostic<T: Scalar>(v: &GraphFunction<T>, orders: (usize, usize), t_window: (T, T)) -> Result<Vec<Vec<T>>, ResidualError> {
    if orders.0 > 2 || orders.1 > 2 {
        return Err(ResidualError::ShapeError("orders are limited to p, q ≤ 2".into()));
    }
    let rows: Vec<usize> = window_rows(v, t_window)?.into_iter().filter(|j| *j >= 1 && *j + 1 < v.dim().1).collect();
    if rows.is_empty() {
        return Err(ResidualError::WindowOutOfRange);
    }
    let (nx, nc) = v.dim();
    let (hx, hc) = v.spacing();
    // t-derivatives of order q, then the x∂x iterates by central differences
    let mut dt = vec![v.values.clone()];
    for q in 1..=orders.1 {
        let prev = &dt[q - 1];
        let mut next = Array2::from_elem((nx, nc), T::zero());
        for i in 0..nx {
            for j in 1..nc - 1 {
                next[[i, j]] = if q == 1 {
                    (prev[[i, j + 1]] - prev[[i, j - 1]]) / (T::two() * hc)
                } else {
                    (v.values[[i, j + 1]] - T::two() * v.values[[i, j]] + v.values[[i, j - 1]]) / (hc * hc)
                };
            }
        }
        dt.push(next);
    }
    let mut cols = Vec::new();
    let mut target = v.x.1;
    while target > hx * T::lit(1.5) {
        let i = ((target - v.x.0) / hx).round().to_usize().unwrap_or(0).clamp(1, nx - 2);
        if v.xi(i) > T::zero() && !cols.contains(&i) {
            cols.push(i);
        }
        target = target * T::half();
    }
    if cols.is_empty() {
        return Err(ResidualError::ShapeError("grid too coarse for conormal sampling".into()));
    }
    let mut table = vec![vec![T::zero(); orders.1 + 1]; orders.0 + 1];
    for (q, f) in dt.iter().enumerate() {
        for &i in &cols {
            let x = v.xi(i);
            for &j in &rows {
                let fx = (f[[i + 1, j]] - f[[i - 1, j]]) / (T::two() * hx);
                let fxx = (f[[i + 1, j]] - T::two() * f[[i, j]] + f[[i - 1, j]]) / (hx * hx);
                let ops = [f[[i, j]], x * fx, x * fx + x * x * fxx];
                for p in 0..=orders.0 {
                    table[p][q] = table[p][q].max(ops[p].abs() / x);
                }
            }
        }
    }
    Ok(table)
}

/// Normal component of the mean-curvature vector of a structured-grid mesh,
/// by index-space central differences, on interior nodes.
pub fn mesh_mean_curvature<T: Scalar>(m: &SurfaceMesh<T>) -> Result<ResidualReport<T>, ResidualError> {
    let (nu, nv) = m.grid.ok_or_else(|| ResidualError::ShapeError("mesh has no grid".into()))?;
    if nu < 3 || nv < 3 {
        return Err(ResidualError::ShapeError("grid has no interior".into()));
    }
    let at = |i: usize, j: usize| {
        let p = &m.vertices[i * nv + j];
        [p.base.x(), p.base.y(), p.t]
    };
    let mut cells = Vec::with_capacity(nu * nv);
    let two = T::two();
    let four = T::lit(4.0);
    for i in 1..nu - 1 {
        for j in 1..nv - 1 {
            let c = at(i, j);
            let (ip, im, jp, jm) = (at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1));
            let (pp, pm, mp, mm) = (at(i + 1, j + 1), at(i + 1, j - 1), at(i - 1, j + 1), at(i - 1, j - 1));
            let mut xu = [T::zero(); 3];
            let mut xv = [T::zero(); 3];
            let mut xuu = [T::zero(); 3];
            let mut xvv = [T::zero(); 3];
            let mut xuv = [T::zero(); 3];
            for k in 0..3 {
                xu[k] = (ip[k] - im[k]) / two;
                xv[k] = (jp[k] - jm[k]) / two;
                xuu[k] = ip[k] - two * c[k] + im[k];
                xvv[k] = jp[k] - two * c[k] + jm[k];
                xuv[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / four;
            }
            let x = c[0];
            let w = (x * x).recip();
            let g = |a: &[T; 3], b: &[T; 3]| w * (a[0] * b[0] + a[1] * b[1]) + a[2] * b[2];
            let (guu, guv, gvv) = (g(&xu, &xu), g(&xu, &xv), g(&xv, &xv));
            let det = guu * gvv - guv * guv;
            let (iuu, iuv, ivv) = (gvv / det, -guv / det, guu / det);
            let gamma = |a: &[T; 3], b: &[T; 3]| {
                [
                    (-a[0] * b[0] + a[1] * b[1]) / x,
                    -(a[0] * b[1] + a[1] * b[0]) / x,
                    T::zero(),
                ]
            };
            let (guu_, guv_, gvv_) = (gamma(&xu, &xu), gamma(&xu, &xv), gamma(&xv, &xv));
            let mut h = [T::zero(); 3];
            for k in 0..3 {
                h[k] = iuu * (xuu[k] + guu_[k]) + two * iuv * (xuv[k] + guv_[k]) + ivv * (xvv[k] + gvv_[k]);
            }
            let n = [
                xu[1] * xv[2] - xu[2] * xv[1],
                xu[2] * xv[0] - xu[0] * xv[2],
                xu[0] * xv[1] - xu[1] * xv[0],
            ];
            let norm = (x * x * (n[0] * n[0] + n[1] * n[1]) + n[2] * n[2]).sqrt();
            let r = (n[0] * h[0] + n[1] * h[1] + n[2] * h[2]) / norm;
            cells.push((i, j, r));
        }
    }
    Ok(ResidualReport::from_cells(cells, (T::one(), T::one())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vert(f: impl Fn(f64, f64) -> f64, n: usize) -> GraphFunction<f64> {
        GraphFunction::sample(Orientation::Vertical, (0.0, 0.5), (-0.5, 0.5), n, n, f).unwrap()
    }

    fn horiz(f: impl Fn(f64, f64) -> f64, n: usize) -> GraphFunction<f64> {
        GraphFunction::sample(Orientation::Horizontal, (0.0, 1.0), (-1.0, 1.0), n, n, f).unwrap()
    }

    #[test]
    fn constants_and_zero() {
        assert_eq!(vertical_residual(&vert(|_, _| 7.0, 16)).unwrap().sup_norm, 0.0);
        assert_eq!(horizontal_residual(&horiz(|_, _| 0.0, 16)).unwrap().sup_norm, 0.0);
    }

    #[test]
    fn non_minimal_cases() {
        let r = vertical_residual(&vert(|x, y| x * x + y * y, 16)).unwrap();
        assert!(r.cells.iter().filter(|c| c.0 > 0).all(|c| c.2.abs() > 1e-3));
        let g = horiz(|x, _| x, 11);
        let r = horizontal_residual(&g).unwrap();
        for (i, _, v) in &r.cells {
            assert!((v + 2.0 * g.xi(*i)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_solution_converges() {
        let u = |x: f64, y: f64| (2.0 * x / (1.0 - x * x - y * y)).asinh();
        let g = |n| GraphFunction::sample(Orientation::Vertical, (0.0, 0.25), (-0.25, 0.25), n, n, u).unwrap();
        let r1 = vertical_residual(&g(65)).unwrap().sup_norm;
        let r2 = vertical_residual(&g(129)).unwrap().sup_norm;
        assert!(r2 < 1e-4, "{r2}");
        let ratio = r1 / r2;
        assert!((3.2..=4.8).contains(&ratio), "{ratio}");
    }

    #[test]
    fn lipschitz_and_conormal() {
        let g = horiz(|x, _| 3.0 * x, 33);
        assert!((lipschitz_constant(&g, (-0.5, 0.5)).unwrap() - 3.0).abs() < 1e-12);
        let t = conormal_diagnostic(&g, (2, 2), (-0.5, 0.5)).unwrap();
        assert!((t[0][0] - 3.0).abs() < 1e-12);
        assert!((t[1][0] - 3.0).abs() < 1e-12);
        assert!(t[0][1].abs() < 1e-12 && t[0][2].abs() < 1e-12);
        let z = horiz(|_, _| 0.0, 33);
        assert_eq!(lipschitz_constant(&z, (-0.5, 0.5)).unwrap(), 0.0);
        assert!(conormal_diagnostic(&z, (2, 2), (-0.5, 0.5)).unwrap().iter().flatten().all(|v| *v == 0.0));
        let far = GraphFunction::sample(Orientation::Horizontal, (0.5, 1.0), (-1.0, 1.0), 8, 8, |_, _| 0.0).unwrap();
        assert_eq!(lipschitz_constant(&far, (-0.5, 0.5)), Err(ResidualError::WindowOutOfRange));
    }

    #[test]
    fn translation_invariance() {
        let u = |x: f64, y: f64| (x + 0.3).sin() * y.cos();
        let a = vertical_residual(&vert(u, 17)).unwrap();
        let b = vertical_residual(&vert(|x, y| u(x, y) + 4.0, 17)).unwrap();
        assert!((a.sup_norm - b.sup_norm).abs() < 1e-9);
    }
}
