//! Dirichlet problem for vertical minimal graphs `t = u(x, y)` on a half-plane
//! rectangle `[0, X] × [y0, y1]`, with the `x = 0` edge carrying ideal data.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::residual::{vertical_operator, GraphFunction, Orientation};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlateauError {
    #[error("boundary data disagree at corner {corner} by {mismatch:e}")]
    IllPosedData { corner: &'static str, mismatch: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("Newton iteration stalled after {iterations} steps with residual {residual:e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<SolveResult<f64>>,
    },
    #[error("singular Jacobian at row {0}")]
    Singular(usize),
    #[error("solution has not converged")]
    NotConverged,
}

/// Data along one edge, as a function of the point `(x, y)` on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeData {
    Constant { value: f64 },
    /// Node values in order of increasing coordinate along the edge.
    Sampled { values: Vec<f64> },
    /// The `C = 1` tall-rectangle graph `asinh(2x / (1 − x² − y²))`.
    UnitTall,
    /// `height · exp(1 − 1/(1 − r²))`, `r = (y − center)/width`, zero for `|r| ≥ 1`.
    Bump { center: f64, width: f64, height: f64 },
}

impl EdgeData {
    fn eval(&self, x: f64, y: f64, k: usize, n: usize) -> Result<f64, PlateauError> {
        Ok(match self {
            EdgeData::Constant { value } => *value,
            EdgeData::Sampled { values } => {
                if values.len() != n {
                    return Err(PlateauError::InvalidProblem(format!("edge has {} samples, grid needs {n}", values.len())));
                }
                values[k]
            }
            EdgeData::UnitTall => unit_tall(x, y),
            EdgeData::Bump { center, width, height } => bump((y - center) / width) * height,
        })
    }
}

pub fn unit_tall(x: f64, y: f64) -> f64 {
    (2.0 * x / (1.0 - x * x - y * y)).asinh()
}

fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edges {
    /// `x = 0`, the ideal boundary.
    pub ideal: EdgeData,
    pub outer: EdgeData,
    pub bottom: EdgeData,
    pub top: EdgeData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletProblem {
    /// `(X, (y0, y1))`.
    pub x_max: f64,
    pub y: (f64, f64),
    /// Node counts `(nx, ny)`, boundary included.
    pub grid: (usize, usize),
    pub edges: Edges,
}

impl DirichletProblem {
    pub fn uniform(x_max: f64, y: (f64, f64), grid: (usize, usize), data: EdgeData) -> Self {
        Self {
            x_max,
            y,
            grid,
            edges: Edges {
                ideal: data.clone(),
                outer: data.clone(),
                bottom: data.clone(),
                top: data,
            },
        }
    }

    /// Sample all four edges from one function of `(x, y)`.
    pub fn from_fn(x_max: f64, y: (f64, f64), grid: (usize, usize), f: impl Fn(f64, f64) -> f64) -> Self {
        let (nx, ny) = grid;
        let xs = |i: usize| x_max * i as f64 / (nx - 1) as f64;
        let ys = |j: usize| y.0 + (y.1 - y.0) * j as f64 / (ny - 1) as f64;
        let col = |x: f64| EdgeData::Sampled {
            values: (0..ny).map(|j| f(x, ys(j))).collect(),
        };
        let row = |yy: f64| EdgeData::Sampled {
            values: (0..nx).map(|i| f(xs(i), yy)).collect(),
        };
        Self {
            x_max,
            y,
            grid,
            edges: Edges {
                ideal: col(0.0),
                outer: col(x_max),
                bottom: row(y.0),
                top: row(y.1),
            },
        }
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.x_max / (self.grid.0 - 1) as f64, (self.y.1 - self.y.0) / (self.grid.1 - 1) as f64)
    }

    /// Boundary values on the full grid; interior entries are zero.
    pub fn boundary_grid(&self) -> Result<Array2<f64>, PlateauError> {
        let (nx, ny) = self.grid;
        if nx < 16 || ny < 16 {
            return Err(PlateauError::InvalidProblem(format!("grid {nx}x{ny} is below 16x16")));
        }
        if !(self.x_max > 0.0) || !(self.y.1 > self.y.0) {
            return Err(PlateauError::InvalidProblem("need X > 0 and y0 < y1".into()));
        }
        let (hx, hy) = self.spacing();
        let x = |i: usize| hx * i as f64;
        let y = |j: usize| self.y.0 + hy * j as f64;
        let e = &self.edges;
        let corners = [
            ("(0, y0)", e.ideal.eval(0.0, self.y.0, 0, ny)?, e.bottom.eval(0.0, self.y.0, 0, nx)?),
            ("(0, y1)", e.ideal.eval(0.0, self.y.1, ny - 1, ny)?, e.top.eval(0.0, self.y.1, 0, nx)?),
            ("(X, y0)", e.outer.eval(self.x_max, self.y.0, 0, ny)?, e.bottom.eval(self.x_max, self.y.0, nx - 1, nx)?),
            ("(X, y1)", e.outer.eval(self.x_max, self.y.1, ny - 1, ny)?, e.top.eval(self.x_max, self.y.1, nx - 1, nx)?),
        ];
        for (corner, a, b) in corners {
            let mismatch = (a - b).abs();
            if !(mismatch < 1e-9) {
                return Err(PlateauError::IllPosedData { corner, mismatch });
            }
        }
        let mut g = Array2::zeros((nx, ny));
        for j in 0..ny {
            g[[0, j]] = e.ideal.eval(0.0, y(j), j, ny)?;
            g[[nx - 1, j]] = e.outer.eval(self.x_max, y(j), j, ny)?;
        }
        for i in 0..nx {
            g[[i, 0]] = e.bottom.eval(x(i), self.y.0, i, nx)?;
            g[[i, ny - 1]] = e.top.eval(x(i), self.y.1, i, nx)?;
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(PlateauError::InvalidProblem("non-finite boundary value".into()));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// Transfinite (Coons) interpolation of the four edges.
    Coons,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial: InitialGuess,
    /// Fall back to continuation in the data amplitude when plain Newton stalls.
    pub continuation: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            initial: InitialGuess::Coons,
            continuation: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub solution: GraphFunction<T>,
    pub iterations: usize,
    /// Sup-norm of the discrete residual at the returned iterate.
    pub final_residual: T,
    pub converged: bool,
    /// Residual sup-norm before each step, ending with `final_residual`.
    pub history: Vec<T>,
}

pub fn solve<T: Scalar>(p: &DirichletProblem, tol: f64, max_iter: usize) -> Result<SolveResult<T>, PlateauError> {
    solve_with(
        p,
        &SolveOptions {
            tol,
            max_iter,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_with<T: Scalar>(p: &DirichletProblem, opts: &SolveOptions) -> Result<SolveResult<T>, PlateauError> {
    if !(opts.tol > 0.0) {
        return Err(PlateauError::InvalidProblem("tolerance must be positive".into()));
    }
    let data: Array2<T> = p.boundary_grid()?.mapv(T::lit);
    let tol = T::lit(opts.tol);
    let (nx, ny) = p.grid;
    let (hx, hy) = p.spacing();
    let sys = System {
        nx,
        ny,
        hx: T::lit(hx),
        hy: T::lit(hy),
    };
    let seed = match opts.initial {
        InitialGuess::Coons => coons(&data),
        InitialGuess::Zero => data.clone(),
    };
    let mut run = sys.newton(seed, tol, opts.max_iter)?;
    if run.sup >= tol && opts.continuation {
        if let Some(c) = sys.continuation(&data, tol, opts.max_iter.saturating_sub(run.iterations))? {
            let mut history = run.history;
            history.extend(c.history);
            run = Newton {
                iterations: run.iterations + c.iterations,
                history,
                ..c
            };
        }
    }
    let Newton { u, sup, iterations, history } = run;
    let converged = sup < tol;
    if !converged {
        return Err(PlateauError::NonConvergence {
            iterations,
            residual: sup.as_f64(),
            best: Box::new(SolveResult {
                solution: GraphFunction {
                    orientation: Orientation::Vertical,
                    x: (0.0, p.x_max),
                    c: p.y,
                    values: u.mapv(|v| v.as_f64()),
                },
                iterations,
                final_residual: sup.as_f64(),
                converged,
                history: history.iter().map(|v| v.as_f64()).collect(),
            }),
        });
    }
    Ok(SolveResult {
        solution: GraphFunction::new(Orientation::Vertical, (T::zero(), T::lit(p.x_max)), (T::lit(p.y.0), T::lit(p.y.1)), u)
            .map_err(|e| PlateauError::InvalidProblem(e.to_string()))?,
        iterations,
        final_residual: sup,
        converged,
        history,
    })
}

/// Transfinite interpolation of the boundary values of `b` into the interior.
fn coons<T: Scalar>(b: &Array2<T>) -> Array2<T> {
    let (nx, ny) = b.dim();
    let mut u = b.clone();
    let one = T::one();
    for i in 1..nx - 1 {
        let s = T::from_usize_lossy(i) / T::from_usize_lossy(nx - 1);
        for j in 1..ny - 1 {
            let r = T::from_usize_lossy(j) / T::from_usize_lossy(ny - 1);
            u[[i, j]] = (one - s) * b[[0, j]] + s * b[[nx - 1, j]] + (one - r) * b[[i, 0]] + r * b[[i, ny - 1]]
                - ((one - s) * (one - r) * b[[0, 0]] + s * (one - r) * b[[nx - 1, 0]] + (one - s) * r * b[[0, ny - 1]] + s * r * b[[nx - 1, ny - 1]]);
        }
    }
    u
}

/// The ideal-edge row `u(0, y_j)` of a converged solve.
pub fn boundary_trace<T: Scalar>(r: &SolveResult<T>) -> Result<Vec<T>, PlateauError> {
    if !r.converged {
        return Err(PlateauError::NotConverged);
    }
    Ok(r.solution.values.row(0).to_vec())
}

fn sup_norm<T: Scalar>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

fn l2_norm<T: Scalar>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |s, v| s + *v * *v).sqrt()
}

struct Newton<T> {
    u: Array2<T>,
    sup: T,
    iterations: usize,
    history: Vec<T>,
}

struct System<T> {
    nx: usize,
    ny: usize,
    hx: T,
    hy: T,
}

impl<T: Scalar> System<T> {
    fn m(&self) -> usize {
        self.ny - 2
    }

    fn index(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.m() + (j - 1)
    }

    /// Damped Newton with Armijo backtracking on the residual l2-norm.
    fn newton(&self, mut u: Array2<T>, tol: T, max_iter: usize) -> Result<Newton<T>, PlateauError> {
        let mut res = self.residual(&u);
        let mut sup = sup_norm(&res);
        let mut history = vec![sup];
        let mut iterations = 0;
        while sup >= tol && iterations < max_iter {
            let mut delta: Vec<T> = res.iter().map(|r| -*r).collect();
            self.jacobian(&u).solve(&mut delta)?;
            let l2 = l2_norm(&res);
            let mut lambda = T::one();
            let accepted = loop {
                let trial = self.update(&u, &delta, lambda);
                let r = self.residual(&trial);
                if l2_norm(&r) <= (T::one() - T::lit(1e-4) * lambda) * l2 {
                    break Some((trial, r));
                }
                lambda = lambda * T::half();
                if lambda < T::lit(1e-6) {
                    break None;
                }
            };
            iterations += 1;
            let Some((trial, r)) = accepted else { break };
            u = trial;
            res = r;
            sup = sup_norm(&res);
            history.push(sup);
        }
        Ok(Newton { u, sup, iterations, history })
    }

    /// Track the solution for data `s · g` from `s = 0` to `s = 1`.
    /// Ramp the data from zero; `budget` caps the Newton steps over all stages.
    fn continuation(&self, g: &Array2<T>, tol: T, budget: usize) -> Result<Option<Newton<T>>, PlateauError> {
        let (mut s, mut ds) = (T::zero(), T::lit(0.25));
        let mut u = Array2::<T>::zeros(g.dim());
        let (mut iterations, mut history) = (0, Vec::new());
        let loose = tol.max(T::lit(1e-6));
        while s < T::one() {
            if ds < T::lit(1e-3) || iterations >= budget {
                return Ok(None);
            }
            let next = (s + ds).min(T::one());
            let mut guess = if s > T::zero() { u.mapv(|v| v * next / s) } else { coons(g).mapv(|v| v * next) };
            self.set_boundary(&mut guess, g, next);
            let step = self.newton(guess, loose, 12.min(budget - iterations))?;
            iterations += step.iterations;
            if step.sup < loose {
                history.extend(step.history);
                u = step.u;
                s = next;
                ds = ds * T::lit(1.5);
            } else {
                ds = ds * T::half();
            }
        }
        let last = self.newton(u, tol, budget.saturating_sub(iterations))?;
        history.extend(last.history.iter().skip(1));
        Ok(Some(Newton {
            iterations: iterations + last.iterations,
            history,
            ..last
        }))
    }

    fn set_boundary(&self, u: &mut Array2<T>, g: &Array2<T>, s: T) {
        let (nx, ny) = (self.nx, self.ny);
        for ((i, j), v) in u.indexed_iter_mut() {
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                *v = g[[i, j]] * s;
            }
        }
    }

    fn derivs(&self, u: &Array2<T>, i: usize, j: usize) -> [T; 5] {
        let (hx, hy) = (self.hx, self.hy);
        [
            (u[[i + 1, j]] - u[[i - 1, j]]) / (T::two() * hx),
            (u[[i, j + 1]] - u[[i, j - 1]]) / (T::two() * hy),
            (u[[i + 1, j]] - T::two() * u[[i, j]] + u[[i - 1, j]]) / (hx * hx),
            (u[[i, j + 1]] - T::two() * u[[i, j]] + u[[i, j - 1]]) / (hy * hy),
            (u[[i + 1, j + 1]] - u[[i + 1, j - 1]] - u[[i - 1, j + 1]] + u[[i - 1, j - 1]]) / (T::lit(4.0) * hx * hy),
        ]
    }

    fn residual(&self, u: &Array2<T>) -> Vec<T> {
        let mut r = Vec::with_capacity((self.nx - 2) * self.m());
        for i in 1..self.nx - 1 {
            let x = self.hx * T::from_usize_lossy(i);
            for j in 1..self.ny - 1 {
                r.push(vertical_operator(x, self.derivs(u, i, j)));
            }
        }
        r
    }

    fn update(&self, u: &Array2<T>, delta: &[T], lambda: T) -> Array2<T> {
        let mut v = u.clone();
        for i in 1..self.nx - 1 {
            for j in 1..self.ny - 1 {
                v[[i, j]] = v[[i, j]] + lambda * delta[self.index(i, j)];
            }
        }
        v
    }

    fn jacobian(&self, u: &Array2<T>) -> Banded<T> {
        let m = self.m();
        let n = (self.nx - 2) * m;
        let mut a = Banded::new(n, m + 1);
        let (hx, hy) = (self.hx, self.hy);
        for i in 1..self.nx - 1 {
            let x = hx * T::from_usize_lossy(i);
            let x2 = x * x;
            for j in 1..self.ny - 1 {
                let [ux, uy, uxx, uyy, uxy] = self.derivs(u, i, j);
                let f_ux = T::two() * x2 * ux * uyy - T::two() * x2 * uxy * uy - x * (T::lit(3.0) * ux * ux + uy * uy);
                let f_uy = T::two() * x2 * uy * uxx - T::two() * x2 * uxy * ux - T::two() * x * ux * uy;
                let f_uxx = T::one() + x2 * uy * uy;
                let f_uyy = T::one() + x2 * ux * ux;
                let f_uxy = -T::two() * x2 * ux * uy;
                let row = self.index(i, j);
                let cx = f_uxx / (hx * hx);
                let cy = f_uyy / (hy * hy);
                let cd = f_uxy / (T::lit(4.0) * hx * hy);
                let taps = [
                    (0i64, 0i64, -(T::two()) * cx - T::two() * cy),
                    (1, 0, cx + f_ux / (T::two() * hx)),
                    (-1, 0, cx - f_ux / (T::two() * hx)),
                    (0, 1, cy + f_uy / (T::two() * hy)),
                    (0, -1, cy - f_uy / (T::two() * hy)),
                    (1, 1, cd),
                    (-1, -1, cd),
                    (1, -1, -cd),
                    (-1, 1, -cd),
                ];
                for (di, dj, c) in taps {
                    let (ii, jj) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    if ii == 0 || jj == 0 || ii == self.nx - 1 || jj == self.ny - 1 {
                        continue;
                    }
                    a.add(row, self.index(ii, jj), c);
                }
            }
        }
        a
    }
}

/// Square band matrix with `w` sub- and super-diagonals; LU without pivoting.
struct Banded<T> {
    n: usize,
    w: usize,
    data: Vec<T>,
}

impl<T: Scalar> Banded<T> {
    fn new(n: usize, w: usize) -> Self {
        Self {
            n,
            w,
            data: vec![T::zero(); n * (2 * w + 1)],
        }
    }

    fn at(&self, r: usize, c: usize) -> usize {
        r * (2 * self.w + 1) + (c + self.w - r)
    }

    fn add(&mut self, r: usize, c: usize, v: T) {
        let k = self.at(r, c);
        self.data[k] = self.data[k] + v;
    }

    fn solve(&mut self, b: &mut [T]) -> Result<(), PlateauError> {
        let (n, w) = (self.n, self.w);
        for k in 0..n {
            let piv = self.data[self.at(k, k)];
            if !(piv.abs() > T::min_positive_value()) {
                return Err(PlateauError::Singular(k));
            }
            let end = (k + w + 1).min(n);
            for r in k + 1..end {
                let ir = self.at(r, k);
                let f = self.data[ir] / piv;
                if f == T::zero() {
                    continue;
                }
                self.data[ir] = f;
                for c in k + 1..end {
                    let (src, dst) = (self.at(k, c), self.at(r, c));
                    self.data[dst] = self.data[dst] - f * self.data[src];
                }
                b[r] = b[r] - f * b[k];
            }
        }
        for k in (0..n).rev() {
            let end = (k + w + 1).min(n);
            let mut s = b[k];
            for c in k + 1..end {
                s = s - self.data[self.at(k, c)] * b[c];
            }
            b[k] = s / self.data[self.at(k, k)];
        }
        Ok(())
    }
}
