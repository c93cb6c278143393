//! Grids, coordinate inversion and finite-difference residuals of the cubic
//! two-component CH system for closed-form solutions.
//!
//! All stencils are second-order central. `m_t` is the central t-difference
//! of `u - u_xx`, so the mixed derivative is central-t of central-xx.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chsym::ExactSolution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("map is not strictly monotone on [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },
    #[error("target {target} outside the sampled range [{min}, {max}]")]
    OutOfRange { target: f64, min: f64, max: f64 },
    #[error("evaluation failed at (x, t) = ({x}, {t}): {message}")]
    Eval { x: f64, t: f64, message: String },
}

/// Denominators smaller than this mark a point as pole-adjacent.
pub const MASK_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub h_x: f64,
    pub h_t: f64,
}

fn steps(lo: f64, hi: f64, h: f64, axis: &str) -> Result<usize, NumError> {
    if !(h > 0.0) || !(hi > lo) {
        return Err(NumError::Grid(format!("{axis}: need h > 0 and max > min")));
    }
    let n = (hi - lo) / h;
    let r = n.round();
    if (n - r).abs() > 1e-9 * n.max(1.0) {
        return Err(NumError::Grid(format!("{axis}: spacing {h} does not divide [{lo}, {hi}]")));
    }
    // Interior points are the nodes strictly between the ends.
    if r < 9.0 {
        return Err(NumError::Grid(format!("{axis}: fewer than 8 interior points")));
    }
    Ok(r as usize)
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64, h_x: f64, h_t: f64) -> Result<Self, NumError> {
        let g = Grid {
            x_min,
            x_max,
            t_min,
            t_max,
            h_x,
            h_t,
        };
        g.shape()?;
        Ok(g)
    }

    /// Parses `xmin:xmax:h,tmin:tmax:h`.
    pub fn parse(spec: &str) -> Result<Self, NumError> {
        let bad = || NumError::Grid(format!("expected xmin:xmax:h,tmin:tmax:h, got `{spec}`"));
        let (xs, ts) = spec.split_once(',').ok_or_else(bad)?;
        let axis = |s: &str| -> Result<[f64; 3], NumError> {
            let v: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
            v.try_into().map_err(|_| bad())
        };
        let [x0, x1, hx] = axis(xs)?;
        let [t0, t1, ht] = axis(ts)?;
        Grid::new(x0, x1, t0, t1, hx, ht)
    }

    /// Number of nodes along x and t.
    pub fn shape(&self) -> Result<(usize, usize), NumError> {
        Ok((
            steps(self.x_min, self.x_max, self.h_x, "x")? + 1,
            steps(self.t_min, self.t_max, self.h_t, "t")? + 1,
        ))
    }

    pub fn refined(&self) -> Self {
        Grid {
            h_x: self.h_x / 2.0,
            h_t: self.h_t / 2.0,
            ..*self
        }
    }
}

/// Solves `f(x) = target` for monotone `f` on `[lo, hi]`, checked on 64
/// samples, to `|f(x) - target| < 1e-12`.
pub fn invert_coordinate(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Result<f64, NumError> {
    const SAMPLES: usize = 64;
    let xs: Vec<f64> = (0..=SAMPLES).map(|i| lo + (hi - lo) * i as f64 / SAMPLES as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let up = ys.windows(2).all(|w| w[1] > w[0]);
    let down = ys.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(NumError::NonMonotone { lo, hi });
    }
    let (min, max) = if up { (ys[0], ys[SAMPLES]) } else { (ys[SAMPLES], ys[0]) };
    if !(min..=max).contains(&target) {
        return Err(NumError::OutOfRange { target, min, max });
    }
    let i = (0..SAMPLES)
        .find(|&i| (ys[i] - target) * (ys[i + 1] - target) <= 0.0)
        .unwrap_or(SAMPLES - 1);
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let (mut fa, mut fb) = (ys[i] - target, ys[i + 1] - target);
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    // Illinois false position, with a bisection fallback when it stalls.
    for iter in 0..200 {
        if best.1.abs() < 1e-14 || b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if iter % 3 == 2 || !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c) - target;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc == 0.0 {
            break;
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            fb *= 0.5;
        } else {
            b = c;
            fb = fc;
            fa *= 0.5;
        }
    }
    if best.1.abs() >= 1e-12 {
        return Err(NumError::OutOfRange { target, min, max });
    }
    Ok(best.0)
}

/// `(u, v)` at a point; `None` for pole-adjacent points.
pub trait Fields: Sync {
    fn eval(&self, x: f64, t: f64) -> Result<Option<[f64; 2]>, NumError>;
}

impl<F> Fields for F
where
    F: Fn(f64, f64) -> Result<Option<[f64; 2]>, NumError> + Sync,
{
    fn eval(&self, x: f64, t: f64) -> Result<Option<[f64; 2]>, NumError> {
        self(x, t)
    }
}

/// Which coordinate the closed-form solution is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// Fields as functions of the transformed coordinate, after inversion.
    Tilde,
    /// Fields as functions of the seed coordinate, as printed.
    Plain,
}

/// The exact solution as an evaluator, optionally perturbed by `a sin(x)` in `u`.
pub struct SolutionFields {
    pub sol: ExactSolution,
    pub chart: Chart,
    pub perturbation: f64,
}

impl SolutionFields {
    pub fn new(sol: ExactSolution, chart: Chart) -> Self {
        SolutionFields {
            sol,
            chart,
            perturbation: 0.0,
        }
    }

    fn pole_adjacent(&self, x: f64, t: f64) -> bool {
        let k = self.sol.k;
        let th = self.sol.theta(x, t);
        let a = 1.0 + k * th;
        !th.is_finite() || a.abs() < MASK_EPS || (1.0 - k).abs() < MASK_EPS || (1.0 - k * k + a * a).abs() < MASK_EPS
    }

    /// Seed coordinate whose image is `x_tilde` at time `t`.
    pub fn preimage(&self, x_tilde: f64, t: f64) -> Result<f64, NumError> {
        let f = |x: f64| self.sol.at(x, t).map(|p| p.x_tilde).unwrap_or(f64::NAN);
        let mut r = 1.0;
        loop {
            let (lo, hi) = (x_tilde - r, x_tilde + r);
            let (a, b) = (f(lo), f(hi));
            if a.is_finite() && b.is_finite() && a <= x_tilde && x_tilde <= b {
                return invert_coordinate(f, x_tilde, lo, hi);
            }
            r *= 2.0;
            if r > 1e6 {
                return Err(NumError::OutOfRange {
                    target: x_tilde,
                    min: a,
                    max: b,
                });
            }
        }
    }
}

impl Fields for SolutionFields {
    fn eval(&self, x: f64, t: f64) -> Result<Option<[f64; 2]>, NumError> {
        let xs = match self.chart {
            Chart::Plain => x,
            Chart::Tilde => self.preimage(x, t)?,
        };
        if self.pole_adjacent(xs, t) {
            return Ok(None);
        }
        let p = self.sol.at(xs, t).map_err(|e| NumError::Eval {
            x,
            t,
            message: e.to_string(),
        })?;
        Ok(Some([p.u + self.perturbation * x.sin(), p.v]))
    }
}

/// Jets at one point: `[u, u1, u2, u3]`, `[v, ...]`, and `m_t`, `n_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointJets {
    pub u: [f64; 4],
    pub v: [f64; 4],
    pub mt: f64,
    pub nt: f64,
}

/// `m_t - F` and `n_t - G` with `m = u - u2`, `n = v - v2`.
pub fn ch2_residual(j: &PointJets) -> [f64; 2] {
    let [u, u1, u2, u3] = j.u;
    let [v, v1, v2, v3] = j.v;
    let (m, m1, n, n1) = (u - u2, u1 - u3, v - v2, v1 - v3);
    let beta = u * v - u1 * v1;
    let beta_x = u1 * v + u * v1 - u2 * v1 - u1 * v2;
    let w = u * v1 - u1 * v;
    let f = 0.5 * (m1 * beta + m * beta_x) - 0.5 * m * w;
    let g = 0.5 * (n1 * beta + n * beta_x) + 0.5 * n * w;
    [j.mt - f, j.nt - g]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    /// `None` at masked points.
    pub residual: Option<[f64; 2]>,
}

/// Residuals at every grid node.
pub struct ResidualField {
    pub grid: Grid,
    pub samples: Vec<Sample>,
}

const HALO: usize = 3;

pub fn residual_field(fields: &dyn Fields, grid: &Grid) -> Result<ResidualField, NumError> {
    let (nx, nt) = grid.shape()?;
    let (wx, wt) = (nx + 2 * HALO, nt + 2);
    let pos = |i: usize, j: usize| {
        (
            grid.x_min + (i as f64 - HALO as f64) * grid.h_x,
            grid.t_min + (j as f64 - 1.0) * grid.h_t,
        )
    };
    let lattice: Vec<Option<[f64; 2]>> = (0..wx * wt)
        .into_par_iter()
        .map(|idx| {
            let (x, t) = pos(idx % wx, idx / wx);
            fields.eval(x, t)
        })
        .collect::<Result<_, _>>()?;
    let (hx, ht) = (grid.h_x, grid.h_t);
    let at = |i: usize, j: usize| lattice[j * wx + i];
    let jets = |i: usize, j: usize, c: usize| -> Option<[f64; 4]> {
        let s = [at(i - 2, j)?[c], at(i - 1, j)?[c], at(i, j)?[c], at(i + 1, j)?[c], at(i + 2, j)?[c]];
        Some([
            s[2],
            (s[3] - s[1]) / (2.0 * hx),
            (s[3] - 2.0 * s[2] + s[1]) / (hx * hx),
            (s[4] - 2.0 * s[3] + 2.0 * s[1] - s[0]) / (2.0 * hx.powi(3)),
        ])
    };
    let momentum = |i: usize, j: usize, c: usize| jets(i, j, c).map(|d| d[0] - d[2]);
    let samples = (0..nx * nt)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx + HALO, idx / nx + 1);
            let (x, t) = pos(i, j);
            let here = at(i, j);
            let residual = (|| {
                let mt = (momentum(i, j + 1, 0)? - momentum(i, j - 1, 0)?) / (2.0 * ht);
                let nt = (momentum(i, j + 1, 1)? - momentum(i, j - 1, 1)?) / (2.0 * ht);
                Some(ch2_residual(&PointJets {
                    u: jets(i, j, 0)?,
                    v: jets(i, j, 1)?,
                    mt,
                    nt,
                }))
            })();
            let [u, v] = here.unwrap_or([f64::NAN; 2]);
            Sample { x, t, u, v, residual }
        })
        .collect();
    Ok(ResidualField { grid: *grid, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquationNorms {
    pub max: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub h_x: f64,
    pub h_t: f64,
    pub equations: [EquationNorms; 2],
    pub masked: usize,
    pub total: usize,
}

impl ResidualReport {
    pub fn masked_fraction(&self) -> f64 {
        self.masked as f64 / self.total as f64
    }

    pub fn max_norm(&self) -> f64 {
        self.equations[0].max.max(self.equations[1].max)
    }
}

impl ResidualField {
    pub fn report(&self) -> ResidualReport {
        let cell = self.grid.h_x * self.grid.h_t;
        let mut eq = [EquationNorms { max: 0.0, l2: 0.0 }; 2];
        let mut masked = 0;
        for s in &self.samples {
            match s.residual {
                Some(r) => {
                    for (e, v) in eq.iter_mut().zip(r) {
                        e.max = e.max.max(v.abs());
                        e.l2 += v * v * cell;
                    }
                }
                None => masked += 1,
            }
        }
        for e in &mut eq {
            e.l2 = e.l2.sqrt();
        }
        ResidualReport {
            h_x: self.grid.h_x,
            h_t: self.grid.h_t,
            equations: eq,
            masked,
            total: self.samples.len(),
        }
    }

    /// Columns `x, t, u, v, residual_m, residual_n`, preceded by `header` as a
    /// comment line. Masked residuals are written as `nan`.
    pub fn write_csv(&self, out: &mut dyn Write, header: &str) -> std::io::Result<()> {
        writeln!(out, "# {header}")?;
        writeln!(out, "x,t,u,v,residual_m,residual_n")?;
        for s in &self.samples {
            let [a, b] = s.residual.unwrap_or([f64::NAN; 2]);
            writeln!(out, "{},{},{},{},{},{}", s.x, s.t, s.u, s.v, a, b)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ladder {
    pub rungs: Vec<ResidualReport>,
    /// Least-squares slope of `log max-norm` against `log h`; needs three rungs.
    pub order: Option<f64>,
}

pub fn observed_order(rungs: &[ResidualReport]) -> Option<f64> {
    if rungs.len() < 3 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rungs.iter().map(|r| (r.h_x.ln(), r.max_norm().ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Some(sxy / sxx)
}

/// Residual reports on `grid` and `rungs - 1` successive halvings.
pub fn ladder(fields: &dyn Fields, grid: &Grid, rungs: usize) -> Result<Ladder, NumError> {
    let mut g = *grid;
    let mut out = Vec::new();
    for _ in 0..rungs {
        out.push(residual_field(fields, &g)?.report());
        g = g.refined();
    }
    Ok(Ladder {
        order: observed_order(&out),
        rungs: out,
    })
}
