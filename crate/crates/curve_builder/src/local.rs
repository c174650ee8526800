//! Local minimization on the score surface: projected quasi-Newton steps in
//! the tangent space of `score = ω`, each trial point pulled back onto the
//! surface by Newton steps on the score residual (a reduced-gradient scheme).

use std::f64::consts::PI;

use crate::objective::{Grad, Point, Problem, DIM};

#[derive(Clone, Copy, Debug)]
pub struct LocalSettings {
    pub max_iters: usize,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct LocalResult {
    pub x: Point,
    pub f: f64,
    pub residual: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Residual accepted as "on the surface".
const SURFACE_TOL: f64 = 1e-13;

fn dot(a: &Grad, b: &Grad) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project(x: &mut Point, lo: &Point, hi: &Point) {
    for i in 0..DIM {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn identity() -> [[f64; DIM]; DIM] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

struct Solver<'a> {
    problem: &'a Problem,
    lo: Point,
    hi: Point,
    evals: usize,
    /// Bound-active coordinates frozen after a failed line search. At
    /// `u_R = 1` the entropy has an infinite one-sided slope that the floored
    /// gradient cannot represent.
    pinned: [bool; DIM],
}

/// Objective data at a feasible point.
#[derive(Clone, Copy)]
struct State {
    x: Point,
    f: f64,
    g: Grad,
    n: Grad,
}

impl Solver<'_> {
    fn movable(&self, i: usize) -> bool {
        self.lo[i] < self.hi[i] && !self.pinned[i]
    }

    /// Newton steps on the residual along its gradient, respecting bounds.
    fn retract(&mut self, mut x: Point) -> Option<Point> {
        for _ in 0..25 {
            let (h, n) = self.problem.residual_grad(&x);
            if h.abs() <= SURFACE_TOL {
                return Some(x);
            }
            let free: [bool; DIM] = std::array::from_fn(|i| {
                let push = -h * n[i];
                self.movable(i) && !((x[i] <= self.lo[i] && push < 0.0) || (x[i] >= self.hi[i] && push > 0.0))
            });
            let n2: f64 = (0..DIM).filter(|&i| free[i]).map(|i| n[i] * n[i]).sum();
            if n2 < 1e-20 {
                return None;
            }
            for i in (0..DIM).filter(|&i| free[i]) {
                x[i] -= h * n[i] / n2;
            }
            project(&mut x, &self.lo, &self.hi);
        }
        (self.problem.residual(&x).abs() <= 1e-11).then_some(x)
    }

    fn state(&mut self, x: Point) -> Option<State> {
        self.evals += 1;
        let e = self.problem.evaluate(&x)?;
        Some(State { x, f: e.f, g: e.grad_f, n: e.grad_h })
    }

    /// Tangent-space gradient with bound-active coordinates removed.
    fn reduced(&self, s: &State) -> (Grad, [bool; DIM]) {
        let mut free: [bool; DIM] = std::array::from_fn(|i| self.movable(i));
        let mut gt = s.g;
        for _ in 0..3 {
            let nf: Grad = std::array::from_fn(|i| if free[i] { s.n[i] } else { 0.0 });
            let gf: Grad = std::array::from_fn(|i| if free[i] { s.g[i] } else { 0.0 });
            let nn = dot(&nf, &nf);
            let k = if nn > 0.0 { dot(&gf, &nf) / nn } else { 0.0 };
            gt = std::array::from_fn(|i| if free[i] { gf[i] - k * nf[i] } else { 0.0 });
            let mut changed = false;
            for i in 0..DIM {
                if free[i] && ((s.x[i] <= self.lo[i] && gt[i] > 0.0) || (s.x[i] >= self.hi[i] && gt[i] < 0.0)) {
                    free[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (gt, free)
    }

    fn run(&mut self, x0: Point, settings: &LocalSettings) -> Option<LocalResult> {
        let mut x = x0;
        project(&mut x, &self.lo, &self.hi);
        let x = self.retract(x)?;
        let mut cur = self.state(x)?;
        let mut hinv = identity();
        let mut fresh = true;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < settings.max_iters {
            iterations += 1;
            let (gt, free) = self.reduced(&cur);
            let pg = dot(&gt, &gt).sqrt();
            if pg < 1e-10 {
                converged = true;
                break;
            }
            let nf: Grad = std::array::from_fn(|i| if free[i] { cur.n[i] } else { 0.0 });
            let nn = dot(&nf, &nf);
            let tangent = |d: &mut Grad| {
                if nn > 0.0 {
                    let k = dot(d, &nf) / nn;
                    for i in 0..DIM {
                        d[i] -= k * nf[i];
                    }
                }
            };
            let mut d: Grad = std::array::from_fn(|i| {
                if free[i] {
                    -(0..DIM).filter(|&j| free[j]).map(|j| hinv[i][j] * gt[j]).sum::<f64>()
                } else {
                    0.0
                }
            });
            tangent(&mut d);
            if dot(&d, &gt) >= -1e-3 * pg * dot(&d, &d).sqrt() {
                hinv = identity();
                fresh = true;
                d = gt.map(|v| -v);
            }
            let cap = if fresh { 0.25 } else { 1.0 };
            let dn = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if dn > cap {
                d.iter_mut().for_each(|v| *v *= cap / dn);
            }
            let slope = dot(&d, &gt);
            let mut t = 1.0;
            let mut next = None;
            for _ in 0..40 {
                let mut xt = cur.x;
                for i in 0..DIM {
                    xt[i] += t * d[i];
                }
                project(&mut xt, &self.lo, &self.hi);
                if let Some(xr) = self.retract(xt) {
                    if let Some(st) = self.state(xr) {
                        if st.f <= cur.f + 1e-4 * t * slope {
                            next = Some(st);
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            let Some(nx) = next else {
                if fresh {
                    let at_bound: Vec<usize> =
                        (0..DIM).filter(|&i| free[i] && (cur.x[i] <= self.lo[i] || cur.x[i] >= self.hi[i])).collect();
                    if at_bound.is_empty() {
                        converged = true;
                        break;
                    }
                    at_bound.into_iter().for_each(|i| self.pinned[i] = true);
                    continue;
                }
                hinv = identity();
                fresh = true;
                continue;
            };
            let s: Grad = std::array::from_fn(|i| nx.x[i] - cur.x[i]);
            let (gt_new, _) = self.reduced(&nx);
            let y: Grad = std::array::from_fn(|i| gt_new[i] - gt[i]);
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                if fresh {
                    let scale = sy / dot(&y, &y);
                    hinv = identity();
                    hinv.iter_mut().enumerate().for_each(|(i, row)| row[i] = scale);
                    fresh = false;
                }
                let rho = 1.0 / sy;
                let hy: Grad = std::array::from_fn(|i| dot(&hinv[i], &y));
                let yhy = dot(&y, &hy);
                for i in 0..DIM {
                    for j in 0..DIM {
                        hinv[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                    }
                }
            }
            let change = cur.f - nx.f;
            let step = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            cur = nx;
            for a in cur.x.iter_mut().skip(3) {
                *a = a.rem_euclid(PI);
            }
            if step < 1e-12 || (change <= settings.tolerance * (1.0 + cur.f.abs()) && pg < 1e-5) {
                converged = true;
                break;
            }
        }
        Some(LocalResult {
            x: cur.x,
            f: cur.f,
            residual: self.problem.residual(&cur.x),
            evaluations: self.evals,
            iterations,
            converged,
        })
    }
}

/// Minimizes `problem`'s entropy from `x0` on the surface `score = ω`.
pub fn solve(problem: &Problem, x0: Point, settings: &LocalSettings) -> Option<LocalResult> {
    let mut s = Solver { problem, lo: problem.lower(), hi: problem.upper(), evals: 0, pinned: [false; DIM] };
    s.run(x0, settings)
}
