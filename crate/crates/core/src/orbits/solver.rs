//! Newton ascent of the discrete action on a symmetric parameter layout.

use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::geometry::{det, Vec2};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Sup-norm target on the reflection residual at the free vertices.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra randomly perturbed starts; the largest converged action wins.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 200,
            restarts: 0,
            seed: 0x5eed_b11a,
        }
    }
}

/// How vertex `j` depends on the free variables.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Slot {
    Fixed(f64),
    Var { base: f64, sign: f64, idx: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub slots: Vec<Slot>,
    pub nvar: usize,
}

impl Layout {
    pub fn params(&self, v: &[f64]) -> Vec<f64> {
        self.slots
            .iter()
            .map(|slot| match *slot {
                Slot::Fixed(s) => s,
                Slot::Var { base, sign, idx } => base + sign * v[idx],
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub params: Vec<f64>,
    pub action: f64,
    pub iterations: usize,
    /// Largest eigenvalue of the reduced Hessian at the end point.
    pub top_curvature: f64,
}

/// Minimum spacing between consecutive vertices.
fn min_gap(q: usize) -> f64 {
    1e-4 / q as f64
}

fn ordered(params: &[f64], q: usize) -> bool {
    let g = min_gap(q);
    params.windows(2).all(|w| w[1] - w[0] >= g) && params[0] + 1.0 - params[q - 1] >= g
}

pub(crate) fn action_of(points: &[Vec2]) -> f64 {
    let q = points.len();
    (0..q).map(|j| det(points[j], points[(j + 1) % q])).sum()
}

struct Eval {
    action: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
    /// Sup of the reflection residual over vertices that carry a variable.
    free_residual: f64,
}

fn evaluate(curve: &AffineCurve, layout: &Layout, v: &[f64], with_hessian: bool) -> Eval {
    let params = layout.params(v);
    let q = params.len();
    let jets: Vec<[Vec2; 3]> = params.iter().map(|&s| curve.jet::<3>(s)).collect();
    let pts: Vec<Vec2> = jets.iter().map(|j| j[0]).collect();
    let next = |j: usize| (j + 1) % q;
    let prev = |j: usize| (j + q - 1) % q;

    let g: Vec<f64> = (0..q)
        .map(|j| det(jets[j][1], pts[next(j)] - pts[prev(j)]))
        .collect();

    let m = layout.nvar;
    let mut grad = DVector::zeros(m);
    let mut free_residual: f64 = 0.0;
    for (j, slot) in layout.slots.iter().enumerate() {
        if let Slot::Var { sign, idx, .. } = *slot {
            grad[idx] += sign * g[j];
            free_residual = free_residual.max(g[j].abs());
        }
    }

    let mut hess = DMatrix::zeros(m, m);
    if with_hessian {
        let var = |j: usize| match layout.slots[j] {
            Slot::Var { sign, idx, .. } => Some((sign, idx)),
            Slot::Fixed(_) => None,
        };
        for j in 0..q {
            let Some((sj, ij)) = var(j) else { continue };
            let diag = det(jets[j][2], pts[next(j)] - pts[prev(j)]);
            hess[(ij, ij)] += diag;
            let k = next(j);
            if let Some((sk, ik)) = var(k) {
                let off = sj * sk * det(jets[j][1], jets[k][1]);
                hess[(ij, ik)] += off;
                hess[(ik, ij)] += off;
            }
        }
    }

    Eval {
        action: action_of(&pts),
        grad,
        hess,
        free_residual,
    }
}

/// Saddle-free Newton direction: ascent along every eigendirection except the
/// numerically flat ones, which would only drift along a degenerate family.
fn ascent_direction(grad: &DVector<f64>, hess: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let eig = SymmetricEigen::new(hess.clone());
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = 1e-10 * scale;
    let mut step = DVector::zeros(grad.len());
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() <= floor {
            continue;
        }
        let v = eig.eigenvectors.column(i);
        let proj = v.dot(grad);
        step += v * (proj / lam.abs());
    }
    let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (step, top)
}

/// Maximizes the action over the free variables starting from `v0`.
pub(crate) fn ascend(
    curve: &AffineCurve,
    layout: &Layout,
    v0: Vec<f64>,
    opts: &SolverOptions,
) -> Result<Solution> {
    let q = layout.slots.len();
    let mut v = v0;
    if !ordered(&layout.params(&v), q) {
        return Err(Error::OrderingCollapse {
            q,
            params: layout.params(&v),
        });
    }
    let max_step = 0.25 / q as f64;
    let mut polish = 0;
    for it in 0..=opts.max_iter {
        let cur = evaluate(curve, layout, &v, true);
        if layout.nvar == 0 {
            return Ok(Solution {
                params: layout.params(&v),
                action: cur.action,
                iterations: 0,
                top_curvature: f64::NEG_INFINITY,
            });
        }
        let (mut dir, top) = ascent_direction(&cur.grad, &cur.hess);
        let converged = cur.free_residual <= opts.tol;
        if converged {
            polish += 1;
            if polish > 2 {
                return Ok(Solution {
                    params: layout.params(&v),
                    action: cur.action,
                    iterations: it,
                    top_curvature: top,
                });
            }
        }
        if it == opts.max_iter {
            return Err(Error::Stagnation {
                q,
                iterations: it,
                residual: cur.free_residual,
                params: layout.params(&v),
            });
        }
        let big = dir.amax();
        if big > max_step {
            dir *= max_step / big;
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        let mut any_ordered = false;
        for _ in 0..40 {
            let trial: Vec<f64> = v.iter().zip(dir.iter()).map(|(a, d)| a + alpha * d).collect();
            if ordered(&layout.params(&trial), q) {
                any_ordered = true;
                let e = evaluate(curve, layout, &trial, false);
                let slack = 1e-14 * cur.action.abs();
                if e.action >= cur.action - slack || e.free_residual < cur.free_residual {
                    accepted = Some((trial, e.free_residual));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, res)) => {
                if converged && res > cur.free_residual {
                    // Polishing made things worse: keep the converged point.
                    return Ok(Solution {
                        params: layout.params(&v),
                        action: cur.action,
                        iterations: it,
                        top_curvature: top,
                    });
                }
                v = trial;
            }
            None if converged => {
                return Ok(Solution {
                    params: layout.params(&v),
                    action: cur.action,
                    iterations: it,
                    top_curvature: top,
                })
            }
            None if !any_ordered => {
                return Err(Error::OrderingCollapse {
                    q,
                    params: layout.params(&v),
                })
            }
            None => {
                return Err(Error::Stagnation {
                    q,
                    iterations: it,
                    residual: cur.free_residual,
                    params: layout.params(&v),
                })
            }
        }
    }
    unreachable!("the final iteration always returns")
}
