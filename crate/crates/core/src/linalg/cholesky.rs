//! Envelope (skyline) Cholesky under a reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use super::{norm2, SparseSymMatrix};
use crate::error::{Error, Result};

/// Bound on `‖b - A x‖ / ‖b‖` every solve must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-13;

const MAX_REFINEMENT_STEPS: usize = 4;

/// Bandwidth-reducing permutation: `order[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(&adj, &degree, seed);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Levels of a breadth-first search from `root` within its component.
fn bfs_levels(adj: &[Vec<usize>], root: usize) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::from([root]);
    let mut levels = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut root = seed;
    let mut depth = bfs_levels(adj, root).len();
    for _ in 0..8 {
        let levels = bfs_levels(adj, root);
        let candidate = *levels
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| (degree[v], v))
            .unwrap();
        let d = bfs_levels(adj, candidate).len();
        if d <= depth {
            break;
        }
        root = candidate;
        depth = d;
    }
    root
}

/// Lower Cholesky factor stored row by row from the first structural nonzero.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    order: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymMatrix) -> Result<Self> {
        let n = a.dim();
        let order = reverse_cuthill_mckee(a);
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in order.iter().enumerate() {
            for (j, _) in a.row(old) {
                first[new] = first[new].min(position[j]);
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for r in 0..n {
            offset.push(offset[r] + r - first[r] + 1);
        }
        let mut values = vec![0.0; offset[n]];
        for (new, &old) in order.iter().enumerate() {
            for (j, v) in a.row(old) {
                let c = position[j];
                if c <= new {
                    values[offset[new] + c - first[new]] = v;
                }
            }
        }

        for r in 0..n {
            let (fr, or) = (first[r], offset[r]);
            for c in fr..=r {
                let (fc, oc) = (first[c], offset[c]);
                let k0 = fr.max(fc);
                let mut s = values[or + c - fr];
                let row_r = &values[or + k0 - fr..or + c - fr];
                let row_c = &values[oc + k0 - fc..oc + c - fc];
                s -= row_r.iter().zip(row_c).map(|(x, y)| x * y).sum::<f64>();
                if c < r {
                    values[or + c - fr] = s / values[oc + c - fc];
                } else {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::Definiteness { row: order[r], value: s });
                    }
                    values[or + r - fr] = s.sqrt();
                }
            }
        }
        Ok(EnvelopeCholesky {
            order,
            first,
            offset,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Stored entries of the factor (envelope size).
    pub fn envelope_len(&self) -> usize {
        self.values.len()
    }

    /// Forward and back substitution, no residual check.
    pub fn substitute(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.order.iter().map(|&old| b[old]).collect();
        for r in 0..n {
            let (fr, or) = (self.first[r], self.offset[r]);
            let row = &self.values[or..or + r - fr];
            let s: f64 = row.iter().zip(&y[fr..r]).map(|(l, x)| l * x).sum();
            y[r] = (y[r] - s) / self.values[or + r - fr];
        }
        for r in (0..n).rev() {
            let (fr, or) = (self.first[r], self.offset[r]);
            y[r] /= self.values[or + r - fr];
            let xr = y[r];
            for (k, l) in (fr..r).zip(&self.values[or..or + r - fr]) {
                y[k] -= l * xr;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// A matrix together with its factorization. Immutable; solves may run concurrently.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: SparseSymMatrix,
    factor: EnvelopeCholesky,
}

impl SpdSolver {
    pub fn new(matrix: SparseSymMatrix) -> Result<Self> {
        let factor = EnvelopeCholesky::factor(&matrix)?;
        Ok(SpdSolver { matrix, factor })
    }

    pub fn matrix(&self) -> &SparseSymMatrix {
        &self.matrix
    }

    /// Direct solve followed by iterative refinement with an accurately
    /// accumulated residual. Fails if the relative residual stays above
    /// [`RESIDUAL_TOLERANCE`].
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (x, rel) = self.solve_with_residual(b);
        if rel > RESIDUAL_TOLERANCE {
            return Err(Error::SolverFailure {
                residual: rel,
                tolerance: RESIDUAL_TOLERANCE,
            });
        }
        Ok(x)
    }

    /// Best iterate and its relative residual, without enforcing the contract.
    pub fn solve_with_residual(&self, b: &[f64]) -> (Vec<f64>, f64) {
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return (vec![0.0; b.len()], 0.0);
        }
        let mut x = self.factor.substitute(b);
        let mut r = self.matrix.residual(&x, b);
        let mut rel = norm2(&r) / bnorm;
        for _ in 0..MAX_REFINEMENT_STEPS {
            if rel <= 0.1 * RESIDUAL_TOLERANCE {
                break;
            }
            let dx = self.factor.substitute(&r);
            let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let r_new = self.matrix.residual(&candidate, b);
            let rel_new = norm2(&r_new) / bnorm;
            if rel_new >= rel {
                break;
            }
            x = candidate;
            r = r_new;
            rel = rel_new;
        }
        (x, rel)
    }
}

/// One-shot factor and solve.
pub fn solve_spd(a: &SparseSymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    SpdSolver::new(a.clone())?.solve(b)
}
