//! Floating-point helpers that only produce guesses. Every guess is re-checked exactly
//! (or with certified intervals) before it becomes part of a certificate.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

pub(crate) struct Lp {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<f64>, ComparisonOp, f64)>,
}

impl Lp {
    pub fn new(objective: Vec<f64>, lower: f64, upper: f64) -> Self {
        let n = objective.len();
        Lp { objective, lower: vec![lower; n], upper: vec![upper; n], rows: Vec::new() }
    }

    pub fn row(&mut self, coeffs: Vec<f64>, op: ComparisonOp, rhs: f64) {
        self.rows.push((coeffs, op, rhs));
    }

    /// Minimises; `None` when infeasible, unbounded or numerically hopeless.
    pub fn minimize(&self) -> Option<(Vec<f64>, f64)> {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&c, (&lo, &hi))| p.add_var(c, (lo, hi)))
            .collect();
        for (coeffs, op, rhs) in &self.rows {
            let mut e = LinearExpr::empty();
            for (v, &a) in vars.iter().zip(coeffs) {
                if a != 0.0 {
                    e.add(*v, a);
                }
            }
            if !rhs.is_finite() || coeffs.iter().any(|a| !a.is_finite()) {
                return None;
            }
            p.add_constraint(e, *op, *rhs);
        }
        let sol = p.solve().ok()?;
        let x: Vec<f64> = vars.iter().map(|v| sol[*v]).collect();
        Some((x, sol.objective()))
    }
}

pub(crate) use minilp::ComparisonOp as Op;

/// Solves the square system `a x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col].clone();
        for r in col + 1..n {
            let f = a[r][col] / pivot[col];
            if f != 0.0 {
                for (x, p) in a[r][col..n].iter_mut().zip(&pivot[col..n]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset of `vectors`, scanned in order.
pub(crate) fn independent_subset(vectors: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for u in &basis {
            let dot: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (wk, uk) in w.iter_mut().zip(u) {
                *wk -= dot * uk;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        if norm > tol * scale {
            basis.push(w.iter().map(|x| x / norm).collect());
            chosen.push(i);
        }
    }
    chosen
}

/// Squared distance from `v` to the span of `basis` (which need not be orthogonal).
pub(crate) fn distance_to_span(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for b in basis {
        let mut w = b.clone();
        for u in &ortho {
            let dot: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (wk, uk) in w.iter_mut().zip(u) {
                *wk -= dot * uk;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            ortho.push(w.iter().map(|x| x / norm).collect());
        }
    }
    let mut r = v.to_vec();
    for u in &ortho {
        let dot: f64 = r.iter().zip(u).map(|(a, b)| a * b).sum();
        for (rk, uk) in r.iter_mut().zip(u) {
            *rk -= dot * uk;
        }
    }
    r.iter().map(|x| x * x).sum()
}

/// Term weights `λ_i ∝ exp(a_i + b_i·x)`, normalised.
pub(crate) fn softmax_weights(a: &[f64], b: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let z: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(ai, bi)| ai + bi.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = z.iter().map(|zi| (zi - zmax).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|wi| wi / s).collect()
}

fn log_sum_exp(a: &[f64], b: &[Vec<f64>], x: &[f64]) -> f64 {
    let z: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(ai, bi)| ai + bi.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    zmax + z.iter().map(|zi| (zi - zmax).exp()).sum::<f64>().ln()
}

/// Approximate minimiser of `ln sum_i exp(a_i + b_i·x)` over `{x : m x <= c}` by a
/// log-barrier Newton method. Returns `None` without a strictly feasible point.
pub(crate) fn barrier_minimize(
    a: &[f64],
    b: &[Vec<f64>],
    m: &[Vec<f64>],
    c: &[f64],
) -> Option<Vec<f64>> {
    let n = b.first().map_or_else(|| m.first().map_or(0, Vec::len), Vec::len);
    if a.is_empty() {
        return None;
    }
    let mut x = interior_point(m, c, n)?;
    let slack = |x: &[f64]| -> Vec<f64> {
        m.iter()
            .zip(c)
            .map(|(row, ck)| ck - row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
            .collect()
    };
    let phi = |x: &[f64], t: f64| -> f64 {
        let s = slack(x);
        if s.iter().any(|v| *v <= 0.0) {
            return f64::INFINITY;
        }
        t * log_sum_exp(a, b, x) - s.iter().map(|v| v.ln()).sum::<f64>()
    };
    let mut t = 1.0;
    while t < 1e10 {
        for _ in 0..60 {
            let lam = softmax_weights(a, b, &x);
            let mut g = vec![0.0; n];
            for (l, bi) in lam.iter().zip(b) {
                for j in 0..n {
                    g[j] += l * bi[j];
                }
            }
            let mut h = vec![vec![0.0; n]; n];
            for (l, bi) in lam.iter().zip(b) {
                for j in 0..n {
                    for k in 0..n {
                        h[j][k] += t * l * bi[j] * bi[k];
                    }
                }
            }
            for j in 0..n {
                for k in 0..n {
                    h[j][k] -= t * g[j] * g[k];
                }
            }
            let mut grad: Vec<f64> = g.iter().map(|v| t * v).collect();
            for (row, s) in m.iter().zip(slack(&x)) {
                for j in 0..n {
                    grad[j] += row[j] / s;
                    for k in 0..n {
                        h[j][k] += row[j] * row[k] / (s * s);
                    }
                }
            }
            for (j, row) in h.iter_mut().enumerate() {
                row[j] += 1e-10 * (1.0 + t);
            }
            let step = solve_dense(h, grad.iter().map(|v| -v).collect())?;
            let decrement: f64 = -step.iter().zip(&grad).map(|(p, q)| p * q).sum::<f64>();
            if decrement < 1e-12 {
                break;
            }
            let base = phi(&x, t);
            let mut alpha = 1.0;
            loop {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(p, q)| p + alpha * q).collect();
                let v = phi(&cand, t);
                if v.is_finite() && v <= base - 0.25 * alpha * decrement {
                    x = cand;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    break;
                }
            }
            if alpha < 1e-12 {
                break;
            }
            if x.iter().any(|v| v.abs() > 1e8) || log_sum_exp(a, b, &x) < -40.0 {
                return Some(x);
            }
        }
        t *= 8.0;
    }
    Some(x)
}

fn interior_point(m: &[Vec<f64>], c: &[f64], n: usize) -> Option<Vec<f64>> {
    if m.is_empty() {
        return Some(vec![0.0; n]);
    }
    // maximise s subject to m x + s <= c, s <= 1.
    let mut objective = vec![0.0; n + 1];
    objective[n] = -1.0;
    let mut lp = Lp::new(objective, -1e7, 1e7);
    lp.upper[n] = 1.0;
    for (row, ck) in m.iter().zip(c) {
        let mut coeffs = row.clone();
        coeffs.push(1.0);
        lp.row(coeffs, Op::Le, *ck);
    }
    let (sol, _) = lp.minimize()?;
    if sol[n] <= 1e-7 {
        return None;
    }
    Some(sol[..n].to_vec())
}
