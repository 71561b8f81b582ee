//! Certificates about the real feasible region `X = {x : f(x) < 1, Mx < c}`.
//!
//! Two kinds are produced.
//!
//! An [`EmptyCert`] shows that `f >= 1` on the whole linear region. It consists of
//! weights `λ` on the terms (summing to 1) and non-negative multipliers `μ` on the rows
//! with `sum_i λ_i ln s_i + Mᵀμ = 0`. Weighted AM-GM then gives
//! `f(x) >= exp(sum_i λ_i (ln r_i - ln λ_i) - μ·c)` on the region, so a non-negative
//! exponent rules out `f(x) < 1`. All quantities are log-vectors, checked exactly.
//!
//! A [`ConeCert`] writes a target vector as a non-negative combination of the rows of
//! the enveloping polyhedron `X̂ = {x : ln s_i · x <= -ln r_i, Mx <= c}` (which contains
//! `X`, since every term of `f` is below 1 on `X`). The multipliers come from a
//! floating-point LP, but only their support is kept: the exact multipliers are
//! recomputed by Cramer's rule over polynomials in the formal indeterminates `ln p`,
//! the unused equations are checked to vanish identically, and signs are certified by
//! interval evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use super::interval::Interval;
use super::logpoly::{determinant, LogPoly};
use super::logvec::LogVector;
use super::numeric::{barrier_minimize, distance_to_span, independent_subset, softmax_weights, Lp, Op};
use super::IpExpInstance;
use crate::rational::{from_f64_approx, to_f64, Rational};

/// Weighted AM-GM certificate that `f >= 1` on `{Mx <= c'}`, where `c' = c - 1` when
/// `tightened` (valid for integer points only) and `c' = c` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyCert {
    pub lambda: Vec<Rational>,
    pub mu: Vec<LogVector>,
    pub tightened: bool,
}

impl EmptyCert {
    /// Exact re-check against `inst`.
    pub fn verify(&self, inst: &IpExpInstance) -> bool {
        let f = &inst.f;
        if self.lambda.len() != f.num_terms() || self.mu.len() != inst.m.len() {
            return false;
        }
        if self.lambda.iter().any(Signed::is_negative) {
            return false;
        }
        if self.lambda.iter().sum::<Rational>() != Rational::one() {
            return false;
        }
        if self.mu.iter().any(|m| m.sign() == Ordering::Less) {
            return false;
        }
        for j in 0..f.n() {
            let mut acc = LogVector::zero();
            for (l, row) in self.lambda.iter().zip(&f.s) {
                acc = acc.add(&LogVector::of(&row[j]).scale(l));
            }
            for (mu, row) in self.mu.iter().zip(&inst.m) {
                acc = acc.add(&mu.scale(&Rational::from_integer(row[j].clone())));
            }
            if !acc.is_zero() {
                return false;
            }
        }
        exponent(inst, &self.lambda, &self.mu, self.tightened).sign() != Ordering::Less
    }
}

fn exponent(inst: &IpExpInstance, lambda: &[Rational], mu: &[LogVector], tightened: bool) -> LogVector {
    let mut k = LogVector::zero();
    for (l, r) in lambda.iter().zip(&inst.f.r) {
        if l.is_positive() {
            k = k.add(&LogVector::of(r).sub(&LogVector::of(l)).scale(l));
        }
    }
    for (m, c) in mu.iter().zip(&inst.c) {
        let c = if tightened { c - BigInt::one() } else { c.clone() };
        k = k.sub(&m.scale(&Rational::from_integer(c)));
    }
    k
}

fn logvec_matrix(inst: &IpExpInstance) -> Vec<Vec<LogVector>> {
    inst.f.s.iter().map(|row| row.iter().map(LogVector::of).collect()).collect()
}

/// Exact rational elimination for `a y = rhs` with several right-hand sides.
/// Free unknowns are set to 0. `None` if inconsistent.
fn solve_rational(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let nrhs = rhs.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        rhs.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for x in rhs[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (pa, pr) = (a[r].clone(), rhs[r].clone());
                for (x, p) in a[i].iter_mut().zip(&pa) {
                    *x -= p * &f;
                }
                for (x, p) in rhs[i].iter_mut().zip(&pr) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|row| row.iter().any(|x| !x.is_zero())) {
        return None;
    }
    let mut out = vec![vec![Rational::zero(); nrhs]; cols];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rhs[i].clone();
    }
    Some(out)
}

/// Multipliers `μ >= 0` with `Mᵀμ = -v`, chosen by LP to maximise the exponent and
/// then solved exactly on the LP support.
fn multipliers(inst: &IpExpInstance, v: &[LogVector], tightened: bool) -> Option<Vec<LogVector>> {
    let m = inst.m.len();
    if m == 0 {
        return v.iter().all(LogVector::is_zero).then(Vec::new);
    }
    let n = inst.n();
    let cprime: Vec<f64> = inst
        .c
        .iter()
        .map(|c| to_f64(&Rational::from_integer(if tightened { c - BigInt::one() } else { c.clone() })))
        .collect();
    let mut lp = Lp::new(cprime, 0.0, 1e9);
    for j in 0..n {
        let coeffs = inst.m.iter().map(|row| to_f64(&Rational::from_integer(row[j].clone()))).collect();
        lp.row(coeffs, Op::Eq, -v[j].to_f64());
    }
    let (sol, _) = lp.minimize()?;
    let scale = sol.iter().copied().fold(1.0, f64::max);
    let support: Vec<usize> = (0..m).filter(|&k| sol[k] > 1e-9 * scale).collect();
    let atoms: Vec<BigInt> = {
        let mut a: Vec<BigInt> = v.iter().flat_map(|lv| lv.0.keys().cloned()).collect();
        a.sort();
        a.dedup();
        a
    };
    let mut mu = vec![LogVector::zero(); m];
    if atoms.is_empty() {
        return Some(mu);
    }
    if support.is_empty() {
        return None;
    }
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|j| support.iter().map(|&k| Rational::from_integer(inst.m[k][j].clone())).collect())
        .collect();
    let rhs: Vec<Vec<Rational>> = (0..n)
        .map(|j| atoms.iter().map(|p| -v[j].0.get(p).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    let y = solve_rational(a, rhs)?;
    for (idx, &k) in support.iter().enumerate() {
        let mut lv = LogVector::zero();
        for (p, e) in atoms.iter().zip(&y[idx]) {
            let mut single = LogVector::zero();
            single.0.insert(p.clone(), Rational::one());
            lv = lv.add(&single.scale(e));
        }
        mu[k] = lv;
    }
    Some(mu)
}

fn try_lambda(inst: &IpExpInstance, lambda: Vec<Rational>, tightened: bool) -> Option<EmptyCert> {
    let lv = logvec_matrix(inst);
    let v: Vec<LogVector> = (0..inst.n())
        .map(|j| {
            lambda
                .iter()
                .zip(&lv)
                .fold(LogVector::zero(), |acc, (l, row)| acc.add(&row[j].scale(l)))
        })
        .collect();
    let mu = multipliers(inst, &v, tightened)?;
    let cert = EmptyCert { lambda, mu, tightened };
    cert.verify(inst).then_some(cert)
}

fn normalise(weights: &[Rational]) -> Option<Vec<Rational>> {
    let s: Rational = weights.iter().sum();
    if !s.is_positive() {
        return None;
    }
    Some(weights.iter().map(|w| w / &s).collect())
}

/// Looks for an [`EmptyCert`]. Candidate weights come from the term shares at the
/// integer `hints` and at an approximate minimiser of `ln f` over the linear region.
pub fn certify_empty(inst: &IpExpInstance, tightened: bool, hints: &[Vec<BigInt>]) -> Option<EmptyCert> {
    let f = &inst.f;
    if f.num_terms() == 0 {
        return None;
    }
    let mut candidates: Vec<Vec<Rational>> = Vec::new();
    let mut points: Vec<Vec<BigInt>> = hints.to_vec();

    let a: Vec<f64> = f.r.iter().map(|r| LogVector::of(r).to_f64()).collect();
    let b: Vec<Vec<f64>> = logvec_matrix(inst)
        .iter()
        .map(|row| row.iter().map(LogVector::to_f64).collect())
        .collect();
    let mf: Vec<Vec<f64>> = inst
        .m
        .iter()
        .map(|row| row.iter().map(|x| to_f64(&Rational::from_integer(x.clone()))).collect())
        .collect();
    let cf: Vec<f64> = inst
        .c
        .iter()
        .map(|c| to_f64(&Rational::from_integer(if tightened { c - BigInt::one() } else { c.clone() })))
        .collect();
    if let Some(x) = barrier_minimize(&a, &b, &mf, &cf) {
        let lam = softmax_weights(&a, &b, &x);
        for max_den in [12u64, 1_000, 1_000_000] {
            let approx: Option<Vec<Rational>> = lam
                .iter()
                .map(|&l| if l < 1e-12 { Some(Rational::zero()) } else { from_f64_approx(l, max_den) })
                .collect();
            if let Some(w) = approx.and_then(|w| normalise(&w)) {
                candidates.push(w);
            }
        }
        // Term shares at a far-away point are huge rationals and add nothing over `lam`.
        if x.iter().all(|v| v.abs() <= 64.0) {
            points.push(x.iter().map(|v| BigInt::from(v.round() as i64)).collect());
        }
    }
    for x in &points {
        if x.len() != f.n() {
            continue;
        }
        let terms: Vec<Rational> = (0..f.num_terms()).map(|i| f.term(i, x)).collect();
        if let Some(w) = normalise(&terms) {
            candidates.insert(0, w);
        }
    }
    candidates.dedup();
    candidates.into_iter().find_map(|lam| try_lambda(inst, lam, tightened))
}

/// Rows of the enveloping polyhedron `X̂ = {x : G x <= h}`: one per term, then one
/// per linear constraint.
pub(crate) struct Hull {
    pub g: Vec<Vec<LogPoly>>,
    pub h: Vec<LogPoly>,
    pub gf: Vec<Vec<f64>>,
    pub hf: Vec<f64>,
}

impl Hull {
    pub fn of(inst: &IpExpInstance) -> Hull {
        let mut g: Vec<Vec<LogPoly>> = Vec::new();
        let mut h = Vec::new();
        for (r, row) in inst.f.r.iter().zip(&inst.f.s) {
            g.push(row.iter().map(|s| LogPoly::from_logvec(&LogVector::of(s))).collect());
            h.push(LogPoly::from_logvec(&LogVector::of(r)).neg());
        }
        for (row, c) in inst.m.iter().zip(&inst.c) {
            g.push(row.iter().map(|x| LogPoly::constant(Rational::from_integer(x.clone()))).collect());
            h.push(LogPoly::constant(Rational::from_integer(c.clone())));
        }
        let gf = g.iter().map(|row| row.iter().map(LogPoly::to_f64).collect()).collect();
        let hf = h.iter().map(LogPoly::to_f64).collect();
        Hull { g, h, gf, hf }
    }

    /// The same rows with an extra coordinate of ones, used to normalise multipliers.
    fn with_ones(&self) -> Hull {
        let mut g = self.g.clone();
        let mut gf = self.gf.clone();
        for (row, rowf) in g.iter_mut().zip(gf.iter_mut()) {
            row.push(LogPoly::constant(Rational::one()));
            rowf.push(1.0);
        }
        Hull { g, h: self.h.clone(), gf, hf: self.hf.clone() }
    }
}

/// `target = sum_{k in support} (num_k / den) g_k` with every ratio non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeCert {
    pub support: Vec<usize>,
    /// Coordinates forming the square system solved by Cramer's rule.
    pub coords: Vec<usize>,
    pub num: Vec<LogPoly>,
    pub den: LogPoly,
}

impl ConeCert {
    fn build(g: &[Vec<LogPoly>], target: &[LogPoly], support: Vec<usize>, coords: Vec<usize>) -> ConeCert {
        let square: Vec<Vec<LogPoly>> = coords
            .iter()
            .map(|&j| support.iter().map(|&k| g[k][j].clone()).collect())
            .collect();
        let den = determinant(&square);
        let num = (0..support.len())
            .map(|col| {
                let replaced: Vec<Vec<LogPoly>> = square
                    .iter()
                    .zip(&coords)
                    .map(|(row, &j)| {
                        let mut r = row.clone();
                        r[col] = target[j].clone();
                        r
                    })
                    .collect();
                determinant(&replaced)
            })
            .collect();
        ConeCert { support, coords, num, den }
    }

    /// Exact re-check: the stored system matches `g`, every equation holds identically
    /// and every multiplier is certified non-negative.
    pub fn verify(&self, g: &[Vec<LogPoly>], target: &[LogPoly], max_prec: u32) -> bool {
        if self.support.len() != self.coords.len() || self.support.iter().any(|&k| k >= g.len()) {
            return false;
        }
        let rebuilt = ConeCert::build(g, target, self.support.clone(), self.coords.clone());
        if rebuilt != *self {
            return false;
        }
        let den_sign = match self.den.sign(max_prec) {
            Some(s) if s != 0 => s,
            _ => return false,
        };
        for j in 0..target.len() {
            let mut res = target[j].mul(&self.den);
            for (num, &k) in self.num.iter().zip(&self.support) {
                res = res.sub(&num.mul(&g[k][j]));
            }
            if !res.is_zero() {
                return false;
            }
        }
        self.num.iter().all(|n| match n.sign(max_prec) {
            Some(0) => true,
            Some(s) => s == den_sign,
            None => false,
        })
    }

    /// Certified sign of `sum_k α_k h_k`, raising precision up to `max_prec`.
    pub fn value_sign(&self, h: &[LogPoly], max_prec: u32) -> Option<i8> {
        let mut prec = 64;
        while prec <= max_prec {
            if let Some(s) = self.value(h, prec).and_then(|v| v.sign()) {
                if s != 0 || v_is_exact_zero(self, h) {
                    return Some(s);
                }
            }
            prec *= 2;
        }
        None
    }

    /// Enclosure of `sum_k α_k h_k`.
    pub fn value(&self, h: &[LogPoly], prec: u32) -> Option<Interval> {
        let numer = self
            .num
            .iter()
            .zip(&self.support)
            .fold(LogPoly::zero(), |acc, (n, &k)| acc.add(&n.mul(&h[k])));
        numer.eval(prec).div(&self.den.eval(prec))
    }
}

fn v_is_exact_zero(cert: &ConeCert, h: &[LogPoly]) -> bool {
    cert.num.iter().zip(&cert.support).fold(LogPoly::zero(), |acc, (n, &k)| acc.add(&n.mul(&h[k]))).is_zero()
}

/// Finds a [`ConeCert`] for `target` over the rows of `hull`, steering the LP towards
/// a small value of `sum_k α_k h_k`.
fn cone_certificate(hull: &Hull, target: &[LogPoly], max_prec: u32) -> Option<ConeCert> {
    let dims = target.len();
    let k = hull.g.len();
    let target_f: Vec<f64> = target.iter().map(LogPoly::to_f64).collect();
    if target.iter().all(LogPoly::is_zero) {
        return Some(ConeCert { support: vec![], coords: vec![], num: vec![], den: LogPoly::constant(Rational::one()) });
    }
    let mut lp = Lp::new(hull.hf.clone(), 0.0, 1e9);
    for (j, t) in target_f.iter().enumerate().take(dims) {
        lp.row((0..k).map(|i| hull.gf[i][j]).collect(), Op::Eq, *t);
    }
    let (sol, _) = lp.minimize()?;
    let scale = sol.iter().copied().fold(1.0, f64::max);
    let support: Vec<usize> = (0..k).filter(|&i| sol[i] > 1e-9 * scale).collect();
    let columns: Vec<Vec<f64>> = support.iter().map(|&i| hull.gf[i].clone()).collect();
    let basis: Vec<usize> = independent_subset(&columns, 1e-9).into_iter().map(|c| support[c]).collect();
    let rows: Vec<Vec<f64>> = (0..dims).map(|j| basis.iter().map(|&i| hull.gf[i][j]).collect()).collect();
    let coords = independent_subset(&rows, 1e-9);
    if coords.len() != basis.len() {
        return None;
    }
    let cert = ConeCert::build(&hull.g, target, basis, coords);
    cert.verify(&hull.g, target, max_prec).then_some(cert)
}

/// Certificate that `X̂` is empty: multipliers summing to 1 that combine the rows to
/// zero with a negative right-hand side.
pub(crate) fn certify_hull_empty(inst: &IpExpInstance, max_prec: u32) -> Option<ConeCert> {
    let hull = Hull::of(inst).with_ones();
    let mut target = vec![LogPoly::zero(); inst.n()];
    target.push(LogPoly::constant(Rational::one()));
    let cert = cone_certificate(&hull, &target, max_prec)?;
    (cert.value_sign(&hull.h, max_prec) == Some(-1)).then_some(cert)
}

pub(crate) fn verify_hull_empty(inst: &IpExpInstance, cert: &ConeCert, max_prec: u32) -> bool {
    let hull = Hull::of(inst).with_ones();
    let mut target = vec![LogPoly::zero(); inst.n()];
    target.push(LogPoly::constant(Rational::one()));
    cert.verify(&hull.g, &target, max_prec) && cert.value_sign(&hull.h, max_prec) == Some(-1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectionProof {
    /// `X` is empty by weighted AM-GM.
    Empty(EmptyCert),
    /// The enveloping polyhedron is empty.
    HullEmpty(ConeCert),
    /// `d` and `-d` are non-negative combinations of the hull rows.
    Cone { upper: ConeCert, lower: ConeCert },
}

/// `{d·x : x ∈ X} ⊆ [a, b]`, with its proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingDirection {
    pub d: Vec<BigInt>,
    pub a: BigInt,
    pub b: BigInt,
    pub proof: DirectionProof,
}

fn direction_polys(d: &[BigInt]) -> Vec<LogPoly> {
    d.iter().map(|x| LogPoly::constant(Rational::from_integer(x.clone()))).collect()
}

/// Integer bounds `[a, b]` on `d·x` over `X̂` implied by the two cone certificates.
pub(crate) fn cone_bounds(
    inst: &IpExpInstance,
    d: &[BigInt],
    upper: &ConeCert,
    lower: &ConeCert,
    max_prec: u32,
) -> Option<(BigInt, BigInt)> {
    let hull = Hull::of(inst);
    let t = direction_polys(d);
    let neg: Vec<LogPoly> = t.iter().map(LogPoly::neg).collect();
    if !upper.verify(&hull.g, &t, max_prec) || !lower.verify(&hull.g, &neg, max_prec) {
        return None;
    }
    let hi = upper.value(&hull.h, 96)?;
    let lo = lower.value(&hull.h, 96)?;
    let b = crate::rational::ceil(&hi.hi);
    let a = crate::rational::floor(&-lo.hi);
    Some((a, b))
}

/// Rows of `X̂` that vanish on the whole recession cone `C = {x : G x <= 0}`
/// (numerically); their span is the orthogonal complement of `C`.
fn implicit_equalities(hull: &Hull, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for row in &hull.gf {
        if row.iter().all(|x| x.abs() < 1e-12) {
            continue;
        }
        let mut lp = Lp::new(row.iter().map(|x| -x).collect(), -1.0, 1.0);
        for other in &hull.gf {
            lp.row(other.clone(), Op::Le, 0.0);
        }
        if let Some((_, val)) = lp.minimize() {
            if -val < 1e-9 {
                out.push(row.clone());
            }
        }
        let _ = n;
    }
    out
}

/// Primitive integer vectors of max-norm `r` whose first non-zero entry is positive.
fn directions(n: usize, r: u32) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    super::solve::enumerate_shell(n, r, &[], &[], &mut |x: &[i64]| {
        let first = x.iter().find(|v| **v != 0).copied().unwrap_or(0);
        let g = x.iter().fold(0i64, |acc, v| acc.gcd(v));
        if first > 0 && g == 1 {
            out.push(x.iter().map(|v| BigInt::from(*v)).collect());
        }
        true
    });
    out
}

pub(crate) fn bounding_direction(
    inst: &IpExpInstance,
    max_norm: u32,
    max_prec: u32,
    try_empty: bool,
) -> Option<BoundingDirection> {
    let n = inst.n();
    if n == 0 {
        return None;
    }
    let unit: Vec<BigInt> = (0..n).map(|j| BigInt::from(u8::from(j == 0))).collect();
    if try_empty {
        if let Some(cert) = certify_empty(inst, false, &[]) {
            return Some(BoundingDirection { d: unit, a: BigInt::zero(), b: BigInt::zero(), proof: DirectionProof::Empty(cert) });
        }
    }
    if let Some(cert) = certify_hull_empty(inst, max_prec) {
        return Some(BoundingDirection { d: unit, a: BigInt::zero(), b: BigInt::zero(), proof: DirectionProof::HullEmpty(cert) });
    }
    let hull = Hull::of(inst);
    let eqs = implicit_equalities(&hull, n);
    if eqs.is_empty() {
        return None;
    }
    let mut best: Option<BoundingDirection> = None;
    for r in 1..=max_norm {
        for d in directions(n, r) {
            let df: Vec<f64> = d.iter().map(|x| to_f64(&Rational::from_integer(x.clone()))).collect();
            let norm2: f64 = df.iter().map(|x| x * x).sum();
            if distance_to_span(&df, &eqs) > 1e-9 * norm2 {
                continue;
            }
            let t = direction_polys(&d);
            let neg: Vec<LogPoly> = t.iter().map(LogPoly::neg).collect();
            let Some(upper) = cone_certificate(&hull, &t, max_prec) else { continue };
            let Some(lower) = cone_certificate(&hull, &neg, max_prec) else { continue };
            let Some((a, b)) = cone_bounds(inst, &d, &upper, &lower, max_prec) else { continue };
            let better = best.as_ref().is_none_or(|cur| &b - &a < &cur.b - &cur.a);
            if better {
                best = Some(BoundingDirection { d, a, b, proof: DirectionProof::Cone { upper, lower } });
            }
        }
        if best.is_some() {
            break;
        }
    }
    best
}

/// A direction `d` with integer bounds `a <= d·x <= b` valid for every real solution
/// `x` of the instance, or `None` when no such bound can be certified within the
/// search radius. When `X` is certified empty the result is `(e_1, 0, 0)`.
pub fn find_bounding_direction(inst: &IpExpInstance, max_norm: u32) -> Option<BoundingDirection> {
    bounding_direction(inst, max_norm, 2048, true)
}
