//! The two-track decision procedure and its certificates.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::certify::{
    bounding_direction, certify_empty, cone_bounds, verify_hull_empty, ConeCert, DirectionProof, EmptyCert,
};
use super::lattice::{hyperplane_solutions, mat_vec, substitute};
use super::IpExpInstance;
use crate::rational::Rational;

/// Search limits. The procedure answers `Unknown` when one of them is hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Largest max-norm shell enumerated by the point search.
    pub radius: u32,
    /// Largest max-norm of a candidate slicing direction.
    pub max_d_norm: u32,
    /// Nesting depth of the slicing recursion.
    pub max_depth: usize,
    /// Most slices `d·x = i` opened at one level.
    pub max_slices: u64,
    /// Most integer points evaluated by the point search.
    pub max_points: u64,
    /// Precision ceiling (bits) for interval sign checks.
    pub max_prec: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { radius: 10, max_d_norm: 2, max_depth: 8, max_slices: 64, max_points: 2_000_000, max_prec: 2048 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Sat(Vec<BigInt>),
    Unsat(UnsatCert),
    Unknown(String),
}

/// Why an instance has no integer solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnsatCert {
    /// Zero variables and the single (empty) point fails.
    Constant,
    /// `f >= 1` on every integer point of the linear region.
    Empty(EmptyCert),
    /// The enveloping polyhedron is empty.
    HullEmpty(ConeCert),
    /// Every solution satisfies `a <= d·x <= b`; each slice is refuted separately.
    Slices { d: Vec<BigInt>, a: BigInt, b: BigInt, upper: Box<ConeCert>, lower: Box<ConeCert>, slices: Vec<SliceCert> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SliceCert {
    /// `d·x = i` has no integer solutions at all.
    NoLatticePoints { i: BigInt },
    /// The restricted instance in `n - 1` variables is infeasible.
    Restricted { i: BigInt, cert: Box<UnsatCert> },
}

impl UnsatCert {
    /// Number of nodes in the certificate tree.
    pub fn size(&self) -> usize {
        match self {
            UnsatCert::Slices { slices, .. } => {
                1 + slices
                    .iter()
                    .map(|s| match s {
                        SliceCert::NoLatticePoints { .. } => 1,
                        SliceCert::Restricted { cert, .. } => cert.size(),
                    })
                    .sum::<usize>()
            }
            _ => 1,
        }
    }
}

/// Visits the integer points of max-norm exactly `r` in lexicographic order, skipping
/// those that violate a row of `m x < c`. The visitor returns `false` to stop.
pub fn enumerate_shell(
    n: usize,
    r: u32,
    m: &[Vec<BigInt>],
    c: &[BigInt],
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    let r = i64::from(r);
    // suffix[k][j] = sum_{i >= j} |m_ki| * r
    let suffix: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let mut s = vec![BigInt::zero(); n + 1];
            for j in (0..n).rev() {
                s[j] = &s[j + 1] + row[j].abs() * r;
            }
            s
        })
        .collect();
    let mut x = vec![0i64; n];
    let mut partial = vec![BigInt::zero(); m.len()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        j: usize,
        hit: bool,
        r: i64,
        x: &mut Vec<i64>,
        partial: &mut Vec<BigInt>,
        m: &[Vec<BigInt>],
        c: &[BigInt],
        suffix: &[Vec<BigInt>],
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        let n = x.len();
        for k in 0..m.len() {
            if &partial[k] - &suffix[k][j] >= c[k] {
                return true;
            }
        }
        if j == n {
            return if hit || r == 0 { visit(x) } else { true };
        }
        let values: Vec<i64> = if j + 1 == n && !hit && r > 0 { vec![-r, r] } else { (-r..=r).collect() };
        for v in values {
            x[j] = v;
            for k in 0..m.len() {
                partial[k] += &m[k][j] * v;
            }
            let cont = go(j + 1, hit || v.abs() == r, r, x, partial, m, c, suffix, visit);
            for k in 0..m.len() {
                partial[k] -= &m[k][j] * v;
            }
            if !cont {
                return false;
            }
        }
        x[j] = 0;
        true
    }
    go(0, false, r, &mut x, &mut partial, m, c, &suffix, visit)
}

/// Best few points seen by the enumeration, used as hints for the certificates.
struct Hints {
    points: Vec<(Rational, Vec<BigInt>)>,
}

impl Hints {
    fn offer(&mut self, value: Rational, x: Vec<BigInt>) {
        self.points.push((value, x));
        self.points.sort_by(|a, b| a.0.cmp(&b.0));
        self.points.truncate(3);
    }

    fn list(&self) -> Vec<Vec<BigInt>> {
        self.points.iter().map(|(_, x)| x.clone()).collect()
    }
}

enum Shell {
    Sat(Vec<BigInt>),
    Done,
    Exhausted,
}

fn search_shell(inst: &IpExpInstance, r: u32, points: &mut u64, limit: u64, hints: &mut Hints) -> Shell {
    let mut found = None;
    let mut exhausted = false;
    enumerate_shell(inst.n(), r, &inst.m, &inst.c, &mut |x: &[i64]| {
        if *points >= limit {
            exhausted = true;
            return false;
        }
        *points += 1;
        let xb: Vec<BigInt> = x.iter().map(|v| BigInt::from(*v)).collect();
        let v = inst.f.eval(&xb);
        if v < Rational::one() {
            found = Some(xb);
            return false;
        }
        hints.offer(v, xb);
        true
    });
    match (found, exhausted) {
        (Some(x), _) => Shell::Sat(x),
        (None, true) => Shell::Exhausted,
        (None, false) => Shell::Done,
    }
}

struct Proc<'a> {
    budget: &'a Budget,
    d_norm: u32,
    points: u64,
}

impl Proc<'_> {
    fn run(&mut self, inst: &IpExpInstance, depth: usize, hints: &[Vec<BigInt>]) -> Solution {
        let n = inst.n();
        if n == 0 {
            return if inst.is_solution(&[]) { Solution::Sat(vec![]) } else { Solution::Unsat(UnsatCert::Constant) };
        }
        let mut local = Hints { points: Vec::new() };
        for h in hints {
            local.offer(inst.f.eval(h), h.clone());
        }
        if depth > 0 {
            for r in 0..=1 {
                if let Shell::Sat(x) = search_shell(inst, r, &mut self.points, self.budget.max_points, &mut local) {
                    return Solution::Sat(x);
                }
            }
        }
        if let Some(cert) = certify_empty(inst, true, &local.list()) {
            return Solution::Unsat(UnsatCert::Empty(cert));
        }
        if depth >= self.budget.max_depth {
            return Solution::Unknown(format!("slicing depth limit {} reached", self.budget.max_depth));
        }
        let Some(dir) = bounding_direction(inst, self.d_norm, self.budget.max_prec, false) else {
            return Solution::Unknown(format!("no bounding direction of norm <= {}", self.d_norm));
        };
        let (upper, lower) = match dir.proof {
            DirectionProof::Empty(c) => return Solution::Unsat(UnsatCert::Empty(c)),
            DirectionProof::HullEmpty(c) => return Solution::Unsat(UnsatCert::HullEmpty(c)),
            DirectionProof::Cone { upper, lower } => (Box::new(upper), Box::new(lower)),
        };
        let (d, a, b) = (dir.d, dir.a, dir.b);
        if b < a {
            // The bounds are contradictory, so there is nothing to slice.
            return Solution::Unsat(UnsatCert::Slices { d, a, b, upper, lower, slices: vec![] });
        }
        let width = (&b - &a + 1u32).to_u64().unwrap_or(u64::MAX);
        if width > self.budget.max_slices {
            return Solution::Unknown(format!("{width} slices exceed the limit {}", self.budget.max_slices));
        }
        let mut slices = Vec::new();
        let mut i = a.clone();
        while i <= b {
            match hyperplane_solutions(&d, &i) {
                None => slices.push(SliceCert::NoLatticePoints { i: i.clone() }),
                Some((h, nmat)) => {
                    let sub = substitute(inst, &nmat, &h);
                    match self.run(&sub, depth + 1, &[]) {
                        Solution::Sat(y) => {
                            let x: Vec<BigInt> = mat_vec(&nmat, &y).into_iter().zip(&h).map(|(p, q)| p + q).collect();
                            return Solution::Sat(x);
                        }
                        Solution::Unsat(cert) => slices.push(SliceCert::Restricted { i: i.clone(), cert: Box::new(cert) }),
                        u @ Solution::Unknown(_) => return u,
                    }
                }
            }
            i += 1u32;
        }
        Solution::Unsat(UnsatCert::Slices { d, a, b, upper, lower, slices })
    }
}

/// Decides whether some `x ∈ Z^n` has `f(x) < 1` and `Mx < c`.
///
/// Round `k` enumerates the shell of max-norm `k` and then runs the slicing procedure
/// with directions of max-norm up to `k`. `Sat` points are exact solutions and
/// `Unsat` certificates pass [`verify_unsat`].
pub fn solve(inst: &IpExpInstance, budget: &Budget) -> Solution {
    let mut hints = Hints { points: Vec::new() };
    let mut points = 0u64;
    let mut enumeration_done = false;
    let mut last_reason = String::from("budget exhausted");
    for round in 0..=budget.radius.max(budget.max_d_norm) {
        if round <= budget.radius && !enumeration_done {
            match search_shell(inst, round, &mut points, budget.max_points, &mut hints) {
                Shell::Sat(x) => return Solution::Sat(x),
                Shell::Exhausted => enumeration_done = true,
                Shell::Done => {}
            }
        }
        if inst.n() == 0 && round == 0 {
            return if inst.is_solution(&[]) { Solution::Sat(vec![]) } else { Solution::Unsat(UnsatCert::Constant) };
        }
        if round == 0 {
            if let Some(cert) = certify_empty(inst, true, &hints.list()) {
                return Solution::Unsat(UnsatCert::Empty(cert));
            }
        }
        if (1..=budget.max_d_norm).contains(&round) {
            let mut proc = Proc { budget, d_norm: round, points: 0 };
            match proc.run(inst, 0, &hints.list()) {
                Solution::Unknown(reason) => last_reason = reason,
                decided => return decided,
            }
        }
    }
    Solution::Unknown(last_reason)
}

/// Independent re-check of an infeasibility certificate.
pub fn verify_unsat(inst: &IpExpInstance, cert: &UnsatCert, max_prec: u32) -> bool {
    match cert {
        UnsatCert::Constant => inst.n() == 0 && !inst.is_solution(&[]),
        UnsatCert::Empty(e) => e.verify(inst),
        UnsatCert::HullEmpty(c) => verify_hull_empty(inst, c, max_prec),
        UnsatCert::Slices { d, a, b, upper, lower, slices } => {
            if d.len() != inst.n() || d.iter().all(Zero::is_zero) {
                return false;
            }
            let Some((lo, hi)) = cone_bounds(inst, d, upper, lower, max_prec) else {
                return false;
            };
            if *a > lo || *b < hi {
                return false;
            }
            if b < a {
                return slices.is_empty();
            }
            let expected = (b - a + 1u32).to_usize().unwrap_or(usize::MAX);
            if slices.len() != expected {
                return false;
            }
            let mut i = a.clone();
            for s in slices {
                let ok = match s {
                    SliceCert::NoLatticePoints { i: si } => *si == i && hyperplane_solutions(d, &i).is_none(),
                    SliceCert::Restricted { i: si, cert } => {
                        *si == i
                            && match hyperplane_solutions(d, &i) {
                                None => true,
                                Some((h, nmat)) => verify_unsat(&substitute(inst, &nmat, &h), cert, max_prec),
                            }
                    }
                };
                if !ok {
                    return false;
                }
                i += 1u32;
            }
            true
        }
    }
}
