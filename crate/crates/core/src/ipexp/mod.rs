//! Integer points under an exponential-sum constraint.
//!
//! An instance asks for `x ∈ Z^n` with `f(x) < 1` and `Mx < c` (strictly, row by row),
//! where `f(x) = sum_i r_i prod_j s_ij^x_j` has positive rational coefficients and
//! bases. [`solve`] interleaves a plain enumeration of integer points by max-norm
//! shells with a recursive slicing procedure: when the feasible real region is thin
//! along some integer direction `d`, every integer solution lies on one of finitely
//! many hyperplanes `d·x = i`, each of which is reparametrised over `Z^(n-1)` and
//! solved recursively. Certificates are exact or interval-checked; when neither track
//! succeeds within budget the answer is `Unknown`.

mod certify;
mod interval;
mod lattice;
mod logpoly;
mod logvec;
mod numeric;
mod solve;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{pow_int, Rational};

pub use certify::{
    certify_empty, find_bounding_direction, BoundingDirection, ConeCert, DirectionProof, EmptyCert,
};
pub use interval::{exp, exp_point, ln, round_down, round_up, Interval};
pub use lattice::{hyperplane_solutions, mat_vec, substitute};
pub use logpoly::{determinant, LogPoly};
pub use logvec::{factor, logvec_sign, LogVector};
pub use solve::{enumerate_shell, solve, verify_unsat, Budget, Solution, SliceCert, UnsatCert};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpExpError {
    #[error("coefficient r[{0}] must be a positive rational")]
    NonPositiveCoefficient(usize),
    #[error("base s[{0}][{1}] must be a positive rational")]
    NonPositiveBase(usize, usize),
    #[error("term {0} has {1} bases, expected {2}")]
    Arity(usize, usize, usize),
    #[error("row {0} has {1} entries, expected {2}")]
    RowArity(usize, usize, usize),
    #[error("{0} rows but {1} right-hand sides")]
    RhsLength(usize, usize),
}

/// `f(x) = sum_i r_i prod_j s_ij^x_j` over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpSumFunction {
    n: usize,
    pub r: Vec<Rational>,
    pub s: Vec<Vec<Rational>>,
}

impl ExpSumFunction {
    pub fn new(n: usize, r: Vec<Rational>, s: Vec<Vec<Rational>>) -> Result<Self, IpExpError> {
        for (i, ri) in r.iter().enumerate() {
            if !ri.is_positive() {
                return Err(IpExpError::NonPositiveCoefficient(i));
            }
        }
        if s.len() != r.len() {
            return Err(IpExpError::Arity(s.len(), r.len(), r.len()));
        }
        for (i, row) in s.iter().enumerate() {
            if row.len() != n {
                return Err(IpExpError::Arity(i, row.len(), n));
            }
            if let Some(j) = row.iter().position(|x| !x.is_positive()) {
                return Err(IpExpError::NonPositiveBase(i, j));
            }
        }
        Ok(ExpSumFunction { n, r, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.r.len()
    }

    /// Value of term `i` at `x`.
    pub fn term(&self, i: usize, x: &[BigInt]) -> Rational {
        self.s[i]
            .iter()
            .zip(x)
            .fold(self.r[i].clone(), |acc, (b, e)| acc * pow_int(b, e))
    }

    pub fn eval(&self, x: &[BigInt]) -> Rational {
        (0..self.num_terms()).fold(Rational::zero(), |acc, i| acc + self.term(i, x))
    }
}

/// Exact value of `f` at an integer point; negative exponents take reciprocals.
pub fn eval_expsum(f: &ExpSumFunction, x: &[BigInt]) -> Rational {
    f.eval(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IpExpInstance {
    pub f: ExpSumFunction,
    pub m: Vec<Vec<BigInt>>,
    pub c: Vec<BigInt>,
}

impl IpExpInstance {
    pub fn new(f: ExpSumFunction, m: Vec<Vec<BigInt>>, c: Vec<BigInt>) -> Result<Self, IpExpError> {
        if m.len() != c.len() {
            return Err(IpExpError::RhsLength(m.len(), c.len()));
        }
        for (k, row) in m.iter().enumerate() {
            if row.len() != f.n() {
                return Err(IpExpError::RowArity(k, row.len(), f.n()));
            }
        }
        Ok(IpExpInstance { f, m, c })
    }

    /// The instance with `f` and the constraints `-x_j < 1`, i.e. `x >= 0` over the integers.
    pub fn nonnegative(f: ExpSumFunction) -> Self {
        let n = f.n();
        let m = (0..n)
            .map(|j| (0..n).map(|k| if j == k { -BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        IpExpInstance { f, m, c: vec![BigInt::one(); n] }
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn satisfies_rows(&self, x: &[BigInt]) -> bool {
        self.m.iter().zip(&self.c).all(|(row, c)| {
            let v: BigInt = row.iter().zip(x).map(|(a, b)| a * b).sum();
            v < *c
        })
    }

    /// `f(x) < 1` and `Mx < c`, exactly.
    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        x.len() == self.n() && self.satisfies_rows(x) && self.f.eval(x) < Rational::one()
    }
}
