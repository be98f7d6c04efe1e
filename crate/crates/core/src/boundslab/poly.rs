//! Multivariate polynomials over the rationals and the independence
//! certificate for condition sets.
//!
//! For an input `a` the polynomial
//!
//! ```text
//! f_a(X) = prod_{i in S_k} (1 - eps_{a_i}(X_i) - eps_{a_[i]}(X_[i]) - eps_{a_{i-[i]}}(X_{i-[i]}))
//! ```
//!
//! is odd at `X = a` and even at every other member of a condition set, so
//! the reduced polynomials `f'_a` of a condition set are linearly
//! independent over `Q`. [`certify_independence`] checks every step of that
//! argument on a concrete set.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::clique::satisfies_condition;
use super::counting::monomial_count_bound;
use crate::error::Error;
use crate::hadamard::index;
use crate::heqfun::HeqInput;

/// Exponent vector; entry `v` is the exponent of `X_{v+1}`.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// `sum_e coeffs[e] X_{var+1}^e`.
    pub fn univariate(nvars: usize, var: usize, coeffs: &[BigRational]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in coeffs.iter().enumerate() {
            let mut m = vec![0; nvars];
            m[var] = e as u32;
            p.add_term(m, c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Exact value at an integer point.
    pub fn eval(&self, point: &[u64]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigInt::one();
            for (&x, &e) in point.iter().zip(m) {
                if e > 0 {
                    v *= num_traits::pow(BigInt::from(x), e as usize);
                }
            }
            acc += c * BigRational::from_integer(v);
        }
        acc
    }

    /// Largest number of distinct variables in any monomial.
    pub fn max_vars_per_monomial(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().filter(|&&e| e > 0).count())
            .max()
            .unwrap_or(0)
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let abs = c.abs();
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        format!("X{}", v + 1)
                    } else {
                        format!("X{}^{}", v + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            f.write_str(&vars.join("*"))?;
        }
        Ok(())
    }
}

/// Coefficients (constant term first) of `1 - prod_{t != a} (X - t) / (a - t)`
/// over `t in [0, 2^{k'})`.
fn epsilon_coeffs(a: u64, kprime: u32) -> Vec<BigRational> {
    let q = 1u64 << kprime;
    let mut lagrange = vec![BigRational::one()];
    for t in (0..q).filter(|&t| t != a) {
        let denom = rat(a as i64 - t as i64);
        // multiply by (X - t) / (a - t)
        let mut next = vec![BigRational::zero(); lagrange.len() + 1];
        for (e, c) in lagrange.iter().enumerate() {
            next[e + 1] += c / &denom;
            next[e] -= c * rat(t as i64) / &denom;
        }
        lagrange = next;
    }
    let mut eps: Vec<BigRational> = lagrange.into_iter().map(|c| -c).collect();
    eps[0] += BigRational::one();
    eps
}

/// The univariate polynomial `eps_a` with `eps_a(b) = delta(a, b)` on `[0, 2^{k'})`.
pub fn epsilon_poly(a: u64, kprime: u32) -> Result<MultiPoly, Error> {
    if kprime == 0 || kprime > 16 {
        return Err(Error::Unsupported(format!("k' = {kprime}")));
    }
    let q = 1u64 << kprime;
    if a >= q {
        return Err(Error::OutOfRange { value: a, bound: q });
    }
    Ok(MultiPoly::univariate(1, 0, &epsilon_coeffs(a, kprime)))
}

fn factor(a: &HeqInput, i: usize) -> MultiPoly {
    let p = a.params();
    let nvars = p.input_len();
    let top = index::floor_pow2(i);
    let mut f = MultiPoly::one(nvars);
    for pos in [i, top, i - top] {
        let eps = epsilon_coeffs(u64::from(a.at(pos)), p.kprime);
        f = f.sub(&MultiPoly::univariate(nvars, pos - 1, &eps));
    }
    f
}

/// `f_a`, the unreduced product over `S_k`. Variable `X_i` is index `i - 1`.
pub fn build_fa(a: &HeqInput) -> MultiPoly {
    let p = a.params();
    index::non_powers(p.k).fold(MultiPoly::one(p.input_len()), |acc, i| {
        acc.mul(&factor(a, i))
    })
}

/// `f'_a`: reduces after every factor, which gives the same result as
/// reducing the full product since reduction is a ring homomorphism.
pub fn build_fa_reduced(a: &HeqInput) -> MultiPoly {
    let p = a.params();
    let mut table = ReductionTable::new(p.kprime);
    index::non_powers(p.k).fold(MultiPoly::one(p.input_len()), |acc, i| {
        let prod = acc.mul(&factor(a, i));
        table.reduce(&prod)
    })
}

/// Remainders of `X^e` modulo `X (X - 1) ... (X - (2^{k'} - 1))`.
struct ReductionTable {
    modulus: Vec<BigRational>,
    rems: Vec<Vec<BigRational>>,
}

impl ReductionTable {
    fn new(kprime: u32) -> Self {
        let q = 1usize << kprime;
        // monic falling factorial, constant term first
        let mut modulus = vec![BigRational::one()];
        for t in 0..q as i64 {
            let mut next = vec![BigRational::zero(); modulus.len() + 1];
            for (e, c) in modulus.iter().enumerate() {
                next[e + 1] += c.clone();
                next[e] -= c * rat(t);
            }
            modulus = next;
        }
        ReductionTable {
            modulus,
            rems: Vec::new(),
        }
    }

    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn rem(&mut self, e: usize) -> &[BigRational] {
        let q = self.degree();
        while self.rems.len() <= e {
            let n = self.rems.len();
            let r = if n < q {
                let mut v = vec![BigRational::zero(); n + 1];
                v[n] = BigRational::one();
                v
            } else {
                // X * rem(n - 1), then eliminate the X^q term.
                let prev = &self.rems[n - 1];
                let mut v = vec![BigRational::zero(); q + 1];
                for (d, c) in prev.iter().enumerate() {
                    v[d + 1] += c.clone();
                }
                let lead = v[q].clone();
                if !lead.is_zero() {
                    for (d, m) in self.modulus.iter().enumerate() {
                        v[d] -= &lead * m;
                    }
                }
                v.truncate(q);
                v
            };
            self.rems.push(r);
        }
        &self.rems[e]
    }

    fn reduce(&mut self, p: &MultiPoly) -> MultiPoly {
        let q = self.degree() as u32;
        let mut out = MultiPoly::zero(p.nvars);
        for (m, c) in &p.terms {
            let mut partial: Vec<(Monomial, BigRational)> = vec![(m.clone(), c.clone())];
            for v in 0..m.len() {
                if m[v] < q {
                    continue;
                }
                let rem = self.rem(m[v] as usize).to_vec();
                partial = partial
                    .into_iter()
                    .flat_map(|(mono, coeff)| {
                        rem.iter().enumerate().filter(|(_, rc)| !rc.is_zero()).map(
                            move |(d, rc)| {
                                let mut mono = mono.clone();
                                mono[v] = d as u32;
                                (mono, &coeff * rc)
                            },
                        )
                    })
                    .collect();
            }
            for (mono, coeff) in partial {
                out.add_term(mono, coeff);
            }
        }
        out
    }
}

/// Reduces every exponent below `2^{k'}` modulo `X_j (X_j - 1) ... (X_j - (2^{k'} - 1))`.
/// The result agrees with `p` on the grid `[0, 2^{k'})^n`.
pub fn reduce_poly(p: &MultiPoly, kprime: u32) -> MultiPoly {
    ReductionTable::new(kprime).reduce(p)
}

/// Rank over `Q` by Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pv = rows[rank][col].clone();
        let prow: Vec<BigRational> = rows[rank].iter().map(|x| x / &pv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &factor * p;
                }
            }
        }
        rows[rank] = prow;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Setup(#[from] Error),

    #[error("pair ({a:?}, {b:?}) violates the condition: delta pattern is a codeword")]
    ConditionViolated { a: Vec<u32>, b: Vec<u32> },

    #[error("monomial with {vars} distinct variables exceeds the cap {cap} in f'_{a:?}")]
    VariableCap {
        a: Vec<u32>,
        vars: usize,
        cap: usize,
    },

    #[error("f'_{a:?} has exponent {exponent} at or above {limit}")]
    NotReduced {
        a: Vec<u32>,
        exponent: u32,
        limit: u32,
    },

    #[error("f'_{a:?}({b:?}) = {reduced} but f_a(b) = {direct}")]
    ReductionMismatch {
        a: Vec<u32>,
        b: Vec<u32>,
        reduced: String,
        direct: String,
    },

    #[error("parity of f'_{a:?}({b:?}) = {value} is wrong")]
    Parity {
        a: Vec<u32>,
        b: Vec<u32>,
        value: String,
    },

    #[error("rank {rank} is below the set size {size}")]
    RankDeficient { rank: usize, size: usize },

    #[error("set size {size} exceeds the monomial basis size {bound}")]
    ExceedsBasis { size: usize, bound: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub k: u32,
    pub kprime: u32,
    pub size: usize,
    pub rank: usize,
    #[serde(serialize_with = "ser_big")]
    pub basis_bound: BigUint,
    pub monomials_used: usize,
    pub max_vars_per_monomial: usize,
    pub variable_cap: usize,
    /// `f'_a(b) mod 2`, rows indexed by `a`, columns by `b`.
    pub parity_matrix: Vec<Vec<u8>>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `f_a(b)` from the factor values directly: each factor is
/// `1 - delta - delta - delta` evaluated on the entries.
fn direct_value(a: &HeqInput, b: &HeqInput) -> i64 {
    index::non_powers(a.params().k)
        .map(|i| {
            let top = index::floor_pow2(i);
            1 - [i, top, i - top]
                .iter()
                .map(|&p| i64::from(a.at(p) != b.at(p)))
                .sum::<i64>()
        })
        .product()
}

/// Verifies, for a condition set `set`, every step of the linear
/// independence argument: the reduced polynomials respect the variable and
/// degree caps and agree with `f_a` on the set, the evaluation matrix is the
/// identity mod 2, the coefficient matrix has full rational rank and the set
/// is no larger than the monomial basis.
pub fn certify_independence(
    set: &[HeqInput],
    monomial_budget: u64,
) -> Result<Certificate, CertifyError> {
    let Some(first) = set.first() else {
        return Err(Error::InvalidInput("empty set".into()).into());
    };
    let params = first.params();
    if let Some(bad) = set.iter().find(|a| a.params() != params) {
        return Err(Error::ParamMismatch(format!("{:?} vs {:?}", params, bad.params())).into());
    }
    let basis_bound = monomial_count_bound(params.k, params.kprime);
    if basis_bound > BigUint::from(monomial_budget) {
        return Err(Error::BudgetExceeded {
            what: "monomial basis",
            needed: basis_bound.to_string(),
            budget: monomial_budget.to_string(),
        }
        .into());
    }
    if let Some((i, j)) = satisfies_condition(set)? {
        return Err(CertifyError::ConditionViolated {
            a: set[i].entries().to_vec(),
            b: set[j].entries().to_vec(),
        });
    }

    let cap = index::non_powers_len(params.k);
    let limit = 1u32 << params.kprime;
    let polys: Vec<MultiPoly> = set.iter().map(build_fa_reduced).collect();
    let mut max_vars = 0;
    for (a, f) in set.iter().zip(&polys) {
        let vars = f.max_vars_per_monomial();
        max_vars = max_vars.max(vars);
        if vars > cap {
            return Err(CertifyError::VariableCap {
                a: a.entries().to_vec(),
                vars,
                cap,
            });
        }
        if f.max_exponent() >= limit {
            return Err(CertifyError::NotReduced {
                a: a.entries().to_vec(),
                exponent: f.max_exponent(),
                limit,
            });
        }
    }

    let mut parity_matrix = Vec::with_capacity(set.len());
    for (a, f) in set.iter().zip(&polys) {
        let mut row = Vec::with_capacity(set.len());
        for b in set {
            let point: Vec<u64> = b.entries().iter().map(|&e| u64::from(e)).collect();
            let reduced = f.eval(&point);
            let direct = direct_value(a, b);
            if reduced != rat(direct) {
                return Err(CertifyError::ReductionMismatch {
                    a: a.entries().to_vec(),
                    b: b.entries().to_vec(),
                    reduced: reduced.to_string(),
                    direct: direct.to_string(),
                });
            }
            let odd = direct.rem_euclid(2) == 1;
            if odd != (a == b) {
                return Err(CertifyError::Parity {
                    a: a.entries().to_vec(),
                    b: b.entries().to_vec(),
                    value: direct.to_string(),
                });
            }
            row.push(u8::from(odd));
        }
        parity_matrix.push(row);
    }

    let mut columns: Vec<&Monomial> = polys.iter().flat_map(|p| p.terms.keys()).collect();
    columns.sort();
    columns.dedup();
    let matrix: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| columns.iter().map(|m| p.coefficient(m)).collect())
        .collect();
    let rank = rational_rank(matrix);
    if rank != set.len() {
        return Err(CertifyError::RankDeficient {
            rank,
            size: set.len(),
        });
    }
    if BigUint::from(set.len()) > basis_bound {
        return Err(CertifyError::ExceedsBasis {
            size: set.len(),
            bound: basis_bound.to_string(),
        });
    }
    Ok(Certificate {
        k: params.k,
        kprime: params.kprime,
        size: set.len(),
        rank,
        monomials_used: columns.len(),
        basis_bound,
        max_vars_per_monomial: max_vars,
        variable_cap: cap,
        parity_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heqfun::HeqParams;

    fn input(k: u32, kp: u32, e: &[u32]) -> HeqInput {
        HeqInput::new(HeqParams::new(k, kp).unwrap(), e.to_vec()).unwrap()
    }

    fn x(nvars: usize, v: usize) -> MultiPoly {
        MultiPoly::univariate(nvars, v, &[rat(0), rat(1)])
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_poly(0, 1).unwrap(), x(1, 0));
        assert_eq!(epsilon_poly(1, 1).unwrap(), MultiPoly::one(1).sub(&x(1, 0)));
        for kp in 1..=3 {
            for a in 0..1u64 << kp {
                let e = epsilon_poly(a, kp).unwrap();
                for b in 0..1u64 << kp {
                    assert_eq!(e.eval(&[b]), rat(i64::from(a != b)));
                }
            }
        }
        assert!(epsilon_poly(2, 1).is_err());
    }

    #[test]
    fn fa_examples() {
        let f = build_fa(&input(2, 1, &[0, 0, 0]));
        let expect = MultiPoly::one(3).sub(&x(3, 2)).sub(&x(3, 1)).sub(&x(3, 0));
        assert_eq!(f, expect);
        assert_eq!(f.to_string(), "1 - X3 - X2 - X1");
        assert_eq!(build_fa(&input(1, 3, &[5])), MultiPoly::one(1));
    }

    #[test]
    fn reduce_examples() {
        let x2 = x(1, 0).mul(&x(1, 0));
        assert_eq!(reduce_poly(&x2, 1), x(1, 0));
        let p = MultiPoly::one(2).sub(&x(2, 1));
        assert_eq!(reduce_poly(&p, 1), p);
    }

    #[test]
    fn incremental_reduction_matches_full() {
        let a = input(3, 1, &[1, 0, 1, 1, 0, 0, 1]);
        let full = reduce_poly(&build_fa(&a), 1);
        assert_eq!(full, build_fa_reduced(&a));
        assert!(full.max_vars_per_monomial() <= 4);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(
            rational_rank(vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]),
            1
        );
        assert_eq!(
            rational_rank(vec![vec![rat(1), rat(2)], vec![rat(0), rat(4)]]),
            2
        );
        assert_eq!(rational_rank(vec![vec![rat(0)]]), 0);
    }

    #[test]
    fn certificate_example() {
        let set = [input(2, 1, &[0, 0, 0]), input(2, 1, &[1, 0, 0])];
        let c = certify_independence(&set, 1 << 12).unwrap();
        assert_eq!(c.rank, 2);
        assert_eq!(c.parity_matrix, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(c.basis_bound, BigUint::from(4u32));
        let single = certify_independence(&set[..1], 1 << 12).unwrap();
        assert_eq!(single.rank, 1);
    }

    #[test]
    fn certificate_rejects_bad_sets() {
        let bad = [input(2, 1, &[0, 0, 0]), input(2, 1, &[1, 0, 1])];
        assert!(matches!(
            certify_independence(&bad, 1 << 12),
            Err(CertifyError::ConditionViolated { .. })
        ));
        let big = [input(3, 3, &[0; 7])];
        assert!(matches!(
            certify_independence(&big, 1 << 12),
            Err(CertifyError::Setup(_))
        ));
    }
}
