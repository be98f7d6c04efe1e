//! Binomial sums, exponent bounds and the bound table, in exact integers.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// `C(n, i)` for `i = 0 ..= n`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        row.push(c.clone());
    }
    row
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Size of the monomial basis for the reduced polynomials:
/// `sum_{i=0}^{2^k-k-1} (2^{k'}-1)^i C(2^k-1, i)`.
pub fn monomial_count_bound(k: u32, kprime: u32) -> BigUint {
    let n = (1u64 << k) - 1;
    let top = (1u64 << k) - u64::from(k) - 1;
    let base = pow2(u64::from(kprime)) - 1u32;
    let row = binomial_row(n);
    let mut power = BigUint::one();
    let mut sum = BigUint::zero();
    for c in row.iter().take(top as usize + 1) {
        sum += &power * c;
        power *= &base;
    }
    sum
}

/// The looser sum `sum_{i=0}^{2^k-k} (2^{k'})^i C(2^k, i)`.
pub fn relaxed_count_bound(k: u32, kprime: u32) -> BigUint {
    let n = 1u64 << k;
    let top = n - u64::from(k);
    binomial_row(n)
        .iter()
        .take(top as usize + 1)
        .enumerate()
        .map(|(i, c)| c << (i as u64 * u64::from(kprime)))
        .sum()
}

/// Exponent of the condition-set size bound, `k' 2^k - k (k' - k - 1)`.
pub fn condition_bound_exponent(k: u32, kprime: u32) -> i64 {
    let (k, kp) = (i64::from(k), i64::from(kprime));
    kp * (1i64 << k) - k * (kp - k - 1)
}

/// Classical lower bound `k (k' - k) - (k + k')` on `N(HEQ_{k,k'})`.
pub fn classical_lower_bound(k: u32, kprime: u32) -> i64 {
    let (k, kp) = (i64::from(k), i64::from(kprime));
    k * (kp - k) - (k + kp)
}

/// The quantum protocol's budget `3 (k + k')`.
pub fn quantum_upper_bound(k: u32, kprime: u32) -> i64 {
    3 * (i64::from(k) + i64::from(kprime))
}

/// `ceil((2^{k'})^{2^k - 1} / max_set)`: rectangles needed to cover the diagonal
/// when no 1-monochromatic rectangle holds more than `max_set` diagonal cells.
pub fn diagonal_cover_lower_bound(k: u32, kprime: u32, max_set: &BigUint) -> Result<BigUint> {
    if max_set.is_zero() {
        return Err(Error::InvalidInput(
            "maximum set size must be at least 1".into(),
        ));
    }
    let total = pow2(u64::from(kprime) * ((1u64 << k) - 1));
    Ok(Integer::div_ceil(&total, max_set))
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2_big(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        (n - 1u32).bits()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub k: u32,
    pub kprime: u32,
    /// Bit lengths of the exact quantities.
    pub basis_bits: u64,
    pub relaxed_bits: u64,
    pub condition_bound_exponent: i64,
    /// `k' 2^k - k k' + k^2 - ceil(k log2 k)`, the integer part of the
    /// lower exponent rounded down.
    pub lower_exponent_floor: i64,
    pub basis_le_relaxed: bool,
    pub relaxed_le_condition_bound: bool,
    pub relaxed_ge_dominant_term: bool,
    pub binomial_ge_power_ratio: bool,
    pub relaxed_ge_lower: bool,
    pub terms_nondecreasing: bool,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        self.basis_le_relaxed
            && self.relaxed_le_condition_bound
            && self.relaxed_ge_dominant_term
            && self.binomial_ge_power_ratio
            && self.relaxed_ge_lower
            && self.terms_nondecreasing
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub k: u32,
    pub kprime: u32,
    pub check: &'static str,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub cells: Vec<CellReport>,
    /// Cells outside `k >= 3, k' >= k`, where no bound is claimed.
    pub skipped: Vec<(u32, u32)>,
    pub violations: Vec<Violation>,
}

pub const MAX_SWEEP_K: u32 = 10;
pub const MAX_SWEEP_KPRIME: u32 = 16;

/// Checks, for each `(k, k')` with `k >= 3` and `k' >= k`:
///
/// 1. basis sum `<=` relaxed sum;
/// 2. relaxed sum `<= 2^{k' 2^k - k (k' - k - 1)}`;
/// 3. relaxed sum `>= (2^{k'})^{2^k - k} C(2^k, k)`;
/// 4. `C(2^k, k) k^k >= 2^{k^2}`;
/// 5. relaxed sum `* k^k >= 2^{k' 2^k - k k' + k^2}`, i.e. the sum is at
///    least `2^{k' 2^k - k k' + k^2 - k log2 k}` with no rounding;
/// 6. `h(j) = (2^{k'})^j C(2^k, j)` is nondecreasing on `[0, 2^k]`.
pub fn check_counting_inequalities(
    ks: RangeInclusive<u32>,
    kprimes: RangeInclusive<u32>,
) -> Result<CountingReport> {
    if *ks.end() > MAX_SWEEP_K
        || *kprimes.end() > MAX_SWEEP_KPRIME
        || *ks.start() == 0
        || *kprimes.start() == 0
    {
        return Err(Error::BudgetExceeded {
            what: "counting sweep",
            needed: format!("k in {ks:?}, k' in {kprimes:?}"),
            budget: format!("1 <= k <= {MAX_SWEEP_K}, 1 <= k' <= {MAX_SWEEP_KPRIME}"),
        });
    }
    let mut skipped = Vec::new();
    let mut todo = Vec::new();
    for k in ks {
        for kp in kprimes.clone() {
            if k >= 3 && kp >= k {
                todo.push((k, kp));
            } else {
                skipped.push((k, kp));
            }
        }
    }
    let results: Vec<(CellReport, Vec<Violation>)> =
        todo.par_iter().map(|&(k, kp)| check_cell(k, kp)).collect();
    let mut cells = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    for (c, v) in results {
        cells.push(c);
        violations.extend(v);
    }
    Ok(CountingReport {
        cells,
        skipped,
        violations,
    })
}

fn check_cell(k: u32, kprime: u32) -> (CellReport, Vec<Violation>) {
    let n = 1u64 << k;
    let (k64, kp64) = (u64::from(k), u64::from(kprime));
    let mut violations = Vec::new();
    let mut check = |name: &'static str, ok: bool, lhs: &BigUint, rhs: &BigUint| {
        if !ok {
            violations.push(Violation {
                k,
                kprime,
                check: name,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        ok
    };

    let basis = monomial_count_bound(k, kprime);
    let relaxed = relaxed_count_bound(k, kprime);
    let exp = condition_bound_exponent(k, kprime);
    let cond_bound = pow2(exp as u64);
    let row = binomial_row(n);
    let binom_k = &row[k as usize];
    let dominant = binom_k << (kp64 * (n - k64));
    let k_pow_k = num_traits::pow(BigUint::from(k), k as usize);
    let power_ratio = pow2(k64 * k64);
    let lower_rhs = pow2(kp64 * n - k64 * kp64 + k64 * k64);
    let scaled = &relaxed * &k_pow_k;
    let bin_scaled = binom_k * &k_pow_k;

    let a = check("basis <= relaxed", basis <= relaxed, &basis, &relaxed);
    let b = check(
        "relaxed <= condition bound",
        relaxed <= cond_bound,
        &relaxed,
        &cond_bound,
    );
    let c1 = check(
        "relaxed >= dominant term",
        relaxed >= dominant,
        &relaxed,
        &dominant,
    );
    let c2 = check(
        "C(2^k,k) k^k >= 2^{k^2}",
        bin_scaled >= power_ratio,
        &bin_scaled,
        &power_ratio,
    );
    let c3 = check(
        "relaxed k^k >= 2^{lower}",
        scaled >= lower_rhs,
        &scaled,
        &lower_rhs,
    );

    let mut d = true;
    for j in 0..n as usize {
        let here = &row[j] << (j as u64 * kp64);
        let next = &row[j + 1] << ((j as u64 + 1) * kp64);
        if next < here {
            d = check("h nondecreasing", false, &here, &next);
            break;
        }
    }

    // floor(k log2 k) = bits(k^k) - 1; the exponent floor subtracts its ceiling.
    let klogk_floor = k_pow_k.bits() as i64 - 1;
    let exact_power = k.is_power_of_two();
    let klogk_ceil = if exact_power {
        klogk_floor
    } else {
        klogk_floor + 1
    };
    let lower_exponent_floor =
        (kp64 * n) as i64 - (k64 * kp64) as i64 + (k64 * k64) as i64 - klogk_ceil;

    let cell = CellReport {
        k,
        kprime,
        basis_bits: basis.bits(),
        relaxed_bits: relaxed.bits(),
        condition_bound_exponent: exp,
        lower_exponent_floor,
        basis_le_relaxed: a,
        relaxed_le_condition_bound: b,
        relaxed_ge_dominant_term: c1,
        binomial_ge_power_ratio: c2,
        relaxed_ge_lower: c3,
        terms_nondecreasing: d,
    };
    (cell, violations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub k: u32,
    pub kprime: u32,
    pub classical_lower: i64,
    pub quantum_upper: i64,
    /// Rows with `k' = 2k`.
    pub quadratic_separation: bool,
}

pub fn bound_row(k: u32, kprime: u32) -> BoundRow {
    BoundRow {
        k,
        kprime,
        classical_lower: classical_lower_bound(k, kprime),
        quantum_upper: quantum_upper_bound(k, kprime),
        quadratic_separation: kprime == 2 * k,
    }
}

/// Rows for every `(k, k')` in the grid with `k' >= k`, plus the `k' = 2k` row
/// for every `k` in `separation_ks`. Sorted by `(k, k')`, no duplicates.
pub fn bound_table(
    ks: RangeInclusive<u32>,
    kprimes: RangeInclusive<u32>,
    separation_ks: RangeInclusive<u32>,
) -> Vec<BoundRow> {
    let mut cells: Vec<(u32, u32)> = ks
        .flat_map(|k| {
            kprimes
                .clone()
                .filter(move |&kp| kp >= k)
                .map(move |kp| (k, kp))
        })
        .chain(separation_ks.map(|k| (k, 2 * k)))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.into_iter().map(|(k, kp)| bound_row(k, kp)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_examples() {
        assert_eq!(monomial_count_bound(1, 1), BigUint::from(1u32));
        assert_eq!(monomial_count_bound(2, 1), BigUint::from(4u32));
        assert_eq!(monomial_count_bound(2, 2), BigUint::from(10u32));
        for k in 1..5 {
            for kp in 1..6 {
                assert!(monomial_count_bound(k, kp) <= monomial_count_bound(k, kp + 1));
            }
        }
    }

    #[test]
    fn binomials() {
        let r = binomial_row(8);
        assert_eq!(
            r.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
            "1,8,28,56,70,56,28,8,1"
        );
    }

    #[test]
    fn k3_kp3_cell() {
        assert_eq!(condition_bound_exponent(3, 3), 27);
        // sum_{i=0}^{5} 8^i C(8, i)
        let expect: u64 = [1u64, 8, 28, 56, 70, 56]
            .iter()
            .enumerate()
            .map(|(i, c)| c * 8u64.pow(i as u32))
            .sum();
        assert_eq!(relaxed_count_bound(3, 3), BigUint::from(expect));
        let (cell, v) = check_cell(3, 3);
        assert!(cell.passed(), "{v:?}");
    }

    #[test]
    fn diagonal_bounds() {
        assert_eq!(
            diagonal_cover_lower_bound(2, 1, &BigUint::from(2u32)).unwrap(),
            BigUint::from(4u32)
        );
        let a = pow2(condition_bound_exponent(3, 6) as u64);
        let r = diagonal_cover_lower_bound(3, 6, &a).unwrap();
        assert_eq!(r, BigUint::one());
        assert_eq!(ceil_log2_big(&r), 0);
        let a = pow2(condition_bound_exponent(3, 9) as u64);
        assert_eq!(
            ceil_log2_big(&diagonal_cover_lower_bound(3, 9, &a).unwrap()),
            6
        );
        assert_eq!(classical_lower_bound(3, 9), 6);
        assert!(diagonal_cover_lower_bound(2, 1, &BigUint::zero()).is_err());
    }

    #[test]
    fn separation_rows() {
        for k in 3..=20 {
            let row = bound_row(k, 2 * k);
            assert!(row.quadratic_separation);
            assert_eq!(row.classical_lower, i64::from(k * k) - 3 * i64::from(k));
            assert_eq!(row.quantum_upper, 9 * i64::from(k));
        }
        assert_eq!(bound_row(3, 6).classical_lower, 0);
    }

    #[test]
    fn sweep_rejects_large_ranges() {
        assert!(check_counting_inequalities(3..=11, 3..=12).is_err());
    }

    #[test]
    fn table_dedups() {
        let t = bound_table(3..=4, 3..=8, 3..=5);
        assert!(t
            .windows(2)
            .all(|w| (w[0].k, w[0].kprime) < (w[1].k, w[1].kprime)));
        assert!(t.iter().any(|r| r.k == 5 && r.kprime == 10));
    }
}
