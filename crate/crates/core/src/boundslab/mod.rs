//! Lower-bound machinery for `HEQ_{k,k'}`.
//!
//! * [`cover`]: exact minimum 1-covers by monochromatic rectangles.
//! * [`clique`]: the largest input set whose pairwise delta patterns avoid
//!   the Hadamard code.
//! * [`poly`]: the polynomial-method certificate that such sets are small.
//! * [`counting`]: the binomial sums and exponent bounds, in exact integers.
//!
//! All arithmetic here is exact: arbitrary-precision integers and rationals.

mod bits;
pub mod clique;
pub mod counting;
pub mod cover;
pub mod poly;

pub use clique::{
    all_condition_sets, max_condition_set, satisfies_condition, CliqueMode, CliqueResult,
    ConditionGraph,
};
pub use counting::{
    bound_table, check_counting_inequalities, diagonal_cover_lower_bound, monomial_count_bound,
    BoundRow, CountingReport,
};
pub use cover::{min_one_cover, CoverResult, CoverTarget, FunctionTable, RectCover, Rectangle};
pub use poly::{
    build_fa, certify_independence, epsilon_poly, reduce_poly, Certificate, CertifyError, MultiPoly,
};

/// Default cap on `|X| * |Y|` for cover computations.
pub const DEFAULT_COVER_BUDGET: u64 = 1 << 14;
/// Default cap on condition-graph vertices in exact mode.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 1 << 12;
/// Default cap on the monomial basis for independence certificates.
pub const DEFAULT_MONOMIAL_BUDGET: u64 = 1 << 12;
