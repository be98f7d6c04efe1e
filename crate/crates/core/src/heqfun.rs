//! Reference oracles for `HEQ_{k,k'}` and `NEQ_n`, and the instance spaces
//! the verification harness sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::{self, bits_to_string, MAX_K};

/// Largest `k'` accepted; entries are stored as `u32`.
pub const MAX_KPRIME: u32 = 31;

/// Default cap on the number of instance pairs an exhaustive sweep may visit.
pub const DEFAULT_PAIR_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeqParams {
    pub k: u32,
    pub kprime: u32,
}

impl HeqParams {
    pub fn new(k: u32, kprime: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if kprime == 0 {
            return Err(Error::Unsupported("k' must be at least 1".into()));
        }
        if k > MAX_K || kprime > MAX_KPRIME {
            return Err(Error::Unsupported(format!(
                "k = {k}, k' = {kprime} exceeds limits ({MAX_K}, {MAX_KPRIME})"
            )));
        }
        Ok(HeqParams { k, kprime })
    }

    /// Number of entries in one party's input, `2^k - 1`.
    pub fn input_len(&self) -> usize {
        (1usize << self.k) - 1
    }

    /// Alphabet size `2^{k'}` of each entry.
    pub fn alphabet(&self) -> u64 {
        1u64 << self.kprime
    }

    /// Number of inputs per party, `(2^{k'})^{2^k - 1}`, if it fits in a `u64`.
    pub fn input_count(&self) -> Option<u64> {
        let exp = u64::from(self.kprime) * self.input_len() as u64;
        (exp < 64).then(|| 1u64 << exp)
    }

    /// Number of ordered pairs `(a, b)`, if it fits in a `u64`.
    pub fn pair_count(&self) -> Option<u64> {
        let exp = 2 * u64::from(self.kprime) * self.input_len() as u64;
        (exp < 64).then(|| 1u64 << exp)
    }

    /// The `idx`-th input in mixed-radix order (entry 1 least significant).
    pub fn input_at(&self, idx: u64) -> HeqInput {
        let mask = self.alphabet() - 1;
        let entries = (0..self.input_len())
            .map(|pos| ((idx >> (pos as u32 * self.kprime)) & mask) as u32)
            .collect();
        HeqInput {
            params: *self,
            entries,
        }
    }
}

/// One party's input `(a_1, ..., a_{2^k - 1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeqInput {
    params: HeqParams,
    entries: Vec<u32>,
}

impl HeqInput {
    pub fn new(params: HeqParams, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != params.input_len() {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                params.input_len(),
                entries.len()
            )));
        }
        let bound = params.alphabet();
        if let Some(&bad) = entries.iter().find(|&&e| u64::from(e) >= bound) {
            return Err(Error::OutOfRange {
                value: u64::from(bad),
                bound,
            });
        }
        Ok(HeqInput { params, entries })
    }

    pub fn zeros(params: HeqParams) -> Self {
        HeqInput {
            params,
            entries: vec![0; params.input_len()],
        }
    }

    pub fn params(&self) -> HeqParams {
        self.params
    }

    /// Entries `a_1 .. a_{2^k-1}` as stored.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// `a_m` for `0 <= m < 2^k` with the convention `a_0 = 0`.
    #[inline]
    pub fn at(&self, m: usize) -> u32 {
        if m == 0 {
            0
        } else {
            self.entries[m - 1]
        }
    }

    /// Position of this input in [`HeqParams::input_at`] order.
    pub fn index(&self) -> u64 {
        self.entries
            .iter()
            .enumerate()
            .fold(0u64, |acc, (pos, &e)| {
                acc | (u64::from(e) << (pos as u32 * self.params.kprime))
            })
    }
}

/// The length-`2^k` vector `(0, delta(a_1, b_1), ..., delta(a_{2^k-1}, b_{2^k-1}))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaPattern(Vec<bool>);

impl DeltaPattern {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    /// Membership in `H_k`, via the local test (valid since bit 0 is 0).
    pub fn is_codeword(&self) -> bool {
        hadamard::first_local_violation(&self.0).is_none()
    }
}

impl std::fmt::Display for DeltaPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&bits_to_string(&self.0))
    }
}

#[inline]
pub fn delta(a: u64, b: u64) -> bool {
    a != b
}

fn check_same(a: &HeqInput, b: &HeqInput) -> Result<()> {
    if a.params != b.params {
        return Err(Error::ParamMismatch(format!(
            "{:?} vs {:?}",
            a.params, b.params
        )));
    }
    Ok(())
}

pub fn delta_pattern(a: &HeqInput, b: &HeqInput) -> Result<DeltaPattern> {
    check_same(a, b)?;
    let mut bits = Vec::with_capacity(a.entries.len() + 1);
    bits.push(false);
    bits.extend(a.entries.iter().zip(&b.entries).map(|(&x, &y)| x != y));
    Ok(DeltaPattern(bits))
}

/// `HEQ_{k,k'}(a, b)`; `false` exactly when the delta pattern is a nonzero codeword.
pub fn heq(a: &HeqInput, b: &HeqInput) -> Result<bool> {
    let p = delta_pattern(a, b)?;
    Ok(p.is_zero() || !p.is_codeword())
}

/// `NEQ_n(x, y)`.
pub fn neq(x: u64, y: u64, n: u32) -> Result<bool> {
    check_neq_range(x, y, n)?;
    Ok(x != y)
}

pub(crate) fn check_neq_range(x: u64, y: u64, n: u32) -> Result<()> {
    if n == 0 || n > 62 {
        return Err(Error::Unsupported(format!("n = {n} must lie in [1, 62]")));
    }
    let bound = 1u64 << n;
    for v in [x, y] {
        if v >= bound {
            return Err(Error::OutOfRange { value: v, bound });
        }
    }
    Ok(())
}

/// How [`Instances::new`] chooses pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum InstanceMode {
    Exhaustive,
    Diagonal,
    Sample { count: usize, seed: u64 },
}

/// A finite, indexable stream of `(Alice, Bob)` input pairs.
///
/// Exhaustive and diagonal streams are computed from the index on demand;
/// samples are drawn once up front so any index range can be handed to a
/// worker.
#[derive(Debug, Clone)]
pub struct Instances {
    params: HeqParams,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Exhaustive { per_side: u64 },
    Diagonal { per_side: u64 },
    Sampled(Vec<(HeqInput, HeqInput)>),
}

impl Instances {
    pub fn new(params: HeqParams, mode: InstanceMode, budget: u64) -> Result<Self> {
        let kind = match mode {
            InstanceMode::Exhaustive => {
                let pairs = params
                    .pair_count()
                    .filter(|&p| p <= budget)
                    .ok_or_else(|| Error::BudgetExceeded {
                        what: "exhaustive instance sweep",
                        needed: format!(
                            "2^{}",
                            2 * u64::from(params.kprime) * params.input_len() as u64
                        ),
                        budget: budget.to_string(),
                    })?;
                Kind::Exhaustive {
                    per_side: pairs.isqrt(),
                }
            }
            InstanceMode::Diagonal => {
                let n = params
                    .input_count()
                    .filter(|&n| n <= budget)
                    .ok_or_else(|| Error::BudgetExceeded {
                        what: "diagonal instance sweep",
                        needed: format!(
                            "2^{}",
                            u64::from(params.kprime) * params.input_len() as u64
                        ),
                        budget: budget.to_string(),
                    })?;
                Kind::Diagonal { per_side: n }
            }
            InstanceMode::Sample { count, seed } => {
                if count as u64 > budget {
                    return Err(Error::BudgetExceeded {
                        what: "sampled instance sweep",
                        needed: count.to_string(),
                        budget: budget.to_string(),
                    });
                }
                Kind::Sampled(sample_pairs(params, count, seed))
            }
        };
        Ok(Instances { params, kind })
    }

    pub fn params(&self) -> HeqParams {
        self.params
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            Kind::Exhaustive { per_side } => (per_side * per_side) as usize,
            Kind::Diagonal { per_side } => *per_side as usize,
            Kind::Sampled(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `idx`-th pair; Alice's input varies slowest in exhaustive mode.
    pub fn get(&self, idx: usize) -> (HeqInput, HeqInput) {
        match &self.kind {
            Kind::Exhaustive { per_side } => {
                let idx = idx as u64;
                (
                    self.params.input_at(idx / per_side),
                    self.params.input_at(idx % per_side),
                )
            }
            Kind::Diagonal { .. } => {
                let a = self.params.input_at(idx as u64);
                (a.clone(), a)
            }
            Kind::Sampled(v) => v[idx].clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (HeqInput, HeqInput)> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Seeded sample: indices `0 mod 3` are diagonal pairs, `1 mod 3` are planted
/// 0-instances `b = a xor mask(h(w))` with `w != 0`, `2 mod 3` are uniform.
fn sample_pairs(params: HeqParams, count: usize, seed: u64) -> Vec<(HeqInput, HeqInput)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = params.alphabet();
    let random_input = |rng: &mut ChaCha8Rng| HeqInput {
        params,
        entries: (0..params.input_len())
            .map(|_| rng.random_range(0..alphabet) as u32)
            .collect(),
    };
    (0..count)
        .map(|i| {
            let a = random_input(&mut rng);
            match i % 3 {
                0 => (a.clone(), a),
                1 => {
                    let w = rng.random_range(1..1u64 << params.k);
                    let word = hadamard::encode_mask(w, params.k);
                    let entries = a
                        .entries
                        .iter()
                        .enumerate()
                        .map(|(pos, &x)| {
                            if word.bits()[pos + 1] {
                                x ^ rng.random_range(1..alphabet) as u32
                            } else {
                                x
                            }
                        })
                        .collect();
                    (a, HeqInput { params, entries })
                }
                _ => {
                    let b = random_input(&mut rng);
                    (a, b)
                }
            }
        })
        .collect()
}

/// JSON form of one instance: `{"k":..,"kprime":..,"a":[..],"b":[..]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub k: u32,
    pub kprime: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl InstanceRecord {
    pub fn from_pair(a: &HeqInput, b: &HeqInput) -> Self {
        InstanceRecord {
            k: a.params.k,
            kprime: a.params.kprime,
            a: a.entries.clone(),
            b: b.entries.clone(),
        }
    }

    pub fn to_pair(&self) -> Result<(HeqInput, HeqInput)> {
        let params = HeqParams::new(self.k, self.kprime)?;
        Ok((
            HeqInput::new(params, self.a.clone())?,
            HeqInput::new(params, self.b.clone())?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(k: u32, kp: u32, e: &[u32]) -> HeqInput {
        HeqInput::new(HeqParams::new(k, kp).unwrap(), e.to_vec()).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!(!delta(5, 5));
        assert!(delta(0, 1));
        assert!(delta(3, 7));
    }

    #[test]
    fn pattern_and_heq_examples() {
        let zero = input(2, 1, &[0, 0, 0]);
        let code = input(2, 1, &[1, 0, 1]);
        let non = input(2, 1, &[1, 0, 0]);
        assert_eq!(delta_pattern(&zero, &zero).unwrap().to_string(), "0000");
        assert_eq!(delta_pattern(&zero, &code).unwrap().to_string(), "0101");
        assert_eq!(delta_pattern(&zero, &non).unwrap().to_string(), "0100");
        assert!(heq(&zero, &zero).unwrap());
        assert!(!heq(&zero, &code).unwrap());
        assert!(heq(&zero, &non).unwrap());
    }

    #[test]
    fn mismatched_params_rejected() {
        let a = input(2, 1, &[0, 0, 0]);
        let b = input(2, 2, &[0, 0, 0]);
        assert!(matches!(heq(&a, &b), Err(Error::ParamMismatch(_))));
    }

    #[test]
    fn input_validation() {
        let p = HeqParams::new(2, 1).unwrap();
        assert!(HeqInput::new(p, vec![0, 0]).is_err());
        assert_eq!(
            HeqInput::new(p, vec![0, 2, 0]),
            Err(Error::OutOfRange { value: 2, bound: 2 })
        );
        assert!(HeqParams::new(0, 1).is_err());
        assert!(HeqParams::new(1, 0).is_err());
    }

    #[test]
    fn neq_examples() {
        assert!(!neq(3, 3, 2).unwrap());
        assert!(neq(0, 1, 1).unwrap());
        assert!(neq(15, 0, 4).unwrap());
        assert!(neq(16, 0, 4).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let p21 = HeqParams::new(2, 1).unwrap();
        let p22 = HeqParams::new(2, 2).unwrap();
        assert_eq!(
            Instances::new(p21, InstanceMode::Exhaustive, DEFAULT_PAIR_BUDGET)
                .unwrap()
                .len(),
            64
        );
        let diag = Instances::new(p22, InstanceMode::Diagonal, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(diag.len(), 64);
        assert!(diag.iter().all(|(a, b)| a == b));
        let p33 = HeqParams::new(3, 3).unwrap();
        assert!(matches!(
            Instances::new(p33, InstanceMode::Exhaustive, DEFAULT_PAIR_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn exhaustive_visits_every_pair_once() {
        let p = HeqParams::new(2, 1).unwrap();
        let all = Instances::new(p, InstanceMode::Exhaustive, DEFAULT_PAIR_BUDGET).unwrap();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 64);
    }

    #[test]
    fn zero_instance_count_k2_kp1() {
        let p = HeqParams::new(2, 1).unwrap();
        let all = Instances::new(p, InstanceMode::Exhaustive, DEFAULT_PAIR_BUDGET).unwrap();
        let zeros = all.iter().filter(|(a, b)| !heq(a, b).unwrap()).count();
        assert_eq!(zeros, 24);
    }

    #[test]
    fn sampling_is_deterministic_and_plants_zero_instances() {
        let p = HeqParams::new(3, 3).unwrap();
        let mode = InstanceMode::Sample {
            count: 100,
            seed: 7,
        };
        let s1: Vec<_> = Instances::new(p, mode, DEFAULT_PAIR_BUDGET)
            .unwrap()
            .iter()
            .collect();
        let s2: Vec<_> = Instances::new(p, mode, DEFAULT_PAIR_BUDGET)
            .unwrap()
            .iter()
            .collect();
        assert_eq!(s1, s2);
        for (i, (a, b)) in s1.iter().enumerate() {
            match i % 3 {
                0 => assert_eq!(a, b),
                1 => assert!(!heq(a, b).unwrap()),
                _ => {}
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let p = HeqParams::new(2, 2).unwrap();
        for idx in 0..64 {
            assert_eq!(p.input_at(idx).index(), idx);
        }
    }

    #[test]
    fn instance_json_shape() {
        let a = input(2, 1, &[0, 0, 0]);
        let b = input(2, 1, &[1, 0, 1]);
        let rec = InstanceRecord::from_pair(&a, &b);
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"k":2,"kprime":1,"a":[0,0,0],"b":[1,0,1]}"#
        );
        assert_eq!(rec.to_pair().unwrap(), (a, b));
    }
}
