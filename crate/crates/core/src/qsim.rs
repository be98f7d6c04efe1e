//! Exact state-vector simulation for the protocol registers.
//!
//! A [`DyadicState`] on a `k`-qubit register `|m>` and a `k'`-qubit register
//! `|r>` stores integer amplitudes `z(m, r)` and a scale `s`; the physical
//! amplitude is `z / sqrt(2^s)`. State preparation, `±1` phases, XOR
//! permutations and Hadamard layers all keep this form, so measurement
//! probabilities come out as exact rationals.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heqfun::{check_neq_range, HeqInput};

/// Exact probability `p / q`, always in lowest terms.
pub type Probability = Ratio<u128>;

/// Dense tables are limited to `2^24` amplitudes.
pub const MAX_QUBITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicState {
    k: u32,
    kprime: u32,
    #[serde(rename = "z")]
    amps: Vec<i64>,
    #[serde(rename = "s")]
    scale: u32,
}

impl DyadicState {
    /// `|0>|0>` on `k + k'` qubits.
    pub fn zero(k: u32, kprime: u32) -> Result<Self> {
        if k + kprime > MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "{} qubits exceed the dense limit of {MAX_QUBITS}",
                k + kprime
            )));
        }
        let mut amps = vec![0; 1usize << (k + kprime)];
        amps[0] = 1;
        Ok(DyadicState {
            k,
            kprime,
            amps,
            scale: 0,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kprime(&self) -> u32 {
        self.kprime
    }

    pub fn qubits(&self) -> u32 {
        self.k + self.kprime
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    #[inline]
    fn slot(&self, m: usize, r: usize) -> usize {
        (m << self.kprime) | r
    }

    /// The integer numerator `z(m, r)`.
    pub fn amplitude(&self, m: usize, r: usize) -> i64 {
        self.amps[self.slot(m, r)]
    }

    /// `sum z^2`; equals `2^s` for a normalized state.
    pub fn norm_squared(&self) -> u128 {
        self.amps
            .iter()
            .map(|&z| (z as i128 * z as i128) as u128)
            .sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.scale < 128 && self.norm_squared() == 1u128 << self.scale
    }

    fn check_dims(&self, input: &HeqInput) -> Result<()> {
        let p = input.params();
        if p.k != self.k || p.kprime != self.kprime {
            return Err(Error::ParamMismatch(format!(
                "state is ({}, {}) qubits, input has k = {}, k' = {}",
                self.k, self.kprime, p.k, p.kprime
            )));
        }
        Ok(())
    }

    /// `2^{-k/2} sum_m |m>|a_m>` with `a_0 = 0`.
    pub fn prepare_indexed_superposition(a: &HeqInput) -> Result<Self> {
        let p = a.params();
        let mut state = DyadicState::zero(p.k, p.kprime)?;
        state.amps[0] = 0;
        for m in 0..1usize << p.k {
            let slot = state.slot(m, a.at(m) as usize);
            state.amps[slot] = 1;
        }
        state.scale = p.k;
        Ok(state)
    }

    /// `|m>|r> -> (-1)^{delta(r, b_m)} |m>|r>` with `b_0 = 0`.
    pub fn phase_flip(&self, b: &HeqInput) -> Result<Self> {
        self.check_dims(b)?;
        let mut out = self.clone();
        let width = 1usize << self.kprime;
        for (m, row) in out.amps.chunks_mut(width).enumerate() {
            let keep = b.at(m) as usize;
            for (r, z) in row.iter_mut().enumerate() {
                if r != keep {
                    *z = -*z;
                }
            }
        }
        Ok(out)
    }

    /// `|m>|r> -> |m>|r xor a_m>` with `a_0 = 0`.
    pub fn xor_second_register(&self, a: &HeqInput) -> Result<Self> {
        self.check_dims(a)?;
        let mut out = self.clone();
        let width = 1usize << self.kprime;
        for (m, (dst, src)) in out
            .amps
            .chunks_mut(width)
            .zip(self.amps.chunks(width))
            .enumerate()
        {
            let shift = a.at(m) as usize;
            for (r, &z) in src.iter().enumerate() {
                dst[r ^ shift] = z;
            }
        }
        Ok(out)
    }

    /// Hadamard on each qubit of the first register:
    /// `z'(c, r) = sum_m (-1)^{m.c} z(m, r)`, scale grows by `k`.
    pub fn hadamard_first_register(&self) -> Self {
        let mut out = self.clone();
        let width = 1usize << self.kprime;
        // In-place butterflies over the m index, one qubit at a time.
        for bit in 0..self.k {
            let stride = width << bit;
            for block in (0..out.amps.len()).step_by(stride << 1) {
                for off in 0..stride {
                    let lo = block + off;
                    let hi = lo + stride;
                    let (u, v) = (out.amps[lo], out.amps[hi]);
                    out.amps[lo] = u + v;
                    out.amps[hi] = u - v;
                }
            }
        }
        out.scale += self.k;
        out
    }

    /// Probability that measuring the first register yields `c`.
    pub fn outcome_probability(&self, c: usize) -> Probability {
        let width = 1usize << self.kprime;
        let num: u128 = self.amps[c * width..(c + 1) * width]
            .iter()
            .map(|&z| (z as i128 * z as i128) as u128)
            .sum();
        Ratio::new(num, 1u128 << self.scale)
    }

    /// Basis states with nonzero amplitude, as `(m, r, z)`.
    pub fn support(&self) -> Vec<(usize, usize, i64)> {
        let width = 1usize << self.kprime;
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, &z)| z != 0)
            .map(|(i, &z)| (i / width, i % width, z))
            .collect()
    }
}

/// One qubit `cos(theta)|0> + sin(theta)|1>` with `theta = turns * pi / 2^n`.
///
/// Keeping the angle as an exact dyadic multiple of `pi` makes the
/// "probability of 1 is exactly zero" decision independent of floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RotationState {
    turns: i64,
    log_denominator: u32,
}

impl RotationState {
    pub fn new(turns: i64, log_denominator: u32) -> Self {
        RotationState {
            turns,
            log_denominator,
        }
    }

    /// Rotates by `delta * pi / 2^n` (same `n` as the state).
    pub fn rotate(&self, delta: i64) -> Self {
        RotationState {
            turns: self.turns + delta,
            ..*self
        }
    }

    pub fn angle(&self) -> f64 {
        self.turns as f64 * PI / (1u64 << self.log_denominator) as f64
    }

    /// `sin(theta) = 0` exactly iff `theta` is an integer multiple of `pi`.
    pub fn is_exact_zero_one(&self) -> bool {
        self.turns.rem_euclid(1i64 << self.log_denominator) == 0
    }

    /// Probability of measuring `|1>`, `sin^2(theta)`.
    pub fn probability_one(&self) -> f64 {
        if self.is_exact_zero_one() {
            0.0
        } else {
            self.angle().sin().powi(2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeqOutcome {
    pub exact_zero: bool,
    pub probability: f64,
}

/// Acceptance probability `sin^2((x - y) pi / 2^n)` of the one-qubit `NEQ_n` protocol.
pub fn neq_accept_probability(x: u64, y: u64, n: u32) -> Result<NeqOutcome> {
    let state = neq_final_state(x, y, n)?;
    Ok(NeqOutcome {
        exact_zero: state.is_exact_zero_one(),
        probability: state.probability_one(),
    })
}

pub(crate) fn neq_final_state(x: u64, y: u64, n: u32) -> Result<RotationState> {
    check_neq_range(x, y, n)?;
    Ok(RotationState::new(x as i64, n).rotate(-(y as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heqfun::HeqParams;

    fn input(k: u32, kp: u32, e: &[u32]) -> HeqInput {
        HeqInput::new(HeqParams::new(k, kp).unwrap(), e.to_vec()).unwrap()
    }

    /// Direct sum `sum_m (-1)^{m.c} z(m, r)`.
    fn hadamard_oracle(state: &DyadicState) -> Vec<i64> {
        let (k, kp) = (state.k(), state.kprime());
        let mut out = vec![0; 1 << (k + kp)];
        for c in 0..1usize << k {
            for r in 0..1usize << kp {
                out[(c << kp) | r] = (0..1usize << k)
                    .map(|m| {
                        let sign = if (m & c).count_ones() % 2 == 1 { -1 } else { 1 };
                        sign * state.amplitude(m, r)
                    })
                    .sum();
            }
        }
        out
    }

    #[test]
    fn preparation_examples() {
        let s = DyadicState::prepare_indexed_superposition(&input(1, 1, &[1])).unwrap();
        assert_eq!(s.support(), vec![(0, 0, 1), (1, 1, 1)]);
        assert_eq!(s.scale(), 1);
        let s = DyadicState::prepare_indexed_superposition(&input(2, 1, &[0, 0, 0])).unwrap();
        assert_eq!(s.support(), (0..4).map(|m| (m, 0, 1)).collect::<Vec<_>>());
        assert_eq!(s.scale(), 2);
        assert!(s.is_normalized());
    }

    #[test]
    fn phase_flip_examples() {
        let a = input(1, 1, &[1]);
        let s = DyadicState::prepare_indexed_superposition(&a).unwrap();
        assert_eq!(s.phase_flip(&a).unwrap(), s);
        let flipped = s.phase_flip(&input(1, 1, &[0])).unwrap();
        assert_eq!(flipped.amplitude(1, 1), -1);
        assert_eq!(flipped.amplitude(0, 0), 1);
        let b = input(1, 1, &[0]);
        assert_eq!(flipped.phase_flip(&b).unwrap(), s);
        assert!(s.phase_flip(&input(2, 1, &[0, 0, 0])).is_err());
    }

    #[test]
    fn xor_examples() {
        let a = input(2, 2, &[3, 1, 2]);
        let s = DyadicState::prepare_indexed_superposition(&a).unwrap();
        let moved = s.xor_second_register(&a).unwrap();
        assert!(moved.support().iter().all(|&(_, r, _)| r == 0));
        let zero = input(2, 2, &[0, 0, 0]);
        assert_eq!(s.xor_second_register(&zero).unwrap(), s);
        assert_eq!(moved.xor_second_register(&a).unwrap(), s);
    }

    #[test]
    fn hadamard_matches_direct_sum() {
        let a = input(3, 2, &[1, 2, 3, 0, 1, 2, 3]);
        let b = input(3, 2, &[1, 0, 3, 2, 1, 2, 0]);
        let s = DyadicState::prepare_indexed_superposition(&a)
            .unwrap()
            .phase_flip(&b)
            .unwrap();
        let h = s.hadamard_first_register();
        assert_eq!(h.amps, hadamard_oracle(&s));
        assert_eq!(h.scale(), s.scale() + 3);
        assert!(h.is_normalized());
    }

    #[test]
    fn hadamard_on_zero_state() {
        let s = DyadicState::zero(1, 1).unwrap().hadamard_first_register();
        assert_eq!(s.amplitude(0, 0), 1);
        assert_eq!(s.amplitude(1, 0), 1);
        assert_eq!(s.scale(), 1);
    }

    #[test]
    fn hadamard_twice_scales_amplitudes() {
        let a = input(2, 2, &[3, 1, 2]);
        let s = DyadicState::prepare_indexed_superposition(&a).unwrap();
        let hh = s.hadamard_first_register().hadamard_first_register();
        assert_eq!(hh.scale(), s.scale() + 4);
        for (m, r, z) in s.support() {
            assert_eq!(hh.amplitude(m, r), 4 * z);
        }
        for c in 0..4 {
            assert_eq!(hh.outcome_probability(c), s.outcome_probability(c));
        }
    }

    #[test]
    fn outcome_probability_examples() {
        let a = input(2, 1, &[0, 0, 0]);
        let b = input(2, 1, &[1, 0, 1]);
        let s = DyadicState::prepare_indexed_superposition(&a)
            .unwrap()
            .phase_flip(&b)
            .unwrap()
            .xor_second_register(&a)
            .unwrap()
            .hadamard_first_register();
        assert_eq!(s.outcome_probability(0), Ratio::from_integer(0));
        assert_eq!(s.outcome_probability(1), Ratio::from_integer(1));
        let total: Probability = (0..4).map(|c| s.outcome_probability(c)).sum();
        assert_eq!(total, Ratio::from_integer(1));

        let eq = DyadicState::prepare_indexed_superposition(&a)
            .unwrap()
            .phase_flip(&a)
            .unwrap()
            .xor_second_register(&a)
            .unwrap()
            .hadamard_first_register();
        assert_eq!(eq.amplitude(0, 0), 4);
        assert_eq!(eq.scale(), 4);
        assert_eq!(eq.outcome_probability(0), Ratio::from_integer(1));
    }

    #[test]
    fn neq_examples() {
        let same = neq_accept_probability(5, 5, 3).unwrap();
        assert!(same.exact_zero);
        assert_eq!(same.probability, 0.0);
        let far = neq_accept_probability(0, 1, 1).unwrap();
        assert!(!far.exact_zero);
        assert!((far.probability - 1.0).abs() < 1e-15);
        let near = neq_accept_probability(1, 0, 3).unwrap();
        assert!(!near.exact_zero);
        assert!(near.probability > 0.0);
        assert!((near.probability - (PI / 8.0).sin().powi(2)).abs() < 1e-15);
        assert!(neq_accept_probability(8, 0, 3).is_err());
    }

    #[test]
    fn state_dumps_as_json() {
        let s = DyadicState::prepare_indexed_superposition(&input(1, 1, &[1])).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"k":1,"kprime":1,"z":[1,0,0,1],"s":1}"#
        );
    }
}
