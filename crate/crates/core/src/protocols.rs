//! Two-party protocols with exact communication accounting.
//!
//! A weakly nondeterministic protocol receives a classical proof and must
//! accept some proof with probability exactly 1 on every 1-instance, and
//! reject every proof with probability exactly 1 on every 0-instance. The
//! harness in [`verify_weak_nondeterminism`] checks exactly that, instance by
//! instance, and collects counterexamples as data.

use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::index;
use crate::heqfun::{self, check_neq_range, HeqInput, HeqParams, InstanceRecord, Instances};
use crate::qsim::{self, DyadicState, NeqOutcome, Probability, RotationState};

/// Alice's nondeterministic guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum Guess {
    /// The delta pattern is all-zero.
    Equal,
    /// The local test of the delta pattern fails at `j` (an element of `S_k`).
    Violation { j: usize },
}

/// A classical proof, split into the private parts handed to each party.
/// Bob's part is reserved and must be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Proof {
    pub alice: Guess,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bob: Vec<bool>,
}

impl Proof {
    pub fn equal() -> Self {
        Proof {
            alice: Guess::Equal,
            bob: Vec::new(),
        }
    }

    pub fn violation(j: usize) -> Self {
        Proof {
            alice: Guess::Violation { j },
            bob: Vec::new(),
        }
    }

    fn validate(&self, k: u32) -> Result<()> {
        if !self.bob.is_empty() {
            return Err(Error::MalformedProof(
                "Bob's part of the proof must be empty".into(),
            ));
        }
        if let Guess::Violation { j } = self.alice {
            if !index::is_non_power(k, j) {
                return Err(Error::MalformedProof(format!("j = {j} is not in S_{k}")));
            }
        }
        Ok(())
    }
}

/// Every proof for parameter `k`: `Equal` first, then `Violation(j)` for `j` in `S_k`.
pub fn proof_space(k: u32) -> Vec<Proof> {
    std::iter::once(Proof::equal())
        .chain(index::non_powers(k).map(Proof::violation))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Bits(Vec<bool>),
    Register(DyadicState),
    Qubit(RotationState),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub sender: Party,
    pub payload: Payload,
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self.payload {
            Payload::Bits(_) => MessageKind::Classical,
            Payload::Register(_) | Payload::Qubit(_) => MessageKind::Quantum,
        }
    }

    /// Bits or qubits carried.
    pub fn size(&self) -> usize {
        match &self.payload {
            Payload::Bits(b) => b.len(),
            Payload::Register(s) => s.qubits() as usize,
            Payload::Qubit(_) => 1,
        }
    }
}

/// How likely the protocol is to output 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptance {
    Exact(#[serde(serialize_with = "ser_ratio")] Probability),
    Rotation(NeqOutcome),
}

fn ser_ratio<S: serde::Serializer>(p: &Probability, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl Acceptance {
    pub fn is_exactly_one(&self) -> bool {
        match self {
            Acceptance::Exact(p) => p.is_one(),
            Acceptance::Rotation(_) => false,
        }
    }

    pub fn is_exactly_zero(&self) -> bool {
        match self {
            Acceptance::Exact(p) => p.is_zero(),
            Acceptance::Rotation(o) => o.exact_zero,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Acceptance::Exact(p) => *p.numer() as f64 / *p.denom() as f64,
            Acceptance::Rotation(o) => o.probability,
        }
    }

    pub fn exact(&self) -> Option<Probability> {
        match self {
            Acceptance::Exact(p) => Some(*p),
            Acceptance::Rotation(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    /// The output bit when it is determined; `None` when the final
    /// measurement is genuinely random.
    pub output: Option<bool>,
    pub output_party: Party,
    pub acceptance: Acceptance,
}

impl Transcript {
    pub fn total_cost(&self) -> usize {
        self.messages.iter().map(Message::size).sum()
    }

    fn deterministic(messages: Vec<Message>, output: bool, output_party: Party) -> Self {
        let p = if output { Ratio::one() } else { Ratio::zero() };
        Transcript {
            messages,
            output: Some(output),
            output_party,
            acceptance: Acceptance::Exact(p),
        }
    }
}

fn push_uint(bits: &mut Vec<bool>, value: u64, width: u32) {
    bits.extend((0..width).map(|s| (value >> s) & 1 == 1));
}

fn read_uint(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (s, &b)| acc | (u64::from(b) << s))
}

const BRANCH_VIOLATION: bool = false;
const BRANCH_EQUAL: bool = true;

fn check_pair(a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<HeqParams> {
    let p = a.params();
    if p != b.params() {
        return Err(Error::ParamMismatch(format!("{:?} vs {:?}", p, b.params())));
    }
    proof.validate(p.k)?;
    Ok(p)
}

/// Shared local-test branch: Alice sends the branch bit, `j` in `k` bits and
/// `a_j, a_[j], a_{j-[j]}` in `k'` bits each; Bob accepts iff the local
/// condition fails at `j` on the delta pattern.
fn run_violation_branch(params: HeqParams, a: &HeqInput, b: &HeqInput, j: usize) -> Transcript {
    let (k, kp) = (params.k, params.kprime);
    let top = index::floor_pow2(j);
    let mut bits = vec![BRANCH_VIOLATION];
    push_uint(&mut bits, j as u64, k);
    for pos in [j, top, j - top] {
        push_uint(&mut bits, u64::from(a.at(pos)), kp);
    }

    // Bob's side works only from the message and his own input.
    let kp = kp as usize;
    let k = k as usize;
    let recv_j = read_uint(&bits[1..1 + k]) as usize;
    let field = |t: usize| read_uint(&bits[1 + k + t * kp..1 + k + (t + 1) * kp]);
    let recv_top = index::floor_pow2(recv_j);
    let d_j = heqfun::delta(field(0), u64::from(b.at(recv_j)));
    let d_top = heqfun::delta(field(1), u64::from(b.at(recv_top)));
    let d_rest = heqfun::delta(field(2), u64::from(b.at(recv_j - recv_top)));
    let accept = d_j != (d_top ^ d_rest);

    let msg = Message {
        sender: Party::Alice,
        payload: Payload::Bits(bits),
    };
    Transcript::deterministic(vec![msg], accept, Party::Bob)
}

/// The quantum weakly nondeterministic protocol for `HEQ_{k,k'}`.
pub fn run_weak_nd_heq(a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<Transcript> {
    let params = check_pair(a, b, proof)?;
    match proof.alice {
        Guess::Violation { j } => Ok(run_violation_branch(params, a, b, j)),
        Guess::Equal => {
            let announce = Message {
                sender: Party::Alice,
                payload: Payload::Bits(vec![BRANCH_EQUAL]),
            };
            let sent = DyadicState::prepare_indexed_superposition(a)?;
            let returned = sent.phase_flip(b)?;
            let fin = returned.xor_second_register(a)?.hadamard_first_register();
            let p = fin.outcome_probability(0);
            let output = if p.is_one() {
                Some(true)
            } else if p.is_zero() {
                Some(false)
            } else {
                None
            };
            let messages = vec![
                announce,
                Message {
                    sender: Party::Alice,
                    payload: Payload::Register(sent),
                },
                Message {
                    sender: Party::Bob,
                    payload: Payload::Register(returned),
                },
            ];
            Ok(Transcript {
                messages,
                output,
                output_party: Party::Alice,
                acceptance: Acceptance::Exact(p),
            })
        }
    }
}

/// The classical nondeterministic protocol: in the `Equal` branch Alice sends
/// `a_{2^s}` for `s = 0 .. k-1` and Bob checks each one.
pub fn run_classical_nd_heq(a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<Transcript> {
    let params = check_pair(a, b, proof)?;
    match proof.alice {
        Guess::Violation { j } => Ok(run_violation_branch(params, a, b, j)),
        Guess::Equal => {
            let kp = params.kprime;
            let mut bits = vec![BRANCH_EQUAL];
            for s in 0..params.k {
                push_uint(&mut bits, u64::from(a.at(1 << s)), kp);
            }
            let accept = (0..params.k as usize).all(|s| {
                let field = read_uint(&bits[1 + s * kp as usize..1 + (s + 1) * kp as usize]);
                !heqfun::delta(field, u64::from(b.at(1 << s)))
            });
            let msg = Message {
                sender: Party::Alice,
                payload: Payload::Bits(bits),
            };
            Ok(Transcript::deterministic(vec![msg], accept, Party::Bob))
        }
    }
}

/// The one-qubit strongly nondeterministic protocol for `NEQ_n`.
pub fn run_strong_nd_neq(x: u64, y: u64, n: u32) -> Result<Transcript> {
    check_neq_range(x, y, n)?;
    let sent = RotationState::new(x as i64, n);
    let fin = sent.rotate(-(y as i64));
    let outcome = NeqOutcome {
        exact_zero: fin.is_exact_zero_one(),
        probability: fin.probability_one(),
    };
    debug_assert_eq!(Ok(outcome), qsim::neq_accept_probability(x, y, n));
    let output = outcome.exact_zero.then_some(false);
    Ok(Transcript {
        messages: vec![Message {
            sender: Party::Alice,
            payload: Payload::Qubit(sent),
        }],
        output,
        output_party: Party::Bob,
        acceptance: Acceptance::Rotation(outcome),
    })
}

/// A protocol that receives a classical proof.
pub trait WeakNdProtocol: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<Transcript>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumHeq;

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassicalHeq;

impl WeakNdProtocol for QuantumHeq {
    fn name(&self) -> &'static str {
        "quantum-heq"
    }

    fn run(&self, a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<Transcript> {
        run_weak_nd_heq(a, b, proof)
    }
}

impl WeakNdProtocol for ClassicalHeq {
    fn name(&self) -> &'static str {
        "classical-heq"
    }

    fn run(&self, a: &HeqInput, b: &HeqInput, proof: &Proof) -> Result<Transcript> {
        run_classical_nd_heq(a, b, proof)
    }
}

/// First proof (in `proofs` order) that the protocol accepts with probability exactly 1.
pub fn find_accepting_proof<P: WeakNdProtocol + ?Sized>(
    protocol: &P,
    a: &HeqInput,
    b: &HeqInput,
    proofs: &[Proof],
) -> Result<Option<Proof>> {
    for proof in proofs {
        if protocol.run(a, b, proof)?.acceptance.is_exactly_one() {
            return Ok(Some(proof.clone()));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum FailureInstance {
    Heq(InstanceRecord),
    Neq { n: u32, x: u64, y: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub instance: FailureInstance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<Proof>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ReportParams {
    Heq { k: u32, kprime: u32 },
    Neq { n: u32 },
}

/// How 1-instances were certified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WitnessTally {
    pub equal: u64,
    pub violation: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub protocol: String,
    pub params: ReportParams,
    pub instances_checked: u64,
    pub one_instances: u64,
    pub one_instances_certified: u64,
    pub zero_instances: u64,
    pub zero_instances_rejected: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<WitnessTally>,
    pub max_cost: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_nonzero_probability: Option<f64>,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Default)]
struct Tally {
    checked: u64,
    ones: u64,
    ones_ok: u64,
    zeros: u64,
    zeros_ok: u64,
    witnesses: WitnessTally,
    max_cost: usize,
    min_nonzero: Option<f64>,
    failures: Vec<Failure>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.ones += other.ones;
        self.ones_ok += other.ones_ok;
        self.zeros += other.zeros;
        self.zeros_ok += other.zeros_ok;
        self.witnesses.equal += other.witnesses.equal;
        self.witnesses.violation += other.witnesses.violation;
        self.max_cost = self.max_cost.max(other.max_cost);
        self.min_nonzero = match (self.min_nonzero, other.min_nonzero) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        self.failures.extend(other.failures);
        self
    }

    fn into_report(
        mut self,
        protocol: &str,
        params: ReportParams,
        witnesses: bool,
    ) -> VerificationReport {
        self.failures.sort();
        VerificationReport {
            protocol: protocol.to_string(),
            params,
            instances_checked: self.checked,
            one_instances: self.ones,
            one_instances_certified: self.ones_ok,
            zero_instances: self.zeros,
            zero_instances_rejected: self.zeros_ok,
            witnesses: witnesses.then_some(self.witnesses),
            max_cost: self.max_cost,
            min_nonzero_probability: self.min_nonzero,
            failures: self.failures,
        }
    }
}

fn check_heq_instance<P, F>(
    protocol: &P,
    f: &F,
    a: &HeqInput,
    b: &HeqInput,
    proofs: &[Proof],
) -> Tally
where
    P: WeakNdProtocol + ?Sized,
    F: Fn(&HeqInput, &HeqInput) -> Result<bool>,
{
    let record = || FailureInstance::Heq(InstanceRecord::from_pair(a, b));
    let mut t = Tally {
        checked: 1,
        ..Tally::default()
    };
    let value = match f(a, b) {
        Ok(v) => v,
        Err(e) => {
            t.failures.push(Failure {
                instance: record(),
                proof: None,
                reason: format!("oracle error: {e}"),
            });
            return t;
        }
    };
    let mut accepting: Option<Guess> = None;
    let mut all_reject = true;
    for proof in proofs {
        let tr = match protocol.run(a, b, proof) {
            Ok(tr) => tr,
            Err(e) => {
                t.failures.push(Failure {
                    instance: record(),
                    proof: Some(proof.clone()),
                    reason: e.to_string(),
                });
                all_reject = false;
                continue;
            }
        };
        t.max_cost = t.max_cost.max(tr.total_cost());
        if tr.acceptance.is_exactly_one() && accepting.is_none() {
            accepting = Some(proof.alice);
        }
        if !tr.acceptance.is_exactly_zero() {
            all_reject = false;
            if !value {
                t.failures.push(Failure {
                    instance: record(),
                    proof: Some(proof.clone()),
                    reason: format!(
                        "0-instance accepted with probability {:?}",
                        tr.acceptance.exact()
                    ),
                });
            }
        }
    }
    if value {
        t.ones = 1;
        match accepting {
            Some(Guess::Equal) => {
                t.ones_ok = 1;
                t.witnesses.equal = 1;
            }
            Some(Guess::Violation { .. }) => {
                t.ones_ok = 1;
                t.witnesses.violation = 1;
            }
            None => t.failures.push(Failure {
                instance: record(),
                proof: None,
                reason: "1-instance has no proof accepted with probability 1".into(),
            }),
        }
    } else {
        t.zeros = 1;
        if all_reject {
            t.zeros_ok = 1;
        }
    }
    t
}

/// Checks weak nondeterminism of `protocol` for `f` on every instance in
/// `instances`, against every proof in `proofs`.
pub fn verify_weak_nondeterminism<P, F>(
    protocol: &P,
    f: F,
    instances: &Instances,
    proofs: &[Proof],
) -> VerificationReport
where
    P: WeakNdProtocol + ?Sized,
    F: Fn(&HeqInput, &HeqInput) -> Result<bool> + Sync,
{
    let params = instances.params();
    (0..instances.len())
        .into_par_iter()
        .map(|i| {
            let (a, b) = instances.get(i);
            check_heq_instance(protocol, &f, &a, &b, proofs)
        })
        .reduce(Tally::default, Tally::merge)
        .into_report(
            protocol.name(),
            ReportParams::Heq {
                k: params.k,
                kprime: params.kprime,
            },
            true,
        )
}

/// Exhaustive check of the `NEQ_n` protocol: exact zero iff `x = y`, every
/// other pair accepted with probability at least `sin^2(pi / 2^n)`, and one
/// qubit of communication.
pub fn verify_strong_nondeterminism(n: u32, budget: u64) -> Result<VerificationReport> {
    if n == 0 || 2 * u64::from(n) >= 64 || 1u64 << (2 * n) > budget {
        return Err(Error::BudgetExceeded {
            what: "NEQ sweep",
            needed: format!("4^{n} pairs"),
            budget: budget.to_string(),
        });
    }
    let floor = (std::f64::consts::PI / (1u64 << n) as f64).sin().powi(2);
    let side = 1u64 << n;
    let tally = (0..side * side)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (idx / side, idx % side);
            let inst = || FailureInstance::Neq { n, x, y };
            let mut t = Tally {
                checked: 1,
                ..Tally::default()
            };
            let tr = match run_strong_nd_neq(x, y, n) {
                Ok(tr) => tr,
                Err(e) => {
                    t.failures.push(Failure {
                        instance: inst(),
                        proof: None,
                        reason: e.to_string(),
                    });
                    return t;
                }
            };
            t.max_cost = tr.total_cost();
            if tr.total_cost() != 1 {
                t.failures.push(Failure {
                    instance: inst(),
                    proof: None,
                    reason: format!("cost {} != 1 qubit", tr.total_cost()),
                });
            }
            let zero = tr.acceptance.is_exactly_zero();
            if x == y {
                t.zeros = 1;
                if zero {
                    t.zeros_ok = 1;
                } else {
                    t.failures.push(Failure {
                        instance: inst(),
                        proof: None,
                        reason: "x = y accepted".into(),
                    });
                }
            } else {
                t.ones = 1;
                let p = tr.acceptance.value();
                t.min_nonzero = Some(p);
                if zero || p < floor * (1.0 - 1e-12) {
                    t.failures.push(Failure {
                        instance: inst(),
                        proof: None,
                        reason: format!("x != y accepted with probability {p}, below {floor}"),
                    });
                } else {
                    t.ones_ok = 1;
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report("neq", ReportParams::Neq { n }, false))
}
