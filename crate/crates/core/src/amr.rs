//! Associative memory registers and the multi-register system.
//!
//! One register holds the union of every function registered for its class
//! labels. Registration is abstraction, recognition is containment, and
//! retrieval is reduction guided by the cue. The system fans an operation out
//! to every register; retrieval then commits to the accepting register with
//! minimal entropy (ties break toward the lowest id).
//!
//! Register contents serialize to a binary snapshot: magic `EAMR`, version,
//! dimensions and labels, then column-major packed bits (LSB-first within
//! each byte, columns padded to byte boundaries). Integers are little-endian.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::quantizer::{FeatureVector, QuantizerModel};
use crate::ric::{reduction, DiscreteFunction, Relation, SamplerPolicy};

/// Class label; a digit in the shipped experiments.
pub type Label = u8;

const SNAPSHOT_MAGIC: &[u8; 4] = b"EAMR";
const SNAPSHOT_VERSION: u16 = 1;

/// One associative memory register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amr {
    id: usize,
    labels: BTreeSet<Label>,
    content: Relation,
}

impl Amr {
    pub fn new(id: usize, labels: BTreeSet<Label>, n_args: usize, n_vals: usize) -> Self {
        Amr {
            id,
            labels,
            content: Relation::empty(n_args, n_vals),
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.labels
    }

    pub fn content(&self) -> &Relation {
        &self.content
    }

    /// Folds a total function into the register's relation.
    pub fn register(&mut self, f: &DiscreteFunction) -> Result<()> {
        if let Some(arg) = f.first_undefined() {
            return Err(Error::Partial { arg });
        }
        self.content.insert_function(f)
    }

    /// Whether the cue is contained in the register's relation.
    pub fn recognize(&self, f: &DiscreteFunction) -> Result<bool> {
        self.content.admits_function(f)
    }

    /// Reduction of the cue against the register, or `None` when rejected.
    pub fn retrieve(
        &self,
        f: &DiscreteFunction,
        policy: SamplerPolicy,
        seed: u64,
    ) -> Result<Option<DiscreteFunction>> {
        reduction(f, &self.content, policy, seed)
    }

    pub fn entropy(&self) -> f64 {
        self.content.entropy()
    }

    pub fn write_snapshot(&self, mut w: impl Write) -> Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        w.write_all(&(self.content.n_args() as u32).to_le_bytes())?;
        w.write_all(&(self.content.n_vals() as u32).to_le_bytes())?;
        w.write_all(&(self.labels.len() as u16).to_le_bytes())?;
        for &label in &self.labels {
            w.write_all(&[label])?;
        }
        let col_bytes = self.content.n_vals().div_ceil(8);
        let mut col = vec![0u8; col_bytes];
        for arg in 0..self.content.n_args() {
            col.fill(0);
            for val in self.content.marked_values(arg) {
                col[val as usize / 8] |= 1 << (val % 8);
            }
            w.write_all(&col)?;
        }
        Ok(())
    }

    pub fn read_snapshot(id: usize, mut r: impl Read) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            line: 0,
            reason: format!("snapshot: {reason}"),
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut u16buf = [0u8; 2];
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u16buf)?;
        if u16::from_le_bytes(u16buf) != SNAPSHOT_VERSION {
            return Err(bad("unsupported version"));
        }
        r.read_exact(&mut u32buf)?;
        let n_args = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let n_vals = u32::from_le_bytes(u32buf) as usize;
        if n_args == 0 || n_vals == 0 || n_vals > crate::ric::MAX_VALS {
            return Err(bad("bad dimensions"));
        }
        r.read_exact(&mut u16buf)?;
        let label_count = u16::from_le_bytes(u16buf) as usize;
        let mut labels = BTreeSet::new();
        for _ in 0..label_count {
            let mut b = [0u8; 1];
            r.read_exact(&mut b)?;
            labels.insert(b[0]);
        }
        let mut content = Relation::empty(n_args, n_vals);
        let mut col = vec![0u8; n_vals.div_ceil(8)];
        for arg in 0..n_args {
            r.read_exact(&mut col)?;
            for val in 0..n_vals {
                if col[val / 8] >> (val % 8) & 1 != 0 {
                    content.set(arg, val);
                }
            }
        }
        Ok(Amr {
            id,
            labels,
            content,
        })
    }
}

/// Result of fanning recognition out over every register.
#[derive(Clone, Debug, PartialEq)]
pub struct Recognition {
    /// Ids of the registers that accepted the cue, ascending.
    pub accepting: Vec<usize>,
    /// Entropy of every register, indexed by id.
    pub entropies: Vec<f64>,
}

impl Recognition {
    pub fn accepted(&self) -> bool {
        !self.accepting.is_empty()
    }
}

/// Result of a system-level retrieval.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrieveOutcome {
    pub accepted: bool,
    /// The minimal-entropy accepting register, if any accepted.
    pub chosen_amr: Option<usize>,
    pub retrieved: Option<DiscreteFunction>,
    pub accepting: Vec<usize>,
    pub entropies: Vec<f64>,
}

/// An ordered bank of registers sharing one quantizer and sampler policy.
#[derive(Clone, Debug)]
pub struct MemorySystem {
    amrs: Vec<Amr>,
    quantizer: QuantizerModel,
    sampler: SamplerPolicy,
}

impl MemorySystem {
    /// Registers must share dimensions, match the quantizer's geometry, and
    /// carry ids equal to their position in the bank (which also makes them
    /// unique); per-register entropies and outcomes index by that id.
    pub fn new(amrs: Vec<Amr>, quantizer: QuantizerModel, sampler: SamplerPolicy) -> Result<Self> {
        for (pos, amr) in amrs.iter().enumerate() {
            let c = amr.content();
            if c.n_args() != quantizer.n_args() || c.n_vals() != quantizer.levels() {
                return Err(Error::dimension(format!(
                    "register {} is {}x{}, quantizer implies {}x{}",
                    amr.id(),
                    c.n_args(),
                    c.n_vals(),
                    quantizer.n_args(),
                    quantizer.levels()
                )));
            }
            if amr.id() != pos {
                return Err(Error::dimension(format!(
                    "register id {} at bank position {pos}",
                    amr.id()
                )));
            }
        }
        Ok(MemorySystem {
            amrs,
            quantizer,
            sampler,
        })
    }

    /// One register per label set, ids assigned in order.
    pub fn with_label_sets(
        label_sets: &[BTreeSet<Label>],
        quantizer: QuantizerModel,
        sampler: SamplerPolicy,
    ) -> Result<Self> {
        let (n_args, n_vals) = (quantizer.n_args(), quantizer.levels());
        let amrs = label_sets
            .iter()
            .enumerate()
            .map(|(id, labels)| Amr::new(id, labels.clone(), n_args, n_vals))
            .collect();
        MemorySystem::new(amrs, quantizer, sampler)
    }

    pub fn amrs(&self) -> &[Amr] {
        &self.amrs
    }

    pub fn quantizer(&self) -> &QuantizerModel {
        &self.quantizer
    }

    pub fn sampler(&self) -> SamplerPolicy {
        self.sampler
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.amrs.iter().map(Amr::entropy).collect()
    }

    fn route(&self, label: Label) -> Result<usize> {
        let mut hits = self.amrs.iter().filter(|a| a.labels().contains(&label));
        match (hits.next(), hits.next()) {
            (Some(amr), None) => Ok(amr.id()),
            (first, second) => Err(Error::Routing {
                label,
                count: first.is_some() as usize + second.is_some() as usize,
            }),
        }
    }

    /// Registers `f` into the single register holding `label`.
    pub fn register(&mut self, label: Label, f: &DiscreteFunction) -> Result<()> {
        let id = self.route(label)?;
        self.amrs[id].register(f)
    }

    /// Runs recognition on every register.
    pub fn recognize(&self, f: &DiscreteFunction) -> Result<Recognition> {
        let mut accepting = Vec::new();
        for amr in &self.amrs {
            if amr.recognize(f)? {
                accepting.push(amr.id());
            }
        }
        Ok(Recognition {
            accepting,
            entropies: self.entropies(),
        })
    }

    /// Retrieves from the minimal-entropy accepting register.
    pub fn retrieve(&self, f: &DiscreteFunction, seed: u64) -> Result<RetrieveOutcome> {
        let recognition = self.recognize(f)?;
        let chosen = select_min_entropy(&recognition.accepting, &recognition.entropies);
        let retrieved = match chosen {
            Some(id) => self.amrs[id].retrieve(f, self.sampler, seed)?,
            None => None,
        };
        Ok(RetrieveOutcome {
            accepted: chosen.is_some(),
            chosen_amr: chosen,
            retrieved,
            accepting: recognition.accepting,
            entropies: recognition.entropies,
        })
    }

    /// Input-protocol convenience: quantize then register.
    pub fn register_vector(&mut self, label: Label, v: &FeatureVector) -> Result<()> {
        let f = self.quantizer.quantize(v)?;
        self.register(label, &f)
    }

    /// Input-protocol convenience: quantize then recognize.
    pub fn recognize_vector(&self, v: &FeatureVector) -> Result<Recognition> {
        self.recognize(&self.quantizer.quantize(v)?)
    }

    /// Input-protocol convenience: quantize then retrieve.
    pub fn retrieve_vector(&self, v: &FeatureVector, seed: u64) -> Result<RetrieveOutcome> {
        self.retrieve(&self.quantizer.quantize(v)?, seed)
    }
}

/// Minimal entropy among the accepting ids, ties to the lowest id.
/// `accepting` is ascending, so a strict `<` keeps the earliest minimum.
pub fn select_min_entropy(accepting: &[usize], entropies: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &id in accepting {
        match best {
            None => best = Some(id),
            Some(b) if entropies[id] < entropies[b] => best = Some(id),
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton(label: Label) -> BTreeSet<Label> {
        BTreeSet::from([label])
    }

    fn quantizer_unit(n_args: usize, m: u32) -> QuantizerModel {
        let lo = FeatureVector::new(vec![0.0; n_args]).unwrap();
        let hi = FeatureVector::new(vec![1.0; n_args]).unwrap();
        QuantizerModel::fit([&lo, &hi], m).unwrap()
    }

    fn two_register_system(m: u32) -> MemorySystem {
        MemorySystem::with_label_sets(
            &[singleton(0), singleton(1)],
            quantizer_unit(3, m),
            SamplerPolicy::Triangular,
        )
        .unwrap()
    }

    #[test]
    fn registered_function_is_recognized() {
        let mut amr = Amr::new(0, singleton(4), 3, 8);
        let f = DiscreteFunction::total(vec![1, 5, 7]);
        assert!(!amr.recognize(&f).unwrap());
        amr.register(&f).unwrap();
        assert!(amr.recognize(&f).unwrap());
    }

    #[test]
    fn double_registration_is_idempotent() {
        let mut amr = Amr::new(0, singleton(0), 3, 8);
        let f = DiscreteFunction::total(vec![1, 5, 7]);
        amr.register(&f).unwrap();
        let once = amr.content().clone();
        amr.register(&f).unwrap();
        assert_eq!(amr.content(), &once);
    }

    #[test]
    fn column_distinct_functions_give_log2_k_entropy() {
        let mut amr = Amr::new(0, singleton(0), 4, 16);
        let k = 6u16;
        for i in 0..k {
            amr.register(&DiscreteFunction::total(vec![i, i + 1, i + 4, 15 - i])).unwrap();
        }
        assert!((amr.entropy() - (k as f64).log2()).abs() < 1e-12);
    }

    #[test]
    fn single_row_register_accepts_anything_once_filled() {
        let mut amr = Amr::new(0, singleton(0), 3, 1);
        let zero = DiscreteFunction::total(vec![0, 0, 0]);
        assert!(!amr.recognize(&zero).unwrap());
        amr.register(&zero).unwrap();
        assert!(amr.recognize(&zero).unwrap());
        assert_eq!(amr.entropy(), 0.0);
    }

    #[test]
    fn one_argument_difference_is_rejected() {
        let mut amr = Amr::new(0, singleton(0), 3, 8);
        amr.register(&DiscreteFunction::total(vec![1, 5, 7])).unwrap();
        assert!(!amr.recognize(&DiscreteFunction::total(vec![1, 4, 7])).unwrap());
    }

    #[test]
    fn retrieve_is_forced_when_only_the_cue_is_stored() {
        let mut amr = Amr::new(0, singleton(0), 3, 8);
        let f = DiscreteFunction::total(vec![2, 0, 6]);
        amr.register(&f).unwrap();
        assert_eq!(
            amr.retrieve(&f, SamplerPolicy::Triangular, 5).unwrap(),
            Some(f.clone())
        );
        let other = DiscreteFunction::total(vec![2, 1, 6]);
        assert_eq!(amr.retrieve(&other, SamplerPolicy::Triangular, 5).unwrap(), None);
        assert_eq!(
            amr.retrieve(&f, SamplerPolicy::Identity, 5).unwrap(),
            Some(f)
        );
    }

    #[test]
    fn routing_requires_exactly_one_register() {
        let mut sys = two_register_system(3);
        let f = DiscreteFunction::total(vec![0, 0, 0]);
        assert!(matches!(
            sys.register(9, &f),
            Err(Error::Routing { label: 9, count: 0 })
        ));
        let dup = MemorySystem::with_label_sets(
            &[singleton(1), singleton(1)],
            quantizer_unit(3, 3),
            SamplerPolicy::Triangular,
        )
        .unwrap();
        assert!(matches!(
            dup.clone().register(1, &f),
            Err(Error::Routing { label: 1, count: 2 })
        ));
    }

    #[test]
    fn empty_system_accepts_nothing() {
        let sys = two_register_system(2);
        let rec = sys.recognize(&DiscreteFunction::total(vec![0, 0, 0])).unwrap();
        assert!(!rec.accepted());
        assert!(rec.accepting.is_empty());
    }

    #[test]
    fn zero_granularity_system_accepts_everything_everywhere() {
        let mut sys = two_register_system(0);
        sys.register(0, &DiscreteFunction::total(vec![0, 0, 0])).unwrap();
        sys.register(1, &DiscreteFunction::total(vec![0, 0, 0])).unwrap();
        let rec = sys.recognize(&DiscreteFunction::total(vec![0, 0, 0])).unwrap();
        assert_eq!(rec.accepting, vec![0, 1]);
    }

    #[test]
    fn sole_registration_accepts_only_its_own_register() {
        let mut sys = two_register_system(3);
        let f = DiscreteFunction::total(vec![1, 2, 3]);
        sys.register(1, &f).unwrap();
        let rec = sys.recognize(&f).unwrap();
        assert_eq!(rec.accepting, vec![1]);
    }

    #[test]
    fn retrieve_picks_minimal_entropy_and_low_id_on_ties() {
        // register 0 holds two functions (entropy > 0), register 1 holds one
        let mut sys = two_register_system(3);
        let f = DiscreteFunction::total(vec![1, 2, 3]);
        sys.register(0, &f).unwrap();
        sys.register(0, &DiscreteFunction::total(vec![2, 3, 4])).unwrap();
        sys.register(1, &f).unwrap();
        let out = sys.retrieve(&f, 11).unwrap();
        assert!(out.accepted);
        assert_eq!(out.accepting, vec![0, 1]);
        assert_eq!(out.chosen_amr, Some(1));
        assert_eq!(out.retrieved, Some(f.clone()));

        // exact tie: both registers hold only the cue
        let mut tied = two_register_system(3);
        tied.register(0, &f).unwrap();
        tied.register(1, &f).unwrap();
        assert_eq!(tied.retrieve(&f, 1).unwrap().chosen_amr, Some(0));
    }

    #[test]
    fn rejected_cue_yields_empty_outcome() {
        let sys = two_register_system(3);
        let out = sys.retrieve(&DiscreteFunction::total(vec![1, 1, 1]), 1).unwrap();
        assert!(!out.accepted);
        assert_eq!(out.chosen_amr, None);
        assert_eq!(out.retrieved, None);
    }

    #[test]
    fn snapshot_round_trip() {
        let mut amr = Amr::new(3, BTreeSet::from([4, 9]), 5, 70);
        for f in [
            DiscreteFunction::total(vec![0, 9, 33, 64, 69]),
            DiscreteFunction::total(vec![1, 9, 40, 64, 0]),
        ] {
            amr.register(&f).unwrap();
        }
        let mut buf = Vec::new();
        amr.write_snapshot(&mut buf).unwrap();
        let back = Amr::read_snapshot(3, &buf[..]).unwrap();
        assert_eq!(back, amr);
    }

    #[test]
    fn snapshot_golden_bytes() {
        let mut amr = Amr::new(0, BTreeSet::from([1, 2]), 2, 3);
        amr.register(&DiscreteFunction::total(vec![0, 1])).unwrap();
        amr.register(&DiscreteFunction::total(vec![2, 1])).unwrap();
        let mut buf = Vec::new();
        amr.write_snapshot(&mut buf).unwrap();
        let expected: Vec<u8> = [
            b"EAMR".as_slice(),
            &1u16.to_le_bytes(),  // version
            &2u32.to_le_bytes(),  // n_args
            &3u32.to_le_bytes(),  // n_vals
            &2u16.to_le_bytes(),  // label count
            &[1, 2],              // labels
            &[0b0000_0101],       // column 0: levels {0, 2}
            &[0b0000_0010],       // column 1: level {1}
        ]
        .concat();
        assert_eq!(buf, expected);
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let buf = b"NOPE\x01\x00".to_vec();
        assert!(matches!(
            Amr::read_snapshot(0, &buf[..]),
            Err(Error::Parse { .. })
        ));
    }
}
