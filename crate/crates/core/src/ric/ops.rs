//! The three relational operations and the entropy measure.
//!
//! * `abstraction` unions two relations (the write/learn step).
//! * `containment` tests cell-wise material implication (the recognition step).
//! * `reduction` constructs a function from a relation, sampling each
//!   argument's level among the marked ones with a distribution centered on
//!   the cue (the retrieval step).
//! * `entropy` measures the average indeterminacy of a relation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use super::function::DiscreteFunction;
use super::relation::Relation;
use crate::error::{Error, Result};
use crate::seeding;

/// How reduction picks a level among a column's marked values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerPolicy {
    /// Triangular kernel centered on the cue level: a marked value `v` gets
    /// weight `1 - |v - c| / (W + 1)` where `W` is the largest distance from
    /// the cue to any marked value of that column. Every marked value stays
    /// reachable and a singleton column is deterministic.
    Triangular,
    /// Returns the cue unchanged whenever it is contained; turns retrieval
    /// into a plain recognition echo, useful as a baseline.
    Identity,
}

impl std::fmt::Display for SamplerPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplerPolicy::Triangular => write!(f, "triangular"),
            SamplerPolicy::Identity => write!(f, "identity"),
        }
    }
}

impl std::str::FromStr for SamplerPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "triangular" => Ok(SamplerPolicy::Triangular),
            "identity" => Ok(SamplerPolicy::Identity),
            other => Err(format!(
                "unknown sampler {other:?}, expected 'triangular' or 'identity'"
            )),
        }
    }
}

/// Union of two relations; inputs are left untouched.
pub fn abstraction(a: &Relation, b: &Relation) -> Result<Relation> {
    a.union(b)
}

/// True iff every cell marked in `inner` is marked in `outer`.
pub fn containment(inner: &Relation, outer: &Relation) -> Result<bool> {
    inner.is_subset_of(outer)
}

/// The relation with exactly one mark per defined argument of `f`.
pub fn function_to_relation(f: &DiscreteFunction, n_vals: usize) -> Result<Relation> {
    Relation::from_function(f, n_vals)
}

/// Average indeterminacy of `r`: mean over arguments of `log2(mu)`, with
/// empty columns contributing zero.
pub fn entropy(r: &Relation) -> f64 {
    r.entropy()
}

/// Unnormalized triangular weights for the marked values of one column,
/// centered on the cue level.
pub fn triangular_weights(cue: u16, marked: &[u16]) -> Vec<f64> {
    let spread = marked
        .iter()
        .map(|&v| (v as i32 - cue as i32).unsigned_abs())
        .max()
        .unwrap_or(0);
    marked
        .iter()
        .map(|&v| 1.0 - (v as i32 - cue as i32).abs() as f64 / (spread + 1) as f64)
        .collect()
}

/// Constructs a function from `rel` guided by the total cue `cue`.
///
/// Returns `None` when the cue is not contained in the relation; that is the
/// distinguished "undefined" outcome, not a failure of the machinery. For a
/// fixed seed the result is deterministic.
pub fn reduction(
    cue: &DiscreteFunction,
    rel: &Relation,
    policy: SamplerPolicy,
    seed: u64,
) -> Result<Option<DiscreteFunction>> {
    if let Some(arg) = cue.first_undefined() {
        return Err(Error::Partial { arg });
    }
    if !rel.admits_function(cue)? {
        return Ok(None);
    }
    match policy {
        SamplerPolicy::Identity => Ok(Some(cue.clone())),
        SamplerPolicy::Triangular => {
            let mut rng = seeding::rng(seed);
            let mut out = DiscreteFunction::undefined(rel.n_args());
            for arg in 0..rel.n_args() {
                let cue_level = cue.value(arg).expect("cue is total");
                let marked = rel.marked_values(arg);
                let weights = triangular_weights(cue_level, &marked);
                let dist = WeightedIndex::new(&weights)
                    .expect("containment guarantees a nonempty positive-weight column");
                out.set(arg, marked[dist.sample(&mut rng)]);
            }
            Ok(Some(out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relation_of(fns: &[&[u16]], n_vals: usize) -> Relation {
        let mut r = Relation::empty(fns[0].len(), n_vals);
        for f in fns {
            r.insert_function(&DiscreteFunction::total(f.to_vec())).unwrap();
        }
        r
    }

    #[test]
    fn abstraction_with_empty_is_identity() {
        let r = relation_of(&[&[0, 2, 1], &[1, 2, 3]], 4);
        let empty = Relation::empty(3, 4);
        assert_eq!(abstraction(&r, &empty).unwrap(), r);
        assert_eq!(abstraction(&empty, &r).unwrap(), r);
    }

    #[test]
    fn abstraction_is_idempotent() {
        let r = relation_of(&[&[0, 2, 1], &[1, 2, 3]], 4);
        assert_eq!(abstraction(&r, &r).unwrap(), r);
    }

    #[test]
    fn abstraction_of_disjoint_functions_marks_two_per_column() {
        let a = relation_of(&[&[0, 1, 2]], 4);
        let b = relation_of(&[&[3, 2, 0]], 4);
        let u = abstraction(&a, &b).unwrap();
        assert_eq!(u.col_counts(), &[2, 2, 2]);
    }

    #[test]
    fn containment_is_reflexive_and_respects_union() {
        let f = relation_of(&[&[1, 1]], 3);
        let r = relation_of(&[&[0, 2], &[2, 0]], 3);
        assert!(containment(&f, &f).unwrap());
        assert!(containment(&f, &abstraction(&f, &r).unwrap()).unwrap());
    }

    #[test]
    fn containment_fails_on_one_extra_cell() {
        let big = relation_of(&[&[0, 0], &[1, 1]], 3);
        let mut probe = Relation::empty(2, 3);
        probe.set(0, 2); // marked here, not in big
        assert!(!containment(&probe, &big).unwrap());
    }

    #[test]
    fn reduction_is_forced_on_a_single_function() {
        let f = DiscreteFunction::total(vec![2, 0, 3]);
        let r = Relation::from_function(&f, 4).unwrap();
        for seed in 0..8 {
            let got = reduction(&f, &r, SamplerPolicy::Triangular, seed).unwrap();
            assert_eq!(got, Some(f.clone()));
        }
    }

    #[test]
    fn reduction_of_uncontained_cue_is_undefined() {
        let r = relation_of(&[&[0, 0]], 4);
        let cue = DiscreteFunction::total(vec![0, 1]);
        assert_eq!(reduction(&cue, &r, SamplerPolicy::Triangular, 1).unwrap(), None);
    }

    #[test]
    fn reduction_rejects_partial_cues() {
        let r = relation_of(&[&[0, 0]], 4);
        let mut cue = DiscreteFunction::undefined(2);
        cue.set(0, 0);
        assert!(matches!(
            reduction(&cue, &r, SamplerPolicy::Triangular, 1),
            Err(Error::Partial { arg: 1 })
        ));
    }

    #[test]
    fn identity_policy_echoes_the_cue() {
        let r = relation_of(&[&[0, 1], &[2, 3], &[1, 0]], 4);
        let cue = DiscreteFunction::total(vec![2, 3]);
        assert_eq!(
            reduction(&cue, &r, SamplerPolicy::Identity, 9).unwrap(),
            Some(cue.clone())
        );
    }

    #[test]
    fn triangular_weights_shape() {
        // marked {3,4,5}, cue 4: W = 1, weights 1 - |v-4|/2 = (0.5, 1.0, 0.5)
        let w = triangular_weights(4, &[3, 4, 5]);
        assert_eq!(w, vec![0.5, 1.0, 0.5]);
        // singleton column degenerates to certainty
        assert_eq!(triangular_weights(7, &[7]), vec![1.0]);
        // farthest marked value keeps positive weight 1/(W+1)
        let w = triangular_weights(0, &[0, 4]);
        assert_eq!(w, vec![1.0, 1.0 - 4.0 / 5.0]);
    }

    #[test]
    fn triangular_draws_follow_the_kernel() {
        // marked {3,4,5} with cue 4: normalized weights (0.25, 0.5, 0.25).
        let mut r = Relation::empty(1, 8);
        for v in [3, 4, 5] {
            r.set(0, v);
        }
        let cue = DiscreteFunction::total(vec![4]);
        let n = 100_000;
        let mut counts = [0u32; 8];
        for seed in 0..n {
            let f = reduction(&cue, &r, SamplerPolicy::Triangular, seed as u64)
                .unwrap()
                .unwrap();
            counts[f.value(0).unwrap() as usize] += 1;
        }
        let freq = |v: usize| counts[v] as f64 / n as f64;
        assert!((freq(3) - 0.25).abs() < 0.01);
        assert!((freq(4) - 0.50).abs() < 0.01);
        assert!((freq(5) - 0.25).abs() < 0.01);
        assert_eq!(counts[0] + counts[1] + counts[2] + counts[6] + counts[7], 0);
    }

    #[test]
    fn entropy_examples() {
        // any total function has entropy zero
        let f = relation_of(&[&[0, 3, 1]], 4);
        assert_eq!(entropy(&f), 0.0);
        // two marks in every column: 1 bit
        let r = relation_of(&[&[0, 0, 0], &[1, 1, 1]], 4);
        assert_eq!(entropy(&r), 1.0);
        // mu = (4, 2): (log2 4 + log2 2) / 2 = 1.5
        let r = relation_of(&[&[0, 0], &[1, 1], &[2, 0], &[3, 1]], 4);
        assert_eq!(entropy(&r), 1.5);
        // all-empty partial relation is fully determined
        assert_eq!(entropy(&Relation::empty(5, 4)), 0.0);
    }

    #[test]
    fn function_to_relation_examples() {
        let f = DiscreteFunction::total(vec![0, 1, 2]);
        let r = function_to_relation(&f, 4).unwrap();
        assert_eq!(r.col_counts(), &[1, 1, 1]);

        let empty = DiscreteFunction::undefined(3);
        let r = function_to_relation(&empty, 4).unwrap();
        assert_eq!(r.col_counts(), &[0, 0, 0]);

        let bad = DiscreteFunction::total(vec![0, 4, 0]);
        assert!(matches!(
            function_to_relation(&bad, 4),
            Err(Error::Range { value: 4, levels: 4 })
        ));
    }
}
