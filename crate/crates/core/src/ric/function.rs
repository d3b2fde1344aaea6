/// A partial map from argument indices to discrete value levels.
///
/// This is the unit of registration, the recognition cue, and the retrieval
/// result. Arguments without a value are undefined; viewed as a relation a
/// function has at most one mark per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteFunction {
    values: Vec<Option<u16>>,
}

impl DiscreteFunction {
    /// A function undefined on every argument.
    pub fn undefined(n_args: usize) -> Self {
        DiscreteFunction {
            values: vec![None; n_args],
        }
    }

    /// A total function from explicit per-argument levels.
    pub fn total(levels: impl Into<Vec<u16>>) -> Self {
        DiscreteFunction {
            values: levels.into().into_iter().map(Some).collect(),
        }
    }

    pub fn n_args(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, arg: usize) -> Option<u16> {
        self.values[arg]
    }

    pub fn set(&mut self, arg: usize, level: u16) {
        self.values[arg] = Some(level);
    }

    pub fn unset(&mut self, arg: usize) {
        self.values[arg] = None;
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Index of the first undefined argument, if any.
    pub fn first_undefined(&self) -> Option<usize> {
        self.values.iter().position(Option::is_none)
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Iterates `(argument, level)` over the defined arguments.
    pub fn defined(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(a, v)| v.map(|level| (a, level)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totality() {
        let mut f = DiscreteFunction::undefined(3);
        assert!(!f.is_total());
        assert_eq!(f.first_undefined(), Some(0));
        f.set(0, 4);
        f.set(1, 0);
        f.set(2, 2);
        assert!(f.is_total());
        assert_eq!(f.defined().collect::<Vec<_>>(), vec![(0, 4), (1, 0), (2, 2)]);
        f.unset(1);
        assert_eq!(f.first_undefined(), Some(1));
        assert_eq!(f.defined_count(), 2);
    }
}
