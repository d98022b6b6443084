use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::Scalar;

/// Indicator features (`name=value`, implicit value 1) plus named reals.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T> {
    pub indicators: BTreeSet<String>,
    pub reals: BTreeMap<String, T>,
}

impl<T> Default for FeatureVector<T> {
    fn default() -> Self {
        FeatureVector {
            indicators: BTreeSet::new(),
            reals: BTreeMap::new(),
        }
    }
}

/// Whitespace would break the tab-separated model format.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty() && self.reals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indicators.len() + self.reals.len()
    }

    pub fn indicator(&mut self, name: &str, value: impl AsRef<str>) {
        debug_assert!(!name.is_empty());
        self.indicators
            .insert(format!("{}={}", sanitize(name), sanitize(value.as_ref())));
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.indicator(name, if value { "true" } else { "false" });
    }

    pub fn real(&mut self, name: &str, value: T) {
        self.reals.insert(sanitize(name), value);
    }

    pub fn contains(&self, indicator: &str) -> bool {
        self.indicators.contains(indicator)
    }

    pub fn get_real(&self, name: &str) -> Option<T> {
        self.reals.get(name).copied()
    }

    pub fn union(mut self, other: FeatureVector<T>) -> Self {
        self.indicators.extend(other.indicators);
        self.reals.extend(other.reals);
        self
    }

    /// All features with their values; indicators carry 1.
    pub fn values(&self) -> impl Iterator<Item = (&str, T)> + '_ {
        self.indicators
            .iter()
            .map(|k| (k.as_str(), T::one()))
            .chain(self.reals.iter().map(|(k, &v)| (k.as_str(), v)))
    }
}
