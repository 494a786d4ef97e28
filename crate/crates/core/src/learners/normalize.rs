use super::{FeatureTable, LearnError};

/// Per-column minimum and maximum fitted on a training table.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_normalizer(table: &FeatureTable) -> Result<Normalizer, LearnError> {
    if table.is_empty() {
        return Err(LearnError::Empty);
    }
    let d = table.dim();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for i in 0..table.len() {
        for (j, &x) in table.row(i).iter().enumerate() {
            min[j] = min[j].min(x);
            max[j] = max[j].max(x);
        }
    }
    Ok(Normalizer { min, max })
}

/// Maps each column through `(x - min) / (max - min)`; constant training
/// columns map to 0. Values outside the fitted range are not clamped.
pub fn apply_normalizer(norm: &Normalizer, table: &FeatureTable) -> FeatureTable {
    assert_eq!(norm.min.len(), table.dim(), "normalizer dimension mismatch");
    table.map_values(|j, x| {
        let span = norm.max[j] - norm.min[j];
        if span > 0.0 {
            (x - norm.min[j]) / span
        } else {
            0.0
        }
    })
}

impl Normalizer {
    pub fn fit(table: &FeatureTable) -> Result<Self, LearnError> {
        fit_normalizer(table)
    }

    pub fn apply(&self, table: &FeatureTable) -> FeatureTable {
        apply_normalizer(self, table)
    }
}
