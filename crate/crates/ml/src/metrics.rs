use morpho_core::Label;
use serde::{Deserialize, Serialize};

use crate::classifier::Model;
use crate::dataset::Dataset;
use crate::MlError;

/// Counts with AD as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Self {
        let mut cm = Self::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t.is_positive(), p.is_positive()) {
                (true, true) => cm.tp += 1,
                (false, false) => cm.tn += 1,
                (false, true) => cm.fp += 1,
                (true, false) => cm.fn_ += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn metrics(&self) -> Metrics {
        Metrics::from_confusion(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { tp: self.tp + other.tp, tn: self.tn + other.tn, fp: self.fp + other.fp, fn_: self.fn_ + other.fn_ }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scalar metrics; a zero denominator yields 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    /// Sensitivity.
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 5] = ["accuracy", "precision", "recall", "specificity", "f1"];

    pub fn from_confusion(cm: &ConfusionMatrix) -> Self {
        let precision = ratio(cm.tp, cm.tp + cm.fp);
        let recall = ratio(cm.tp, cm.tp + cm.fn_);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self {
            accuracy: ratio(cm.tp + cm.tn, cm.total()),
            precision,
            recall,
            specificity: ratio(cm.tn, cm.tn + cm.fp),
            f1,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.accuracy, self.precision, self.recall, self.specificity, self.f1]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self { accuracy: a[0], precision: a[1], recall: a[2], specificity: a[3], f1: a[4] }
    }
}

/// Predicts every row of `test` and tallies the confusion matrix.
pub fn evaluate(model: &dyn Model, test: &Dataset) -> Result<ConfusionMatrix, MlError> {
    if test.dim() != model.dim() && !test.is_empty() {
        return Err(MlError::Dimension { expected: model.dim(), got: test.dim() });
    }
    let predicted: Vec<Label> = test.rows().iter().map(|r| model.predict(r)).collect();
    Ok(ConfusionMatrix::from_predictions(test.labels(), &predicted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_case() {
        let m = ConfusionMatrix { tp: 50, tn: 45, fp: 5, fn_: 0 }.metrics();
        assert!((m.accuracy - 0.95).abs() < 1e-12);
        assert!((m.precision - 50.0 / 55.0).abs() < 1e-12);
        assert_eq!(m.recall, 1.0);
        assert!((m.f1 - 100.0 / 105.0).abs() < 1e-12);
        assert!((m.specificity - 0.9).abs() < 1e-12);
    }

    #[test]
    fn sentinels() {
        let m = ConfusionMatrix { tp: 0, tn: 10, fp: 0, fn_: 10 }.metrics();
        assert_eq!((m.precision, m.f1, m.recall), (0.0, 0.0, 0.0));
        let p = ConfusionMatrix { tp: 3, tn: 4, fp: 0, fn_: 0 }.metrics();
        assert_eq!(p.as_array(), [1.0; 5]);
    }

    #[test]
    fn counting() {
        use Label::*;
        let truth = [Ad, Ad, Cn, Cn];
        assert_eq!(ConfusionMatrix::from_predictions(&truth, &[Ad, Ad, Ad, Ad]), ConfusionMatrix { tp: 2, tn: 0, fp: 2, fn_: 0 });
        assert_eq!(ConfusionMatrix::from_predictions(&truth, &[Cn, Cn, Ad, Ad]), ConfusionMatrix { tp: 0, tn: 0, fp: 2, fn_: 2 });
    }
}
