use morpho_core::synth::substream_seed;
use morpho_core::Label;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, ClassifierKind};
use crate::dataset::{Dataset, Standardizer};
use crate::metrics::{evaluate, ConfusionMatrix, Metrics};
use crate::roc::{roc_curve, RocCurve};
use crate::split::{stratified_split, SplitOptions};
use crate::stats::{mean, sample_std, welch_t_test, WelchResult};
use crate::MlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub classifier: ClassifierKind,
    pub name: String,
    pub mean: Metrics,
    /// Sample standard deviation across splits (0 for a single split).
    pub std: Metrics,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub splits: Vec<SplitOutcome>,
    /// Summed over splits.
    pub confusion: ConfusionMatrix,
    /// Over the pooled test scores of all splits.
    pub roc: RocCurve,
}

impl ClassifierReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.splits.iter().map(|s| s.metrics.accuracy).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchComparison {
    pub best: ClassifierKind,
    pub other: ClassifierKind,
    /// `None` when both accuracy samples are constant or there are fewer than two splits.
    pub result: Option<WelchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub options: SplitOptions,
    pub classifiers: Vec<ClassifierReport>,
}

impl EvalReport {
    /// Index of the highest mean accuracy; earlier entries win ties.
    pub fn best(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, c) in self.classifiers.iter().enumerate() {
            if best.is_none_or(|b| c.mean.accuracy > self.classifiers[b].mean.accuracy) {
                best = Some(i);
            }
        }
        best
    }

    /// Welch tests of each classifier's accuracies against the best one.
    pub fn welch_vs_best(&self) -> Result<Vec<WelchComparison>, MlError> {
        let Some(b) = self.best() else { return Ok(Vec::new()) };
        let best = &self.classifiers[b];
        let mut out = Vec::new();
        for (i, c) in self.classifiers.iter().enumerate() {
            if i == b {
                continue;
            }
            let result = match welch_t_test(&best.accuracies(), &c.accuracies()) {
                Ok(r) => Some(r),
                Err(MlError::ZeroVariance | MlError::SampleSize(_)) => None,
                Err(e) => return Err(e),
            };
            out.push(WelchComparison { best: best.classifier, other: c.classifier, result });
        }
        Ok(out)
    }
}

struct SplitRun {
    outcome: SplitOutcome,
    scores: Vec<f64>,
    labels: Vec<Label>,
}

/// Seed for classifier `c` on split `s`.
pub fn model_seed(root: u64, split: usize, classifier: usize) -> u64 {
    substream_seed(root, &[1, split as u64, classifier as u64])
}

/// Repeated stratified holdout over `labels`.
///
/// `build(split, train_idx, test_idx)` produces raw train/test datasets, so
/// anything fitted on training data (feature ranges, for instance) stays
/// inside the split. Features are then standardized on the train side.
/// Splits run in parallel on the current rayon pool; results do not depend
/// on scheduling.
pub fn repeated_splits_with<E, F>(
    labels: &[Label],
    opts: &SplitOptions,
    classifiers: &[Classifier],
    build: F,
) -> Result<EvalReport, E>
where
    E: From<MlError> + Send,
    F: Fn(usize, &[usize], &[usize]) -> Result<(Dataset, Dataset), E> + Sync,
{
    if opts.repeats == 0 {
        return Err(MlError::Config("repeats must be at least 1".into()).into());
    }
    if classifiers.is_empty() {
        return Err(MlError::Config("no classifiers selected".into()).into());
    }
    let splits = (0..opts.repeats)
        .map(|s| stratified_split(labels, opts.train_frac, opts.seed, s))
        .collect::<Result<Vec<_>, _>>()?;

    let runs: Vec<Vec<SplitRun>> = splits
        .par_iter()
        .enumerate()
        .map(|(s, split)| -> Result<Vec<SplitRun>, E> {
            let (train, test) = build(s, &split.train, &split.test)?;
            let scaler = Standardizer::fit(&train)?;
            let (train, test) = (scaler.transform(&train)?, scaler.transform(&test)?);
            classifiers
                .iter()
                .enumerate()
                .map(|(c, clf)| {
                    let model = clf.train(&train, model_seed(opts.seed, s, c))?;
                    let confusion = evaluate(model.as_ref(), &test)?;
                    let scores: Vec<f64> = test.rows().iter().map(|r| model.score(r)).collect();
                    let auc = roc_curve(&scores, test.labels())?.auc;
                    Ok(SplitRun {
                        outcome: SplitOutcome { confusion, metrics: confusion.metrics(), auc },
                        scores,
                        labels: test.labels().to_vec(),
                    })
                })
                .collect::<Result<Vec<_>, MlError>>()
                .map_err(E::from)
        })
        .collect::<Result<Vec<_>, E>>()?;

    let reports = classifiers
        .iter()
        .enumerate()
        .map(|(c, clf)| summarize(clf.kind(), runs.iter().map(|r| &r[c])))
        .collect::<Result<Vec<_>, MlError>>()?;
    Ok(EvalReport { options: opts.clone(), classifiers: reports })
}

fn summarize<'a>(kind: ClassifierKind, runs: impl Iterator<Item = &'a SplitRun>) -> Result<ClassifierReport, MlError> {
    let runs: Vec<&SplitRun> = runs.collect();
    let per_metric: Vec<[f64; 5]> = runs.iter().map(|r| r.outcome.metrics.as_array()).collect();
    let column = |k: usize| per_metric.iter().map(|m| m[k]).collect::<Vec<f64>>();
    let mean_m = Metrics::from_array(std::array::from_fn(|k| mean(&column(k))));
    let std_m = Metrics::from_array(std::array::from_fn(|k| sample_std(&column(k))));
    let aucs: Vec<f64> = runs.iter().map(|r| r.outcome.auc).collect();
    let scores: Vec<f64> = runs.iter().flat_map(|r| r.scores.iter().copied()).collect();
    let labels: Vec<Label> = runs.iter().flat_map(|r| r.labels.iter().copied()).collect();
    Ok(ClassifierReport {
        classifier: kind,
        name: kind.display_name().to_string(),
        mean: mean_m,
        std: std_m,
        auc_mean: mean(&aucs),
        auc_std: sample_std(&aucs),
        confusion: runs.iter().fold(ConfusionMatrix::default(), |acc, r| acc.add(&r.outcome.confusion)),
        splits: runs.iter().map(|r| r.outcome.clone()).collect(),
        roc: roc_curve(&scores, &labels)?,
    })
}

/// [`repeated_splits_with`] on a fixed dataset.
pub fn repeated_splits(data: &Dataset, opts: &SplitOptions, classifiers: &[Classifier]) -> Result<EvalReport, MlError> {
    repeated_splits_with(data.labels(), opts, classifiers, |_, tr, te| Ok((data.subset(tr), data.subset(te))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(n: usize) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let o = i as f64 * 0.01;
            x.push(vec![2.0 + o, -1.0 + o]);
            y.push(Label::Ad);
            x.push(vec![-2.0 - o, 1.0 - o]);
            y.push(Label::Cn);
        }
        Dataset::new(x, y).unwrap()
    }

    fn all() -> Vec<Classifier> {
        ClassifierKind::ALL.iter().map(|&k| Classifier::default_for(k)).collect()
    }

    #[test]
    fn separable_single_repeat() {
        let r = repeated_splits(&separable(20), &SplitOptions { repeats: 1, ..Default::default() }, &all()).unwrap();
        for c in &r.classifiers {
            assert_eq!(c.mean.accuracy, 1.0, "{}", c.name);
            assert_eq!(c.std.accuracy, 0.0);
            assert_eq!(c.auc_mean, 1.0);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let d = separable(15);
        let o = SplitOptions { repeats: 4, ..Default::default() };
        let a = repeated_splits(&d, &o, &all()).unwrap();
        let b = repeated_splits(&d, &o, &all()).unwrap();
        assert_eq!(a, b);
        let cmp = a.welch_vs_best().unwrap();
        assert_eq!(cmp.len(), 2);
        assert!(cmp.iter().all(|c| c.result.is_none()));
    }

    #[test]
    fn bad_fraction_is_config_error() {
        let o = SplitOptions { train_frac: 0.999, repeats: 2, seed: 0 };
        assert!(matches!(repeated_splits(&separable(10), &o, &all()), Err(MlError::Config(_))));
    }
}
