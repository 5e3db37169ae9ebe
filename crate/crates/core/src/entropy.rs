//! Histogram entropy encoding of feature fields.
//!
//! Each field is binned into `n_bins` equal-width bins over a range fitted
//! on training subjects; out-of-range values land in the end bins. The
//! Shannon entropy (bits) of the bin distribution is one feature-vector
//! coordinate.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Feature, FeatureFields};
use crate::label::Label;
use crate::real::{tol, Real};

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("no values to bin")]
    Empty,
    #[error("value {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid binning: {0}")]
    Spec(String),
    #[error("not a probability distribution: {0}")]
    Distribution(String),
    #[error("feature {feature} has zero span over the training set")]
    DegenerateRange { feature: &'static str },
    #[error("expected {expected} regions, got {got}")]
    RegionCount { expected: usize, got: usize },
}

/// Equal-width binning of one feature at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub n_bins: usize,
    pub lo: f64,
    pub hi: f64,
    pub scale_name: String,
}

impl BinningSpec {
    pub fn new(n_bins: usize, lo: f64, hi: f64, scale_name: impl Into<String>) -> Result<Self, EntropyError> {
        let spec = Self { n_bins, lo, hi, scale_name: scale_name.into() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), EntropyError> {
        if self.n_bins == 0 {
            return Err(EntropyError::Spec("n_bins must be at least 1".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(EntropyError::Spec(format!("range [{}, {}] is empty", self.lo, self.hi)));
        }
        Ok(())
    }

    /// Bin of a finite value, clamped to the end bins.
    pub fn bin_of<T: Real>(&self, value: T) -> usize {
        let t = (value.to_f64_lossy() - self.lo) / (self.hi - self.lo) * self.n_bins as f64;
        if t <= 0.0 {
            0
        } else {
            (t.floor() as usize).min(self.n_bins - 1)
        }
    }

    /// Upper bound of the entropy in bits.
    pub fn max_entropy(&self) -> f64 {
        (self.n_bins as f64).log2()
    }
}

/// A named bin count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub name: String,
    pub n_bins: usize,
}

impl Scale {
    pub fn new(name: impl Into<String>, n_bins: usize) -> Self {
        Self { name: name.into(), n_bins }
    }

    /// "Scale 1" to "Scale 3" with 4, 16 and 64 bins.
    pub fn defaults() -> Vec<Scale> {
        vec![Scale::new("Scale 1", 4), Scale::new("Scale 2", 16), Scale::new("Scale 3", 64)]
    }

    /// Scales named by position for a list of bin counts.
    pub fn from_bins(bins: &[usize]) -> Vec<Scale> {
        bins.iter().enumerate().map(|(i, &n)| Scale::new(format!("Scale {}", i + 1), n)).collect()
    }
}

pub fn histogram_counts<T: Real>(values: &[T], spec: &BinningSpec) -> Result<Vec<usize>, EntropyError> {
    spec.validate()?;
    if values.is_empty() {
        return Err(EntropyError::Empty);
    }
    let mut counts = vec![0usize; spec.n_bins];
    for (index, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(EntropyError::NonFinite { index });
        }
        counts[spec.bin_of(v)] += 1;
    }
    Ok(counts)
}

/// Bin probabilities `n_i / n`.
pub fn histogram_probabilities<T: Real>(values: &[T], spec: &BinningSpec) -> Result<Vec<T>, EntropyError> {
    let counts = histogram_counts(values, spec)?;
    let n = T::from_count(values.len());
    Ok(counts.iter().map(|&c| T::from_count(c) / n).collect())
}

/// Bin probabilities as exact fractions; they sum to exactly one.
pub fn exact_probabilities<T: Real>(values: &[T], spec: &BinningSpec) -> Result<Vec<Ratio<u64>>, EntropyError> {
    let counts = histogram_counts(values, spec)?;
    let n = values.len() as u64;
    Ok(counts.iter().map(|&c| Ratio::new(c as u64, n)).collect())
}

/// Shannon entropy in bits with `0 log 0 = 0`, clamped to `[0, log2 len]`.
pub fn shannon_entropy<T: Real>(p: &[T]) -> Result<T, EntropyError> {
    if p.is_empty() {
        return Err(EntropyError::Empty);
    }
    if let Some(i) = p.iter().position(|x| !(x.is_finite() && *x >= T::zero())) {
        return Err(EntropyError::Distribution(format!("p[{i}] = {}", p[i])));
    }
    let total: T = p.iter().copied().sum();
    if (total - T::one()).abs() > T::lit(tol::PROBABILITY_SUM) {
        return Err(EntropyError::Distribution(format!("sums to {total}")));
    }
    let e = p.iter().filter(|&&x| x > T::zero()).map(|&x| -x * x.log2()).sum::<T>();
    let upper = T::from_count(p.len()).log2();
    Ok(e.max(T::zero()).min(upper))
}

/// Entropy of `values` binned by `spec`.
pub fn field_entropy<T: Real>(values: &[T], spec: &BinningSpec) -> Result<T, EntropyError> {
    shannon_entropy(&histogram_probabilities(values, spec)?)
}

/// Training-population range of one feature, widened by 1% of the span per side.
pub fn fit_ranges<'a, T: Real + 'a>(
    training: impl IntoIterator<Item = &'a FeatureFields<T>>,
    feature: Feature,
) -> Result<(f64, f64), EntropyError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for fields in training {
        for &v in fields.field(feature) {
            let v = v.to_f64_lossy();
            if !v.is_finite() {
                continue;
            }
            any = true;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !any {
        return Err(EntropyError::Empty);
    }
    let span = hi - lo;
    if !(span > 0.0) {
        return Err(EntropyError::DegenerateRange { feature: feature.tag() });
    }
    Ok((lo - 0.01 * span, hi + 0.01 * span))
}

/// Binning of all three features at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBinning {
    pub scale: Scale,
    pub area_distortion: BinningSpec,
    pub conformal_factor: BinningSpec,
    pub gaussian_curvature: BinningSpec,
}

impl FeatureBinning {
    /// Fits ranges on `training` and applies the scale's bin count.
    pub fn fit<'a, T: Real + 'a>(
        scale: &Scale,
        training: impl IntoIterator<Item = &'a FeatureFields<T>> + Clone,
    ) -> Result<Self, EntropyError> {
        let spec = |f: Feature| -> Result<BinningSpec, EntropyError> {
            let (lo, hi) = fit_ranges(training.clone(), f)?;
            BinningSpec::new(scale.n_bins, lo, hi, scale.name.clone())
        };
        Ok(Self {
            scale: scale.clone(),
            area_distortion: spec(Feature::AreaDistortion)?,
            conformal_factor: spec(Feature::ConformalFactor)?,
            gaussian_curvature: spec(Feature::GaussianCurvature)?,
        })
    }

    pub fn spec(&self, feature: Feature) -> &BinningSpec {
        match feature {
            Feature::AreaDistortion => &self.area_distortion,
            Feature::ConformalFactor => &self.conformal_factor,
            Feature::GaussianCurvature => &self.gaussian_curvature,
        }
    }
}

/// Per-subject entropies `[E_AD, E_CF, E_K]` per region, regions concatenated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub subject_id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Column names `{region}_{AD|CF|K}_entropy`.
pub fn vector_columns(regions: &[String]) -> Vec<String> {
    regions
        .iter()
        .flat_map(|r| Feature::ALL.iter().map(move |f| format!("{r}_{}_entropy", f.tag())))
        .collect()
}

pub fn encode_subject<T: Real>(
    subject_id: &str,
    label: Label,
    fields_per_region: &[FeatureFields<T>],
    expected_regions: usize,
    binning: &FeatureBinning,
) -> Result<FeatureVector, EntropyError> {
    if fields_per_region.len() != expected_regions {
        return Err(EntropyError::RegionCount { expected: expected_regions, got: fields_per_region.len() });
    }
    let mut values = Vec::with_capacity(3 * expected_regions);
    for fields in fields_per_region {
        for f in Feature::ALL {
            values.push(field_entropy(fields.field(f), binning.spec(f))?.to_f64_lossy());
        }
    }
    Ok(FeatureVector { subject_id: subject_id.to_string(), label, values })
}
