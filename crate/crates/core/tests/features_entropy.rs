use morpho_core::entropy::{
    encode_subject, exact_probabilities, field_entropy, histogram_probabilities, shannon_entropy, BinningSpec,
    FeatureBinning, Scale,
};
use morpho_core::features::{extract_features, Feature, FeatureFields};
use morpho_core::mesh::{euclidean_edge_lengths, face_areas, gaussian_curvature, TriMesh};
use morpho_core::packing::initial_packing;
use morpho_core::ricci::{default_target_curvature, ricci_flow, FlowOptions};
use morpho_core::synth::{make_grid, make_spherical_cap, make_subject, SubjectClass, SynthSpec};
use morpho_core::{Fields64, Label};
use num_rational::Ratio;
use proptest::prelude::*;

fn fields_for(mesh: &TriMesh<f64>) -> (FeatureFields<f64>, f64, f64) {
    let l = euclidean_edge_lengths(mesh).unwrap();
    let p = initial_packing(mesh, &l).unwrap();
    let t = default_target_curvature(mesh, &l);
    let s = ricci_flow(mesh, &p, &t, &FlowOptions::default()).unwrap();
    let a0: f64 = face_areas(mesh, &l).unwrap().iter().sum();
    let a1: f64 = face_areas(mesh, &s.lengths).unwrap().iter().sum();
    (extract_features(mesh, &l, &s, &p).unwrap(), a0, a1)
}

#[test]
fn area_distortion_totals_three_times_area_change() {
    for mesh in [make_grid::<f64>(6, 6), make_spherical_cap(5, 1.6)] {
        let (f, a0, a1) = fields_for(&mesh);
        let sum: f64 = f.area_distortion.iter().sum();
        assert!((sum - 3.0 * (a0 - a1)).abs() < 1e-10, "{sum} vs {}", 3.0 * (a0 - a1));
        assert!(f.is_finite());
        assert_eq!(f.len(), mesh.vertex_count());
    }
}

#[test]
fn flat_grid_has_zero_interior_curvature_feature() {
    let mesh = make_grid::<f64>(7, 5);
    let (f, _, _) = fields_for(&mesh);
    for v in 0..mesh.vertex_count() {
        if !mesh.is_boundary_vertex(v) {
            assert!(f.gaussian_curvature[v].abs() < 1e-12);
        }
    }
}

#[test]
fn spherical_cap_interior_curvature_is_positive() {
    let mesh = make_spherical_cap::<f64>(5, 1.5);
    let k = gaussian_curvature(&mesh, &euclidean_edge_lengths(&mesh).unwrap()).unwrap();
    for v in 0..mesh.vertex_count() {
        if !mesh.is_boundary_vertex(v) {
            assert!(k[v] > 0.0, "vertex {v}: {}", k[v]);
        }
    }
}

#[test]
fn features_under_uniform_scaling() {
    let mesh = make_spherical_cap::<f64>(4, 1.8);
    let big = mesh.with_vertices(mesh.vertices().iter().map(|p| p.map(|x| 2.0 * x)).collect()).unwrap();
    let (f1, _, _) = fields_for(&mesh);
    let (f2, _, _) = fields_for(&big);
    for v in 0..mesh.vertex_count() {
        assert!((f1.gaussian_curvature[v] - f2.gaussian_curvature[v]).abs() < 1e-10);
        assert!((f2.conformal_factor[v] - f1.conformal_factor[v] - 2f64.ln()).abs() < 1e-6);
        assert!((f2.area_distortion[v] - 4.0 * f1.area_distortion[v]).abs() < 1e-8);
    }
}

#[test]
fn fields_csv_layout() {
    let (f, _, _) = fields_for(&make_grid::<f64>(3, 3));
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("vertex_id,AD,CF,K"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn atrophied_subjects_are_more_curved() {
    let mean_abs_k = |class| {
        let mut acc = 0.0;
        for seed in 0..20 {
            let (m, _) = make_subject::<f64>(&SynthSpec::for_class(class, 8, 1000 + seed));
            let k = gaussian_curvature(&m, &euclidean_edge_lengths(&m).unwrap()).unwrap();
            let inner: Vec<f64> = (0..m.vertex_count()).filter(|&v| !m.is_boundary_vertex(v)).map(|v| k[v].abs()).collect();
            acc += inner.iter().sum::<f64>() / inner.len() as f64;
        }
        acc / 20.0
    };
    assert!(mean_abs_k(SubjectClass::Atrophied) > mean_abs_k(SubjectClass::Smooth));
}

#[test]
fn encoding_uses_training_ranges() {
    let subjects: Vec<Fields64> = (0..4)
        .map(|s| fields_for(&make_subject::<f64>(&SynthSpec::for_class(SubjectClass::Smooth, 4, s)).0).0)
        .collect();
    let binning = FeatureBinning::fit(&Scale::new("Scale 2", 16), subjects[..3].iter()).unwrap();
    for f in Feature::ALL {
        let spec = binning.spec(f);
        for s in &subjects[..3] {
            assert!(s.field(f).iter().all(|&v| v > spec.lo && v < spec.hi));
        }
    }
    let v = encode_subject("s3", Label::Cn, std::slice::from_ref(&subjects[3]), 1, &binning).unwrap();
    assert_eq!(v.values.len(), 3);
    assert!(v.values.iter().all(|&e| (0.0..=4.0).contains(&e)));
    assert!(encode_subject("s3", Label::Cn, std::slice::from_ref(&subjects[3]), 2, &binning).is_err());
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..200)
}

proptest! {
    #[test]
    fn entropy_within_bounds(v in values(), bins in 1usize..80) {
        let spec = BinningSpec::new(bins, -1.5, 1.5, "p").unwrap();
        let e = field_entropy(&v, &spec).unwrap();
        prop_assert!(e >= 0.0 && e <= (bins as f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_ignores_order(mut v in values(), seed in any::<u64>()) {
        let spec = BinningSpec::new(16, -2.0, 2.0, "p").unwrap();
        let e0 = field_entropy(&v, &spec).unwrap();
        let n = v.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(e0, field_entropy(&v, &spec).unwrap());
    }

    #[test]
    fn refining_bins_does_not_lower_entropy(v in values(), k in 1usize..5) {
        let coarse = BinningSpec::new(2 * k, -2.0, 2.0, "c").unwrap();
        let fine = BinningSpec::new(4 * k, -2.0, 2.0, "f").unwrap();
        prop_assert!(field_entropy(&v, &fine).unwrap() >= field_entropy(&v, &coarse).unwrap() - 1e-12);
    }

    #[test]
    fn probabilities_are_a_distribution(v in values(), bins in 1usize..64) {
        let spec = BinningSpec::new(bins, -1.0, 1.0, "p").unwrap();
        let exact = exact_probabilities(&v, &spec).unwrap();
        prop_assert_eq!(exact.iter().copied().sum::<Ratio<u64>>(), Ratio::from_integer(1));
        let p = histogram_probabilities(&v, &spec).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(shannon_entropy(&p).is_ok());
    }
}
