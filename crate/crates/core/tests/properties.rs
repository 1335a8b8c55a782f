//! Invariants of the scalar, Hilbert-space, measure and world-fraction layers.

mod common;

use approx::assert_abs_diff_eq;
use fractional_worlds::field::{sample_uniform_scalar_region, RegionSampler};
use fractional_worlds::hilbert::{entangle_measure, inner, project, tensor};
use fractional_worlds::measure::{
    gram_measure_scale, linear_map_measure_scale, projection_factor_analytic, projection_factor_mc,
    RealMatrix, MC_SIGMAS,
};
use fractional_worlds::worlds::{build_branch_tree, world_fractions, CoarseGrain};
use fractional_worlds::*;
use indexmap::IndexMap;
use proptest::prelude::*;
use rand::Rng;

use common::*;

// 99 degrees of freedom, upper 0.001 quantile (scipy.stats.chi2.ppf(0.999, 99)).
const CHI2_99_CRITICAL: f64 = 148.230_359_165_101_7;

fn chi_square(counts: &[u64], expected: f64) -> f64 {
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

#[test]
fn norm_is_multiplicative() {
    let mut rng = rng(1);
    for field in ScalarField::ALL {
        for _ in 0..10_000 {
            let a = random_scalar(&mut rng, field);
            let b = random_scalar(&mut rng, field);
            let ab = a.mul(&b).unwrap();
            assert!(
                (ab.norm() - a.norm() * b.norm()).abs() < 1e-12,
                "{field}: {a} {b}"
            );
        }
    }
}

#[test]
fn quaternion_product_is_associative_but_not_commutative() {
    let mut rng = rng(2);
    for _ in 0..10_000 {
        let [a, b, c] = [(); 3].map(|_| random_scalar(&mut rng, ScalarField::Quaternion));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert!((left - right).norm() < 1e-12);
    }
    let i = Scalar::quaternion(0.0, 1.0, 0.0, 0.0);
    let j = Scalar::quaternion(0.0, 0.0, 1.0, 0.0);
    assert_ne!(i.mul(&j).unwrap(), j.mul(&i).unwrap());
}

#[test]
fn box_sampler_passes_chi_square() {
    let region = RegionSpec::Box {
        bounds: vec![(-1.0, 3.0), (0.5, 1.5)],
    };
    let sampler = sample_uniform_scalar_region(ScalarField::Complex, &region, 77).unwrap();
    let n = 100_000;
    let mut counts = vec![0u64; 100];
    for c in sampler.take(n) {
        let [x, y] = [c.components()[0], c.components()[1]];
        let bx = (((x + 1.0) / 4.0 * 10.0) as usize).min(9);
        let by = (((y - 0.5) * 10.0) as usize).min(9);
        counts[by * 10 + bx] += 1;
    }
    let stat = chi_square(&counts, n as f64 / 100.0);
    assert!(stat < CHI2_99_CRITICAL, "chi-square {stat}");
}

#[test]
fn disk_sampler_passes_chi_square_on_equal_area_cells() {
    // Cells of equal area: 10 rings equal in r², 10 equal angular sectors.
    let region = RegionSpec::Ball { radius: 2.0 };
    let sampler = sample_uniform_scalar_region(ScalarField::Complex, &region, 78).unwrap();
    let n = 100_000;
    let mut counts = vec![0u64; 100];
    for c in sampler.take(n) {
        let [x, y] = [c.components()[0], c.components()[1]];
        let ring = ((c.norm_sq() / 4.0 * 10.0) as usize).min(9);
        let angle = (y.atan2(x) + std::f64::consts::PI) / std::f64::consts::TAU;
        let sector = ((angle * 10.0) as usize).min(9);
        counts[ring * 10 + sector] += 1;
    }
    let stat = chi_square(&counts, n as f64 / 100.0);
    assert!(stat < CHI2_99_CRITICAL, "chi-square {stat}");
}

#[test]
fn quaternion_annulus_sampler_is_uniform_in_radius() {
    // In 4 dimensions r⁴ is uniform on [r_in⁴, r_out⁴] for a uniform annulus.
    let region = RegionSpec::Annulus {
        inner: 1.0,
        outer: 2.0,
    };
    let sampler = RegionSampler::new(ScalarField::Quaternion, region, 79, 3).unwrap();
    let n = 100_000;
    let mut counts = vec![0u64; 100];
    for c in sampler.take(n) {
        let u = (c.norm_sq().powi(2) - 1.0) / 15.0;
        counts[((u * 100.0) as usize).min(99)] += 1;
    }
    let stat = chi_square(&counts, n as f64 / 100.0);
    assert!(stat < CHI2_99_CRITICAL, "chi-square {stat}");
}

#[test]
fn parseval_over_random_partitions() {
    let mut rng = rng(3);
    for trial in 0..1_000 {
        let field = ScalarField::ALL[trial % 3];
        let dim = rng.gen_range(1..=8);
        let v = random_state(&mut rng, field, dim);
        let p = random_partition_any(&mut rng, dim);
        let parts: Vec<StateVector> = p.outcomes().map(|o| project(&v, &p, o).unwrap()).collect();
        let sum: f64 = parts.iter().map(StateVector::norm_sq).sum();
        assert!((v.norm_sq() - sum).abs() < 1e-10);

        let reassembled = parts
            .iter()
            .skip(1)
            .fold(parts[0].clone(), |acc, x| acc.add(x).unwrap());
        assert_eq!(reassembled, v);

        for (o, part) in p.outcomes().zip(&parts) {
            assert_eq!(&project(part, &p, o).unwrap(), part);
        }
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                assert!(inner(a, b).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn entangle_measure_is_linear() {
    let mut rng = rng(4);
    for field in ScalarField::ALL {
        for _ in 0..200 {
            let dim = rng.gen_range(2..=4);
            let device = labels(dim + 1);
            let device_refs: Vec<&str> = device.iter().map(String::as_str).collect();
            let pointers: IndexMap<String, StateVector> = labels(dim)
                .into_iter()
                .zip(&device[1..])
                .map(|(l, d)| {
                    let e = StateVector::basis_vector(field, &device_refs, d).unwrap();
                    let phase = random_nonzero_scalar(&mut rng, field);
                    (l, e.scale_right(&phase).unwrap())
                })
                .collect();
            let u = random_state(&mut rng, field, dim);
            let w = random_state(&mut rng, field, dim);
            let alpha = random_scalar(&mut rng, field);
            let beta = random_scalar(&mut rng, field);
            // right-linear: E(u·α + w·β) = E(u)·α + E(w)·β
            let combined = u
                .scale_right(&alpha)
                .unwrap()
                .add(&w.scale_right(&beta).unwrap())
                .unwrap();
            let lhs = entangle_measure(&combined, &pointers).unwrap();
            let rhs = entangle_measure(&u, &pointers)
                .unwrap()
                .scale_right(&alpha)
                .unwrap()
                .add(
                    &entangle_measure(&w, &pointers)
                        .unwrap()
                        .scale_right(&beta)
                        .unwrap(),
                )
                .unwrap();
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                assert!((*a - *b).norm() < 1e-12, "{field}");
            }
        }
    }
}

#[test]
fn entangle_with_equal_pointer_norms_matches_tensor_structure() {
    let mut rng = rng(5);
    let v = random_state(&mut rng, ScalarField::Complex, 2);
    let device = ["ready", "a", "b"];
    let pointers = IndexMap::from([
        (
            "e0".to_string(),
            StateVector::basis_vector(ScalarField::Complex, &device, "a").unwrap(),
        ),
        (
            "e1".to_string(),
            StateVector::basis_vector(ScalarField::Complex, &device, "b").unwrap(),
        ),
    ]);
    let out = entangle_measure(&v, &pointers).unwrap();
    assert_abs_diff_eq!(out.norm_sq(), v.norm_sq(), epsilon = 1e-14);
    let ready = StateVector::basis_vector(ScalarField::Complex, &device, "ready").unwrap();
    assert_abs_diff_eq!(
        tensor(&v, &ready).unwrap().norm_sq(),
        v.norm_sq(),
        epsilon = 1e-14
    );
}

#[test]
fn complex_factor_sums_are_one() {
    let mut rng = rng(6);
    for _ in 0..1_000 {
        let dim = rng.gen_range(2..=8);
        let v = random_state(&mut rng, ScalarField::Complex, dim);
        let p = random_partition_any(&mut rng, dim);
        let sum: f64 = p
            .outcomes()
            .map(|o| projection_factor_analytic(&v, &p, o).unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn real_factor_sums_exceed_one() {
    let mut rng = rng(7);
    for _ in 0..1_000 {
        let dim = rng.gen_range(2..=8);
        let v = random_state(&mut rng, ScalarField::Real, dim);
        let p = OrthogonalPartition::finest(&v);
        let nonzero = v.coeffs().iter().filter(|c| !c.is_zero()).count();
        assert!(nonzero >= 2);
        let sum: f64 = p
            .outcomes()
            .map(|o| projection_factor_analytic(&v, &p, o).unwrap())
            .sum();
        assert!(sum > 1.0, "sum {sum}");
    }
}

#[test]
fn mc_agrees_with_analytic_in_random_trials() {
    let mut rng = rng(8);
    let trials = 1_000;
    let mut within = 0;
    for t in 0..trials {
        let field = ScalarField::ALL[t % 3];
        let dim = rng.gen_range(2..=5);
        let v = random_state(&mut rng, field, dim);
        let p = random_partition(&mut rng, dim, 2);
        let analytic = projection_factor_analytic(&v, &p, "o0").unwrap();
        let config = McConfig::new(5_000, t as u64);
        let est = projection_factor_mc(&v, &p, "o0", &RegionSpec::default(), &config).unwrap();
        if est.z_score(analytic) < MC_SIGMAS {
            within += 1;
        }
    }
    assert!(within as f64 >= 0.999 * trials as f64, "{within}/{trials}");
}

#[test]
fn mc_std_error_shrinks_with_samples() {
    let v = StateVector::from_reals(ScalarField::Complex, ["a", "b"], &[0.6, 0.8]).unwrap();
    let p = OrthogonalPartition::finest(&v);
    let se = |n| {
        projection_factor_mc(&v, &p, "a", &RegionSpec::default(), &McConfig::new(n, 1))
            .unwrap()
            .std_error
    };
    let ratio = se(10_000) / se(160_000);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn measure_scale_matches_hit_count_area() {
    // Area of the image of the unit square, counted on a grid-free MC.
    let mut rng = rng(9);
    for _ in 0..20 {
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let m = RealMatrix::from_rows(&rows).unwrap();
        let Some(inv) = m.inverse() else { continue };
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]].map(|c| {
            let mut out = [0.0; 2];
            m.apply(&c, &mut out);
            out
        });
        let lo = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min));
        let hi = [0, 1].map(|k| {
            corners
                .iter()
                .map(|c| c[k])
                .fold(f64::NEG_INFINITY, f64::max)
        });
        let n = 200_000;
        let mut hits = 0;
        for _ in 0..n {
            let y = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            let mut x = [0.0; 2];
            inv.apply(&y, &mut x);
            if x.iter().all(|c| (0.0..=1.0).contains(c)) {
                hits += 1;
            }
        }
        let box_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let q = hits as f64 / n as f64;
        let est = box_area * q;
        let se = box_area * (q * (1.0 - q) / n as f64).sqrt();
        let exact = linear_map_measure_scale(&m);
        assert!((est - exact).abs() < 4.0 * se, "{est} ± {se} vs {exact}");
    }
}

#[test]
fn gram_scale_equals_determinant_for_square_maps() {
    let mut rng = rng(10);
    for _ in 0..100 {
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        let det = linear_map_measure_scale(&RealMatrix::from_rows(&rows).unwrap());
        assert!((gram_measure_scale(&cols).unwrap() - det).abs() < 1e-12);
    }
}

#[test]
fn world_fractions_sum_to_one_in_every_field() {
    let mut rng = rng(11);
    for field in ScalarField::ALL {
        for _ in 0..500 {
            let dim = rng.gen_range(2..=8);
            let v = random_state(&mut rng, field, dim);
            let p = random_partition_any(&mut rng, dim);
            let t = world_fractions(&v, &p).unwrap();
            assert!((t.iter().map(|(_, f)| f).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn complex_born_chain() {
    let mut rng = rng(12);
    for _ in 0..500 {
        let dim = rng.gen_range(2..=8);
        let v = random_state(&mut rng, ScalarField::Complex, dim);
        let p = OrthogonalPartition::finest(&v);
        let t = world_fractions(&v, &p).unwrap();
        let names = labels(dim);
        for label in &names {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let e = StateVector::basis_vector(ScalarField::Complex, &refs, label).unwrap();
            let born = inner(&e, &v).unwrap().norm_sq() / v.norm_sq();
            let factor = projection_factor_analytic(&v, &p, label).unwrap();
            let fraction = t.get(label).unwrap();
            assert!((born - factor).abs() < 1e-12);
            assert!((born - fraction).abs() < 1e-12);
        }
    }
}

#[test]
fn complex_fractions_ignore_refinement_of_other_outcomes() {
    let mut rng = rng(13);
    for _ in 0..500 {
        let dim = rng.gen_range(3..=8);
        let v = random_state(&mut rng, ScalarField::Complex, dim);
        let p = random_partition(&mut rng, dim, 2);
        let group = p.group("o1").unwrap().to_vec();
        if group.len() < 2 {
            continue;
        }
        let cut = rng.gen_range(1..group.len());
        let fine = p
            .refine("o1", ("a", &group[..cut]), ("b", &group[cut..]))
            .unwrap();
        let coarse_f = world_fractions(&v, &p).unwrap().get("o0").unwrap();
        let fine_f = world_fractions(&v, &fine).unwrap().get("o0").unwrap();
        assert!((coarse_f - fine_f).abs() < 1e-12);
    }
    for field in [ScalarField::Real, ScalarField::Quaternion] {
        let report = worlds::gleason_dependence_demo(field).unwrap();
        assert!(report.shift.abs() > 1e-6);
    }
}

#[test]
fn coarse_graining_conserves_fractions() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let depth = rng.gen_range(1..=6);
        let steps: Vec<FractionTable> = (0..depth)
            .map(|_| {
                let k = rng.gen_range(2..=3);
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
                let total: f64 = raw.iter().sum();
                FractionTable::new(
                    raw.iter()
                        .enumerate()
                        .map(|(i, r)| (format!("x{i}"), r / total)),
                )
                .unwrap()
            })
            .collect();
        let merge: IndexMap<String, String> = (0..3)
            .map(|i| (format!("x{i}"), format!("g{}", rng.gen_range(0..2))))
            .collect();
        let tree = build_branch_tree(&steps, Some(&CoarseGrain::Relabel(merge))).unwrap();
        let total: f64 = tree.coarse().unwrap().values().sum();
        assert!((total - 1.0).abs() < 1e-10);
        for level in 0..depth {
            let level_sum: f64 = tree.level_fractions(level + 1).iter().sum();
            assert!((level_sum - 1.0).abs() < 1e-10);
            for idx in 0..tree.level_fractions(level).len() {
                let parent = tree.level_fractions(level)[idx];
                assert!((tree.children_sum(level, idx) - parent).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fractions_and_factors_are_scale_invariant(
        field_idx in 0usize..3,
        raw in prop::collection::vec(-1.0f64..1.0, 8..=32),
        scale in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let field = ScalarField::ALL[field_idx];
        let d = field.ray_dim();
        let dim = raw.len() / d;
        prop_assume!(dim >= 2);
        let coeffs: Vec<Scalar> = raw.chunks_exact(d).take(dim)
            .map(|c| Scalar::from_components(field, c).unwrap())
            .collect();
        let v = StateVector::new(field, labels(dim), coeffs).unwrap();
        prop_assume!(v.norm() > 1e-3);
        let c = Scalar::from_components(field, &scale[..d]).unwrap();
        prop_assume!(c.norm() > 1e-3);
        let cv = v.scale_right(&c).unwrap();
        let p = OrthogonalPartition::finest(&v);
        let t1 = world_fractions(&v, &p).unwrap();
        let t2 = world_fractions(&cv, &p).unwrap();
        for ((_, a), (_, b)) in t1.iter().zip(t2.iter()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for o in p.outcomes() {
            let a = projection_factor_analytic(&v, &p, o).unwrap();
            let b = projection_factor_analytic(&cv, &p, o).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative(
        a in prop::collection::vec(-1.0f64..1.0, 2..6),
        b in prop::collection::vec(-1.0f64..1.0, 2..6),
    ) {
        let u = StateVector::from_reals(ScalarField::Complex, labels(a.len()), &a).unwrap();
        let w = StateVector::from_reals(ScalarField::Complex, labels(b.len()), &b).unwrap();
        let t = tensor(&u, &w).unwrap();
        prop_assert!((t.norm_sq() - u.norm_sq() * w.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn inner_of_self_is_norm_sq(raw in prop::collection::vec(-2.0f64..2.0, 4..16)) {
        let coeffs: Vec<Scalar> = raw.chunks_exact(4)
            .map(|c| Scalar::from_components(ScalarField::Quaternion, c).unwrap())
            .collect();
        let v = StateVector::new(ScalarField::Quaternion, labels(coeffs.len()), coeffs).unwrap();
        let ip = inner(&v, &v).unwrap();
        prop_assert!((ip.components()[0] - v.norm_sq()).abs() < 1e-12);
        prop_assert!(ip.components()[1..].iter().all(|x| x.abs() < 1e-12));
    }
}
