//! Acceptance suite: eight criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report lines always reach the
//! output; the process exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use fractional_worlds::inference::{
    alice_bob, model_compare, observation_accounting, update_credence, ALICE_DOWN, ALICE_UP, DOWN,
    UP,
};
use fractional_worlds::measure::{
    projection_factor_analytic, projection_factor_mc, pythagorean_check, ANALYTIC_TOL, MC_SIGMAS,
};
use fractional_worlds::worlds::{
    build_branch_tree, exact_binomial_masses, gleason_dependence_demo, repeat_distribution,
    world_fractions, CoarseGrain,
};
use fractional_worlds::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use common::*;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn spin(field: ScalarField, up: Scalar, down: Scalar) -> StateVector {
    StateVector::new(field, ["up", "down"], vec![up, down]).unwrap()
}

fn born_value_reproduction() -> Outcome {
    let v = spin(
        ScalarField::Complex,
        Scalar::complex(3f64.sqrt() / 2.0, 0.0),
        Scalar::complex(0.5, 0.0),
    );
    let p = OrthogonalPartition::finest(&v);
    let fractions = world_fractions(&v, &p).map_err(|e| e.to_string())?;
    let config = McConfig::new(1_000_000, measure::DEFAULT_SEED);
    let mut detail = Vec::new();
    for (label, expected) in [("up", 0.75), ("down", 0.25)] {
        let f = fractions.get(label).unwrap();
        let a = projection_factor_analytic(&v, &p, label).map_err(|e| e.to_string())?;
        let mc = projection_factor_mc(&v, &p, label, &RegionSpec::default(), &config)
            .map_err(|e| e.to_string())?;
        check(
            (f - expected).abs() < 1e-12,
            format!("{label}: fraction {f}"),
        )?;
        check(
            (a - f).abs() < 1e-12,
            format!("{label}: analytic {a} vs fraction {f}"),
        )?;
        let z = mc.z_score(a);
        check(
            z < MC_SIGMAS,
            format!("{label}: MC {} ± {} is {z:.2}σ off", mc.value, mc.std_error),
        )?;
        detail.push(format!(
            "{label} {f:.12} mc {:.4}±{:.4}",
            mc.value, mc.std_error
        ));
    }
    Ok(detail.join(", "))
}

fn complex_pythagoras() -> Outcome {
    let mut rng = rng(2_001);
    let trials = 1_000;
    let (mut worst, mut consistent) = (0.0f64, 0);
    for t in 0..trials {
        let dim = rng.gen_range(2..=8);
        let v = random_state(&mut rng, ScalarField::Complex, dim);
        let p = random_partition_any(&mut rng, dim);
        let report = pythagorean_check(&v, &p, &RegionSpec::default(), &McConfig::new(20_000, t))
            .map_err(|e| e.to_string())?;
        worst = worst.max(report.deviation.abs());
        if (report.mc_sum - 1.0).abs() < MC_SIGMAS * report.mc_combined_std_error {
            consistent += 1;
        }
    }
    check(worst < 1e-12, format!("analytic sum deviates by {worst:e}"))?;
    let rate = consistent as f64 / trials as f64;
    check(
        rate >= 0.99,
        format!("MC consistent in {consistent}/{trials}"),
    )?;
    Ok(format!(
        "max |Σπ−1| = {worst:.1e}, MC within 4σ in {consistent}/{trials}"
    ))
}

fn independence_of_region() -> Outcome {
    let mut rng = rng(3_001);
    let (mut agree, mut total) = (0, 0);
    for t in 0..100u64 {
        let field = ScalarField::ALL[t as usize % 3];
        let d = field.ray_dim();
        let dim = rng.gen_range(2..=6);
        let v = random_state(&mut rng, field, dim);
        let p = random_partition(&mut rng, dim, 2);
        let regions = [
            RegionSpec::Ball { radius: 1.5 },
            RegionSpec::Annulus {
                inner: 1.0,
                outer: 2.0,
            },
            RegionSpec::cube(d, 0.2, 1.3),
        ];
        let estimates = regions
            .iter()
            .enumerate()
            .map(|(k, r)| {
                projection_factor_mc(&v, &p, "o0", r, &McConfig::new(100_000, 10 * t + k as u64))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (&estimates[i], &estimates[j]);
                // Boxes map exactly onto their image boxes for ℂ and ℍ, giving
                // zero-variance estimates; allow rounding at ANALYTIC_TOL.
                let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
                total += 1;
                if (a.value - b.value).abs() <= MC_SIGMAS * se + ANALYTIC_TOL {
                    agree += 1;
                }
            }
        }
    }
    check(
        agree as f64 >= 0.99 * total as f64,
        format!("{agree}/{total} pairs agree"),
    )?;
    Ok(format!("{agree}/{total} region pairs agree within 4σ"))
}

fn repeated_spin_statistics() -> Outcome {
    let dist = repeat_distribution(0.75, 10_000).map_err(|e| e.to_string())?;
    let sigma = dist.sigma();
    let mass = dist.window_mass(0.75, 3.0 * sigma);
    check((sigma - 0.004_330).abs() < 1e-6, format!("σ = {sigma}"))?;
    check((mass - 0.9973).abs() < 0.0005, format!("3σ mass {mass}"))?;
    // scipy.stats.binom(10000, 0.75), n in [7370, 7629]
    check(
        (mass - 0.997_217_153_472_008_1).abs() < 1e-9,
        format!("3σ mass {mass} vs exact CDF"),
    )?;
    Ok(format!(
        "σ = {sigma:.6}, 3σ = {:.4}, 3σ mass = {mass:.6}",
        3.0 * sigma
    ))
}

fn alice_bob_credences() -> Outcome {
    let hs = alice_bob();
    let mut detail = Vec::new();
    for (n, expected) in [(1, 2.0 / 3.0), (2, 4.0 / 5.0), (10, 1024.0 / 1025.0)] {
        let obs = vec![UP.to_string(); n];
        let c = update_credence(&hs, &obs)
            .map_err(|e| e.to_string())?
            .get(ALICE_UP)
            .unwrap();
        check((c - expected).abs() < 1e-12, format!("n={n}: credence {c}"))?;
        detail.push(format!("n={n}: {c:.6}"));
    }
    let misled = observation_accounting(&hs, &vec![UP.to_string(); 10], ALICE_UP)
        .map_err(|e| e.to_string())?
        .misled;
    check(
        (misled - 1.0 / 2048.0).abs() < 1e-15,
        format!("misled {misled}"),
    )?;
    let after_down =
        update_credence(&hs, &[UP.to_string(), DOWN.to_string()]).map_err(|e| e.to_string())?;
    check(
        after_down.certain() == Some(ALICE_DOWN),
        "a down result must settle A↓",
    )?;
    detail.push(format!("misled at n=10: 1/{}", (1.0 / misled).round()));
    Ok(detail.join(", "))
}

/// Up-count masses by enumerating all 2ᴺ sequences with exact arithmetic.
fn enumerated_masses(p: &BigRational, n: u32) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mut masses = vec![BigRational::zero(); n as usize + 1];
    for bits in 0u32..1 << n {
        let ups = bits.count_ones();
        let mut w = BigRational::one();
        for k in 0..n {
            w *= if bits >> k & 1 == 1 { p } else { &q };
        }
        masses[ups as usize] += w;
    }
    masses
}

fn tree_binomial_oracle() -> Outcome {
    let ps = [(1, 2), (3, 4), (1, 3), (7, 10), (1, 10)];
    let mut worst = 0.0f64;
    for (num, den) in ps {
        let p = BigRational::new(BigInt::from(num), BigInt::from(den));
        let pf = num as f64 / den as f64;
        for n in 1..=12u32 {
            let oracle = enumerated_masses(&p, n);
            let closed = exact_binomial_masses(&p, n).map_err(|e| e.to_string())?;
            check(
                oracle == closed,
                format!("p={num}/{den} N={n}: closed form differs from enumeration"),
            )?;
            let steps =
                vec![FractionTable::binary(UP, DOWN, pf).map_err(|e| e.to_string())?; n as usize];
            let tree = build_branch_tree(&steps, Some(&CoarseGrain::count_of(UP)))
                .map_err(|e| e.to_string())?;
            for (k, m) in tree.count_marginal(UP).iter().enumerate() {
                let exact = oracle[k].to_f64().unwrap();
                worst = worst.max((m - exact).abs());
            }
        }
    }
    check(worst < 1e-10, format!("max deviation {worst:e}"))?;
    Ok(format!(
        "5 values of p, N = 1..12, max deviation {worst:.1e}"
    ))
}

fn field_contrast() -> Outcome {
    let real = spin(
        ScalarField::Real,
        Scalar::real(3f64.sqrt() / 2.0),
        Scalar::real(0.5),
    );
    let table =
        world_fractions(&real, &OrthogonalPartition::finest(&real)).map_err(|e| e.to_string())?;
    let s3 = 3f64.sqrt();
    let (up, down) = (table.get("up").unwrap(), table.get("down").unwrap());
    check(
        (up - s3 / (s3 + 1.0)).abs() < 1e-12,
        format!("real up {up}"),
    )?;
    check(
        (down - 1.0 / (s3 + 1.0)).abs() < 1e-12,
        format!("real down {down}"),
    )?;

    // ‖ψ_up‖² : ‖ψ_down‖² = 3 : 1, with non-real unit quaternion phases.
    let h = 0.5;
    let quat = spin(
        ScalarField::Quaternion,
        Scalar::quaternion(h, h, h, h).scale(s3 / 2.0),
        Scalar::quaternion(0.0, 0.6, 0.0, 0.8).scale(0.5),
    );
    let table =
        world_fractions(&quat, &OrthogonalPartition::finest(&quat)).map_err(|e| e.to_string())?;
    let (qup, qdown) = (table.get("up").unwrap(), table.get("down").unwrap());
    check(
        (qup - 0.9).abs() < 1e-12 && (qdown - 0.1).abs() < 1e-12,
        format!("quaternion {qup}, {qdown}"),
    )?;

    let mut shifts = Vec::new();
    for field in ScalarField::ALL {
        let report = gleason_dependence_demo(field).map_err(|e| e.to_string())?;
        let ok = match field {
            ScalarField::Complex => report.shift.abs() < 1e-12,
            _ => report.shift.abs() > 1e-6,
        };
        check(ok, format!("{field}: refinement shift {}", report.shift))?;
        shifts.push(format!("{field} {:+.4}", report.shift));
    }
    Ok(format!(
        "real ({up:.6}, {down:.6}), quaternion ({qup:.3}, {qdown:.3}), shifts: {}",
        shifts.join(", ")
    ))
}

fn model_directionality() -> Outcome {
    let report = model_compare(&[0.0, 0.5, 0.75], 100, Some(0.05)).map_err(|e| e.to_string())?;
    let s = |idx, m| report.support(idx, m).unwrap();
    check(
        s(2, "EQM") > 10.0 * s(2, "NBC"),
        format!("0.75: EQM {} NBC {}", s(2, "EQM"), s(2, "NBC")),
    )?;
    check(
        s(1, "NBC") > 10.0 * s(1, "EQM"),
        format!("0.50: NBC {} EQM {}", s(1, "NBC"), s(1, "EQM")),
    )?;
    for m in ["EQM", "CQM", "NBC"] {
        check(s(0, m) < 1e-10, format!("0.0: {m} {}", s(0, m)))?;
    }
    // Exact values from scipy.stats.binom.
    check(
        (s(2, "EQM") - 0.796_7).abs() < 1e-4,
        format!("EQM at 0.75: {}", s(2, "EQM")),
    )?;
    check(
        (s(1, "NBC") - 0.728_7).abs() < 1e-4,
        format!("NBC at 0.50: {}", s(1, "NBC")),
    )?;
    Ok(format!(
        "0.75: EQM {:.4} vs NBC {:.1e}; 0.50: NBC {:.4} vs EQM {:.1e}; 0.0: max {:.1e}",
        s(2, "EQM"),
        s(2, "NBC"),
        s(1, "NBC"),
        s(1, "EQM"),
        ["EQM", "CQM", "NBC"]
            .map(|m| s(0, m))
            .into_iter()
            .fold(0.0, f64::max)
    ))
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            name: "Born-value reproduction",
            limit: Some(Duration::from_secs(5)),
            run: born_value_reproduction,
        },
        Criterion {
            name: "complex Pythagorean theorem",
            limit: Some(Duration::from_secs(120)),
            run: complex_pythagoras,
        },
        Criterion {
            name: "independence of the region U",
            limit: None,
            run: independence_of_region,
        },
        Criterion {
            name: "repeated-spin statistics",
            limit: Some(Duration::from_secs(1)),
            run: repeated_spin_statistics,
        },
        Criterion {
            name: "Alice/Bob credences",
            limit: None,
            run: alice_bob_credences,
        },
        Criterion {
            name: "tree/binomial oracle",
            limit: None,
            run: tree_binomial_oracle,
        },
        Criterion {
            name: "field contrast",
            limit: None,
            run: field_contrast,
        },
        Criterion {
            name: "model comparison directionality",
            limit: Some(Duration::from_secs(1)),
            run: model_directionality,
        },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {}. {} ({elapsed:.2?}): {detail}", i + 1, c.name),
            Err(why) => {
                failures += 1;
                println!("FAIL {}. {} ({elapsed:.2?}): {why}", i + 1, c.name);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
