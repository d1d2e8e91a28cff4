//! Sampler checks against closed-form laws at n = 2 and structural constraints.

use horn_core::sampler::{sample_horn, sample_horn_all, sample_schur, SamplerConfig};
use horn_core::spectra::{permutahedron_contains, weyl_violations};
use horn_core::stats::ks_one_sample;
use horn_core::{Execution, GroupClass, Spectrum};
use std::f64::consts::PI;

fn spectrum_of(v: &[f64]) -> Spectrum {
    Spectrum::new(v.to_vec(), true).unwrap()
}

/// For n = 2, gamma_1^2 = a^2 + b^2 + 2ab c where c is the cosine between a
/// fixed axis and a uniform point on S^{d-1}: density (1 - c^2)^{(d-3)/2} with
/// d = 2, 3, 5 for SO, SU, USp.
fn cosine_cdf(group: GroupClass, c: f64) -> f64 {
    let c = c.clamp(-1.0, 1.0);
    match group {
        GroupClass::So => 0.5 + c.asin() / PI,
        GroupClass::Su => 0.5 * (c + 1.0),
        GroupClass::Usp => (2.0 + 3.0 * c - c * c * c) / 4.0,
    }
}

#[test]
fn two_by_two_matches_sphere_law() {
    let (a, b) = (1.4, 0.9);
    let n = 40_000;
    for group in [GroupClass::So, GroupClass::Su, GroupClass::Usp] {
        let cfg =
            SamplerConfig::new(group, spectrum_of(&[a, -a]), spectrum_of(&[b, -b]), n, 11).unwrap();
        let cs: Vec<f64> = sample_horn_all(&cfg, Execution::Parallel)
            .unwrap()
            .iter()
            .map(|g| (g[0] * g[0] - a * a - b * b) / (2.0 * a * b))
            .collect();
        let d = ks_one_sample(&cs, |c| cosine_cdf(group, c));
        // 1.63 / sqrt(n) is the 1% critical value
        assert!(d < 1.63 / (n as f64).sqrt(), "{group:?}: KS {d}");
    }
}

#[test]
fn two_by_two_laws_are_distinguished() {
    let (a, b) = (1.4, 0.9);
    let n = 40_000;
    let cfg = SamplerConfig::new(
        GroupClass::Usp,
        spectrum_of(&[a, -a]),
        spectrum_of(&[b, -b]),
        n,
        12,
    )
    .unwrap();
    let cs: Vec<f64> = sample_horn_all(&cfg, Execution::Parallel)
        .unwrap()
        .iter()
        .map(|g| (g[0] * g[0] - a * a - b * b) / (2.0 * a * b))
        .collect();
    for wrong in [GroupClass::So, GroupClass::Su] {
        let d = ks_one_sample(&cs, |c| cosine_cdf(wrong, c));
        assert!(d > 0.05, "{wrong:?}: KS {d}");
    }
}

#[test]
fn horn_samples_obey_weyl_and_trace() {
    let a = [2.0, 0.5, -0.5, -2.0];
    let b = [1.0, 0.7, -0.3, -1.4];
    for group in [GroupClass::So, GroupClass::Su, GroupClass::Usp] {
        let cfg = SamplerConfig::new(group, spectrum_of(&a), spectrum_of(&b), 2_000, 3).unwrap();
        for g in sample_horn_all(&cfg, Execution::Sequential).unwrap() {
            assert!(g.windows(2).all(|w| w[0] >= w[1]));
            assert!(g.iter().sum::<f64>().abs() < 1e-9);
            assert!(
                weyl_violations(&a, &b, &g, 1e-9).is_empty(),
                "{group:?}: {g:?}"
            );
        }
    }
}

#[test]
fn schur_diagonals_in_permutahedron() {
    for alpha in [vec![1.0, 0.0, -1.0], vec![3.0, 1.0, -1.5, -2.5]] {
        let s = spectrum_of(&alpha);
        for group in [GroupClass::So, GroupClass::Su, GroupClass::Usp] {
            for xi in sample_schur(group, &s, 2_000, 5, Execution::Parallel) {
                assert!(
                    permutahedron_contains(&s, &xi, 1e-9).unwrap(),
                    "{group:?}: {xi:?}"
                );
            }
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let cfg = SamplerConfig::new(
        GroupClass::Su,
        spectrum_of(&[1.0, 0.0, -1.0]),
        spectrum_of(&[0.8, 0.1, -0.9]),
        40_000,
        99,
    )
    .unwrap();
    let par = sample_horn_all(&cfg, Execution::Parallel).unwrap();
    let seq = sample_horn_all(&cfg, Execution::Sequential).unwrap();
    assert_eq!(par, seq);
    let streamed: Vec<Vec<f64>> = sample_horn(&cfg)
        .map(|s| s.unwrap().values().to_vec())
        .collect();
    assert_eq!(streamed, seq);

    let s = spectrum_of(&[2.0, -0.5, -1.5]);
    assert_eq!(
        sample_schur(GroupClass::So, &s, 30_000, 4, Execution::Parallel),
        sample_schur(GroupClass::So, &s, 30_000, 4, Execution::Sequential)
    );
}
