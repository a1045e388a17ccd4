use entrodyn::entropy::{full_from_reduced, gibbs_map, log_sum_exp, Entropy, Kernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn all_entropies() -> Vec<Entropy> {
    vec![
        Entropy::gibbs(),
        Entropy::log(),
        Entropy::tsallis(0.5).unwrap(),
        Entropy::renyi(0.5).unwrap(),
    ]
}

#[test]
fn gibbs_map_examples() {
    assert!(close(&gibbs_map(&[0.0, 0.0, 0.0]), &[1.0 / 3.0; 3], 1e-15));
    assert!(close(
        &gibbs_map(&[2f64.ln(), 0.0]),
        &[2.0 / 3.0, 1.0 / 3.0],
        1e-15
    ));
    for c in [-700.0, -3.0, 0.0, 12.5, 9000.0] {
        assert!(close(&gibbs_map(&[c; 4]), &[0.25; 4], 1e-15));
    }
}

#[test]
fn gibbs_map_survives_huge_scores() {
    let x = gibbs_map(&[1e4, -1e4, 0.0]);
    assert!(x.iter().all(|v| v.is_finite()));
    assert_eq!(x[0], 1.0);
    for e in all_entropies() {
        let x = e.choice(&[1e4, 0.0, -1e4]).unwrap();
        assert!(
            x.iter().all(|v| v.is_finite() && *v >= 0.0),
            "{}: {x:?}",
            e.name()
        );
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn choice_map_examples() {
    let y = [2f64.ln(), 0.0];
    assert!(close(
        &Entropy::gibbs().choice(&y).unwrap(),
        &gibbs_map(&y),
        1e-12
    ));
    for e in all_entropies() {
        let x = e.choice(&[1.7; 5]).unwrap();
        assert!(close(&x, &[0.2; 5], 1e-12), "{}", e.name());
    }
    let t = Entropy::tsallis(0.999)
        .unwrap()
        .choice(&[1.0, 0.0])
        .unwrap();
    assert!(close(&t, &gibbs_map(&[1.0, 0.0]), 1e-2));
}

#[test]
fn choice_is_the_argmax_of_the_regularized_objective() {
    // Brute force over a fine grid of the 2-simplex.
    let y = [0.8, -0.3, 0.1];
    for e in all_entropies() {
        let obj = |x: &[f64]| x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - e.value(x);
        let q = e.choice(&y).unwrap();
        let best = obj(&q);
        let n = 300;
        for i in 1..n {
            for j in 1..(n - i) {
                let x = [
                    i as f64 / n as f64,
                    j as f64 / n as f64,
                    (n - i - j) as f64 / n as f64,
                ];
                assert!(obj(&x) <= best + 1e-12, "{} beaten at {x:?}", e.name());
            }
        }
    }
}

#[test]
fn reduced_gradient_examples() {
    let g = Entropy::gibbs();
    assert!(g.reduced_gradient(&[0.5]).unwrap()[0].abs() < 1e-15);
    let z = g.reduced_gradient(&[2.0 / 3.0]).unwrap();
    assert!((z[0] - 2f64.ln()).abs() < 1e-14);
    assert!(g.reduced_gradient(&[1.0]).is_err());
    assert!(g.reduced_gradient(&[0.6, 0.4]).is_err());
}

#[test]
fn reduced_round_trip() {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    for e in all_entropies() {
        for _ in 0..50 {
            let n = r.random_range(1..=4);
            let z: Vec<f64> = (0..n).map(|_| r.random_range(-20.0..20.0)).collect();
            let x = e.choice_relative(&z).unwrap();
            let back = e.reduced_gradient(&x[1..]).unwrap();
            let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            // The base coordinate is recovered as 1 − Σ x, so it carries an
            // absolute rounding error of a few ulps.
            let x_min = x.iter().copied().fold(1.0, f64::min);
            let tol = 1e-10 * scale + 16.0 * f64::EPSILON / x_min;
            assert!(close(&back, &z, tol), "{}: {z:?} → {back:?}", e.name());
        }
    }
}

#[test]
fn hessian_examples() {
    let h = Entropy::gibbs()
        .hessian_reduced_at(&[1.0 / 3.0; 3])
        .unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 6.0 } else { 3.0 };
            assert!((h[(i, j)] - want).abs() < 1e-12);
        }
    }
    let x = [0.2, 0.8];
    for e in [
        Entropy::gibbs(),
        Entropy::log(),
        Entropy::tsallis(0.3).unwrap(),
    ] {
        let k = e.kernel().unwrap();
        let h = e.hessian_reduced_at(&x).unwrap();
        assert!((h[(0, 0)] - (k.d2(0.2) + k.d2(0.8))).abs() < 1e-12);
        let inv = e.hessian_inverse_reduced_at(&x).unwrap();
        assert!((inv[(0, 0)] - 1.0 / (k.d2(0.2) + k.d2(0.8))).abs() < 1e-14);
    }
}

#[test]
fn kernel_inverse_for_unit_curvatures() {
    let inv = entrodyn::entropy::kernel_reduced_inverse(&[1.0, 1.0, 1.0]);
    assert!((inv[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
    assert!((inv[(1, 1)] - 2.0 / 3.0).abs() < 1e-15);
    assert!((inv[(0, 1)] + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn kernel_inverse_matches_dense_for_random_curvatures() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let q: Vec<f64> = (0..5).map(|_| r.random_range(0.1..10.0)).collect();
        let closed = entrodyn::entropy::kernel_reduced_inverse(&q);
        let dense = entrodyn::entropy::kernel_reduced(&q).try_inverse().unwrap();
        assert!((closed - &dense).amax() <= 1e-12 * dense.amax());
    }
}

#[test]
fn hessians_are_positive_definite_and_inverses_invert() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for e in all_entropies() {
        for _ in 0..100 {
            let n = r.random_range(2..=5);
            let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.01..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let x: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let h = e.hessian_reduced_at(&x).unwrap();
            let eig = h.clone().symmetric_eigen().eigenvalues;
            assert!(eig.iter().all(|v| *v > 0.0), "{}: {eig}", e.name());
            let inv = e.hessian_inverse_reduced_at(&x).unwrap();
            let id = &h * &inv;
            let eye = nalgebra::DMatrix::<f64>::identity(n - 1, n - 1);
            assert!((id - eye).amax() < 1e-10);
        }
    }
}

#[test]
fn free_entropy_examples() {
    let g = Entropy::gibbs();
    for n in 1..6 {
        let v = g.free_entropy(&vec![0.0; n + 1]).unwrap();
        assert!((v - ((n + 1) as f64).ln()).abs() < 1e-12);
    }
    let v = g.free_entropy(&[5.0, 0.0]).unwrap();
    assert!((v - (1.0 + 5f64.exp()).ln()).abs() < 1e-12);
    assert!((log_sum_exp(&[5.0, 0.0]) - v).abs() < 1e-12);
}

#[test]
fn free_entropy_and_choice_are_shift_invariant() {
    let y = [0.4, -1.2, 2.0];
    for e in all_entropies() {
        let base = e.free_entropy(&y).unwrap();
        let q = e.choice(&y).unwrap();
        for c in [-3.0, 0.5, 10.0] {
            let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
            assert!(
                (e.free_entropy(&ys).unwrap() - base - c).abs() < 1e-10,
                "{}",
                e.name()
            );
            assert!(close(&e.choice(&ys).unwrap(), &q, 1e-12), "{}", e.name());
        }
    }
}

#[test]
fn fast_path_matches_variational_path() {
    let mut r = ChaCha8Rng::seed_from_u64(17);
    for e in [
        Entropy::gibbs(),
        Entropy::tsallis(0.5).unwrap(),
        Entropy::tsallis(0.9).unwrap(),
    ] {
        for _ in 0..50 {
            let n = r.random_range(2..=5);
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-4.0..4.0)).collect();
            let fast = e.choice(&y).unwrap();
            let slow = e.choice_variational(&y).unwrap();
            assert!(
                close(&fast, &slow, 1e-8),
                "{}: {fast:?} vs {slow:?}",
                e.name()
            );
        }
    }
}

#[test]
fn gumbel_argmax_frequencies_match_gibbs() {
    // ε = T convention: perturbing scores with Gumbel(0, ε) noise and taking
    // the argmax gives gibbs_map(y / ε).
    let y = [0.3, 0.0, -0.4];
    let eps = 0.5;
    let want = gibbs_map(&y.iter().map(|v| v / eps).collect::<Vec<_>>());
    let gumbel = Gumbel::new(0.0, eps).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let mut hits = [0usize; 3];
    for _ in 0..draws {
        let best = (0..3)
            .map(|a| (a, y[a] + gumbel.sample(&mut r)))
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        hits[best.0] += 1;
    }
    for a in 0..3 {
        let p = hits[a] as f64 / draws as f64;
        let se = (want[a] * (1.0 - want[a]) / draws as f64).sqrt();
        assert!(
            (p - want[a]).abs() < 4.0 * se,
            "action {a}: {p} vs {}",
            want[a]
        );
    }
}

#[test]
fn kernel_invariants() {
    for k in [
        Kernel::Gibbs,
        Kernel::Log,
        Kernel::tsallis(0.2).unwrap(),
        Kernel::tsallis(0.8).unwrap(),
    ] {
        for i in 1..1000 {
            assert!(k.d2(i as f64 / 1000.0) > 0.0);
        }
        let probes = [k.d1(1e-3), k.d1(1e-6), k.d1(1e-9)];
        assert!(
            probes[0] > probes[1] && probes[1] > probes[2],
            "{}",
            k.name()
        );
        let ratio = |xi: f64| (k.d1(xi) / k.d2(xi)).abs();
        if k.regular() {
            assert!(
                ratio(1e-9) < ratio(1e-6) && ratio(1e-6) < 1e-3,
                "{}",
                k.name()
            );
        }
        for i in 1..200 {
            let xi = i as f64 / 200.0;
            assert!(xi * k.d2(xi) >= k.lower_bound_m() - 1e-12, "{}", k.name());
        }
    }
    assert!(!Kernel::Log.regular());
    assert_eq!(Kernel::Gibbs.lower_bound_m(), 1.0);
    assert_eq!(Kernel::tsallis(0.3).unwrap().lower_bound_m(), 0.3);
}

#[test]
fn gradient_blows_up_at_the_boundary() {
    for e in all_entropies() {
        let near = e.gradient(&[1e-12, 0.5, 0.5 - 1e-12]);
        let mid = e.gradient(&[0.2, 0.4, 0.4]);
        let spread = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max((v - g[1]).abs()));
        assert!(spread(&near) > 10.0 * spread(&mid).max(1.0), "{}", e.name());
    }
}

#[test]
fn bad_parameters_and_boundary_inputs_are_rejected() {
    assert!(Entropy::tsallis(0.0).is_err());
    assert!(Entropy::tsallis(1.5).is_err());
    assert!(Entropy::renyi(-0.1).is_err());
    assert!(Entropy::gibbs().hessian_reduced_at(&[0.0, 1.0]).is_err());
    assert!(Entropy::gibbs().relative_scores(&[1.0, 0.0]).is_err());
    assert!(full_from_reduced(&[0.7, 0.4]).is_err());
}
