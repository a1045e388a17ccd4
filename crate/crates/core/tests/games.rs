use entrodyn::equilibria::nash_enumerate_small;
use entrodyn::games::*;
use entrodyn::profile::MixedProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parallel_links(players: usize, delays: Vec<Vec<f64>>) -> CongestionSpec {
    CongestionSpec {
        resources: delays.len(),
        routes: vec![(0..delays.len()).map(|r| vec![r]).collect(); players],
        delays,
    }
}

/// Rosenthal's potential `−Σ_r Σ_{j ≤ load_r} d_r(j)`.
fn rosenthal(spec: &CongestionSpec, profile: &[usize]) -> f64 {
    let mut load = vec![0usize; spec.resources];
    for (k, &a) in profile.iter().enumerate() {
        for &r in &spec.routes[k][a] {
            load[r] += 1;
        }
    }
    -(0..spec.resources)
        .map(|r| spec.delays[r][..load[r]].iter().sum::<f64>())
        .sum::<f64>()
}

#[test]
fn expected_payoff_examples() {
    let g = FiniteGame::coordination();
    let pure = MixedProfile::pure(&[2, 2], &[0, 0]);
    assert_eq!(g.expected_payoff(&pure, 1, 0).unwrap(), 1.0);
    let center = MixedProfile::uniform(&[2, 2]);
    assert_eq!(g.expected_payoff(&center, 1, 0).unwrap(), 0.5);
    assert!(g.expected_payoff(&center, 2, 0).is_err());
    assert!(g.expected_payoff(&center, 0, 2).is_err());
}

#[test]
fn expected_payoffs_match_enumeration() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let g = FiniteGame::from_fn(vec![2, 3, 2], |_, _| r.random_range(-2.0..2.0)).unwrap();
    let x = MixedProfile::new(vec![vec![0.3, 0.7], vec![0.1, 0.5, 0.4], vec![0.8, 0.2]]);
    for k in 0..3 {
        for a in 0..g.action_counts()[k] {
            let mut want = 0.0;
            for idx in 0..g.num_profiles() {
                let p = g.decode(idx);
                if p[k] != a {
                    continue;
                }
                let w: f64 = (0..3)
                    .filter(|&j| j != k)
                    .map(|j| x.player(j)[p[j]])
                    .product();
                want += w * g.payoff(k, &p);
            }
            assert!((g.expected_payoff(&x, k, a).unwrap() - want).abs() < 1e-14);
            assert!((g.payoff_vectors(&x)[k][a] - want).abs() < 1e-14);
        }
    }
}

#[test]
fn identical_interest_is_potential() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let table: Vec<f64> = (0..12).map(|_| r.random::<f64>()).collect();
    let g = FiniteGame::new(vec![3, 4], vec![table.clone(), table.clone()]).unwrap();
    let cert = fit_potential(&g, POTENTIAL_TOL);
    assert!(cert.residual <= 1e-12);
    for (u, v) in cert.potential_values.iter().zip(&table) {
        assert!((u - (v - table[0])).abs() < 1e-12);
    }
}

#[test]
fn matching_pennies_is_not_potential() {
    let cert = fit_potential(&FiniteGame::matching_pennies(), POTENTIAL_TOL);
    assert!(cert.residual > 0.1);
    assert!(!cert.is_potential());
}

#[test]
fn two_player_parallel_links() {
    let spec = parallel_links(2, vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
    let g = congestion_game(&spec).unwrap();
    assert!(fit_potential(&g, POTENTIAL_TOL).is_potential());
    let nash = nash_enumerate_small(&g).unwrap();
    assert_eq!(nash.pure, vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn congestion_potential_is_rosenthal() {
    let spec = parallel_links(3, vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]]);
    let g = congestion_game(&spec).unwrap();
    let cert = fit_potential(&g, POTENTIAL_TOL);
    assert!(cert.residual <= 1e-9);
    let base = rosenthal(&spec, &g.decode(0));
    for idx in 0..g.num_profiles() {
        let p = g.decode(idx);
        assert!((cert.potential_values[idx] - (rosenthal(&spec, &p) - base)).abs() < 1e-12);
    }

    // Overlapping routes on a small network.
    let net = CongestionSpec {
        resources: 3,
        delays: vec![vec![1.0, 3.0], vec![2.0, 2.5], vec![0.5, 4.0]],
        routes: vec![vec![vec![0, 1], vec![2]], vec![vec![0], vec![1, 2]]],
    };
    let g = congestion_game(&net).unwrap();
    for idx in 0..g.num_profiles() {
        let p = g.decode(idx);
        for k in 0..2 {
            let mut q = p.clone();
            q[k] = 1 - p[k];
            let du = g.payoff(k, &q) - g.payoff(k, &p);
            let dphi = rosenthal(&net, &q) - rosenthal(&net, &p);
            assert!((du - dphi).abs() < 1e-12);
        }
    }
    assert!(fit_potential(&g, POTENTIAL_TOL).is_potential());
}

#[test]
fn single_player_potential_is_the_payoff() {
    let spec = CongestionSpec {
        resources: 2,
        delays: vec![vec![1.5], vec![0.25]],
        routes: vec![vec![vec![0], vec![1], vec![0, 1]]],
    };
    let g = congestion_game(&spec).unwrap();
    let cert = fit_potential(&g, POTENTIAL_TOL);
    for a in 0..3 {
        let want = g.payoff(0, &[a]) - g.payoff(0, &[0]);
        assert!((cert.potential_values[a] - want).abs() < 1e-12);
    }
}

#[test]
fn malformed_congestion_is_rejected() {
    let mut spec = parallel_links(2, vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
    spec.routes[1][0] = vec![5];
    assert!(congestion_game(&spec).is_err());
    let short = parallel_links(3, vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
    assert!(congestion_game(&short).is_err());
}

#[test]
fn normalization_examples() {
    let unit = FiniteGame::coordination();
    let (g, maps) = normalize_payoffs(&unit);
    assert_eq!(g, unit);
    assert!(maps.iter().all(|m| m.scale == 1.0 && m.offset == 0.0));

    let (g, maps) = normalize_payoffs(&FiniteGame::matching_pennies());
    assert!(maps.iter().all(|m| m.scale == 0.5 && m.offset == 0.5));
    assert_eq!(g.payoff(0, &[0, 0]), 1.0);
    assert_eq!(g.payoff(1, &[0, 0]), 0.0);

    let flat = FiniteGame::from_fn(vec![2, 2], |k, _| if k == 0 { 3.0 } else { -1.0 }).unwrap();
    let (g, maps) = normalize_payoffs(&flat);
    assert!(maps.iter().all(|m| m.degenerate));
    assert!(g.table(0).iter().chain(g.table(1)).all(|&v| v == 0.5));
}

#[test]
fn normalization_preserves_best_responses() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let g = FiniteGame::from_fn(vec![3, 3], |_, _| r.random_range(-50.0..20.0)).unwrap();
    let (n, _) = normalize_payoffs(&g);
    for idx in 0..g.num_profiles() {
        let p = g.decode(idx);
        for k in 0..2 {
            let best = |game: &FiniteGame| {
                let mut q = p.clone();
                (0..3)
                    .map(|a| {
                        q[k] = a;
                        (a, game.payoff(k, &q))
                    })
                    .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b })
                    .0
            };
            assert_eq!(best(&g), best(&n));
        }
    }
}

#[test]
fn restricted_games_keep_payoffs() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let g = FiniteGame::from_fn(vec![3, 2], |_, _| r.random::<f64>()).unwrap();
    let sub = g.restrict(&[vec![0, 2], vec![1]]).unwrap();
    assert_eq!(sub.action_counts(), &[2, 1]);
    assert_eq!(sub.payoff(0, &[1, 0]), g.payoff(0, &[2, 1]));
    assert!(g.restrict(&[vec![], vec![0]]).is_err());
    assert!(g.restrict(&[vec![3], vec![0]]).is_err());
}

#[test]
fn game_specs_round_trip_through_json() {
    let text = r#"{"players": 2, "actions": [2, 3],
        "payoffs": [[[1, 0, 2], [0, 1, 0]], [[0, 1, 1], [1, 0, 2]]]}"#;
    let spec: GameSpec = serde_json::from_str(text).unwrap();
    let g = spec.build().unwrap();
    assert_eq!(g.payoff(0, &[0, 2]), 2.0);
    assert_eq!(g.payoff(1, &[1, 2]), 2.0);
    let back = GameSpec::from_game(&g).build().unwrap();
    assert_eq!(back, g);

    let bad: GameSpec =
        serde_json::from_str(r#"{"actions": [2, 2], "payoffs": [[[1, 0]], [[0, 1], [1, 0]]]}"#)
            .unwrap();
    assert!(bad.build().is_err());
    assert!(serde_json::from_str::<GameSpec>(r#"{"payofs": []}"#).is_err());
}
