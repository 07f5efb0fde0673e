use proptest::prelude::*;
use thermalsum_core::model::{approx_winter, RegimeParams};
use thermalsum_core::reference::{sim2_index, SIM2_MEAN, SIM2_SD};
use thermalsum_core::sim::{
    ks_distance_normal, replicate_rng, run_replicates, run_simulation_1, run_simulation_2,
    simulate_crossing, MonteCarloConfig, NoiseLaw, Sim2Design, TemperatureProcessSpec,
};

/// Exact hitting-time law for `X_i = alpha +/- sigma` by enumerating all
/// `2^depth` sign sequences. Entry `n` holds `P(nu = n)` for `n <= depth`;
/// the last entry holds `P(nu > depth)`.
fn enumerate_two_point(alpha: f64, sigma: f64, tau: f64, depth: u32) -> Vec<f64> {
    let mut probs = vec![0.0; depth as usize + 2];
    let weight = 0.5f64.powi(depth as i32);
    for path in 0u32..(1 << depth) {
        let mut sum = 0.0;
        let mut hit = None;
        for day in 1..=depth {
            let up = (path >> (day - 1)) & 1 == 1;
            sum += alpha + if up { sigma } else { -sigma };
            if sum > tau {
                hit = Some(day);
                break;
            }
        }
        match hit {
            Some(d) => probs[d as usize] += weight,
            None => probs[depth as usize + 1] += weight,
        }
    }
    probs
}

#[test]
fn two_point_law_matches_enumeration() {
    const DEPTH: u32 = 12;
    let exact = enumerate_two_point(1.0, 1.0, 3.0, DEPTH);
    assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(exact[0], 0.0);
    assert_eq!(exact[1], 0.0);
    // Daily values are 0 or 2; crossing 3 takes two 2s: P(nu = n) = (n - 1) / 2^n
    for n in 2..=DEPTH as usize {
        assert!((exact[n] - (n as f64 - 1.0) / 2f64.powi(n as i32)).abs() < 1e-15);
    }

    let spec = TemperatureProcessSpec::linear(1.0, 0.0, 1.0).with_noise_law(NoiseLaw::TwoPoint);
    let r = 100_000usize;
    let times = run_replicates(&spec, 3.0, &MonteCarloConfig::new(r, 11)).unwrap();
    let mut counts = vec![0usize; DEPTH as usize + 2];
    for t in times {
        let idx = (t as usize).min(DEPTH as usize + 1);
        counts[idx] += 1;
    }
    for (n, (&c, &p)) in counts.iter().zip(&exact).enumerate() {
        let phat = c as f64 / r as f64;
        let se = (p * (1.0 - p) / r as f64).sqrt();
        if p == 0.0 {
            assert_eq!(c, 0, "atom {n}");
        } else {
            assert!(
                (phat - p).abs() <= 3.0 * se,
                "atom {n}: {phat} vs {p} (se {se})"
            );
        }
    }
}

#[test]
fn stopping_rule_holds_on_every_replicate_sampled() {
    let spec = TemperatureProcessSpec::piecewise(4.0, 0.4, 20.0);
    for i in (0..10_000u64).step_by(97) {
        let c = simulate_crossing(&spec, 1000.0, &mut replicate_rng(5, i)).unwrap();
        assert!(c.day >= 1);
        assert!(c.sum_before <= 1000.0 && c.sum_at > 1000.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pathwise_monotone_in_tau_and_alpha(
        seed in any::<u64>(),
        alpha in 0.5f64..10.0,
        dalpha in 0.0f64..5.0,
        beta in 0.0f64..0.5,
        tau in 10.0f64..800.0,
        dtau in 0.0f64..400.0,
    ) {
        let run = |a: f64, t: f64| {
            let spec = TemperatureProcessSpec::linear(a, beta, 20.0);
            simulate_crossing(&spec, t, &mut replicate_rng(seed, 0)).map(|c| c.day)
        };
        if let (Ok(lo), Ok(hi)) = (run(alpha, tau), run(alpha, tau + dtau)) {
            prop_assert!(lo <= hi);
        }
        if let (Ok(cold), Ok(warm)) = (run(alpha, tau), run(alpha + dalpha, tau)) {
            prop_assert!(warm <= cold);
        }
    }

    #[test]
    fn same_seed_same_result(seed in any::<u64>(), threads in 1usize..6) {
        let spec = TemperatureProcessSpec::linear(4.0, 0.1, 20.0);
        let a = run_replicates(&spec, 500.0, &MonteCarloConfig::new(64, seed)).unwrap();
        let b = run_replicates(&spec, 500.0, &MonteCarloConfig::new(64, seed).with_threads(threads)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn winter_mean_within_three_standard_errors_of_theory() {
    let params = RegimeParams::new(4.0, 0.0, 20.0, 2000.0).unwrap();
    let res = run_simulation_1(&params, &MonteCarloConfig::new(10_000, 7)).unwrap();
    let theory = approx_winter(&params).unwrap();
    let tol = 3.0 * theory.sd() / (res.replicates as f64).sqrt();
    assert!((tol - 3.354).abs() < 1e-3);
    assert!(
        (res.mean - 500.0).abs() < tol,
        "mean {} outside 500 +/- {tol}",
        res.mean
    );
    // replicate variance within 10% of sigma^2 tau / alpha^3
    assert!((res.variance() / 12_500.0 - 1.0).abs() < 0.1);
    assert_eq!(res.hitting_times.len(), 10_000);
    assert!(res
        .hitting_times
        .iter()
        .all(|&t| t >= 1 && t <= res.max_horizon));
}

#[test]
fn spring_times_are_normal_about_the_linearized_approximation() {
    // The simplified mean sqrt(2 tau / beta) - gamma drops an o(1) term that is
    // still several days at alpha / beta = 40; the exact crossing time and the
    // linearized variance center the law properly.
    let params = RegimeParams::new(4.0, 0.1, 20.0, 2000.0).unwrap();
    let res = run_simulation_1(&params, &MonteCarloConfig::new(10_000, 7)).unwrap();
    let theory = res.theory.unwrap();
    let m = theory.crossing_time.unwrap();
    let sd = theory.linearized_variance.unwrap().sqrt();
    let z: Vec<f64> = res
        .hitting_times
        .iter()
        .map(|&t| (f64::from(t) - m) / sd)
        .collect();
    let ks_linearized = ks_distance_normal(&z).unwrap();
    let ks_simplified = res.ks.unwrap();
    eprintln!("KS linearized = {ks_linearized:.4}, simplified = {ks_simplified:.4}");
    assert_eq!(res.z_values.as_ref().unwrap().len(), 10_000);
    assert!(ks_linearized < 0.05, "KS = {ks_linearized}");
    assert!(ks_linearized < ks_simplified);
}

#[test]
fn summary_statistics_are_recomputable() {
    let params = RegimeParams::new(2.0, 0.1, 20.0, 1000.0).unwrap();
    let res = run_simulation_1(&params, &MonteCarloConfig::new(2_000, 3)).unwrap();
    let xs: Vec<f64> = res.hitting_times.iter().map(|&t| f64::from(t)).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    assert!((res.mean - mean).abs() < 1e-9);
    assert!((res.sd - var.sqrt()).abs() < 1e-9);
}

#[test]
fn piecewise_cells_reproduce_published_values() {
    let design = Sim2Design {
        alphas: vec![4.0, 10.0],
        betas: vec![0.2, 0.8],
        taus: vec![1000.0, 2000.0],
        sigma: 20.0,
    };
    let cells = run_simulation_2(&design, &MonteCarloConfig::new(10_000, 7)).unwrap();
    let find = |t: f64, a: f64, b: f64| {
        cells
            .iter()
            .find(|c| c.tau == t && c.alpha == a && c.beta == b)
            .unwrap()
    };
    let c = find(1000.0, 4.0, 0.2);
    assert!((c.result.mean - 151.66).abs() < 0.5, "{}", c.result.mean);
    let c = find(2000.0, 4.0, 0.8);
    assert!((c.result.sd / 4.84 - 1.0).abs() < 0.05, "{}", c.result.sd);
    let c = find(1000.0, 10.0, 0.2);
    assert!((c.result.mean - 98.45).abs() < 0.5, "{}", c.result.mean);

    for c in &cells {
        let (t, a, b) = sim2_index(c.tau, c.alpha, c.beta).unwrap();
        assert!((c.result.mean - SIM2_MEAN[t][a][b]).abs() < 0.6);
        assert!((c.result.sd / SIM2_SD[t][a][b] - 1.0).abs() < 0.05);
    }
}
