mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use vlcrf::beamforming::{build_eh_targets, solve_beamforming, verify_beamforming, BeamformingOptions, EhTargets};
use vlcrf::sdp::{solve_aggregate_sdp, SdpOptions};
use vlcrf::Scenario;

use common::{brute_force_two_antenna, complex_vec, inner, norm_sqr, rng};

#[test]
fn single_user_matches_maximum_ratio() {
    let mut r = rng(1);
    for _ in 0..20 {
        let n = r.random_range(1..=6);
        let g = complex_vec(&mut r, n);
        let theta = r.random_range(1e-4..1e-1);
        let sol = solve_aggregate_sdp(std::slice::from_ref(&g), &[theta], &SdpOptions::default()).unwrap();
        let expected = theta / norm_sqr(&g);
        assert!((sol.objective - expected).abs() <= 1e-8 * expected, "{} vs {expected}", sol.objective);

        let bf = solve_beamforming(std::slice::from_ref(&g), &EhTargets::new(vec![theta]).unwrap(), &BeamformingOptions::default()).unwrap();
        assert_eq!(bf.beams.len(), 1);
        assert!(bf.rank_one_ratio <= 1e-6);
        // The beam is aligned with the channel.
        let w = &bf.beams[0];
        let cos2 = inner(&g, w).norm_sqr() / (norm_sqr(&g) * norm_sqr(w));
        assert!((cos2 - 1.0).abs() < 1e-9);
    }
}

#[test]
fn two_users_two_antennas_match_brute_force() {
    let mut r = rng(2);
    for case in 0..6 {
        let channels = vec![complex_vec(&mut r, 2), complex_vec(&mut r, 2)];
        let targets = [r.random_range(0.1..1.0), r.random_range(0.1..1.0)];
        let sol = solve_aggregate_sdp(&channels, &targets, &SdpOptions::default()).unwrap();
        let oracle = brute_force_two_antenna(&channels, &targets);
        assert!(
            (sol.objective - oracle).abs() <= 1e-4 * oracle,
            "case {case}: sdp {} vs grid {oracle}",
            sol.objective
        );
    }
}

fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    // Real symmetric embedding [[Re, -Im], [Im, Re]] has the same spectrum, doubled.
    let n = m.nrows();
    let mut e = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            let z = m[(i, k)];
            e[(i, k)] = z.re;
            e[(i + n, k + n)] = z.re;
            e[(i, k + n)] = -z.im;
            e[(i + n, k)] = z.im;
        }
    }
    e.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn randomized_duality_gap_is_certified() {
    let mut r = rng(3);
    for case in 0..60 {
        let m = r.random_range(1..=6);
        let j = r.random_range(1..=5);
        let channels: Vec<_> = (0..j).map(|_| complex_vec(&mut r, m)).collect();
        let targets: Vec<f64> = (0..j).map(|_| r.random_range(1e-3..1e-2)).collect();
        let sol = solve_aggregate_sdp(&channels, &targets, &SdpOptions::default()).unwrap();
        assert!(sol.relative_gap <= 1e-7, "case {case}: gap {}", sol.relative_gap);

        let w = sol.matrix.entries();
        let trace: f64 = (0..m).map(|i| w[(i, i)].re).sum();
        assert!(hermitian_min_eigenvalue(w) >= -1e-12 * trace);
        for (g, t) in channels.iter().zip(&targets) {
            let gv = DMatrix::from_column_slice(m, 1, g);
            let q = (gv.adjoint() * w * &gv)[(0, 0)].re;
            assert!(q >= t * (1.0 - 1e-9), "case {case}: {q} < {t}");
        }
        let mut z = DMatrix::<Complex64>::identity(m, m);
        for (g, y) in channels.iter().zip(&sol.duals) {
            assert!(*y >= 0.0);
            let gv = DMatrix::from_column_slice(m, 1, g);
            z -= (&gv * gv.adjoint()).scale(*y);
        }
        assert!(hermitian_min_eigenvalue(&z) >= -1e-12, "case {case}: dual slack not PSD");
        let dual: f64 = sol.duals.iter().zip(&targets).map(|(y, t)| y * t).sum();
        assert!((trace - dual) / trace <= 1e-7, "case {case}: independent gap {}", (trace - dual) / trace);
        assert!(dual <= trace * (1.0 + 1e-12));
    }
}

#[test]
fn homogeneous_in_targets() {
    let mut r = rng(4);
    let channels: Vec<_> = (0..4).map(|_| complex_vec(&mut r, 5)).collect();
    let targets: Vec<f64> = (0..4).map(|_| r.random_range(1e-3..1e-2)).collect();
    let base = solve_aggregate_sdp(&channels, &targets, &SdpOptions::default()).unwrap().objective;
    for k in [1e-3, 0.5, 7.0, 1e4] {
        let scaled: Vec<f64> = targets.iter().map(|t| t * k).collect();
        let obj = solve_aggregate_sdp(&channels, &scaled, &SdpOptions::default()).unwrap().objective;
        assert!((obj - k * base).abs() <= 1e-8 * k * base, "k = {k}");
    }
}

#[test]
fn slack_user_can_be_dropped() {
    let mut r = rng(6);
    for _ in 0..10 {
        let channels: Vec<_> = (0..3).map(|_| complex_vec(&mut r, 4)).collect();
        let targets = vec![r.random_range(1e-3..1e-2), r.random_range(1e-3..1e-2), 1e-9];
        let full = solve_aggregate_sdp(&channels, &targets, &SdpOptions::default()).unwrap();
        if full.duals[2] > 1e-9 * full.duals.iter().copied().fold(0.0, f64::max) {
            continue;
        }
        let reduced = solve_aggregate_sdp(&channels[..2], &targets[..2], &SdpOptions::default()).unwrap();
        assert!((full.objective - reduced.objective).abs() <= 1e-8 * full.objective);
    }
}

#[test]
fn paper_scenario_beams_verify() {
    let s = Scenario::paper_default();
    let opts = BeamformingOptions::default();
    for seed in 0..20 {
        let channels = s.rf_channels(seed).g;
        let targets = build_eh_targets(&[1e-3, 2e-3, 3e-3, 4e-3, 5e-3], &s.nonlinear_eh).unwrap();
        let sol = solve_beamforming(&channels, &targets, &opts).unwrap();
        let report = verify_beamforming(&sol.beams, &channels, &targets, Some(&sol.duals)).unwrap();
        assert!(report.feasible, "seed {seed}");
        assert!(report.slackness_ok, "seed {seed}");
        let eig_sum: f64 = sol.beams.iter().map(|w| norm_sqr(w)).sum();
        assert!((eig_sum - sol.total_power).abs() <= 1e-12 * sol.total_power);
        assert!(sol.relative_gap <= 1e-7);
    }
}
