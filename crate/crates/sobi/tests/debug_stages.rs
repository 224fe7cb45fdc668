use std::time::Instant;
use sobi::evaluate::{separate, Method, SeparationConfig};
use sobi::jointdiag::givens::{default_tol, joint_diagonalize, DEFAULT_MAX_SWEEPS};
use sobi::jointdiag::schur::{schur_unmixer, LagChoice};
use sobi::model::{generate_sources, mix, random_orthogonal, GroundTruth, SourceSpec};
use sobi::whitening::{estimate_whitening, sample_covariance, whitened_lagged_set};

#[test]
fn stage_breakdown() {
    let m = 64;
    let t = 9600;
    let freqs: Vec<f64> = (0..m).map(|i| 8.0 + i as f64).collect();
    let s = generate_sources(&SourceSpec::sinusoids(&freqs, 160.0), t, 4242).unwrap();
    let a = random_orthogonal(m, 4243);
    let truth = GroundTruth::new(a, s, 0.01, 4242).unwrap();
    let mut rec = mix(&truth).unwrap();
    rec.sample_rate_hz = 160.0;
    let lags: Vec<usize> = (1..=100).collect();

    for round in 0..3 {
        let t0 = Instant::now();
        let r0 = sample_covariance(&rec, 0).unwrap();
        let t1 = Instant::now();
        let wr = estimate_whitening(&r0, Some(64)).unwrap();
        let t2 = Instant::now();
        let set = whitened_lagged_set(&rec, &wr, &lags).unwrap();
        let t3 = Instant::now();
        let g = joint_diagonalize(&set, default_tol(64), DEFAULT_MAX_SWEEPS).unwrap();
        let t4 = Instant::now();
        let sc = schur_unmixer(&set, LagChoice::First).unwrap();
        let t5 = Instant::now();
        println!(
            "round {round}: cov0 {:.3}s eig {:.3}s lagset {:.3}s | givens_jd {:.3}s (sweeps {}, rot {}) schur_jd {:.3}s (iters {})",
            (t1 - t0).as_secs_f64(),
            (t2 - t1).as_secs_f64(),
            (t3 - t2).as_secs_f64(),
            (t4 - t3).as_secs_f64(),
            g.sweeps,
            g.rotations_applied,
            (t5 - t4).as_secs_f64(),
            sc.iterations,
        );
    }
    // also time full separate calls
    for method in [Method::Givens, Method::Schur] {
        let cfg = SeparationConfig { n: Some(64), lags: Some(lags.clone()), ..Default::default() };
        let r = separate(&rec, method, &cfg).unwrap();
        println!("separate {method}: {:.3}s", r.wall_time.as_secs_f64());
    }
}
