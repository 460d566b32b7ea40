use prsplit_core::numerics::RandomStream;
use prsplit_core::theory::{
    certify_block_lipschitz, certify_descent_inequalities, certify_strong_convexity, no_escape_certificate,
    no_escape_geometric_check,
};
use prsplit_core::GroundTruth;

#[test]
fn no_escape_fine_grid() {
    let report = no_escape_certificate(27.0 / 8.0, 1e-3).unwrap();
    assert!(report.h_min.passed());
    assert!(report.rc_max.passed());
    assert!(report.grid_points >= 1000);
    // the maximum sits on the α = 1 edge at β = 9/8, where R_C = 3β
    assert_eq!(report.rc_max.witnesses[0].point, vec![1.0, 9.0 / 8.0]);
    assert_eq!((report.numerator_decreases, report.denominator_increases), (0, 0));

    let mut s = RandomStream::new(11, 0);
    let geo = no_escape_geometric_check(27.0 / 8.0, 1e-3, 6, 1.0, &mut s).unwrap();
    assert!(geo.passed(), "{geo:?}");
}

#[test]
fn heavier_penalty_keeps_the_floor() {
    for c in [4.0, 8.0, 50.0] {
        assert!(no_escape_certificate(c, 2e-3).unwrap().h_min.passed());
    }
}

#[test]
fn strong_convexity_across_dimensions_and_penalties() {
    for (i, n) in [2usize, 8, 32].into_iter().enumerate() {
        for rel in [1.0, 2.0, 27.0 / 8.0] {
            let mut s = RandomStream::new(40, i as u64);
            let norm = 0.5 + 2.0 * s.uniform();
            let truth = GroundTruth::random(n, norm, 0.0, &mut s).unwrap();
            let truth = truth.with_rho(rel * truth.norm_x_sq()).unwrap();
            let r = certify_strong_convexity(&truth, 200, &mut s).unwrap();
            assert!(r.passed(), "n={n} rel={rel}: {r:?}");
        }
    }
}

#[test]
fn lipschitz_and_descent_at_other_scales() {
    for (i, norm) in [0.3, 1.0, 4.0].into_iter().enumerate() {
        let mut s = RandomStream::new(50, i as u64);
        let truth = GroundTruth::random(7, norm, 0.0, &mut s).unwrap();
        let truth = truth.with_rho(27.0 / 8.0 * truth.norm_x_sq()).unwrap();
        let slack_scale = norm.powi(4).max(1.0);
        let lip = certify_block_lipschitz(&truth, 2000, &mut s);
        assert!(lip.margin() >= -1e-10 * norm * norm, "{lip:?}");
        let desc = certify_descent_inequalities(&truth, 2000, &mut s);
        assert!(desc.margin() >= -1e-10 * slack_scale, "{desc:?}");
    }
}
