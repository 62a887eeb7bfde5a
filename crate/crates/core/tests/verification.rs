use zitterlab_core::cvec::CVec2;
use zitterlab_core::process::{Permutation, PhysParams, VelocityProgram};
use zitterlab_core::schrodinger::{FreeGaussian, Grid2D, Units};
use zitterlab_core::tolerances::{HJ_RESIDUAL_LINF, LINEAR_LEMMA_ROUNDOFF};
use zitterlab_core::verification::{
    eq15_consistency, free_gaussian_residual, hj_dt_study, hj_grid_study, lemma1_check,
    lemma1_residual, theorem1_convergence, TestFunction, TimeStencil,
};

const SWEEP: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

fn packet() -> FreeGaussian {
    FreeGaussian {
        sigma0: 1.0,
        k0: [0.0, 0.0],
        center: [0.0, 0.0],
        units: Units::default(),
    }
}

#[test]
fn convergence_rates_for_both_permutations() {
    for perm in Permutation::ALL {
        let (v, m) = theorem1_convergence(
            PhysParams::default(),
            perm,
            &VelocityProgram::Circular,
            CVec2::real(0.2, -0.1),
            1.0,
            &SWEEP,
        )
        .unwrap();
        assert!(v.pass, "vertex rate {}", v.fitted_rate);
        assert!(m.pass, "mean rate {}", m.fitted_rate);
    }
}

#[test]
fn expansion_rates() {
    for f in [
        TestFunction::Quadratic,
        TestFunction::Product,
        TestFunction::Cubic,
        TestFunction::GaussianSeries,
    ] {
        let r = lemma1_check(
            f,
            PhysParams::default(),
            Permutation::SPlus,
            &VelocityProgram::Circular,
            1.0,
            &SWEEP,
        )
        .unwrap();
        assert!(r.pass, "{f:?}: rate {}", r.fitted_rate);
    }
    for e in SWEEP {
        let p = PhysParams::default().with_epsilon(e);
        let r = lemma1_residual(
            TestFunction::Linear,
            p,
            Permutation::SMinus,
            &VelocityProgram::Circular,
            CVec2::real(0.5, -0.25),
            1.0,
        )
        .unwrap();
        assert!(r < LINEAR_LEMMA_ROUNDOFF);
    }
}

#[test]
fn hj_residual_on_free_gaussian_frames() {
    let g = Grid2D::new(256, 20.0).unwrap();
    for t in [0.25, 0.5, 1.0] {
        let s = free_gaussian_residual(&packet(), g, t, 1e-3, TimeStencil::FivePoint).unwrap();
        assert!(s.linf < HJ_RESIDUAL_LINF, "t = {t}: {:e}", s.linf);
    }
}

#[test]
fn hj_residual_refinement_orders() {
    let g = Grid2D::new(256, 20.0).unwrap();
    let dt = hj_dt_study(
        &packet(),
        g,
        0.5,
        &[2e-2, 6e-3, 2e-3, 6e-4, 2e-4],
        TimeStencil::ThreePoint,
    )
    .unwrap();
    assert!(dt.pass, "dt order {}", dt.fitted_rate);
    // at N = 256 the roundoff floor (~1.5e-8) is reached near dt = 0.01
    let dt4 = hj_dt_study(
        &packet(),
        g,
        0.5,
        &[0.08, 0.056, 0.04, 0.028, 0.02],
        TimeStencil::FivePoint,
    )
    .unwrap();
    assert!(dt4.pass, "dt order {} {:?}", dt4.fitted_rate, dt4.samples);
    let n = hj_grid_study(
        &packet(),
        20.0,
        &[32, 64, 128],
        0.5,
        1e-3,
        TimeStencil::FivePoint,
    )
    .unwrap();
    assert!(n.pass, "{:?}", n.samples);
}

#[test]
fn saddle_signature() {
    let r = eq15_consistency(100, 2718, Units::default());
    assert!(r.pass, "{r:?}");
}
