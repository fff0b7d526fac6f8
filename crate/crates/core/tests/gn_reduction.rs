mod common;

use std::time::Instant;

use common::*;
use isrs_nli::nli::{
    eta_conventional_gn, eta_effective_attenuation_integral, eta_isrs_gn_analytic, eta_isrs_gn_general,
};
use isrs_nli::{analytic_triangular_profile, fit_effective_attenuation, ModelOptions};

#[test]
fn conventional_gn_matches_reference() {
    let plan = desk_plan(5, 40e9, 0.0);
    let fiber = fiber_flat_dispersion();
    let link = link(1, fiber.clone(), &plan);
    let opts = ModelOptions::default();
    for ch in [2, 0] {
        let t = Instant::now();
        let reference = gn_reference(&plan, &fiber, 80e3, ch);
        let t_ref = t.elapsed();
        let t = Instant::now();
        let got = eta_conventional_gn(&plan, &link, ch, &opts).unwrap();
        eprintln!(
            "ch {ch}: reference {:.6} dB ({:?}), integral {:.6} dB ({:?})",
            db(reference),
            t_ref,
            got.eta_db(),
            t.elapsed()
        );
        assert!((got.eta_db() - db(reference)).abs() < 0.01);
    }
}

#[test]
fn general_profile_matches_reference() {
    let plan = desk_plan(5, 40e9, 0.0);
    let fiber = fiber_flat_dispersion();
    let link = link(1, fiber.clone(), &plan);
    let opts = ModelOptions::default();
    let reference = db(gn_reference(&plan, &fiber, 80e3, 2));
    let profile = analytic_triangular_profile(&link, &plan, &opts).unwrap();
    let t = Instant::now();
    let general = eta_isrs_gn_general(&profile, &plan, &link, 2, &opts).unwrap();
    eprintln!("general {:.6} dB ({:?}) vs {reference:.6}", general.eta_db(), t.elapsed());
    assert!((general.eta_db() - reference).abs() < 0.01);

    let t = Instant::now();
    let analytic = eta_isrs_gn_analytic(&link, &plan, 2, &opts).unwrap();
    eprintln!("analytic {:.6} dB ({:?})", analytic.eta_db(), t.elapsed());
    assert!((analytic.eta_db() - reference).abs() < 0.01);

    let eff = fit_effective_attenuation(&profile, 0).unwrap();
    let e = eta_effective_attenuation_integral(&plan, &link, &eff, 2, &opts).unwrap();
    assert!((e.eta_db() - reference).abs() < 0.01);
}
