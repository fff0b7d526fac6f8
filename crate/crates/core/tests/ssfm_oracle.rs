mod common;

use common::*;
use isrs_nli::ssfm::{measure_power_profile, simulate, SsfmConfig, SsfmParams};
use isrs_nli::*;

fn config(plan: ChannelPlan, link: LinkConfig, params: SsfmParams) -> SsfmConfig {
    SsfmConfig { plan, link, params, opts: ModelOptions::default() }
}

#[test]
fn measured_eta_tracks_the_integral_without_raman() {
    let plan = desk_plan(5, 10e9, 0.0);
    let link = link(1, fiber_no_raman(), &plan);
    let opts = ModelOptions::default();
    let reference = nli::eta_isrs_gn_general(&solve_raman_ode(&link, &plan, &opts).unwrap(), &plan, &link, 2, &opts)
        .unwrap();
    let params = SsfmParams { symbols: 4096, oversampling: 16, realizations: 2, ..Default::default() };
    let r = simulate(&config(plan, link, params)).unwrap();
    let centre = &r.entries[2];
    let dev = db(centre.eta) - db(reference.eta);
    assert!(dev.abs() < 0.5, "ssfm {:.3} dB vs integral {:.3} dB", db(centre.eta), db(reference.eta));
    assert_eq!(r.per_realization.len(), 2);
    for e in &r.entries {
        assert!(e.eta >= 0.0 && e.error >= 0.0);
    }
}

#[test]
fn step_refinement_barely_moves_eta() {
    let plan = desk_plan(3, 10e9, 3.0);
    let link = link(1, fiber_no_raman(), &plan);
    let coarse = SsfmParams { symbols: 512, oversampling: 8, realizations: 1, ..Default::default() };
    let fine = SsfmParams { phase_per_step: 0.5 * coarse.phase_per_step, ..coarse.clone() };
    let a = simulate(&config(plan.clone(), link.clone(), coarse)).unwrap();
    let b = simulate(&config(plan, link, fine)).unwrap();
    assert!(b.steps > a.steps);
    for (x, y) in a.entries.iter().zip(&b.entries) {
        assert!((db(x.eta) - db(y.eta)).abs() < 0.05, "{} vs {}", db(x.eta), db(y.eta));
    }
}

// Sparse 1 THz grid so the band is wide enough for a visible tilt while the
// simulated bandwidth stays small.
#[test]
fn span_end_powers_follow_the_raman_solution() {
    let p = 1e-3 * 10f64.powf(1.2);
    let channels = (0..5).map(|k| Channel { frequency: (k as f64 - 2.0) * 1e12, bandwidth: 10e9, power: p }).collect();
    let plan = ChannelPlan::new(channels).unwrap();
    let link = link(1, FiberParams::standard_smf(), &plan);
    let ode = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
    assert!(isrs_power_transfer_db(&ode).unwrap() > 0.5);
    let params = SsfmParams { symbols: 64, oversampling: 1024, realizations: 1, phase_per_step: 5e-3, ..Default::default() };
    let measured = measure_power_profile(&config(plan, link, params)).unwrap();
    for ch in 0..5 {
        let dev = db(measured.span(0).rho_end(ch)) - db(ode.span(0).rho_end(ch));
        assert!(dev.abs() < 0.05, "channel {ch}: {dev:.4} dB");
    }
}

#[test]
fn realizations_give_a_spread() {
    let plan = desk_plan(3, 10e9, 3.0);
    let link = link(1, fiber_no_raman(), &plan);
    let params = SsfmParams { symbols: 256, oversampling: 8, realizations: 3, seed: 11, ..Default::default() };
    let r = simulate(&config(plan, link, params)).unwrap();
    assert_eq!(r.per_realization.len(), 3);
    assert!(r.entries.iter().all(|e| e.error > 0.0 && e.error < e.eta));
    assert!(r.per_realization[0] != r.per_realization[1]);
}
