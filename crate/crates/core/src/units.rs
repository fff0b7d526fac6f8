//! Unit bridges between engineering units and the SI values used internally.
//!
//! Everything inside the crate is SI: metres, seconds, hertz, watts and
//! nepers. The helpers here are the only place engineering units appear.

use std::f64::consts::LN_10;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bandwidth limit (Hz) of the triangular Raman gain approximation.
pub const TRIANGULAR_GAIN_LIMIT: f64 = 15e12;

pub fn db_per_km_to_np_per_m(x: f64) -> f64 {
    x * LN_10 / 10.0 / 1000.0
}

pub fn np_per_m_to_db_per_km(x: f64) -> f64 {
    x * 1000.0 * 10.0 / LN_10
}

pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_w(x: f64) -> f64 {
    1e-3 * db_to_linear(x)
}

pub fn w_to_dbm(x: f64) -> f64 {
    linear_to_db(x * 1e3)
}

/// ps/(nm·km) to s/m².
pub fn ps_per_nm_km_to_si(x: f64) -> f64 {
    x * 1e-6
}

pub fn si_to_ps_per_nm_km(x: f64) -> f64 {
    x * 1e6
}

/// ps/(nm²·km) to s/m³.
pub fn ps_per_nm2_km_to_si(x: f64) -> f64 {
    x * 1e3
}

pub fn si_to_ps_per_nm2_km(x: f64) -> f64 {
    x * 1e-3
}

/// 1/(W·km) to 1/(W·m).
pub fn per_w_km_to_si(x: f64) -> f64 {
    x * 1e-3
}

pub fn si_to_per_w_km(x: f64) -> f64 {
    x * 1e3
}

/// 1/(W·km·THz) to 1/(W·m·Hz).
pub fn per_w_km_thz_to_si(x: f64) -> f64 {
    x * 1e-15
}

pub fn si_to_per_w_km_thz(x: f64) -> f64 {
    x * 1e15
}

/// s²/m to ps²/km.
pub fn s2_per_m_to_ps2_per_km(x: f64) -> f64 {
    x * 1e27
}

/// s³/m to ps³/km.
pub fn s3_per_m_to_ps3_per_km(x: f64) -> f64 {
    x * 1e39
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn attenuation_examples() {
        // 0.2 * ln(10) / 10000
        assert!(rel(db_per_km_to_np_per_m(0.2), 4.605_170_185_988_091e-5) < 1e-14);
        assert_eq!(db_per_km_to_np_per_m(0.0), 0.0);
        assert!(rel(np_per_m_to_db_per_km(db_per_km_to_np_per_m(0.2)), 0.2) < 1e-12);
    }

    #[test]
    fn power_levels() {
        assert!(rel(dbm_to_w(0.0), 1e-3) < 1e-15);
        assert!(rel(dbm_to_w(30.0), 1.0) < 1e-15);
        assert!((w_to_dbm(1e-3)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn boundary_conversions_are_involutive(x in -1e3f64..1e3) {
            prop_assume!(x != 0.0);
            prop_assert!(rel(np_per_m_to_db_per_km(db_per_km_to_np_per_m(x)), x) < 1e-12);
            prop_assert!(rel(si_to_ps_per_nm_km(ps_per_nm_km_to_si(x)), x) < 1e-12);
            prop_assert!(rel(si_to_ps_per_nm2_km(ps_per_nm2_km_to_si(x)), x) < 1e-12);
            prop_assert!(rel(si_to_per_w_km(per_w_km_to_si(x)), x) < 1e-12);
            prop_assert!(rel(si_to_per_w_km_thz(per_w_km_thz_to_si(x)), x) < 1e-12);
            prop_assert!(rel(w_to_dbm(dbm_to_w(x / 10.0)), x / 10.0) < 1e-12);
        }
    }
}
