//! Real dilogarithm (Spence's function).

use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

/// Power series `sum z^k / k^2`, valid for `|z| <= 1/2`.
fn dilog_series(z: f64) -> f64 {
    let mut term = z;
    let mut sum = 0.0;
    let mut k = 1.0_f64;
    loop {
        let contrib = term / (k * k);
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs().max(1e-300) || k > 200.0 {
            break;
        }
        term *= z;
        k += 1.0;
    }
    sum
}

/// `Li2(z) = -∫_0^z ln(1-u)/u du` for real `z <= 1`.
///
/// Arguments are mapped into `|w| <= 1/2` with the reflection, Landen and
/// inversion identities before summing the series. Returns NaN for `z > 1`,
/// where the real branch is not defined.
pub fn dilog(z: f64) -> f64 {
    if z.is_nan() || z > 1.0 {
        return f64::NAN;
    }
    if z == 1.0 {
        return PI2_6;
    }
    if z == 0.0 {
        return 0.0;
    }
    if z < -1.0 {
        // Li2(z) = -pi^2/6 - ln^2(-z)/2 - Li2(1/z)
        let l = (-z).ln();
        return -PI2_6 - 0.5 * l * l - dilog(1.0 / z);
    }
    if z < -0.5 {
        // Landen: Li2(z) = -Li2(z/(z-1)) - ln^2(1-z)/2, with z/(z-1) in (1/3, 1/2].
        let l = (1.0 - z).ln();
        return -dilog_series(z / (z - 1.0)) - 0.5 * l * l;
    }
    if z <= 0.5 {
        return dilog_series(z);
    }
    // Reflection: Li2(z) = pi^2/6 - ln(z) ln(1-z) - Li2(1-z), 1-z in (0, 1/2).
    PI2_6 - z.ln() * (1.0 - z).ln() - dilog_series(1.0 - z)
}
