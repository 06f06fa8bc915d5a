//! Number formatting shared by every CSV/JSON emitter.

/// Twelve significant digits in scientific notation; infinities and NaN are
/// spelled `inf`, `-inf` and `nan`.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.11e}")
    }
}

/// `10 log10(x)`; zero maps to `-inf`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Watts to dBm.
pub fn to_dbm(watts: f64) -> f64 {
    to_db(watts * 1e3)
}
