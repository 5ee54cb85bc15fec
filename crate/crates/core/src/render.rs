//! Decimal rendering shared by every JSON payload: 12 significant digits.

use serde::Serializer;

/// Round to 12 significant decimal digits. Non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round12(*x))
    } else {
        s.serialize_none()
    }
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_f64(round12(*v)),
        _ => s.serialize_none(),
    }
}

pub fn ser_vec_f64<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| if x.is_finite() { Some(round12(*x)) } else { None }))
}

/// Plain-text decimal with 12 significant digits (CSV and text output).
pub fn dec12(x: f64) -> String {
    if x.is_finite() {
        format!("{}", round12(x))
    } else {
        String::new()
    }
}
