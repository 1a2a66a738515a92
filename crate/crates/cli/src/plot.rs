use std::fmt::Write;

use nucmeasure::measures::ResidualCurve;

/// Plain-text plot data, one `budget upper` line per point. A third
/// `lower` column (the certified lower bound) is added when every point
/// has one.
pub fn emit_curve_plot_data(curve: &ResidualCurve) -> String {
    let with_lower = curve.points.iter().all(|(_, r)| r.certified_lower.is_some());
    let mut out = String::new();
    for (k, r) in &curve.points {
        match r.certified_lower {
            Some(lower) if with_lower => writeln!(out, "{k} {:?} {lower:?}", r.value.upper),
            _ => writeln!(out, "{k} {:?}", r.value.upper),
        }
        .expect("writing to a String");
    }
    out
}
