//! Deterministic report emission: JSON, CSV, and gnuplot renderings of the
//! experiment results, plus atomic file writes.
//!
//! Every float is printed with [`fmt_f64`] (17 significant digits, exponent
//! form), which round-trips `f64` exactly; given the same inputs the
//! emitters produce byte-identical output. The only intentionally varying
//! field is the optional timestamp in the meta block, which callers omit
//! for reproducible artifacts. JSON artifacts render non-finite floats as
//! `null` (JSON has no infinity token); CSV and gnuplot keep the literal
//! `inf`/`NaN` text.
//!
//! The writers are hand-rolled: the schemas are small and fixed, and
//! keeping serialization dependency-free makes the byte-level output an
//! explicit part of this crate's contract rather than an upstream detail.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::experiments::{CommutingReport, DivergenceReport, StabilityTable};
use crate::funcspace::VectorFunction;
use crate::spectral::{HypothesisReport, SpectralDecomposition};
use crate::transport::TransportOperator;

/// Exact decimal rendering of a float: 17 significant digits in exponent
/// form, enough to reconstruct the bit pattern on parse.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON numeric rendering. JSON has no tokens for non-finite values —
/// possible at extreme subdivision counts, where operator coefficients
/// leave f64 range — so those become `null`. CSV and gnuplot artifacts
/// keep the literal `inf`/`NaN` tokens instead.
fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".to_string()
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn json_str(s: &str) -> String {
    format!("\"{}\"", escape_json(s))
}

fn json_f64_array(xs: impl IntoIterator<Item = f64>) -> String {
    let inner: Vec<String> = xs.into_iter().map(json_f64).collect();
    format!("[{}]", inner.join(","))
}

/// Artifact metadata: which command produced it, with which
/// configuration, and (optionally) when. Config entries keep insertion
/// order so the echo is deterministic.
#[derive(Debug, Clone)]
pub struct Meta {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub timestamp: Option<String>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        Meta {
            command: command.to_string(),
            config: Vec::new(),
            timestamp: None,
        }
    }

    /// Append one configuration echo entry.
    pub fn flag(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_timestamp(mut self, timestamp: Option<String>) -> Self {
        self.timestamp = timestamp;
        self
    }
}

/// Current wall-clock time in RFC 3339, second resolution, UTC.
pub fn rfc3339_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn meta_json(meta: &Meta) -> String {
    let mut out = String::from("{");
    let _ = write!(
        out,
        "\"tool\":\"trotterlab\",\"version\":{},\"command\":{}",
        json_str(env!("CARGO_PKG_VERSION")),
        json_str(&meta.command)
    );
    out.push_str(",\"config\":{");
    for (i, (k, v)) in meta.config.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:{}", json_str(k), json_str(v));
    }
    out.push('}');
    if let Some(ts) = &meta.timestamp {
        let _ = write!(out, ",\"timestamp\":{}", json_str(ts));
    }
    out.push('}');
    out
}

fn eigenvalues_json(d: &SpectralDecomposition) -> String {
    json_f64_array(d.eigenvalues().iter().copied())
}

fn eigenvector_rows_json(d: &SpectralDecomposition, left: bool) -> String {
    let rows: Vec<String> = (0..d.n())
        .map(|i| {
            let v = if left {
                d.left_eigenvector(i)
            } else {
                d.right_eigenvector(i)
            };
            json_f64_array(v.iter().copied())
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// JSON for a single spectral decomposition: ascending eigenvalues and
/// both eigenvector families, one array per eigenvalue.
pub fn decomposition_json(d: &SpectralDecomposition, meta: &Meta) -> String {
    format!(
        "{{\"meta\":{},\"n\":{},\"eigenvalues\":{},\"right_eigenvectors\":{},\"left_eigenvectors\":{}}}",
        meta_json(meta),
        d.n(),
        eigenvalues_json(d),
        eigenvector_rows_json(d, false),
        eigenvector_rows_json(d, true),
    )
}

/// JSON for the eigenvalue-gap check of a pair and its sum.
pub fn hypothesis_json(report: &HypothesisReport, meta: &Meta) -> String {
    format!(
        "{{\"meta\":{},\"gap\":{},\"satisfied\":{},\"first\":{{\"eigenvalues\":{}}},\"second\":{{\"eigenvalues\":{}}},\"sum\":{{\"eigenvalues\":{}}}}}",
        meta_json(meta),
        json_f64(report.gap),
        report.satisfied,
        eigenvalues_json(&report.decomp_a),
        eigenvalues_json(&report.decomp_b),
        eigenvalues_json(&report.decomp_c),
    )
}

/// JSON for a transport operator: terms ascending by shift, each with its
/// full matrix in row-major nested arrays.
pub fn operator_json(op: &TransportOperator, meta: &Meta) -> String {
    let mut terms = String::from("[");
    for (i, term) in op.terms().iter().enumerate() {
        if i > 0 {
            terms.push(',');
        }
        let m = term.matrix();
        let rows: Vec<String> = (0..m.nrows())
            .map(|r| json_f64_array((0..m.ncols()).map(|c| m[(r, c)])))
            .collect();
        let _ = write!(
            terms,
            "{{\"shift\":{},\"matrix\":[{}]}}",
            json_f64(term.shift()),
            rows.join(",")
        );
    }
    terms.push(']');
    format!(
        "{{\"meta\":{},\"n\":{},\"terms\":{}}}",
        meta_json(meta),
        op.n(),
        terms
    )
}

/// JSON for a vector function: profile spec, shift, and coefficient per
/// term, in stored order.
pub fn function_json(f: &VectorFunction, meta: &Meta) -> String {
    let mut terms = String::from("[");
    for (i, term) in f.terms().iter().enumerate() {
        if i > 0 {
            terms.push(',');
        }
        let _ = write!(
            terms,
            "{{\"profile\":{},\"shift\":{},\"coeff\":{}}}",
            json_str(&term.profile().to_string()),
            json_f64(term.shift()),
            json_f64_array(term.coeff().iter().copied())
        );
    }
    terms.push(']');
    format!(
        "{{\"meta\":{},\"n\":{},\"terms\":{}}}",
        meta_json(meta),
        f.n(),
        terms
    )
}

/// JSON for the divergence experiment.
pub fn divergence_json(report: &DivergenceReport, meta: &Meta) -> String {
    let mut rows = String::from("[");
    for (i, row) in report.rows.iter().enumerate() {
        if i > 0 {
            rows.push(',');
        }
        let _ = write!(
            rows,
            "{{\"m\":{},\"term_count\":{},\"d_m\":{},\"window_gap\":{},\"trotter_edge\":{},\"norm_lower\":{},\"norm_upper\":{}}}",
            row.m,
            row.term_count,
            json_f64(row.d_m),
            json_f64(row.window_gap),
            json_f64(row.trotter_edge),
            json_f64(row.norm_lower),
            json_f64(row.norm_upper),
        );
    }
    rows.push(']');
    format!(
        "{{\"meta\":{},\"t\":{},\"hypothesis\":{{\"gap\":{},\"satisfied\":{},\"first\":{{\"eigenvalues\":{}}},\"second\":{{\"eigenvalues\":{}}},\"sum\":{{\"eigenvalues\":{}}}}},\"window\":{{\"lo\":{},\"hi\":{}}},\"gap_floor\":{},\"rows\":{}}}",
        meta_json(meta),
        json_f64(report.t),
        json_f64(report.hypothesis.gap),
        report.hypothesis.satisfied,
        eigenvalues_json(&report.hypothesis.decomp_a),
        eigenvalues_json(&report.hypothesis.decomp_b),
        eigenvalues_json(&report.hypothesis.decomp_c),
        json_f64(report.window.0),
        json_f64(report.window.1),
        json_f64(report.gap_floor),
        rows,
    )
}

/// CSV for the divergence experiment, one row per subdivision count.
pub fn divergence_csv(report: &DivergenceReport) -> String {
    let mut out = String::from("m,term_count,d_m,window_gap,trotter_edge,norm_lower,norm_upper\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.m,
            row.term_count,
            fmt_f64(row.d_m),
            fmt_f64(row.window_gap),
            fmt_f64(row.trotter_edge),
            fmt_f64(row.norm_lower),
            fmt_f64(row.norm_upper),
        );
    }
    out
}

/// Plain-text columns for gnuplot: `m d_m window_gap` with a `#` header.
pub fn divergence_gnuplot(report: &DivergenceReport) -> String {
    let mut out = String::from("# m d_m window_gap\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{} {} {}",
            row.m,
            fmt_f64(row.d_m),
            fmt_f64(row.window_gap)
        );
    }
    out
}

/// JSON for the stability probe.
pub fn stability_json(table: &StabilityTable, meta: &Meta) -> String {
    let mut rows = String::from("[");
    for (i, row) in table.rows.iter().enumerate() {
        if i > 0 {
            rows.push(',');
        }
        let _ = write!(
            rows,
            "{{\"m\":{},\"norm_lower\":{},\"norm_upper\":{}}}",
            row.m,
            json_f64(row.norm_lower),
            json_f64(row.norm_upper),
        );
    }
    rows.push(']');
    format!(
        "{{\"meta\":{},\"t\":{},\"slope\":{},\"intercept\":{},\"rows\":{}}}",
        meta_json(meta),
        json_f64(table.t),
        json_f64(table.slope),
        json_f64(table.intercept),
        rows,
    )
}

/// CSV for the stability probe.
pub fn stability_csv(table: &StabilityTable) -> String {
    let mut out = String::from("m,norm_lower,norm_upper\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            row.m,
            fmt_f64(row.norm_lower),
            fmt_f64(row.norm_upper)
        );
    }
    out
}

/// JSON for the commuting control.
pub fn commuting_json(report: &CommutingReport, meta: &Meta) -> String {
    let mut rows = String::from("[");
    for (i, row) in report.rows.iter().enumerate() {
        if i > 0 {
            rows.push(',');
        }
        let _ = write!(
            rows,
            "{{\"m\":{},\"deviation\":{}}}",
            row.m,
            json_f64(row.deviation)
        );
    }
    rows.push(']');
    format!(
        "{{\"meta\":{},\"scale\":{},\"t\":{},\"max_deviation\":{},\"rows\":{}}}",
        meta_json(meta),
        json_f64(report.scale),
        json_f64(report.t),
        json_f64(report.max_deviation),
        rows,
    )
}

/// CSV for the commuting control.
pub fn commuting_csv(report: &CommutingReport) -> String {
    let mut out = String::from("m,deviation\n");
    for row in &report.rows {
        let _ = writeln!(out, "{},{}", row.m, fmt_f64(row.deviation));
    }
    out
}

/// Write `content` to `path` atomically: write a sibling temp file, then
/// rename over the destination, so readers never observe a half-written
/// report.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp_path, content)?;
    std::fs::rename(&tmp_path, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::divergence_experiment;
    use crate::spectral::{check_hypothesis, decompose, SquareMatrix, DEFAULT_TOL};
    use crate::transport::{compose, from_semigroup};

    fn default_pair() -> (SquareMatrix, SquareMatrix) {
        (
            SquareMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
            SquareMatrix::from_row_slice(2, &[0.0, 1.0, 4.0, 0.0]).unwrap(),
        )
    }

    #[test]
    fn fmt_f64_round_trips_exactly() {
        let values = [
            0.0,
            -0.0,
            1.0,
            -1.0,
            10f64.sqrt(),
            1e-300,
            -2.2250738585072014e-308,
            123.456e30,
            0.1 + 0.2,
            f64::MAX,
            f64::MIN_POSITIVE,
        ];
        for v in values {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "value {v} via {s}");
        }
    }

    #[test]
    fn operator_json_has_ascending_terms_and_full_matrices() {
        let (a, b) = default_pair();
        let da = decompose(&a, DEFAULT_TOL).unwrap();
        let db = decompose(&b, DEFAULT_TOL).unwrap();
        let st = compose(&from_semigroup(&da, 1.0), &from_semigroup(&db, 1.0)).unwrap();
        let meta = Meta::new("trotter").flag("t", 1.0).flag("m", 1);
        let text = operator_json(&st, &meta);

        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["meta"]["tool"], "trotterlab");
        assert_eq!(v["meta"]["command"], "trotter");
        assert_eq!(v["meta"]["config"]["t"], "1");
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 4);
        let shifts: Vec<f64> = terms.iter().map(|t| t["shift"].as_f64().unwrap()).collect();
        assert_eq!(shifts, vec![-3.0, -1.0, 1.0, 3.0]);
        for term in terms {
            let m = term["matrix"].as_array().unwrap();
            assert_eq!(m.len(), 2);
            assert_eq!(m[0].as_array().unwrap().len(), 2);
        }
    }

    #[test]
    fn meta_timestamp_is_optional_and_config_is_ordered() {
        let meta = Meta::new("check-h")
            .flag("zeta", "z")
            .flag("alpha", "a")
            .with_timestamp(None);
        let (a, b) = default_pair();
        let report = check_hypothesis(&a, &b, DEFAULT_TOL).unwrap();
        let text = hypothesis_json(&report, &meta);
        assert!(!text.contains("timestamp"));
        // Insertion order, not alphabetical.
        let zeta = text.find("\"zeta\"").unwrap();
        let alpha = text.find("\"alpha\"").unwrap();
        assert!(zeta < alpha);

        let with_ts = hypothesis_json(
            &report,
            &Meta::new("check-h").with_timestamp(Some("2000-01-01T00:00:00Z".into())),
        );
        let v: serde_json::Value = serde_json::from_str(&with_ts).unwrap();
        assert_eq!(v["meta"]["timestamp"], "2000-01-01T00:00:00Z");
        assert_eq!(v["satisfied"], true);
        let sum = v["sum"]["eigenvalues"].as_array().unwrap();
        assert_eq!(sum.len(), 2);
        assert!((sum[1].as_f64().unwrap() - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn json_escaping_survives_hostile_config_values() {
        let meta = Meta::new("decompose").flag("matrix-a", "0,1;\"\\weird\n\tvalue\u{1}");
        let (a, _) = default_pair();
        let d = decompose(&a, DEFAULT_TOL).unwrap();
        let text = decomposition_json(&d, &meta);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            v["meta"]["config"]["matrix-a"],
            "0,1;\"\\weird\n\tvalue\u{1}"
        );
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 2);
        assert_eq!(v["right_eigenvectors"].as_array().unwrap().len(), 2);
        assert_eq!(v["left_eigenvectors"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn divergence_renderings_are_consistent() {
        let (a, b) = default_pair();
        let report = divergence_experiment(&a, &b, 1.0, &[1, 2], 128, 2, 42, DEFAULT_TOL).unwrap();
        let meta = Meta::new("report-divergence").flag("t", 1.0);

        let v: serde_json::Value = serde_json::from_str(&divergence_json(&report, &meta)).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["m"], 1);
        assert_eq!(v["rows"][0]["term_count"], 4);
        assert_eq!(v["window"]["hi"].as_f64().unwrap(), -3.0);
        assert!(v["hypothesis"]["satisfied"].as_bool().unwrap());

        let csv = divergence_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "m,term_count,d_m,window_gap,trotter_edge,norm_lower,norm_upper"
        );
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "1");
        assert_eq!(first[1], "4");
        let d_m: f64 = first[2].parse().unwrap();
        assert_eq!(d_m, report.rows[0].d_m);

        let gp = divergence_gnuplot(&report);
        let glines: Vec<&str> = gp.lines().collect();
        assert_eq!(glines[0], "# m d_m window_gap");
        assert_eq!(glines.len(), 3);
        assert!(glines[1].starts_with("1 "));
        assert_eq!(glines[1].split(' ').count(), 3);
    }

    #[test]
    fn non_finite_values_render_as_json_null() {
        let (a, b) = default_pair();
        let mut report = divergence_experiment(&a, &b, 1.0, &[1], 64, 1, 42, DEFAULT_TOL).unwrap();
        report.rows[0].d_m = f64::INFINITY;
        report.rows[0].norm_lower = f64::NAN;
        let meta = Meta::new("report-divergence");

        let text = divergence_json(&report, &meta);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["rows"][0]["d_m"].is_null());
        assert!(v["rows"][0]["norm_lower"].is_null());
        assert!(v["rows"][0]["window_gap"].as_f64().unwrap() > 0.0);

        // The tabular formats keep the literal tokens instead.
        let csv = divergence_csv(&report);
        assert!(csv.lines().nth(1).unwrap().contains("inf"));
        assert!(csv.lines().nth(1).unwrap().contains("NaN"));
    }

    #[test]
    fn emission_is_deterministic() {
        let (a, b) = default_pair();
        let r1 = divergence_experiment(&a, &b, 1.0, &[1, 2], 128, 2, 42, DEFAULT_TOL).unwrap();
        let r2 = divergence_experiment(&a, &b, 1.0, &[1, 2], 128, 2, 42, DEFAULT_TOL).unwrap();
        let meta = Meta::new("report-divergence").flag("seed", 42);
        assert_eq!(divergence_json(&r1, &meta), divergence_json(&r2, &meta));
        assert_eq!(divergence_csv(&r1), divergence_csv(&r2));
        assert_eq!(divergence_gnuplot(&r1), divergence_gnuplot(&r2));
    }

    #[test]
    fn atomic_write_round_trips_and_leaves_no_droppings() {
        let dir = std::env::temp_dir().join(format!("trotterlab-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_atomic(&path, "first").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "first");
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        let leftovers: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(leftovers, vec![std::ffi::OsString::from("out.json")]);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
