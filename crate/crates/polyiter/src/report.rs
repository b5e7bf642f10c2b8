//! CSV tables written by `analyze`.
//!
//! Every table has a header row. Floating-point values are printed with 12
//! significant digits and a `.` separator.

use polyiter_core::system::DegreeRow;

/// `x` to 12 significant digits, fixed notation for moderate exponents and
/// scientific otherwise, trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Space-separated so the column needs no quoting.
pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn table<R: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: R) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub struct SumRow {
    /// `S` over truncated vectors or `T` over full states.
    pub kind: &'static str,
    pub coeffs: Vec<i64>,
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

pub fn sums_csv(rows: &[SumRow]) -> String {
    table(
        &["kind", "a_or_b", "N", "re", "im", "modulus"],
        rows.iter().map(|r| {
            vec![
                r.kind.to_string(),
                join(&r.coeffs),
                r.n.to_string(),
                sig12(r.re),
                sig12(r.im),
                sig12(r.re.hypot(r.im)),
            ]
        }),
    )
}

pub struct AvgRow {
    pub kind: &'static str,
    pub c: i64,
    pub big_m: u64,
    pub n: usize,
    pub value: f64,
    pub budget: u128,
}

pub fn avg_sums_csv(rows: &[AvgRow]) -> String {
    table(
        &["kind", "c", "M", "N", "value", "budget"],
        rows.iter().map(|r| {
            vec![
                r.kind.to_string(),
                r.c.to_string(),
                r.big_m.to_string(),
                r.n.to_string(),
                sig12(r.value),
                r.budget.to_string(),
            ]
        }),
    )
}

pub struct DiscrepancyRow {
    pub n: usize,
    pub exact: f64,
    pub etk_bound: f64,
    pub big_h: u32,
    pub c_s: f64,
}

pub fn discrepancy_csv(rows: &[DiscrepancyRow]) -> String {
    table(
        &["N", "exact", "etk_bound", "H", "C_s"],
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                sig12(r.exact),
                sig12(r.etk_bound),
                r.big_h.to_string(),
                sig12(r.c_s),
            ]
        }),
    )
}

pub fn degrees_csv(rows: &[DegreeRow]) -> String {
    table(
        &["k", "i", "observed", "predicted", "equal"],
        rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                r.i.to_string(),
                r.observed.to_string(),
                r.predicted.to_string(),
                r.agrees().to_string(),
            ]
        }),
    )
}
