//! Fixed-width numeric formatting and CSV assembly.

/// Nine significant digits in scientific notation, so diffs of output files are stable.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0.00000000e0".
        return "0.00000000e0".to_string();
    }
    format!("{x:.8e}")
}

/// Header row followed by one row per record.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `(x, y)` pairs as a two-column CSV.
pub fn xy_csv(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let rows: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x, y]).collect();
    csv_table(&[x_name, y_name], &rows)
}
