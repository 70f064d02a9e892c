//! Tabulated sweep output and its CSV form.

use corrdyn::SweepPoint;

pub const SWEEP_COLUMNS: [&str; 11] = [
    "x_over_lambda0",
    "kappa_a_abs",
    "kappa_b_abs",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "I",
    "C",
    "Q",
    "REE",
];

/// One row of `sweep.csv`, lengths in units of `lambda0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub lambdas: [f64; 4],
    pub i: f64,
    pub c: f64,
    pub q: f64,
    pub ree: f64,
}

impl Row {
    pub fn from_point(p: &SweepPoint, lambda0_m: f64) -> Self {
        let c = p.correlations;
        Self {
            x: p.x_b / lambda0_m,
            kappa_a: p.point.kappa_a.norm(),
            kappa_b: p.point.kappa_b.norm(),
            lambdas: p.spectrum.lambdas(),
            i: c.total_i,
            c: c.classical_c,
            q: c.quantum_q,
            ree: c.ree,
        }
    }

    fn values(&self) -> [f64; 11] {
        let l = self.lambdas;
        [self.x, self.kappa_a, self.kappa_b, l[0], l[1], l[2], l[3], self.i, self.c, self.q, self.ree]
    }

    fn from_values(v: &[f64]) -> Self {
        Self {
            x: v[0],
            kappa_a: v[1],
            kappa_b: v[2],
            lambdas: [v[3], v[4], v[5], v[6]],
            i: v[7],
            c: v[8],
            q: v[9],
            ree: v[10],
        }
    }
}

/// `v` rounded to nine significant digits, fixed-point when the exponent is
/// moderate and trailing zeros removed.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if !(-4..9).contains(&exp) {
        return sci;
    }
    let mut s = format!("{:.*}", (8 - exp).max(0) as usize, v);
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    s
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.values().iter().map(|&v| format_sig9(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parse `sweep.csv`. Errors carry the 1-based line number.
pub fn from_csv(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or("");
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != SWEEP_COLUMNS {
        return Err(format!("line 1: unexpected header {header:?}"));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format!("line {}: {e}", idx + 1))?;
        if values.len() != SWEEP_COLUMNS.len() {
            return Err(format!("line {}: expected {} fields, got {}", idx + 1, SWEEP_COLUMNS.len(), values.len()));
        }
        rows.push(Row::from_values(&values));
    }
    if rows.is_empty() {
        return Err("no data rows".to_string());
    }
    Ok(rows)
}
