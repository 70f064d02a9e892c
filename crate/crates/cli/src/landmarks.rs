//! Crossings and extrema located in a sweep table.

use corrdyn::dephasing::{find_crossing, CrossingQuery, Direction};

use crate::series::{format_sig9, Row};

/// Level below which Q counts as "near zero" when locating its revival.
pub const Q_REVIVAL_LEVEL: f64 = 0.005;
/// Agreement with the first row required for an echo, sized for 9-digit CSV.
pub const ECHO_TOL: f64 = 1e-7;

/// Position and value of a sampled extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landmarks {
    pub kappa_a: f64,
    /// `|kappa_b|` first falls through `|kappa_a|`.
    pub transition_x: Option<f64>,
    /// Every crossing of `|kappa_b|` and `|kappa_a|`.
    pub kappa_crossings_x: Vec<f64>,
    /// Largest eigenvalue falls through 1/2, where REE vanishes.
    pub ree_death_x: Option<f64>,
    pub q_min: Option<Extremum>,
    pub q_revival_start_x: Option<f64>,
    pub q_revival_peak: Option<Extremum>,
    pub kappa_b_revival_peak: Option<Extremum>,
    /// Range of C from the transition onward.
    pub c_after_transition: Option<(f64, f64)>,
    /// First nonzero x where I, C, Q and REE all equal their x = 0 values.
    pub echo_x: Option<f64>,
}

fn column(rows: &[Row], f: impl Fn(&Row) -> f64) -> Vec<f64> {
    rows.iter().map(f).collect()
}

fn crossing(xs: &[f64], ys: &[f64], level: f64, direction: Direction, after: f64) -> Option<f64> {
    find_crossing(xs, ys, &CrossingQuery { level, direction, after }).ok()
}

/// Highest interior local maximum at or after index `from`.
fn highest_local_max(ys: &[f64], from: usize) -> Option<usize> {
    (from.max(1)..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if ys[b] >= ys[i] => Some(b),
            _ => Some(i),
        })
}

fn argmin(ys: &[f64], range: std::ops::Range<usize>) -> Option<usize> {
    range.fold(None, |best: Option<usize>, i| match best {
        Some(b) if ys[b] <= ys[i] => Some(b),
        _ => Some(i),
    })
}

pub fn compute(rows: &[Row]) -> Landmarks {
    let xs = column(rows, |r| r.x);
    let gap = column(rows, |r| r.kappa_b - r.kappa_a);
    let q = column(rows, |r| r.q);
    let kb = column(rows, |r| r.kappa_b);
    let l1 = column(rows, |r| r.lambdas[0]);

    let transition_x = crossing(&xs, &gap, 0.0, Direction::Falling, 0.0);

    let mut kappa_crossings_x = Vec::new();
    let mut after = 0.0;
    while let Some(x) = crossing(&xs, &gap, 0.0, Direction::Either, after) {
        kappa_crossings_x.push(x);
        after = x + 1e-9 * x.abs().max(1.0);
    }

    let ree_death_x = crossing(&xs, &l1, 0.5, Direction::Falling, 0.0);

    let start = transition_x.map(|t| xs.partition_point(|&x| x <= t)).unwrap_or(rows.len());
    let peak_idx = highest_local_max(&q, start);
    let q_revival_peak = peak_idx.map(|i| Extremum { x: xs[i], value: q[i] });
    let min_idx = peak_idx.and_then(|p| argmin(&q, start..p));
    let q_min = min_idx.map(|i| Extremum { x: xs[i], value: q[i] });
    let q_revival_start_x =
        q_min.and_then(|m| crossing(&xs, &q, Q_REVIVAL_LEVEL, Direction::Rising, m.x));
    let kappa_b_revival_peak =
        highest_local_max(&kb, start).map(|i| Extremum { x: xs[i], value: kb[i] });

    let c_after_transition = (start < rows.len()).then(|| {
        rows[start..]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.c), hi.max(r.c)))
    });

    let first = rows.first().copied();
    let echo_x = first.and_then(|f0| {
        rows.iter().skip(1).find(|r| {
            [(r.i, f0.i), (r.c, f0.c), (r.q, f0.q), (r.ree, f0.ree)]
                .iter()
                .all(|(a, b)| (a - b).abs() <= ECHO_TOL)
        })
    });

    Landmarks {
        kappa_a: first.map(|r| r.kappa_a).unwrap_or(f64::NAN),
        transition_x,
        kappa_crossings_x,
        ree_death_x,
        q_min,
        q_revival_start_x,
        q_revival_peak,
        kappa_b_revival_peak,
        c_after_transition,
        echo_x: echo_x.map(|r| r.x),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_else(|| "none".to_string())
}

impl Landmarks {
    /// `key = value` report; lengths in units of `lambda0`.
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            "# lengths in units of lambda0".to_string(),
            format!("kappa_a = {}", format_sig9(self.kappa_a)),
            format!("transition_x = {}", opt(self.transition_x)),
            format!(
                "kappa_crossings_x = {}",
                if self.kappa_crossings_x.is_empty() {
                    "none".to_string()
                } else {
                    self.kappa_crossings_x.iter().map(|&x| format_sig9(x)).collect::<Vec<_>>().join(", ")
                }
            ),
            format!("ree_death_x = {}", opt(self.ree_death_x)),
            format!("q_min_x = {}", opt(self.q_min.map(|e| e.x))),
            format!("q_min = {}", opt(self.q_min.map(|e| e.value))),
            format!("q_revival_start_x = {}", opt(self.q_revival_start_x)),
            format!("q_revival_peak_x = {}", opt(self.q_revival_peak.map(|e| e.x))),
            format!("q_revival_peak = {}", opt(self.q_revival_peak.map(|e| e.value))),
            format!("kappa_b_revival_peak_x = {}", opt(self.kappa_b_revival_peak.map(|e| e.x))),
            format!("kappa_b_revival_peak = {}", opt(self.kappa_b_revival_peak.map(|e| e.value))),
            format!("c_after_transition_min = {}", opt(self.c_after_transition.map(|c| c.0))),
            format!("c_after_transition_max = {}", opt(self.c_after_transition.map(|c| c.1))),
            format!("echo_x = {}", opt(self.echo_x)),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}
