use serde::Serialize;
use std::cmp::Ordering;

/// Maximum relative change of a sup ratio between two grid levels.
pub const MAX_REFINEMENT_DELTA: f64 = 0.05;
/// Largest tolerated share of cells whose evaluation failed.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;

/// One grid point of a sweep: `ratio = value * weight`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub params: Vec<f64>,
    pub value: f64,
    pub weight: f64,
    pub ratio: f64,
    pub err_est: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailedCell {
    pub params: Vec<f64>,
    pub error: String,
}

/// Outcome of checking one bound on one grid.
///
/// `params` of every cell are ordered the way ties are broken: the arg-sup
/// is the lexicographically smallest parameter tuple attaining the sup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub param_names: Vec<String>,
    pub grid: String,
    pub sup_ratio: f64,
    pub arg_sup: Vec<f64>,
    pub cells: Vec<Cell>,
    pub failed: Vec<FailedCell>,
    /// `None` means no ceiling has been attached yet.
    pub ceiling: Option<f64>,
    pub refinement_delta: f64,
    pub pass: bool,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl BoundReport {
    pub fn new(
        bound_id: impl Into<String>,
        param_names: &[&str],
        grid: impl Into<String>,
        cells: Vec<Cell>,
        failed: Vec<FailedCell>,
    ) -> Self {
        let mut sup = 0.0;
        let mut arg: Option<&Cell> = None;
        for c in &cells {
            let better = match arg {
                None => true,
                Some(best) => {
                    c.ratio > sup || (c.ratio == sup && lex_cmp(&c.params, &best.params).is_lt())
                }
            };
            if better {
                sup = c.ratio;
                arg = Some(c);
            }
        }
        let arg_sup = arg.map(|c| c.params.clone()).unwrap_or_default();
        let mut r = BoundReport {
            bound_id: bound_id.into(),
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            grid: grid.into(),
            sup_ratio: sup,
            arg_sup,
            cells,
            failed,
            ceiling: None,
            refinement_delta: 0.0,
            pass: false,
        };
        r.update_pass();
        r
    }

    pub fn total_cells(&self) -> usize {
        self.cells.len() + self.failed.len()
    }

    pub fn failed_fraction(&self) -> f64 {
        let n = self.total_cells();
        if n == 0 {
            0.0
        } else {
            self.failed.len() as f64 / n as f64
        }
    }

    pub fn with_ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = Some(ceiling);
        self.update_pass();
        self
    }

    /// Records the relative change of the sup ratio against a coarser run.
    pub fn with_coarse(self, coarse: &BoundReport) -> Self {
        let delta = relative_change(coarse.sup_ratio, self.sup_ratio);
        self.with_refinement_delta(delta)
    }

    pub fn with_refinement_delta(mut self, delta: f64) -> Self {
        self.refinement_delta = delta;
        self.update_pass();
        self
    }

    fn update_pass(&mut self) {
        let under = match self.ceiling {
            Some(c) => self.sup_ratio <= c,
            None => true,
        };
        self.pass = under
            && self.sup_ratio.is_finite()
            && self.refinement_delta <= MAX_REFINEMENT_DELTA
            && self.failed_fraction() <= MAX_FAILED_FRACTION;
    }
}

pub fn relative_change(coarse: f64, fine: f64) -> f64 {
    let scale = coarse.abs().max(fine.abs());
    if scale == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / scale
    }
}

/// Inclusive logarithmically spaced points.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Inclusive uniformly spaced points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
