//! Aggregation of result rows into per-(learner, sweep value) statistics.

use crate::runner::ResultRow;

/// Mean and standard error of a learner's aggregate distance at one sweep
/// value. `sem` is `None` for a single trial, where spread is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub env: String,
    pub learner: String,
    pub sweep: f64,
    pub trials: usize,
    pub mean: f64,
    pub sem: Option<f64>,
}

pub fn mean_sem(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Groups the aggregate (`expert = -1`) rows by (env, learner, sweep value),
/// in first-appearance order, and reduces each group to mean and SEM over
/// its trials.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryCell> {
    let mut keys: Vec<(String, String, f64)> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in rows.iter().filter(|r| r.expert == -1) {
        let key = (r.env.clone(), r.learner.clone(), r.sweep);
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r.distance),
            None => {
                keys.push(key);
                groups.push(vec![r.distance]);
            }
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|((env, learner, sweep), values)| {
            let (mean, sem) = mean_sem(&values);
            SummaryCell {
                env,
                learner,
                sweep,
                trials: values.len(),
                mean,
                sem,
            }
        })
        .collect()
}

/// Fixed-width table over summary cells. Single-trial cells print `n/a` in
/// the SEM column and a trailing note calls them out.
pub fn render_summary(cells: &[SummaryCell]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:<13} {:>10} {:>7} {:>12} {:>12}\n",
        "env", "learner", "sweep", "trials", "mean", "sem"
    ));
    let mut single_trial = false;
    for c in cells {
        let sem = match c.sem {
            Some(s) => format!("{s:.6}"),
            None => {
                single_trial = true;
                "n/a".to_string()
            }
        };
        out.push_str(&format!(
            "{:<16} {:<13} {:>10} {:>7} {:>12.6} {:>12}\n",
            c.env,
            c.learner,
            c.sweep.to_string(),
            c.trials,
            c.mean,
            sem
        ));
    }
    if single_trial {
        out.push_str("note: cells with a single trial have no spread estimate (sem = n/a)\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(learner: &str, sweep: f64, expert: i64, distance: f64) -> ResultRow {
        ResultRow {
            env: "y_maze".into(),
            learner: learner.into(),
            sweep,
            expert,
            seed: 0,
            distance,
            wall_ms: 0,
        }
    }

    #[test]
    fn groups_aggregate_rows_and_ignores_per_expert_rows() {
        let rows = vec![
            row("mabc", 2.0, 0, 9.0),
            row("mabc", 2.0, 1, 9.0),
            row("mabc", 2.0, -1, 0.0),
            row("mabc", 2.0, -1, 2.0),
            row("naive", 2.0, -1, 0.5),
        ];
        let cells = summarize(&rows);
        assert_eq!(cells.len(), 2);
        // {0, 2} over 2 trials: mean 1, SEM 1.
        assert_eq!(cells[0].trials, 2);
        assert!((cells[0].mean - 1.0).abs() < 1e-15);
        assert!((cells[0].sem.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cells[1].trials, 1);
        assert_eq!(cells[1].sem, None);
    }

    #[test]
    fn constant_rows_have_zero_sem() {
        let rows = vec![row("mabc", 5.0, -1, 0.25), row("mabc", 5.0, -1, 0.25)];
        let cells = summarize(&rows);
        assert_eq!(cells[0].sem, Some(0.0));
    }

    #[test]
    fn single_trial_cells_are_flagged_in_the_table() {
        let table = render_summary(&summarize(&[row("naive", 2.0, -1, 0.5)]));
        assert!(table.contains("n/a"));
        assert!(table.contains("single trial"));
    }
}
