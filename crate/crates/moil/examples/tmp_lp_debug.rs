//! Scratch: run the dumped failing LP through an instrumented simplex copy.
use std::fs;

const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-8;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= piv;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f != 0.0 {
                for j in 0..=self.cols {
                    let delta = f * self.rows[row][j];
                    self.rows[i][j] -= delta;
                }
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for j in 0..=self.cols {
                self.cost[j] -= f * self.rows[row][j];
            }
        }
        self.basis[row] = col;
    }

    fn optimize(&mut self, allowed_cols: usize, tag: &str) -> Result<usize, String> {
        for k in 0..MAX_PIVOTS {
            let entering = (0..allowed_cols).find(|&j| self.cost[j] < -PIVOT_EPS);
            let Some(e) = entering else {
                println!("{tag}: optimal after {k} pivots, obj {}", self.cost[self.cols]);
                return Ok(k);
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][e];
                if a > PIVOT_EPS {
                    let ratio = self.rows[i][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio
                                || (ratio == best_ratio && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Err(format!("{tag}: unbounded at pivot {k}"));
            };
            self.pivot(l, e);
        }
        Err(format!("{tag}: stalled; obj {}", self.cost[self.cols]))
    }
}

fn main() {
    let text = fs::read_to_string("/tmp/lp_fail.txt").unwrap();
    let mut lines = text.lines();
    let head: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    let (m, n) = (head[0], head[1]);
    let c: Vec<f64> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    let a: Vec<f64> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    let b: Vec<f64> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(a.len(), m * n);

    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; cols + 1];
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * a[i * n + j];
        }
        row[n + i] = 1.0;
        row[cols] = sign * b[i];
        rows.push(row);
    }
    let mut cost = vec![0.0; cols + 1];
    for j in 0..=cols {
        let mut s = 0.0;
        for row in &rows {
            s += row[j];
        }
        if j < n || j == cols {
            cost[j] = -s;
        }
    }
    let mut t = Tableau { rows, cost, basis: (n..n + m).collect(), cols };
    match t.optimize(cols, "phase1") {
        Ok(_) => {}
        Err(e) => { println!("{e}"); return; }
    }
    println!("phase1 final obj cell: {}", t.cost[t.cols]);
    if t.cost[t.cols] < -FEAS_EPS {
        println!("=> declared INFEASIBLE");
        // Which artificials are basic and at what level?
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv >= n && t.rows[i][t.cols].abs() > 1e-12 {
                println!("  artificial {} basic at {}", bv - n, t.rows[i][t.cols]);
            }
        }
        // Recompute true infeasibility: sum of basic artificial values.
        let s: f64 = t.basis.iter().enumerate().filter(|(_, &bv)| bv >= n).map(|(i, _)| t.rows[i][t.cols]).sum();
        println!("  sum of basic artificial rhs: {s}");
    }
}
