//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems here are tiny (a handful of variables and constraints), so the
//! solver works on a full tableau and recomputes reduced costs each pivot.

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
pub(crate) const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
    IterationLimit,
}

/// Maximize `c^T x` subject to `a x <= b` with every variable free.
pub fn maximize_free(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    maximize(c, a, b, &vec![true; c.len()])
}

/// Maximize `c^T x` subject to `a x <= b`; `free[j]` marks variables without
/// a sign constraint, the others are `x_j >= 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64], free: &[bool]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(free.len(), n);

    // Column layout: structural (split free vars), slacks, artificials.
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0;
    for &f in free {
        col_of.push((ncols, f.then_some(ncols + 1)));
        ncols += if f { 2 } else { 1 };
    }
    let n_struct = ncols;
    let slack0 = ncols;
    ncols += m;
    let negative_rows: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let art0 = ncols;
    ncols += negative_rows.len();

    let width = ncols + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for (j, &(p, q)) in col_of.iter().enumerate() {
            t[i][p] = sign * a[i][j];
            if let Some(q) = q {
                t[i][q] = -sign * a[i][j];
            }
        }
        t[i][slack0 + i] = sign;
        t[i][ncols] = sign * b[i];
        basis[i] = slack0 + i;
    }
    for (k, &i) in negative_rows.iter().enumerate() {
        t[i][art0 + k] = 1.0;
        basis[i] = art0 + k;
    }

    let mut tableau = Tableau {
        t,
        basis,
        ncols,
        blocked_from: ncols,
    };

    if !negative_rows.is_empty() {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(art0) {
            *c = -1.0;
        }
        match tableau.run(&cost) {
            Phase::Optimal => {}
            Phase::Unbounded => unreachable!("phase one objective is bounded"),
            Phase::Limit => return LpOutcome::IterationLimit,
        }
        let infeasibility: f64 = (0..m)
            .filter(|&i| tableau.basis[i] >= art0)
            .map(|i| tableau.t[i][ncols])
            .sum();
        if infeasibility > FEAS_TOL * (1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            return LpOutcome::Infeasible;
        }
        // Drive basic artificials out where possible; rows that cannot pivot
        // are redundant and stay inert.
        for i in 0..m {
            if tableau.basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| tableau.t[i][j].abs() > PIVOT_TOL) {
                    tableau.pivot(i, j);
                }
            }
        }
        tableau.blocked_from = art0;
    }

    let mut cost = vec![0.0; ncols];
    for (j, &(p, q)) in col_of.iter().enumerate() {
        cost[p] = c[j];
        if let Some(q) = q {
            cost[q] = -c[j];
        }
    }
    match tableau.run(&cost) {
        Phase::Optimal => {}
        Phase::Unbounded => return LpOutcome::Unbounded,
        Phase::Limit => return LpOutcome::IterationLimit,
    }

    let mut z = vec![0.0; n_struct];
    for (i, &bi) in tableau.basis.iter().enumerate() {
        if bi < n_struct {
            z[bi] = tableau.t[i][ncols];
        }
    }
    let x: Vec<f64> = col_of
        .iter()
        .map(|&(p, q)| z[p] - q.map_or(0.0, |q| z[q]))
        .collect();
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}

enum Phase {
    Optimal,
    Unbounded,
    Limit,
}

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns at or beyond this index may not enter the basis.
    blocked_from: usize,
}

impl Tableau {
    fn run(&mut self, cost: &[f64]) -> Phase {
        let m = self.t.len();
        let rhs = self.ncols;
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column.
            let entering = (0..self.blocked_from).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - (0..m)
                        .map(|i| cost[self.basis[i]] * self.t[i][j])
                        .sum::<f64>();
                reduced > COST_TOL
            });
            let Some(j) = entering else {
                return Phase::Optimal;
            };
            // Bland: among minimum ratios, lowest basic index leaves.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let aij = self.t[i][j];
                if aij > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((i, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(i, j);
        }
        Phase::Limit
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> (Vec<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let (x, v) = optimal(maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
            &[false, false],
        ));
        assert!((v - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn needs_phase_one() {
        // max -x - y, x + y >= 2 (as -x - y <= -2), free vars bounded by x,y >= 0 rows
        let (x, v) = optimal(maximize_free(
            &[-1.0, -1.0],
            &[vec![-1.0, -1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[-2.0, 0.0, 0.0],
        ));
        assert!((v + 2.0).abs() < 1e-9);
        assert!((x[0] + x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        assert_eq!(
            maximize_free(&[1.0], &[vec![1.0], vec![-1.0]], &[0.0, -1.0]),
            LpOutcome::Infeasible
        );
        assert_eq!(
            maximize_free(&[1.0, 0.0], &[vec![0.0, 1.0]], &[1.0]),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints through the same optimal vertex (1, 1).
        let a = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![1.0, 2.0],
        ];
        let b = vec![1.0, 1.0, 2.0, 3.0, 3.0];
        let (x, v) = optimal(maximize_free(&[1.0, 1.0], &a, &b));
        assert!((v - 2.0).abs() < 1e-9, "{x:?}");
    }
}
