//! Phase-one simplex method for `A x = b, x ≥ 0`.
//!
//! Dense tableau with Bland's rule; the problems solved here have at most a
//! few hundred columns.

const PIVOT_EPS: f64 = 1e-12;

/// Feasibility threshold on the phase-one optimum.
pub const INFEASIBLE_ABOVE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Phase1 {
    Feasible(Vec<f64>),
    /// Minimal total artificial mass.
    Infeasible(f64),
}

/// Minimizes the sum of artificial variables over `A x + s = b`, `x, s ≥ 0`.
///
/// Rows with negative right-hand side are negated first. `a` is row-major
/// with `rows × cols` entries.
pub fn phase_one(a: &[f64], b: &[f64], cols: usize) -> Phase1 {
    let rows = b.len();
    assert_eq!(a.len(), rows * cols, "constraint matrix has the wrong size");
    let width = cols + rows + 1;
    let rhs = width - 1;

    let mut t = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i * width + j] = sign * a[i * cols + j];
        }
        t[i * width + cols + i] = 1.0;
        t[i * width + rhs] = sign * b[i];
    }
    // Objective row holds reduced costs of Σ artificials; the rhs cell is
    // minus the current objective.
    let obj = rows * width;
    for i in 0..rows {
        for j in 0..cols {
            t[obj + j] -= t[i * width + j];
        }
        t[obj + rhs] -= t[i * width + rhs];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    loop {
        let Some(enter) = (0..cols + rows).find(|&j| t[obj + j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry; guard anyway against round-off.
        let Some((row, _)) = leave else { break };
        pivot(&mut t, width, rows + 1, row, enter);
        basis[row] = enter;
    }

    let objective = -t[obj + rhs];
    if objective > INFEASIBLE_ABOVE {
        return Phase1::Infeasible(objective);
    }
    let mut x = vec![0.0; cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            x[var] = t[i * width + rhs].max(0.0);
        }
    }
    Phase1::Feasible(x)
}

fn pivot(t: &mut [f64], width: usize, nrows: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for j in 0..width {
        t[row * width + j] /= p;
    }
    for i in 0..nrows {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            t[i * width + j] -= factor * t[row * width + j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
        let cols = x.len();
        b.iter()
            .enumerate()
            .map(|(i, &bi)| {
                let ax: f64 = (0..cols).map(|j| a[i * cols + j] * x[j]).sum();
                (ax - bi).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn finds_a_feasible_point() {
        // x + y = 1, x − y = 0.5
        let a = [1.0, 1.0, 1.0, -1.0];
        let b = [1.0, 0.5];
        match phase_one(&a, &b, 2) {
            Phase1::Feasible(x) => {
                assert!(residual(&a, &b, &x) < 1e-12);
                assert!((x[0] - 0.75).abs() < 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1 and x + y = 2
        let a = [1.0, 1.0, 1.0, 1.0];
        match phase_one(&a, &[1.0, 2.0], 2) {
            Phase1::Infeasible(v) => assert!((v - 1.0).abs() < 1e-12),
            other => panic!("expected infeasible, got {other:?}"),
        }
        // x = −1 with x ≥ 0
        assert!(matches!(phase_one(&[1.0], &[-1.0], 1), Phase1::Infeasible(_)));
    }

    #[test]
    fn tolerates_redundant_rows() {
        let a = [1.0, 1.0, 2.0, 2.0, 1.0, 0.0];
        let b = [1.0, 2.0, 0.25];
        match phase_one(&a, &b, 2) {
            Phase1::Feasible(x) => assert!(residual(&a, &b, &x) < 1e-12),
            other => panic!("expected feasible, got {other:?}"),
        }
    }
}
