//! Membership of a point in the convex hull of a finite point set, decided
//! by a phase-1 simplex feasibility solve:
//!
//! ```text
//! exists lambda >= 0 :  sum_j lambda_j = 1,  sum_j lambda_j p_j = target
//! ```

/// Returns true when `target` is a convex combination of `points`, up to an
/// absolute residual `tol` per coordinate.
pub(crate) fn contains(points: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
    let n = points.len();
    if n == 0 {
        return false;
    }
    let dim = target.len();
    let rows = dim + 1; // coordinate rows plus the convexity row
    let cols = n + rows; // lambdas plus one artificial per row

    // tableau[r] = [lambda columns | artificial columns | rhs]
    let mut t = vec![vec![0.0f64; cols + 1]; rows];
    for (j, p) in points.iter().enumerate() {
        debug_assert_eq!(p.len(), dim, "hull points must share the target dimension");
        for r in 0..dim {
            t[r][j] = p[r];
        }
        t[dim][j] = 1.0;
    }
    for r in 0..dim {
        t[r][cols] = target[r];
    }
    t[dim][cols] = 1.0;

    // Scale rows, flip signs for non-negative rhs, then install artificials.
    for r in 0..rows {
        let scale = t[r][..cols.min(n)]
            .iter()
            .chain(std::iter::once(&t[r][cols]))
            .fold(1.0f64, |m, x| m.max(x.abs()));
        for x in t[r].iter_mut() {
            *x /= scale;
        }
        if t[r][cols] < 0.0 {
            for x in t[r].iter_mut() {
                *x = -*x;
            }
        }
        t[r][n + r] = 1.0;
    }

    // Phase-1 objective: minimize the sum of artificials. The reduced-cost
    // row for a basis of artificials is the sum of all constraint rows.
    let mut obj = vec![0.0f64; cols + 1];
    for row in &t {
        for (o, v) in obj.iter_mut().zip(row) {
            *o += v;
        }
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    let eps = 1e-12;
    for _ in 0..64 * (n + rows) {
        // Bland's rule on the lambda columns only; artificials never
        // re-enter, which together with the smallest-basis-index tie break
        // below rules out cycling.
        let Some(enter) = (0..n).find(|&c| obj[c] > eps && !basis.contains(&c)) else {
            break;
        };
        // Ratio test; ties resolved towards the smallest basic index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            if t[r][enter] > eps {
                let ratio = t[r][cols] / t[r][enter];
                if ratio < best - eps
                    || (ratio <= best + eps && leave.is_some_and(|prev| basis[r] < basis[prev]))
                {
                    best = best.min(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            break; // unbounded column: cannot happen with the convexity row
        };
        // Pivot.
        let piv = t[lr][enter];
        for x in t[lr].iter_mut() {
            *x /= piv;
        }
        let pivot_row = t[lr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != lr {
                let f = row[enter];
                if f != 0.0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * p;
                    }
                }
            }
        }
        let f = obj[enter];
        if f != 0.0 {
            for (o, p) in obj.iter_mut().zip(&pivot_row) {
                *o -= f * p;
            }
        }
        basis[lr] = enter;
    }

    // Residual infeasibility = remaining objective value = sum of basic
    // artificial values.
    let residual: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= n)
        .map(|(r, _)| t[r][cols])
        .sum();
    residual.abs() <= tol
}
