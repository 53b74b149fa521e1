//! Field linear algebra on constant matrices.

use super::scalar::Scalar;

/// Reduces `rows` to reduced row echelon form in place and returns the
/// pivot column of each nonzero row.
pub fn row_reduce(rows: &mut [Vec<Scalar>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..ncols {
                    let t = rows[r][k].mul(&f);
                    rows[i][k] = rows[i][k].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}
