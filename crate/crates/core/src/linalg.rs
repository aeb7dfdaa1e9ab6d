use crate::scalar::Scalar;

/// Rank by Gaussian elimination. Floats pivot on the largest entry.
pub fn rank<T: Scalar>(mut rows: Vec<Vec<T>>) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let candidates = (rank..rows.len()).filter(|&r| !rows[r][col].approx_zero());
        let pivot = if T::EXACT {
            candidates.min()
        } else {
            candidates.max_by(|&a, &b| {
                rows[a][col]
                    .abs()
                    .partial_cmp(&rows[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        };
        let Some(p) = pivot else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let mut f = row[col].clone();
            f /= &pivot_row[col];
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                let mut t = y.clone();
                t *= &f;
                *x -= &t;
            }
        }
        rank += 1;
    }
    rank
}
