use crate::stats::median;

pub const DEFAULT_OUTLIER_T: f64 = 3.0;

/// Flags rows farther from their centroid than `t` times the median
/// row-to-centroid distance. Corpora of fewer than two rows are never flagged.
pub fn flag_outliers(
    rows: &[Vec<f64>],
    labels: &[usize],
    centroids: &[Vec<f64>],
    t: f64,
) -> Vec<bool> {
    if rows.len() < 2 {
        return vec![false; rows.len()];
    }
    let dist: Vec<f64> = rows
        .iter()
        .zip(labels)
        .map(|(r, &l)| {
            r.iter()
                .zip(&centroids[l])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let cut = t * median(&dist);
    dist.iter().map(|&d| d > cut).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_rows_are_never_flagged() {
        let rows = vec![vec![0.0, 0.0]; 6];
        let flags = flag_outliers(&rows, &[0; 6], &[vec![0.0, 0.0]], 3.0);
        assert!(flags.iter().all(|f| !f));
    }

    #[test]
    fn displaced_row_is_the_only_flag() {
        let mut rows: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![0.1 * (i as f64).sin(), 0.1 * (i as f64).cos()])
            .collect();
        rows.push(vec![10.0, 0.0]);
        let centroid = vec![
            rows.iter().map(|r| r[0]).sum::<f64>() / 10.0,
            rows.iter().map(|r| r[1]).sum::<f64>() / 10.0,
        ];
        let flags = flag_outliers(&rows, &[0; 10], &[centroid], 3.0);
        let flagged: Vec<usize> = flags
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(flagged, vec![9]);
    }

    #[test]
    fn single_row_is_skipped() {
        assert_eq!(
            flag_outliers(&[vec![4.0]], &[0], &[vec![0.0]], 3.0),
            vec![false]
        );
    }
}
