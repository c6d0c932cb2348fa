use crate::error::{Error, Result};
use crate::stats::is_negligible_spread;

/// Pearson correlation between each point's distance from the point-set
/// centroid and its size feature.
pub fn radial_size_correlation(points: &[(f64, f64)], sizes: &[f64]) -> Result<f64> {
    let n = points.len();
    if n != sizes.len() {
        return Err(Error::domain("one size per point is required"));
    }
    if n < 3 {
        return Err(Error::degenerate(format!(
            "radial correlation needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let d: Vec<f64> = points.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).collect();
    pearson(&d, sizes)
}

/// Sample Pearson correlation; errors when either side has no spread.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let am = a.iter().sum::<f64>() / n;
    let bm = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - am, y - bm);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if is_negligible_spread(saa, a) || is_negligible_spread(sbb, b) {
        return Err(Error::degenerate(
            "correlation undefined for a constant variable",
        ));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring_points() -> Vec<(f64, f64)> {
        // Symmetric about the origin, so distances are the radii themselves.
        [0.1, 0.2, 0.3, 0.4, 0.5]
            .iter()
            .flat_map(|&r| [(r, 0.0), (-r, 0.0)])
            .collect()
    }

    #[test]
    fn size_proportional_to_distance() {
        let pts = ring_points();
        let sizes: Vec<f64> = pts.iter().map(|p| 2.0 * p.0.abs()).collect();
        assert!((radial_size_correlation(&pts, &sizes).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn size_decreasing_with_distance() {
        let pts = ring_points();
        let sizes: Vec<f64> = pts.iter().map(|p| 1.0 - p.0.abs()).collect();
        assert!((radial_size_correlation(&pts, &sizes).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_inputs_are_degenerate() {
        let pts = ring_points();
        assert!(matches!(
            radial_size_correlation(&pts, &vec![0.2; pts.len()]),
            Err(Error::Degenerate(_))
        ));
        let circle: Vec<_> = (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::FRAC_PI_4;
                (t.cos(), t.sin())
            })
            .collect();
        let sizes: Vec<f64> = (0..8).map(f64::from).collect();
        assert!(radial_size_correlation(&circle, &sizes).is_err());
        assert!(radial_size_correlation(&pts[..2], &[0.1, 0.2]).is_err());
    }

    proptest! {
        #[test]
        fn invariant_under_positive_affine_size_rescaling(
            data in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.01f64..0.5), 4..40),
            a in 0.1f64..10.0, b in -5.0f64..5.0,
        ) {
            let pts: Vec<_> = data.iter().map(|d| (d.0, d.1)).collect();
            let s: Vec<_> = data.iter().map(|d| d.2).collect();
            let r = radial_size_correlation(&pts, &s);
            prop_assume!(r.is_ok());
            let rescaled: Vec<_> = s.iter().map(|v| a * v + b).collect();
            let r2 = radial_size_correlation(&pts, &rescaled).unwrap();
            prop_assert!((r.unwrap() - r2).abs() < 1e-12);
        }
    }
}
