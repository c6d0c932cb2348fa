//! Relative 3D coordinates for detected fragments.
//!
//! Each instance becomes a point `(x, y, z)` with a size feature `s`:
//! the box center is mapped to `[-1, 1]²` with `y` pointing up, and `z` is an
//! inverse-square-root-of-area depth proxy scaled so that the smallest mask in
//! the image sits at `z = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{pixel_area_to_metric, DetectionSet};

/// Default regularizer added to the normalized area before the square root.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragmentPoint {
    /// Horizontal position, `2u - 1`.
    pub x: f64,
    /// Vertical position, `1 - 2v` (up is positive).
    pub y: f64,
    /// Depth proxy in `(0, 1]`.
    pub z: f64,
    /// Normalized box diagonal.
    pub s: f64,
    /// Mask area over image area.
    pub a_norm: f64,
    /// Mask area in m², when the image carries a scale.
    pub a_real: Option<f64>,
    /// Box center over image width.
    pub u: f64,
    /// Box center over image height (down is positive).
    pub v: f64,
    /// Box width over image width.
    pub box_w: f64,
    /// Box height over image height.
    pub box_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentCloud {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub points: Vec<FragmentPoint>,
    pub epsilon: f64,
    /// Metres per pixel.
    pub scale: Option<f64>,
}

/// How a metric fragment size is derived.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMetric {
    /// Metric length of the box diagonal.
    #[default]
    BoxDiagonal,
    /// Diameter of the circle whose area equals the metric mask area.
    EquivalentDiameter,
}

/// Builds the normalized fragment cloud for one image.
///
/// Fails with [`Error::Degenerate`] when the set has no instances, since the
/// depth proxy has no maximum to normalize against.
pub fn build_cloud(ds: &DetectionSet, epsilon: f64) -> Result<FragmentCloud> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if ds.instances.is_empty() {
        return Err(Error::degenerate(format!(
            "image `{}` has no detections",
            ds.image_id
        )));
    }
    let (w, h) = (f64::from(ds.width), f64::from(ds.height));
    let area = w * h;

    let raw_depth: Vec<f64> = ds
        .instances
        .iter()
        .map(|inst| 1.0 / (inst.mask_area / area + epsilon).sqrt())
        .collect();
    let max_depth = raw_depth.iter().copied().fold(f64::MIN, f64::max);

    let mut points = Vec::with_capacity(ds.instances.len());
    for (inst, depth) in ds.instances.iter().zip(raw_depth) {
        let [x1, y1, x2, y2] = inst.bbox;
        let u = (x1 + x2) / (2.0 * w);
        let v = (y1 + y2) / (2.0 * h);
        let box_w = (x2 - x1) / w;
        let box_h = (y2 - y1) / h;
        let a_real = match ds.scale {
            Some(scale) => Some(pixel_area_to_metric(inst.mask_area, scale)?),
            None => None,
        };
        points.push(FragmentPoint {
            x: 2.0 * u - 1.0,
            y: 1.0 - 2.0 * v,
            z: depth / max_depth,
            s: (box_w * box_w + box_h * box_h).sqrt(),
            a_norm: inst.mask_area / area,
            a_real,
            u,
            v,
            box_w,
            box_h,
        });
    }

    Ok(FragmentCloud {
        image_id: ds.image_id.clone(),
        width: ds.width,
        height: ds.height,
        points,
        epsilon,
        scale: ds.scale,
    })
}

fn require_scale(scale: Option<f64>) -> Result<f64> {
    match scale {
        Some(s) if s > 0.0 && s.is_finite() => Ok(s),
        Some(s) => Err(Error::domain(format!("scale must be positive, got {s}"))),
        None => Err(Error::Unsupported(
            "metric quantities need a scale (m/px)".into(),
        )),
    }
}

/// Height of the box center above the bottom edge of the frame, in metres:
/// `(1 - v) · H · scale`.
pub fn elevation_m(p: &FragmentPoint, image_height: u32, scale: Option<f64>) -> Result<f64> {
    let scale = require_scale(scale)?;
    Ok((1.0 - p.v) * f64::from(image_height) * scale)
}

/// Metric box diagonal in metres.
pub fn size_m(p: &FragmentPoint, width: u32, height: u32, scale: Option<f64>) -> Result<f64> {
    let scale = require_scale(scale)?;
    let dx = p.box_w * f64::from(width) * scale;
    let dy = p.box_h * f64::from(height) * scale;
    Ok((dx * dx + dy * dy).sqrt())
}

/// Diameter of the circle with the fragment's metric mask area.
pub fn equivalent_diameter_m(
    p: &FragmentPoint,
    width: u32,
    height: u32,
    scale: Option<f64>,
) -> Result<f64> {
    let scale = require_scale(scale)?;
    let area_px = p.a_norm * f64::from(width) * f64::from(height);
    let a_real = pixel_area_to_metric(area_px, scale)?;
    Ok((4.0 * a_real / std::f64::consts::PI).sqrt())
}

impl FragmentCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xy(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.x, p.y)).collect()
    }

    pub fn elevations_m(&self) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|p| elevation_m(p, self.height, self.scale))
            .collect()
    }

    pub fn sizes_m(&self, metric: SizeMetric) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|p| match metric {
                SizeMetric::BoxDiagonal => size_m(p, self.width, self.height, self.scale),
                SizeMetric::EquivalentDiameter => {
                    equivalent_diameter_m(p, self.width, self.height, self.scale)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Instance;

    fn single(ds_w: u32, ds_h: u32, bbox: [f64; 4], area: f64) -> FragmentCloud {
        let ds =
            DetectionSet::new("t", ds_w, ds_h).with_instances(vec![Instance::new(bbox, area, 1.0)]);
        build_cloud(&ds, DEFAULT_EPSILON).unwrap()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn centered_instance() {
        let c = single(400, 200, [100.0, 50.0, 300.0, 150.0], 1000.0);
        let p = c.points[0];
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, 1.0));
        assert!((p.s - 0.5f64.hypot(0.5)).abs() < 1e-15);
        assert!((p.s - 0.7071).abs() < 1e-4);
    }

    #[test]
    fn quadrupled_area_halves_depth() {
        let ds = DetectionSet::new("q", 1000, 1000).with_instances(vec![
            Instance::new([0.0, 0.0, 10.0, 10.0], 100.0, 1.0),
            Instance::new([10.0, 10.0, 30.0, 30.0], 400.0, 1.0),
        ]);
        let c = build_cloud(&ds, 1e-15).unwrap();
        assert_eq!(c.points[0].z, 1.0);
        assert!((c.points[1].z - 0.5).abs() < 1e-9);
    }

    #[test]
    fn corner_instance_coordinates() {
        let p = single(100, 100, [0.0, 0.0, 2.0, 2.0], 4.0).points[0];
        assert!((p.u - 0.01).abs() < 1e-15 && (p.v - 0.01).abs() < 1e-15);
        assert!((p.x + 0.98).abs() < 1e-15);
        assert!((p.y - 0.98).abs() < 1e-15);
        assert!((p.a_norm - 4e-4).abs() < 1e-18);
    }

    #[test]
    fn empty_set_is_degenerate() {
        let ds = DetectionSet::new("e", 10, 10);
        assert!(matches!(
            build_cloud(&ds, DEFAULT_EPSILON),
            Err(Error::Degenerate(_))
        ));
        let one = DetectionSet::new("e", 10, 10).with_instances(vec![Instance::new(
            [0.0, 0.0, 1.0, 1.0],
            1.0,
            1.0,
        )]);
        assert!(build_cloud(&one, 0.0).is_err());
    }

    #[test]
    fn metric_area_filled_when_scaled() {
        let ds = DetectionSet::new("m", 100, 100)
            .with_scale(0.01)
            .with_instances(vec![Instance::new([0.0, 0.0, 10.0, 10.0], 100.0, 1.0)]);
        let c = build_cloud(&ds, DEFAULT_EPSILON).unwrap();
        assert!((c.points[0].a_real.unwrap() - 0.01).abs() < 1e-15);
        let unscaled = single(100, 100, [0.0, 0.0, 10.0, 10.0], 100.0);
        assert_eq!(unscaled.points[0].a_real, None);
    }

    #[test]
    fn elevation_examples() {
        let mut p = single(100, 480, [0.0, 470.0, 10.0, 480.0], 10.0).points[0];
        p.v = 1.0;
        assert_eq!(elevation_m(&p, 480, Some(0.002)).unwrap(), 0.0);
        p.v = 0.5;
        assert!((elevation_m(&p, 480, Some(0.002)).unwrap() - 0.48).abs() < 1e-15);
        p.v = 0.0;
        assert!((elevation_m(&p, 480, Some(0.002)).unwrap() - 0.96).abs() < 1e-15);
        assert!(matches!(
            elevation_m(&p, 480, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn size_examples() {
        let p = single(300, 300, [0.0, 0.0, 30.0, 40.0], 10.0).points[0];
        assert!((size_m(&p, 300, 300, Some(0.01)).unwrap() - 0.5).abs() < 1e-15);
        let q = single(500, 500, [0.0, 0.0, 100.0, 100.0], 10.0).points[0];
        assert!((size_m(&q, 500, 500, Some(0.005)).unwrap() - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            size_m(&q, 500, 500, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn equivalent_diameter_switch() {
        // 100 px² at 0.1 m/px is 1 m²; the equal-area circle has diameter 2/√π.
        let ds = DetectionSet::new("d", 100, 100)
            .with_scale(0.1)
            .with_instances(vec![Instance::new([0.0, 0.0, 10.0, 10.0], 100.0, 1.0)]);
        let c = build_cloud(&ds, DEFAULT_EPSILON).unwrap();
        let d = c.sizes_m(SizeMetric::EquivalentDiameter).unwrap()[0];
        assert!((d - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let diag = c.sizes_m(SizeMetric::default()).unwrap()[0];
        assert!((diag - 2f64.sqrt()).abs() < 1e-12);
    }
}
