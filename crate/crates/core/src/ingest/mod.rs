//! Detection ingestion: the on-disk detection format, metric scale conversion
//! and the post-processing filters applied before coordinate construction.
//!
//! # Detection file format
//!
//! A UTF-8 JSON document whose top level is a list of image records:
//!
//! ```json
//! [
//!   {
//!     "image_id": "bench-07",
//!     "width": 640,
//!     "height": 480,
//!     "scale_m_per_px": 0.004,
//!     "instances": [
//!       { "bbox": [10.0, 10.0, 20.0, 20.0], "mask_area": 80.0, "confidence": 0.91 }
//!     ]
//!   }
//! ]
//! ```
//!
//! `scale_m_per_px` is optional. Every other field shown is required; unknown
//! extra fields are ignored. Bounding boxes are `[x1, y1, x2, y2]` in pixels
//! with the origin at the top-left corner.

mod dbscan;
mod filter;

pub use dbscan::{dbscan_centroids, ClusterLabel, DbscanOutcome};
pub use filter::{filter_geometric, FilterConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One detected fragment: its box, mask pixel count and detector confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    /// `[x1, y1, x2, y2]` in pixels.
    pub bbox: [f64; 4],
    /// Mask area in px².
    pub mask_area: f64,
    pub confidence: f64,
}

impl Instance {
    pub fn new(bbox: [f64; 4], mask_area: f64, confidence: f64) -> Self {
        Self {
            bbox,
            mask_area,
            confidence,
        }
    }

    pub fn box_width(&self) -> f64 {
        self.bbox[2] - self.bbox[0]
    }

    pub fn box_height(&self) -> f64 {
        self.bbox[3] - self.bbox[1]
    }

    /// Box width over box height.
    pub fn aspect(&self) -> f64 {
        self.box_width() / self.box_height()
    }

    /// Box center in pixels.
    pub fn center_px(&self) -> (f64, f64) {
        (
            0.5 * (self.bbox[0] + self.bbox[2]),
            0.5 * (self.bbox[1] + self.bbox[3]),
        )
    }

    fn validate(&self, width: f64, height: f64) -> std::result::Result<(), String> {
        let [x1, y1, x2, y2] = self.bbox;
        if !self.bbox.iter().all(|c| c.is_finite()) {
            return Err("bbox coordinates must be finite".into());
        }
        if x1 >= x2 {
            return Err(format!("bbox requires x1 < x2, got x1={x1}, x2={x2}"));
        }
        if y1 >= y2 {
            return Err(format!("bbox requires y1 < y2, got y1={y1}, y2={y2}"));
        }
        if x1 < 0.0 || y1 < 0.0 || x2 > width || y2 > height {
            return Err(format!(
                "bbox [{x1}, {y1}, {x2}, {y2}] lies outside the {width}x{height} image"
            ));
        }
        if !(self.mask_area.is_finite() && self.mask_area > 0.0) {
            return Err(format!(
                "mask_area must be positive, got {}",
                self.mask_area
            ));
        }
        if self.mask_area > width * height {
            return Err(format!(
                "mask_area {} exceeds image area {}",
                self.mask_area,
                width * height
            ));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(format!(
                "confidence must lie in [0, 1], got {}",
                self.confidence
            ));
        }
        Ok(())
    }
}

/// All detections for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSet {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    /// Metres per pixel, when a reference object of known size was available.
    #[serde(
        rename = "scale_m_per_px",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub scale: Option<f64>,
    pub instances: Vec<Instance>,
}

impl DetectionSet {
    pub fn new(image_id: impl Into<String>, width: u32, height: u32) -> Self {
        Self {
            image_id: image_id.into(),
            width,
            height,
            scale: None,
            instances: Vec::new(),
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = Some(scale);
        self
    }

    pub fn with_instances(mut self, instances: Vec<Instance>) -> Self {
        self.instances = instances;
        self
    }

    pub fn image_area(&self) -> f64 {
        f64::from(self.width) * f64::from(self.height)
    }

    /// Checks every invariant of the set and its instances.
    pub fn validate(&self) -> Result<()> {
        let invalid = |instance, message: String| Error::Validation {
            image_id: self.image_id.clone(),
            instance,
            message,
        };
        if self.width == 0 || self.height == 0 {
            return Err(invalid(None, "image dimensions must be positive".into()));
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(invalid(None, format!("scale must be positive, got {s}")));
            }
        }
        let (w, h) = (f64::from(self.width), f64::from(self.height));
        for (i, inst) in self.instances.iter().enumerate() {
            inst.validate(w, h).map_err(|m| invalid(Some(i), m))?;
        }
        Ok(())
    }
}

/// Parses a detection document into one validated [`DetectionSet`] per image record.
pub fn parse_detections(bytes: &[u8]) -> Result<Vec<DetectionSet>> {
    let sets: Vec<DetectionSet> = serde_json::from_slice(bytes)?;
    for set in &sets {
        set.validate()?;
    }
    Ok(sets)
}

/// Serializes detection sets in the same format [`parse_detections`] reads.
pub fn serialize_detections(sets: &[DetectionSet]) -> String {
    // Plain data with string keys; serialization cannot fail.
    serde_json::to_string_pretty(sets).expect("detection sets serialize")
}

/// Converts a pixel area to square metres: `area_px · scale²`.
pub fn pixel_area_to_metric(area_px: f64, scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::domain(format!(
            "scale must be positive, got {scale}"
        )));
    }
    Ok(area_px * scale * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE: &str = r#"[{"image_id": "a", "width": 100, "height": 50,
        "instances": [{"bbox": [10, 10, 20, 20], "mask_area": 80, "confidence": 0.9}]}]"#;

    #[test]
    fn parses_single_instance() {
        let sets = parse_detections(ONE.as_bytes()).unwrap();
        assert_eq!(sets.len(), 1);
        let ds = &sets[0];
        assert_eq!((ds.width, ds.height), (100, 50));
        assert_eq!(ds.scale, None);
        assert_eq!(
            ds.instances,
            vec![Instance::new([10.0, 10.0, 20.0, 20.0], 80.0, 0.9)]
        );
    }

    #[test]
    fn empty_instance_list_is_legal() {
        let doc = r#"[{"image_id": "e", "width": 10, "height": 10, "scale_m_per_px": 0.01, "instances": []}]"#;
        let sets = parse_detections(doc.as_bytes()).unwrap();
        assert!(sets[0].instances.is_empty());
        assert_eq!(sets[0].scale, Some(0.01));
    }

    #[test]
    fn inverted_box_names_the_instance() {
        let doc = r#"[{"image_id": "bad", "width": 100, "height": 100,
            "instances": [{"bbox": [30, 10, 20, 20], "mask_area": 5, "confidence": 0.5}]}]"#;
        match parse_detections(doc.as_bytes()) {
            Err(Error::Validation {
                image_id, instance, ..
            }) => {
                assert_eq!(image_id, "bad");
                assert_eq!(instance, Some(0));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let doc = "[\n{\"image_id\": \"a\", \"width\": }\n]";
        match parse_detections(doc.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_field_is_rejected_and_extras_ignored() {
        let missing = r#"[{"image_id": "a", "width": 10, "instances": []}]"#;
        assert!(matches!(
            parse_detections(missing.as_bytes()),
            Err(Error::Parse { .. })
        ));
        let extra = r#"[{"image_id": "a", "width": 10, "height": 10, "camera": "T4",
            "instances": [{"bbox": [1, 1, 2, 2], "mask_area": 1, "confidence": 1, "class": "rock"}]}]"#;
        assert_eq!(
            parse_detections(extra.as_bytes()).unwrap()[0]
                .instances
                .len(),
            1
        );
    }

    #[test]
    fn rejects_out_of_frame_and_oversized_masks() {
        let mut ds = DetectionSet::new("x", 10, 10).with_instances(vec![Instance::new(
            [0.0, 0.0, 11.0, 5.0],
            4.0,
            0.5,
        )]);
        assert!(ds.validate().is_err());
        ds.instances[0] = Instance::new([0.0, 0.0, 5.0, 5.0], 101.0, 0.5);
        assert!(ds.validate().is_err());
        // Masks larger than their own box are tolerated.
        ds.instances[0] = Instance::new([0.0, 0.0, 5.0, 5.0], 50.0, 0.5);
        assert!(ds.validate().is_ok());
        ds.instances[0].confidence = 1.5;
        assert!(ds.validate().is_err());
    }

    #[test]
    fn metric_area_examples() {
        assert_eq!(pixel_area_to_metric(10_000.0, 0.01).unwrap(), 1.0);
        assert_eq!(pixel_area_to_metric(0.0, 0.3).unwrap(), 0.0);
        assert!((pixel_area_to_metric(1362.0, 0.02).unwrap() - 0.5448).abs() < 1e-12);
        assert!(matches!(
            pixel_area_to_metric(1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(pixel_area_to_metric(1.0, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn metric_area_is_linear_in_area_and_quadratic_in_scale(
            a in 0.0f64..1e6, b in 0.0f64..1e6, s in 1e-4f64..1.0, k in 0.1f64..10.0
        ) {
            let f = |a, s| pixel_area_to_metric(a, s).unwrap();
            let lhs = f(a + b, s);
            prop_assert!((lhs - (f(a, s) + f(b, s))).abs() <= 1e-12 * lhs.max(1.0));
            let scaled = f(a, k * s);
            prop_assert!((scaled - k * k * f(a, s)).abs() <= 1e-12 * scaled.max(1e-300));
        }

        #[test]
        fn serialize_then_parse_round_trips(
            boxes in prop::collection::vec((0.0f64..50.0, 0.0f64..50.0, 0.1f64..50.0, 0.1f64..50.0, 0.1f64..1.0, 0.0f64..=1.0), 0..12),
            scale in prop::option::of(1e-4f64..0.1),
        ) {
            let instances = boxes
                .into_iter()
                .map(|(x, y, w, h, m, c)| Instance::new([x, y, x + w, y + h], m * w * h, c))
                .collect();
            let mut ds = DetectionSet::new("rt", 100, 100).with_instances(instances);
            ds.scale = scale;
            let text = serialize_detections(std::slice::from_ref(&ds));
            let back = parse_detections(text.as_bytes()).unwrap();
            prop_assert_eq!(back, vec![ds]);
        }
    }
}
