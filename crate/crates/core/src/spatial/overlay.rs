use serde::{Deserialize, Serialize};

use super::kde::Hotspot;

/// A line segment in image pixel coordinates (origin top-left, y down).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

/// Default arrow length: a fifth of the shorter image side.
pub fn default_arrow_length(width: u32, height: u32) -> f64 {
    0.2 * f64::from(width.min(height))
}

/// Principal-direction arrow from the image center, `L` pixels long.
///
/// `v1` is in normalized coordinates where `y` points up, so its vertical
/// component is flipped back into image space.
pub fn principal_arrow(width: u32, height: u32, v1: [f64; 2], length: f64) -> Segment {
    let start = [0.5 * f64::from(width), 0.5 * f64::from(height)];
    Segment {
        start,
        end: [start[0] + length * v1[0], start[1] - length * v1[1]],
    }
}

/// Maps a normalized `(x, y)` position to pixel coordinates.
pub fn to_pixel(width: u32, height: u32, x: f64, y: f64) -> [f64; 2] {
    [
        0.5 * (x + 1.0) * f64::from(width),
        0.5 * (1.0 - y) * f64::from(height),
    ]
}

pub fn hotspot_pixels(width: u32, height: u32, hotspots: &[Hotspot]) -> Vec<[f64; 2]> {
    hotspots
        .iter()
        .map(|h| to_pixel(width, height, h.x, h.y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_arrow() {
        let s = principal_arrow(100, 100, [1.0, 0.0], 40.0);
        assert_eq!(
            s,
            Segment {
                start: [50.0, 50.0],
                end: [90.0, 50.0]
            }
        );
    }

    #[test]
    fn up_points_to_image_top() {
        let s = principal_arrow(100, 100, [0.0, 1.0], 40.0);
        assert_eq!(s.end, [50.0, 10.0]);
    }

    #[test]
    fn oblique_arrow_on_wide_image() {
        let s = principal_arrow(200, 100, [0.6, 0.8], 50.0);
        assert_eq!(s.start, [100.0, 50.0]);
        assert!((s.end[0] - 130.0).abs() < 1e-12 && (s.end[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn pixel_mapping_inverts_coordinate_construction() {
        assert_eq!(to_pixel(640, 480, -1.0, 1.0), [0.0, 0.0]);
        assert_eq!(to_pixel(640, 480, 0.0, 0.0), [320.0, 240.0]);
        assert_eq!(to_pixel(640, 480, 1.0, -1.0), [640.0, 480.0]);
        assert_eq!(default_arrow_length(640, 480), 96.0);
    }
}
