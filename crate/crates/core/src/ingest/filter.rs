use serde::{Deserialize, Serialize};

use super::DetectionSet;
use crate::error::{Error, Result};

/// Thresholds for the geometric post-processing filter and the centroid DBSCAN.
///
/// All bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// px²
    pub min_area: f64,
    /// px²
    pub max_area: f64,
    /// Box width over box height.
    pub min_aspect: f64,
    pub max_aspect: f64,
    /// Neighborhood radius in normalized (u, v) coordinates.
    pub dbscan_eps: f64,
    pub dbscan_min_pts: usize,
    pub confidence_floor: f64,
}

impl FilterConfig {
    /// Defaults for a `width × height` image: area in `[25, 0.25·W·H]` px²,
    /// aspect in `[0.1, 10]`, confidence ≥ 0.25, DBSCAN `eps = 0.05`, `min_pts = 2`.
    pub fn defaults_for(width: u32, height: u32) -> Self {
        Self {
            min_area: 25.0,
            max_area: 0.25 * f64::from(width) * f64::from(height),
            min_aspect: 0.1,
            max_aspect: 10.0,
            dbscan_eps: 0.05,
            dbscan_min_pts: 2,
            confidence_floor: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_area <= self.max_area) {
            return Err(Error::domain("min_area must not exceed max_area"));
        }
        if !(self.min_aspect <= self.max_aspect) {
            return Err(Error::domain("min_aspect must not exceed max_aspect"));
        }
        if !(self.dbscan_eps > 0.0) {
            return Err(Error::domain("dbscan_eps must be positive"));
        }
        if self.dbscan_min_pts < 1 {
            return Err(Error::domain("dbscan_min_pts must be at least 1"));
        }
        Ok(())
    }
}

/// Keeps instances whose confidence, mask area and box aspect ratio all fall
/// inside the configured bounds. Order is preserved.
pub fn filter_geometric(ds: &DetectionSet, cfg: &FilterConfig) -> DetectionSet {
    let keep = |inst: &super::Instance| {
        let aspect = inst.aspect();
        inst.confidence >= cfg.confidence_floor
            && inst.mask_area >= cfg.min_area
            && inst.mask_area <= cfg.max_area
            && aspect >= cfg.min_aspect
            && aspect <= cfg.max_aspect
    };
    DetectionSet {
        instances: ds.instances.iter().copied().filter(keep).collect(),
        ..ds.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Instance;
    use proptest::prelude::*;

    fn cfg() -> FilterConfig {
        FilterConfig::defaults_for(200, 200)
    }

    #[test]
    fn defaults_match_documented_values() {
        let c = FilterConfig::defaults_for(640, 480);
        assert_eq!(c.max_area, 76_800.0);
        assert_eq!((c.min_aspect, c.max_aspect), (0.1, 10.0));
        assert_eq!(c.confidence_floor, 0.25);
        assert_eq!((c.dbscan_eps, c.dbscan_min_pts), (0.05, 2));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn in_bounds_set_is_unchanged() {
        let ds = DetectionSet::new("a", 200, 200).with_instances(vec![
            Instance::new([0.0, 0.0, 10.0, 10.0], 50.0, 0.9),
            Instance::new([20.0, 20.0, 40.0, 30.0], 150.0, 0.3),
        ]);
        assert_eq!(filter_geometric(&ds, &cfg()), ds);
    }

    #[test]
    fn drops_elongated_box() {
        let mut c = cfg();
        c.max_aspect = 5.0;
        let ds = DetectionSet::new("a", 200, 200).with_instances(vec![
            Instance::new([0.0, 0.0, 100.0, 10.0], 500.0, 0.9),
            Instance::new([0.0, 0.0, 10.0, 10.0], 50.0, 0.9),
        ]);
        let out = filter_geometric(&ds, &c);
        assert_eq!(out.instances, vec![ds.instances[1]]);
    }

    #[test]
    fn area_violations_removed_in_order() {
        // Areas 30, 10 (too small), 500, 20000 (too large, > 0.25·200·200), 25 (inclusive edge).
        let areas = [30.0, 10.0, 500.0, 20_000.0, 25.0];
        let instances: Vec<_> = areas
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let x = 30.0 * i as f64;
                Instance::new([x, 0.0, x + 20.0, 20.0], a, 0.8)
            })
            .collect();
        let ds = DetectionSet::new("m", 200, 200).with_instances(instances.clone());
        let out = filter_geometric(&ds, &cfg());
        assert_eq!(
            out.instances,
            vec![instances[0], instances[2], instances[4]]
        );
    }

    #[test]
    fn confidence_floor_is_inclusive() {
        let ds = DetectionSet::new("c", 200, 200).with_instances(vec![
            Instance::new([0.0, 0.0, 10.0, 10.0], 50.0, 0.25),
            Instance::new([0.0, 0.0, 10.0, 10.0], 50.0, 0.2499),
        ]);
        assert_eq!(filter_geometric(&ds, &cfg()).instances.len(), 1);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = cfg();
        c.min_area = 1e9;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.dbscan_eps = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.dbscan_min_pts = 0;
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn filtering_is_idempotent(
            raw in prop::collection::vec((0.0f64..150.0, 0.0f64..150.0, 0.5f64..50.0, 0.5f64..50.0, 1.0f64..3000.0, 0.0f64..=1.0), 0..20)
        ) {
            let instances = raw
                .into_iter()
                .map(|(x, y, w, h, a, c)| Instance::new([x, y, x + w, y + h], a, c))
                .collect();
            let ds = DetectionSet::new("p", 200, 200).with_instances(instances);
            let once = filter_geometric(&ds, &cfg());
            prop_assert_eq!(filter_geometric(&once, &cfg()), once);
        }
    }
}
