use crate::corpus::FeatureVector;
use crate::error::Result;

use super::format::{fixed_opt, sig6, sig6_opt};

/// Decimal places of the area columns in the feature table.
pub const AREA_DECIMALS: usize = 5;
/// Decimal places of the β, R² and mean-edge columns in the feature table.
pub const STAT_DECIMALS: usize = 4;

/// Leading feature-table columns, in the order of the reference feature table.
pub const TABLE_COLUMNS: [&str; 7] = [
    "image_id",
    "N",
    "mean_area",
    "median_area",
    "beta",
    "r_squared",
    "mean_edge",
];

/// Columns written after [`TABLE_COLUMNS`].
pub const EXTENDED_COLUMNS: [&str; 21] = [
    "alpha",
    "lambda1",
    "lambda2",
    "var_ratio1",
    "anisotropy",
    "v1_x",
    "v1_y",
    "std_edge",
    "min_edge",
    "max_edge",
    "radial_corr",
    "bandwidth",
    "hotspot1_x",
    "hotspot1_y",
    "hotspot1_density",
    "hotspot2_x",
    "hotspot2_y",
    "hotspot2_density",
    "hotspot3_x",
    "hotspot3_y",
    "hotspot3_density",
];

pub fn feature_header() -> Vec<&'static str> {
    TABLE_COLUMNS
        .iter()
        .chain(&EXTENDED_COLUMNS)
        .copied()
        .collect()
}

/// One feature-table record; missing statistics are empty cells.
///
/// The leading columns use fixed decimals; the extended ones six significant
/// digits. Feature files keep full precision.
pub fn feature_record(f: &FeatureVector) -> Vec<String> {
    let mut row = vec![
        f.image_id.clone(),
        f.n_fragments.to_string(),
        fixed_opt(f.mean_area, AREA_DECIMALS),
        fixed_opt(f.median_area, AREA_DECIMALS),
        fixed_opt(f.beta, STAT_DECIMALS),
        fixed_opt(f.r_squared, STAT_DECIMALS),
        fixed_opt(f.mean_edge, STAT_DECIMALS),
        sig6_opt(f.alpha),
        sig6_opt(f.lambda1),
        sig6_opt(f.lambda2),
        sig6_opt(f.var_ratio1),
        sig6_opt(f.anisotropy),
        sig6_opt(f.v1.map(|v| v[0])),
        sig6_opt(f.v1.map(|v| v[1])),
        sig6_opt(f.std_edge),
        sig6_opt(f.min_edge),
        sig6_opt(f.max_edge),
        sig6_opt(f.radial_corr),
        sig6_opt(f.bandwidth),
    ];
    for k in 0..3 {
        match f.hotspots.get(k) {
            Some(h) => row.extend([sig6(h.x), sig6(h.y), sig6(h.density)]),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
    }
    row
}

/// Renders a CSV document from a header and records.
pub fn to_csv<H, R, C>(header: H, records: R) -> Result<String>
where
    H: IntoIterator,
    H::Item: AsRef<[u8]>,
    R: IntoIterator<Item = C>,
    C: IntoIterator,
    C::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("records are UTF-8"))
}

/// The feature table for `rows`.
pub fn features_csv(rows: &[FeatureVector]) -> Result<String> {
    to_csv(feature_header(), rows.iter().map(feature_record))
}
