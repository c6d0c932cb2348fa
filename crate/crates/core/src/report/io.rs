use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::corpus::FeatureVector;
use crate::error::Result;

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A file-name-safe form of an image id.
pub fn file_stem(image_id: &str) -> String {
    let stem: String = image_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if stem.is_empty() || stem.starts_with('.') {
        format!("_{stem}")
    } else {
        stem
    }
}

pub fn feature_file_path(out_dir: &Path, image_id: &str) -> PathBuf {
    out_dir.join(format!("{}.features.json", file_stem(image_id)))
}

pub fn feature_json(f: &FeatureVector) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("feature vectors serialize");
    s.push('\n');
    s
}

pub fn write_feature_file(out_dir: &Path, f: &FeatureVector) -> Result<PathBuf> {
    let path = feature_file_path(out_dir, &f.image_id);
    write_atomic(&path, feature_json(f).as_bytes())?;
    Ok(path)
}

pub fn read_feature_file(path: &Path) -> Result<FeatureVector> {
    let bytes = fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_are_sanitized() {
        assert_eq!(file_stem("pile 3/a"), "pile_3_a");
        assert_eq!(file_stem(""), "_");
        assert_eq!(file_stem("..x"), "_..x");
        assert_eq!(file_stem("img-1.v2"), "img-1.v2");
    }

    #[test]
    fn feature_file_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = FeatureVector::empty("a/b", 7);
        f.beta = Some(-2.123456789012345);
        f.v1 = Some([0.6, 0.8]);
        let path = write_feature_file(dir.path(), &f).unwrap();
        assert_eq!(path.file_name().unwrap(), "a_b.features.json");
        assert_eq!(read_feature_file(&path).unwrap(), f);
    }
}
