use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Blast parameters keyed by image id, read from a CSV sidecar whose header
/// is `image_id,<param>,...`. Empty cells are missing values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlastParams {
    pub names: Vec<String>,
    pub values: BTreeMap<String, Vec<Option<f64>>>,
}

impl BlastParams {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        if header.len() < 2 || &header[0] != "image_id" {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "sidecar header must be `image_id,<parameter>,...`".into(),
            });
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut values = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let id = record[0].to_string();
            let row = record
                .iter()
                .skip(1)
                .enumerate()
                .map(|(c, cell)| {
                    if cell.is_empty() {
                        return Ok(None);
                    }
                    cell.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| Error::Parse {
                            line,
                            column: c + 2,
                            message: format!("`{cell}` is not a finite number"),
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            if values.insert(id.clone(), row).is_some() {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("duplicate image_id `{id}`"),
                });
            }
        }
        Ok(Self { names, values })
    }

    /// Values of one parameter aligned with `image_ids`.
    pub fn column(&self, name: &str, image_ids: &[&str]) -> Option<Vec<Option<f64>>> {
        let c = self.names.iter().position(|n| n == name)?;
        Some(
            image_ids
                .iter()
                .map(|id| self.values.get(*id).and_then(|row| row[c]))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_aligns() {
        let p = BlastParams::parse("image_id,burden,spacing\na,3.5,4\nb,,4.2\n").unwrap();
        assert_eq!(p.names, vec!["burden", "spacing"]);
        assert_eq!(
            p.column("burden", &["b", "a", "c"]).unwrap(),
            vec![None, Some(3.5), None]
        );
        assert!(p.column("powder", &["a"]).is_none());
    }

    #[test]
    fn rejects_text_and_duplicates() {
        assert!(BlastParams::parse("image_id,burden\na,x\n").is_err());
        assert!(BlastParams::parse("image_id,burden\na,1\na,2\n").is_err());
        assert!(BlastParams::parse("id,burden\na,1\n").is_err());
    }
}
