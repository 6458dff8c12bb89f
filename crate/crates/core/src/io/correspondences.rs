//! Correspondence CSV: one pair per row, `px,py,pz,qx,qy,qz`, with an
//! optional header row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::Vector3;

use super::IoError;
use crate::geometry::{CorrespondenceSet, Point3};

const HEADER: [&str; 6] = ["px", "py", "pz", "qx", "qy", "qz"];

pub fn read_correspondences(input: impl Read) -> Result<CorrespondenceSet, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.len() != 6 {
            return Err(IoError::Arity {
                line,
                found: record.len(),
            });
        }
        let parsed: Result<Vec<f64>, &str> = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| f))
            .collect();
        match parsed {
            Ok(v) => {
                src.push(Vector3::new(v[0], v[1], v[2]));
                dst.push(Vector3::new(v[3], v[4], v[5]));
            }
            // A leading row of labels is a header.
            Err(_) if row == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) => {}
            Err(field) => {
                return Err(IoError::NotNumeric {
                    line,
                    field: field.to_string(),
                })
            }
        }
    }
    Ok(CorrespondenceSet::new(src, dst)?)
}

pub fn load_correspondences(path: &Path) -> Result<CorrespondenceSet, IoError> {
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    read_correspondences(file)
}

pub fn write_correspondences(out: impl Write, set: &CorrespondenceSet) -> Result<(), IoError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    for (p, q) in set.src().iter().zip(set.dst()) {
        let row: [&Point3; 2] = [p, q];
        writer.write_record(row.iter().flat_map(|v| v.iter()).map(|c| c.to_string()))?;
    }
    writer.flush().map_err(|e| IoError::Csv(e.into()))?;
    Ok(())
}

pub fn save_correspondences(path: &Path, set: &CorrespondenceSet) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    write_correspondences(file, set)
}
