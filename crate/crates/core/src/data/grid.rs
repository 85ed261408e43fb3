//! Latitude–longitude gridded fields from CSV (`lat,lon,value`, empty value = missing).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::DataError;

#[derive(Debug, Clone, PartialEq)]
pub struct GriddedField {
    /// Strictly increasing latitudes (degrees).
    pub lats: Vec<f64>,
    /// Strictly increasing longitudes (degrees).
    pub lons: Vec<f64>,
    /// `values[i][j]` at `(lats[i], lons[j])`; `None` marks a missing cell.
    pub values: Vec<Vec<Option<f64>>>,
    pub units: String,
}

impl GriddedField {
    pub fn shape(&self) -> (usize, usize) {
        (self.lats.len(), self.lons.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }

    pub fn masked_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_none()).count()
    }

    /// Mean over unmasked cells.
    pub fn mean(&self) -> Option<f64> {
        let vals: Vec<f64> = self.values.iter().flatten().filter_map(|&v| v).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Value at the cell nearest to `(lat, lon)` (longitude compared modulo 360).
    pub fn nearest(&self, lat: f64, lon: f64) -> Option<f64> {
        let i = nearest_index(&self.lats, |a| (a - lat).abs())?;
        let j = nearest_index(&self.lons, |a| {
            let d = (a - lon).rem_euclid(360.0);
            d.min(360.0 - d)
        })?;
        self.values[i][j]
    }
}

fn nearest_index(axis: &[f64], dist: impl Fn(f64) -> f64) -> Option<usize> {
    axis.iter().enumerate().min_by(|a, b| dist(*a.1).total_cmp(&dist(*b.1))).map(|(i, _)| i)
}

pub fn load_gridded_csv(path: impl AsRef<Path>) -> Result<GriddedField, DataError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| DataError::Io(e.to_string()))?;
    parse_gridded_csv(&text)
}

/// Parses `lat,lon,value` rows; every (lat, lon) pair of the product grid must
/// appear exactly once unless missing rows are allowed by leaving the cell empty.
pub fn parse_gridded_csv(text: &str) -> Result<GriddedField, DataError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(DataError::Parse { line: 1, message: "empty file".into() })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["lat", "lon", "value"] {
        return Err(DataError::Parse { line: 1, message: format!("expected header lat,lon,value, found {header:?}") });
    }
    let mut cells: BTreeMap<(u64, u64), (f64, f64, Option<f64>)> = BTreeMap::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(DataError::Parse { line: lineno, message: format!("expected 3 fields, found {}", parts.len()) });
        }
        let num = |s: &str, what: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Parse { line: lineno, message: format!("bad {what} {s:?}") })
        };
        let lat = num(parts[0], "latitude")?;
        let lon = num(parts[1], "longitude")?;
        let value = if parts[2].is_empty() { None } else { Some(num(parts[2], "value")?) };
        let key = (lat.to_bits(), lon.to_bits());
        if cells.insert(key, (lat, lon, value)).is_some() {
            return Err(DataError::Parse { line: lineno, message: format!("duplicate coordinate ({lat}, {lon})") });
        }
    }
    let mut lats: Vec<f64> = cells.values().map(|c| c.0).collect();
    let mut lons: Vec<f64> = cells.values().map(|c| c.1).collect();
    lats.sort_by(f64::total_cmp);
    lats.dedup();
    lons.sort_by(f64::total_cmp);
    lons.dedup();
    let mut values = vec![vec![None; lons.len()]; lats.len()];
    for (lat, lon, v) in cells.values() {
        let i = lats.binary_search_by(|a| a.total_cmp(lat)).unwrap();
        let j = lons.binary_search_by(|a| a.total_cmp(lon)).unwrap();
        values[i][j] = *v;
    }
    Ok(GriddedField { lats, lons, values, units: String::new() })
}

pub fn write_gridded_csv(field: &GriddedField, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "lat,lon,value")?;
    for (i, lat) in field.lats.iter().enumerate() {
        for (j, lon) in field.lons.iter().enumerate() {
            match field.values[i][j] {
                Some(v) => writeln!(out, "{lat},{lon},{v}")?,
                None => writeln!(out, "{lat},{lon},")?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_two_by_two() {
        let f = parse_gridded_csv("lat,lon,value\n0,0,1\n0,10,2\n5,0,3\n5,10,4\n").unwrap();
        assert_eq!(f.shape(), (2, 2));
        assert_eq!(f.masked_count(), 0);
        assert_eq!(f.mean(), Some(2.5));
    }

    #[test]
    fn empty_cell_is_masked() {
        let f = parse_gridded_csv("lat,lon,value\n0,0,1\n0,10,\n5,0,3\n5,10,5\n").unwrap();
        assert_eq!(f.masked_count(), 1);
        assert_eq!(f.mean(), Some(3.0));
    }

    #[test]
    fn duplicate_reports_line() {
        let err = parse_gridded_csv("lat,lon,value\n0,0,1\n0,10,2\n0,0,3\n").unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 4, .. }));
    }

    #[test]
    fn roundtrip() {
        let f = parse_gridded_csv("lat,lon,value\n-5,0,1.5\n-5,10,\n5,0,3\n5,10,4.25\n").unwrap();
        let mut buf = Vec::new();
        write_gridded_csv(&f, &mut buf).unwrap();
        assert_eq!(parse_gridded_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), f);
    }
}
