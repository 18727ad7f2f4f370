//! JSON region documents.
//!
//! ```json
//! {"ambient_dim": 2, "divisor_count": 2, "complex": false,
//!  "box": [["0", "1"], ["0", "1/2"]],
//!  "cells": [{"constraints": ["r1 + r2 >= 1"]}]}
//! ```
//!
//! `ambient_dim` is the real dimension; complex documents use the
//! `zr`/`zi` variables and may carry `m` and a default `form`.

use serde::{Deserialize, Serialize};

use super::{BoundingBox, Cell, Constraint, Region, RegionKind};
use crate::error::{Error, Result};
use crate::polyform::{parse_rational, Rational};

/// Box endpoint as written: a number or a rational string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(serde_json::Number),
    Text(String),
}

impl Bound {
    fn to_rational(&self) -> Result<Rational> {
        let text = match self {
            Bound::Number(n) => n.to_string(),
            Bound::Text(s) => s.clone(),
        };
        parse_rational(&text).map_err(|e| Error::Document(format!("box bound `{text}`: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub constraints: Vec<String>,
}

/// Serialized form of a region document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionFile {
    pub ambient_dim: usize,
    pub divisor_count: usize,
    #[serde(default)]
    pub complex: bool,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<Vec<(Bound, Bound)>>,
    pub cells: Vec<CellEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
}

/// A parsed document: the region plus the optional extras.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionDocument {
    pub region: Region,
    pub m: Option<i64>,
    pub form: Option<String>,
}

impl RegionFile {
    pub fn to_document(&self) -> Result<RegionDocument> {
        let kind = if self.complex {
            RegionKind::Complex
        } else {
            RegionKind::Real
        };
        if self.complex && !self.ambient_dim.is_multiple_of(2) {
            return Err(Error::Document(format!(
                "complex document with odd real dimension {}",
                self.ambient_dim
            )));
        }
        let vars = match kind {
            RegionKind::Real => {
                crate::polyform::Variables::real(self.ambient_dim, self.divisor_count.min(self.ambient_dim))
            }
            RegionKind::Complex => crate::polyform::Variables::complex(self.ambient_dim / 2),
        };
        let cells = self
            .cells
            .iter()
            .map(|c| {
                c.constraints
                    .iter()
                    .map(|s| Constraint::parse(s, &vars))
                    .collect::<Result<Vec<_>>>()
                    .map(Cell::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let bbox = match &self.bbox {
            None => None,
            Some(rows) => Some(BoundingBox(
                rows.iter()
                    .map(|(lo, hi)| Ok((lo.to_rational()?, hi.to_rational()?)))
                    .collect::<Result<_>>()?,
            )),
        };
        let region = Region::new(self.ambient_dim, self.divisor_count, kind, cells, bbox)?;
        Ok(RegionDocument {
            region,
            m: self.m,
            form: self.form.clone(),
        })
    }
}

impl RegionDocument {
    pub fn new(region: Region) -> Self {
        RegionDocument {
            region,
            m: None,
            form: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: RegionFile = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        file.to_document()
    }

    pub fn to_file(&self) -> RegionFile {
        let r = &self.region;
        let vars = r.variables();
        RegionFile {
            ambient_dim: r.n(),
            divisor_count: r.p(),
            complex: r.kind() == RegionKind::Complex,
            bbox: r.bbox().map(|b| {
                b.0.iter()
                    .map(|(lo, hi)| (Bound::Text(lo.to_string()), Bound::Text(hi.to_string())))
                    .collect()
            }),
            cells: r
                .cells()
                .iter()
                .map(|c| CellEntry {
                    constraints: c.constraints.iter().map(|k| k.format(&vars)).collect(),
                })
                .collect(),
            m: self.m,
            form: self.form.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("region documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::rat;

    const S_HALF: &str = r#"{
        "ambient_dim": 2, "divisor_count": 2,
        "box": [[0, 1], ["0", "1/2"]],
        "cells": [{"constraints": ["r1 + r2 >= 1"]}]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = RegionDocument::parse(S_HALF).unwrap();
        assert_eq!(doc.region.cells().len(), 1);
        assert_eq!(doc.region.bbox().unwrap().0[1].1, rat(1, 2));
        let again = RegionDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn decimal_bounds_are_exact() {
        let doc = RegionDocument::parse(
            r#"{"ambient_dim": 1, "divisor_count": 1, "box": [[0.1, 2.5]], "cells": [{"constraints": []}]}"#,
        )
        .unwrap();
        assert_eq!(doc.region.bbox().unwrap().0[0], (rat(1, 10), rat(5, 2)));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(RegionDocument::parse("{").is_err());
        assert!(RegionDocument::parse(r#"{"ambient_dim": 1, "divisor_count": 2, "cells": []}"#).is_err());
        assert!(RegionDocument::parse(
            r#"{"ambient_dim": 2, "divisor_count": 1, "complex": true, "cells": [{"constraints": ["r1 <= 1"]}]}"#
        )
        .is_err());
        let empty = RegionDocument::parse(r#"{"ambient_dim": 2, "divisor_count": 2, "cells": []}"#).unwrap();
        assert!(empty.region.cells().is_empty());
    }
}
