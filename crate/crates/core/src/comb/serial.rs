//! Canonical JSON form of a data set:
//! `{"d": int, "classes": [[int,...],...], "H": [int,...]}`.
//!
//! Emission is bit-exact: classes in canonical order, no whitespace.

use super::{CombError, CombinatorialDataSet};
use crate::json;
use serde_json::Value;

impl CombinatorialDataSet {
    pub fn to_canonical_json(&self) -> String {
        let classes: Vec<String> = self
            .classes()
            .iter()
            .map(|c| json::fmt_usize_list(c))
            .collect();
        format!(
            "{{\"d\":{},\"classes\":[{}],\"H\":{}}}",
            self.degree(),
            classes.join(","),
            json::fmt_usize_list(self.h_labels())
        )
    }

    pub fn from_json_value(v: &Value) -> Result<Self, CombError> {
        let wrap = |e: String| CombError::Parse(e);
        let d = json::as_usize(json::get(v, "d").map_err(wrap)?, "d").map_err(wrap)?;
        let classes_v = json::as_array(
            json::get(v, "classes").map_err(wrap)?,
            "classes",
        )
        .map_err(wrap)?;
        let mut classes = Vec::with_capacity(classes_v.len());
        for c in classes_v {
            classes.push(json::as_usize_list(c, "class").map_err(wrap)?);
        }
        let h = json::as_usize_list(json::get(v, "H").map_err(wrap)?, "H").map_err(wrap)?;
        CombinatorialDataSet::new(d, classes, h)
    }

    pub fn parse_json(text: &str) -> Result<Self, CombError> {
        let v = json::parse_value(text).map_err(CombError::Parse)?;
        Self::from_json_value(&v)
    }
}
