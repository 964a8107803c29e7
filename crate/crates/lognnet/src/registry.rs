//! Feature registries: ordered feature names, class names and per-feature
//! units. Two registries ship built in, one per bundled dataset family;
//! custom registries can be built from any header.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered feature names with 1-based indices, plus the two class names
/// (index = label code) and display units for report tables. Units may be
/// empty for custom registries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    names: Vec<String>,
    class_names: [String; 2],
    units: Vec<String>,
}

impl FeatureRegistry {
    pub fn new(
        names: Vec<String>,
        class_names: [String; 2],
        units: Option<Vec<String>>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Config("a registry needs at least one feature".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if a.trim().is_empty() {
                return Err(Error::Config(format!("feature {} has an empty name", i + 1)));
            }
            if names[i + 1..].iter().any(|b| a.eq_ignore_ascii_case(b)) {
                return Err(Error::Config(format!("duplicate feature name \"{a}\"")));
            }
        }
        let units = match units {
            Some(u) => {
                if u.len() != names.len() {
                    return Err(Error::Config(format!(
                        "{} units for {} features",
                        u.len(),
                        names.len()
                    )));
                }
                u
            }
            None => vec![String::new(); names.len()],
        };
        Ok(Self {
            names,
            class_names,
            units,
        })
    }

    /// Number of features, `NF`.
    pub fn feature_count(&self) -> usize {
        self.names.len()
    }

    /// Name of feature `z` (1-based).
    pub fn name(&self, z: usize) -> &str {
        &self.names[z - 1]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Display unit of feature `z` (1-based); may be empty.
    pub fn unit(&self, z: usize) -> &str {
        &self.units[z - 1]
    }

    pub fn class_names(&self) -> &[String; 2] {
        &self.class_names
    }

    /// 1-based index of a feature by name (ASCII case-insensitive).
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        self.names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .map(|i| i + 1)
    }
}

// (name, unit, histogram bin size where published; 0.0 = unspecified)
const RBV1_FEATURES: [(&str, &str, f64); 51] = [
    ("CRP", "mg/L", 0.0),
    ("D-Dimer", "µg/L", 0.0),
    ("Ferritin", "µg/L", 0.0),
    ("Fibrinogen", "mg/dL", 0.0),
    ("INR", "no unit", 0.0),
    ("PT", "Sec", 0.0),
    ("PCT", "ng/mL", 0.0),
    ("ESR", "mm/hr", 0.0),
    ("Troponin", "ng/L", 0.0),
    ("aPTT", "Sec", 238.0),
    ("LYM", "10³/µL", 0.0),
    ("NEU", "10³/µL", 0.0),
    ("PLT", "10³/µL", 0.0),
    ("WBC", "10³/µL", 0.0),
    ("BASO", "10³/µL", 0.0),
    ("EOS", "10³/µL", 0.0),
    ("HCT", "%", 60.0),
    ("HGB", "g/L", 0.0),
    ("MCH", "pg", 0.2),
    ("MCHC", "g/dL", 0.2),
    ("MCV", "fL", 0.0),
    ("MONO", "10³/µL", 0.06),
    ("MPV", "fL", 0.0),
    ("PDW", "fL", 0.0),
    ("RBC", "10⁶/µL", 0.06),
    ("RDW", "%", 0.0),
    ("ALT", "u/L", 0.0),
    ("AST", "u/L", 0.0),
    ("Albumin", "g/L", 0.0),
    ("ALP", "u/L", 0.0),
    ("Amylase", "u/L", 3.0),
    ("CK-MB", "u/L", 0.0),
    ("D-Bil", "mg/dL", 0.0),
    ("GGT", "u/L", 0.0),
    ("Glucose", "mg/dL", 0.0),
    ("HDL-C", "mg/dL", 1.0),
    ("Calcium", "mg/dL", 0.0),
    ("Chlorine", "mmol/L", 0.0),
    ("Cholesterol", "mg/dL", 6.0),
    ("Creatinine", "mg/dL", 0.0),
    ("CK", "u/L", 0.0),
    ("LDH", "u/L", 0.0),
    ("LDL", "mg/dL", 3.4),
    ("Potassium", "mmol/L", 0.0),
    ("Sodium", "mmol/L", 0.0),
    ("T-Bil", "mg/dL", 0.0),
    ("TP", "g/L", 0.0),
    ("Triglyceride", "mg/dL", 17.0),
    ("eGFR", "no unit", 0.0),
    ("Urea", "mg/dL", 0.0),
    ("UA", "mg/dL", 0.0),
];

const RBV2_FEATURES: [(&str, &str, f64); 51] = [
    ("ALT", "u/L", 0.0),
    ("AST", "u/L", 0.0),
    ("Albumin", "g/L", 0.5),
    ("ALP", "u/L", 31.0),
    ("Amylase", "u/L", 0.0),
    ("CK-MB", "u/L", 0.0),
    ("D-Bil", "mg/dL", 0.0),
    ("GGT", "u/L", 0.0),
    ("Glucose", "mg/dL", 8.0),
    ("HDL-C", "mg/dL", 0.0),
    ("Calcium", "mg/dL", 0.1),
    ("Chlorine", "mmol/L", 0.58),
    ("Cholesterol", "mg/dL", 0.0),
    ("Creatinine", "mg/dL", 0.0),
    ("CK", "u/L", 0.0),
    ("LDH", "u/L", 0.0),
    ("LDL", "mg/dL", 0.0),
    ("Potassium", "mmol/L", 0.0),
    ("Sodium", "mmol/L", 0.0),
    ("T-Bil", "mg/dL", 0.0),
    ("TP", "g/L", 0.8),
    ("Triglyceride", "mg/dL", 0.0),
    ("eGFR", "no unit", 0.0),
    ("Urea", "mg/dL", 3.0),
    ("UA", "mg/dL", 0.0),
    ("BASO", "10³/µL", 0.0),
    ("EOS", "10³/µL", 0.0),
    ("HCT", "%", 0.0),
    ("HGB", "g/L", 0.15),
    ("LYM", "10³/µL", 0.0),
    ("MCH", "pg", 0.0),
    ("MCHC", "g/dL", 0.0),
    ("MCV", "fL", 0.0),
    ("MONO", "10³/µL", 0.0),
    ("MPV", "fL", 0.07),
    ("NEU", "10³/µL", 0.3),
    ("PDW", "fL", 0.0),
    ("PLT", "10³/µL", 0.0),
    ("RBC", "10⁶/µL", 0.06),
    ("RDW", "%", 0.16),
    ("WBC", "10³/µL", 0.6),
    ("CRP", "mg/L", 5.0),
    ("D-Dimer", "µg/L", 0.0),
    ("Ferritin", "µg/L", 0.0),
    ("Fibrinogen", "mg/dL", 0.0),
    ("INR", "no unit", 0.0),
    ("PT", "Sec", 0.0),
    ("PCT", "ng/mL", 0.0),
    ("ESR", "mm/hr", 1.37),
    ("Troponin", "ng/L", 0.0),
    ("aPTT", "Sec", 0.0),
];

fn build(table: &[(&str, &str, f64)], class_names: [&str; 2]) -> FeatureRegistry {
    FeatureRegistry::new(
        table.iter().map(|(n, _, _)| n.to_string()).collect(),
        [class_names[0].to_string(), class_names[1].to_string()],
        Some(table.iter().map(|(_, u, _)| u.to_string()).collect()),
    )
    .expect("builtin registry is valid")
}

/// The 51-feature diagnosis registry (label 1 = COVID-19 positive).
pub fn rbv1() -> FeatureRegistry {
    build(&RBV1_FEATURES, ["non-COVID-19", "COVID-19"])
}

/// The 51-feature prognosis registry (label 1 = ICU).
pub fn rbv2() -> FeatureRegistry {
    build(&RBV2_FEATURES, ["non-ICU", "ICU"])
}

/// Published histogram bin size for feature `z` of the diagnosis
/// registry, where one exists.
pub fn rbv1_bin_size(z: usize) -> Option<f64> {
    RBV1_FEATURES
        .get(z.checked_sub(1)?)
        .and_then(|&(_, _, b)| (b > 0.0).then_some(b))
}

/// Published histogram bin size for feature `z` of the prognosis
/// registry, where one exists.
pub fn rbv2_bin_size(z: usize) -> Option<f64> {
    RBV2_FEATURES
        .get(z.checked_sub(1)?)
        .and_then(|&(_, _, b)| (b > 0.0).then_some(b))
}
