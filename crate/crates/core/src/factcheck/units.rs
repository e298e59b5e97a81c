//! Physical units recognized next to extracted constants.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Speed,
    Action,
    Frequency,
    Length,
    Energy,
    Time,
}

/// A unit as a dimension plus a factor to the SI base for that dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub dimension: Dimension,
    pub to_si: f64,
}

const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

fn prefix_factor(p: &str) -> Option<f64> {
    Some(match p {
        "" => 1.0,
        "p" => 1e-12,
        "n" => 1e-9,
        "μ" | "µ" | "u" => 1e-6,
        "m" => 1e-3,
        "c" => 1e-2,
        "k" => 1e3,
        "M" => 1e6,
        "G" => 1e9,
        "T" => 1e12,
        "P" => 1e15,
        _ => return None,
    })
}

/// Parses a unit string as captured by the extractor (`m/s`, `km/s`,
/// `J·s`, `eV s`, `MHz`, `nm`, `meters per second`, ...).
pub fn parse_unit(raw: &str) -> Option<Unit> {
    let compact: String = raw
        .chars()
        .filter(|c| !c.is_whitespace() && !matches!(c, '·' | '⋅' | '*' | '×' | '{' | '}'))
        .collect::<String>()
        .replace('⁻', "-")
        .replace('¹', "1");
    let lower = compact.to_lowercase().replace('-', "");

    let words = |s: &str| -> Option<Unit> {
        Some(match s {
            "meterspersecond" | "metrespersecond" | "meterpersecond" | "metrepersecond" => Unit {
                dimension: Dimension::Speed,
                to_si: 1.0,
            },
            "kilometerspersecond" | "kilometrespersecond" | "kmpersecond" => Unit {
                dimension: Dimension::Speed,
                to_si: 1e3,
            },
            "jouleseconds" | "joulesecond" => Unit {
                dimension: Dimension::Action,
                to_si: 1.0,
            },
            "milespersecond" | "milepersecond" | "mi/s" => Unit {
                dimension: Dimension::Speed,
                to_si: 1609.344,
            },
            "hertz" => Unit {
                dimension: Dimension::Frequency,
                to_si: 1.0,
            },
            "meters" | "metres" | "meter" | "metre" => Unit {
                dimension: Dimension::Length,
                to_si: 1.0,
            },
            "nanometers" | "nanometres" | "nanometer" | "nanometre" => Unit {
                dimension: Dimension::Length,
                to_si: 1e-9,
            },
            _ => return None,
        })
    };
    if let Some(u) = words(&lower) {
        return Some(u);
    }

    // Speed: <prefix>m/s, <prefix>ms-1, km/h.
    if lower == "km/h" || lower == "kmh-1" {
        return Some(Unit {
            dimension: Dimension::Speed,
            to_si: 1.0 / 3.6,
        });
    }
    for suffix in ["m/s", "m/sec", "ms-1", "ms^-1"] {
        if let Some(p) = compact.strip_suffix(suffix) {
            return prefix_factor(p).map(|f| Unit {
                dimension: Dimension::Speed,
                to_si: f,
            });
        }
    }
    // Action: J s, eV s, J/Hz.
    match compact.as_str() {
        "Js" | "J/Hz" => {
            return Some(Unit {
                dimension: Dimension::Action,
                to_si: 1.0,
            })
        }
        "eVs" | "eV/Hz" => {
            return Some(Unit {
                dimension: Dimension::Action,
                to_si: ELECTRON_VOLT,
            })
        }
        "J" => {
            return Some(Unit {
                dimension: Dimension::Energy,
                to_si: 1.0,
            })
        }
        "s" => {
            return Some(Unit {
                dimension: Dimension::Time,
                to_si: 1.0,
            })
        }
        _ => {}
    }
    if let Some(p) = compact.strip_suffix("eV") {
        return prefix_factor(p).map(|f| Unit {
            dimension: Dimension::Energy,
            to_si: f * ELECTRON_VOLT,
        });
    }
    if let Some(p) = compact.strip_suffix("Hz") {
        return prefix_factor(p).map(|f| Unit {
            dimension: Dimension::Frequency,
            to_si: f,
        });
    }
    if let Some(p) = compact.strip_suffix('m') {
        return prefix_factor(p).map(|f| Unit {
            dimension: Dimension::Length,
            to_si: f,
        });
    }
    None
}

/// Converts `value` expressed in `from` into `to`, or `None` when the
/// dimensions differ.
pub fn convert(value: f64, from: Unit, to: Unit) -> Option<f64> {
    (from.dimension == to.dimension).then(|| value * from.to_si / to.to_si)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn si(raw: &str) -> (Dimension, f64) {
        let u = parse_unit(raw).unwrap_or_else(|| panic!("unparsed {raw}"));
        (u.dimension, u.to_si)
    }

    #[test]
    fn speeds() {
        assert_eq!(si("m/s"), (Dimension::Speed, 1.0));
        assert_eq!(si("km/s"), (Dimension::Speed, 1e3));
        assert_eq!(si("m s⁻¹"), (Dimension::Speed, 1.0));
        assert_eq!(si("m·s^-1"), (Dimension::Speed, 1.0));
        assert_eq!(si("meters per second"), (Dimension::Speed, 1.0));
    }

    #[test]
    fn action_and_energy() {
        assert_eq!(si("J·s"), (Dimension::Action, 1.0));
        assert_eq!(si("J s"), (Dimension::Action, 1.0));
        assert_eq!(si("Js"), (Dimension::Action, 1.0));
        assert_eq!(si("eV·s"), (Dimension::Action, ELECTRON_VOLT));
        assert_eq!(si("keV"), (Dimension::Energy, 1e3 * ELECTRON_VOLT));
    }

    #[test]
    fn prefixed_frequency_and_length() {
        assert_eq!(si("MHz"), (Dimension::Frequency, 1e6));
        assert_eq!(si("nm"), (Dimension::Length, 1e-9));
        assert_eq!(si("μm"), (Dimension::Length, 1e-6));
        assert_eq!(si("km"), (Dimension::Length, 1e3));
    }

    #[test]
    fn conversion_requires_same_dimension() {
        let kms = parse_unit("km/s").unwrap();
        let ms = parse_unit("m/s").unwrap();
        assert_eq!(convert(300_000.0, kms, ms), Some(3e8));
        assert_eq!(convert(1.0, parse_unit("Hz").unwrap(), ms), None);
    }

    #[test]
    fn unknown_units() {
        assert!(parse_unit("furlongs").is_none());
        assert!(parse_unit("xm").is_none());
    }
}
