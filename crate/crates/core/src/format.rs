//! Number formatting shared by the CSV writers.

/// How floating-point cells are rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumberStyle {
    /// Shortest representation that parses back to the same `f64`.
    #[default]
    RoundTrip,
    /// Fixed four decimals, for side-by-side reading against published tables.
    Fixed4,
}

impl NumberStyle {
    pub fn number(self, value: f64) -> String {
        if value.is_nan() {
            return "null".to_string();
        }
        if value.is_infinite() {
            return if value > 0.0 { "inf" } else { "-inf" }.to_string();
        }
        match self {
            NumberStyle::RoundTrip => format!("{value}"),
            NumberStyle::Fixed4 => format!("{value:.4}"),
        }
    }

    /// Undefined values are written as `null`.
    pub fn optional(self, value: Option<f64>) -> String {
        value.map_or_else(|| "null".to_string(), |v| self.number(v))
    }
}

/// Serde helper serializing non-finite floats as the strings `"inf"`/`"-inf"`/`"nan"`.
pub(crate) mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if value.is_nan() {
            serializer.serialize_str("nan")
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
