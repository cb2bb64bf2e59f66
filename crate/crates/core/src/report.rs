//! Serialization helpers and atomic report writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::Result;

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`
/// and `"nan"`, which plain JSON cannot represent.
pub mod extended {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(super::format_special(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => super::parse_special(&t).ok_or_else(|| de::Error::custom(format!("bad number {t:?}"))),
        }
    }
}

/// [`extended`] for `Option<f64>`.
pub mod extended_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::extended")] f64);

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Rational exponents as `"p/q"` strings (`"p"` when integral).
pub mod exponent_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::Exponent;

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&e.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(|_| de::Error::custom(format!("bad exponent {t:?}")))
    }
}

/// [`exponent_str`] for `Option<Exponent>`.
pub mod exponent_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Exponent;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::exponent_str")] Exponent);

    pub fn serialize<S: Serializer>(e: &Option<Exponent>, s: S) -> Result<S::Ok, S::Error> {
        e.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Exponent>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

fn format_special(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

fn parse_special(t: &str) -> Option<f64> {
    match t {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => None,
    }
}

/// Full-precision scientific notation, independent of locale.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format_special(x).to_string()
    }
}

/// Writes `contents` to `path` through a temporary sibling and a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders CSV rows (header first) into bytes.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Probe {
        #[serde(with = "extended")]
        x: f64,
        #[serde(with = "extended_opt")]
        y: Option<f64>,
        #[serde(with = "exponent_str")]
        e: crate::Exponent,
    }

    #[test]
    fn special_values_roundtrip() {
        let p = Probe { x: f64::INFINITY, y: Some(-2.5), e: crate::Exponent::new(-3, 6) };
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"x":"inf","y":-2.5,"e":"-1/2"}"#);
        assert_eq!(serde_json::from_str::<Probe>(&text).unwrap(), p);
    }

    #[test]
    fn scientific_formatting() {
        assert_eq!(sci(0.1), "1e-1");
        assert_eq!(sci(-1234.5), "-1.2345e3");
        assert_eq!(sci(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
