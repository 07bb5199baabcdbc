//! Shared unit layer for human-readable quantity strings.
//!
//! Frequency suffixes are interpreted as ordinary (cyclic) frequencies and
//! converted to angular units, i.e. `"100 kHz"` parses to `2π × 10⁵` rad/s.
//! Bare numbers are taken to be already in SI base units (rad/s, m, s, ...).

use std::f64::consts::TAU;

use crate::error::{Error, Result};

fn split_value_suffix(s: &str) -> Result<(f64, &str)> {
    let s = s.trim();
    let idx = s
        .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .unwrap_or(s.len());
    // Guard against exponent letters being taken as a suffix start ("1e-3").
    let (num, suffix) = if idx > 0 && (s.as_bytes()[idx - 1] == b'e' || s.as_bytes()[idx - 1] == b'E')
    {
        let rest = &s[idx..];
        let j = rest
            .find(|c: char| !(c.is_ascii_digit() || "+-".contains(c)))
            .unwrap_or(rest.len());
        s.split_at(idx + j)
    } else {
        s.split_at(idx)
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("cannot parse number in {s:?}")))?;
    Ok((value, suffix.trim()))
}

/// Parse an angular frequency / rate. `"MHz"`-style suffixes mean 2π×value.
pub fn parse_angular_frequency(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let w = match suffix {
        "" | "rad/s" => v,
        "Hz" => TAU * v,
        "kHz" => TAU * v * 1e3,
        "MHz" => TAU * v * 1e6,
        "GHz" => TAU * v * 1e9,
        "THz" => TAU * v * 1e12,
        other => return Err(Error::parse(format!("unknown frequency unit {other:?}"))),
    };
    Ok(w)
}

/// Parse a length in metres.
pub fn parse_length(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let m = match suffix {
        "" | "m" => v,
        "km" => v * 1e3,
        "cm" => v * 1e-2,
        "mm" => v * 1e-3,
        "um" | "µm" => v * 1e-6,
        "nm" => v * 1e-9,
        other => return Err(Error::parse(format!("unknown length unit {other:?}"))),
    };
    Ok(m)
}

/// Parse a time in seconds.
pub fn parse_time(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let t = match suffix {
        "" | "s" => v,
        "ms" => v * 1e-3,
        "us" | "µs" => v * 1e-6,
        "ns" => v * 1e-9,
        "ps" => v * 1e-12,
        other => return Err(Error::parse(format!("unknown time unit {other:?}"))),
    };
    Ok(t)
}

/// Parse an area in m².
pub fn parse_area(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let a = match suffix {
        "" | "m2" | "m^2" => v,
        "cm2" | "cm^2" => v * 1e-4,
        "mm2" | "mm^2" => v * 1e-6,
        "um2" | "um^2" | "µm2" => v * 1e-12,
        other => return Err(Error::parse(format!("unknown area unit {other:?}"))),
    };
    Ok(a)
}

/// Parse a number density in 1/m³.
pub fn parse_density(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let d = match suffix {
        "" | "m-3" | "m^-3" | "1/m3" => v,
        "cm-3" | "cm^-3" | "1/cm3" => v * 1e6,
        other => return Err(Error::parse(format!("unknown density unit {other:?}"))),
    };
    Ok(d)
}

/// Parse an inverse length (spatial bandwidth) in 1/m.
pub fn parse_wavenumber(s: &str) -> Result<f64> {
    let (v, suffix) = split_value_suffix(s)?;
    let q = match suffix {
        "" | "1/m" | "m-1" | "m^-1" => v,
        "1/cm" | "cm-1" | "cm^-1" => v * 1e2,
        "1/um" | "um-1" | "um^-1" => v * 1e6,
        other => return Err(Error::parse(format!("unknown wavenumber unit {other:?}"))),
    };
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_suffixes_are_angular() {
        assert!((parse_angular_frequency("100 kHz").unwrap() - TAU * 1e5).abs() < 1e-6);
        assert!((parse_angular_frequency("20MHz").unwrap() - TAU * 2e7).abs() < 1e-2);
        assert_eq!(parse_angular_frequency("3.5").unwrap(), 3.5);
        assert_eq!(parse_angular_frequency("2.0 rad/s").unwrap(), 2.0);
    }

    #[test]
    fn scientific_notation_with_suffix() {
        assert!((parse_length("1e-5 m").unwrap() - 1e-5).abs() < 1e-20);
        assert!((parse_length("10 um").unwrap() - 1e-5).abs() < 1e-20);
        assert!((parse_time("0.1 us").unwrap() - 1e-7).abs() < 1e-20);
        assert!((parse_density("1e14 cm-3").unwrap() - 1e20).abs() < 1e5);
    }

    #[test]
    fn rejects_unknown_units() {
        assert!(parse_length("1 furlong").is_err());
        assert!(parse_angular_frequency("7 parsec").is_err());
    }
}
