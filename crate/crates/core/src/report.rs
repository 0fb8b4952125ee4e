//! Ordered `key: value` reports with fixed numeric rendering.

use std::fmt;

/// Renders `x` with `digits` significant digits in plain decimal notation, falling back to
/// scientific notation for very large or very small magnitudes.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let exponent = x.abs().log10().floor() as i32;
    if (-6..15).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        let plain = format!("{x:.decimals$}");
        // rounding may carry into a new leading digit (9.99… -> 10.0…)
        let reparsed: f64 = plain.parse().unwrap_or(x);
        let new_exp = reparsed.abs().log10().floor() as i32;
        if new_exp > exponent && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{x:.decimals$}");
        }
        plain
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

/// Nine significant digits, the rendering used by every report field.
pub fn sig9(x: f64) -> String {
    format_sig(x, 9)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_real(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, sig9(value))
    }

    pub fn push_reals(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let rendered: Vec<String> = values.iter().map(|v| sig9(*v)).collect();
        self.push(key, rendered.join(","))
    }

    pub fn extend(&mut self, other: &Report) -> &mut Self {
        self.entries.extend(other.entries.iter().cloned());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}
