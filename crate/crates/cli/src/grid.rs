//! Parameter grids: `a:b:step`, `a:b:xN`, comma lists and single values.

use crate::error::CliError;

fn number(text: &str, what: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let v = match t {
        "pi" => std::f64::consts::PI,
        "pi/2" => std::f64::consts::FRAC_PI_2,
        _ => t
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("{what}: '{t}' is not a number")))?,
    };
    if !v.is_finite() {
        return Err(CliError::Config(format!("{what}: '{t}' is not finite")));
    }
    Ok(v)
}

/// Parses a real grid. `a:b:step` includes both ends when `step` divides the
/// span; `a:b:xN` gives `N` evenly spaced points.
pub fn parse_range(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|p| number(p, what))
            .collect::<Result<Vec<_>, _>>()?,
        [a, b, step] => {
            let (a, b) = (number(a, what)?, number(b, what)?);
            let step = step.trim();
            if let Some(count) = step.strip_prefix('x') {
                let n: usize = count
                    .parse()
                    .map_err(|_| CliError::Config(format!("{what}: bad point count '{count}'")))?;
                match n {
                    0 => Vec::new(),
                    1 => vec![a],
                    _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                }
            } else {
                let h = number(step, what)?;
                if !(h > 0.0) || b < a {
                    return Err(CliError::Config(format!(
                        "{what}: need a <= b and step > 0 in '{text}'"
                    )));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                if n > 10_000_000 {
                    return Err(CliError::Config(format!("{what}: '{text}' has too many points")));
                }
                // a + i·h rather than repeated addition keeps grid points exact.
                (0..=n).map(|i| a + h * i as f64).collect()
            }
        }
        _ => {
            return Err(CliError::Config(format!(
                "{what}: expected 'a:b:step', 'a:b:xN' or a list, got '{text}'"
            )))
        }
    };
    if values.is_empty() {
        return Err(CliError::Config(format!("{what}: grid '{text}' is empty")));
    }
    Ok(values)
}

pub fn parse_levels(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.parse().map_err(|_| bad_level(part))?;
            let hi: usize = hi.trim_start_matches('=').parse().map_err(|_| bad_level(part))?;
            if hi < lo {
                return Err(bad_level(part));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad_level(part))?);
        }
    }
    Ok(out)
}

fn bad_level(part: &str) -> CliError {
    CliError::Config(format!("levels: '{part}' is not a level or range n1..n2"))
}
