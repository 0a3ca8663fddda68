//! Input parsing: rational JSON, builtin functions, CSV sample tables.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context};
use hardy_tubes::approx::SampledFunction;
use hardy_tubes::json::RationalJson;
use hardy_tubes::{Complex64, SeparableRational};

/// Reads a rational from a file path or stdin (`-`).
pub fn read_rational(input: &str) -> anyhow::Result<SeparableRational> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    let wire: RationalJson =
        serde_json::from_str(&text).with_context(|| "parsing rational JSON")?;
    Ok(wire.into_rational()?)
}

/// `"1,-0.5"` into a vector of floats.
pub fn parse_f64_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("parsing number {t:?}"))
        })
        .collect()
}

pub fn parse_u32_list(text: &str) -> anyhow::Result<Vec<u32>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .with_context(|| format!("parsing integer {t:?}"))
        })
        .collect()
}

/// `builtin:<name>` or `csv:<path>` into a sampled function.
pub fn read_function(spec: &str, n: usize) -> anyhow::Result<SampledFunction> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return match name {
            "gaussian" => Ok(SampledFunction::gaussian(n)),
            "bump" => Ok(SampledFunction::bump(n)),
            "sinc-squared" => Ok(SampledFunction::sinc_squared(n)),
            other => bail!("unknown builtin function {other:?}"),
        };
    }
    if let Some(path) = spec.strip_prefix("csv:") {
        return read_csv(Path::new(path));
    }
    bail!("function spec must be builtin:<name> or csv:<path>, got {spec:?}")
}

/// CSV with header `x1,...,xn,value`, one sample per row.
fn read_csv(path: &Path) -> anyhow::Result<SampledFunction> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("csv is empty")?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols.last() != Some(&"value") {
        bail!("csv header must be x1,...,xn,value");
    }
    let n = cols.len() - 1;
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n + 1 {
            bail!("csv row {} has {} fields, expected {}", row + 2, fields.len(), n + 1);
        }
        let mut pt = Vec::with_capacity(n);
        for f in &fields[..n] {
            pt.push(f.parse::<f64>().with_context(|| format!("csv row {}", row + 2))?);
        }
        points.push(pt);
        values.push(Complex64::new(
            fields[n]
                .parse::<f64>()
                .with_context(|| format!("csv row {}", row + 2))?,
            0.0,
        ));
    }
    Ok(SampledFunction::from_samples(n, points, values)?)
}

/// Pole matrix "1,-1;2,-2": one row per variable.
pub fn parse_pole_matrix(text: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    text.split(';').map(parse_f64_list).collect()
}
