use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use suffdiv::bregman::{builtin, Generator, Tabulated};
use suffdiv::portfolio::Market;
use suffdiv::sufficiency::Divergence;
use suffdiv::ProbVec;

pub fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>> {
    serde_json::from_str(text).with_context(|| format!("{what}: expected a JSON array of numbers, got `{text}`"))
}

pub fn parse_prob(text: &str, what: &str) -> Result<ProbVec> {
    let v = parse_vector(text, what)?;
    ProbVec::new(v).with_context(|| format!("{what} is not a probability vector"))
}

/// Built-in generator name or `table:<file>` with a JSON object of knots.
pub fn load_generator(name: &str) -> Result<Arc<dyn Generator>> {
    let Some(path) = name.strip_prefix("table:") else {
        return Ok(builtin(name)?);
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading generator table {path}"))?;
    let knots: BTreeMap<String, f64> =
        serde_json::from_str(&text).with_context(|| format!("{path}: expected a JSON object of knots"))?;
    let stem = Path::new(path)
        .file_stem()
        .map_or_else(|| path.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Arc::new(Tabulated::from_map(stem, &knots)?))
}

pub fn load_divergence(name: &str) -> Result<Divergence> {
    match name.strip_prefix("bregman:") {
        Some(generator) => Ok(Divergence::bregman(load_generator(generator)?)),
        None => Ok(Divergence::by_name(name)?),
    }
}

/// Reads a market from CSV with header `prob,x1,...,xk`. Probabilities that
/// miss one by at most `1e-9` are renormalized.
pub fn load_market(path: &Path) -> Result<Market> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open market file {}", path.display()))?;

    let header = reader.headers().context("reading market header")?.clone();
    ensure!(header.len() >= 2, "market header needs `prob` and at least one relative column");
    ensure!(&header[0] == "prob", "first market column must be `prob`, found `{}`", &header[0]);
    for (i, name) in header.iter().enumerate().skip(1) {
        ensure!(name == format!("x{i}"), "market column {} must be `x{i}`, found `{name}`", i + 1);
    }

    let mut probs = Vec::new();
    let mut relatives = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let row = index + 1;
        let record = record.with_context(|| format!("market row {row} is malformed"))?;
        ensure!(record.len() == header.len(), "market row {row} has {} fields, expected {}", record.len(), header.len());
        let values = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("market row {row} has a non-numeric field"))?;
        if values.iter().any(|v| !v.is_finite()) {
            bail!("market row {row} has a non-finite value");
        }
        ensure!(values[0] >= 0.0, "market row {row} has a negative probability");
        ensure!(values[1..].iter().all(|&x| x >= 0.0), "market row {row} has a negative relative");
        ensure!(values[1..].iter().any(|&x| x > 0.0), "market row {row} has no positive relative");
        probs.push(values[0]);
        relatives.push(values[1..].to_vec());
    }
    ensure!(!relatives.is_empty(), "market file {} has no outcome rows", path.display());

    let total: f64 = probs.iter().sum();
    ensure!((total - 1.0).abs() <= 1e-9, "market probabilities sum to {total}, not 1");
    let probs = ProbVec::new(probs.into_iter().map(|p| p / total).collect())?;
    Ok(Market::new(relatives, probs)?)
}
