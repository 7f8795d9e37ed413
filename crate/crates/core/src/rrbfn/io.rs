//! Plain-text model files.
//!
//! ```text
//! rrbfn v1 input=2 hidden=3 output=1 activations=logistic-sigmoid,gaussian,linear seed=7 width_init=1 recurrent_std=0.5 output_init=0.5
//! recurrent 2
//! 0.25 -0.5
//! layer1.centers 3 2
//! 0.1 0.2
//! ...
//! layer1.widths 3
//! ...
//! output.weights 3
//! ...
//! output.bias 1
//! 0
//! end
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a saved model
//! reads back bit-for-bit.

use std::io::{self, Write};

use super::model::{GaussianLayer, RrbfnConfig, RrbfnModel};
use super::ActivationKind;
use crate::error::{CacError, Result};

pub const FORMAT_VERSION: &str = "v1";

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            out.write_all(b" ")?;
        }
        write!(out, "{v:?}")?;
        first = false;
    }
    out.write_all(b"\n")
}

pub fn write_model<W: Write>(model: &RrbfnModel, mut out: W) -> io::Result<()> {
    let cfg = &model.config;
    let hidden: Vec<String> = cfg.hidden.iter().map(usize::to_string).collect();
    let mut acts = vec![ActivationKind::LogisticSigmoid.label()];
    acts.extend(std::iter::repeat_n(ActivationKind::Gaussian.label(), cfg.hidden.len()));
    acts.push(ActivationKind::Linear.label());
    writeln!(
        out,
        "rrbfn {FORMAT_VERSION} input={} hidden={} output=1 activations={} seed={} width_init={:?} recurrent_std={:?} output_init={:?}",
        cfg.input_size,
        hidden.join(","),
        acts.join(","),
        model.seed,
        cfg.width_init,
        cfg.recurrent_std,
        cfg.output_init
    )?;
    writeln!(out, "recurrent {}", model.recurrent.len())?;
    write_row(&mut out, &model.recurrent)?;
    for (i, layer) in model.layers.iter().enumerate() {
        writeln!(out, "layer{}.centers {} {}", i + 1, layer.units(), layer.dim)?;
        for u in 0..layer.units() {
            write_row(&mut out, layer.center(u))?;
        }
        writeln!(out, "layer{}.widths {}", i + 1, layer.units())?;
        write_row(&mut out, &layer.widths)?;
    }
    writeln!(out, "output.weights {}", model.output_weights.len())?;
    write_row(&mut out, &model.output_weights)?;
    writeln!(out, "output.bias 1")?;
    write_row(&mut out, &[model.output_bias])?;
    writeln!(out, "end")
}

/// Line cursor with 1-based line numbers for error messages.
pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    pub(crate) line: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    pub(crate) fn err(&self, message: impl Into<String>) -> CacError {
        CacError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    /// Next non-blank, non-comment line.
    pub(crate) fn next_line(&mut self) -> Result<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(t);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn values(&mut self, expected: usize) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let vals = line
            .split_whitespace()
            .map(|v| v.parse::<f64>().map_err(|e| self.err(format!("bad number `{v}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", vals.len())));
        }
        Ok(vals)
    }

    fn block(&mut self, name: &str, dims: &[usize]) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(name) {
            return Err(self.err(format!("expected block `{name}`, found `{line}`")));
        }
        let found: Vec<usize> = parts
            .map(|p| p.parse::<usize>().map_err(|e| self.err(format!("bad dimension `{p}`: {e}"))))
            .collect::<Result<_>>()?;
        if found != dims {
            return Err(self.err(format!("block `{name}` has dimensions {found:?}, expected {dims:?}")));
        }
        let (rows, cols) = match dims {
            [n] => (1, *n),
            [r, c] => (*r, *c),
            _ => unreachable!("blocks are one- or two-dimensional"),
        };
        let mut out = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            out.extend(self.values(cols)?);
        }
        Ok(out)
    }
}

pub(crate) fn header_fields(line: &str) -> impl Iterator<Item = (&str, &str)> {
    line.split_whitespace().filter_map(|kv| kv.split_once('='))
}

pub(crate) fn parse_model(lines: &mut Lines<'_>) -> Result<RrbfnModel> {
    let header = lines.next_line()?;
    let mut words = header.split_whitespace();
    if words.next() != Some("rrbfn") {
        return Err(lines.err("missing `rrbfn` header"));
    }
    if words.next() != Some(FORMAT_VERSION) {
        return Err(lines.err(format!("unsupported model format version (expected {FORMAT_VERSION})")));
    }
    let mut cfg = RrbfnConfig::new(0, Vec::new());
    let mut seed = 0;
    for (k, v) in header_fields(header) {
        let bad = |e: &dyn std::fmt::Display| lines.err(format!("bad header field `{k}={v}`: {e}"));
        match k {
            "input" => cfg.input_size = v.parse().map_err(|e| bad(&e))?,
            "hidden" => {
                cfg.hidden = v
                    .split(',')
                    .map(|h| h.parse::<usize>().map_err(|e| bad(&e)))
                    .collect::<Result<_>>()?
            }
            "output" if v != "1" => return Err(lines.err("only single-output models are supported")),
            "activations" => {
                for a in v.split(',') {
                    a.parse::<ActivationKind>().map_err(|e| bad(&e))?;
                }
            }
            "seed" => seed = v.parse().map_err(|e| bad(&e))?,
            "width_init" => cfg.width_init = v.parse().map_err(|e| bad(&e))?,
            "recurrent_std" => cfg.recurrent_std = v.parse().map_err(|e| bad(&e))?,
            "output_init" => cfg.output_init = v.parse().map_err(|e| bad(&e))?,
            _ => {}
        }
    }
    let recurrent = lines.block("recurrent", &[cfg.input_size])?;
    let mut layers = Vec::with_capacity(cfg.hidden.len());
    let mut dim = cfg.input_size;
    for (i, &units) in cfg.hidden.iter().enumerate() {
        let centers = lines.block(&format!("layer{}.centers", i + 1), &[units, dim])?;
        let widths = lines.block(&format!("layer{}.widths", i + 1), &[units])?;
        layers.push(GaussianLayer { dim, centers, widths });
        dim = units;
    }
    let output_weights = lines.block("output.weights", &[dim])?;
    let output_bias = lines.block("output.bias", &[1])?[0];
    if lines.next_line()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    RrbfnModel::from_parts(cfg, seed, recurrent, layers, output_weights, output_bias)
}

pub fn read_model(text: &str) -> Result<RrbfnModel> {
    parse_model(&mut Lines::new(text))
}
