//! Model files: a feature-map header followed by the network.
//!
//! ```text
//! fncac v1 rats=3 classes=type1,type2,type3 features=occ1,occ2,occ3,type1,type2,type3,utilization,cost cost_normalizer=3.0
//! rat 1 17 1.0
//! rat 2 17 0.4
//! rat 3 16 0.6
//! oracle 2
//! 0.1 1 2 3
//! 0.9 1 3 8
//! rrbfn v1 input=8 ...
//! ...
//! end
//! ```

use std::io::{self, Write};

use super::{cost_normalizer, FeatureVector, FncacModel, NetworkEnvironment, RatDescriptor};
use crate::error::Result;
use crate::policy::{ThresholdSchedule, ThresholdSet};
use crate::rrbfn::io::{header_fields, parse_model, Lines};
use crate::rrbfn::write_model;
use crate::traffic::NUM_CLASSES;

pub const FNCAC_FORMAT_VERSION: &str = "v1";

fn class_order() -> String {
    (1..=NUM_CLASSES).map(|k| format!("type{k}")).collect::<Vec<_>>().join(",")
}

pub fn write_fncac<W: Write>(model: &FncacModel, mut out: W) -> io::Result<()> {
    let k = model.env.rats.len();
    writeln!(
        out,
        "fncac {FNCAC_FORMAT_VERSION} rats={k} classes={} features={} cost_normalizer={:?}",
        class_order(),
        FeatureVector::names(k).join(","),
        cost_normalizer(&model.env)
    )?;
    for r in &model.env.rats {
        writeln!(out, "rat {} {} {:?}", r.id, r.capacity, r.cost_per_channel)?;
    }
    let levels = model.oracle.as_ref().map_or(&[][..], |s| &s.levels[..]);
    writeln!(out, "oracle {}", levels.len())?;
    for (a, t) in levels {
        writeln!(out, "{a:?} {} {} {}", t.a1, t.a2, t.a3)?;
    }
    write_model(&model.network, out)
}

pub fn read_fncac(text: &str) -> Result<FncacModel> {
    let mut lines = Lines::new(text);
    let header = lines.next_line()?;
    let mut words = header.split_whitespace();
    if words.next() != Some("fncac") {
        return Err(lines.err("missing `fncac` header"));
    }
    if words.next() != Some(FNCAC_FORMAT_VERSION) {
        return Err(lines.err(format!("unsupported fncac format version (expected {FNCAC_FORMAT_VERSION})")));
    }
    let mut rats = None;
    let mut normalizer = None;
    let mut features = None;
    for (key, v) in header_fields(header) {
        match key {
            "rats" => rats = Some(v.parse::<usize>().map_err(|e| lines.err(format!("bad RAT count `{v}`: {e}")))?),
            "classes" if v != class_order() => {
                return Err(lines.err(format!("unsupported class encoding order `{v}`")));
            }
            "features" => features = Some(v.to_string()),
            "cost_normalizer" => {
                normalizer = Some(v.parse::<f64>().map_err(|e| lines.err(format!("bad cost normalizer `{v}`: {e}")))?)
            }
            _ => {}
        }
    }
    let rats = rats.filter(|&n| n > 0).ok_or_else(|| lines.err("header needs rats=<count>"))?;
    if features.is_some_and(|f| f != FeatureVector::names(rats).join(",")) {
        return Err(lines.err("feature list does not match the RAT count"));
    }
    let mut descriptors = Vec::with_capacity(rats);
    for _ in 0..rats {
        let line = lines.next_line()?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parsed = match parts[..] {
            ["rat", id, cap, cost] => id
                .parse()
                .ok()
                .zip(cap.parse().ok())
                .zip(cost.parse().ok())
                .map(|((id, capacity), cost_per_channel)| RatDescriptor {
                    id,
                    capacity,
                    current_load: 0,
                    cost_per_channel,
                }),
            _ => None,
        };
        descriptors.push(parsed.ok_or_else(|| lines.err(format!("expected `rat <id> <capacity> <cost>`, found `{line}`")))?);
    }
    let env = NetworkEnvironment::new(descriptors).map_err(|e| lines.err(e.to_string()))?;
    if normalizer.is_some_and(|n| n != cost_normalizer(&env)) {
        return Err(lines.err("cost normalizer does not match the RAT costs"));
    }

    let line = lines.next_line()?;
    let count = line
        .strip_prefix("oracle ")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| lines.err(format!("expected `oracle <levels>`, found `{line}`")))?;
    let mut levels = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines.next_line()?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let level = match parts[..] {
            [a, a1, a2, a3] => a.parse::<f64>().ok().zip(
                a1.parse()
                    .ok()
                    .zip(a2.parse().ok())
                    .zip(a3.parse().ok())
                    .and_then(|((a1, a2), a3)| ThresholdSet::new(a1, a2, a3).ok()),
            ),
            _ => None,
        };
        levels.push(level.ok_or_else(|| lines.err(format!("expected `<a> <A1> <A2> <A3>`, found `{line}`")))?);
    }
    let oracle = (count > 0).then_some(ThresholdSchedule { levels });

    let network = parse_model(&mut lines)?;
    let arity = FeatureVector::arity(rats);
    if network.input_size() != arity {
        return Err(crate::CacError::ArityMismatch {
            expected: arity,
            actual: network.input_size(),
        });
    }
    Ok(FncacModel { env, network, oracle })
}
