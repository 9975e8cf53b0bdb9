//! Plain-text serialization.
//!
//! Every format is line-oriented UTF-8, deterministic, and roundtrips `f64`
//! values exactly (shortest decimal representation, re-parsed with
//! `f64::from_str`). Deterministic output matters beyond diffing: the
//! experiment harness keys its front cache on a content hash of the model
//! text.
//!
//! Model format (`momdp v1`):
//!
//! ```text
//! momdp v1
//! states 2
//! actions 2
//! objectives 1
//! gamma 0.9
//! nu0 1 0
//! reward 0 0 1
//! ...
//! transition 0 0 1 0.5
//! ...
//! end
//! ```
//!
//! `reward s a r_1..r_d` lines cover every state-action pair in order;
//! `transition s a s' p` lines list nonzero masses only, in row order.

use crate::envs::LayoutMeta;
use crate::momdp::{MomdpError, ReturnVector, TabularMOMDP};
use crate::pareto::{ParetoError, ParetoFront};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Momdp(#[from] MomdpError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
}

fn parse<T: std::str::FromStr>(token: &str, what: &str) -> Result<T, IoError> {
    token
        .parse()
        .map_err(|_| IoError::Parse(format!("bad {what}: {token:?}")))
}

/// Serializes a model to the `momdp v1` text format.
pub fn write_momdp(m: &TabularMOMDP) -> String {
    let mut out = String::new();
    out.push_str("momdp v1\n");
    let _ = writeln!(out, "states {}", m.num_states());
    let _ = writeln!(out, "actions {}", m.num_actions());
    let _ = writeln!(out, "objectives {}", m.num_objectives());
    let _ = writeln!(out, "gamma {}", m.gamma());
    out.push_str("nu0");
    for p in m.initial_dist() {
        let _ = write!(out, " {p}");
    }
    out.push('\n');
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            let _ = write!(out, "reward {s} {a}");
            for r in m.reward(s, a) {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
    }
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            for &(sp, p) in m.successors(s, a) {
                let _ = writeln!(out, "transition {s} {a} {sp} {p}");
            }
        }
    }
    out.push_str("end\n");
    out
}

/// Parses the `momdp v1` text format; all model invariants are re-validated.
pub fn read_momdp(text: &str) -> Result<TabularMOMDP, IoError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty input".into()))?;
    if header.trim() != "momdp v1" {
        return Err(IoError::Parse(format!("unknown header {header:?}")));
    }

    let mut n = None;
    let mut na = None;
    let mut d = None;
    let mut gamma = None;
    let mut nu0: Option<Vec<f64>> = None;
    let mut rewards: Vec<((usize, usize), Vec<f64>)> = Vec::new();
    let mut transitions: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut ended = false;
    for line in lines {
        if ended {
            return Err(IoError::Parse("content after end".into()));
        }
        let mut tok = line.split_whitespace();
        let key = tok.next().expect("non-empty line");
        let rest: Vec<&str> = tok.collect();
        match key {
            "states" => n = Some(parse::<usize>(one(&rest)?, "states")?),
            "actions" => na = Some(parse::<usize>(one(&rest)?, "actions")?),
            "objectives" => d = Some(parse::<usize>(one(&rest)?, "objectives")?),
            "gamma" => gamma = Some(parse::<f64>(one(&rest)?, "gamma")?),
            "nu0" => {
                nu0 = Some(
                    rest.iter()
                        .map(|t| parse::<f64>(t, "nu0 entry"))
                        .collect::<Result<_, _>>()?,
                )
            }
            "reward" => {
                if rest.len() < 2 {
                    return Err(IoError::Parse(format!("short reward line {line:?}")));
                }
                let s = parse::<usize>(rest[0], "state")?;
                let a = parse::<usize>(rest[1], "action")?;
                let vals = rest[2..]
                    .iter()
                    .map(|t| parse::<f64>(t, "reward entry"))
                    .collect::<Result<_, _>>()?;
                rewards.push(((s, a), vals));
            }
            "transition" => {
                if rest.len() != 4 {
                    return Err(IoError::Parse(format!("bad transition line {line:?}")));
                }
                transitions.push((
                    parse(rest[0], "state")?,
                    parse(rest[1], "action")?,
                    parse(rest[2], "next state")?,
                    parse(rest[3], "probability")?,
                ));
            }
            "end" => ended = true,
            _ => return Err(IoError::Parse(format!("unknown key {key:?}"))),
        }
    }
    if !ended {
        return Err(IoError::Parse("missing end marker".into()));
    }
    let n = n.ok_or_else(|| IoError::Parse("missing states".into()))?;
    let na = na.ok_or_else(|| IoError::Parse("missing actions".into()))?;
    let d = d.ok_or_else(|| IoError::Parse("missing objectives".into()))?;
    let gamma = gamma.ok_or_else(|| IoError::Parse("missing gamma".into()))?;
    let nu0 = nu0.ok_or_else(|| IoError::Parse("missing nu0".into()))?;

    let mut reward_flat = vec![0.0; n * na * d];
    let mut seen = vec![false; n * na];
    for ((s, a), vals) in rewards {
        if s >= n || a >= na || vals.len() != d {
            return Err(IoError::Parse(format!("reward line out of shape at ({s}, {a})")));
        }
        reward_flat[(s * na + a) * d..(s * na + a + 1) * d].copy_from_slice(&vals);
        seen[s * na + a] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(IoError::Parse("missing reward lines".into()));
    }
    let mut trans_flat = vec![0.0; n * na * n];
    for (s, a, sp, p) in transitions {
        if s >= n || a >= na || sp >= n {
            return Err(IoError::Parse(format!(
                "transition indices out of range: {s} {a} {sp}"
            )));
        }
        trans_flat[(s * na + a) * n + sp] = p;
    }
    Ok(TabularMOMDP::new(n, na, d, gamma, nu0, trans_flat, reward_flat)?)
}

fn one<'a>(rest: &[&'a str]) -> Result<&'a str, IoError> {
    if rest.len() == 1 {
        Ok(rest[0])
    } else {
        Err(IoError::Parse(format!("expected one token, got {rest:?}")))
    }
}

/// Layout sidecar: `coord s x y` per grid state and `group name s...` lines.
pub fn write_layout(layout: &LayoutMeta) -> String {
    let mut out = String::from("layout v1\n");
    for (s, c) in layout.coords.iter().enumerate() {
        if let Some((x, y)) = c {
            let _ = writeln!(out, "coord {s} {x} {y}");
        }
    }
    for (name, states) in &layout.groups {
        let _ = write!(out, "group {name}");
        for s in states {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

/// Parses a layout sidecar. `num_states` sizes the coordinate table.
pub fn read_layout(text: &str, num_states: usize) -> Result<LayoutMeta, IoError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty input".into()))?;
    if header.trim() != "layout v1" {
        return Err(IoError::Parse(format!("unknown header {header:?}")));
    }
    let mut layout = LayoutMeta {
        coords: vec![None; num_states],
        groups: Vec::new(),
    };
    for line in lines {
        let mut tok = line.split_whitespace();
        let key = tok.next().expect("non-empty line");
        let rest: Vec<&str> = tok.collect();
        match key {
            "coord" => {
                if rest.len() != 3 {
                    return Err(IoError::Parse(format!("bad coord line {line:?}")));
                }
                let s = parse::<usize>(rest[0], "state")?;
                if s >= num_states {
                    return Err(IoError::Parse(format!("coord state {s} out of range")));
                }
                layout.coords[s] =
                    Some((parse(rest[1], "x coordinate")?, parse(rest[2], "y coordinate")?));
            }
            "group" => {
                if rest.is_empty() {
                    return Err(IoError::Parse("group line without name".into()));
                }
                let states = rest[1..]
                    .iter()
                    .map(|t| parse::<usize>(t, "group state"))
                    .collect::<Result<_, _>>()?;
                layout.groups.push((rest[0].to_string(), states));
            }
            "end" => break,
            _ => return Err(IoError::Parse(format!("unknown key {key:?}"))),
        }
    }
    Ok(layout)
}

/// Front CSV: header `J_1..J_d,w_1..w_d`, one vertex per row. Witness
/// policies are not serialized.
pub fn write_front(front: &ParetoFront) -> String {
    let d = front.num_objectives();
    let mut out = String::new();
    let js: Vec<String> = (1..=d).map(|i| format!("J_{i}")).collect();
    let ws: Vec<String> = (1..=d).map(|i| format!("w_{i}")).collect();
    let _ = writeln!(out, "{},{}", js.join(","), ws.join(","));
    for (v, w) in front.vertices.iter().zip(&front.supporting_weights) {
        let row: Vec<String> = v
            .values
            .iter()
            .chain(w.iter())
            .map(|x| x.to_string())
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Parses a front CSV written by [`write_front`]; front invariants are
/// re-validated on construction.
pub fn read_front(text: &str) -> Result<ParetoFront, IoError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty front".into()))?;
    let cols = header.split(',').count();
    if cols % 2 != 0 || cols == 0 || !header.starts_with("J_1") {
        return Err(IoError::Parse(format!("bad front header {header:?}")));
    }
    let d = cols / 2;
    let mut vertices = Vec::new();
    let mut weights = Vec::new();
    for line in lines {
        let vals = line
            .split(',')
            .map(|t| parse::<f64>(t.trim(), "front value"))
            .collect::<Result<Vec<f64>, _>>()?;
        if vals.len() != 2 * d {
            return Err(IoError::Parse(format!("bad front row {line:?}")));
        }
        vertices.push(ReturnVector {
            values: vals[..d].to_vec(),
        });
        weights.push(vals[d..].to_vec());
    }
    Ok(ParetoFront::new(vertices, weights, Vec::new())?)
}

/// Demonstration CSV with one `(who, step, state, action)` row per pair.
/// `who` is the expert index for identity-split data and the trajectory
/// index for anonymous data.
pub fn write_pairs_csv(groups: &[Vec<(usize, usize)>], who_column: &str) -> String {
    let mut out = format!("{who_column},step,state,action\n");
    for (who, pairs) in groups.iter().enumerate() {
        for (step, (s, a)) in pairs.iter().enumerate() {
            let _ = writeln!(out, "{who},{step},{s},{a}");
        }
    }
    out
}

/// Parses [`write_pairs_csv`] output back into per-group pair lists.
pub fn read_pairs_csv(text: &str) -> Result<Vec<Vec<(usize, usize)>>, IoError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty csv".into()))?;
    if header.split(',').count() != 4 {
        return Err(IoError::Parse(format!("bad pairs header {header:?}")));
    }
    let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
    for line in lines {
        let tok: Vec<&str> = line.split(',').collect();
        if tok.len() != 4 {
            return Err(IoError::Parse(format!("bad pairs row {line:?}")));
        }
        let who = parse::<usize>(tok[0], "group index")?;
        let step = parse::<usize>(tok[1], "step")?;
        let s = parse::<usize>(tok[2], "state")?;
        let a = parse::<usize>(tok[3], "action")?;
        while groups.len() <= who {
            groups.push(Vec::new());
        }
        if groups[who].len() != step {
            return Err(IoError::Parse(format!(
                "non-contiguous steps for group {who} at {line:?}"
            )));
        }
        groups[who].push((s, a));
    }
    Ok(groups)
}

/// Gain matrix as text: `controller 4 12` header, then one row per line.
pub fn write_controller(k: &crate::lqr::GainMatrix) -> String {
    let mut out = String::from("controller 4 12\n");
    for i in 0..4 {
        let row: Vec<String> = (0..12).map(|j| k[(i, j)].to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses [`write_controller`] output.
pub fn read_controller(text: &str) -> Result<crate::lqr::GainMatrix, IoError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty input".into()))?;
    if header.trim() != "controller 4 12" {
        return Err(IoError::Parse(format!("unknown header {header:?}")));
    }
    let mut k = crate::lqr::GainMatrix::zeros();
    for i in 0..4 {
        let line = lines
            .next()
            .ok_or_else(|| IoError::Parse(format!("missing controller row {i}")))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| parse::<f64>(t, "gain entry"))
            .collect::<Result<_, _>>()?;
        if vals.len() != 12 {
            return Err(IoError::Parse(format!("bad controller row {line:?}")));
        }
        for j in 0..12 {
            k[(i, j)] = vals[j];
        }
    }
    Ok(k)
}
