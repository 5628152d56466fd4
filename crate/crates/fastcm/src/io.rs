//! Edge-list and parameter-file formats.
//!
//! Edge lists are whitespace- or comma-separated `src dst [weight]` lines.
//! `#`-prefixed comments are skipped, except for header hints written by
//! [`write_edgelist`] (`# nodes=N`, `# directed=true`, `# weighted=true`,
//! `# bipartite=P,Q`) which are honored on read so that write/read round
//! trips exactly. Cleanup on ingestion: self-loops are dropped, duplicate
//! pairs are merged (weights summed in weighted mode, deduplicated
//! otherwise), and non-integer weights are rounded to the nearest integer
//! with a warning.
//!
//! Node ids may be arbitrary strings. Files whose ids are all unsigned
//! integers keep them as-is (node count = max id + 1); otherwise ids are
//! assigned densely in order of first appearance and the caller should
//! emit the returned label table next to any derived outputs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{DegreeSequence, Edge, EdgeList, Params, StrengthSequence, UbcmParams, UecmParams};

/// An ingested network plus the label-to-id mapping and any cleanup notes.
#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub edges: EdgeList,
    /// Original label of each node id (labels[i] names node i).
    pub node_labels: Vec<String>,
    pub warnings: Vec<String>,
}

struct HeaderHints {
    nodes: Option<usize>,
    directed: bool,
    weighted: Option<bool>,
    bipartite: Option<(usize, usize)>,
}

fn parse_header_hint(line: &str, hints: &mut HeaderHints, line_no: usize) -> Result<()> {
    let body = line.trim_start_matches('#').trim();
    let Some((key, value)) = body.split_once('=') else {
        return Ok(()); // ordinary comment
    };
    let bad = |msg: String| Error::Parse {
        line: line_no,
        msg,
    };
    match key.trim() {
        "nodes" => {
            let n = value
                .trim()
                .parse::<usize>()
                .map_err(|e| bad(format!("bad nodes header: {e}")))?;
            hints.nodes = Some(n);
        }
        "directed" => hints.directed = value.trim() == "true",
        "weighted" => hints.weighted = Some(value.trim() == "true"),
        "bipartite" => {
            let (p, q) = value
                .trim()
                .split_once(',')
                .ok_or_else(|| bad("bipartite header needs P,Q".into()))?;
            let p = p.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let q = q.trim().parse().map_err(|e| bad(format!("{e}")))?;
            hints.bipartite = Some((p, q));
        }
        _ => {}
    }
    Ok(())
}

/// Reads an edge list. `weighted` selects how a third column and duplicate
/// pairs are treated: summed integer weights (weighted) or deduplicated
/// binary edges (unweighted). A `# weighted=` header written by
/// [`write_edgelist`] overrides the flag.
pub fn read_edgelist(path: &Path, weighted: bool) -> Result<LoadedNetwork> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut hints = HeaderHints {
        nodes: None,
        directed: false,
        weighted: None,
        bipartite: None,
    };
    let mut warnings = Vec::new();
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    let mut rounded = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            parse_header_hint(trimmed, &mut hints, line_no)?;
            continue;
        }
        let tokens: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let (src, dst, w) = match tokens.as_slice() {
            [s, d] => (*s, *d, 1.0),
            [s, d, w] => {
                let w: f64 = w.parse().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad weight {w:?}: {e}"),
                })?;
                (*s, *d, w)
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 2 or 3 fields, found {}", tokens.len()),
                })
            }
        };
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("negative or non-finite weight {w}"),
            });
        }
        let wi = w.round();
        if (wi - w).abs() > 0.0 {
            rounded += 1;
        }
        if wi < 1.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("weight {w} rounds below 1"),
            });
        }
        raw.push((src.to_string(), dst.to_string(), wi));
    }
    if rounded > 0 {
        warnings.push(format!(
            "{rounded} non-integer weight(s) rounded to the nearest integer"
        ));
    }

    let weighted = hints.weighted.unwrap_or(weighted);

    // numeric ids are kept as-is; anything else maps by first appearance
    let numeric = raw
        .iter()
        .all(|(s, d, _)| s.parse::<u32>().is_ok() && d.parse::<u32>().is_ok());
    let mut labels: Vec<String> = Vec::new();
    let mut pairs: Vec<(u32, u32, u64)> = Vec::with_capacity(raw.len());
    if numeric {
        let mut max_id = 0u32;
        for (s, d, w) in &raw {
            let a: u32 = s.parse().unwrap();
            let b: u32 = d.parse().unwrap();
            max_id = max_id.max(a).max(b);
            pairs.push((a, b, *w as u64));
        }
        let n = hints
            .nodes
            .unwrap_or(if raw.is_empty() { 0 } else { max_id as usize + 1 });
        labels.extend((0..n).map(|i| i.to_string()));
    } else {
        let mut index: HashMap<String, u32> = HashMap::new();
        for (s, d, w) in &raw {
            let mut id_of = |label: &str| -> u32 {
                *index.entry(label.to_string()).or_insert_with(|| {
                    labels.push(label.to_string());
                    (labels.len() - 1) as u32
                })
            };
            let a = id_of(s);
            let b = id_of(d);
            pairs.push((a, b, *w as u64));
        }
        if let Some(n) = hints.nodes {
            while labels.len() < n {
                labels.push(labels.len().to_string());
            }
        }
    }
    let n_nodes = hints.nodes.unwrap_or(labels.len()).max(labels.len());

    let mut self_loops = 0usize;
    let mut merged: HashMap<(u32, u32), u64> = HashMap::new();
    for (a, b, w) in pairs {
        if a == b {
            self_loops += 1;
            continue;
        }
        let key = if hints.directed || a < b { (a, b) } else { (b, a) };
        let slot = merged.entry(key).or_insert(0);
        if weighted {
            *slot += w;
        } else {
            *slot = 1;
        }
    }
    if self_loops > 0 {
        warnings.push(format!("{self_loops} self-loop(s) dropped"));
    }
    let mut edges: Vec<Edge> = merged
        .into_iter()
        .map(|((src, dst), weight)| Edge { src, dst, weight })
        .collect();
    edges.sort_unstable_by_key(|e| (e.src, e.dst));

    let edges = EdgeList::new(n_nodes, edges, hints.directed, weighted, hints.bipartite)?;
    Ok(LoadedNetwork {
        edges,
        node_labels: labels,
        warnings,
    })
}

/// Writes an edge list deterministically: header hints, then
/// `src<TAB>dst[<TAB>weight]` sorted by `(src, dst)`.
pub fn write_edgelist(edges: &EdgeList, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# nodes={}", edges.n_nodes())?;
    if edges.is_directed() {
        writeln!(out, "# directed=true")?;
    }
    if edges.is_weighted() {
        writeln!(out, "# weighted=true")?;
    }
    if let Some((p, q)) = edges.bipartite() {
        writeln!(out, "# bipartite={p},{q}")?;
    }
    for e in edges.sorted_edges() {
        if edges.is_weighted() {
            writeln!(out, "{}\t{}\t{}", e.src, e.dst, e.weight)?;
        } else {
            writeln!(out, "{}\t{}", e.src, e.dst)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the node-label table (`id,label` per line).
pub fn write_label_map(labels: &[String], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "id,label")?;
    for (i, label) in labels.iter().enumerate() {
        writeln!(out, "{i},{label}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes fitted parameters as columnar text: header `node,alpha` or
/// `node,alpha,beta`, one record per node.
pub fn write_params(params: &Params, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match params {
        Params::Ubcm(p) => {
            writeln!(out, "node,alpha")?;
            for (i, a) in p.alpha().iter().enumerate() {
                writeln!(out, "{i},{a}")?;
            }
        }
        Params::Uecm(p) => {
            writeln!(out, "node,alpha,beta")?;
            for (i, (a, b)) in p.alpha().iter().zip(p.beta()).enumerate() {
                writeln!(out, "{i},{a},{b}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a parameter file written by [`write_params`]; the model kind is
/// inferred from the header.
pub fn read_params(path: &Path) -> Result<Params> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let t = line.trim();
                if !t.is_empty() {
                    break t.to_string();
                }
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty parameter file".into(),
                })
            }
        }
    };
    let with_beta = match header.as_str() {
        "node,alpha" => false,
        "node,alpha,beta" => true,
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unrecognized header {other:?}"),
            })
        }
    };
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        let expect = if with_beta { 3 } else { 2 };
        if fields.len() != expect {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {expect} fields, found {}", fields.len()),
            });
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad float {s:?}: {e}"),
            })
        };
        let node: usize = fields[0].parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad node id {:?}: {e}", fields[0]),
        })?;
        let alpha = parse_f(fields[1])?;
        let beta = if with_beta { parse_f(fields[2])? } else { 0.0 };
        rows.push((node, alpha, beta));
    }
    rows.sort_unstable_by_key(|r| r.0);
    for (expect, row) in rows.iter().enumerate() {
        if row.0 != expect {
            return Err(Error::Parse {
                line: 0,
                msg: format!("node ids must cover 0..N-1; missing or duplicate id near {expect}"),
            });
        }
    }
    let alpha: Vec<f64> = rows.iter().map(|r| r.1).collect();
    if with_beta {
        let beta: Vec<f64> = rows.iter().map(|r| r.2).collect();
        Ok(Params::Uecm(UecmParams::new(alpha, beta)?))
    } else {
        Ok(Params::Ubcm(UbcmParams::new(alpha)?))
    }
}

/// Writes a degree (or any per-node real) sequence, one value per line.
pub fn write_sequence(values: &[f64], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a per-node real sequence (one value per line, `#` comments).
pub fn read_sequence(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut values = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|e| Error::Parse {
            line: idx + 1,
            msg: format!("bad value {t:?}: {e}"),
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Convenience: degree (and, when weighted, strength) targets from a file
/// that is either an edge list or a bare sequence.
pub fn degrees_from_edgelist(net: &LoadedNetwork) -> (DegreeSequence, StrengthSequence) {
    crate::metrics::degree_and_strength(&net.edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn write_tmp(dir: &TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn parses_plain_pairs() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.txt", "0 1\n1 2\n");
        let net = read_edgelist(&p, false).unwrap();
        assert_eq!(net.edges.n_edges(), 2);
        assert_eq!(net.edges.n_nodes(), 3);
        assert!(!net.edges.is_weighted());
    }

    #[test]
    fn drops_self_loops() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.txt", "0 0\n0 1\n");
        let net = read_edgelist(&p, false).unwrap();
        assert_eq!(net.edges.n_edges(), 1);
        assert!(net.warnings.iter().any(|w| w.contains("self-loop")));
    }

    #[test]
    fn rounds_weights_with_warning() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.txt", "0 1 2.6\n");
        let net = read_edgelist(&p, true).unwrap();
        assert_eq!(net.edges.edges()[0].weight, 3);
        assert!(net.warnings.iter().any(|w| w.contains("rounded")));
    }

    #[test]
    fn merges_duplicates_by_mode() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.txt", "0 1 2\n1 0 3\n");
        let net = read_edgelist(&p, true).unwrap();
        assert_eq!(net.edges.edges()[0].weight, 5);
        let net = read_edgelist(&p, false).unwrap();
        assert_eq!(net.edges.n_edges(), 1);
        assert_eq!(net.edges.edges()[0].weight, 1);
    }

    #[test]
    fn rejects_bad_lines_with_line_numbers() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.txt", "0 1\nx\n");
        match read_edgelist(&p, false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let p = write_tmp(&dir, "b.txt", "0 1 -2\n");
        assert!(read_edgelist(&p, true).is_err());
        let p = write_tmp(&dir, "c.txt", "0 1 0.2\n");
        assert!(read_edgelist(&p, true).is_err());
    }

    #[test]
    fn comma_and_label_inputs() {
        let dir = TempDir::new().unwrap();
        let p = write_tmp(&dir, "a.csv", "alice,bob\nbob,carol,2\n");
        let net = read_edgelist(&p, true).unwrap();
        assert_eq!(net.node_labels, vec!["alice", "bob", "carol"]);
        assert_eq!(net.edges.n_nodes(), 3);
    }

    #[test]
    fn roundtrip_preserves_everything() {
        let dir = TempDir::new().unwrap();
        let edges = vec![
            Edge {
                src: 1,
                dst: 2,
                weight: 3,
            },
            Edge {
                src: 0,
                dst: 4,
                weight: 1,
            },
        ];
        let el = EdgeList::new(6, edges, false, true, None).unwrap();
        let p = dir.path().join("rt.tsv");
        write_edgelist(&el, &p).unwrap();
        let back = read_edgelist(&p, false).unwrap();
        // node 5 is isolated; the nodes header restores it, and the
        // weighted header overrides the flag passed to the reader
        assert_eq!(back.edges.n_nodes(), 6);
        assert_eq!(back.edges.sorted_edges(), el.sorted_edges());
        assert!(back.edges.is_weighted());
    }

    #[test]
    fn empty_list_roundtrip() {
        let dir = TempDir::new().unwrap();
        let el = EdgeList::new(4, Vec::new(), false, false, None).unwrap();
        let p = dir.path().join("empty.tsv");
        write_edgelist(&el, &p).unwrap();
        let content = std::fs::read_to_string(&p).unwrap();
        assert_eq!(content, "# nodes=4\n");
        let back = read_edgelist(&p, false).unwrap();
        assert_eq!(back.edges.n_nodes(), 4);
        assert_eq!(back.edges.n_edges(), 0);
    }

    #[test]
    fn params_roundtrip_including_sentinels() {
        let dir = TempDir::new().unwrap();
        let p = dir.path().join("params.csv");
        let params = Params::Ubcm(
            UbcmParams::new(vec![0.25, -1.5, f64::INFINITY, 3.0e-9]).unwrap(),
        );
        write_params(&params, &p).unwrap();
        assert_eq!(read_params(&p).unwrap(), params);

        let params = Params::Uecm(
            UecmParams::new(vec![0.1, -0.2, 0.3], vec![1.0, 0.5, 2.0]).unwrap(),
        );
        write_params(&params, &p).unwrap();
        assert_eq!(read_params(&p).unwrap(), params);
    }

    #[test]
    fn directed_roundtrip() {
        let dir = TempDir::new().unwrap();
        let edges = vec![
            Edge {
                src: 2,
                dst: 0,
                weight: 1,
            },
            Edge {
                src: 0,
                dst: 2,
                weight: 1,
            },
        ];
        let el = EdgeList::new(3, edges, true, false, None).unwrap();
        let p = dir.path().join("d.tsv");
        write_edgelist(&el, &p).unwrap();
        let back = read_edgelist(&p, false).unwrap();
        assert!(back.edges.is_directed());
        assert_eq!(back.edges.sorted_edges(), el.sorted_edges());
    }
}
