//! Reader and writer for the multi-file plain-text graph dataset layout:
//! `NAME_A.txt` (edge list "i, j" over 1-based global node ids, each
//! undirected edge listed once or twice), `NAME_graph_indicator.txt` (one
//! graph id per node line), `NAME_node_labels.txt` (optional, one integer
//! per node line), and `NAME_graph_labels.txt` (one integer per graph line).
//! Files are comma-separated and whitespace-tolerant.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDataset};

fn read_lines(path: &Path) -> Result<Vec<String>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    Ok(text.lines().map(str::to_string).collect())
}

fn parse_int(file: &Path, line_no: usize, token: &str) -> Result<i64> {
    token.trim().parse::<i64>().map_err(|_| Error::Parse {
        file: file.display().to_string(),
        line: line_no,
        token: token.trim().to_string(),
    })
}

/// One integer per non-empty line.
fn parse_int_column(path: &Path) -> Result<Vec<i64>> {
    read_lines(path)?
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_int(path, i + 1, l))
        .collect()
}

/// Loads the dataset `name` from `directory`. Node labels are remapped to
/// contiguous positive integers 1..|alphabet| in order of first appearance;
/// a missing node-label file leaves the graphs unlabeled.
pub fn load_tudataset(directory: &Path, name: &str) -> Result<GraphDataset> {
    let file = |suffix: &str| directory.join(format!("{name}_{suffix}.txt"));

    let indicator_path = file("graph_indicator");
    let indicator = parse_int_column(&indicator_path)?;
    let node_count = indicator.len();

    // graph ids are 1-based and contiguous in practice; tolerate any order
    let graph_count = indicator.iter().copied().max().unwrap_or(0);
    if graph_count <= 0 {
        return Err(Error::Integrity {
            file: indicator_path.display().to_string(),
            line: 1,
            message: "no graphs declared".into(),
        });
    }
    let graph_count = graph_count as usize;
    let mut graph_of = vec![0usize; node_count];
    let mut nodes_of_graph = vec![Vec::new(); graph_count];
    for (node, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > graph_count {
            return Err(Error::Integrity {
                file: indicator_path.display().to_string(),
                line: node + 1,
                message: format!("graph id {gid} out of range 1..={graph_count}"),
            });
        }
        graph_of[node] = gid as usize - 1;
        nodes_of_graph[gid as usize - 1].push(node);
    }
    // local index of each global node within its graph
    let mut local_of = vec![0usize; node_count];
    for nodes in &nodes_of_graph {
        for (local, &node) in nodes.iter().enumerate() {
            local_of[node] = local;
        }
    }

    let class_labels = parse_int_column(&file("graph_labels"))?;
    if class_labels.len() != graph_count {
        return Err(Error::Integrity {
            file: file("graph_labels").display().to_string(),
            line: class_labels.len(),
            message: format!(
                "{} graph labels for {} graphs",
                class_labels.len(),
                graph_count
            ),
        });
    }

    let adjacency_path = file("A");
    let mut edges_of_graph: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (idx, line) in read_lines(&adjacency_path)?.iter().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let u_tok = parts.next().unwrap_or("");
        let v_tok = parts.next().ok_or_else(|| Error::Parse {
            file: adjacency_path.display().to_string(),
            line: line_no,
            token: line.trim().to_string(),
        })?;
        let u = parse_int(&adjacency_path, line_no, u_tok)?;
        let v = parse_int(&adjacency_path, line_no, v_tok)?;
        let integrity = |message: String| Error::Integrity {
            file: adjacency_path.display().to_string(),
            line: line_no,
            message,
        };
        if u < 1 || u as usize > node_count || v < 1 || v as usize > node_count {
            return Err(integrity(format!("edge ({u}, {v}) references a missing node")));
        }
        let (u, v) = (u as usize - 1, v as usize - 1);
        if graph_of[u] != graph_of[v] {
            return Err(integrity(format!(
                "edge ({}, {}) crosses graphs {} and {}",
                u + 1,
                v + 1,
                graph_of[u] + 1,
                graph_of[v] + 1
            )));
        }
        if u == v {
            return Err(integrity(format!("self-loop at node {}", u + 1)));
        }
        edges_of_graph[graph_of[u]].push((local_of[u], local_of[v]));
    }

    // optional node labels, remapped to 1.. in first-appearance order
    let labels_path = file("node_labels");
    let node_labels = if labels_path.is_file() {
        let raw = parse_int_column(&labels_path)?;
        if raw.len() != node_count {
            return Err(Error::Integrity {
                file: labels_path.display().to_string(),
                line: raw.len(),
                message: format!("{} node labels for {} nodes", raw.len(), node_count),
            });
        }
        let mut remap: Vec<(i64, u32)> = Vec::new();
        let mut mapped = Vec::with_capacity(node_count);
        for &value in &raw {
            let label = match remap.iter().find(|(v, _)| *v == value) {
                Some(&(_, l)) => l,
                None => {
                    let l = remap.len() as u32 + 1;
                    remap.push((value, l));
                    l
                }
            };
            mapped.push(label);
        }
        Some(mapped)
    } else {
        None
    };

    let mut graphs = Vec::with_capacity(graph_count);
    for (gid, nodes) in nodes_of_graph.iter().enumerate() {
        let labels = node_labels
            .as_ref()
            .map(|all| nodes.iter().map(|&n| all[n]).collect::<Vec<u32>>());
        graphs.push(Graph::from_edges(nodes.len(), &edges_of_graph[gid], labels)?);
    }
    GraphDataset::new(name, graphs, class_labels)
}

/// Writes `dataset` in the same four-file layout (each undirected edge is
/// emitted in both directions). Reloading yields an identical dataset.
pub fn write_tudataset(dataset: &GraphDataset, directory: &Path) -> Result<()> {
    fs::create_dir_all(directory)?;
    let file = |suffix: &str| directory.join(format!("{}_{suffix}.txt", dataset.name()));

    let mut indicator = fs::File::create(file("graph_indicator"))?;
    let mut adjacency = fs::File::create(file("A"))?;
    let mut graph_labels = fs::File::create(file("graph_labels"))?;
    let labeled = dataset.is_labeled();
    let mut node_labels = if labeled {
        Some(fs::File::create(file("node_labels"))?)
    } else {
        None
    };

    let mut offset = 0usize; // global id of a graph's first node, 0-based
    for (gid, graph) in dataset.graphs().iter().enumerate() {
        for v in 0..graph.node_count() {
            writeln!(indicator, "{}", gid + 1)?;
            if let Some(f) = node_labels.as_mut() {
                writeln!(f, "{}", graph.label(v))?;
            }
            for &w in graph.neighbors(v) {
                writeln!(adjacency, "{}, {}", offset + v + 1, offset + w + 1)?;
            }
        }
        writeln!(graph_labels, "{}", dataset.class_labels()[gid])?;
        offset += graph.node_count();
    }
    Ok(())
}
