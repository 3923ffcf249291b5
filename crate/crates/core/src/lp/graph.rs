use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub cost: f64,
    /// Optional per-edge annotation (e.g. CO2 in kg) that the cost does not see.
    pub confounder: Option<f64>,
}

/// Weighted directed graph. Nodes are kept in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Deserialize, Serialize)]
struct EdgeRecord {
    src: String,
    dst: String,
    cost: f64,
    #[serde(default)]
    confounder_value: Option<f64>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    fn intern(&mut self, name: &str) -> usize {
        match self.node(name) {
            Some(i) => i,
            None => {
                self.nodes.push(name.to_string());
                self.nodes.len() - 1
            }
        }
    }

    pub fn add_edge(&mut self, src: &str, dst: &str, cost: f64, confounder: Option<f64>) -> usize {
        let src = self.intern(src);
        let dst = self.intern(dst);
        self.edges.push(Edge { src, dst, cost, confounder });
        self.edges.len() - 1
    }

    pub fn edge_name(&self, e: usize) -> String {
        let edge = &self.edges[e];
        format!("({},{})", self.nodes[edge.src], self.nodes[edge.dst])
    }

    pub fn costs(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    /// Copy of the graph with edge costs replaced.
    pub fn with_costs(&self, costs: &[f64]) -> Result<Graph> {
        if costs.len() != self.edges.len() {
            return Err(Error::config(format!("{} costs for {} edges", costs.len(), self.edges.len())));
        }
        let mut g = self.clone();
        for (e, &c) in g.edges.iter_mut().zip(costs) {
            e.cost = c;
        }
        Ok(g)
    }

    /// Outgoing edge indices per node, in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }

    /// Reads the edge-list CSV `src,dst,cost[,confounder_value]` (header required).
    pub fn read_csv<R: Read>(reader: R) -> Result<Graph> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["src", "dst", "cost"];
        if headers.len() < 3 || headers.iter().take(3).ne(expected) {
            return Err(Error::config("edge list header must start with src,dst,cost"));
        }
        let mut g = Graph::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").to_string();
            let cost: f64 =
                field(2).parse().map_err(|_| Error::config(format!("edge row {}: cost is not a number", line + 1)))?;
            if !cost.is_finite() {
                return Err(Error::config(format!("edge row {}: cost must be finite", line + 1)));
            }
            let confounder =
                match rec.get(3).filter(|s| !s.is_empty()) {
                    Some(s) => Some(s.parse().map_err(|_| {
                        Error::config(format!("edge row {}: confounder_value is not a number", line + 1))
                    })?),
                    None => None,
                };
            g.add_edge(&field(0), &field(1), cost, confounder);
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Graph> {
        Graph::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.edges {
            w.serialize(EdgeRecord {
                src: self.nodes[e.src].clone(),
                dst: self.nodes[e.dst].clone(),
                cost: e.cost,
                confounder_value: e.confounder,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Renders DOT text. Each solution (0/1 per edge) gets its own style class;
    /// edges used by several solutions list every class in order.
    pub fn to_dot(&self, solutions: &[(String, Vec<f64>)]) -> Result<String> {
        const STYLES: [&str; 4] = [
            "color=\"#1f77b4\", penwidth=3",
            "color=\"#d62728\", penwidth=3, style=dashed",
            "color=\"#2ca02c\", penwidth=3, style=dotted",
            "color=\"#9467bd\", penwidth=3, style=bold",
        ];
        for (name, x) in solutions {
            if x.len() != self.edges.len() {
                return Err(Error::config(format!(
                    "solution `{name}` has {} entries for {} edges",
                    x.len(),
                    self.edges.len()
                )));
            }
        }
        let mut out = String::from("digraph G {\n  rankdir=LR;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", n.replace('"', "\\\"")));
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, (_, x)) in solutions.iter().enumerate() {
            for (e, &v) in x.iter().enumerate() {
                if v > 0.5 {
                    classes.entry(e).or_default().push(s);
                }
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let mut attrs = vec![format!("label=\"{}\"", fmt_num(edge.cost))];
            match classes.get(&e) {
                Some(used) => {
                    let names: Vec<&str> = used.iter().map(|&s| solutions[s].0.as_str()).collect();
                    attrs.push(format!("class=\"{}\"", names.join(" ")));
                    attrs.push(STYLES[used[0] % STYLES.len()].to_string());
                }
                None => attrs.push("color=\"#999999\"".to_string()),
            }
            out.push_str(&format!("  n{} -> n{} [{}];\n", edge.src, edge.dst, attrs.join(", ")));
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut g = Graph::new();
        g.add_edge("NY", "Chicago", 12.5, Some(40.0));
        g.add_edge("Chicago", "SF", 3.0, None);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(Graph::read_csv(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Graph::read_csv("a,b,c\n".as_bytes()).is_err());
        assert!(Graph::read_csv("src,dst,cost\nA,B,x\n".as_bytes()).is_err());
        let g = Graph::read_csv("src,dst,cost\nA,B,1\n".as_bytes()).unwrap();
        assert_eq!(g.edges[0].confounder, None);
    }

    #[test]
    fn dot_styles() {
        let mut g = Graph::new();
        g.add_edge("s", "a", 1.0, None);
        g.add_edge("a", "t", 1.0, None);
        g.add_edge("s", "t", 2.0, None);
        let plain = g.to_dot(&[]).unwrap();
        assert!(!plain.contains("class="));
        let styled =
            g.to_dot(&[("base".into(), vec![1.0, 1.0, 0.0]), ("adversarial".into(), vec![0.0, 0.0, 1.0])]).unwrap();
        assert!(styled.contains("class=\"base\""));
        assert!(styled.contains("class=\"adversarial\""));
        assert_eq!(
            styled,
            g.to_dot(&[("base".into(), vec![1.0, 1.0, 0.0]), ("adversarial".into(), vec![0.0, 0.0, 1.0])]).unwrap()
        );
    }
}
