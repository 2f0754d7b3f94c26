//! GraphML and DOT writers. Nodes are emitted in id order and edges as
//! sorted `u < v` pairs, so output is byte-reproducible.

use std::fmt::Write;

use crate::netbuild::NetworkGraph;

/// Label text for node `v`: the class name when known, `?` for test nodes.
fn label_text(g: &NetworkGraph, v: usize, class_names: &[String]) -> String {
    match g.label(v) {
        Some(c) => class_names.get(c).cloned().unwrap_or_else(|| c.to_string()),
        None => "?".into(),
    }
}

/// Source row of node `v`, or -1 for nodes without one.
fn instance_id(g: &NetworkGraph, v: usize) -> i64 {
    g.instance(v).map_or(-1, |i| i as i64)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_graphml(g: &NetworkGraph, class_names: &[String]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str(
        "  <key id=\"instance\" for=\"node\" attr.name=\"instance\" attr.type=\"int\"/>\n",
    );
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for v in 0..g.node_count() {
        let _ = writeln!(
            out,
            "    <node id=\"n{v}\"><data key=\"instance\">{}</data><data key=\"label\">{}</data></node>",
            instance_id(g, v),
            xml_escape(&label_text(g, v, class_names)),
        );
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "    <edge source=\"n{u}\" target=\"n{v}\"/>");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn to_dot(g: &NetworkGraph, class_names: &[String]) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.node_count() {
        let _ = writeln!(
            out,
            "  {v} [instance={}, label=\"{}\"];",
            instance_id(g, v),
            dot_escape(&label_text(g, v, class_names)),
        );
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
