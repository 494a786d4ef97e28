use std::fmt::Write;

use crate::gp::TypedTree;

/// Graphviz rendering of a tree; nodes are numbered in prefix order.
pub fn export_dot(tree: &TypedTree, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    out.push_str("  node [shape=box, fontname=\"Helvetica\"];\n");
    for (i, n) in tree.nodes().iter().enumerate() {
        let label = n.label().replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
    }
    for i in 0..tree.size() {
        for child in tree.children(i) {
            let _ = writeln!(out, "  n{i} -> n{child};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{build_primitive_set, parse_tree};

    #[test]
    fn one_edge_per_child() {
        let t = parse_tree("Root2(SIFT(Image), HOG(Gau(Image, 1.5)))", &build_primitive_set()).unwrap();
        let dot = export_dot(&t, "common");
        assert!(dot.starts_with("digraph common {"));
        assert_eq!(dot.matches("->").count(), t.size() - 1);
        assert!(dot.contains("n5 [label=\"Image\"]"));
        assert!(dot.contains("n0 -> n3;"));
        assert!(dot.contains("n4 -> n6;"));
    }
}
