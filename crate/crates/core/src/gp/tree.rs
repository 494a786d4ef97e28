use std::fmt;

use super::primitives::{Constant, Prim, PrimitiveSet, Type};
use super::GpError;

/// Static depth limit, counted in edges from the root.
pub const MAX_DEPTH: usize = 8;
pub const MIN_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node {
    Func(Prim),
    Image,
    Const(Constant),
}

impl Node {
    pub fn ty(&self) -> Type {
        match self {
            Node::Func(p) => p.ret(),
            Node::Image => Type::Img,
            Node::Const(c) => c.ty(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Node::Func(p) => p.arity(),
            _ => 0,
        }
    }

    /// Label used by the text and DOT renderings.
    pub fn label(&self) -> String {
        match self {
            Node::Func(p) => p.name().to_string(),
            Node::Image => "Image".to_string(),
            Node::Const(c) => c.to_string(),
        }
    }
}

/// Strongly typed expression tree stored in prefix order.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedTree {
    nodes: Vec<Node>,
}

impl TypedTree {
    /// Wraps a prefix node list after checking arity consistency. Use
    /// [`TypedTree::type_check`] for the full type audit.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self, GpError> {
        if nodes.is_empty() {
            return Err(GpError::Malformed("empty tree".into()));
        }
        let mut open = 1usize;
        for (i, n) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(GpError::Malformed(format!("trailing node at {i}")));
            }
            open = open - 1 + n.arity();
        }
        if open != 0 {
            return Err(GpError::Malformed(format!("{open} missing arguments")));
        }
        Ok(Self { nodes })
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Self {
        debug_assert!(Self::from_nodes(nodes.clone()).is_ok());
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Index one past the end of the subtree starting at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        let mut open = 1usize;
        let mut i = start;
        while open > 0 {
            open = open - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }

    /// Depth (edges from the root) of every node.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depths = Vec::with_capacity(self.nodes.len());
        // pending child slots with the depth they will occupy
        let mut stack: Vec<usize> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let d = if i == 0 { 0 } else { stack.pop().expect("arity consistent") };
            depths.push(d);
            stack.extend(std::iter::repeat_n(d + 1, n.arity()));
        }
        depths
    }

    pub fn depth(&self) -> usize {
        self.node_depths().into_iter().max().unwrap_or(0)
    }

    /// Start indices of the direct children of the node at `index`.
    pub fn children(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes[index].arity());
        let mut next = index + 1;
        for _ in 0..self.nodes[index].arity() {
            out.push(next);
            next = self.subtree_end(next);
        }
        out
    }

    /// Replaces the subtree at `index` with `replacement`'s nodes.
    pub fn with_subtree(&self, index: usize, replacement: &[Node]) -> TypedTree {
        let end = self.subtree_end(index);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - index) + replacement.len());
        nodes.extend_from_slice(&self.nodes[..index]);
        nodes.extend_from_slice(replacement);
        nodes.extend_from_slice(&self.nodes[end..]);
        TypedTree::from_nodes_unchecked(nodes)
    }

    pub fn subtree(&self, index: usize) -> &[Node] {
        &self.nodes[index..self.subtree_end(index)]
    }

    /// Checks that every child matches its parent's declared argument type,
    /// the root is a root primitive, and the depth limit holds.
    pub fn type_check(&self, pset: &PrimitiveSet) -> Result<(), GpError> {
        if self.root().ty() != pset.root_type() {
            return Err(GpError::Type(format!(
                "root must produce {}, found {}",
                pset.root_type(),
                self.root().label()
            )));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Func(p) = n {
                if !pset.functions().contains(p) {
                    return Err(GpError::Type(format!("{p} is not in the primitive set")));
                }
                for (&arg_ty, child) in p.args().iter().zip(self.children(i)) {
                    let got = self.nodes[child].ty();
                    if got != arg_ty {
                        return Err(GpError::Type(format!(
                            "argument of {p} at node {i} expects {arg_ty}, found {got}"
                        )));
                    }
                }
            }
        }
        let depth = self.depth();
        if depth > MAX_DEPTH {
            return Err(GpError::Depth(depth));
        }
        Ok(())
    }

    /// Length of the feature vector the tree produces; a function of
    /// structure only.
    pub fn feature_dim(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Func(p) => p.descriptor_dim(),
                _ => None,
            })
            .sum()
    }
}

impl fmt::Display for TypedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::serialize_tree(self))
    }
}
