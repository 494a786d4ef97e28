//! Bracketed prefix text form, e.g. `Root2(SIFT(Image), HOG(Gau(Image, 1.5)))`.

use super::primitives::{Constant, Prim, PrimitiveSet, Type};
use super::tree::{Node, TypedTree};
use super::GpError;
use crate::imageops::params::{MAX_DERIVATIVE_ORDER, MAX_FREQ_INDEX, POOL_SIZES, THETA_STEPS};

pub fn serialize_tree(tree: &TypedTree) -> String {
    fn write(nodes: &[Node], pos: &mut usize, out: &mut String) {
        let node = nodes[*pos];
        *pos += 1;
        out.push_str(&node.label());
        if node.arity() > 0 {
            out.push('(');
            for i in 0..node.arity() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(nodes, pos, out);
            }
            out.push(')');
        }
    }
    let mut out = String::new();
    write(tree.nodes(), &mut 0, &mut out);
    out
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    pset: &'a PrimitiveSet,
    out: Vec<Node>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, GpError> {
        Err(GpError::Parse {
            pos: at,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn token(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let src = self.src;
        let rest = &src[start..];
        let len = rest
            .find(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
            .unwrap_or(rest.len());
        self.pos += len;
        (start, &src[start..start + len])
    }

    fn expect(&mut self, ch: char) -> Result<(), GpError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(ch) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.src[self.pos..].chars().next();
            match found {
                Some(c) => self.err(self.pos, format!("expected '{ch}', found '{c}'")),
                None => self.err(self.pos, format!("expected '{ch}', found end of input")),
            }
        }
    }

    fn node(&mut self, want: Type) -> Result<(), GpError> {
        let (at, tok) = self.token();
        if tok.is_empty() {
            return self.err(at, format!("expected a {want} expression"));
        }
        if want.is_parameter() {
            let c = parse_constant(want, tok).map_err(|msg| GpError::Parse { pos: at, msg })?;
            self.out.push(Node::Const(c));
            return Ok(());
        }
        if tok == "Image" {
            if want != Type::Img {
                return self.err(at, format!("Image used where {want} is expected"));
            }
            self.out.push(Node::Image);
            return Ok(());
        }
        let Some(p) = Prim::from_name(tok).filter(|p| self.pset.functions().contains(p)) else {
            return self.err(at, format!("unknown primitive '{tok}'"));
        };
        if p.ret() != want {
            return self.err(at, format!("{p} returns {}, expected {want}", p.ret()));
        }
        self.out.push(Node::Func(p));
        self.expect('(')?;
        for (i, &arg) in p.args().iter().enumerate() {
            if i > 0 {
                self.expect(',')?;
            }
            self.node(arg)?;
        }
        self.expect(')')
    }
}

fn parse_constant(ty: Type, tok: &str) -> Result<Constant, String> {
    let bad = || format!("invalid {ty} constant '{tok}'");
    let index = |max_exclusive: u8| -> Result<u8, String> {
        tok.parse::<u8>()
            .ok()
            .filter(|&v| v < max_exclusive)
            .ok_or_else(bad)
    };
    match ty {
        Type::Sigma => {
            let v: f64 = tok.parse().map_err(|_| bad())?;
            if v.is_finite() && v > 0.0 {
                Ok(Constant::Sigma(v))
            } else {
                Err(bad())
            }
        }
        Type::Weight => {
            let v: f64 = tok.parse().map_err(|_| bad())?;
            if (0.0..1.0).contains(&v) {
                Ok(Constant::Weight(v))
            } else {
                Err(bad())
            }
        }
        Type::Ord => index(MAX_DERIVATIVE_ORDER + 1).map(Constant::Order),
        Type::Theta => index(THETA_STEPS).map(Constant::Theta),
        Type::FreqIdx => index(MAX_FREQ_INDEX + 1).map(Constant::Freq),
        Type::PoolK => tok
            .parse::<u8>()
            .ok()
            .filter(|k| POOL_SIZES.contains(k))
            .map(Constant::PoolK)
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

/// Parses the text form back into a tree. Errors carry the byte offset of
/// the offending token.
pub fn parse_tree(text: &str, pset: &PrimitiveSet) -> Result<TypedTree, GpError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        pset,
        out: Vec::new(),
    };
    p.node(pset.root_type())?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err(p.pos, "unexpected trailing input");
    }
    let tree = TypedTree::from_nodes(p.out)?;
    tree.type_check(pset)?;
    Ok(tree)
}
