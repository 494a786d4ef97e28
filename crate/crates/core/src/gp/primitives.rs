use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::imageops::params::{
    MAX_DERIVATIVE_ORDER, MAX_FREQ_INDEX, POOL_SIZES, SIGMA_MAX, SIGMA_MIN, THETA_STEPS,
};
use crate::imageops::{HOG_DIM, LBP_DIM, SIFT_DIM};

/// Value types of the strongly typed grammar.
///
/// `Root` is the feature-vector type produced only by `Root2/3/4`; keeping it
/// distinct from `FVec` confines the root primitives to the top of a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Root,
    FVec,
    Img,
    Sigma,
    Ord,
    Theta,
    FreqIdx,
    Weight,
    PoolK,
}

impl Type {
    pub fn is_parameter(self) -> bool {
        !matches!(self, Type::Root | Type::FVec | Type::Img)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prim {
    Root2,
    Root3,
    Root4,
    FeaCon2,
    FeaCon3,
    Sift,
    Hog,
    Lbp,
    MaxP,
    Gau,
    GauD,
    Gabor,
    Lap,
    LoG1,
    LoG2,
    Sobel,
    SobelX,
    SobelY,
    Med,
    Mean,
    Min,
    Max,
    LbpF,
    HogF,
    WAdd,
    WSub,
    Relu,
    Sqrt,
}

/// Function-set layer of a primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Filtering,
    Pooling,
    Extraction,
    Concatenation,
}

use Type::*;

const IMG: &[Type] = &[Img];

impl Prim {
    pub const ALL: [Prim; 28] = [
        Prim::Root2,
        Prim::Root3,
        Prim::Root4,
        Prim::FeaCon2,
        Prim::FeaCon3,
        Prim::Sift,
        Prim::Hog,
        Prim::Lbp,
        Prim::MaxP,
        Prim::Gau,
        Prim::GauD,
        Prim::Gabor,
        Prim::Lap,
        Prim::LoG1,
        Prim::LoG2,
        Prim::Sobel,
        Prim::SobelX,
        Prim::SobelY,
        Prim::Med,
        Prim::Mean,
        Prim::Min,
        Prim::Max,
        Prim::LbpF,
        Prim::HogF,
        Prim::WAdd,
        Prim::WSub,
        Prim::Relu,
        Prim::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Prim::Root2 => "Root2",
            Prim::Root3 => "Root3",
            Prim::Root4 => "Root4",
            Prim::FeaCon2 => "FeaCon2",
            Prim::FeaCon3 => "FeaCon3",
            Prim::Sift => "SIFT",
            Prim::Hog => "HOG",
            Prim::Lbp => "LBP",
            Prim::MaxP => "MaxP",
            Prim::Gau => "Gau",
            Prim::GauD => "GauD",
            Prim::Gabor => "Gabor",
            Prim::Lap => "Lap",
            Prim::LoG1 => "LoG1",
            Prim::LoG2 => "LoG2",
            Prim::Sobel => "Sobel",
            Prim::SobelX => "SobelX",
            Prim::SobelY => "SobelY",
            Prim::Med => "Med",
            Prim::Mean => "Mean",
            Prim::Min => "Min",
            Prim::Max => "Max",
            Prim::LbpF => "LBP-F",
            Prim::HogF => "HOG-F",
            Prim::WAdd => "W-Add",
            Prim::WSub => "W-Sub",
            Prim::Relu => "ReLU",
            Prim::Sqrt => "Sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Prim> {
        Prim::ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn args(self) -> &'static [Type] {
        match self {
            Prim::Root2 | Prim::FeaCon2 => &[FVec, FVec],
            Prim::Root3 | Prim::FeaCon3 => &[FVec, FVec, FVec],
            Prim::Root4 => &[FVec, FVec, FVec, FVec],
            Prim::MaxP => &[Img, PoolK, PoolK],
            Prim::Gau => &[Img, Sigma],
            Prim::GauD => &[Img, Sigma, Ord, Ord],
            Prim::Gabor => &[Img, Theta, FreqIdx],
            Prim::WAdd | Prim::WSub => &[Img, Weight, Img, Weight],
            _ => IMG,
        }
    }

    pub fn ret(self) -> Type {
        match self.layer() {
            Layer::Concatenation if self.is_root() => Root,
            Layer::Concatenation | Layer::Extraction => FVec,
            Layer::Filtering | Layer::Pooling => Img,
        }
    }

    pub fn arity(self) -> usize {
        self.args().len()
    }

    pub fn is_root(self) -> bool {
        matches!(self, Prim::Root2 | Prim::Root3 | Prim::Root4)
    }

    pub fn layer(self) -> Layer {
        match self {
            Prim::Root2 | Prim::Root3 | Prim::Root4 | Prim::FeaCon2 | Prim::FeaCon3 => {
                Layer::Concatenation
            }
            Prim::Sift | Prim::Hog | Prim::Lbp => Layer::Extraction,
            Prim::MaxP => Layer::Pooling,
            _ => Layer::Filtering,
        }
    }

    /// Output length of a feature-extraction primitive.
    pub fn descriptor_dim(self) -> Option<usize> {
        match self {
            Prim::Sift => Some(SIFT_DIM),
            Prim::Hog => Some(HOG_DIM),
            Prim::Lbp => Some(LBP_DIM),
            _ => None,
        }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ephemeral constant carried by a parameter leaf.
///
/// Orientation and frequency are stored as grid indices so that text
/// round-trips are lossless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constant {
    Sigma(f64),
    Order(u8),
    Theta(u8),
    Freq(u8),
    Weight(f64),
    PoolK(u8),
}

impl Constant {
    pub fn ty(self) -> Type {
        match self {
            Constant::Sigma(_) => Sigma,
            Constant::Order(_) => Ord,
            Constant::Theta(_) => Theta,
            Constant::Freq(_) => FreqIdx,
            Constant::Weight(_) => Weight,
            Constant::PoolK(_) => PoolK,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Constant::Sigma(v) | Constant::Weight(v) => write!(f, "{}", round_sig6(v)),
            Constant::Order(v) | Constant::Theta(v) | Constant::Freq(v) | Constant::PoolK(v) => {
                write!(f, "{v}")
            }
        }
    }
}

/// Rounds to six significant digits; sampled reals are stored pre-rounded
/// so the printed form parses back to the identical value.
pub fn round_sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

/// Terminal kinds: the input image plus one ephemeral-constant kind per
/// parameter type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TerminalKind {
    Image,
    Sigma,
    Order,
    Theta,
    Freq,
    Weight,
    PoolK,
}

impl TerminalKind {
    pub const ALL: [TerminalKind; 7] = [
        TerminalKind::Image,
        TerminalKind::Sigma,
        TerminalKind::Order,
        TerminalKind::Theta,
        TerminalKind::Freq,
        TerminalKind::Weight,
        TerminalKind::PoolK,
    ];

    pub fn ty(self) -> Type {
        match self {
            TerminalKind::Image => Img,
            TerminalKind::Sigma => Sigma,
            TerminalKind::Order => Ord,
            TerminalKind::Theta => Theta,
            TerminalKind::Freq => FreqIdx,
            TerminalKind::Weight => Weight,
            TerminalKind::PoolK => PoolK,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TerminalKind::Image => "Image",
            TerminalKind::Sigma => "sigma",
            TerminalKind::Order => "order",
            TerminalKind::Theta => "theta",
            TerminalKind::Freq => "freq",
            TerminalKind::Weight => "weight",
            TerminalKind::PoolK => "poolk",
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> super::Node {
        use super::Node;
        match self {
            TerminalKind::Image => Node::Image,
            TerminalKind::Sigma => {
                Node::Const(Constant::Sigma(round_sig6(rng.gen_range(SIGMA_MIN..=SIGMA_MAX))))
            }
            TerminalKind::Order => {
                Node::Const(Constant::Order(rng.gen_range(0..=MAX_DERIVATIVE_ORDER)))
            }
            TerminalKind::Theta => Node::Const(Constant::Theta(rng.gen_range(0..THETA_STEPS))),
            TerminalKind::Freq => Node::Const(Constant::Freq(rng.gen_range(0..=MAX_FREQ_INDEX))),
            TerminalKind::Weight => {
                let w = round_sig6(rng.gen_range(0.0..1.0));
                Node::Const(Constant::Weight(if w >= 1.0 { 0.999999 } else { w }))
            }
            TerminalKind::PoolK => {
                Node::Const(Constant::PoolK(POOL_SIZES[rng.gen_range(0..POOL_SIZES.len())]))
            }
        }
    }
}

/// Registry of functions and terminals with per-type lookup tables.
#[derive(Clone, Debug)]
pub struct PrimitiveSet {
    functions: Vec<Prim>,
    terminals: Vec<TerminalKind>,
    producers: BTreeMap<Type, Vec<Prim>>,
    terminals_by_type: BTreeMap<Type, Vec<TerminalKind>>,
    min_height: BTreeMap<Type, usize>,
}

impl PrimitiveSet {
    pub fn functions(&self) -> &[Prim] {
        &self.functions
    }

    pub fn terminals(&self) -> &[TerminalKind] {
        &self.terminals
    }

    pub fn root_type(&self) -> Type {
        Root
    }

    pub fn producers(&self, ty: Type) -> &[Prim] {
        self.producers.get(&ty).map_or(&[], Vec::as_slice)
    }

    pub fn terminals_of(&self, ty: Type) -> &[TerminalKind] {
        self.terminals_by_type.get(&ty).map_or(&[], Vec::as_slice)
    }

    /// Smallest subtree height able to produce `ty`; `None` if no finite
    /// tree of that type exists.
    pub fn min_height(&self, ty: Type) -> Option<usize> {
        self.min_height.get(&ty).copied()
    }

    /// Smallest height of a subtree rooted at `p`.
    pub fn prim_min_height(&self, p: Prim) -> usize {
        1 + p
            .args()
            .iter()
            .map(|&t| self.min_height(t).unwrap_or(usize::MAX - 1))
            .max()
            .unwrap_or(0)
    }

    /// Fraction of terminals among all primitives; the grow method stops a
    /// branch with this probability once past the minimum depth.
    pub fn terminal_ratio(&self) -> f64 {
        self.terminals.len() as f64 / (self.terminals.len() + self.functions.len()) as f64
    }

    /// Verifies unique names and that every type used anywhere can be
    /// produced by a finite tree.
    pub fn check_closure(&self) -> Result<(), String> {
        let mut names: Vec<&str> = self.functions.iter().map(|p| p.name()).collect();
        names.extend(self.terminals.iter().map(|t| t.name()));
        let n = names.len();
        names.sort_unstable();
        names.dedup();
        if names.len() != n {
            return Err("duplicate primitive names".into());
        }
        for p in &self.functions {
            for &t in p.args().iter().chain(std::iter::once(&p.ret())) {
                if self.min_height(t).is_none() {
                    return Err(format!("type {t} used by {p} has no finite producer"));
                }
            }
        }
        Ok(())
    }
}

/// The full function set (19 filters, 1 pooling, 3 descriptors, 5
/// concatenations) and the seven terminal kinds.
pub fn build_primitive_set() -> PrimitiveSet {
    let functions = Prim::ALL.to_vec();
    let terminals = TerminalKind::ALL.to_vec();
    let mut producers: BTreeMap<Type, Vec<Prim>> = BTreeMap::new();
    for &p in &functions {
        producers.entry(p.ret()).or_default().push(p);
    }
    let mut terminals_by_type: BTreeMap<Type, Vec<TerminalKind>> = BTreeMap::new();
    for &t in &terminals {
        terminals_by_type.entry(t.ty()).or_default().push(t);
    }

    // fixpoint over minimum producible heights
    let mut min_height: BTreeMap<Type, usize> =
        terminals.iter().map(|t| (t.ty(), 0)).collect();
    loop {
        let mut changed = false;
        for &p in &functions {
            let h = p
                .args()
                .iter()
                .map(|t| min_height.get(t).copied())
                .try_fold(0usize, |acc, h| h.map(|h| acc.max(h)));
            if let Some(h) = h {
                let cand = h + 1;
                let e = min_height.entry(p.ret()).or_insert(usize::MAX);
                if cand < *e {
                    *e = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    PrimitiveSet {
        functions,
        terminals,
        producers,
        terminals_by_type,
        min_height,
    }
}
