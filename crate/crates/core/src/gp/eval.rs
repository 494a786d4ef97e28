use std::borrow::Cow;

use super::primitives::{Constant, Prim};
use super::tree::{Node, TypedTree};
use super::GpError;
use crate::imageops::params::{LOG1_SIGMA, LOG2_SIGMA};
use crate::imageops::{
    self, CombineSign, FeatVec, Image, PointwiseKind, RankKind, SobelMode, MIN_DESCRIPTOR_SIDE,
};

enum Value<'a> {
    Img(Cow<'a, Image>),
    Vec(FeatVec),
    Const(Constant),
}

impl<'a> Value<'a> {
    fn img(self) -> Result<Cow<'a, Image>, GpError> {
        match self {
            Value::Img(i) => Ok(i),
            _ => Err(GpError::Type("expected an image argument".into())),
        }
    }

    fn vec(self) -> Result<FeatVec, GpError> {
        match self {
            Value::Vec(v) => Ok(v),
            _ => Err(GpError::Type("expected a feature-vector argument".into())),
        }
    }

    fn real(self) -> Result<f64, GpError> {
        match self {
            Value::Const(Constant::Sigma(v) | Constant::Weight(v)) => Ok(v),
            _ => Err(GpError::Type("expected a real constant".into())),
        }
    }

    fn index(self) -> Result<u8, GpError> {
        match self {
            Value::Const(
                Constant::Order(v) | Constant::Theta(v) | Constant::Freq(v) | Constant::PoolK(v),
            ) => Ok(v),
            _ => Err(GpError::Type("expected an integer constant".into())),
        }
    }
}

struct Interp<'a> {
    nodes: &'a [Node],
    input: &'a Image,
    pos: usize,
}

impl<'a> Interp<'a> {
    fn next(&mut self) -> Result<Value<'a>, GpError> {
        let node = self.nodes[self.pos];
        self.pos += 1;
        let p = match node {
            Node::Image => return Ok(Value::Img(Cow::Borrowed(self.input))),
            Node::Const(c) => return Ok(Value::Const(c)),
            Node::Func(p) => p,
        };
        let mut args = Vec::with_capacity(p.arity());
        for _ in 0..p.arity() {
            args.push(self.next()?);
        }
        apply(p, args)
    }
}

fn apply<'a>(p: Prim, args: Vec<Value<'a>>) -> Result<Value<'a>, GpError> {
    let mut it = args.into_iter();
    let mut arg = || it.next().ok_or_else(|| GpError::Type(format!("{p}: missing argument")));
    let out = |img: Image| Ok(Value::Img(Cow::Owned(img)));
    match p {
        Prim::Root2 | Prim::Root3 | Prim::Root4 | Prim::FeaCon2 | Prim::FeaCon3 => {
            let mut v = FeatVec::default();
            for _ in 0..p.arity() {
                v.extend(&arg()?.vec()?);
            }
            Ok(Value::Vec(v))
        }
        Prim::Sift => Ok(Value::Vec(imageops::sift_vec(&*arg()?.img()?)?)),
        Prim::Hog => Ok(Value::Vec(imageops::hog_vec(&*arg()?.img()?)?)),
        Prim::Lbp => Ok(Value::Vec(imageops::lbp_hist(&*arg()?.img()?)?)),
        Prim::MaxP => {
            let img = arg()?.img()?;
            let (k1, k2) = (arg()?.index()?, arg()?.index()?);
            out(imageops::max_pool(&img, k1, k2)?)
        }
        Prim::Gau => {
            let img = arg()?.img()?;
            out(imageops::gaussian_filter(&img, arg()?.real()?)?)
        }
        Prim::GauD => {
            let img = arg()?.img()?;
            let sigma = arg()?.real()?;
            let (o1, o2) = (arg()?.index()?, arg()?.index()?);
            out(imageops::gaussian_derivative(&img, sigma, o1, o2)?)
        }
        Prim::Gabor => {
            let img = arg()?.img()?;
            let (theta, v) = (arg()?.index()?, arg()?.index()?);
            out(imageops::gabor(&img, theta, v)?)
        }
        Prim::WAdd | Prim::WSub => {
            let a = arg()?.img()?;
            let n1 = arg()?.real()?;
            let b = arg()?.img()?;
            let n2 = arg()?.real()?;
            let sign = if p == Prim::WAdd {
                CombineSign::Add
            } else {
                CombineSign::Sub
            };
            out(imageops::weighted_combine(&a, n1, &b, n2, sign))
        }
        _ => {
            let img = arg()?.img()?;
            let img = img.as_ref();
            out(match p {
                Prim::Lap => imageops::laplacian(img)?,
                Prim::LoG1 => imageops::log_filter(img, LOG1_SIGMA)?,
                Prim::LoG2 => imageops::log_filter(img, LOG2_SIGMA)?,
                Prim::Sobel => imageops::sobel(img, SobelMode::Magnitude)?,
                Prim::SobelX => imageops::sobel(img, SobelMode::X)?,
                Prim::SobelY => imageops::sobel(img, SobelMode::Y)?,
                Prim::Med => imageops::rank_mean_filter(img, RankKind::Median),
                Prim::Mean => imageops::rank_mean_filter(img, RankKind::Mean),
                Prim::Min => imageops::rank_mean_filter(img, RankKind::Min),
                Prim::Max => imageops::rank_mean_filter(img, RankKind::Max),
                Prim::LbpF => imageops::lbp_code_map(img),
                Prim::HogF => imageops::grad_magnitude_map(img),
                Prim::Relu => imageops::elementwise(img, PointwiseKind::Relu),
                Prim::Sqrt => imageops::elementwise(img, PointwiseKind::Sqrt),
                _ => unreachable!("{p} handled above"),
            })
        }
    }
}

/// Runs the tree on one image. The result length equals
/// [`TypedTree::feature_dim`] and is independent of the image content.
pub fn eval_tree(tree: &TypedTree, img: &Image) -> Result<FeatVec, GpError> {
    if img.height() < MIN_DESCRIPTOR_SIDE || img.width() < MIN_DESCRIPTOR_SIDE {
        return Err(GpError::Image(imageops::ImageError::TooSmall {
            min: MIN_DESCRIPTOR_SIDE,
            height: img.height(),
            width: img.width(),
        }));
    }
    let mut interp = Interp {
        nodes: tree.nodes(),
        input: img,
        pos: 0,
    };
    let v = interp.next()?.vec()?;
    if v.values().iter().any(|x| !x.is_finite()) {
        return Err(GpError::NonFinite);
    }
    Ok(v)
}
