//! Flat signed vector spaces and the standard embeddings of space forms.
//!
//! A space form `Q^n_c` with `c = eps / r^2` sits inside a flat space
//! `R^N_sigma`:
//!
//! ```text
//! eps =  1 : sphere      { p in R^{n+1}   : <p,p> =  r^2 }
//! eps = -1 : hyperbolic  { p in R^{n+1}_1 : <p,p> = -r^2, p_0 > 0 }
//! eps =  0 : R^n itself  (no constraint, ambient = the space)
//! ```
//!
//! Negative-signature coordinates always come first. For a product the
//! layout is `[factor 1 coordinates | factor 2 coordinates]`, each block
//! keeping its own negative-first ordering, so the factor projections are
//! plain slices.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, GeomError, Result};

/// Dimension and index of a flat signed space `R^N_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    total_dim: usize,
    index: usize,
}

impl Signature {
    pub fn new(total_dim: usize, index: usize) -> Result<Self> {
        if total_dim == 0 {
            return invalid("signature dimension must be positive");
        }
        if index > total_dim {
            return invalid(format!("index {index} exceeds dimension {total_dim}"));
        }
        Ok(Self { total_dim, index })
    }

    pub fn euclidean(total_dim: usize) -> Self {
        Self {
            total_dim,
            index: 0,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Sign of the metric on coordinate `i`.
    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.index {
            -1.0
        } else {
            1.0
        }
    }

    /// Raw signed dot product of two coordinate slices of this signature.
    #[inline]
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.total_dim);
        debug_assert_eq!(v.len(), self.total_dim);
        let (un, up) = u.split_at(self.index);
        let (vn, vp) = v.split_at(self.index);
        let neg: f64 = un.iter().zip(vn).map(|(a, b)| a * b).sum();
        let pos: f64 = up.iter().zip(vp).map(|(a, b)| a * b).sum();
        pos - neg
    }
}

/// Block structure of a product ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductLayout {
    pub first: Signature,
    pub second: Signature,
}

impl ProductLayout {
    /// Signature of the whole product. Its `index` counts negative
    /// coordinates but they are not contiguous when both factors carry
    /// one, so products use [`ProductLayout::dot`] rather than
    /// [`Signature::dot`].
    pub fn total_dim(&self) -> usize {
        self.first.total_dim + self.second.total_dim
    }

    pub fn index(&self) -> usize {
        self.first.index + self.second.index
    }

    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        let n1 = self.first.total_dim;
        self.first.dot(&u[..n1], &v[..n1]) + self.second.dot(&u[n1..], &v[n1..])
    }

    pub fn sign(&self, i: usize) -> f64 {
        let n1 = self.first.total_dim;
        if i < n1 {
            self.first.sign(i)
        } else {
            self.second.sign(i - n1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    Flat(Signature),
    Product(ProductLayout),
}

/// A point or vector of a flat signed space.
#[derive(Debug, Clone, PartialEq)]
pub struct AVec {
    coords: Vec<f64>,
    space: Space,
}

impl AVec {
    pub fn new(coords: Vec<f64>, signature: Signature) -> Result<Self> {
        if coords.len() != signature.total_dim {
            return invalid(format!(
                "expected {} coordinates, got {}",
                signature.total_dim,
                coords.len()
            ));
        }
        Ok(Self {
            coords,
            space: Space::Flat(signature),
        })
    }

    pub(crate) fn flat_unchecked(coords: Vec<f64>, signature: Signature) -> Self {
        debug_assert_eq!(coords.len(), signature.total_dim);
        Self {
            coords,
            space: Space::Flat(signature),
        }
    }

    pub fn product(coords: Vec<f64>, layout: ProductLayout) -> Result<Self> {
        if coords.len() != layout.total_dim() {
            return invalid(format!(
                "expected {} coordinates, got {}",
                layout.total_dim(),
                coords.len()
            ));
        }
        Ok(Self {
            coords,
            space: Space::Product(layout),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Signature of the space; for products the negative coordinates are
    /// counted but live at the head of each block.
    pub fn signature(&self) -> Signature {
        match self.space {
            Space::Flat(sig) => sig,
            Space::Product(l) => Signature {
                total_dim: l.total_dim(),
                index: l.index(),
            },
        }
    }

    pub fn layout(&self) -> Option<ProductLayout> {
        match self.space {
            Space::Product(l) => Some(l),
            Space::Flat(_) => None,
        }
    }

    fn raw_dot(&self, other: &[f64]) -> f64 {
        match self.space {
            Space::Flat(sig) => sig.dot(&self.coords, other),
            Space::Product(l) => l.dot(&self.coords, other),
        }
    }

    /// Linear combination `alpha * self + beta * other` in the same space.
    pub fn combine(&self, alpha: f64, other: &AVec, beta: f64) -> AVec {
        debug_assert_eq!(self.space, other.space);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        AVec {
            coords,
            space: self.space,
        }
    }

    pub fn scaled(&self, alpha: f64) -> AVec {
        AVec {
            coords: self.coords.iter().map(|c| alpha * c).collect(),
            space: self.space,
        }
    }
}

/// Signed inner product; minus on the negative-signature coordinates.
pub fn signed_dot(u: &AVec, v: &AVec) -> Result<f64> {
    if u.space != v.space {
        return Err(GeomError::InvalidInput(
            "signed_dot: vectors live in different signed spaces".into(),
        ));
    }
    Ok(u.raw_dot(&v.coords))
}

/// `(C_eps(s), S_eps(s))`: `(cos, sin)`, `(1, s)` or `(cosh, sinh)` for
/// `eps = 1, 0, -1`.
pub fn cs(eps: i8, s: f64) -> Result<(f64, f64)> {
    match eps {
        1 => Ok((s.cos(), s.sin())),
        0 => Ok((1.0, s)),
        -1 => Ok((s.cosh(), s.sinh())),
        _ => invalid(format!("eps must be -1, 0 or 1, got {eps}")),
    }
}

/// Infallible variant for an already validated `eps`.
#[inline]
pub(crate) fn cs_unchecked(eps: i8, s: f64) -> (f64, f64) {
    match eps {
        1 => (s.cos(), s.sin()),
        -1 => (s.cosh(), s.sinh()),
        _ => (1.0, s),
    }
}

/// A space form `Q^dim_c`, `c = eps / radius^2`, with its flat ambient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    dim: usize,
    eps: i8,
    radius: f64,
}

impl SpaceForm {
    pub fn new(dim: usize, eps: i8, radius: f64) -> Result<Self> {
        if dim == 0 {
            return invalid("space form dimension must be positive");
        }
        if !matches!(eps, -1..=1) {
            return invalid(format!("eps must be -1, 0 or 1, got {eps}"));
        }
        let radius = if eps == 0 {
            1.0
        } else {
            if !(radius.is_finite() && radius > 0.0) {
                return invalid(format!("radius must be positive, got {radius}"));
            }
            radius
        };
        Ok(Self { dim, eps, radius })
    }

    pub fn sphere(dim: usize) -> Self {
        Self {
            dim,
            eps: 1,
            radius: 1.0,
        }
    }

    pub fn hyperbolic(dim: usize) -> Self {
        Self {
            dim,
            eps: -1,
            radius: 1.0,
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            dim,
            eps: 0,
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ambient_dim(&self) -> usize {
        if self.eps == 0 {
            self.dim
        } else {
            self.dim + 1
        }
    }

    pub fn index(&self) -> usize {
        usize::from(self.eps == -1)
    }

    pub fn curvature(&self) -> f64 {
        f64::from(self.eps) / (self.radius * self.radius)
    }

    pub fn signature(&self) -> Signature {
        Signature {
            total_dim: self.ambient_dim(),
            index: self.index(),
        }
    }

    /// `(C, S)` evaluated at `s / r`.
    pub(crate) fn cs_scaled(&self, s: f64) -> (f64, f64) {
        cs_unchecked(self.eps, s / self.radius)
    }
}

/// Whether `p` satisfies the defining quadric of `form` within `tol`.
/// Flat factors impose no constraint.
pub fn on_space_form(p: &AVec, form: &SpaceForm, tol: f64) -> bool {
    if p.signature() != form.signature() || p.layout().is_some() {
        return false;
    }
    if form.eps == 0 {
        return true;
    }
    let target = f64::from(form.eps) * form.radius * form.radius;
    (p.raw_dot(&p.coords) - target).abs() <= tol
}

/// Concatenate two factor points into the product ambient space.
pub fn assemble_product_point(p1: &AVec, p2: &AVec) -> AVec {
    let layout = ProductLayout {
        first: p1.signature(),
        second: p2.signature(),
    };
    let mut coords = Vec::with_capacity(layout.total_dim());
    coords.extend_from_slice(&p1.coords);
    coords.extend_from_slice(&p2.coords);
    AVec {
        coords,
        space: Space::Product(layout),
    }
}

/// Which factor of a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    pub fn number(self) -> u8 {
        match self {
            Factor::First => 1,
            Factor::Second => 2,
        }
    }
}

impl TryFrom<u8> for Factor {
    type Error = GeomError;

    fn try_from(which: u8) -> Result<Self> {
        match which {
            1 => Ok(Factor::First),
            2 => Ok(Factor::Second),
            _ => invalid(format!("factor must be 1 or 2, got {which}")),
        }
    }
}

/// The factor slice of a product vector.
pub fn project_factor(p: &AVec, which: Factor) -> Result<AVec> {
    let layout = p.layout().ok_or_else(|| {
        GeomError::InvalidInput("project_factor: vector has no product layout".into())
    })?;
    let n1 = layout.first.total_dim;
    let (coords, sig) = match which {
        Factor::First => (p.coords[..n1].to_vec(), layout.first),
        Factor::Second => (p.coords[n1..].to_vec(), layout.second),
    };
    Ok(AVec::flat_unchecked(coords, sig))
}

/// The product projection onto one factor: the other factor's coordinates
/// are zeroed and the product layout is kept.
pub fn product_projection(p: &AVec, keep: Factor) -> Result<AVec> {
    let layout = p.layout().ok_or_else(|| {
        GeomError::InvalidInput("product_projection: vector has no product layout".into())
    })?;
    let n1 = layout.first.total_dim;
    let coords = p
        .coords
        .iter()
        .enumerate()
        .map(|(i, &c)| match keep {
            Factor::First if i < n1 => c,
            Factor::Second if i >= n1 => c,
            _ => 0.0,
        })
        .collect();
    Ok(AVec {
        coords,
        space: p.space,
    })
}
