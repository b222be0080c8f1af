//! Global double Poisson-Lie groups `G = G_- G_+` and their canonical r-matrix.
//!
//! Every tangent vector is right-trivialized: the coordinate vector `ξ` at `g`
//! stands for `TR_g ξ = ξ g`, expanded in the backend basis `x_1..x_d` (first the
//! `g_-` basis, then the `g_+` basis). A bivector at `g` is then a plain `d × d`
//! matrix `W` meaning `Σ W^{ij} TR_g x_i ⊗ TR_g x_j`, and left translation turns
//! into conjugation by the adjoint matrix (`TL_g ξ = TR_g Ad_g ξ`).

mod abelian;
mod sl2c;

pub use abelian::AbelianDouble;
pub use sl2c::{Sl2c, M2};

use std::fmt::Debug;
use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupError {
    #[error("pairing matrix is singular")]
    SingularPairing,
    #[error("factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("logarithm out of range: element is {0:.3e} away from the identity")]
    LogOutOfRange(f64),
    #[error("expected {expected} floats, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("element does not lie in the group: {0}")]
    NotInGroup(String),
}

/// A concrete global double with exact factorization.
pub trait DoubleGroup: Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> String;
    fn dim_minus(&self) -> usize;
    fn dim_plus(&self) -> usize;
    fn dim(&self) -> usize {
        self.dim_minus() + self.dim_plus()
    }

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn exp(&self, v: &[f64]) -> Self::Elem;
    fn log(&self, g: &Self::Elem) -> Result<Vec<f64>, GroupError>;

    /// Matrix of `Ad_g` in the backend basis.
    fn adjoint(&self, g: &Self::Elem) -> DMatrix<f64>;

    /// `g = g_- g_+`.
    fn try_factorize(&self, g: &Self::Elem) -> Result<(Self::Elem, Self::Elem), GroupError>;

    /// Distance of `g` from `G_-` measured on natural coordinates.
    fn minus_defect(&self, g: &Self::Elem) -> f64;
    /// Distance of `g` from `G_+` measured on natural coordinates.
    fn plus_defect(&self, g: &Self::Elem) -> f64;

    /// Structure constants, `c[(i * d + j) * d + k]` is the `x_k` coefficient of `[x_i, x_j]`.
    fn structure_constants(&self) -> &[f64];

    /// `P_{jk} = B(x_j, ξ_k)` for the `g_-` basis `x_j` and the `g_+` basis `ξ_k`.
    fn pairing(&self) -> DMatrix<f64>;

    fn to_floats(&self, g: &Self::Elem) -> Vec<f64>;
    fn from_floats(&self, c: &[f64]) -> Result<Self::Elem, GroupError>;

    /// Character used for class functions.
    fn trace(&self, g: &Self::Elem) -> Complex64;

    /// Whether every map of interest is affine in the coordinates, so that
    /// finite differences are exact up to rounding.
    fn exact_oracle(&self) -> bool {
        false
    }

    /// Undo drift after long products.
    fn renormalize(&self, g: &Self::Elem) -> Self::Elem {
        g.clone()
    }

    fn factorize(&self, g: &Self::Elem) -> (Self::Elem, Self::Elem) {
        self.try_factorize(g).expect("global double: factorization exists")
    }
    fn pi_minus(&self, g: &Self::Elem) -> Self::Elem {
        self.factorize(g).0
    }
    fn pi_plus(&self, g: &Self::Elem) -> Self::Elem {
        self.factorize(g).1
    }

    /// Max-norm distance on the serialized coordinates.
    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> f64 {
        max_abs_diff(&self.to_floats(a), &self.to_floats(b))
    }

    fn mul3(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(a, b), c)
    }

    /// `exp` of a vector drawn uniformly from the ball of the given radius.
    fn random<R: Rng>(&self, rng: &mut R, radius: f64) -> Self::Elem
    where
        Self: Sized,
    {
        self.exp(&random_ball(rng, self.dim(), radius))
    }
    fn random_minus<R: Rng>(&self, rng: &mut R, radius: f64) -> Self::Elem
    where
        Self: Sized,
    {
        let mut v = random_ball(rng, self.dim(), radius);
        v[self.dim_minus()..].iter_mut().for_each(|x| *x = 0.0);
        self.exp(&v)
    }
    fn random_plus<R: Rng>(&self, rng: &mut R, radius: f64) -> Self::Elem
    where
        Self: Sized,
    {
        let mut v = random_ball(rng, self.dim(), radius);
        v[..self.dim_minus()].iter_mut().for_each(|x| *x = 0.0);
        self.exp(&v)
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Uniform sample of the closed ball by rejection from the cube.
pub fn random_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    if radius == 0.0 {
        return vec![0.0; dim];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// A backend together with its canonical r-matrix and the three bivector fields.
#[derive(Debug, Clone)]
pub struct PoissonDouble<G: DoubleGroup> {
    pub group: G,
    /// `r ∈ g_- ⊗ g_+`
    pub r: DMatrix<f64>,
    pub r_a: DMatrix<f64>,
    pub r_s: DMatrix<f64>,
}

impl<G: DoubleGroup> Deref for PoissonDouble<G> {
    type Target = G;
    fn deref(&self) -> &G {
        &self.group
    }
}

impl<G: DoubleGroup> PoissonDouble<G> {
    pub fn new(group: G) -> Result<Self, GroupError> {
        let r = build_r_matrix(&group)?;
        let rt = r.transpose();
        let r_a = (&r - &rt) * 0.5;
        let r_s = (&r + &rt) * 0.5;
        Ok(Self { group, r, r_a, r_s })
    }

    pub fn r21(&self) -> DMatrix<f64> {
        self.r.transpose()
    }

    /// Sklyanin bivector `TL⊗TL r − TR⊗TR r`.
    pub fn w(&self, g: &G::Elem) -> DMatrix<f64> {
        let a = self.adjoint(g);
        &a * &self.r * a.transpose() - &self.r
    }

    /// Heisenberg double bivector `−(TL⊗TL + TR⊗TR) r_a`.
    pub fn w_heisenberg(&self, g: &G::Elem) -> DMatrix<f64> {
        let a = self.adjoint(g);
        -(&a * &self.r_a * a.transpose() + &self.r_a)
    }

    /// Dual-group bivector `w_H − TL⊗TR r_21 + TR⊗TL r`.
    pub fn w_gstar(&self, g: &G::Elem) -> DMatrix<f64> {
        let a = self.adjoint(g);
        let r21 = self.r21();
        -(&a * &self.r_a * a.transpose() + &self.r_a) - &a * r21 + &self.r * a.transpose()
    }

    /// Max residual of the four computation rules for `π_±` on one tuple.
    pub fn projection_rules_residual(
        &self,
        g: &G::Elem,
        h: &G::Elem,
        x: &G::Elem,
        alpha: &G::Elem,
    ) -> f64 {
        let gr = &self.group;
        let gh = gr.mul(g, h);
        let r1 = gr.dist(&gr.pi_minus(&gr.mul(g, &gr.pi_minus(h))), &gr.pi_minus(&gh));
        let r2 = gr.dist(&gr.pi_plus(&gr.mul(&gr.pi_plus(g), h)), &gr.pi_plus(&gh));
        let r3 = gr.dist(&gr.pi_minus(&gr.mul(x, g)), &gr.mul(x, &gr.pi_minus(g)));
        let r4 = gr.dist(&gr.pi_plus(&gr.mul(g, alpha)), &gr.mul(&gr.pi_plus(g), alpha));
        r1.max(r2).max(r3).max(r4)
    }
}

/// `r = Σ_k x_k ⊗ ξ^k` with `ξ^k` the pairing-dual basis of `g_+`.
pub fn build_r_matrix<G: DoubleGroup>(group: &G) -> Result<DMatrix<f64>, GroupError> {
    let (dm, dp) = (group.dim_minus(), group.dim_plus());
    if dm != dp {
        return Err(GroupError::SingularPairing);
    }
    let p = group.pairing();
    let pinv = p.try_inverse().ok_or(GroupError::SingularPairing)?;
    if !pinv.iter().all(|x| x.is_finite()) {
        return Err(GroupError::SingularPairing);
    }
    let d = dm + dp;
    let mut r = DMatrix::zeros(d, d);
    for k in 0..dm {
        for m in 0..dp {
            r[(k, dm + m)] = pinv[(m, k)];
        }
    }
    Ok(r)
}

/// Max entry of `[r12,r13] + [r12,r23] + [r13,r23]`.
pub fn cybe_residual<G: DoubleGroup>(group: &G, r: &DMatrix<f64>) -> f64 {
    let d = group.dim();
    let c = group.structure_constants();
    let br = |i: usize, j: usize, k: usize| c[(i * d + j) * d + k];
    let mut t = vec![0.0; d * d * d];
    let idx = |a: usize, b: usize, cc: usize| (a * d + b) * d + cc;
    for a in 0..d {
        for b in 0..d {
            let rab = r[(a, b)];
            if rab == 0.0 {
                continue;
            }
            for cc in 0..d {
                for dd in 0..d {
                    let rcd = r[(cc, dd)];
                    if rcd == 0.0 {
                        continue;
                    }
                    let w = rab * rcd;
                    for k in 0..d {
                        // [x_a, x_c] ⊗ x_b ⊗ x_d
                        t[idx(k, b, dd)] += w * br(a, cc, k);
                        // x_a ⊗ [x_b, x_c] ⊗ x_d
                        t[idx(a, k, dd)] += w * br(b, cc, k);
                        // x_a ⊗ x_c ⊗ [x_b, x_d]
                        t[idx(a, cc, k)] += w * br(b, dd, k);
                    }
                }
            }
        }
    }
    t.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Structure constants from a bracket on coordinate vectors.
pub(crate) fn structure_constants_from(d: usize, bracket: impl Fn(usize, usize) -> Vec<f64>) -> Vec<f64> {
    let mut c = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let b = bracket(i, j);
            c[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&b);
        }
    }
    c
}

/// Max entry of a matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
