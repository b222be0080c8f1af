//! `R^n ⊕ R^n` with both factors abelian: the first `n` coordinates are the
//! `G_-` part, the last `n` the `G_+` part, and the pairing is the dot product.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DoubleGroup, GroupError};

#[derive(Debug, Clone)]
pub struct AbelianDouble {
    n: usize,
    consts: Vec<f64>,
}

impl AbelianDouble {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "abelian double needs n >= 1");
        let d = 2 * n;
        Self { n, consts: vec![0.0; d * d * d] }
    }
    pub fn n(&self) -> usize {
        self.n
    }
}

impl DoubleGroup for AbelianDouble {
    type Elem = Vec<f64>;

    fn name(&self) -> String {
        format!("abelian:{}", self.n)
    }
    fn exact_oracle(&self) -> bool {
        true
    }
    fn dim_minus(&self) -> usize {
        self.n
    }
    fn dim_plus(&self) -> usize {
        self.n
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0; 2 * self.n]
    }
    fn mul(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn inv(&self, a: &Vec<f64>) -> Vec<f64> {
        a.iter().map(|x| -x).collect()
    }
    fn exp(&self, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
    fn log(&self, g: &Vec<f64>) -> Result<Vec<f64>, GroupError> {
        Ok(g.clone())
    }
    fn adjoint(&self, _g: &Vec<f64>) -> DMatrix<f64> {
        DMatrix::identity(2 * self.n, 2 * self.n)
    }
    fn try_factorize(&self, g: &Vec<f64>) -> Result<(Vec<f64>, Vec<f64>), GroupError> {
        let n = self.n;
        let mut m = g.clone();
        let mut p = g.clone();
        m[n..].iter_mut().for_each(|x| *x = 0.0);
        p[..n].iter_mut().for_each(|x| *x = 0.0);
        Ok((m, p))
    }
    fn minus_defect(&self, g: &Vec<f64>) -> f64 {
        g[self.n..].iter().fold(0.0, |m, x| m.max(x.abs()))
    }
    fn plus_defect(&self, g: &Vec<f64>) -> f64 {
        g[..self.n].iter().fold(0.0, |m, x| m.max(x.abs()))
    }
    fn structure_constants(&self) -> &[f64] {
        &self.consts
    }
    fn pairing(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
    }
    fn to_floats(&self, g: &Vec<f64>) -> Vec<f64> {
        g.clone()
    }
    fn from_floats(&self, c: &[f64]) -> Result<Vec<f64>, GroupError> {
        if c.len() != 2 * self.n {
            return Err(GroupError::BadLength { expected: 2 * self.n, got: c.len() });
        }
        if !c.iter().all(|x| x.is_finite()) {
            return Err(GroupError::NotInGroup("non-finite coordinate".into()));
        }
        Ok(c.to_vec())
    }
    /// `Σ_k exp(i g_k)`, a unitary character.
    fn trace(&self, g: &Vec<f64>) -> Complex64 {
        g.iter().map(|&x| Complex64::new(0.0, x).exp()).sum()
    }
}
