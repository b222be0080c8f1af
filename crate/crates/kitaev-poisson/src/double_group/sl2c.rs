//! SL(2,C) as a real 6-dimensional double with `G_- = SU(2)` and `G_+` the
//! upper-triangular matrices with positive real diagonal.
//!
//! Basis: `x_1..x_3 = iσ_1, iσ_2, iσ_3` span `su(2)`, and `diag(1,-1), E_12, iE_12`
//! span the triangular part. The pairing is `B(X, ξ) = Im tr(Xξ)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{structure_constants_from, DoubleGroup, GroupError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major 2×2 complex matrix `[a, b, c, d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct M2(pub [Complex64; 4]);

impl M2 {
    pub const IDENTITY: M2 = M2([ONE, ZERO, ZERO, ONE]);

    pub fn mul(&self, o: &M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
    pub fn det(&self) -> Complex64 {
        let [a, b, c, d] = self.0;
        a * d - b * c
    }
    pub fn inv(&self) -> M2 {
        let [a, b, c, d] = self.0;
        let det = self.det();
        M2([d / det, -b / det, -c / det, a / det])
    }
    pub fn trace(&self) -> Complex64 {
        self.0[0] + self.0[3]
    }
    pub fn scale(&self, s: Complex64) -> M2 {
        M2(self.0.map(|z| z * s))
    }
    pub fn add(&self, o: &M2) -> M2 {
        M2([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
    pub fn adjoint_h(&self) -> M2 {
        let [a, b, c, d] = self.0;
        M2([a.conj(), c.conj(), b.conj(), d.conj()])
    }
    fn max_abs_diff(&self, o: &M2) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Traceless matrix from basis coordinates.
fn algebra_matrix(v: &[f64]) -> M2 {
    let y11 = Complex64::new(v[3], v[2]);
    let y12 = Complex64::new(v[1] + v[4], v[0] + v[5]);
    let y21 = Complex64::new(-v[1], v[0]);
    M2([y11, y12, y21, -y11])
}

/// Basis coordinates of a traceless matrix.
fn algebra_coords(y: &M2) -> [f64; 6] {
    let [y11, y12, y21, _] = y.0;
    let v1 = y21.im;
    let v2 = -y21.re;
    [v1, v2, y11.im, y11.re, y12.re - v2, y12.im - v1]
}

/// `cosh(√δ)` and `sinh(√δ)/√δ`, both entire in `δ`.
fn cosh_sinhc(delta: Complex64) -> (Complex64, Complex64) {
    if delta.norm() < 4.0 {
        let (mut c, mut s) = (ZERO, ZERO);
        let mut term = ONE; // δ^k / (2k)!
        for k in 0..30 {
            c += term;
            let t_odd = term / (2.0 * k as f64 + 1.0);
            s += t_odd;
            term = t_odd * delta / (2.0 * k as f64 + 2.0);
        }
        (c, s)
    } else {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

/// `asinh(s)/s` as a function of `u = s²`.
fn asinhc(u: Complex64) -> Complex64 {
    if u.norm() < 0.25 {
        let mut sum = ZERO;
        let mut coef = 1.0; // (2k)! / (4^k (k!)^2)
        let mut pow = ONE;
        for k in 0..60 {
            let kf = k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += pow * (sign * coef / (2.0 * kf + 1.0));
            coef *= (2.0 * kf + 1.0) / (2.0 * kf + 2.0);
            pow *= u;
        }
        sum
    } else {
        let s = u.sqrt();
        s.asinh() / s
    }
}

#[derive(Debug, Clone)]
pub struct Sl2c {
    consts: Vec<f64>,
}

impl Default for Sl2c {
    fn default() -> Self {
        Self::new()
    }
}

impl Sl2c {
    pub fn new() -> Self {
        let basis: Vec<M2> = (0..6)
            .map(|k| {
                let mut v = [0.0; 6];
                v[k] = 1.0;
                algebra_matrix(&v)
            })
            .collect();
        let consts = structure_constants_from(6, |i, j| {
            let c = basis[i].mul(&basis[j]).add(&basis[j].mul(&basis[i]).scale(-ONE));
            algebra_coords(&c).to_vec()
        });
        Self { consts }
    }

    pub fn algebra_matrix(v: &[f64]) -> M2 {
        algebra_matrix(v)
    }
}

impl DoubleGroup for Sl2c {
    type Elem = M2;

    fn name(&self) -> String {
        "sl2c".into()
    }
    fn dim_minus(&self) -> usize {
        3
    }
    fn dim_plus(&self) -> usize {
        3
    }
    fn identity(&self) -> M2 {
        M2::IDENTITY
    }
    fn mul(&self, a: &M2, b: &M2) -> M2 {
        a.mul(b)
    }
    fn inv(&self, a: &M2) -> M2 {
        a.inv()
    }

    fn exp(&self, v: &[f64]) -> M2 {
        let x = algebra_matrix(v);
        let [a, b, c, _] = x.0;
        let (ch, sc) = cosh_sinhc(a * a + b * c);
        M2::IDENTITY.scale(ch).add(&x.scale(sc))
    }

    fn log(&self, g: &M2) -> Result<Vec<f64>, GroupError> {
        let t = g.trace() * 0.5;
        let dist = g.max_abs_diff(&M2::IDENTITY);
        if t.re <= 0.25 || dist > 1.5 {
            return Err(GroupError::LogOutOfRange(dist));
        }
        let [a, b, c, _] = g.0;
        let a0 = a - t;
        // traceless part M0 satisfies M0² = sinh²θ with cosh θ = t
        let u = a0 * a0 + b * c;
        let k = asinhc(u);
        let m0 = M2([a0, b, c, -a0]).scale(k);
        Ok(algebra_coords(&m0).to_vec())
    }

    fn adjoint(&self, g: &M2) -> DMatrix<f64> {
        let gi = g.inv();
        let mut a = DMatrix::zeros(6, 6);
        for j in 0..6 {
            let mut v = [0.0; 6];
            v[j] = 1.0;
            let y = g.mul(&algebra_matrix(&v)).mul(&gi);
            let col = algebra_coords(&y);
            for i in 0..6 {
                a[(i, j)] = col[i];
            }
        }
        a
    }

    /// Modified Gram-Schmidt on the columns of `g`.
    fn try_factorize(&self, g: &M2) -> Result<(M2, M2), GroupError> {
        let [a, b, c, d] = g.0;
        let r11 = (a.norm_sqr() + c.norm_sqr()).sqrt();
        if !(r11 > 1e-300) || !r11.is_finite() {
            return Err(GroupError::FactorizationFailed("first column vanishes".into()));
        }
        let (q1a, q1c) = (a / r11, c / r11);
        let r12 = q1a.conj() * b + q1c.conj() * d;
        let (pb, pd) = (b - r12 * q1a, d - r12 * q1c);
        let r22 = (pb.norm_sqr() + pd.norm_sqr()).sqrt();
        if !(r22 > 1e-300) || !r22.is_finite() {
            return Err(GroupError::FactorizationFailed("columns are dependent".into()));
        }
        let (q2b, q2d) = (pb / r22, pd / r22);
        let q = M2([q1a, q2b, q1c, q2d]);
        let r = M2([Complex64::new(r11, 0.0), r12, ZERO, Complex64::new(r22, 0.0)]);
        Ok((q, r))
    }

    fn minus_defect(&self, g: &M2) -> f64 {
        let u = g.adjoint_h().mul(g);
        u.max_abs_diff(&M2::IDENTITY).max((g.det() - ONE).norm())
    }

    fn plus_defect(&self, g: &M2) -> f64 {
        let [a, _, c, d] = g.0;
        let neg = (-a.re).max(-d.re).max(0.0);
        c.norm().max(a.im.abs()).max(d.im.abs()).max(neg).max((g.det() - ONE).norm())
    }

    fn structure_constants(&self) -> &[f64] {
        &self.consts
    }

    fn pairing(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(3, 3);
        for j in 0..3 {
            for k in 0..3 {
                let mut vx = [0.0; 6];
                vx[j] = 1.0;
                let mut vxi = [0.0; 6];
                vxi[3 + k] = 1.0;
                p[(j, k)] = algebra_matrix(&vx).mul(&algebra_matrix(&vxi)).trace().im;
            }
        }
        p
    }

    fn to_floats(&self, g: &M2) -> Vec<f64> {
        g.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    fn from_floats(&self, c: &[f64]) -> Result<M2, GroupError> {
        if c.len() != 8 {
            return Err(GroupError::BadLength { expected: 8, got: c.len() });
        }
        let m = M2([
            Complex64::new(c[0], c[1]),
            Complex64::new(c[2], c[3]),
            Complex64::new(c[4], c[5]),
            Complex64::new(c[6], c[7]),
        ]);
        let det = m.det();
        if !c.iter().all(|x| x.is_finite()) || (det - ONE).norm() > 1e-9 {
            return Err(GroupError::NotInGroup(format!("determinant {det}")));
        }
        Ok(self.renormalize(&m))
    }

    fn trace(&self, g: &M2) -> Complex64 {
        g.trace()
    }

    fn renormalize(&self, g: &M2) -> M2 {
        g.scale(ONE / g.det().sqrt())
    }
}
