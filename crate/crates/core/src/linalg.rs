//! Small dense helpers for 4×4 and 3×3 problems.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Float;

use crate::jets::{Jet1, Jet2, DIM};
use crate::scalar::Scalar;

pub type Mat4<S> = [[S; DIM]; DIM];
pub type Vec4<S> = [S; DIM];

/// Ring element with a real value channel used for pivoting.
pub trait Entry:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    type Real: Scalar;
    fn real(&self) -> Self::Real;
    fn from_real(x: Self::Real) -> Self;
}

impl<T: Scalar> Entry for T {
    type Real = T;
    fn real(&self) -> T {
        *self
    }
    fn from_real(x: T) -> T {
        x
    }
}

impl<T: Scalar> Entry for Jet2<T> {
    type Real = T;
    fn real(&self) -> T {
        self.value()
    }
    fn from_real(x: T) -> Self {
        Jet2::constant(x)
    }
}

impl<T: Scalar> Entry for Jet1<T> {
    type Real = T;
    fn real(&self) -> T {
        self.value
    }
    fn from_real(x: T) -> Self {
        Jet1::constant(x)
    }
}

/// Additive identity of any entry type.
pub fn zero<S: Entry>() -> S {
    S::from_real(<S::Real as num_traits::Zero>::zero())
}

pub fn zero4<S: Entry>() -> Mat4<S> {
    [[S::from_real(<S::Real as num_traits::Zero>::zero()); DIM]; DIM]
}

pub fn identity4<S: Entry>() -> Mat4<S> {
    let mut m = zero4::<S>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::from_real(<S::Real as num_traits::One>::one());
    }
    m
}

pub fn matmul4<S: Entry>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    let mut out = zero4::<S>();
    for i in 0..DIM {
        for j in 0..DIM {
            let mut acc = a[i][0] * b[0][j];
            for k in 1..DIM {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn transpose4<S: Copy>(a: &Mat4<S>) -> Mat4<S> {
    let mut out = *a;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

pub fn matvec4<S: Entry>(a: &Mat4<S>, v: &Vec4<S>) -> Vec4<S> {
    let mut out = [v[0]; DIM];
    for i in 0..DIM {
        let mut acc = a[i][0] * v[0];
        for k in 1..DIM {
            acc = acc + a[i][k] * v[k];
        }
        out[i] = acc;
    }
    out
}

pub fn values4<T: Scalar>(a: &Mat4<Jet2<T>>) -> Mat4<T> {
    let mut out = [[T::zero(); DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = a[i][j].value();
        }
    }
    out
}

pub fn max_abs4<T: Scalar>(a: &Mat4<T>) -> T {
    a.iter().flatten().fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
}

/// Outcome of a 4×4 inversion.
#[derive(Debug, Clone, Copy)]
pub struct Inverse<S: Entry> {
    pub inverse: Mat4<S>,
    pub det: S::Real,
}

/// Gauss-Jordan elimination with partial pivoting on the value channel.
///
/// Returns `Err((det, scale))` when `|det| <= rel_tol * scale`, where
/// `scale = max|a_ij|^4`.
pub fn invert4<S: Entry>(a: &Mat4<S>, rel_tol: S::Real) -> Result<Inverse<S>, (S::Real, S::Real)> {
    let zero = <S::Real as num_traits::Zero>::zero();
    let one = <S::Real as num_traits::One>::one();
    let mut m = *a;
    let mut inv = identity4::<S>();
    let mut det = one;
    let mut scale = zero;
    for row in a.iter() {
        for v in row.iter() {
            scale = scale.max(v.real().abs());
        }
    }
    let scale4 = scale.powi(4);
    for col in 0..DIM {
        let mut piv = col;
        for r in col + 1..DIM {
            if m[r][col].real().abs() > m[piv][col].real().abs() {
                piv = r;
            }
        }
        if m[piv][col].real() == zero {
            return Err((zero, scale4));
        }
        if piv != col {
            m.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det = det * p.real();
        for j in 0..DIM {
            m[col][j] = m[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..DIM {
            if r == col {
                continue;
            }
            let f = m[r][col];
            for j in 0..DIM {
                m[r][j] = m[r][j] - f * m[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    if !(det.abs() > rel_tol * scale4) {
        return Err((det, scale4));
    }
    Ok(Inverse { inverse: inv, det })
}

/// Eigenvalues of a real symmetric 3×3 matrix by cyclic Jacobi rotations,
/// sorted ascending. Exact on diagonal input.
pub fn sym3_eigenvalues<T: Scalar>(a: &[[T; 3]; 3]) -> [T; 3] {
    let mut m = *a;
    // symmetrize
    for i in 0..3 {
        for j in i + 1..3 {
            let s = (m[i][j] + m[j][i]) * T::lit(0.5);
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    for _sweep in 0..64 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        let diag = m[0][0].abs() + m[1][1].abs() + m[2][2].abs();
        if off == T::zero() || off <= T::epsilon() * T::epsilon() * diag {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q] == T::zero() {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = (t * t + T::one()).sqrt().recip();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
        }
    }
    let mut ev = [m[0][0], m[1][1], m[2][2]];
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::seed_all;

    #[test]
    fn inverse_of_identity() {
        let id = identity4::<f64>();
        let inv = invert4(&id, 1e-12).unwrap();
        assert_eq!(inv.inverse, id);
        assert_eq!(inv.det, 1.0);
    }

    #[test]
    fn diagonal_jet_inverse_has_exact_derivative_channels() {
        let c = seed_all([1.5, 2.0, 0.5, 3.0]);
        let mut g = zero4::<Jet2<f64>>();
        g[0][0] = c[0] * c[0];
        g[1][1] = c[1] + 1.0;
        g[2][2] = c[2].exp();
        g[3][3] = c[0] * c[3];
        let inv = invert4(&g, 1e-12).unwrap().inverse;
        for i in 0..4 {
            let expected = g[i][i].recip();
            assert!((inv[i][i].value() - expected.value()).abs() < 1e-14);
            for k in 0..4 {
                assert!((inv[i][i].d(k) - expected.d(k)).abs() < 1e-13);
                for l in 0..4 {
                    assert!((inv[i][i].hess(k, l) - expected.hess(k, l)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut m = identity4::<f64>();
        m[3][3] = 0.0;
        assert!(invert4(&m, 1e-12).is_err());
        let mut m = identity4::<f64>();
        m[3][3] = 1e-14;
        assert!(invert4(&m, 1e-12).is_err());
    }

    #[test]
    fn jacobi_eigenvalues() {
        let d = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -3.0]];
        assert_eq!(sym3_eigenvalues(&d), [-3.0, 1.0, 2.0]);
        let a = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let ev = sym3_eigenvalues(&a);
        for (x, y) in ev.iter().zip([1.0, 3.0, 5.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
