//! The self-dual block of the curvature operator.
//!
//! With `R'_{abcd} = R_{abdc}` (so that the round sphere has positive
//! curvature operator) and frame legs `0..3` standing for `e¹..e⁴`,
//!
//! `A_ij = ½ [R'_{0i0j} + ½ ε_jkl R'_{0ikl} + ½ ε_imn R'_{mn0j} + ¼ ε_imn ε_jkl R'_{mnkl}]`
//!
//! for `i, j ∈ {1,2,3}`. This is the matrix of `ℛ` on the orthonormal basis
//! `Ω⁺ = {e¹∧e² + e³∧e⁴, e¹∧e³ + e⁴∧e², e¹∧e⁴ + e²∧e³}/√2`, and
//! `A = W⁺ + (R/12) I`.

use crate::chart::ChartPoint;
use crate::curvature::{curvature, CurvatureBundle, Rank4, SCALE_FLOOR};
use crate::error::{GeometryError, Result};
use crate::forms::levi_civita3;
use crate::frame::FrameField;
use crate::jets::DIM;
use crate::linalg::sym3_eigenvalues;
use crate::metric::MetricField;
use crate::scalar::Scalar;

/// Frames whose Gram matrix deviates from the identity by more than this are
/// rejected.
pub const FRAME_ORTHONORMALITY_TOL: f64 = 1e-8;
/// Pair-degeneracy tolerance of the `{λ, λ, −2λ}` detector.
pub const DEGENERACY_TOL: f64 = 1e-7;
/// `W⁺` counts as vanishing below this fraction of the frame curvature scale.
pub const VANISHING_REL_TOL: f64 = 1e-9;

pub const WEYL_CONVENTION: &str =
    "A_ij = 1/2 [R'_0i0j + 1/2 e_jkl R'_0ikl + 1/2 e_imn R'_mn0j + 1/4 e_imn e_jkl R'_mnkl], \
R'_abcd = R_abdc in an oriented orthonormal frame, leg 0 = e1, e_123 = +1; A = W+ + (R/12) I";

pub type Mat3<T> = [[T; 3]; 3];

/// `R_{abcd}` in the frame: `R_{ijkl} e_a^i e_b^j e_c^k e_d^l`.
pub fn frame_riemann<T: Scalar>(lowered: &Rank4<T>, frame: &[[T; DIM]; DIM]) -> Rank4<T> {
    let z = T::zero();
    // contract one index at a time
    let mut t1 = [[[[z; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut s = z;
                    for i in 0..DIM {
                        s = s + frame[a][i] * lowered[i][j][k][l];
                    }
                    t1[a][j][k][l] = s;
                }
            }
        }
    }
    let mut t2 = [[[[z; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut s = z;
                    for j in 0..DIM {
                        s = s + frame[b][j] * t1[a][j][k][l];
                    }
                    t2[a][b][k][l] = s;
                }
            }
        }
    }
    let mut t3 = [[[[z; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for l in 0..DIM {
                    let mut s = z;
                    for k in 0..DIM {
                        s = s + frame[c][k] * t2[a][b][k][l];
                    }
                    t3[a][b][c][l] = s;
                }
            }
        }
    }
    let mut out = [[[[z; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let mut s = z;
                    for l in 0..DIM {
                        s = s + frame[d][l] * t3[a][b][c][l];
                    }
                    out[a][b][c][d] = s;
                }
            }
        }
    }
    out
}

/// `A` from frame components of `R_{abcd}`.
pub fn a_matrix<T: Scalar>(rf: &Rank4<T>) -> Mat3<T> {
    // R'_{abcd} = R_{abdc}
    let rp = |a: usize, b: usize, c: usize, d: usize| rf[a][b][d][c];
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = rp(0, i + 1, 0, j + 1);
            for k in 0..3 {
                for l in 0..3 {
                    let e = levi_civita3(j, k, l);
                    if e != 0 {
                        v = v + half * T::lit(e as f64) * rp(0, i + 1, k + 1, l + 1);
                    }
                }
            }
            for m in 0..3 {
                for n in 0..3 {
                    let e = levi_civita3(i, m, n);
                    if e != 0 {
                        v = v + half * T::lit(e as f64) * rp(m + 1, n + 1, 0, j + 1);
                    }
                }
            }
            for m in 0..3 {
                for n in 0..3 {
                    let e1 = levi_civita3(i, m, n);
                    if e1 == 0 {
                        continue;
                    }
                    for k in 0..3 {
                        for l in 0..3 {
                            let e2 = levi_civita3(j, k, l);
                            if e2 != 0 {
                                v = v + quarter * T::lit((e1 * e2) as f64) * rp(m + 1, n + 1, k + 1, l + 1);
                            }
                        }
                    }
                }
            }
            out[i][j] = half * v;
        }
    }
    out
}

/// `A = W⁺ + (R/12) I` at `p` in the given oriented orthonormal frame.
pub fn weyl_plus_matrix<T: Scalar>(
    metric: &MetricField<T>,
    p: &ChartPoint<T>,
    frame: &FrameField<T>,
) -> Result<Mat3<T>> {
    Ok(weyl_plus_at(metric, p, frame)?.matrix)
}

/// Eigen-analysis of a symmetric 3×3 matrix against the `{λ, λ, −2λ}` pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylSpectrum<T> {
    /// Ascending.
    pub eigenvalues: [T; 3],
    /// `|λ_pair − λ_pair'| / max(1, |λ_distinct|)` for the closest pair.
    pub degeneracy_residual: T,
    /// The eigenvalue outside the closest pair.
    pub distinct: T,
    /// `|Σλ| / max(1, |λ_distinct|)`.
    pub trace_residual: T,
    pub pattern_match: bool,
    /// All eigenvalues below the vanishing threshold; the Derdziński factor
    /// is then undefined.
    pub vanishes: bool,
}

/// Spectrum with vanishing judged against `scale` (use 1 for an absolute test).
pub fn weyl_plus_spectrum_scaled<T: Scalar>(a: &Mat3<T>, scale: T) -> WeylSpectrum<T> {
    let ev = sym3_eigenvalues(a);
    let d01 = ev[1] - ev[0];
    let d12 = ev[2] - ev[1];
    let (gap, distinct) = if d01 <= d12 { (d01, ev[2]) } else { (d12, ev[0]) };
    let norm = distinct.abs().max(T::one());
    let degeneracy_residual = gap.abs() / norm;
    let trace_residual = (ev[0] + ev[1] + ev[2]).abs() / norm;
    let top = ev.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    WeylSpectrum {
        eigenvalues: ev,
        degeneracy_residual,
        distinct,
        trace_residual,
        pattern_match: degeneracy_residual.as_f64() <= DEGENERACY_TOL,
        vanishes: top.as_f64() <= VANISHING_REL_TOL * scale.as_f64(),
    }
}

pub fn weyl_plus_spectrum<T: Scalar>(a: &Mat3<T>) -> WeylSpectrum<T> {
    weyl_plus_spectrum_scaled(a, T::one())
}

/// Everything the Weyl analysis needs at one point.
#[derive(Debug, Clone)]
pub struct WeylPlus<T> {
    pub matrix: Mat3<T>,
    /// `A − (tr A / 3) I`, i.e. `W⁺` itself.
    pub weyl: Mat3<T>,
    pub spectrum: WeylSpectrum<T>,
    /// `|tr A − R/4| / (|R| + scale)`.
    pub trace_identity_residual: T,
    /// Largest frame component of the curvature tensor.
    pub frame_scale: T,
    pub curvature: CurvatureBundle<T>,
}

impl<T: Scalar> WeylPlus<T> {
    /// `|W⁺|² = Σ λ²`.
    pub fn norm2(&self) -> T {
        self.spectrum.eigenvalues.iter().fold(T::zero(), |s, l| s + *l * *l)
    }

    /// `Σ λ²` against the Frobenius norm of `W⁺`, relative.
    pub fn frobenius_residual(&self) -> T {
        let f = self.weyl.iter().flatten().fold(T::zero(), |s, v| s + *v * *v);
        (self.norm2() - f).abs() / (f + T::lit(SCALE_FLOOR))
    }
}

pub fn weyl_plus_at<T: Scalar>(
    metric: &MetricField<T>,
    p: &ChartPoint<T>,
    frame: &FrameField<T>,
) -> Result<WeylPlus<T>> {
    let ortho = frame.orthonormality_residual(metric, p)?;
    if !(ortho.as_f64() <= FRAME_ORTHONORMALITY_TOL) {
        return Err(GeometryError::Contract(format!(
            "frame `{}` is not orthonormal for `{}` at {:?} (Gram residual {:e})",
            frame.label(),
            metric.name(),
            p.coords_f64(),
            ortho.as_f64()
        )));
    }
    let bundle = curvature(metric, p)?;
    let fv = frame.frame_values(p)?;
    let rf = frame_riemann(&bundle.riemann_lowered, &fv);
    let frame_scale = rf.iter().flatten().flatten().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    let matrix = a_matrix(&rf);
    let tr = matrix[0][0] + matrix[1][1] + matrix[2][2];
    let mut weyl = matrix;
    for (i, row) in weyl.iter_mut().enumerate() {
        row[i] = row[i] - tr / T::lit(3.0);
    }
    let spectrum = weyl_plus_spectrum_scaled(&weyl, frame_scale + T::lit(SCALE_FLOOR));
    let trace_identity_residual =
        (tr - bundle.scalar * T::lit(0.25)).abs() / (bundle.scalar.abs() + frame_scale + T::lit(SCALE_FLOOR));
    Ok(WeylPlus { matrix, weyl, spectrum, trace_identity_residual, frame_scale, curvature: bundle })
}
