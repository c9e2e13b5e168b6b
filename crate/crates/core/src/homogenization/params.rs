use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{solve_spd, SquareMatrix};
use crate::math::relative;
use crate::tensor::{kron, Dense, Dim, GradElasticTensor, OrthogonalTransform};
use crate::{Error, Result};

/// Relative residual below which a tensor counts as having the
/// orthotropic structure.
pub const STRUCTURE_TOLERANCE: f64 = 1e-10;

/// Orthotropic nonlocal parameters (units of stress x length²).
///
/// `a2[k]`, `a4[k]`, `a5[k]` weight the per-axis kernels built on
/// `e_[k] (x) e_[k]`; `a6` and `a9` (2D only) weight the shear-coupling and
/// axial kernels of the five-parameter structure. Axis `k` is column `k` of
/// `axes`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalParams {
    pub axes: OrthogonalTransform,
    pub a2: Vec<f64>,
    pub a4: Vec<f64>,
    pub a5: Vec<f64>,
    pub a6: Option<f64>,
    pub a9: Option<f64>,
}

impl NonlocalParams {
    pub fn zeros(axes: OrthogonalTransform) -> Self {
        let n = axes.dim().n();
        let extra = (axes.dim() == Dim::Two).then_some(0.0);
        NonlocalParams {
            axes,
            a2: vec![0.0; n],
            a4: vec![0.0; n],
            a5: vec![0.0; n],
            a6: extra,
            a9: extra,
        }
    }

    /// `a2[k] = -f rho_k^2 lambda / 2`, `a4[k] = a5[k] = -f rho_k^2 mu / 2`,
    /// and, given `(xi, omega)` with a spherical inertia `rho^2 I`,
    /// `a6 = -f rho^2 xi / 2`, `a9 = -f rho^2 omega / 2`.
    pub fn from_moduli(
        axes: OrthogonalTransform,
        f: f64,
        radii_squared: &[f64],
        lambda: f64,
        mu: f64,
        coupling: Option<(f64, f64)>,
    ) -> Self {
        let c: Vec<f64> = radii_squared.iter().map(|r| -f * r / 2.0).collect();
        NonlocalParams {
            a2: c.iter().map(|c| c * lambda).collect(),
            a4: c.iter().map(|c| c * mu).collect(),
            a5: c.iter().map(|c| c * mu).collect(),
            a6: coupling.map(|(xi, _)| c[0] * xi),
            a9: coupling.map(|(_, omega)| c[0] * omega),
            axes,
        }
    }

    pub fn dim(&self) -> Dim {
        self.axes.dim()
    }

    /// Coefficients in basis order: per axis `(a2, a4, a5)`, then `a6, a9`.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 * self.a2.len() + 2);
        for k in 0..self.a2.len() {
            out.extend([self.a2[k], self.a4[k], self.a5[k]]);
        }
        if self.dim() == Dim::Two {
            out.push(self.a6.unwrap_or(0.0));
            out.push(self.a9.unwrap_or(0.0));
        }
        out
    }

    fn from_coefficients(axes: OrthogonalTransform, x: &[f64]) -> Self {
        let n = axes.dim().n();
        let mut p = NonlocalParams::zeros(axes);
        for k in 0..n {
            p.a2[k] = x[3 * k];
            p.a4[k] = x[3 * k + 1];
            p.a5[k] = x[3 * k + 2];
        }
        if n == 2 {
            p.a6 = Some(x[6]);
            p.a9 = Some(x[7]);
        }
        p
    }

    /// Largest absolute parameter (missing `a6`/`a9` count as zero).
    pub fn max_abs(&self) -> f64 {
        self.coefficients().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest parameter difference relative to the largest parameter of
    /// either set. Both sets must refer to the same axes.
    pub fn relative_difference(&self, other: &NonlocalParams) -> f64 {
        let (a, b) = (self.coefficients(), other.coefficients());
        let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        relative(diff, self.max_abs().max(other.max_abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let x: Vec<f64> = self.coefficients().iter().map(|v| c * v).collect();
        let mut p = Self::from_coefficients(self.axes.clone(), &x);
        if self.a6.is_none() {
            p.a6 = None;
        }
        if self.a9.is_none() {
            p.a9 = None;
        }
        p
    }
}

/// `K[X, M]_ijhlmn = (X_ihln M_jm + X_ihmn M_jl + X_jhln M_im + X_jhmn M_il) / 2`.
fn kernel(dim: Dim, x: impl Fn([usize; 4]) -> f64, m: impl Fn(usize, usize) -> f64) -> Dense<6> {
    Dense::from_fn(dim, |[i, j, h, l, mm, n]| {
        0.5 * (x([i, h, l, n]) * m(j, mm)
            + x([i, h, mm, n]) * m(j, l)
            + x([j, h, l, n]) * m(i, mm)
            + x([j, h, mm, n]) * m(i, l))
    })
}

/// Basis tensors in the order of [`NonlocalParams::coefficients`].
fn basis(axes: &OrthogonalTransform) -> Vec<Dense<6>> {
    let dim = axes.dim();
    let n = dim.n();
    let mut out = Vec::with_capacity(3 * n + 2);
    for k in 0..n {
        let e = axes.column(k);
        let m = |a: usize, b: usize| e[a] * e[b];
        out.push(kernel(dim, |[a, b, c, d]| kron(a, b) * kron(c, d), m));
        out.push(kernel(dim, |[a, b, c, d]| kron(a, c) * kron(b, d), m));
        out.push(kernel(dim, |[a, b, c, d]| kron(a, d) * kron(b, c), m));
    }
    if dim == Dim::Two {
        let (u, v) = (axes.column(0), axes.column(1));
        let s = |a: usize, b: usize| u[a] * v[b] + v[a] * u[b];
        out.push(kernel(dim, |[a, b, c, d]| s(a, b) * s(c, d), kron));
        out.push(kernel(dim, |[a, b, c, d]| u[a] * u[b] * u[c] * u[d], kron));
    }
    out
}

/// Exact assembly of the orthotropic structure.
pub fn assemble_from_params(p: &NonlocalParams) -> GradElasticTensor {
    let mut acc = Dense::<6>::zeros(p.dim());
    for (g, c) in basis(&p.axes).iter().zip(p.coefficients()) {
        if c != 0.0 {
            acc = acc.add(&g.scaled(c));
        }
    }
    GradElasticTensor::projected(&acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub params: NonlocalParams,
    /// `|A - assemble(params)| / |A|` (Frobenius).
    pub residual: f64,
    /// Residual within [`STRUCTURE_TOLERANCE`].
    pub structural: bool,
}

/// Least-squares projection of `a` onto the orthotropic basis attached to
/// `axes` (per-axis kernels, plus the two coupling kernels in 2D).
pub fn extract_ortho_params(a: &GradElasticTensor, axes: &OrthogonalTransform) -> Result<Extraction> {
    if axes.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim().n(),
            found: axes.dim().n(),
        });
    }
    let g = basis(axes);
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let gram = SquareMatrix::from_fn(g.len(), |p, q| dot(g[p].as_slice(), g[q].as_slice()));
    let rhs: Vec<f64> = g.iter().map(|b| dot(b.as_slice(), a.dense().as_slice())).collect();
    let x = solve_spd(&gram, &rhs).ok_or(Error::ZeroDenominator("orthotropic basis Gram matrix"))?;
    let params = NonlocalParams::from_coefficients(axes.clone(), &x);
    let fit = assemble_from_params(&params);
    let residual = relative(fit.dense().distance(a.dense()), a.norm());
    Ok(Extraction {
        params,
        residual,
        structural: residual <= STRUCTURE_TOLERANCE,
    })
}

/// Ratios `a[k] / a[0]` of each per-axis family.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyRatios {
    pub a2: Vec<Option<f64>>,
    pub a4: Vec<Option<f64>>,
    pub a5: Vec<Option<f64>>,
    /// Common ratio per axis, taken from the first defined family.
    pub ratios: Vec<f64>,
    /// Every defined family ratio agrees with `ratios` to 1e-12.
    pub consistent: bool,
}

pub fn anisotropy_ratios(p: &NonlocalParams) -> Result<AnisotropyRatios> {
    if p.a2[0] == 0.0 && p.a4[0] == 0.0 {
        return Err(Error::AllZeroParameters);
    }
    let fam = |v: &[f64]| -> Vec<Option<f64>> {
        v.iter().map(|x| (v[0] != 0.0).then(|| x / v[0])).collect()
    };
    let (a2, a4, a5) = (fam(&p.a2), fam(&p.a4), fam(&p.a5));
    let n = p.a2.len();
    let ratios: Vec<f64> = (0..n)
        .map(|k| a4[k].or(a2[k]).expect("a reference value is nonzero"))
        .collect();
    let consistent = [&a2, &a4, &a5].iter().all(|f| {
        f.iter()
            .zip(&ratios)
            .all(|(r, want)| r.is_none_or(|r| (r - want).abs() <= 1e-12 * want.abs().max(1e-300)))
    });
    Ok(AnisotropyRatios {
        a2,
        a4,
        a5,
        ratios,
        consistent,
    })
}
