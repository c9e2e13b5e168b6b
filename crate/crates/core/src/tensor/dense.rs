use alloc::vec;
use alloc::vec::Vec;

use super::{Dim, OrthogonalTransform};
use crate::math::sqrt;
use crate::{Error, Result};

/// Dense order-`R` tensor over `dim^R` components in row-major index order
/// (the last index varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<const R: usize> {
    dim: Dim,
    data: Vec<f64>,
}

impl<const R: usize> Dense<R> {
    pub fn zeros(dim: Dim) -> Self {
        Dense {
            dim,
            data: vec![0.0; dim.n().pow(R as u32)],
        }
    }

    pub fn from_fn(dim: Dim, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let data = indices::<R>(dim).map(&mut f).collect();
        Dense { dim, data }
    }

    pub fn from_vec(dim: Dim, data: Vec<f64>) -> Result<Self> {
        let expected = dim.n().pow(R as u32);
        if data.len() != expected {
            return Err(Error::ComponentCount {
                expected,
                found: data.len(),
            });
        }
        Ok(Dense { dim, data })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn order(&self) -> usize {
        R
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn offset(&self, idx: [usize; R]) -> usize {
        let n = self.dim.n();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    #[inline]
    pub fn get(&self, idx: [usize; R]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: [usize; R], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Dense {
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Dense {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Dense {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `out[i_0, .., i_{R-1}] = self[i_{perm[0]}, .., i_{perm[R-1]}]`.
    pub fn permuted(&self, perm: [usize; R]) -> Self {
        Self::from_fn(self.dim, |idx| self.get(perm.map(|p| idx[p])))
    }

    /// Largest deviation from invariance under each index permutation,
    /// relative to the Frobenius norm.
    pub fn symmetry_deviation(&self, perms: &[[usize; R]]) -> f64 {
        let scale = self.norm();
        let dev = perms
            .iter()
            .map(|p| self.permuted(*p).max_abs_diff(self))
            .fold(0.0, f64::max);
        crate::math::relative(dev, scale)
    }

    /// Average over the group generated by `generators`. The group is small
    /// (at most 8 elements here), so it is enumerated by closure. Each orbit
    /// is summed in a fixed order, so the result is exactly symmetric.
    pub fn group_average(&self, generators: &[[usize; R]]) -> Self {
        let mut group: Vec<[usize; R]> = vec![core::array::from_fn(|k| k)];
        let mut i = 0;
        while i < group.len() {
            for g in generators {
                let h = compose(&group[i], g);
                if !group.contains(&h) {
                    group.push(h);
                }
            }
            i += 1;
        }
        let mut out = Self::zeros(self.dim);
        let mut done = vec![false; self.data.len()];
        let mut orbit: Vec<usize> = Vec::with_capacity(group.len());
        for idx in indices::<R>(self.dim) {
            let flat = self.offset(idx);
            if done[flat] {
                continue;
            }
            orbit.clear();
            for p in &group {
                let o = self.offset(p.map(|k| idx[k]));
                if !orbit.contains(&o) {
                    orbit.push(o);
                }
            }
            orbit.sort_unstable();
            let mean = orbit.iter().map(|&o| self.data[o]).sum::<f64>() / orbit.len() as f64;
            for &o in &orbit {
                out.data[o] = mean;
                done[o] = true;
            }
        }
        out
    }

    /// Applies `Q` to every index: `out_{a..} = Q_{ap} .. T_{p..}`.
    pub fn transformed(&self, q: &OrthogonalTransform) -> Result<Self> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.n(),
                found: q.dim().n(),
            });
        }
        let n = self.dim.n();
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        for mode in 0..R {
            let stride = n.pow((R - 1 - mode) as u32);
            for (flat, out) in next.iter_mut().enumerate() {
                let a = (flat / stride) % n;
                let base = flat - a * stride;
                *out = (0..n).map(|p| q.get(a, p) * cur[base + p * stride]).sum();
            }
            core::mem::swap(&mut cur, &mut next);
        }
        Ok(Dense {
            dim: self.dim,
            data: cur,
        })
    }
}

fn compose<const R: usize>(a: &[usize; R], b: &[usize; R]) -> [usize; R] {
    // permuted(a) followed by permuted(b) reads source index i[b[a[k]]].
    core::array::from_fn(|k| b[a[k]])
}

/// All multi-indices of `[0, n)^R` in row-major order.
pub fn indices<const R: usize>(dim: Dim) -> impl Iterator<Item = [usize; R]> {
    let n = dim.n();
    let total = n.pow(R as u32);
    (0..total).map(move |mut flat| {
        let mut idx = [0usize; R];
        for k in (0..R).rev() {
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_row_major() {
        let t = Dense::<3>::from_fn(Dim::Two, |[i, j, k]| (4 * i + 2 * j + k) as f64);
        assert_eq!(t.as_slice(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn permutation_reads_source_indices() {
        let t = Dense::<2>::from_fn(Dim::Three, |[i, j]| (10 * i + j) as f64);
        let tt = t.permuted([1, 0]);
        assert_eq!(tt.get([0, 2]), 20.0);
    }

    #[test]
    fn group_average_of_transpose() {
        let t = Dense::<2>::from_fn(Dim::Two, |[i, j]| (2 * i + j) as f64);
        let s = t.group_average(&[[1, 0]]);
        assert_eq!(s.get([0, 1]), 1.5);
        assert_eq!(s.get([1, 0]), 1.5);
    }

    #[test]
    fn mode_products_match_naive_rotation() {
        let q = OrthogonalTransform::rotation_2d(0.3);
        let t = Dense::<3>::from_fn(Dim::Two, |[i, j, k]| 1.0 + i as f64 - 0.5 * j as f64 + 0.25 * (k * k) as f64);
        let fast = t.transformed(&q).unwrap();
        let naive = Dense::<3>::from_fn(Dim::Two, |[a, b, c]| {
            let mut s = 0.0;
            for [p, r, u] in indices::<3>(Dim::Two) {
                s += q.get(a, p) * q.get(b, r) * q.get(c, u) * t.get([p, r, u]);
            }
            s
        });
        assert!(fast.max_abs_diff(&naive) < 1e-15);
    }
}
