use crate::error::{invalid, Result};
use crate::C64;

/// Dense complex tensor stored row-major: leg 0 is the slowest index.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let numel: usize = dims.iter().product();
        if numel != data.len() {
            return invalid(format!(
                "tensor of shape {dims:?} needs {numel} entries, got {}",
                data.len()
            ));
        }
        Ok(Self { dims, data })
    }

    pub fn scalar(z: C64) -> Self {
        Self {
            dims: Vec::new(),
            data: vec![z],
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let numel = dims.iter().product();
        Self {
            dims,
            data: vec![C64::new(0.0, 0.0); numel],
        }
    }

    pub fn vector(v: &[C64]) -> Self {
        Self {
            dims: vec![v.len()],
            data: v.to_vec(),
        }
    }

    /// Matrix with legs `[row, col]`.
    pub fn matrix(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn from_mat2(m: &[[C64; 2]; 2]) -> Self {
        Self {
            dims: vec![2, 2],
            data: m.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut t = Self::zeros(vec![d, d]);
        for i in 0..d {
            t.data[i * d + i] = C64::new(1.0, 0.0);
        }
        t
    }

    /// Copy tensor of the given rank over dimension 2: one where all indices agree.
    pub fn copy(rank: usize) -> Self {
        let mut t = Self::zeros(vec![2; rank]);
        let all_ones: usize = (1usize << rank) - 1;
        t.data[0] = C64::new(1.0, 0.0);
        t.data[all_ones] = C64::new(1.0, 0.0);
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> C64 {
        self.data[self.offset(index)]
    }

    /// Multi-index of a flat offset.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    /// Reorders legs: leg `i` of the result is leg `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = Tensor::zeros(dims);
        let mut src = vec![0; self.rank()];
        for flat in 0..out.numel() {
            let idx = out.unravel(flat);
            for (i, &p) in perm.iter().enumerate() {
                src[p] = idx[i];
            }
            out.data[flat] = self.get(&src);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A tensor whose legs are named by wire ids.
#[derive(Clone, Debug)]
pub struct LabeledTensor {
    pub labels: Vec<usize>,
    pub tensor: Tensor,
}

impl LabeledTensor {
    /// Contracts all shared labels. Result legs: `a`'s free legs then `b`'s.
    pub fn contract(&self, other: &LabeledTensor) -> LabeledTensor {
        let shared: Vec<usize> = self
            .labels
            .iter()
            .copied()
            .filter(|l| other.labels.contains(l))
            .collect();
        let a_free: Vec<usize> = (0..self.labels.len())
            .filter(|&i| !shared.contains(&self.labels[i]))
            .collect();
        let b_free: Vec<usize> = (0..other.labels.len())
            .filter(|&i| !shared.contains(&other.labels[i]))
            .collect();
        let a_sh: Vec<usize> = shared
            .iter()
            .map(|l| self.labels.iter().position(|x| x == l).unwrap())
            .collect();
        let b_sh: Vec<usize> = shared
            .iter()
            .map(|l| other.labels.iter().position(|x| x == l).unwrap())
            .collect();

        let out_dims: Vec<usize> = a_free
            .iter()
            .map(|&i| self.tensor.dims[i])
            .chain(b_free.iter().map(|&i| other.tensor.dims[i]))
            .collect();
        let sh_dims: Vec<usize> = a_sh.iter().map(|&i| self.tensor.dims[i]).collect();
        let sh_tensor = Tensor::zeros(sh_dims);
        let mut out = Tensor::zeros(out_dims);
        let mut ai = vec![0; self.tensor.rank()];
        let mut bi = vec![0; other.tensor.rank()];
        for flat in 0..out.numel() {
            let idx = out.unravel(flat);
            for (k, &i) in a_free.iter().enumerate() {
                ai[i] = idx[k];
            }
            for (k, &i) in b_free.iter().enumerate() {
                bi[i] = idx[a_free.len() + k];
            }
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..sh_tensor.numel() {
                let sidx = sh_tensor.unravel(s);
                for (k, &v) in sidx.iter().enumerate() {
                    ai[a_sh[k]] = v;
                    bi[b_sh[k]] = v;
                }
                acc += self.tensor.get(&ai) * other.tensor.get(&bi);
            }
            out.data[flat] = acc;
        }
        let labels = a_free
            .iter()
            .map(|&i| self.labels[i])
            .chain(b_free.iter().map(|&i| other.labels[i]))
            .collect();
        LabeledTensor {
            labels,
            tensor: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn matrix_product_via_labels() {
        let a = LabeledTensor {
            labels: vec![0, 1],
            tensor: Tensor::matrix(2, 2, vec![c(1.0), c(2.0), c(3.0), c(4.0)]).unwrap(),
        };
        let b = LabeledTensor {
            labels: vec![1, 2],
            tensor: Tensor::matrix(2, 2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap(),
        };
        let ab = a.contract(&b);
        assert_eq!(ab.labels, vec![0, 2]);
        assert_eq!(ab.tensor.data(), &[c(2.0), c(1.0), c(4.0), c(3.0)]);
    }

    #[test]
    fn permute_transposes() {
        let m = Tensor::matrix(2, 3, (0..6).map(|i| c(i as f64)).collect()).unwrap();
        let t = m.permute(&[1, 0]);
        assert_eq!(t.dims(), &[3, 2]);
        assert_eq!(t.get(&[2, 1]), m.get(&[1, 2]));
    }

    #[test]
    fn copy_tensor_support() {
        let t = Tensor::copy(3);
        let nonzero: Vec<_> = (0..8).filter(|&i| t.data()[i].norm() > 0.0).collect();
        assert_eq!(nonzero, vec![0, 7]);
    }
}
