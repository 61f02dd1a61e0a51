//! Gate kernels. Each kernel partitions the amplitudes by the untargeted
//! index bits, so every amplitude is written by exactly one task and the
//! result does not depend on the number of worker threads.

use rayon::prelude::*;

use crate::C64;

/// Below this many amplitudes kernels run on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;
/// Minimum amplitudes per parallel task.
const MIN_CHUNK: usize = 1 << 12;

/// Local index of basis state `i` over `targets` (target 0 = low bit).
#[inline]
fn local_index(i: usize, targets: &[usize]) -> usize {
    targets
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &t)| acc | (((i >> t) & 1) << j))
}

pub fn apply_1q(amps: &mut [C64], m: &[C64], t: usize) {
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let half = 1usize << t;
    let kernel = |lo: &mut C64, hi: &mut C64| {
        let (a, b) = (*lo, *hi);
        *lo = m00 * a + m01 * b;
        *hi = m10 * a + m11 * b;
    };
    let block_kernel = |blk: &mut [C64]| {
        for base in (0..blk.len()).step_by(2 * half) {
            let (lo, hi) = blk[base..base + 2 * half].split_at_mut(half);
            lo.iter_mut().zip(hi.iter_mut()).for_each(|(a, b)| kernel(a, b));
        }
    };
    if amps.len() < PAR_THRESHOLD {
        block_kernel(amps);
    } else if 2 * half <= MIN_CHUNK {
        amps.par_chunks_mut(MIN_CHUNK).for_each(block_kernel);
    } else {
        amps.par_chunks_mut(2 * half).for_each(|blk| {
            let (lo, hi) = blk.split_at_mut(half);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .with_min_len(MIN_CHUNK)
                .for_each(|(a, b)| kernel(a, b));
        });
    }
}

pub fn apply_2q(amps: &mut [C64], m: &[C64], t0: usize, t1: usize) {
    let (b0, b1) = (1usize << t0, 1usize << t1);
    let span = 2 * b0.max(b1);
    let kernel = |blk: &mut [C64]| {
        for i in 0..blk.len() {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let idx = [i, i | b0, i | b1, i | b0 | b1];
            let v = idx.map(|k| blk[k]);
            for (r, &k) in idx.iter().enumerate() {
                let row = &m[4 * r..4 * r + 4];
                blk[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
    };
    run_blocks(amps, span, kernel);
}

/// Dense gate on any number of targets; `m` is `2^j x 2^j` row-major.
pub fn apply_dense(amps: &mut [C64], m: &[C64], targets: &[usize]) {
    let j = targets.len();
    let dim = 1usize << j;
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(b, _)| (l >> b) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let span = 2 << targets.iter().copied().max().unwrap_or(0);
    let kernel = |blk: &mut [C64]| {
        let mut buf = vec![C64::new(0.0, 0.0); dim];
        for i in 0..blk.len() {
            if i & mask != 0 {
                continue;
            }
            for (l, &o) in offsets.iter().enumerate() {
                buf[l] = blk[i + o];
            }
            for (r, &o) in offsets.iter().enumerate() {
                let row = &m[r * dim..(r + 1) * dim];
                blk[i + o] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
            }
        }
    };
    run_blocks(amps, span, kernel);
}

pub fn apply_diagonal(amps: &mut [C64], d: &[C64], targets: &[usize]) {
    if amps.len() < PAR_THRESHOLD {
        for (i, a) in amps.iter_mut().enumerate() {
            *a *= d[local_index(i, targets)];
        }
    } else {
        amps.par_iter_mut()
            .with_min_len(MIN_CHUNK)
            .enumerate()
            .for_each(|(i, a)| *a *= d[local_index(i, targets)]);
    }
}

/// Runs `kernel` over aligned blocks of `span` amplitudes (at least
/// [`MIN_CHUNK`]); each block contains whole gate orbits.
fn run_blocks(amps: &mut [C64], span: usize, kernel: impl Fn(&mut [C64]) + Sync + Send) {
    if amps.len() < PAR_THRESHOLD || span >= amps.len() {
        kernel(amps);
    } else {
        amps.par_chunks_mut(span.max(MIN_CHUNK)).for_each(kernel);
    }
}

/// Sum with a fixed pairwise tree that depends only on the length.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    const LEAF: usize = 256;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    let (a, b) = if v.len() >= PAR_THRESHOLD {
        rayon::join(|| pairwise_sum(&v[..mid]), || pairwise_sum(&v[mid..]))
    } else {
        (pairwise_sum(&v[..mid]), pairwise_sum(&v[mid..]))
    };
    a + b
}
