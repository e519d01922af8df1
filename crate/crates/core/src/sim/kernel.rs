//! In-place gate kernels on a flat amplitude buffer. Qubit `q` is bit `q` of
//! the basis-state index (little-endian).

use num_complex::Complex64;

use super::gate::{Mat2, Mat4};

pub(crate) fn apply_1q(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a = amps[i];
            let b = amps[i + stride];
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += 2 * stride;
    }
}

/// `first` is the most significant qubit of the 4x4 operator's basis.
pub(crate) fn apply_2q(amps: &mut [Complex64], first: usize, second: usize, m: &Mat4) {
    let b0 = 1usize << first;
    let b1 = 1usize << second;
    let mask = b0 | b1;
    for i in 0..amps.len() {
        if i & mask != 0 {
            continue;
        }
        let idx = [i, i | b1, i | b0, i | b0 | b1];
        let v = idx.map(|k| amps[k]);
        for (row, &k) in idx.iter().enumerate() {
            amps[k] = m[row][0] * v[0] + m[row][1] * v[1] + m[row][2] * v[2] + m[row][3] * v[3];
        }
    }
}

pub(crate) fn conj2(m: &Mat2) -> Mat2 {
    m.map(|row| row.map(|z| z.conj()))
}

pub(crate) fn conj4(m: &Mat4) -> Mat4 {
    m.map(|row| row.map(|z| z.conj()))
}
