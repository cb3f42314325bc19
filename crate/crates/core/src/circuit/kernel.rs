//! Dense amplitude kernels shared by the statevector and density-matrix paths.
//!
//! Bit `q` of a basis index addresses qubit `q`. Two-qubit matrices use the
//! local basis `|a b⟩` where `a` is the first listed qubit and is the high bit,
//! i.e. local index `2 * bit_a + bit_b`.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

#[inline]
fn insert_zero_bit(k: usize, pos: usize) -> usize {
    let low = k & ((1usize << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

/// Apply an arbitrary (not necessarily unitary) 2×2 matrix to bit `q`.
pub fn apply_1q(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let len = amps.len();
    debug_assert!(stride < len);
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let j = i + stride;
            let a0 = amps[i];
            let a1 = amps[j];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

/// Multiply amplitudes by a diagonal 2×2 matrix on bit `q`.
pub fn apply_1q_diag(amps: &mut [Complex64], q: usize, d: [Complex64; 2]) {
    let mask = 1usize << q;
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= d[usize::from(i & mask != 0)];
    }
}

/// Apply an arbitrary 4×4 matrix to bits `(a, b)`, `a` being the high local bit.
pub fn apply_2q(amps: &mut [Complex64], a: usize, b: usize, m: &Mat4) {
    debug_assert_ne!(a, b);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let ma = 1usize << a;
    let mb = 1usize << b;
    let quarter = amps.len() >> 2;
    for k in 0..quarter {
        let i00 = insert_zero_bit(insert_zero_bit(k, lo), hi);
        let idx = [i00, i00 | mb, i00 | ma, i00 | ma | mb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (row, &target) in idx.iter().enumerate() {
            let r = &m[row];
            amps[target] = r[0] * v[0] + r[1] * v[1] + r[2] * v[2] + r[3] * v[3];
        }
    }
}

/// Multiply amplitudes by a diagonal 4×4 matrix on bits `(a, b)`.
pub fn apply_2q_diag(amps: &mut [Complex64], a: usize, b: usize, d: [Complex64; 4]) {
    let ma = 1usize << a;
    let mb = 1usize << b;
    for (i, amp) in amps.iter_mut().enumerate() {
        let local = (usize::from(i & ma != 0) << 1) | usize::from(i & mb != 0);
        *amp *= d[local];
    }
}

pub fn conj2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

pub fn conj4(m: &Mat4) -> Mat4 {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = v.conj();
        }
    }
    out
}

pub fn is_diag2(m: &Mat2) -> bool {
    m[0][1] == Complex64::new(0.0, 0.0) && m[1][0] == Complex64::new(0.0, 0.0)
}

pub fn is_diag4(m: &Mat4) -> bool {
    (0..4).all(|r| (0..4).all(|c| r == c || m[r][c] == Complex64::new(0.0, 0.0)))
}
