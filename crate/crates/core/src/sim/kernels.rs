//! In-place amplitude kernels shared by the dense state vector and the
//! vectorized density matrix.

use num_complex::Complex64;

use crate::gate::{Gate, Matrix2};
use crate::pauli::Pauli;

#[inline]
pub fn apply_1q(buf: &mut [Complex64], q: usize, m: &Matrix2) {
    let mask = 1usize << q;
    for i in 0..buf.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (buf[i], buf[j]);
            buf[i] = m[0][0] * a + m[0][1] * b;
            buf[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

#[inline]
pub fn apply_cnot(buf: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..buf.len() {
        if i & cm != 0 && i & tm == 0 {
            buf.swap(i, i | tm);
        }
    }
}

#[inline]
pub fn apply_cz(buf: &mut [Complex64], a: usize, b: usize) {
    let m = (1usize << a) | (1usize << b);
    for (i, x) in buf.iter_mut().enumerate() {
        if i & m == m {
            *x = -*x;
        }
    }
}

/// Apply `gate` with qubit indices shifted by `offset`; `conj` applies the
/// complex conjugate unitary (used for the bra side of a density matrix).
pub fn apply_gate(buf: &mut [Complex64], gate: &Gate, offset: usize, conj: bool) {
    match *gate {
        Gate::Cnot { control, target } => apply_cnot(buf, control + offset, target + offset),
        Gate::Cz(a, b) => apply_cz(buf, a + offset, b + offset),
        Gate::I(_) => {}
        g => {
            let mut m = g.matrix().expect("single-qubit gate");
            if conj {
                for row in m.iter_mut() {
                    for x in row.iter_mut() {
                        *x = x.conj();
                    }
                }
            }
            apply_1q(buf, g.max_qubit() + offset, &m);
        }
    }
}

pub fn apply_pauli(buf: &mut [Complex64], q: usize, p: Pauli, conj: bool) {
    let mask = 1usize << q;
    match p {
        Pauli::I => {}
        Pauli::X => {
            for i in 0..buf.len() {
                if i & mask == 0 {
                    buf.swap(i, i | mask);
                }
            }
        }
        Pauli::Z => {
            for (i, x) in buf.iter_mut().enumerate() {
                if i & mask != 0 {
                    *x = -*x;
                }
            }
        }
        Pauli::Y => {
            // Y = [[0, -i], [i, 0]]
            let s = if conj { -1.0 } else { 1.0 };
            for i in 0..buf.len() {
                if i & mask == 0 {
                    let j = i | mask;
                    let (a, b) = (buf[i], buf[j]);
                    buf[i] = Complex64::new(0.0, -s) * b;
                    buf[j] = Complex64::new(0.0, s) * a;
                }
            }
        }
    }
}
