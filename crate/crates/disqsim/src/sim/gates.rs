//! Dense matrices for the gate alphabet.

use crate::circuit::{GateKind, Instruction};
use num_complex::Complex64 as C;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

pub type Mat2 = [[C; 2]; 2];
pub type Mat4 = [[C; 4]; 4];

/// 2x2 matrix of a single-qubit unitary kind.
pub fn mat1(kind: GateKind, params: &[f64]) -> Option<Mat2> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Some(match kind {
        GateKind::H => [[C::new(s, 0.0), C::new(s, 0.0)], [C::new(s, 0.0), C::new(-s, 0.0)]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, C::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Tdg => [[ONE, ZERO], [ZERO, C::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]],
        GateKind::SX => {
            let a = C::new(0.5, 0.5);
            let b = C::new(0.5, -0.5);
            [[a, b], [b, a]]
        }
        GateKind::RX => {
            let h = params[0] / 2.0;
            let (c, sn) = (h.cos(), h.sin());
            [[C::new(c, 0.0), C::new(0.0, -sn)], [C::new(0.0, -sn), C::new(c, 0.0)]]
        }
        GateKind::RY => {
            let h = params[0] / 2.0;
            let (c, sn) = (h.cos(), h.sin());
            [[C::new(c, 0.0), C::new(-sn, 0.0)], [C::new(sn, 0.0), C::new(c, 0.0)]]
        }
        GateKind::RZ => {
            let h = params[0] / 2.0;
            [[C::from_polar(1.0, -h), ZERO], [ZERO, C::from_polar(1.0, h)]]
        }
        _ => return None,
    })
}

/// 4x4 matrix of a two-qubit unitary kind; basis index is
/// `(bit(qubits[0]) << 1) | bit(qubits[1])`, so CX has its control first.
pub fn mat2(kind: GateKind, params: &[f64]) -> Option<Mat4> {
    let mut m = [[ZERO; 4]; 4];
    match kind {
        GateKind::CX => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][3] = ONE;
            m[3][2] = ONE;
        }
        GateKind::CZ => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][2] = ONE;
            m[3][3] = -ONE;
        }
        GateKind::Swap => {
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
        }
        GateKind::RZZ => {
            let h = params[0] / 2.0;
            let minus = C::from_polar(1.0, -h);
            let plus = C::from_polar(1.0, h);
            m[0][0] = minus;
            m[1][1] = plus;
            m[2][2] = plus;
            m[3][3] = minus;
        }
        GateKind::RXX => {
            let h = params[0] / 2.0;
            let c = C::new(h.cos(), 0.0);
            let isn = C::new(0.0, -h.sin());
            for d in 0..4 {
                m[d][d] = c;
            }
            m[0][3] = isn;
            m[1][2] = isn;
            m[2][1] = isn;
            m[3][0] = isn;
        }
        _ => return None,
    }
    Some(m)
}

/// Dense matrix of an arbitrary unitary instruction, sized by arity.
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

pub fn matrix_of(instr: &Instruction) -> Option<GateMatrix> {
    if !instr.kind.is_unitary() {
        return None;
    }
    match instr.qubits.len() {
        1 => mat1(instr.kind, &instr.params).map(GateMatrix::One),
        2 => mat2(instr.kind, &instr.params).map(GateMatrix::Two),
        _ => None,
    }
}

/// Multiply 2x2 matrices: `a * b`.
pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
