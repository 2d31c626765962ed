//! OpenQASM 2.0 export of the 4-qubit circuit with every rotation angle set
//! to one fixed value.
//!
//! Qubit k (1-based, as used by the simulator) is written as `q[k-1]`. The
//! program is the embedding (H then RY on each qubit), `depth` blocks of four
//! RYs followed by the entangler, then a measurement of every qubit.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::vqc::{ENTANGLER, NUM_QUBITS};

/// Angle literal: `pi/2` for exactly pi/2, otherwise 17 significant digits.
pub fn format_angle(angle: f64) -> String {
    if angle == FRAC_PI_2 {
        return "pi/2".to_string();
    }
    if angle == 0.0 {
        return "0".to_string();
    }
    let magnitude = angle.abs().log10().floor() as i32;
    if (-5..17).contains(&magnitude) {
        let decimals = (16 - magnitude) as usize;
        format!("{angle:.decimals$}")
    } else {
        format!("{angle:.16e}")
    }
}

pub fn export_qasm(depth: usize, angle: f64) -> Result<String> {
    if !angle.is_finite() {
        return Err(Error::invalid(format!("angle {angle} is not finite")));
    }
    let a = format_angle(angle);
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{NUM_QUBITS}];").unwrap();
    writeln!(out, "creg c[{NUM_QUBITS}];").unwrap();
    for k in 0..NUM_QUBITS {
        writeln!(out, "h q[{k}];").unwrap();
    }
    for k in 0..NUM_QUBITS {
        writeln!(out, "ry({a}) q[{k}];").unwrap();
    }
    for _ in 0..depth {
        for k in 0..NUM_QUBITS {
            writeln!(out, "ry({a}) q[{k}];").unwrap();
        }
        for (control, target) in ENTANGLER {
            writeln!(out, "cx q[{}],q[{}];", control - 1, target - 1).unwrap();
        }
    }
    for k in 0..NUM_QUBITS {
        writeln!(out, "measure q[{k}] -> c[{k}];").unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(text: &str, gate: &str) -> usize {
        text.lines().filter(|l| l.starts_with(gate)).count()
    }

    #[test]
    fn embedding_only() {
        let q = export_qasm(0, FRAC_PI_2).unwrap();
        assert_eq!(count(&q, "h "), 4);
        assert_eq!(count(&q, "ry(pi/2) "), 4);
        assert_eq!(count(&q, "cx "), 0);
        assert_eq!(count(&q, "measure "), 4);
    }

    #[test]
    fn depth_three_census() {
        let q = export_qasm(3, FRAC_PI_2).unwrap();
        assert_eq!(count(&q, "ry("), 16);
        assert_eq!(count(&q, "cx "), 9);
        assert!(q.contains("cx q[0],q[1];\ncx q[2],q[3];\ncx q[1],q[2];\n"));
    }

    #[test]
    fn angle_literals() {
        assert_eq!(format_angle(FRAC_PI_2), "pi/2");
        assert_eq!(format_angle(0.5), "0.50000000000000000");
        assert_eq!(format_angle(1.0).parse::<f64>().unwrap(), 1.0);
        let x = 0.123_456_789_012_345_67_f64;
        assert_eq!(format_angle(x).parse::<f64>().unwrap(), x);
        assert_eq!(format_angle(-2.5).parse::<f64>().unwrap(), -2.5);
        assert!(export_qasm(1, f64::NAN).is_err());
    }
}
