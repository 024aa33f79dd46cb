//! OpenQASM 2.0 text for compiled circuits.
//!
//! Output is byte-deterministic: angles use 17 significant digits in
//! scientific notation. [`parse_qasm`] reads back the subset we emit.

use crate::error::{Error, Result};
use crate::gates::{Circuit, GateOp};
use std::fmt::Write;

pub fn export_qasm(circuit: &Circuit) -> String {
    let n = circuit.n_qubits();
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{n}];").unwrap();
    writeln!(out, "creg c[{n}];").unwrap();
    for op in circuit.ops() {
        match *op {
            GateOp::Cnot { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            GateOp::RotX { qubit, angle } => writeln!(out, "rx({angle:.16e}) q[{qubit}];"),
            GateOp::RotY { qubit, angle } => writeln!(out, "ry({angle:.16e}) q[{qubit}];"),
            GateOp::RotZ { qubit, angle } => writeln!(out, "rz({angle:.16e}) q[{qubit}];"),
        }
        .unwrap();
    }
    out
}

fn parse_qubit(arg: &str, line: usize) -> Result<usize> {
    let arg = arg.trim();
    arg.strip_prefix("q[")
        .and_then(|s| s.strip_suffix(']'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {line}: bad qubit operand \"{arg}\"")))
}

/// Parses the `rx`/`ry`/`rz`/`cx` subset produced by [`export_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| Error::Parse(format!("line {line_no}: missing ';'")))?
            .trim();
        if stmt.starts_with("OPENQASM") || stmt.starts_with("include") || stmt.starts_with("creg") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            let rest = rest.trim();
            let n = rest
                .strip_prefix("q[")
                .and_then(|s| s.strip_suffix(']'))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {line_no}: bad qreg \"{rest}\"")))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| Error::Parse(format!("line {line_no}: gate before qreg")))?;
        let op = if let Some(args) = stmt.strip_prefix("cx") {
            let (a, b) = args
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {line_no}: cx needs two operands")))?;
            GateOp::Cnot {
                control: parse_qubit(a, line_no)?,
                target: parse_qubit(b, line_no)?,
            }
        } else {
            let (name, rest) = stmt.split_at(2.min(stmt.len()));
            let rest = rest.trim_start();
            let close = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')').map(|p| (r, p)))
                .ok_or_else(|| Error::Parse(format!("line {line_no}: unsupported statement \"{stmt}\"")))?;
            let (inner, pos) = close;
            let angle: f64 = inner[..pos]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {line_no}: bad angle \"{}\"", &inner[..pos])))?;
            let qubit = parse_qubit(&inner[pos + 1..], line_no)?;
            match name {
                "rx" => GateOp::RotX { qubit, angle },
                "ry" => GateOp::RotY { qubit, angle },
                "rz" => GateOp::RotZ { qubit, angle },
                other => {
                    return Err(Error::Parse(format!("line {line_no}: unsupported gate \"{other}\"")))
                }
            }
        };
        c.push(op)
            .map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
    }
    circuit.ok_or_else(|| Error::Parse("no qreg declaration".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile_schedule, CompileOptions};
    use crate::fixtures::table2;
    use crate::gates::circuit_unitary;
    use proptest::prelude::*;

    #[test]
    fn empty_circuit_has_only_header() {
        let text = export_qasm(&Circuit::new(2));
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n"
        );
    }

    #[test]
    fn cnot_line() {
        let c = Circuit::from_ops(2, vec![GateOp::Cnot { control: 0, target: 1 }]).unwrap();
        assert!(export_qasm(&c).ends_with("cx q[0],q[1];\n"));
    }

    #[test]
    fn angle_format_is_fixed_width_scientific() {
        let c = Circuit::from_ops(1, vec![GateOp::RotY { qubit: 0, angle: -0.5 }]).unwrap();
        assert!(export_qasm(&c).contains("ry(-5.0000000000000000e-1) q[0];"));
    }

    #[test]
    fn table2_roundtrip() {
        let c = compile_schedule(&table2(), &CompileOptions { elide: false });
        let text = export_qasm(&c);
        let gate_lines = text.lines().filter(|l| l.starts_with(['r', 'c']) && !l.starts_with("creg")).count();
        assert_eq!(gate_lines, 36);
        let back = parse_qasm(&text).unwrap();
        let d = circuit_unitary(&back)
            .unwrap()
            .distance(&circuit_unitary(&c).unwrap())
            .unwrap();
        assert!(d < 1e-12);
        assert_eq!(export_qasm(&back), text);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_qasm("ry(0.1) q[0];").is_err());
        assert!(parse_qasm("qreg q[2];\nh q[0];").is_err());
        assert!(parse_qasm("qreg q[2];\nry(abc) q[0];").is_err());
        assert!(parse_qasm("qreg q[2];\ncx q[0],q[0];").is_err());
    }

    proptest! {
        #[test]
        fn export_parse_roundtrip(
            ops in proptest::collection::vec((0u8..4, 0usize..3, 0usize..3, -10.0..10.0f64), 0..30)
        ) {
            let ops: Vec<GateOp> = ops.into_iter().filter_map(|(kind, a, b, angle)| match kind {
                0 => Some(GateOp::RotX { qubit: a, angle }),
                1 => Some(GateOp::RotY { qubit: a, angle }),
                2 => Some(GateOp::RotZ { qubit: a, angle }),
                _ => (a != b).then_some(GateOp::Cnot { control: a, target: b }),
            }).collect();
            let c = Circuit::from_ops(3, ops).unwrap();
            let back = parse_qasm(&export_qasm(&c)).unwrap();
            let d = circuit_unitary(&back).unwrap().distance(&circuit_unitary(&c).unwrap()).unwrap();
            prop_assert!(d < 1e-12);
        }
    }
}
