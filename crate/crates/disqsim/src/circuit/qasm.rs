//! Small OpenQASM 2.0 subset parser: `qreg`/`creg` declarations, the fixed
//! gate alphabet, `measure`, `reset`, `barrier` and single-bit
//! `if (c == v)` conditions. No gate definitions, no includes beyond a
//! tolerated `include "qelib1.inc";`.

use super::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};
use std::collections::HashMap;

struct Register {
    offset: usize,
    size: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    Sym(char),
    Arrow,
    Eq,
    Str(String),
    Eof,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        self.skip_ws();
        let b = match self.peek() {
            None => return Ok(Tok::Eof),
            Some(b) => b,
        };
        if b.is_ascii_alphabetic() || b == b'_' {
            let mut s = String::new();
            while let Some(b) = self.peek() {
                if b.is_ascii_alphanumeric() || b == b'_' {
                    s.push(b as char);
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Ident(s));
        }
        if b.is_ascii_digit() || (b == b'.' && self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())) {
            let mut s = String::new();
            let mut is_float = false;
            while let Some(b) = self.peek() {
                if b.is_ascii_digit() {
                    s.push(b as char);
                    self.bump();
                } else if b == b'.' || b == b'e' || b == b'E' {
                    is_float = true;
                    s.push(b as char);
                    self.bump();
                    if (b == b'e' || b == b'E') && matches!(self.peek(), Some(b'+') | Some(b'-')) {
                        s.push(self.bump().unwrap() as char);
                    }
                } else {
                    break;
                }
            }
            return if is_float {
                s.parse::<f64>()
                    .map(Tok::Float)
                    .map_err(|_| self.err(format!("bad number `{s}`")))
            } else {
                s.parse::<u64>()
                    .map(Tok::Int)
                    .map_err(|_| self.err(format!("bad number `{s}`")))
            };
        }
        if b == b'"' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    Some(b'"') => break,
                    Some(b) => s.push(b as char),
                    None => return Err(self.err("unterminated string")),
                }
            }
            return Ok(Tok::Str(s));
        }
        if b == b'-' && self.src.get(self.pos + 1) == Some(&b'>') {
            self.bump();
            self.bump();
            return Ok(Tok::Arrow);
        }
        if b == b'=' && self.src.get(self.pos + 1) == Some(&b'=') {
            self.bump();
            self.bump();
            return Ok(Tok::Eq);
        }
        self.bump();
        Ok(Tok::Sym(b as char))
    }

    fn peek_tok(&mut self) -> Result<Tok> {
        let save = (self.pos, self.line, self.col);
        let t = self.next_tok();
        (self.pos, self.line, self.col) = save;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.next_tok()? {
            Tok::Sym(s) if s == c => Ok(()),
            other => Err(self.err(format!("expected `{c}`, found {other:?}"))),
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.next_tok()? {
            Tok::Ident(s) => Ok(s),
            other => Err(self.err(format!("expected identifier, found {other:?}"))),
        }
    }

    fn expect_int(&mut self) -> Result<u64> {
        match self.next_tok()? {
            Tok::Int(v) => Ok(v),
            other => Err(self.err(format!("expected integer, found {other:?}"))),
        }
    }

    /// Angle expressions: signed products/quotients of numbers and `pi`.
    fn parse_angle(&mut self) -> Result<f64> {
        let mut value = self.parse_angle_atom()?;
        loop {
            match self.peek_tok()? {
                Tok::Sym('*') => {
                    self.next_tok()?;
                    value *= self.parse_angle_atom()?;
                }
                Tok::Sym('/') => {
                    self.next_tok()?;
                    value /= self.parse_angle_atom()?;
                }
                _ => break,
            }
        }
        Ok(value)
    }

    fn parse_angle_atom(&mut self) -> Result<f64> {
        match self.next_tok()? {
            Tok::Sym('-') => Ok(-self.parse_angle_atom()?),
            Tok::Sym('+') => self.parse_angle_atom(),
            Tok::Int(v) => Ok(v as f64),
            Tok::Float(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            other => Err(self.err(format!("expected angle, found {other:?}"))),
        }
    }
}

enum Operand {
    Single(usize),
    Whole(Vec<usize>),
}

/// Parse a QASM 2.0 subset program into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut p = Parser::new(text);
    let mut qregs: HashMap<String, Register> = HashMap::new();
    let mut cregs: HashMap<String, Register> = HashMap::new();
    let mut qreg_order: Vec<String> = Vec::new();
    let mut num_qubits = 0usize;
    let mut num_clbits = 0usize;
    let mut instructions: Vec<Instruction> = Vec::new();

    loop {
        let tok = p.next_tok()?;
        let ident = match tok {
            Tok::Eof => break,
            Tok::Ident(s) => s,
            Tok::Sym(';') => continue,
            other => return Err(p.err(format!("expected statement, found {other:?}"))),
        };
        match ident.as_str() {
            "OPENQASM" => {
                // version number, then `;`
                p.next_tok()?;
                p.expect_sym(';')?;
            }
            "include" => {
                p.next_tok()?;
                p.expect_sym(';')?;
            }
            "qreg" | "creg" => {
                let name = p.expect_ident()?;
                p.expect_sym('[')?;
                let size = p.expect_int()? as usize;
                p.expect_sym(']')?;
                p.expect_sym(';')?;
                let (map, count) = if ident == "qreg" {
                    (&mut qregs, &mut num_qubits)
                } else {
                    (&mut cregs, &mut num_clbits)
                };
                if map.contains_key(&name) {
                    return Err(p.err(format!("register `{name}` already declared")));
                }
                map.insert(
                    name.clone(),
                    Register {
                        offset: *count,
                        size,
                    },
                );
                if ident == "qreg" {
                    qreg_order.push(name);
                }
                *count += size;
            }
            "if" => {
                p.expect_sym('(')?;
                let cname = p.expect_ident()?;
                match p.next_tok()? {
                    Tok::Eq => {}
                    other => return Err(p.err(format!("expected `==`, found {other:?}"))),
                }
                let value = p.expect_int()?;
                p.expect_sym(')')?;
                if value > 1 {
                    return Err(p.err("only single-bit conditions (value 0 or 1) supported"));
                }
                let creg = cregs
                    .get(&cname)
                    .ok_or_else(|| p.err(format!("unknown creg `{cname}`")))?;
                if creg.size != 1 {
                    return Err(p.err("conditions only supported on single-bit cregs"));
                }
                let clbit = creg.offset;
                let gate = p.expect_ident()?;
                let mut instr =
                    parse_gate_stmt(&mut p, &gate, &qregs, &cregs, &qreg_order, num_qubits)?;
                if !instr.kind.is_unitary() {
                    return Err(p.err("condition only permitted on unitary gates"));
                }
                instr.condition = Some(super::Condition {
                    clbit,
                    value: value as u8,
                });
                instructions.push(instr);
            }
            gate => {
                let instr =
                    parse_gate_stmt(&mut p, gate, &qregs, &cregs, &qreg_order, num_qubits)?;
                // Register-wide measure/reset/barrier expand to one
                // instruction per qubit already; single-instruction path here.
                instructions.push(instr);
            }
        }
    }

    let mut circuit = Circuit::new(num_qubits, num_clbits);
    for mut instr in instructions {
        // Register-wide operands were encoded as Whole and flattened below.
        if instr.kind == GateKind::Measure && instr.qubits.len() > 1 {
            for (q, c) in instr.qubits.iter().zip(instr.clbits.iter()) {
                circuit.push(Instruction::measure(*q, *c))?;
            }
        } else if instr.kind == GateKind::Reset && instr.qubits.len() > 1 {
            for &q in &instr.qubits {
                circuit.push(Instruction::reset(q))?;
            }
        } else {
            instr.tag = None;
            circuit.push(instr)?;
        }
    }
    Ok(circuit)
}

fn parse_operand(
    p: &mut Parser,
    regs: &HashMap<String, Register>,
) -> Result<Operand> {
    let name = p.expect_ident()?;
    let reg = regs
        .get(&name)
        .ok_or_else(|| p.err(format!("unknown register `{name}`")))?;
    if let Tok::Sym('[') = p.peek_tok()? {
        p.next_tok()?;
        let idx = p.expect_int()? as usize;
        p.expect_sym(']')?;
        if idx >= reg.size {
            return Err(Error::IndexOutOfRange(format!(
                "{name}[{idx}] (register size {})",
                reg.size
            )));
        }
        Ok(Operand::Single(reg.offset + idx))
    } else {
        Ok(Operand::Whole((reg.offset..reg.offset + reg.size).collect()))
    }
}

fn parse_gate_stmt(
    p: &mut Parser,
    gate: &str,
    qregs: &HashMap<String, Register>,
    cregs: &HashMap<String, Register>,
    qreg_order: &[String],
    num_qubits: usize,
) -> Result<Instruction> {
    if gate == "measure" {
        let q = parse_operand(p, qregs)?;
        match p.next_tok()? {
            Tok::Arrow => {}
            other => return Err(p.err(format!("expected `->`, found {other:?}"))),
        }
        let c = parse_operand(p, cregs)?;
        p.expect_sym(';')?;
        let (qs, cs) = match (q, c) {
            (Operand::Single(q), Operand::Single(c)) => (vec![q], vec![c]),
            (Operand::Whole(qs), Operand::Whole(cs)) if qs.len() == cs.len() => (qs, cs),
            _ => return Err(p.err("measure operands must have matching shape")),
        };
        return Ok(Instruction {
            kind: GateKind::Measure,
            params: Vec::new(),
            qubits: qs,
            clbits: cs,
            condition: None,
            tag: None,
        });
    }
    if gate == "reset" {
        let q = parse_operand(p, qregs)?;
        p.expect_sym(';')?;
        let qs = match q {
            Operand::Single(q) => vec![q],
            Operand::Whole(qs) => qs,
        };
        return Ok(Instruction {
            kind: GateKind::Reset,
            params: Vec::new(),
            qubits: qs,
            clbits: Vec::new(),
            condition: None,
            tag: None,
        });
    }
    if gate == "barrier" {
        let mut qs = Vec::new();
        if let Tok::Sym(';') = p.peek_tok()? {
            p.next_tok()?;
            for name in qreg_order {
                let reg = &qregs[name];
                qs.extend(reg.offset..reg.offset + reg.size);
            }
            if qs.is_empty() {
                qs.extend(0..num_qubits);
            }
        } else {
            loop {
                match parse_operand(p, qregs)? {
                    Operand::Single(q) => qs.push(q),
                    Operand::Whole(more) => qs.extend(more),
                }
                match p.next_tok()? {
                    Tok::Sym(',') => continue,
                    Tok::Sym(';') => break,
                    other => return Err(p.err(format!("expected `,` or `;`, found {other:?}"))),
                }
            }
        }
        return Ok(Instruction::barrier(qs));
    }

    let kind = GateKind::from_name(gate).ok_or_else(|| Error::UnknownGate(gate.to_string()))?;
    if !kind.is_unitary() || kind == GateKind::VirtualGate {
        return Err(Error::UnknownGate(gate.to_string()));
    }
    let mut params = Vec::new();
    if kind.num_params() > 0 {
        p.expect_sym('(')?;
        for i in 0..kind.num_params() {
            if i > 0 {
                p.expect_sym(',')?;
            }
            params.push(p.parse_angle()?);
        }
        p.expect_sym(')')?;
    }
    let mut qubits = Vec::new();
    loop {
        match parse_operand(p, qregs)? {
            Operand::Single(q) => qubits.push(q),
            Operand::Whole(_) => {
                return Err(p.err("register-wide gate application not supported"))
            }
        }
        match p.next_tok()? {
            Tok::Sym(',') => continue,
            Tok::Sym(';') => break,
            other => return Err(p.err(format!("expected `,` or `;`, found {other:?}"))),
        }
    }
    Ok(Instruction {
        kind,
        params,
        qubits,
        clbits: Vec::new(),
        condition: None,
        tag: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn two_qubit_program() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits, 2);
        assert_eq!(c.instructions.len(), 2);
        assert_eq!(c.instructions[0].kind, GateKind::H);
        assert_eq!(c.instructions[1].kind, GateKind::CX);
        assert_eq!(c.instructions[1].qubits, vec![0, 1]);
    }

    #[test]
    fn empty_program() {
        let c = parse_qasm("qreg q[1];").unwrap();
        assert_eq!(c.num_qubits, 1);
        assert!(c.instructions.is_empty());
    }

    #[test]
    fn full_header_and_measure() {
        let src = r#"
            OPENQASM 2.0;
            include "qelib1.inc";
            qreg q[2];
            creg c[2];
            rx(pi/2) q[0];
            rzz(-pi/4) q[0], q[1];
            measure q -> c;
        "#;
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.instructions[0].params[0], std::f64::consts::PI / 2.0);
        assert_eq!(c.instructions[1].params[0], -std::f64::consts::PI / 4.0);
        // register-wide measure expands per qubit
        assert_eq!(c.instructions.len(), 4);
    }

    #[test]
    fn conditional_gate() {
        let src = "qreg q[2]; creg m[1]; measure q[0] -> m[0]; if (m==1) x q[1];";
        let c = parse_qasm(src).unwrap();
        let cond = c.instructions[1].condition.unwrap();
        assert_eq!(cond.clbit, 0);
        assert_eq!(cond.value, 1);
    }

    #[test]
    fn unknown_gate_error() {
        assert!(matches!(
            parse_qasm("qreg q[1]; foo q[0];"),
            Err(Error::UnknownGate(_))
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_qasm("qreg q[;") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(
            parse_qasm("qreg q[1]; h q[4];"),
            Err(Error::IndexOutOfRange(_))
        ));
    }
}
