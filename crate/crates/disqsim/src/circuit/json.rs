//! Native JSON circuit format.
//!
//! Schema: `{num_qubits, num_clbits, qubit_roles, instructions:[{kind,
//! params, qubits, clbits, condition, tag}]}` with fixed field order so
//! serialize → parse → serialize is bit-exact.

use super::Circuit;
use crate::error::Result;

pub fn parse_json(text: &str) -> Result<Circuit> {
    let circuit: Circuit = serde_json::from_str(text)?;
    circuit.validate()?;
    Ok(circuit)
}

pub fn serialize_json(circuit: &Circuit) -> String {
    serde_json::to_string_pretty(circuit).expect("circuit serialization cannot fail")
}
