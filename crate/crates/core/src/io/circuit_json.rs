use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{AngleExpr, Circuit, Gate, GateKind};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    qubits: usize,
    params: usize,
    gates: Vec<GateDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    g: String,
    q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<AngleExpr>,
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    Error::parse(
        format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

/// Parses and validates a circuit document.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(json_error)?;
    if doc.qubits == 0 {
        return Err(Error::parse("qubits", "must be at least 1"));
    }
    let mut gates = Vec::with_capacity(doc.gates.len());
    for (i, g) in doc.gates.into_iter().enumerate() {
        let path = format!("gates[{i}]");
        let kind: GateKind = g
            .g
            .parse()
            .map_err(|_| Error::parse(format!("{path}.g"), format!("unknown gate '{}'", g.g)))?;
        if let Some((j, q)) = g.q.iter().enumerate().find(|(_, &q)| q >= doc.qubits) {
            return Err(Error::parse(
                format!("{path}.q[{j}]"),
                format!("qubit {q} out of range for {} qubits", doc.qubits),
            ));
        }
        let gate = Gate::new(kind, g.q, g.angle).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::parse(path.clone(), m),
            other => other,
        })?;
        gates.push(gate);
    }
    let circuit =
        Circuit::new(doc.qubits, gates).map_err(|e| Error::parse("gates", e.to_string()))?;
    if circuit.num_params() != doc.params {
        return Err(Error::parse(
            "params",
            format!(
                "declared {} but the gates reference {} slot(s)",
                doc.params,
                circuit.num_params()
            ),
        ));
    }
    Ok(circuit)
}

/// Serializes a circuit in the document format read by [`parse_circuit`].
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let doc = CircuitDoc {
        qubits: circuit.num_qubits(),
        params: circuit.num_params(),
        gates: circuit
            .gates()
            .iter()
            .map(|g| GateDoc {
                g: g.kind().name().to_string(),
                q: g.qubits().to_vec(),
                angle: g.angle().cloned(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("circuit documents serialize")
}
