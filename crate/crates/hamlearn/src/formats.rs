//! JSON documents read and written by the command line.

use std::fs;
use std::path::Path;

use hamlearn_core::distances::{DistanceKind, DistanceResult};
use hamlearn_core::{PauliString, ResourceLedger, SparseHamiltonian};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub pauli: String,
    pub coeff: f64,
}

/// `{"n": 4, "terms": [{"pauli": "XIZY", "coeff": 0.5}, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianDoc {
    pub n: usize,
    pub terms: Vec<TermDoc>,
}

impl HamiltonianDoc {
    pub fn from_hamiltonian(h: &SparseHamiltonian) -> Self {
        HamiltonianDoc {
            n: h.num_qubits(),
            terms: h.terms().map(|(p, c)| TermDoc { pauli: p.to_string(), coeff: c }).collect(),
        }
    }

    /// Rejects wrong string lengths, identity terms and duplicates.
    pub fn to_hamiltonian(&self) -> Result<SparseHamiltonian, CliError> {
        if self.n == 0 {
            return Err(CliError::Input("n must be positive".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let p: PauliString = t.pauli.parse().map_err(|e| CliError::Input(format!("{e}")))?;
            if p.num_qubits() != self.n {
                return Err(CliError::Input(format!("term {} has length {}, expected {}", t.pauli, p.num_qubits(), self.n)));
            }
            terms.push((p, t.coeff));
        }
        SparseHamiltonian::from_terms(self.n, terms).map_err(|e| CliError::Input(format!("{e}")))
    }
}

/// `{"experiments", "total_time", "queries", "min_resolution", "ancilla"}`; the
/// resolution is `null` before any timed query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerDoc {
    pub experiments: u64,
    pub total_time: f64,
    pub queries: u64,
    pub min_resolution: Option<f64>,
    pub ancilla: u32,
}

impl From<&ResourceLedger> for LedgerDoc {
    fn from(l: &ResourceLedger) -> Self {
        LedgerDoc {
            experiments: l.experiments,
            total_time: l.total_evolution_time,
            queries: l.queries,
            min_resolution: l.min_resolution(),
            ancilla: l.ancilla_qubits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceDoc {
    pub kind: String,
    pub value: f64,
    pub argmax: f64,
    pub grid_error: f64,
}

impl From<&DistanceResult> for DistanceDoc {
    fn from(r: &DistanceResult) -> Self {
        let kind = match r.kind {
            DistanceKind::TimeConstrained => "time_constrained",
            DistanceKind::TemperatureConstrained => "temperature_constrained",
        };
        DistanceDoc { kind: kind.into(), value: r.value, argmax: r.argmax, grid_error: r.grid_error }
    }
}

/// Parameters and ground-truth diagnostics of one learning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDoc {
    pub seed: u64,
    pub eps: f64,
    pub delta: f64,
    pub s_bound: usize,
    pub spam: f64,
    pub mode: String,
    pub candidates: Vec<String>,
    pub linf_error: f64,
    pub success: bool,
    pub support_covered: bool,
    pub isolation_ok: bool,
    pub estimates_ok: bool,
}

/// Output of `learn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnDoc {
    pub hamiltonian: HamiltonianDoc,
    pub ledger: LedgerDoc,
    pub run: RunDoc,
}

pub const LEARN_CSV_HEADER: &str = "seed,success,linf_error,op_error,experiments,total_time,queries,min_resolution";

/// Header plus one row; missing values are empty fields.
pub fn learn_csv(doc: &LearnDoc, op_error: Option<f64>) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{LEARN_CSV_HEADER}\n{},{},{},{},{},{},{},{}\n",
        doc.run.seed,
        doc.run.success,
        doc.run.linf_error,
        opt(op_error),
        doc.ledger.experiments,
        doc.ledger.total_time,
        doc.ledger.queries,
        opt(doc.ledger.min_resolution),
    )
}

pub fn read_hamiltonian(path: &Path) -> Result<SparseHamiltonian, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_hamiltonian(&text)
}

pub fn parse_hamiltonian(text: &str) -> Result<SparseHamiltonian, CliError> {
    let doc: HamiltonianDoc = serde_json::from_str(text).map_err(|e| CliError::Input(format!("{e}")))?;
    doc.to_hamiltonian()
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    // Serializing these plain structs cannot fail.
    serde_json::to_string_pretty(value).expect("serializable document")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_document_round_trip() {
        let h = SparseHamiltonian::from_letters(&[("XIZY", 0.5), ("ZZII", -0.25)]).unwrap();
        let text = to_json_pretty(&HamiltonianDoc::from_hamiltonian(&h));
        assert_eq!(parse_hamiltonian(&text).unwrap(), h);
    }

    #[test]
    fn loader_rejects_bad_documents() {
        for bad in [
            r#"{"n": 2, "terms": [{"pauli": "II", "coeff": 1.0}]}"#,
            r#"{"n": 2, "terms": [{"pauli": "XI", "coeff": 1.0}, {"pauli": "XI", "coeff": 2.0}]}"#,
            r#"{"n": 3, "terms": [{"pauli": "XI", "coeff": 1.0}]}"#,
            r#"{"n": 2, "terms": [{"pauli": "XQ", "coeff": 1.0}]}"#,
            r#"{"n": 2}"#,
        ] {
            assert!(parse_hamiltonian(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_ledger_has_null_resolution() {
        let doc = LedgerDoc::from(&ResourceLedger::new());
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains(r#""min_resolution":null"#), "{text}");
    }
}
