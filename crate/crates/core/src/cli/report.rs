//! The analysis pipeline and its JSON report.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::complex::index_signature;
use crate::conley::conley_index;
use crate::morse::{
    conley_morse_graph, index_pair_for_convex, minimal_morse_decomposition, morse_equation, morse_inequalities,
    restrict_to_invariant_part, MorseDecomposition, MorseEquationReport, MorseError, MorseInequalityReport, Role,
};
use crate::mvf::MultivectorField;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceSummary {
    pub cells: usize,
    pub cover_relations: usize,
    pub max_dim: Option<usize>,
    pub simplicial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultivectorEntry {
    pub cells: Vec<String>,
    pub critical: bool,
    /// Poincaré polynomial of `(cl V, mo V)`.
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub rounds: usize,
    /// Cells outside the invariant part, which the analysis ignores.
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseSetEntry {
    pub name: String,
    pub cells: Vec<String>,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
    pub polynomial: String,
    pub coefficients: Vec<u64>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub nodes: Vec<String>,
    /// `[higher, lower]`, transitively reduced.
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub space: SpaceSummary,
    pub multivectors: Vec<MultivectorEntry>,
    pub critical_multivectors: usize,
    pub invariant_restriction: Restriction,
    pub morse_sets: Vec<MorseSetEntry>,
    /// Strict order relations `[higher, lower]`: a path runs from the first set to the second.
    pub order: Vec<[String; 2]>,
    pub morse_equation: MorseEquationReport,
    pub morse_inequalities: MorseInequalityReport,
    pub conley_morse_graph: GraphReport,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Everything the pipeline computes.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    /// The field on the invariant part of the space.
    pub field: MultivectorField,
    pub decomposition: MorseDecomposition,
    pub dot: String,
}

fn set_name(i: usize) -> String {
    format!("M{}", i + 1)
}

/// Restricts to the invariant part, computes the minimal Morse decomposition,
/// Conley indices, the Morse equation and inequalities and the Conley-Morse
/// graph, and cross-checks the results.
pub fn analyze(field: &MultivectorField) -> Result<Analysis, MorseError> {
    let space = field.space();
    let multivectors = field
        .multivectors()
        .iter()
        .enumerate()
        .map(|(i, m)| MultivectorEntry {
            cells: space.names(m),
            critical: field.is_critical(i),
            polynomial: field.signature(i).poincare().to_string(),
        })
        .collect();

    let restricted = restrict_to_invariant_part(field)?;
    let kept = space.set_of(restricted.embedding.iter().copied());
    let invariant_restriction =
        Restriction { rounds: restricted.rounds, removed: space.names(&space.full_set().difference(&kept)) };
    let field_inv = restricted.field;
    let dec = minimal_morse_decomposition(&field_inv)?;
    let equation = morse_equation(&field_inv, &dec)?;
    let inequalities = morse_inequalities(&field_inv, &dec)?;
    if !equation.holds() {
        return Err(MorseError::InternalAssertion("Morse equation fails".into()));
    }
    if !inequalities.holds() {
        return Err(MorseError::InternalAssertion("Morse inequalities fail".into()));
    }
    let graph = conley_morse_graph(&field_inv, &dec)?;

    let sub = field_inv.space();
    let mut morse_sets = Vec::new();
    for (i, m) in dec.sets().iter().enumerate() {
        let index = conley_index(&field_inv, m)?;
        let pair = index_pair_for_convex(&field_inv, &dec, &BTreeSet::from([i]))?;
        if pair.signature(&field_inv)? != index.signature || index_signature(sub, m)? != index.signature {
            return Err(MorseError::InternalAssertion(format!("index pairs of {} disagree", set_name(i))));
        }
        morse_sets.push(MorseSetEntry {
            name: set_name(i),
            cells: sub.names(m),
            betti: index.signature.betti.clone(),
            torsion: index.signature.torsion.clone(),
            polynomial: index.polynomial.to_string(),
            coefficients: index.polynomial.coeffs().to_vec(),
            role: graph.nodes[i].role,
        });
    }
    let n = dec.len();
    let order = (0..n)
        .flat_map(|q| (0..n).map(move |p| (q, p)))
        .filter(|&(q, p)| dec.order().lt(p, q))
        .map(|(q, p)| [set_name(q), set_name(p)])
        .collect();
    let conley_morse_graph = GraphReport {
        nodes: (0..n).map(set_name).collect(),
        edges: graph.edges.iter().map(|&(q, p)| [set_name(q), set_name(p)]).collect(),
    };

    let report = AnalysisReport {
        space: SpaceSummary {
            cells: space.len(),
            cover_relations: space.cover_pairs().len(),
            max_dim: space.max_dim(),
            simplicial: space.is_simplicial(),
        },
        multivectors,
        critical_multivectors: field.critical_count(),
        invariant_restriction,
        morse_sets,
        order,
        morse_equation: equation,
        morse_inequalities: inequalities,
        conley_morse_graph,
    };
    Ok(Analysis { report, dot: graph.to_dot(), field: field_inv, decomposition: dec })
}
