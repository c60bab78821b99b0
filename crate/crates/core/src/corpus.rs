//! Built-in `(P, Q, a)` triples.

use crate::error::{Error, Result};
use crate::potential::{MatrixPotential, VectorSpec};

/// A named pair of systems sharing an initial value.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub label: &'static str,
    pub p: MatrixPotential,
    pub q: MatrixPotential,
    pub a: VectorSpec,
    /// Both spectra simple.
    pub simple: bool,
    /// `a` excites every mode of both systems.
    pub generating: bool,
    pub identical: bool,
}

fn parsed(p11: &str, p12: &str, p22: &str) -> MatrixPotential {
    MatrixPotential::parse(p11, p12, None, p22).expect("built-in potential parses")
}

fn generic_a() -> VectorSpec {
    VectorSpec::parse("exp(1*x)", "1 + x^2").expect("built-in initial value parses")
}

pub fn corpus() -> Vec<CorpusEntry> {
    let coupled_p = parsed("1", "0.3", "2");
    vec![
        CorpusEntry {
            name: "identical",
            label: "P = Q = [[1, 0.3], [0.3, 2]], a = (1 + x, 1 - x)",
            p: coupled_p.clone(),
            q: coupled_p,
            a: VectorSpec::parse("1 + x", "1 - x").expect("parses"),
            simple: true,
            generating: true,
            identical: true,
        },
        CorpusEntry {
            name: "const-diag",
            label: "P = diag(1, 2), Q = diag(1, 2.4); spectra {k²π² + 1, k²π² + 2} and {k²π² + 1, k²π² + 2.4}",
            p: MatrixPotential::diagonal(1.0, 2.0),
            q: MatrixPotential::diagonal(1.0, 2.4),
            a: generic_a(),
            simple: true,
            generating: true,
            identical: false,
        },
        CorpusEntry {
            name: "coupled",
            label: "P = [[1, 0.3], [0.3, 1]], Q = [[1, 0.5], [0.5, 1]]; spectra {0.7, 1.3} + k²π² and {0.5, 1.5} + k²π²",
            p: parsed("1", "0.3", "1"),
            q: parsed("1", "0.5", "1"),
            a: generic_a(),
            simple: true,
            generating: true,
            identical: false,
        },
        CorpusEntry {
            name: "smooth",
            label: "trigonometric entries, P != Q",
            p: parsed("1 + 0.5*cos(pi*x)", "0.2*sin(pi*x)", "2 + 0.3*cos(2*pi*x)"),
            q: parsed("1.2 + 0.4*cos(pi*x)", "0.1 + 0.2*sin(2*pi*x)", "2.5 - 0.3*cos(pi*x)"),
            a: generic_a(),
            simple: true,
            generating: true,
            identical: false,
        },
        CorpusEntry {
            name: "near-degenerate",
            label: "P = Q = diag(1, 1 + 1e-12); violates simplicity hypothesis",
            p: MatrixPotential::diagonal(1.0, 1.0 + 1e-12),
            q: MatrixPotential::diagonal(1.0, 1.0 + 1e-12),
            a: generic_a(),
            simple: false,
            generating: true,
            identical: true,
        },
    ]
}

pub fn lookup(name: &str) -> Result<CorpusEntry> {
    corpus()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Configuration(format!("no corpus entry named '{name}'")))
}

/// One line per entry: name, hypotheses satisfied, label.
pub fn list_corpus() -> Vec<String> {
    corpus()
        .iter()
        .map(|e| {
            let simple = if e.simple { "simple" } else { "not simple" };
            let gen = if e.generating { "generating a" } else { "non-generating a" };
            format!("{:<16} {simple}; {gen}; {}", e.name, e.label)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_labels() {
        let names: Vec<_> = corpus().iter().map(|e| e.name).collect();
        assert_eq!(names, ["identical", "const-diag", "coupled", "smooth", "near-degenerate"]);
        assert!(lookup("near-degenerate").unwrap().label.contains("violates simplicity hypothesis"));
        assert!(lookup("nope").is_err());
        assert!(list_corpus()[1].contains("k²π² + 1"));
    }
}
