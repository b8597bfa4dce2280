use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use gauss_parity::diagram::{ChordDiagram, DecoratedDiagram};
use gauss_parity::invariants::{bracket_eq, enumerate_diagrams, parity_bracket};
use gauss_parity::moves::{MoveTrace, TraceJson};
use gauss_parity::parity::{gaussian_parity, verify_axioms, GroupDescriptor, GroupElement, ParityAssignment, Violation};
use gauss_parity::search::fuzz_trace;
use gauss_parity::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Parity axioms along each trace.
    Axioms,
    /// Parity bracket constant along each trace.
    Bracket,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityChoice {
    /// Gaussian parity.
    Gp,
    /// Deliberately wrong: odd exactly on chords with odd vertex id. Used to
    /// check that violations are surfaced.
    Broken,
}

impl ParityChoice {
    pub fn evaluate(self, d: &ChordDiagram) -> ParityAssignment {
        match self {
            ParityChoice::Gp => gaussian_parity(d),
            ParityChoice::Broken => ParityAssignment::from_fn(GroupDescriptor::Z2, d, |l| {
                GroupElement::z2(d.vertex_id(l) % 2 == 1)
            }),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub suite: Suite,
    pub parity: ParityChoice,
    pub seed: u64,
    pub trace: TraceJson,
    pub detail: Detail,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detail {
    Axiom(Violation),
    Bracket { step: usize, before: Vec<String>, after: Vec<String> },
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub suite: Suite,
    pub parity: ParityChoice,
    pub seeds: usize,
    pub traces: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Runs one suite on one trace; the first problem found, if any.
pub fn check(suite: Suite, parity: ParityChoice, trace: &MoveTrace) -> Result<Option<Detail>> {
    let values: Vec<ParityAssignment> = trace.diagrams.iter().map(|d| parity.evaluate(d.base())).collect();
    match suite {
        Suite::Axioms => {
            let r = verify_axioms(trace, &values)?;
            Ok(r.0.into_iter().next().map(Detail::Axiom))
        }
        Suite::Bracket => {
            let first = parity_bracket(trace.diagrams[0].base(), &values[0])?;
            for (i, (d, p)) in trace.diagrams.iter().zip(&values).enumerate().skip(1) {
                let b = parity_bracket(d.base(), p)?;
                if !bracket_eq(&first, &b) {
                    return Ok(Some(Detail::Bracket {
                        step: i,
                        before: first.codes(),
                        after: b.codes(),
                    }));
                }
            }
            Ok(None)
        }
    }
}

/// Seed diagrams: the given one, or every free diagram with at most
/// `max_n` chords.
pub fn seed_diagrams(given: Option<DecoratedDiagram>, max_n: usize) -> Vec<DecoratedDiagram> {
    match given {
        Some(d) => vec![d],
        None => (0..=max_n)
            .flat_map(enumerate_diagrams)
            .map(DecoratedDiagram::free)
            .collect(),
    }
}

pub struct FuzzParams {
    pub suite: Suite,
    pub parity: ParityChoice,
    pub traces: usize,
    pub length: usize,
    pub cap: usize,
    pub seed: u64,
}

pub fn run(seeds: &[DecoratedDiagram], p: &FuzzParams) -> Result<Summary> {
    use rayon::prelude::*;
    let outcomes: Vec<(u64, MoveTrace, Option<Detail>)> = (0..p.traces)
        .into_par_iter()
        .map(|i| {
            let d = &seeds[i % seeds.len()];
            let seed = p.seed.wrapping_add(i as u64);
            let t = fuzz_trace(d, p.length, seed, p.cap);
            let found = check(p.suite, p.parity, &t)?;
            Ok((seed, t, found))
        })
        .collect::<Result<_>>()?;
    let failures = outcomes.iter().filter(|o| o.2.is_some()).count();
    let counterexample = outcomes
        .into_iter()
        .find(|o| o.2.is_some())
        .map(|(seed, t, detail)| Counterexample {
            suite: p.suite,
            parity: p.parity,
            seed,
            trace: t.to_json(),
            detail: detail.unwrap(),
        });
    Ok(Summary {
        suite: p.suite,
        parity: p.parity,
        seeds: seeds.len(),
        traces: p.traces,
        failures,
        counterexample,
    })
}
