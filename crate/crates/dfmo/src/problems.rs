//! Benchmark problems with known Pareto data and external black boxes.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::protocol::{default_timeout, ExternalClient, ExternalObjective};
use crate::types::{DecisionPoint, ObjectiveVector};

/// Description of where the Pareto set of a catalogue problem lies.
#[derive(Debug, Clone)]
pub enum KnownPareto {
    /// The segment from `a` to `b` in decision space.
    Segment { a: Vec<f64>, b: Vec<f64> },
    /// Sampled Pareto-optimal decision points.
    Samples(Vec<Vec<f64>>),
}

impl KnownPareto {
    /// Representative Pareto-optimal decision points, for diagnostics.
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        match self {
            KnownPareto::Segment { a, b } => (0..count)
                .map(|i| {
                    let t = i as f64 / (count.max(2) - 1) as f64;
                    a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
                })
                .collect(),
            KnownPareto::Samples(points) => points.iter().take(count).cloned().collect(),
        }
    }
}

enum Evaluator {
    Builtin(Box<dyn FnMut(&[f64]) -> Vec<f64>>),
    External(ExternalObjective),
}

/// A black-box objective together with its catalogue metadata.
pub struct Problem {
    name: String,
    n: usize,
    q: usize,
    known_pareto: Option<KnownPareto>,
    suggested_start: Vec<DecisionPoint>,
    evaluator: Evaluator,
}

impl Problem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn known_pareto(&self) -> Option<&KnownPareto> {
        self.known_pareto.as_ref()
    }

    pub fn suggested_start(&self) -> &[DecisionPoint] {
        &self.suggested_start
    }
}

impl Objective for Problem {
    fn n(&self) -> usize {
        self.n
    }

    fn q(&self) -> usize {
        self.q
    }

    fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector> {
        if x.dim() != self.n {
            return Err(Error::Config(format!(
                "problem {} expects dimension {}, got {}",
                self.name,
                self.n,
                x.dim()
            )));
        }
        match &mut self.evaluator {
            Evaluator::Builtin(f) => ObjectiveVector::new(f(x.coords())),
            Evaluator::External(ext) => ext.eval(x),
        }
    }
}

/// Names served by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["remark_a1", "remark_a1_n2", "remark_a1_n3", "tri_quadratic"];

/// Looks up a catalogue problem by name.
///
/// `remark_a1` is the 1-D bi-objective pair `(x², (x−4)²/18)` with Pareto set
/// `[0, 4]`; the `_n2`/`_n3` variants generalize it to
/// `(‖x‖², ‖x − 4·𝟏‖²/18)` whose Pareto set is the segment from the origin to
/// `4·𝟏`. `tri_quadratic` is a three-objective problem in the plane with the
/// triangle spanned by its three anchors as Pareto set.
pub fn builtin(name: &str) -> Result<Problem> {
    match name {
        "remark_a1" => Ok(separable_quadratics(name, 1)),
        "remark_a1_n2" => Ok(separable_quadratics(name, 2)),
        "remark_a1_n3" => Ok(separable_quadratics(name, 3)),
        "tri_quadratic" => Ok(tri_quadratic()),
        _ => Err(Error::Config(format!(
            "unknown problem {name:?}; known problems: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

fn separable_quadratics(name: &str, n: usize) -> Problem {
    let eval = move |x: &[f64]| {
        let f1: f64 = x.iter().map(|v| v * v).sum();
        let f2: f64 = x.iter().map(|v| (v - 4.0) * (v - 4.0)).sum::<f64>() / 18.0;
        vec![f1, f2]
    };
    Problem {
        name: name.to_string(),
        n,
        q: 2,
        known_pareto: Some(KnownPareto::Segment {
            a: vec![0.0; n],
            b: vec![4.0; n],
        }),
        suggested_start: vec![DecisionPoint::new(vec![1.0; n]).unwrap()],
        evaluator: Evaluator::Builtin(Box::new(eval)),
    }
}

const TRI_ANCHORS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

fn tri_quadratic() -> Problem {
    let eval = |x: &[f64]| {
        TRI_ANCHORS
            .iter()
            .map(|a| {
                x.iter()
                    .zip(a)
                    .map(|(xi, ai)| (xi - ai) * (xi - ai))
                    .sum()
            })
            .collect()
    };
    // Barycentric grid over the anchor triangle.
    let mut samples = Vec::new();
    let steps = 10usize;
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            let l1 = i as f64 / steps as f64;
            let l2 = j as f64 / steps as f64;
            let l3 = 1.0 - l1 - l2;
            let x = [
                l1 * TRI_ANCHORS[0][0] + l2 * TRI_ANCHORS[1][0] + l3 * TRI_ANCHORS[2][0],
                l1 * TRI_ANCHORS[0][1] + l2 * TRI_ANCHORS[1][1] + l3 * TRI_ANCHORS[2][1],
            ];
            samples.push(x.to_vec());
        }
    }
    Problem {
        name: "tri_quadratic".to_string(),
        n: 2,
        q: 3,
        known_pareto: Some(KnownPareto::Samples(samples)),
        suggested_start: vec![DecisionPoint::new(vec![0.8, 0.9]).unwrap()],
        evaluator: Evaluator::Builtin(Box::new(eval)),
    }
}

/// Wraps an external command speaking the line protocol as a [`Problem`].
/// The protocol carries no dimension handshake, so `n` and `q` are supplied
/// by the caller.
pub fn external_blackbox(
    command: &str,
    n: usize,
    q: usize,
    timeout: Option<Duration>,
) -> Result<Problem> {
    if n == 0 || q == 0 {
        return Err(Error::Config(
            "external problems need n >= 1 and q >= 1".into(),
        ));
    }
    let client = ExternalClient::spawn(command, timeout.unwrap_or_else(default_timeout))?;
    Ok(Problem {
        name: format!("external:{command}"),
        n,
        q,
        known_pareto: None,
        suggested_start: vec![DecisionPoint::new(vec![1.0; n]).unwrap()],
        evaluator: Evaluator::External(ExternalObjective::new(client, n, q)),
    })
}
