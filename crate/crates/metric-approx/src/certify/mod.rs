//! Certificates and their verifiers.

mod delta;
mod graph;
mod lemma;
mod verify;
mod words;

pub use delta::{check_delta_solution, DeltaReport};
pub use graph::{graph_from_sofic, verify_graph, GraphCertificate, GraphReport};
pub use lemma::{lemma_consistency_suite, BoundCheck, LemmaConfig, LemmaReport};
pub use verify::{verify_d, verify_d_with};
pub use words::{d_from_w, verify_r, verify_w, w_from_d, HomCertificate, DEFAULT_WORD_CAP};

use crate::error::{Error, Result};
use crate::groups::{ball, Elem, Group};
use crate::targets::{Dimension, Dist, Family, Target};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::HashMap;

/// Record of how a certificate was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub builder: String,
    pub params: Value,
    pub claimed_n: usize,
    pub claimed_dimension: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<Trace>,
}

impl Trace {
    pub fn new(builder: &str, params: Value, n: usize, dimension: Dimension) -> Trace {
        Trace { builder: builder.to_string(), params, claimed_n: n, claimed_dimension: dimension.to_json(), inputs: vec![] }
    }

    pub fn with_inputs(mut self, inputs: Vec<Trace>) -> Trace {
        self.inputs = inputs;
        self
    }
}

/// A map from the ball B(n) into one target group.
#[derive(Clone, Debug)]
pub struct ApproxCertificate {
    pub group: Group,
    pub family: Family,
    pub epsilon: Dist,
    pub n: usize,
    pub dimension: Dimension,
    /// Ball elements in canonical order, parallel to `targets`.
    pub elements: Vec<Elem>,
    pub targets: Vec<Target>,
    pub provenance: Option<Trace>,
    index: HashMap<Elem, usize>,
}

impl ApproxCertificate {
    /// Assigns a target to every element of B(n). The dimension is read off the identity's image.
    pub fn build<F>(group: Group, family: Family, n: usize, mut assign: F) -> Result<ApproxCertificate>
    where
        F: FnMut(&Elem) -> Result<Target>,
    {
        let b = ball(&group, n)?;
        let targets = b.elements.iter().map(&mut assign).collect::<Result<Vec<_>>>()?;
        let dimension = targets[0].dimension()?;
        let epsilon = family.default_epsilon();
        Ok(ApproxCertificate::from_parts(group, family, epsilon, n, dimension, b.elements, targets))
    }

    pub fn from_parts(
        group: Group,
        family: Family,
        epsilon: Dist,
        n: usize,
        dimension: Dimension,
        elements: Vec<Elem>,
        targets: Vec<Target>,
    ) -> ApproxCertificate {
        let index = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        ApproxCertificate { group, family, epsilon, n, dimension, elements, targets, provenance: None, index }
    }

    pub fn with_trace(mut self, t: Trace) -> ApproxCertificate {
        self.provenance = Some(t);
        self
    }

    pub fn with_epsilon(mut self, eps: Dist) -> ApproxCertificate {
        self.epsilon = eps;
        self
    }

    pub fn get(&self, g: &Elem) -> Option<&Target> {
        self.index.get(g).map(|&i| &self.targets[i])
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Image of g, or the identity target outside the assigned ball.
    pub fn image(&self, g: &Elem) -> Target {
        self.get(g).cloned().unwrap_or_else(|| self.targets[0].identity_like())
    }

    /// The same map restricted to a smaller ball.
    pub fn restrict(&self, n: usize) -> Result<ApproxCertificate> {
        if n > self.n {
            return Err(Error::Invalid(format!("cannot restrict radius {} to {n}", self.n)));
        }
        let b = ball(&self.group, n)?;
        let targets = b
            .elements
            .iter()
            .map(|g| self.get(g).cloned().ok_or_else(|| Error::MissingAssignment(self.group.normal_form(g))))
            .collect::<Result<Vec<_>>>()?;
        let mut c = ApproxCertificate::from_parts(
            self.group.clone(),
            self.family.clone(),
            self.epsilon,
            n,
            self.dimension,
            b.elements,
            targets,
        );
        c.provenance = self.provenance.clone();
        Ok(c)
    }

    /// Applies f to every assigned target.
    pub fn map_targets<F>(&self, family: Family, mut f: F) -> Result<ApproxCertificate>
    where
        F: FnMut(&Target) -> Result<Target>,
    {
        let targets = self.targets.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let dimension = targets[0].dimension()?;
        let eps = family.default_epsilon();
        Ok(ApproxCertificate::from_parts(self.group.clone(), family, eps, self.n, dimension, self.elements.clone(), targets))
    }

    pub fn to_json(&self) -> Value {
        let assignments: Vec<Value> = self
            .elements
            .iter()
            .zip(&self.targets)
            .map(|(g, t)| json!({ "element": self.group.normal_form(g), "target": t.to_json() }))
            .collect();
        let mut v = json!({
            "group": self.group.to_json(),
            "family": self.family.to_string(),
            "epsilon": self.epsilon.value(),
            "n": self.n,
            "dimension": self.dimension.to_json(),
            "assignments": assignments,
        });
        if let Dist::Exact(r) = self.epsilon {
            v["epsilon_exact"] = json!(r.to_string());
        }
        if let Some(t) = &self.provenance {
            v["provenance"] = serde_json::to_value(t).expect("serializable");
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<ApproxCertificate> {
        let bad = |m: &str| Error::Invalid(format!("certificate: {m}"));
        let group = Group::from_json(v.get("group").ok_or_else(|| bad("missing group"))?)?;
        let family = Family::parse(v.get("family").and_then(Value::as_str).ok_or_else(|| bad("missing family"))?)?;
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let dimension = Dimension::from_json(v.get("dimension").ok_or_else(|| bad("missing dimension"))?)?;
        let epsilon = match v.get("epsilon_exact").and_then(Value::as_str) {
            Some(s) => Dist::Exact(s.parse().map_err(|_| bad("bad epsilon_exact"))?),
            None => match v.get("epsilon").and_then(Value::as_f64) {
                Some(x) => {
                    let def = family.default_epsilon();
                    if (x - def.value()).abs() < 1e-15 {
                        def
                    } else {
                        Dist::from_f64(x)
                    }
                }
                None => family.default_epsilon(),
            },
        };
        let mut elements = Vec::new();
        let mut targets = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for a in v.get("assignments").and_then(Value::as_array).ok_or_else(|| bad("missing assignments"))? {
            let el = a.get("element").ok_or_else(|| bad("assignment without element"))?;
            let g = match el.as_str() {
                Some(s) => group.parse_normal_form(s)?,
                None => group.decode(el)?,
            };
            if !seen.insert(g.clone()) {
                return Err(bad(&format!("duplicate assignment for {}", group.normal_form(&g))));
            }
            elements.push(g);
            targets.push(Target::from_json(a.get("target").ok_or_else(|| bad("assignment without target"))?)?);
        }
        if elements.is_empty() {
            return Err(bad("no assignments"));
        }
        let mut c = ApproxCertificate::from_parts(group, family, epsilon, n, dimension, elements, targets);
        if let Some(p) = v.get("provenance") {
            c.provenance = Some(serde_json::from_value(p.clone()).map_err(|e| bad(&e.to_string()))?);
        }
        Ok(c)
    }
}

/// Outcome of a verification sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub pass: bool,
    /// Largest multiplicativity defect (or distance of a trivial word from the identity).
    pub defect: Dist,
    pub defect_witness: Vec<String>,
    /// Smallest separation between images of distinct elements (or of nontrivial words from the identity).
    pub separation: Option<Dist>,
    pub separation_witness: Vec<String>,
    pub defect_threshold: Dist,
    pub separation_threshold: Dist,
    pub margin: f64,
    pub checked_defect: usize,
    pub checked_separation: usize,
}

impl Report {
    pub fn defect_ok(&self) -> bool {
        self.defect.lt(&self.defect_threshold, self.margin)
    }

    pub fn separation_ok(&self) -> bool {
        self.separation.is_none_or(|s| s.gt(&self.separation_threshold, self.margin))
    }

    fn finish(mut self) -> Report {
        self.pass = self.defect_ok() && self.separation_ok();
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "defect": self.defect.to_json(),
            "defect_threshold": self.defect_threshold.to_json(),
            "defect_witness": self.defect_witness,
            "defect_margin": self.defect_threshold.value() - self.defect.value(),
            "separation": self.separation.map(|s| s.to_json()),
            "separation_threshold": self.separation_threshold.to_json(),
            "separation_witness": self.separation_witness,
            "separation_margin": self.separation.map(|s| s.value() - self.separation_threshold.value()),
            "float_margin": self.margin,
            "checked_defect": self.checked_defect,
            "checked_separation": self.checked_separation,
        })
    }
}
