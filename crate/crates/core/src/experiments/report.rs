use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A strict inequality that holds only up to the tolerance.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Eq => "==",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub observed: f64,
    pub relation: Relation,
    pub bound: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl Assertion {
    pub fn new(name: impl Into<String>, observed: f64, relation: Relation, bound: f64, tolerance: f64) -> Self {
        let near = (observed - bound).abs() <= tolerance;
        let status = match relation {
            Relation::Le if observed <= bound + tolerance => Status::Pass,
            Relation::Eq if near => Status::Pass,
            Relation::Lt if observed < bound - tolerance => Status::Pass,
            Relation::Gt if observed > bound + tolerance => Status::Pass,
            Relation::Lt | Relation::Gt if near => Status::Boundary,
            _ => Status::Fail,
        };
        Self { name: name.into(), observed, relation, bound, tolerance, status }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: BTreeMap<String, Value>,
    pub observed: BTreeMap<String, f64>,
    pub bound: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            config: BTreeMap::new(),
            observed: BTreeMap::new(),
            bound: BTreeMap::new(),
            assertions: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn observe(&mut self, key: &str, value: f64) -> &mut Self {
        self.observed.insert(key.to_string(), value);
        self
    }

    pub fn bound(&mut self, key: &str, value: f64) -> &mut Self {
        self.bound.insert(key.to_string(), value);
        self
    }

    pub fn assert(&mut self, name: &str, observed: f64, relation: Relation, bound: f64, tolerance: f64) -> &mut Self {
        self.assertions.push(Assertion::new(name, observed, relation, bound, tolerance));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// True when no assertion failed; boundary cases count as passing.
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.status != Status::Fail)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per config entry, observation, bound and assertion, with
    /// columns `section,name,value,relation,bound,status`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["section", "name", "value", "relation", "bound", "status"])?;
        for (k, v) in &self.config {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            w.write_record(["config", k, &v, "", "", ""])?;
        }
        for (section, map) in [("observed", &self.observed), ("bound", &self.bound)] {
            for (k, v) in map {
                w.write_record([section, k, &v.to_string(), "", "", ""])?;
            }
        }
        for a in &self.assertions {
            let status = match a.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Boundary => "boundary",
            };
            w.write_record([
                "assertion",
                &a.name,
                &a.observed.to_string(),
                a.relation.symbol(),
                &a.bound.to_string(),
                status,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
