use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    /// Worst deviation or other number backing the verdict.
    pub witness: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    pub seed: u64,
    pub details: Value,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            verdicts: Vec::new(),
            seed,
            details: Value::Null,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn verdict(&mut self, name: &str, pass: bool, witness: f64) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            witness,
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (seed {})\n", self.command, self.seed);
        for (k, v) in &self.parameters {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for v in &self.verdicts {
            out.push_str(&format!(
                "  [{}] {} (witness {:e})\n",
                if v.pass { "ok" } else { "FAIL" },
                v.name,
                v.witness
            ));
        }
        if !self.details.is_null() {
            out.push_str(&serde_json::to_string_pretty(&self.details).expect("details serialize"));
            out.push('\n');
        }
        out
    }
}
