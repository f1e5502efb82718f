use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    pub paper_anchor: String,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, params: &impl Serialize, anchor: &str) -> Self {
        Self {
            command: command.to_string(),
            params: to_value(params),
            result: Value::Null,
            checks: Vec::new(),
            paper_anchor: anchor.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn set_result(&mut self, r: &impl Serialize) {
        self.result = to_value(r);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain JSON");
        s.push('\n');
        s
    }

    /// Human-readable rendering of the report.
    pub fn summary(&self) -> String {
        let mut lines = vec![format!("galdef {} :: {} ({})", self.version, self.command, self.paper_anchor)];
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                lines.push(format!("  {k}: {}", short(v)));
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        lines.push(format!("checks: {passed}/{} passed", self.checks.len()));
        for c in &self.checks {
            let tag = if c.pass { "pass" } else { "FAIL" };
            lines.push(format!("  [{tag}] {}: {}", c.name, c.detail));
        }
        lines.join("\n")
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn short(v: &Value) -> String {
    match v {
        Value::Array(a) if a.len() <= 12 && a.iter().all(|x| !x.is_array() && !x.is_object()) => v.to_string(),
        Value::Array(a) => format!("[{} entries]", a.len()),
        Value::Object(o) if o.len() <= 4 && o.values().all(|x| !x.is_array() && !x.is_object()) => v.to_string(),
        Value::Object(o) => format!("{{{} fields}}", o.len()),
        _ => v.to_string(),
    }
}
