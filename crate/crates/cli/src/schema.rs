//! Structural checks on input documents, run before anything is parsed into
//! library types.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Field path, e.g. `positive_brake[0].mu_cz`; `$` is the document root.
    pub path: String,
    pub message: String,
}

/// Which document shape to check against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schema {
    Path,
    Family,
    Moduli,
    BrakeJob,
    System,
}

impl Schema {
    /// Guesses the shape from the top-level keys.
    pub fn infer(doc: &Value) -> Option<Schema> {
        let obj = doc.as_object()?;
        let has = |k: &str| obj.contains_key(k);
        if has("genus") || has("positive_brake") || has("negative_pairs") {
            Some(Schema::Moduli)
        } else if has("system") {
            Some(Schema::BrakeJob)
        } else if has("times") || obj.get("kind").and_then(Value::as_str) == Some("rotation") {
            Some(Schema::Path)
        } else if has("domain") {
            Some(Schema::Family)
        } else if has("name") || has("terms") {
            Some(Schema::System)
        } else {
            None
        }
    }
}

/// Validates a document, inferring its shape.
pub fn validate(doc: &Value) -> Vec<Violation> {
    match Schema::infer(doc) {
        Some(s) => validate_as(s, doc),
        None => vec![Violation { path: "$".into(), message: "unrecognized document shape".into() }],
    }
}

pub fn validate_as(schema: Schema, doc: &Value) -> Vec<Violation> {
    let mut c = Checker::default();
    match schema {
        Schema::Path => c.path("$", doc),
        Schema::Family => c.family(doc),
        Schema::Moduli => c.moduli(doc),
        Schema::BrakeJob => c.brake_job(doc),
        Schema::System => {
            c.system("$", doc, false);
        }
    }
    c.out
}

fn join(base: &str, field: &str) -> String {
    if base == "$" {
        field.to_string()
    } else {
        format!("{base}.{field}")
    }
}

#[derive(Default)]
struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.out.push(Violation { path: path.into(), message: message.into() });
    }

    fn object<'a>(&mut self, path: &str, v: &'a Value, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.push(path, "expected an object");
            return None;
        };
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(join(path, k), "unknown field");
            }
        }
        Some(obj)
    }

    fn number(&mut self, path: &str, v: Option<&Value>) -> Option<f64> {
        match v.and_then(Value::as_f64) {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.push(path, if v.is_none() { "missing number" } else { "expected a finite number" });
                None
            }
        }
    }

    fn count(&mut self, path: &str, v: Option<&Value>, min: u64) -> Option<u64> {
        match v {
            None => {
                self.push(path, "missing integer");
                None
            }
            Some(v) => match v.as_u64() {
                Some(k) if k >= min => Some(k),
                _ => {
                    self.push(path, format!("expected an integer >= {min}"));
                    None
                }
            },
        }
    }

    fn half_int(&mut self, path: &str, v: &Value) {
        let ok = v.as_object().is_some_and(|o| o.len() == 1 && o.get("doubled").is_some_and(Value::is_i64));
        if !ok {
            self.push(path, "expected a half-integer {\"doubled\": k}");
        }
    }

    fn matrix(&mut self, path: &str, v: &Value) -> Option<usize> {
        let Some(rows) = v.as_array() else {
            self.push(path, "expected a matrix as nested arrays");
            return None;
        };
        let dim = rows.len();
        let square = rows.iter().all(|r| r.as_array().is_some_and(|r| r.len() == dim && r.iter().all(|x| x.as_f64().is_some_and(f64::is_finite))));
        if !square || dim == 0 || dim % 2 == 1 {
            self.push(path, "expected a square matrix of even size with finite entries");
            return None;
        }
        Some(dim)
    }

    fn path(&mut self, path: &str, doc: &Value) {
        let is_generator = doc.get("kind").is_some();
        if is_generator {
            let Some(obj) = self.object(path, doc, &["kind", "omega", "n", "interval", "samples"]) else { return };
            if obj.get("kind").and_then(Value::as_str) != Some("rotation") {
                self.push(join(path, "kind"), "only the \"rotation\" generator is supported");
            }
            self.number(&join(path, "omega"), obj.get("omega"));
            self.count(&join(path, "n"), obj.get("n"), 1);
            self.count(&join(path, "samples"), obj.get("samples"), 2);
            let ip = join(path, "interval");
            match obj.get("interval").and_then(Value::as_array).map(|a| a.iter().map(Value::as_f64).collect::<Vec<_>>()) {
                Some(v) if v.len() == 2 && v.iter().all(Option::is_some) => {
                    if v[0] >= v[1] {
                        self.push(ip, "interval must satisfy a < b");
                    }
                }
                _ => self.push(ip, "expected [a, b]"),
            }
            return;
        }
        let Some(obj) = self.object(path, doc, &["times", "matrices"]) else { return };
        let tp = join(path, "times");
        let times: Option<Vec<f64>> = obj.get("times").and_then(Value::as_array).and_then(|a| a.iter().map(Value::as_f64).collect());
        match &times {
            None => self.push(tp.clone(), "expected an array of numbers"),
            Some(t) if t.len() < 2 => self.push(tp.clone(), "need at least two samples"),
            Some(t) if t.windows(2).any(|w| w[1] <= w[0]) => self.push(tp.clone(), "times must be strictly increasing"),
            _ => {}
        }
        let mp = join(path, "matrices");
        let Some(mats) = obj.get("matrices").and_then(Value::as_array) else {
            self.push(mp, "expected an array of matrices");
            return;
        };
        if let Some(t) = &times {
            if t.len() != mats.len() {
                self.push(mp.clone(), format!("{} matrices for {} times", mats.len(), t.len()));
            }
        }
        let mut dim = None;
        for (i, m) in mats.iter().enumerate() {
            let ip = format!("{mp}[{i}]");
            if let Some(d) = self.matrix(&ip, m) {
                match dim {
                    None => dim = Some(d),
                    Some(d0) if d0 != d => self.push(ip, format!("size {d} differs from {d0}")),
                    _ => {}
                }
            }
        }
    }

    fn family(&mut self, doc: &Value) {
        let Some(obj) = self.object("$", doc, &["n", "period", "domain", "from", "to", "points"]) else { return };
        self.count("n", obj.get("n"), 1);
        if let Some(p) = self.number("period", obj.get("period")) {
            if p <= 0.0 {
                self.push("period", "period must be positive");
            }
        }
        match obj.get("domain").and_then(Value::as_str) {
            Some("full" | "brake_symmetric") => {}
            _ => self.push("domain", "expected \"full\" or \"brake_symmetric\""),
        }
        self.number("from", obj.get("from"));
        self.number("to", obj.get("to"));
        if obj.contains_key("points") {
            self.count("points", obj.get("points"), 2);
        }
    }

    fn moduli(&mut self, doc: &Value) {
        let lists = ["positive_brake", "negative_brake", "positive_pairs", "negative_pairs"];
        let mut allowed = vec!["n", "genus", "c1"];
        allowed.extend(lists);
        let Some(obj) = self.object("$", doc, &allowed) else { return };
        self.count("n", obj.get("n"), 1);
        match obj.get("genus") {
            Some(g) if g.is_u64() => {}
            Some(_) => self.push("genus", "genus must be a non-negative integer"),
            None => self.push("genus", "missing integer"),
        }
        if obj.get("c1").is_some_and(|c| !c.is_i64()) {
            self.push("c1", "expected an integer");
        }
        for list in lists {
            let Some(v) = obj.get(list) else { continue };
            let Some(items) = v.as_array() else {
                self.push(list, "expected an array of orbit records");
                continue;
            };
            let brake = list.ends_with("brake");
            for (i, item) in items.iter().enumerate() {
                self.orbit(&format!("{list}[{i}]"), item, brake);
            }
        }
    }

    fn orbit(&mut self, path: &str, v: &Value, brake: bool) {
        let Some(obj) = self.object(path, v, &["label", "kind", "mu1", "mu_cz", "nullities", "multiplicity", "period"]) else { return };
        if !obj.get("label").is_some_and(Value::is_string) {
            self.push(join(path, "label"), "expected a string");
        }
        let expected = if brake { "brake_orbit" } else { "reeb_pair" };
        match obj.get("kind").and_then(Value::as_str) {
            Some(k) if k == expected => {}
            Some("brake_orbit" | "reeb_pair") => self.push(join(path, "kind"), format!("kind/index mismatch: this list holds {expected} records")),
            _ => self.push(join(path, "kind"), "expected \"brake_orbit\" or \"reeb_pair\""),
        }
        let (own, other) = if brake { ("mu1", "mu_cz") } else { ("mu_cz", "mu1") };
        if obj.contains_key(other) {
            let what = if brake { "brake orbit" } else { "Reeb pair" };
            self.push(join(path, other), format!("kind/index mismatch: {what} carries {other}"));
        }
        match obj.get(own) {
            Some(x) => self.half_int(&join(path, own), x),
            None => self.push(join(path, own), "missing index"),
        }
        if let Some(nu) = obj.get("nullities") {
            if !nu.as_array().is_some_and(|a| a.len() == 3 && a.iter().all(Value::is_u64)) {
                self.push(join(path, "nullities"), "expected [nu, nu1, nu2]");
            }
        }
        if obj.contains_key("multiplicity") {
            self.count(&join(path, "multiplicity"), obj.get("multiplicity"), 1);
        }
        if obj.contains_key("period") {
            if let Some(p) = self.number(&join(path, "period"), obj.get("period")) {
                if p <= 0.0 {
                    self.push(join(path, "period"), "period must be positive");
                }
            }
        }
    }

    /// Returns the system's `n` when it can be read.
    fn system(&mut self, path: &str, doc: &Value, need_symmetric: bool) -> Option<u64> {
        if doc.get("name").is_some() {
            let obj = self.object(path, doc, &["name", "n", "weights"])?;
            return match obj.get("name").and_then(Value::as_str) {
                Some("harmonic") => self.count(&join(path, "n"), obj.get("n"), 1),
                Some("aniso") => {
                    let wp = join(path, "weights");
                    match obj.get("weights").and_then(Value::as_array) {
                        Some(w) if !w.is_empty() && w.iter().all(|x| x.as_f64().is_some_and(|x| x > 0.0)) => {
                            if obj.get("n").is_some_and(|n| n.as_u64() != Some(w.len() as u64)) {
                                self.push(join(path, "n"), "n must equal the number of weights");
                            }
                            Some(w.len() as u64)
                        }
                        _ => {
                            self.push(wp, "expected a non-empty array of positive weights");
                            None
                        }
                    }
                }
                _ => {
                    self.push(join(path, "name"), "expected \"harmonic\" or \"aniso\"");
                    None
                }
            };
        }
        let obj = self.object(path, doc, &["n", "symmetric", "terms"])?;
        let n = self.count(&join(path, "n"), obj.get("n"), 1);
        let claimed = obj.get("symmetric").and_then(Value::as_bool);
        if claimed.is_none() {
            self.push(join(path, "symmetric"), "expected a boolean");
        }
        let tp = join(path, "terms");
        let Some(terms) = obj.get("terms").and_then(Value::as_array) else {
            self.push(tp, "expected an array of terms");
            return n;
        };
        let mut even = true;
        for (i, t) in terms.iter().enumerate() {
            let ip = format!("{tp}[{i}]");
            let Some(o) = self.object(&ip, t, &["coeff", "powers"]) else { continue };
            let coeff = self.number(&join(&ip, "coeff"), o.get("coeff"));
            let powers: Option<Vec<u64>> = o.get("powers").and_then(Value::as_array).and_then(|a| a.iter().map(Value::as_u64).collect());
            match (powers, n) {
                (Some(p), Some(n)) if p.len() as u64 == 2 * n => {
                    if coeff != Some(0.0) && p[..n as usize].iter().any(|e| e % 2 == 1) {
                        even = false;
                    }
                }
                (Some(p), Some(n)) => self.push(join(&ip, "powers"), format!("{} exponents, expected {}", p.len(), 2 * n)),
                (None, _) => self.push(join(&ip, "powers"), "expected non-negative integer exponents"),
                _ => {}
            }
        }
        match claimed {
            Some(true) if !even => self.push(join(path, "symmetric"), "claimed symmetric but some term is odd in p"),
            Some(false) if need_symmetric => self.push(join(path, "symmetric"), "brake orbits need a symmetric system"),
            _ => {}
        }
        n
    }

    fn brake_job(&mut self, doc: &Value) {
        let Some(obj) = self.object("$", doc, &["system", "energy", "guess", "tau_guess"]) else { return };
        let n = match obj.get("system") {
            Some(s) => self.system("system", s, true),
            None => {
                self.push("system", "missing system");
                None
            }
        };
        self.number("energy", obj.get("energy"));
        if let Some(t) = self.number("tau_guess", obj.get("tau_guess")) {
            if t <= 0.0 {
                self.push("tau_guess", "tau_guess must be positive");
            }
        }
        let guess: Option<Vec<f64>> = obj.get("guess").and_then(Value::as_array).and_then(|a| a.iter().map(Value::as_f64).collect());
        match (guess, n) {
            (None, _) => self.push("guess", "expected an array of numbers"),
            (Some(g), Some(n)) if g.len() as u64 != 2 * n => self.push("guess", format!("{} coordinates, expected {}", g.len(), 2 * n)),
            (Some(g), Some(n)) if g[..n as usize].iter().any(|x| *x != 0.0) => self.push("guess", "the first n coordinates (p) must be zero"),
            _ => {}
        }
    }
}
