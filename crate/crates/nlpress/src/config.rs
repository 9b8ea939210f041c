//! Experiment configuration: the TOML schema and its validation into core
//! objects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nlpress_core::factor::SlidingBlockCode;
use nlpress_core::pressure::PressureOptions;
use nlpress_core::rational::parse_rational;
use nlpress_core::variational::VariationalConfig;
use nlpress_core::{
    Cover, CylSet, CylinderFunction, EnergyFunctional, MarkovMeasure, Partition, Polynomial,
    Rational, Subshift, Word,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub name: Option<String>,
    pub system: SystemSpec,
    #[serde(default)]
    pub energy: EnergySpec,
    #[serde(default)]
    pub covers: Vec<CoverSpec>,
    #[serde(default)]
    pub measures: Vec<MeasureSpec>,
    pub run: RunSpec,
    #[serde(default)]
    pub variational: Option<VariationalSpec>,
    #[serde(default)]
    pub factor: Option<FactorSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// 0/1 transition matrix, one row per symbol.
    pub matrix: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySpec {
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

/// `F(∫ f dμ)` with `F(x) = Σ c_k x^k` and `f` a table on `window`-words.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// Coefficients `c_0, c_1, …` as rational strings.
    pub polynomial: Vec<String>,
    #[serde(default = "one")]
    pub window: usize,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
    /// Value for words missing from `values`.
    #[serde(default)]
    pub default: Option<String>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub name: String,
    /// Each element as a list of words; the element is the union of their cylinders.
    #[serde(default)]
    pub elements: Option<Vec<Vec<String>>>,
    /// Shorthand for the partition into cylinders of this length.
    #[serde(default)]
    pub partition: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub name: String,
    /// `bernoulli`, `markov` or `uniform`.
    pub kind: String,
    #[serde(default)]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default)]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub memory: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub tasks: Vec<String>,
    /// Inclusive range `[n_min, n_max]`.
    pub n: Vec<usize>,
    #[serde(default)]
    pub m_list: Vec<u32>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub precision: Option<String>,
    #[serde(default)]
    pub resolution_cap: Option<usize>,
    #[serde(default)]
    pub node_budget: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub greedy: Option<bool>,
    /// Largest `n` for the entropy tables; defaults to `min(n_max, 4)`.
    #[serde(default)]
    pub entropy_n_max: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalSpec {
    #[serde(default)]
    pub cover: Option<String>,
    #[serde(default)]
    pub memory: Option<usize>,
    #[serde(default)]
    pub n_ent: Option<usize>,
    #[serde(default)]
    pub starts: Option<usize>,
    #[serde(default)]
    pub max_sweeps: Option<usize>,
    #[serde(default)]
    pub max_evaluations: Option<u64>,
    #[serde(default)]
    pub abundance_eps: Option<f64>,
}

/// A sliding block code from `source` onto the configured system.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub source: Vec<Vec<u8>>,
    #[serde(default = "one")]
    pub window: usize,
    /// Source block → target symbol.
    pub map: BTreeMap<String, String>,
    #[serde(default)]
    pub cover: Option<String>,
    #[serde(default)]
    pub n_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Pressure,
    Entropy,
    Variational,
    FactorAudit,
    InequalityAudit,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Pressure => "pressure",
            Task::Entropy => "entropy",
            Task::Variational => "variational",
            Task::FactorAudit => "factor_audit",
            Task::InequalityAudit => "inequality_audit",
        }
    }

    fn parse(s: &str) -> Option<Task> {
        [
            Task::Pressure,
            Task::Entropy,
            Task::Variational,
            Task::FactorAudit,
            Task::InequalityAudit,
        ]
        .into_iter()
        .find(|t| t.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Float,
    Exact,
}

impl Precision {
    pub fn parse(s: &str) -> Option<Precision> {
        match s {
            "float" | "log-float" => Some(Precision::Float),
            "exact" | "exact-rational" => Some(Precision::Exact),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Float => "float",
            Precision::Exact => "exact",
        }
    }
}

/// One problem found while validating a config.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Location in the config, e.g. `covers[1].elements`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct VariationalSettings {
    pub cover: usize,
    pub config: VariationalConfig,
    pub abundance_eps: f64,
}

#[derive(Clone, Debug)]
pub struct FactorSettings {
    pub code: SlidingBlockCode,
    pub cover: usize,
    pub n_values: Vec<usize>,
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub name: String,
    pub sys: Subshift,
    pub energy: EnergyFunctional,
    pub covers: Vec<(String, Cover)>,
    pub measures: Vec<(String, MarkovMeasure)>,
    pub tasks: BTreeSet<Task>,
    pub n_values: Vec<usize>,
    pub m_list: Vec<u32>,
    pub window: Option<usize>,
    pub precision: Precision,
    pub opts: PressureOptions,
    pub seed: u64,
    pub greedy: bool,
    pub entropy_n_max: usize,
    pub variational: Option<VariationalSettings>,
    pub factor: Option<FactorSettings>,
}

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<Precision>,
    pub seed: Option<u64>,
}

struct Diags(Vec<Diagnostic>);

impl Diags {
    fn push(&mut self, path: impl Into<String>, message: impl fmt::Display) {
        self.0.push(Diagnostic {
            path: path.into(),
            message: message.to_string(),
        });
    }

    fn check<T, E: fmt::Display>(&mut self, path: impl Into<String>, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(path, e);
                None
            }
        }
    }
}

/// Parses and validates a config. Returns the experiment when there are no
/// diagnostics.
pub fn load(text: &str, overrides: &Overrides) -> Result<Experiment, Vec<Diagnostic>> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        vec![Diagnostic {
            path: "config".into(),
            message: e.message().to_string(),
        }]
    })?;
    let mut d = Diags(Vec::new());
    let exp = build(&file, overrides, &mut d);
    match exp {
        Some(e) if d.0.is_empty() => Ok(e),
        _ => Err(d.0),
    }
}

/// Diagnostics only; never runs anything.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    load(text, &Overrides::default()).err().unwrap_or_default()
}

fn build(file: &ConfigFile, overrides: &Overrides, d: &mut Diags) -> Option<Experiment> {
    let sys = d.check("system.matrix", Subshift::from_matrix(&file.system.matrix));

    let mut tasks = BTreeSet::new();
    if file.run.tasks.is_empty() {
        d.push("run.tasks", "task list is empty");
    }
    for (i, t) in file.run.tasks.iter().enumerate() {
        match Task::parse(t) {
            Some(t) => {
                tasks.insert(t);
            }
            None => d.push(format!("run.tasks[{i}]"), format!("unknown task {t:?}")),
        }
    }

    let n_values: Vec<usize> = match file.run.n.as_slice() {
        [lo, hi] if *lo >= 1 && lo <= hi => (*lo..=*hi).collect(),
        _ => {
            d.push("run.n", "expected [n_min, n_max] with 1 <= n_min <= n_max");
            Vec::new()
        }
    };

    let precision = match (&overrides.precision, &file.run.precision) {
        (Some(p), _) => *p,
        (None, None) => Precision::Float,
        (None, Some(s)) => Precision::parse(s).unwrap_or_else(|| {
            d.push(
                "run.precision",
                format!("unknown precision {s:?}; use \"float\" or \"exact\""),
            );
            Precision::Float
        }),
    };
    let defaults = PressureOptions::default();
    let opts = PressureOptions {
        resolution_cap: file.run.resolution_cap.unwrap_or(defaults.resolution_cap),
        node_budget: file.run.node_budget.unwrap_or(defaults.node_budget),
    };
    if file.run.window == Some(0) {
        d.push("run.window", "window must be at least 1");
    }

    let sys = sys?;
    let energy = build_energy(&sys, &file.energy, d);

    let mut covers: Vec<(String, Cover)> = Vec::new();
    for (i, c) in file.covers.iter().enumerate() {
        let path = format!("covers[{i}]");
        if covers.iter().any(|(n, _)| *n == c.name) {
            d.push(
                format!("{path}.name"),
                format!("duplicate cover name {:?}", c.name),
            );
        }
        let cover = match (&c.elements, c.partition) {
            (Some(elements), None) => build_cover(&sys, elements, &path, d),
            (None, Some(r)) if r >= 1 => Some(Partition::cylinders(&sys, r).into_cover()),
            (None, Some(_)) => {
                d.push(
                    format!("{path}.partition"),
                    "cylinder length must be at least 1",
                );
                None
            }
            _ => {
                d.push(
                    path.clone(),
                    "give exactly one of `elements` or `partition`",
                );
                None
            }
        };
        if let Some(cover) = cover {
            covers.push((c.name.clone(), cover));
        }
    }
    let needs_cover = tasks
        .iter()
        .any(|t| *t != Task::Entropy || !file.measures.is_empty());
    if file.covers.is_empty() && needs_cover {
        d.push("covers", "at least one cover is required");
    }
    let cover_index = |name: &Option<String>, path: &str, d: &mut Diags| -> Option<usize> {
        match name {
            None => (!covers.is_empty()).then_some(0),
            Some(n) => {
                let found = covers.iter().position(|(c, _)| c == n);
                if found.is_none() {
                    d.push(path, format!("no cover named {n:?}"));
                }
                found
            }
        }
    };

    let mut measures = Vec::new();
    for (i, m) in file.measures.iter().enumerate() {
        if let Some(mu) = build_measure(&sys, m, &format!("measures[{i}]"), d) {
            measures.push((m.name.clone(), mu));
        }
    }
    if tasks.contains(&Task::Entropy) && measures.is_empty() && covers.is_empty() {
        d.push(
            "measures",
            "the entropy task needs a cover and, for measure entropies, a measure",
        );
    }

    let seed = overrides.seed.or(file.run.seed).unwrap_or(0);
    let variational = if tasks.contains(&Task::Variational) {
        let spec = file.variational.clone().unwrap_or_default();
        let base = VariationalConfig::default();
        let config = VariationalConfig {
            memory: spec.memory.unwrap_or(base.memory),
            n_ent: spec.n_ent.unwrap_or(base.n_ent),
            starts: spec.starts.unwrap_or(base.starts),
            max_sweeps: spec.max_sweeps.unwrap_or(base.max_sweeps),
            max_evaluations: spec.max_evaluations.unwrap_or(base.max_evaluations),
            seed,
        };
        if config.memory == 0 || config.n_ent == 0 || config.starts == 0 {
            d.push("variational", "memory, n_ent and starts must be at least 1");
        }
        cover_index(&spec.cover, "variational.cover", d).map(|cover| VariationalSettings {
            cover,
            config,
            abundance_eps: spec.abundance_eps.unwrap_or(0.05),
        })
    } else {
        None
    };

    let factor = if tasks.contains(&Task::FactorAudit) {
        match &file.factor {
            None => {
                d.push("factor", "the factor_audit task needs a [factor] section");
                None
            }
            Some(spec) => build_factor(&sys, spec, d).and_then(|code| {
                let cover = cover_index(&spec.cover, "factor.cover", d)?;
                let n_max = spec
                    .n_max
                    .unwrap_or(n_values.last().copied().unwrap_or(1).min(4));
                Some(FactorSettings {
                    code,
                    cover,
                    n_values: (1..=n_max).collect(),
                })
            }),
        }
    } else {
        None
    };

    let entropy_n_max = file
        .run
        .entropy_n_max
        .unwrap_or(n_values.last().copied().unwrap_or(1).min(4));
    if entropy_n_max == 0 {
        d.push("run.entropy_n_max", "must be at least 1");
    }

    Some(Experiment {
        name: file.name.clone().unwrap_or_else(|| "experiment".into()),
        sys,
        energy: energy?,
        covers,
        measures,
        tasks,
        n_values,
        m_list: file.run.m_list.clone(),
        window: file.run.window,
        precision,
        opts,
        seed,
        greedy: file.run.greedy.unwrap_or(true),
        entropy_n_max,
        variational,
        factor,
    })
}

fn parse_q(text: &str, path: &str, d: &mut Diags) -> Option<Rational> {
    d.check(path, parse_rational(text))
}

fn build_energy(sys: &Subshift, spec: &EnergySpec, d: &mut Diags) -> Option<EnergyFunctional> {
    let mut terms = Vec::new();
    let mut ok = true;
    for (i, t) in spec.terms.iter().enumerate() {
        let path = format!("energy.terms[{i}]");
        let coeffs: Option<Vec<Rational>> = t
            .polynomial
            .iter()
            .enumerate()
            .map(|(k, c)| parse_q(c, &format!("{path}.polynomial[{k}]"), d))
            .collect();
        if t.window == 0 {
            d.push(format!("{path}.window"), "window must be at least 1");
            ok = false;
            continue;
        }
        let default = match &t.default {
            Some(v) => parse_q(v, &format!("{path}.default"), d),
            None => None,
        };
        let mut entries = Vec::new();
        for (w, v) in &t.values {
            let word = d.check(format!("{path}.values.{w}"), Word::parse(w));
            let value = parse_q(v, &format!("{path}.values.{w}"), d);
            if let (Some(word), Some(value)) = (word, value) {
                entries.push((word, value));
            }
        }
        if let Some(def) = default {
            for w in sys.words(t.window) {
                if !entries.iter().any(|(e, _)| *e == w) {
                    entries.push((w, def.clone()));
                }
            }
        }
        let f = d.check(
            format!("{path}.values"),
            CylinderFunction::new(sys, t.window, entries),
        );
        match (coeffs, f) {
            (Some(c), Some(f)) => terms.push((Polynomial::new(c), f)),
            _ => ok = false,
        }
    }
    let e = EnergyFunctional::new(terms);
    ok &= d.check("energy", e.compile(sys)).is_some();
    ok.then_some(e)
}

fn build_cover(
    sys: &Subshift,
    elements: &[Vec<String>],
    path: &str,
    d: &mut Diags,
) -> Option<Cover> {
    let mut sets = Vec::new();
    for (j, e) in elements.iter().enumerate() {
        let refs: Vec<&str> = e.iter().map(String::as_str).collect();
        sets.push(d.check(format!("{path}.elements[{j}]"), CylSet::parse(sys, &refs))?);
    }
    d.check(format!("{path}.elements"), Cover::new(sys, sets))
}

fn build_measure(
    sys: &Subshift,
    m: &MeasureSpec,
    path: &str,
    d: &mut Diags,
) -> Option<MarkovMeasure> {
    let k = m.memory.unwrap_or(1);
    let r = match m.kind.as_str() {
        "bernoulli" => match &m.probabilities {
            Some(p) => MarkovMeasure::bernoulli(sys, p),
            None => {
                d.push(
                    format!("{path}.probabilities"),
                    "a bernoulli measure needs probabilities",
                );
                return None;
            }
        },
        "markov" => match &m.transition {
            Some(t) => MarkovMeasure::with_memory(sys, k, t.clone()),
            None => {
                d.push(
                    format!("{path}.transition"),
                    "a markov measure needs a transition matrix",
                );
                return None;
            }
        },
        "uniform" => MarkovMeasure::uniform_kernel(sys, k),
        other => {
            d.push(
                format!("{path}.kind"),
                format!("unknown measure kind {other:?}"),
            );
            return None;
        }
    };
    d.check(path, r)
}

fn build_factor(target: &Subshift, spec: &FactorSpec, d: &mut Diags) -> Option<SlidingBlockCode> {
    let source = d.check("factor.source", Subshift::from_matrix(&spec.source))?;
    let mut table = Vec::new();
    for (block, image) in &spec.map {
        let path = format!("factor.map.{block}");
        let w = d.check(path.clone(), Word::parse(block))?;
        let b = d.check(path.clone(), Word::parse(image))?;
        if b.len() != 1 {
            d.push(path, "image must be a single symbol");
            return None;
        }
        table.push((w, b.0[0]));
    }
    let code = d.check(
        "factor.map",
        SlidingBlockCode::new(&source, target, spec.window, &table),
    )?;
    Some(code)
}
