//! Run configuration: TOML on disk, defaults for everything.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use lattice_bv::bvtheory::{FreeBVModel, Theory};
use lattice_bv::lattice::{Lattice, Point, Region};
use lattice_bv::scalar::parse_rational;
use serde::{Deserialize, Serialize};

use crate::suites::SUITES;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// `kg` or `maxwell2d`.
    pub name: String,
    pub sites: i64,
    pub slope: i64,
    /// Klein-Gordon only.
    pub kappa: String,
    pub mass2: String,
    /// Negates one block of the fiber metric; breaks compatibility with `Q`.
    pub flip_metric: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { name: "kg".into(), sites: 21, slope: 1, kappa: "1".into(), mass2: "1".into(), flip_metric: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionSpec {
    /// Causal hull of `(t, x)` and `(t + height, x)`.
    Diamond { name: String, t: i64, x: i64, height: i64 },
    Slab { name: String, t0: i64, t1: i64 },
}

impl RegionSpec {
    pub fn name(&self) -> &str {
        match self {
            RegionSpec::Diamond { name, .. } | RegionSpec::Slab { name, .. } => name,
        }
    }

    fn time_range(&self) -> (i64, i64) {
        match *self {
            RegionSpec::Diamond { t, height, .. } => (t, t + height),
            RegionSpec::Slab { t0, t1, .. } => (t0, t1),
        }
    }

    fn build(&self, l: &Lattice) -> lattice_bv::Result<Region> {
        match *self {
            RegionSpec::Diamond { t, x, height, .. } => {
                l.causal_hull(&[Point { t, x: l.wrap(x) }, Point { t: t + height, x: l.wrap(x) }])
            }
            RegionSpec::Slab { t0, t1, .. } => l.slab(t0, t1),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SlabConfig {
    pub t0: i64,
    pub t1: i64,
    /// Cutoff slice; the slices `cut - 1 ..= cut + 1` must lie in the slab.
    pub cut: i64,
    /// Sites of the ring used by the time-slice suite.
    pub timeslice_sites: i64,
}

impl Default for SlabConfig {
    fn default() -> Self {
        Self { t0: -3, t1: 4, cut: 0, timeslice_sites: 9 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Random samples per identity.
    pub samples: usize,
    /// Largest symmetric power for the time-slice homotopies.
    pub p_max: usize,
    /// Half-width of the square window of delta sources around the origin.
    pub window: i64,
    pub model: ModelConfig,
    pub regions: Vec<RegionSpec>,
    /// Tuples for the factorization products, listed in any order.
    pub tuples: Vec<Vec<String>>,
    /// Pairs that must be causally disjoint.
    pub spacelike: Vec<[String; 2]>,
    /// `[later, earlier]` pairs.
    pub time_ordered: Vec<[String; 2]>,
    pub slab: SlabConfig,
    pub suites: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = |name: &str, t, x| RegionSpec::Diamond { name: name.into(), t, x, height: 3 };
        Self {
            seed: 7,
            samples: 40,
            p_max: 3,
            window: 1,
            model: ModelConfig::default(),
            regions: vec![d("d0", 0, 0), d("d1", 5, 0), d("d2", 10, 0), d("d3", 15, 0), d("side", 0, 10)],
            tuples: vec![
                vec![],
                vec!["d1".into()],
                vec!["d1".into(), "d0".into()],
                vec!["d2".into(), "d0".into(), "d1".into()],
                vec!["d1".into(), "d3".into(), "d0".into(), "d2".into()],
            ],
            spacelike: vec![["d0".into(), "side".into()]],
            time_ordered: vec![["d1".into(), "d0".into()]],
            slab: SlabConfig::default(),
            suites: vec!["all".into()],
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Larger windows and sample counts.
    pub fn extend(&mut self) {
        self.samples *= 4;
        self.window = self.window.max(2);
    }

    /// Canonical JSON of the whole configuration, the input to every digest.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn suite_list(&self) -> Vec<&'static str> {
        let all = self.suites.iter().any(|s| s == "all");
        SUITES.iter().map(|(n, _)| *n).filter(|n| all || self.suites.iter().any(|s| s == n)).collect()
    }

    /// Checks everything that can be checked before building operators and
    /// returns the built setup.
    pub fn validate(&self) -> Result<Setup, ConfigError> {
        let m = &self.model;
        if m.sites < 3 || m.slope < 1 {
            return bad(format!("need sites >= 3 and slope >= 1, got sites = {}, slope = {}", m.sites, m.slope));
        }
        if self.p_max > 4 {
            return bad("p_max must be at most 4");
        }
        if !(0..=3).contains(&self.window) {
            return bad("window must lie in 0..=3");
        }
        for s in &self.suites {
            if s != "all" && !SUITES.iter().any(|(n, _)| n == s) {
                let names: Vec<_> = SUITES.iter().map(|(n, _)| *n).collect();
                return bad(format!("unknown suite {s:?}; valid suites: all, {}", names.join(", ")));
            }
        }
        let sc = &self.slab;
        if !(sc.t0 < sc.cut - 1 && sc.cut + 1 < sc.t1) {
            return bad(format!("slab {}..={} must contain the slices {}..={} strictly inside", sc.t0, sc.t1, sc.cut - 1, sc.cut + 1));
        }
        if sc.timeslice_sites < 3 {
            return bad("timeslice_sites must be at least 3");
        }

        let mut specs = BTreeMap::new();
        for r in &self.regions {
            if let RegionSpec::Diamond { height, .. } = r {
                if *height < 0 {
                    return bad(format!("region {}: negative height", r.name()));
                }
            }
            if specs.insert(r.name().to_string(), r).is_some() {
                return bad(format!("duplicate region name {}", r.name()));
            }
        }
        let lookup = |n: &String| specs.get(n).copied().ok_or_else(|| ConfigError(format!("unknown region {n:?}")));
        for [a, b] in &self.spacelike {
            let (ra, rb) = (lookup(a)?.time_range(), lookup(b)?.time_range());
            let extent = ra.1.max(rb.1) - ra.0.min(rb.0);
            if m.sites <= 2 * m.slope * extent {
                return bad(format!(
                    "spacelike pair ({a}, {b}): need sites > 2 * slope * time extent, got {} <= 2 * {} * {extent}",
                    m.sites, m.slope
                ));
            }
        }

        let lattice = Lattice::new(m.sites, m.slope).map_err(|e| ConfigError(e.to_string()))?;
        let model = build_model(m, lattice)?;
        let theory = Theory::new(model).map_err(|e| ConfigError(e.to_string()))?;
        let mut regions = BTreeMap::new();
        for (name, spec) in &specs {
            let r = spec.build(&lattice).map_err(|e| ConfigError(format!("region {name}: {e}")))?;
            regions.insert(name.clone(), r);
        }
        let get = |n: &String| regions[n].clone();
        for t in &self.tuples {
            for n in t {
                lookup(n)?;
            }
            let rs: Vec<Region> = t.iter().map(get).collect();
            if rs.iter().any(|r| !r.is_finite()) {
                return bad(format!("tuple {t:?}: regions must be finite"));
            }
            if !lattice.is_time_orderable(&rs).map_err(|e| ConfigError(e.to_string()))? {
                return bad(format!("tuple {t:?} is not time-orderable"));
            }
        }
        for [a, b] in &self.spacelike {
            if !lattice.causally_disjoint(&get(a), &get(b)).map_err(|e| ConfigError(e.to_string()))? {
                return bad(format!("regions {a} and {b} are not causally disjoint"));
            }
        }
        for [a, b] in &self.time_ordered {
            lookup(a)?;
            lookup(b)?;
            if !lattice.is_time_ordered(&[get(a), get(b)]).map_err(|e| ConfigError(e.to_string()))? {
                return bad(format!("({a}, {b}) is not time-ordered"));
            }
        }
        Ok(Setup { theory, regions })
    }

    /// The same model on the time-slice ring.
    pub fn timeslice_theory(&self) -> Result<Arc<Theory>, ConfigError> {
        let lattice = Lattice::new(self.slab.timeslice_sites, self.model.slope).map_err(|e| ConfigError(e.to_string()))?;
        Theory::new(build_model(&self.model, lattice)?).map_err(|e| ConfigError(e.to_string()))
    }
}

fn build_model(m: &ModelConfig, lattice: Lattice) -> Result<FreeBVModel, ConfigError> {
    let model = match m.name.as_str() {
        "kg" => {
            let p = |s: &str| parse_rational(s).map_err(|e| ConfigError(format!("model coupling {s:?}: {e}")));
            FreeBVModel::kg(lattice, p(&m.kappa)?, p(&m.mass2)?)
        }
        "maxwell2d" => FreeBVModel::maxwell2d(lattice),
        other => return bad(format!("unknown model {other:?}; valid models: kg, maxwell2d")),
    };
    Ok(if m.flip_metric { model.with_flipped_metric() } else { model })
}

pub struct Setup {
    pub theory: Arc<Theory>,
    pub regions: BTreeMap<String, Region>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn wrap_constraint_is_enforced() {
        let mut c = RunConfig::default();
        c.model.sites = 6;
        let e = c.validate().err().unwrap();
        assert!(e.0.contains("2 * slope"), "{e}");
    }

    #[test]
    fn shipped_config_matches_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
        assert_eq!(RunConfig::load(&path).unwrap(), RunConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn unknown_fields_and_names_rejected() {
        assert!(toml::from_str::<RunConfig>("sede = 3").is_err());
        let mut c = RunConfig::default();
        c.tuples.push(vec!["nowhere".into()]);
        assert!(c.validate().is_err());
        let c = RunConfig { time_ordered: vec![["d0".into(), "d1".into()]], ..Default::default() };
        assert!(c.validate().is_err());
    }
}
