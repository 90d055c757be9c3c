//! Run configuration: flat `key = value` text with `[section]` headers.
//!
//! ```text
//! [group]
//! preset = B2
//!
//! [tubes]
//! slopes = 0.1
//! c0 = 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::groups::{generate_group, preset_group, Hyperplane, Preset, ReflectionGroup, DEFAULT_CAP};
use crate::smoothing::{SmoothChain, SmoothProfile, TubeSpec};
use crate::verify::SuiteOptions;

#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Preset(Preset),
    Generators(Vec<Vec<f64>>),
}

/// Optional tube parameters; missing values fall back to the defaults for
/// the group. A single slope or cap is used for every level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TubeOverrides {
    pub slopes: Option<Vec<f64>>,
    pub caps: Option<Vec<f64>>,
    pub c0: Option<f64>,
    pub softmin_exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl GridSpec {
    /// `[-2, 2]^n` with 21 nodes per axis.
    pub fn cube(n: usize) -> Self {
        Self { lower: vec![-2.0; n], upper: vec![2.0; n], nodes: vec![21; n] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub group: GroupSpec,
    pub cap: usize,
    pub tubes: TubeOverrides,
    pub suite: SuiteOptions,
    /// Box for `grid`; the cube of the group dimension when absent.
    pub grid: Option<GridSpec>,
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut suite = SuiteOptions::default();
        suite.growth.seed = suite.seed;
        Self {
            group: GroupSpec::Preset(Preset::B2),
            cap: DEFAULT_CAP,
            tubes: TubeOverrides::default(),
            suite,
            grid: None,
            output: None,
        }
    }
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn split_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let row = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse { row, message: "unterminated section header".into() })?;
            current = name.trim().to_ascii_lowercase();
            out.entry(current.clone()).or_default();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { row, message: format!("expected `key = value`, got `{line}`") })?;
        let key = k.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(Error::Parse { row, message: "empty key".into() });
        }
        let section = out.entry(current.clone()).or_default();
        if section.insert(key.clone(), (row, v.trim().to_string())).is_some() {
            return Err(Error::Parse { row, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(out)
}

struct Reader {
    sections: Sections,
}

impl Reader {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.sections.get_mut(section).and_then(|s| s.remove(key))
    }

    fn float(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        self.take(section, key).map(|(row, v)| parse_float(row, key, &v)).transpose()
    }

    fn count(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        self.take(section, key)
            .map(|(row, v)| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse { row, message: format!("`{key}` expects a non-negative integer") })
            })
            .transpose()
    }

    fn floats(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(section, key).map(|(row, v)| parse_list(row, key, &v)).transpose()
    }

    fn counts(&mut self, section: &str, key: &str) -> Result<Option<Vec<usize>>> {
        self.take(section, key)
            .map(|(row, v)| {
                v.split(',')
                    .map(|s| {
                        s.trim().parse::<usize>().map_err(|_| Error::Parse {
                            row,
                            message: format!("`{key}` expects comma-separated integers"),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn leftover(&self) -> Option<String> {
        self.sections
            .iter()
            .find_map(|(s, m)| m.iter().next().map(|(k, (row, _))| format!("row {row}: unknown key `{k}` in [{s}]")))
    }
}

fn parse_float(row: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Parse { row, message: format!("`{key}` expects a number, got `{v}`") })?;
    if !x.is_finite() {
        return Err(Error::Parse { row, message: format!("`{key}` is not finite") });
    }
    Ok(x)
}

fn parse_list(row: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_float(row, key, s)).collect()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("`{name}` must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Reader { sections: split_sections(text)? };
        let mut cfg = RunConfig::default();

        let preset = r.take("group", "preset");
        let gens = r.take("group", "generators");
        let m = r.count("group", "m")?;
        cfg.group = match (preset, gens) {
            (Some(_), Some((row, _))) => {
                return Err(Error::Parse { row, message: "give either `preset` or `generators`".into() })
            }
            (Some((_, name)), None) => GroupSpec::Preset(Preset::parse(&name, m.map(|m| m as u32))?),
            (None, Some((row, text))) => GroupSpec::Generators(
                text.split(';').map(|g| parse_list(row, "generators", g)).collect::<Result<_>>()?,
            ),
            (None, None) => cfg.group,
        };
        if let Some(cap) = r.count("group", "cap")? {
            cfg.cap = cap;
        }

        cfg.tubes.slopes = r.floats("tubes", "slopes")?;
        cfg.tubes.caps = r.floats("tubes", "caps")?;
        cfg.tubes.c0 = r.float("tubes", "c0")?;
        cfg.tubes.softmin_exponent = r.float("tubes", "softmin_exponent")?;

        let p = &mut cfg.suite.probe;
        if let Some(v) = r.floats("probe", "offsets")? {
            p.offsets = v;
        }
        if let Some(v) = r.counts("probe", "orders")? {
            p.orders = v;
        }
        if let Some(v) = r.float("probe", "step_ratio")? {
            p.step_ratio = v;
        }
        if let Some(v) = r.floats("probe", "floors")? {
            p.floors = v;
        }

        let g = &mut cfg.suite.growth;
        if let Some(v) = r.floats("growth", "distances")? {
            g.distances = v;
        }
        if let Some(v) = r.count("growth", "samples")? {
            g.samples = v;
        }
        if let Some(v) = r.float("growth", "depth")? {
            g.depth = v;
        }

        if let Some((row, v)) = r.take("sampling", "seed") {
            cfg.suite.seed =
                v.parse().map_err(|_| Error::Parse { row, message: "`seed` expects an integer".into() })?;
        }
        cfg.suite.growth.seed = cfg.suite.seed;
        let s = &mut cfg.suite;
        for (key, slot) in [
            ("tube_samples", &mut s.tube_samples),
            ("fold_points", &mut s.fold_points),
            ("flat_points", &mut s.flat_points),
            ("wall_points", &mut s.wall_points),
            ("lines", &mut s.lines),
            ("pairs", &mut s.pairs),
            ("det_points", &mut s.det_points),
            ("singular_points", &mut s.singular_points),
            ("tail_points", &mut s.tail_points),
            ("polar_matrices", &mut s.polar_matrices),
            ("polar_rotations", &mut s.polar_rotations),
            ("curves", &mut s.curves),
            ("equidistance_samples", &mut s.equidistance_samples),
        ] {
            if let Some(v) = r.count("sampling", key)? {
                *slot = v;
            }
        }

        let lower = r.floats("grid", "lower")?;
        let upper = r.floats("grid", "upper")?;
        let nodes = r.counts("grid", "nodes")?;
        cfg.grid = match (lower, upper, nodes) {
            (None, None, None) => None,
            (Some(lower), Some(upper), Some(nodes)) => Some(GridSpec { lower, upper, nodes }),
            _ => return Err(Error::config("[grid] needs lower, upper and nodes together")),
        };
        cfg.output = r.take("output", "path").map(|(_, v)| v);

        if let Some(msg) = r.leftover() {
            return Err(Error::config(msg));
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Positivity and shape checks that need no group.
    pub fn check(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::config("`cap` must be positive"));
        }
        if let GroupSpec::Generators(g) = &self.group {
            if g.is_empty() {
                return Err(Error::config("no generators given"));
            }
        }
        for v in self.tubes.slopes.iter().chain(&self.tubes.caps).flatten() {
            positive("tubes", *v)?;
        }
        if let Some(v) = self.tubes.c0 {
            positive("c0", v)?;
        }
        if let Some(v) = self.tubes.softmin_exponent {
            positive("softmin_exponent", v)?;
        }
        self.suite.probe.check()?;
        for d in &self.suite.growth.distances {
            positive("growth distances", *d)?;
        }
        positive("growth depth", self.suite.growth.depth)?;
        if self.suite.growth.depth >= 1.0 {
            return Err(Error::config("growth depth must be below 1"));
        }
        if let Some(g) = &self.grid {
            if g.lower.len() != g.upper.len() || g.lower.len() != g.nodes.len() {
                return Err(Error::config("grid lower, upper and nodes need equal lengths"));
            }
            if g.nodes.contains(&0) {
                return Err(Error::config("grid nodes must be positive"));
            }
        }
        Ok(())
    }

    pub fn preset(&self) -> Option<Preset> {
        match self.group {
            GroupSpec::Preset(p) => Some(p),
            GroupSpec::Generators(_) => None,
        }
    }

    pub fn build_group(&self) -> Result<ReflectionGroup> {
        match &self.group {
            GroupSpec::Preset(p) => preset_group(*p),
            GroupSpec::Generators(g) => {
                let dim = g[0].len();
                if g.iter().any(|v| v.len() != dim) {
                    return Err(Error::config("generators have different dimensions"));
                }
                let hs = g.iter().map(|v| Hyperplane::from_slice(v)).collect::<Result<Vec<_>>>()?;
                generate_group(&hs, self.cap)
            }
        }
    }

    pub fn tube_spec(&self, group: &ReflectionGroup) -> Result<TubeSpec> {
        let mut spec = TubeSpec::default_for(group);
        let levels = spec.slopes.len();
        let fill = |given: &Option<Vec<f64>>, slot: &mut Vec<f64>, name: &str| -> Result<()> {
            match given {
                None => Ok(()),
                Some(v) if v.len() == 1 => {
                    *slot = vec![v[0]; levels];
                    Ok(())
                }
                Some(v) if v.len() == levels => {
                    *slot = v.clone();
                    Ok(())
                }
                Some(v) => Err(Error::config(format!("`{name}` has {} values, expected 1 or {levels}", v.len()))),
            }
        };
        fill(&self.tubes.slopes, &mut spec.slopes, "slopes")?;
        fill(&self.tubes.caps, &mut spec.caps, "caps")?;
        if let Some(c0) = self.tubes.c0 {
            spec.c0 = c0;
        }
        if let Some(k) = self.tubes.softmin_exponent {
            spec.softmin_exponent = k;
        }
        spec.check(group.essential_rank)?;
        Ok(spec)
    }

    pub fn build_chain(&self) -> Result<SmoothChain> {
        let group = self.build_group()?;
        let tubes = self.tube_spec(&group)?;
        SmoothChain::new(group, SmoothProfile::default(), tubes)
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let ints = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        s.push_str("[group]\n");
        match &self.group {
            GroupSpec::Preset(p) => writeln!(s, "preset = {p}").unwrap(),
            GroupSpec::Generators(g) => {
                let gens: Vec<String> = g.iter().map(|v| list(v)).collect();
                writeln!(s, "generators = {}", gens.join("; ")).unwrap();
            }
        }
        writeln!(s, "cap = {}", self.cap).unwrap();

        s.push_str("\n[tubes]\n");
        if let Some(v) = &self.tubes.slopes {
            writeln!(s, "slopes = {}", list(v)).unwrap();
        }
        if let Some(v) = &self.tubes.caps {
            writeln!(s, "caps = {}", list(v)).unwrap();
        }
        if let Some(v) = self.tubes.c0 {
            writeln!(s, "c0 = {v:?}").unwrap();
        }
        if let Some(v) = self.tubes.softmin_exponent {
            writeln!(s, "softmin_exponent = {v:?}").unwrap();
        }

        let p = &self.suite.probe;
        s.push_str("\n[probe]\n");
        writeln!(s, "offsets = {}", list(&p.offsets)).unwrap();
        writeln!(s, "orders = {}", ints(&p.orders)).unwrap();
        writeln!(s, "step_ratio = {:?}", p.step_ratio).unwrap();
        writeln!(s, "floors = {}", list(&p.floors)).unwrap();

        let g = &self.suite.growth;
        s.push_str("\n[growth]\n");
        writeln!(s, "distances = {}", list(&g.distances)).unwrap();
        writeln!(s, "samples = {}", g.samples).unwrap();
        writeln!(s, "depth = {:?}", g.depth).unwrap();

        let o = &self.suite;
        s.push_str("\n[sampling]\n");
        writeln!(s, "seed = {}", o.seed).unwrap();
        for (key, v) in [
            ("tube_samples", o.tube_samples),
            ("fold_points", o.fold_points),
            ("flat_points", o.flat_points),
            ("wall_points", o.wall_points),
            ("lines", o.lines),
            ("pairs", o.pairs),
            ("det_points", o.det_points),
            ("singular_points", o.singular_points),
            ("tail_points", o.tail_points),
            ("polar_matrices", o.polar_matrices),
            ("polar_rotations", o.polar_rotations),
            ("curves", o.curves),
            ("equidistance_samples", o.equidistance_samples),
        ] {
            writeln!(s, "{key} = {v}").unwrap();
        }

        if let Some(g) = &self.grid {
            s.push_str("\n[grid]\n");
            writeln!(s, "lower = {}", list(&g.lower)).unwrap();
            writeln!(s, "upper = {}", list(&g.upper)).unwrap();
            writeln!(s, "nodes = {}", ints(&g.nodes)).unwrap();
        }

        if let Some(path) = &self.output {
            s.push_str("\n[output]\n");
            writeln!(s, "path = {path}").unwrap();
        }
        s
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.suite.seed = seed;
        self.suite.growth.seed = seed;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ProbeConfig;

    #[test]
    fn parse_minimal_and_defaults() {
        let cfg = RunConfig::parse("[group]\npreset = B3\n").unwrap();
        assert_eq!(cfg.group, GroupSpec::Preset(Preset::B3));
        assert_eq!(cfg.suite.probe, ProbeConfig::default());
        let empty = RunConfig::parse("").unwrap();
        assert_eq!(empty.preset(), Some(Preset::B2));
    }

    #[test]
    fn parse_generators_and_tubes() {
        let text = "[group]\ngenerators = 1, 0; 0, 1 # two mirrors\n[tubes]\nslopes = 0.05\nc0 = 2\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.group, GroupSpec::Generators(vec![vec![1.0, 0.0], vec![0.0, 1.0]]));
        let chain = cfg.build_chain().unwrap();
        assert_eq!(chain.group.order(), 4);
        assert_eq!(chain.tubes.slopes, vec![0.05]);
        assert_eq!(chain.tubes.c0, 2.0);
    }

    #[test]
    fn dihedral_with_separate_m() {
        let cfg = RunConfig::parse("[group]\npreset = I2\nm = 5\n").unwrap();
        assert_eq!(cfg.preset(), Some(Preset::I2(5)));
    }

    #[test]
    fn errors_carry_rows() {
        let err = RunConfig::parse("[group]\npreset = B2\nnonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }), "{err}");
        let err = RunConfig::parse("[tubes]\nc0 = abc\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }));
        assert!(RunConfig::parse("[group]\npreset = E8\n").is_err());
        assert!(matches!(RunConfig::parse("[tubes]\nc0 = -1\n").unwrap_err(), Error::Configuration(_)));
        assert!(matches!(RunConfig::parse("[tubes]\nwidth = 1\n").unwrap_err(), Error::Configuration(_)));
    }

    #[test]
    fn slope_count_must_match_levels() {
        let cfg = RunConfig::parse("[group]\npreset = B3\n[tubes]\nslopes = 0.1, 0.1, 0.1\n").unwrap();
        let g = cfg.build_group().unwrap();
        assert!(cfg.tube_spec(&g).is_err());
    }

    #[test]
    fn round_trip_of_defaults() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
