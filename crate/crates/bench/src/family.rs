//! Benchmark family specs given on the command line, e.g.
//! `sukp m=100 n=100 alpha=0.10 beta=0.75` or
//! `bmcp m=200 n=200 groups=10 rho=0.5 budget=1000`, and writing the
//! generated files plus a manifest.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use e2ls_core::instance::{
    generate_grouped_labeled, generate_uniform, CapacitySpec, GroupLabels, GroupedSpec,
    InstanceStats, UniformSpec, DEFAULT_GROUPS,
};
use e2ls_core::{Instance, ProblemKind};
use serde::Serialize;

use crate::error::CliError;
use crate::records::checksum;

pub const MANIFEST: &str = "manifest.jsonl";
const ITEM_GROUPS: &str = "# item-groups";
const ELEMENT_GROUPS: &str = "# element-groups";

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Uniform(UniformSpec),
    Grouped(GroupedSpec),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| usage(format!("invalid value `{value}` for `{key}`")))
}

fn range(key: &str, value: &str) -> Result<(u64, u64), CliError> {
    let (lo, hi) = value
        .split_once('-')
        .ok_or_else(|| usage(format!("`{key}` expects lo-hi, got `{value}`")))?;
    Ok((num(key, lo)?, num(key, hi)?))
}

impl FamilySpec {
    pub fn parse<S: AsRef<str>>(tokens: &[S]) -> Result<Self, CliError> {
        let (kind, rest) = tokens
            .split_first()
            .ok_or_else(|| usage("empty family spec"))?;
        let kind: ProblemKind = kind
            .as_ref()
            .parse()
            .map_err(|e: e2ls_core::instance::UnknownKind| usage(e.to_string()))?;
        let (mut m, mut n) = (None, None);
        let (mut alpha, mut rho, mut groups) = (None, None, None);
        let (mut ratio, mut absolute) = (None, None);
        let (mut values, mut weights) = ((1, 100), (1, 100));
        for tok in rest {
            let tok = tok.as_ref();
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got `{tok}`")))?;
            match key {
                "m" => m = Some(num(key, value)?),
                "n" => n = Some(num(key, value)?),
                "alpha" => alpha = Some(num(key, value)?),
                "rho" => rho = Some(num(key, value)?),
                "groups" => groups = Some(num(key, value)?),
                "beta" | "ratio" => ratio = Some(num(key, value)?),
                "budget" | "capacity" => absolute = Some(num(key, value)?),
                "values" => values = range(key, value)?,
                "weights" => weights = range(key, value)?,
                _ => return Err(usage(format!("unknown family key `{key}`"))),
            }
        }
        let m = m.ok_or_else(|| usage("family spec needs m="))?;
        let n = n.ok_or_else(|| usage("family spec needs n="))?;
        let capacity = match (ratio, absolute) {
            (Some(r), None) => CapacitySpec::Ratio(r),
            (None, Some(c)) => CapacitySpec::Absolute(c),
            (None, None) => {
                return Err(usage("family spec needs beta=/ratio= or budget=/capacity="))
            }
            (Some(_), Some(_)) => {
                return Err(usage(
                    "give either a capacity ratio or an absolute capacity",
                ))
            }
        };
        if groups.is_some() || rho.is_some() {
            let rho = match (rho, alpha) {
                (Some(r), None) | (None, Some(r)) => r,
                _ => return Err(usage("grouped spec needs exactly one of rho= or alpha=")),
            };
            Ok(FamilySpec::Grouped(GroupedSpec {
                kind,
                m,
                n,
                groups: groups.unwrap_or(DEFAULT_GROUPS),
                rho,
                capacity,
                value_range: values,
                weight_range: weights,
            }))
        } else {
            Ok(FamilySpec::Uniform(UniformSpec {
                kind,
                m,
                n,
                alpha: alpha.ok_or_else(|| usage("uniform spec needs alpha="))?,
                capacity,
                value_range: values,
                weight_range: weights,
            }))
        }
    }

    pub fn generate(&self, seed: u64) -> Result<(Instance, Option<GroupLabels>), CliError> {
        let err = |e: e2ls_core::instance::GenerateError| usage(e.to_string());
        match self {
            FamilySpec::Uniform(s) => Ok((generate_uniform(s, seed).map_err(err)?, None)),
            FamilySpec::Grouped(s) => {
                let (inst, labels) = generate_grouped_labeled(s, seed).map_err(err)?;
                Ok((inst, Some(labels)))
            }
        }
    }

    pub fn name(&self, inst: &Instance) -> String {
        match self {
            FamilySpec::Uniform(s) => s.name(inst),
            FamilySpec::Grouped(s) => s.name(inst),
        }
    }
}

/// Canonical text followed by group labels as comment lines, which parsers skip.
pub fn render_with_labels(inst: &Instance, labels: Option<&GroupLabels>) -> String {
    let mut text = inst.to_canonical();
    if let Some(l) = labels {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        text.push_str(&format!("{ITEM_GROUPS} {}\n", join(&l.items)));
        text.push_str(&format!("{ELEMENT_GROUPS} {}\n", join(&l.elements)));
    }
    text
}

/// Reads the group label comment lines back, if the file has them.
pub fn read_labels(text: &str) -> Option<GroupLabels> {
    let field = |prefix: &str| -> Option<Vec<usize>> {
        let line = text.lines().find(|l| l.starts_with(prefix))?;
        line[prefix.len()..]
            .split_whitespace()
            .map(|t| t.parse().ok())
            .collect()
    };
    Some(GroupLabels {
        items: field(ITEM_GROUPS)?,
        elements: field(ELEMENT_GROUPS)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub kind: ProblemKind,
    pub m: usize,
    pub n: usize,
    pub capacity: u64,
    pub groups: Option<usize>,
    pub checksum: String,
    #[serde(flatten)]
    pub stats: InstanceStats,
}

/// Writes `count` instances seeded `seed, seed + 1, ...` into `dir` and
/// appends one manifest line per file. Names get an `_<index>` suffix when
/// `count > 1`.
pub fn write_family(
    spec: &FamilySpec,
    count: usize,
    seed: u64,
    dir: &Path,
) -> Result<Vec<(PathBuf, ManifestEntry)>, CliError> {
    if count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(count);
    for i in 0..count {
        let s = seed.wrapping_add(i as u64);
        let (inst, labels) = spec.generate(s)?;
        let mut file = spec.name(&inst);
        if count > 1 {
            file.push_str(&format!("_{i}"));
        }
        let path = dir.join(&file);
        fs::write(&path, render_with_labels(&inst, labels.as_ref())).map_err(io_err(&path))?;
        let entry = ManifestEntry {
            file,
            seed: s,
            kind: inst.kind(),
            m: inst.m(),
            n: inst.n(),
            capacity: inst.capacity(),
            groups: match spec {
                FamilySpec::Grouped(g) => Some(g.groups),
                FamilySpec::Uniform(_) => None,
            },
            checksum: checksum(&inst),
            stats: inst.stats(),
        };
        written.push((path, entry));
    }
    let manifest = dir.join(MANIFEST);
    let mut out = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&manifest)
        .map_err(io_err(&manifest))?;
    for (_, entry) in &written {
        let line = serde_json::to_string(entry).expect("manifest serializes");
        writeln!(out, "{line}").map_err(io_err(&manifest))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use e2ls_core::instance::parse_instance;

    fn spec(s: &str) -> Result<FamilySpec, CliError> {
        FamilySpec::parse(&s.split_whitespace().collect::<Vec<_>>())
    }

    #[test]
    fn parses_uniform() {
        let FamilySpec::Uniform(u) = spec("sukp m=100 n=90 alpha=0.10 beta=0.75").unwrap() else {
            panic!("expected uniform");
        };
        assert_eq!(
            (u.kind, u.m, u.n, u.alpha),
            (ProblemKind::Sukp, 100, 90, 0.10)
        );
        assert_eq!(u.capacity, CapacitySpec::Ratio(0.75));
    }

    #[test]
    fn parses_grouped() {
        let FamilySpec::Grouped(g) =
            spec("bmcp m=50 n=40 groups=5 rho=0.5 budget=300 values=2-9").unwrap()
        else {
            panic!("expected grouped");
        };
        assert_eq!((g.groups, g.rho, g.value_range), (5, 0.5, (2, 9)));
        assert_eq!(g.capacity, CapacitySpec::Absolute(300));
        let FamilySpec::Grouped(g) = spec("bmcp m=50 n=40 rho=0.5 budget=300").unwrap() else {
            panic!("expected grouped");
        };
        assert_eq!(g.groups, DEFAULT_GROUPS);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "",
            "knap m=1 n=1 alpha=0.5 beta=0.5",
            "sukp n=1 alpha=0.5 beta=0.5",
            "sukp m=1 n=1 beta=0.5",
            "sukp m=1 n=1 alpha=0.5",
            "sukp m=1 n=1 alpha=0.5 beta=0.5 budget=3",
            "sukp m=1 n=1 alpha=x beta=0.5",
            "sukp m=1 n=1 alpha=0.5 beta=0.5 colour=red",
            "bmcp m=4 n=4 groups=2 rho=0.5 alpha=0.5 budget=3",
        ] {
            assert!(spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn labels_survive_the_file() {
        let s = spec("bmcp m=30 n=30 groups=3 rho=0.6 budget=200").unwrap();
        let (inst, labels) = s.generate(5).unwrap();
        let text = render_with_labels(&inst, labels.as_ref());
        assert_eq!(parse_instance(&text, None).unwrap(), inst);
        let back = read_labels(&text).unwrap();
        assert_eq!(Some(&back), labels.as_ref());
        assert!(back.respects(&inst));
        assert_eq!(read_labels(&inst.to_canonical()), None);
    }

    #[test]
    fn writes_distinct_reproducible_files() {
        let s = spec("sukp m=20 n=20 alpha=0.2 beta=0.5").unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let wa = write_family(&s, 3, 9, a.path()).unwrap();
        let wb = write_family(&s, 3, 9, b.path()).unwrap();
        let names: Vec<_> = wa.iter().map(|(_, e)| e.file.clone()).collect();
        assert_eq!(
            names,
            [
                "sukp_20_20_0.20_0.50_0",
                "sukp_20_20_0.20_0.50_1",
                "sukp_20_20_0.20_0.50_2"
            ]
        );
        for ((pa, _), (pb, _)) in wa.iter().zip(&wb) {
            assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
        }
        assert_ne!(fs::read(&wa[0].0).unwrap(), fs::read(&wa[1].0).unwrap());
        let manifest = fs::read_to_string(a.path().join(MANIFEST)).unwrap();
        assert_eq!(manifest.lines().count(), 3);
    }
}
