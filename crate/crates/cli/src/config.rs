//! TOML experiment configuration and its resolution into library objects.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use kestenlab::group::{FiniteGroup, GroupElement, Homomorphism};
use kestenlab::{ExtensionSystem, GroupSpec, Involution, Potential, Shift};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ResultExt};

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionConfig>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kesten: Option<KestenConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cogrowth: Option<CogrowthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folner: Option<FolnerConfig>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    /// `full`, `golden_mean`, `matrix` or `forbidden`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BlockWeight {
    pub block: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// `constant`, `letters` or `table`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockWeight>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `finite`, `cyclic`, `dihedral`, `lattice`, `free`, `lamplighter` or
    /// `quotient`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_csv: Option<PathBuf>,
    /// Quotient only: the group the free generators map into.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Box<GroupConfig>>,
    /// Quotient only: images of the free generators, as target literals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleConfig {
    /// One group literal per letter.
    pub images: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionConfig {
    pub dagger: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub n_max: usize,
    pub ball_radius: usize,
    pub ball_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    pub threshold: f64,
    pub max_loss: f64,
    /// `ball` or `radial`.
    pub method: String,
    pub pressure_letter: usize,
    pub pressure_range: (usize, usize),
    pub gibbs_n_max: usize,
    pub lambda_samples: usize,
    pub lambda_k: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            n_max: 40,
            ball_radius: 12,
            ball_cap: 2_000_000,
            window: None,
            threshold: kestenlab::extension::DEFAULT_THRESHOLD,
            max_loss: kestenlab::extension::DEFAULT_MAX_LOSS,
            method: "ball".into(),
            pressure_letter: 0,
            pressure_range: (8, 16),
            gibbs_n_max: 6,
            lambda_samples: 0,
            lambda_k: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct KestenConfig {
    /// `extension` builds `m_n` from the extension; `simple` uses the uniform
    /// measure on the standard generators of `[group]`.
    pub walk: String,
    pub anchor: Vec<usize>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub self_adjoint_radius: usize,
}

impl Default for KestenConfig {
    fn default() -> Self {
        KestenConfig {
            walk: "extension".into(),
            anchor: Vec::new(),
            n: 2,
            xi: None,
            k_max: None,
            method: None,
            self_adjoint_radius: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CogrowthConfig {
    pub rank: usize,
    /// Images of the free generators in `[group]`.
    pub images: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FolnerConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    pub epsilon: f64,
    /// When set, runs the staged construction with these tolerances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    pub max_radius: usize,
    pub max_size: usize,
    pub max_box_side: i64,
}

impl Default for FolnerConfig {
    fn default() -> Self {
        let b = kestenlab::amenability::FolnerBudget::default();
        FolnerConfig {
            generators: None,
            epsilon: 0.5,
            epsilons: None,
            max_radius: b.max_radius,
            max_size: b.max_size,
            max_box_side: b.max_box_side,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub ball_radius: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "config".to_string(),
            };
            CliError::validation(field, msg)
        })
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(n) = o.n_max {
            self.numerics.n_max = n;
        }
        if let Some(r) = o.ball_radius {
            self.numerics.ball_radius = r;
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        fn fix(g: &mut GroupConfig, base: &Path) {
            if let Some(p) = &g.table_csv {
                if p.is_relative() {
                    g.table_csv = Some(base.join(p));
                }
            }
            if let Some(t) = g.target.as_deref_mut() {
                fix(t, base);
            }
        }
        if let Some(g) = self.group.as_mut() {
            fix(g, base);
        }
    }

    pub fn shift(&self) -> Result<Shift, CliError> {
        let s = self
            .shift
            .as_ref()
            .ok_or_else(|| CliError::validation("[shift]", "section is required"))?;
        match s.kind.as_str() {
            "full" => {
                let n = s
                    .size
                    .ok_or_else(|| CliError::validation("[shift].size", "required for kind = \"full\""))?;
                Shift::full(n).at("[shift].size")
            }
            "golden_mean" => Ok(Shift::golden_mean()),
            "matrix" => {
                let m = s
                    .matrix
                    .as_ref()
                    .ok_or_else(|| CliError::validation("[shift].matrix", "required for kind = \"matrix\""))?;
                if let Some((i, _)) = m.iter().flatten().enumerate().find(|(_, &x)| x > 1) {
                    return Err(CliError::validation(
                        "[shift].matrix",
                        format!("entry {i} is not 0 or 1"),
                    ));
                }
                Shift::from_matrix(m).at("[shift].matrix")
            }
            "forbidden" => {
                let n = s
                    .size
                    .ok_or_else(|| CliError::validation("[shift].size", "required for kind = \"forbidden\""))?;
                let f = s.forbidden.clone().unwrap_or_default();
                Shift::from_forbidden(n, &f).at("[shift].forbidden")
            }
            other => Err(CliError::validation("[shift].kind", format!("unknown kind {other:?}"))),
        }
    }

    pub fn potential(&self, shift: &Shift) -> Result<Potential, CliError> {
        let p = self
            .potential
            .as_ref()
            .ok_or_else(|| CliError::validation("[potential]", "section is required"))?;
        let log = |lw: Option<f64>, w: Option<f64>, field: &str| -> Result<f64, CliError> {
            match (lw, w) {
                (Some(x), None) => Ok(x),
                (None, Some(w)) if w > 0.0 => Ok(w.ln()),
                (None, Some(w)) => Err(CliError::validation(field, format!("weight {w} must be positive"))),
                (Some(_), Some(_)) => Err(CliError::validation(field, "give log_weight or weight, not both")),
                (None, None) => Err(CliError::validation(field, "log_weight or weight is required")),
            }
        };
        match p.kind.as_str() {
            "constant" => {
                let x = log(p.log_weight, p.weight, "[potential]")?;
                Potential::constant(shift, x).at("[potential]")
            }
            "letters" => {
                let v: Vec<f64> = match (&p.log_weights, &p.weights) {
                    (Some(v), None) => v.clone(),
                    (None, Some(w)) => {
                        if let Some(i) = w.iter().position(|&x| !(x > 0.0)) {
                            return Err(CliError::validation(
                                format!("[potential].weights[{i}]"),
                                "must be positive",
                            ));
                        }
                        w.iter().map(|x| x.ln()).collect()
                    }
                    _ => {
                        return Err(CliError::validation(
                            "[potential]",
                            "give exactly one of log_weights or weights",
                        ))
                    }
                };
                if v.len() != shift.alphabet_size() {
                    return Err(CliError::validation(
                        "[potential]",
                        format!(
                            "{} letter weights for an alphabet of {}",
                            v.len(),
                            shift.alphabet_size()
                        ),
                    ));
                }
                Potential::from_letter_weights(shift, &v).at("[potential]")
            }
            "table" => {
                let memory = p
                    .memory
                    .ok_or_else(|| CliError::validation("[potential].memory", "required for kind = \"table\""))?;
                let blocks = p
                    .blocks
                    .as_ref()
                    .ok_or_else(|| CliError::validation("[potential].blocks", "required for kind = \"table\""))?;
                let mut table = BTreeMap::new();
                for (i, b) in blocks.iter().enumerate() {
                    let field = format!("[potential].blocks[{i}]");
                    let x = log(b.log_weight, b.weight, &field)?;
                    if table.insert(b.block.clone(), x).is_some() {
                        return Err(CliError::validation(field, "duplicate block"));
                    }
                }
                Potential::new(shift, memory, &table).at("[potential].blocks")
            }
            other => Err(CliError::validation(
                "[potential].kind",
                format!("unknown kind {other:?}"),
            )),
        }
    }

    pub fn group(&self) -> Result<GroupSpec, CliError> {
        let g = self
            .group
            .as_ref()
            .ok_or_else(|| CliError::validation("[group]", "section is required"))?;
        build_group(g, "[group]")
    }

    /// Cocycle images parsed in `group`.
    pub fn cocycle(&self, group: &GroupSpec) -> Result<Vec<GroupElement>, CliError> {
        let c = self
            .cocycle
            .as_ref()
            .ok_or_else(|| CliError::validation("[cocycle]", "section is required"))?;
        parse_elements(group, &c.images, "[cocycle].images")
    }

    pub fn involution(&self, shift: &Shift) -> Result<Option<Involution>, CliError> {
        match &self.involution {
            None => Ok(None),
            Some(i) => Involution::new(shift, i.dagger.clone())
                .at("[involution].dagger")
                .map(Some),
        }
    }

    pub fn extension(&self) -> Result<ExtensionSystem, CliError> {
        let shift = self.shift()?;
        let potential = self.potential(&shift)?;
        let group = self.group()?;
        let images = self.cocycle(&group)?;
        let inv = self.involution(&shift)?;
        ExtensionSystem::new(potential, group, images, inv).at("[cocycle]")
    }

    /// `(lo, hi)` fit window, defaulting to the upper half of `1..=n_max`.
    pub fn window(&self) -> Result<(usize, usize), CliError> {
        let n = self.numerics.n_max;
        let (lo, hi) = self.numerics.window.unwrap_or((n / 2, n));
        if lo >= hi || hi > n {
            return Err(CliError::validation(
                "[numerics].window",
                format!("window [{lo}, {hi}] must satisfy lo < hi <= n_max = {n}"),
            ));
        }
        Ok((lo, hi))
    }
}

fn build_group(g: &GroupConfig, field: &str) -> Result<GroupSpec, CliError> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| CliError::validation(format!("{field}.{name}"), format!("required for kind = {:?}", g.kind)))
    };
    match g.kind.as_str() {
        "lattice" => Ok(GroupSpec::lattice(need(g.dim, "dim")?)),
        "free" => {
            let r = need(g.rank, "rank")?;
            if r == 0 || r > 26 {
                return Err(CliError::validation(format!("{field}.rank"), "rank must be in 1..=26"));
            }
            Ok(GroupSpec::free(r))
        }
        "lamplighter" => Ok(GroupSpec::Lamplighter),
        "cyclic" | "dihedral" => {
            let n =
                g.n.filter(|&n| n >= 1)
                    .ok_or_else(|| CliError::validation(format!("{field}.n"), "a positive order is required"))?;
            let fg = if g.kind == "cyclic" {
                FiniteGroup::cyclic(n)
            } else {
                FiniteGroup::dihedral(n)
            };
            Ok(GroupSpec::finite(fg))
        }
        "finite" => {
            let fg = match (&g.table, &g.table_csv) {
                (Some(t), None) => FiniteGroup::from_table(t.clone()).at(&format!("{field}.table"))?,
                (None, Some(p)) => {
                    let f = fs::File::open(p).map_err(|e| {
                        CliError::validation(format!("{field}.table_csv"), format!("{}: {e}", p.display()))
                    })?;
                    FiniteGroup::from_csv(f).at(&format!("{field}.table_csv"))?
                }
                _ => return Err(CliError::validation(field, "give exactly one of table or table_csv")),
            };
            Ok(GroupSpec::finite(fg))
        }
        "quotient" => {
            let t = g
                .target
                .as_deref()
                .ok_or_else(|| CliError::validation(format!("{field}.target"), "required for kind = \"quotient\""))?;
            let target = build_group(t, &format!("{field}.target"))?;
            let images = g
                .images
                .as_ref()
                .ok_or_else(|| CliError::validation(format!("{field}.images"), "required for kind = \"quotient\""))?;
            let elems = parse_elements(&target, images, &format!("{field}.images"))?;
            let rank = g.rank.unwrap_or(elems.len());
            let hom = Homomorphism::new(rank, target, elems).at(&format!("{field}.images"))?;
            Ok(GroupSpec::quotient(hom))
        }
        other => Err(CliError::validation(
            format!("{field}.kind"),
            format!("unknown kind {other:?}"),
        )),
    }
}

pub fn parse_elements(group: &GroupSpec, texts: &[String], field: &str) -> Result<Vec<GroupElement>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| group.parse_element(t).at(&format!("{field}[{i}]")))
        .collect()
}
