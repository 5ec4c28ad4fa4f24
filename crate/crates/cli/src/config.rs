//! Declarative experiment configuration: a TOML file plus flag overrides.
//! Everything is validated against the library's preconditions before any
//! computation starts, and every validation failure names the precondition
//! it violated.

use argshift_core::mat::Mat;
use argshift_core::scalar::rat_from_str;
use argshift_core::{Rat, Scalar, TypeLabel, Weight};
use num_traits::Zero;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Experiment kinds, named as they appear in config files.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Spectrum,
    Cyclicity,
    Rigidity,
    Limit,
    IdentitySuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::Cyclicity => "cyclicity",
            Kind::Rigidity => "rigidity",
            Kind::Limit => "limit",
            Kind::IdentitySuite => "identity-suite",
        }
    }

    fn parse(s: &str) -> Result<Kind, String> {
        match s {
            "spectrum" => Ok(Kind::Spectrum),
            "cyclicity" => Ok(Kind::Cyclicity),
            "rigidity" => Ok(Kind::Rigidity),
            "limit" => Ok(Kind::Limit),
            "identity-suite" => Ok(Kind::IdentitySuite),
            other => Err(format!(
                "unknown kind {other:?}; expected spectrum, cyclicity, rigidity, limit, \
                 or identity-suite"
            )),
        }
    }
}

/// Raw file schema. Every field is optional; the subcommand supplies the
/// kind and per-kind defaults fill the rest.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kind: Option<String>,
    /// Root datum label, e.g. "A1".
    pub algebra: Option<String>,
    /// One fundamental-coordinate vector per tensor factor.
    pub weights: Option<Vec<Vec<i64>>>,
    /// Marked points as rational strings, one per factor.
    pub points: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub shift: Option<ShiftConfig>,
    pub rigidity: Option<RigidityConfig>,
    pub limit: Option<LimitConfig>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    /// "random" (seeded), "explicit", or "principal".
    pub mode: Option<String>,
    /// Row-major rational strings; explicit mode only.
    pub entries: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct RigidityConfig {
    /// Spin as a rational string.
    pub spin: Option<String>,
    /// Grid of linear-residue values as [re, im] pairs.
    pub grid: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct LimitConfig {
    /// Rescaling factors as rational strings, in increasing order.
    pub scales: Option<Vec<String>>,
    /// Bound the final eigenvector angle must beat.
    pub angle_tol: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum ShiftSpec {
    Random,
    Explicit(Mat<Rat>),
    Principal,
}

impl ShiftSpec {
    pub fn mode_name(&self) -> &'static str {
        match self {
            ShiftSpec::Random => "random",
            ShiftSpec::Explicit(_) => "explicit",
            ShiftSpec::Principal => "principal",
        }
    }
}

/// Fully resolved, validated plan for one run.
#[derive(Debug)]
pub struct Plan {
    pub kind: Kind,
    pub algebra: TypeLabel,
    pub weights: Vec<Weight>,
    pub points: Vec<Rat>,
    pub shift: ShiftSpec,
    pub seed: u64,
    pub tol: f64,
    pub out: PathBuf,
    pub spin: Rat,
    pub grid: Vec<(f64, f64)>,
    pub scales: Vec<Rat>,
    pub angle_tol: f64,
}

pub fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
}

/// Default nine-point grid for the rigidity scan: the origin plus eight
/// surrounding values on the axes and diagonals.
pub fn default_grid() -> Vec<(f64, f64)> {
    vec![
        (0.0, 0.0),
        (0.25, 0.0),
        (-0.25, 0.0),
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (-1.0, -1.0),
    ]
}

fn parse_points(strings: &[String]) -> Result<Vec<Rat>, String> {
    strings
        .iter()
        .map(|s| rat_from_str(s).map_err(|e| format!("bad marked point {s:?}: {e}")))
        .collect()
}

fn parse_shift(cfg: Option<&ShiftConfig>, n: usize, default: ShiftSpec) -> Result<ShiftSpec, String> {
    let Some(cfg) = cfg else { return Ok(default) };
    let mode = cfg.mode.as_deref().unwrap_or(default.mode_name());
    match mode {
        "random" => Ok(ShiftSpec::Random),
        "principal" => Ok(ShiftSpec::Principal),
        "explicit" => {
            let rows = cfg.entries.as_ref().ok_or_else(|| {
                "shift.mode = \"explicit\" needs shift.entries".to_string()
            })?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("shift.entries must be {n}x{n} for this algebra"));
            }
            let mut m = Mat::<Rat>::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    m[(i, j)] =
                        rat_from_str(s).map_err(|e| format!("bad shift entry {s:?}: {e}"))?;
                }
            }
            Ok(ShiftSpec::Explicit(m))
        }
        other => Err(format!(
            "unknown shift mode {other:?}; expected random, explicit, or principal"
        )),
    }
}

/// Merge file config, per-kind defaults, and flag overrides, then check
/// every precondition the run will rely on.
pub fn resolve(
    kind: Kind,
    file: FileConfig,
    seed_flag: Option<u64>,
    tol_flag: Option<f64>,
    out_flag: Option<PathBuf>,
) -> Result<Plan, String> {
    if let Some(k) = &file.kind {
        let file_kind = Kind::parse(k)?;
        if file_kind != kind {
            return Err(format!(
                "config kind {:?} does not match the {} subcommand",
                k,
                kind.name()
            ));
        }
    }

    let algebra_str = file.algebra.clone().unwrap_or_else(|| match kind {
        Kind::IdentitySuite => "A2".to_string(),
        _ => "A1".to_string(),
    });
    let algebra = TypeLabel::parse(&algebra_str).map_err(|e| format!("algebra: {e}"))?;

    // Default modules: the rescaling limit runs on a pair of first
    // fundamentals; everything else runs on one site, V_3 in rank one and
    // the adjoint in rank two.
    let first_fundamental = {
        let mut w = vec![0i64; algebra.rank];
        w[0] = 1;
        w
    };
    let weights_raw = file.weights.clone().unwrap_or_else(|| match (kind, algebra.rank) {
        (Kind::Limit, _) => vec![first_fundamental.clone(), first_fundamental.clone()],
        (_, 1) => vec![vec![3]],
        (_, 2) => vec![vec![1, 1]],
        _ => vec![first_fundamental.clone()],
    });
    let weights: Vec<Weight> = weights_raw
        .iter()
        .map(|w| {
            if w.len() != algebra.rank {
                return Err(format!(
                    "weight {w:?} has {} coordinates, {algebra_str} needs {}",
                    w.len(),
                    algebra.rank
                ));
            }
            if w.iter().any(|&c| c < 0) {
                return Err(format!("weight {w:?} is not dominant integral"));
            }
            Ok(Weight::from_ints(w))
        })
        .collect::<Result<_, _>>()?;
    if weights.is_empty() {
        return Err("at least one tensor factor is required".to_string());
    }

    let points = match &file.points {
        Some(p) => parse_points(p)?,
        None => (0..weights.len() as i64).map(Rat::from_int).collect(),
    };
    if points.len() != weights.len() {
        return Err(format!(
            "{} marked points for {} tensor factors; they must match one-to-one",
            points.len(),
            weights.len()
        ));
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(format!(
                    "marked points must be pairwise distinct; points {i} and {j} coincide"
                ));
            }
        }
    }

    let n = algebra.rank + 1;
    let default_shift = match kind {
        Kind::Cyclicity => ShiftSpec::Principal,
        Kind::Limit => {
            let mut h = Mat::<Rat>::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = Rat::from_int(n as i64 - 1 - 2 * i as i64);
            }
            ShiftSpec::Explicit(h)
        }
        _ => ShiftSpec::Random,
    };
    let shift = parse_shift(file.shift.as_ref(), n, default_shift)?;
    if matches!(kind, Kind::Cyclicity) {
        if let ShiftSpec::Explicit(m) = &shift {
            if !m.trace().is_zero() {
                return Err(
                    "cyclicity restricts to the traceless subalgebra; the explicit shift \
                     must be traceless"
                        .to_string(),
                );
            }
        }
    }

    let rigidity = file.rigidity.unwrap_or_default();
    let spin = match &rigidity.spin {
        Some(s) => rat_from_str(s).map_err(|e| format!("bad spin {s:?}: {e}"))?,
        None => Rat::from_int(1),
    };
    if spin < Rat::zero() {
        return Err(format!("spin must be nonnegative, got {spin}"));
    }
    let grid: Vec<(f64, f64)> = rigidity
        .grid
        .map(|g| g.into_iter().map(|[re, im]| (re, im)).collect())
        .unwrap_or_else(default_grid);
    if grid.is_empty() {
        return Err("the rigidity grid must be nonempty".to_string());
    }

    let limit = file.limit.unwrap_or_default();
    let scales = match &limit.scales {
        Some(s) => s
            .iter()
            .map(|x| rat_from_str(x).map_err(|e| format!("bad scale {x:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Rat::from_int(10), Rat::from_int(100), Rat::from_int(1000)],
    };
    if scales.is_empty() || scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err("limit scales must be strictly increasing and nonempty".to_string());
    }
    if scales.iter().any(|s| s.is_zero()) {
        return Err("limit scales must be nonzero".to_string());
    }
    let angle_tol = limit.angle_tol.unwrap_or(1e-2);
    if !(angle_tol > 0.0) {
        return Err("limit angle tolerance must be positive".to_string());
    }

    let tol = tol_flag.or(file.tol).unwrap_or(1e-6);
    if !(tol > 0.0) {
        return Err("tolerance must be positive".to_string());
    }
    let seed = seed_flag.or(file.seed).unwrap_or(7);
    let out = out_flag
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}", kind.name())));

    Ok(Plan {
        kind,
        algebra,
        weights,
        points,
        shift,
        seed,
        tol,
        out,
        spin,
        grid,
        scales,
        angle_tol,
    })
}
