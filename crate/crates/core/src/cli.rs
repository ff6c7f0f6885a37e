//! Command-line front end: file formats, report assembly and exit codes.
//!
//! Every command returns an [`AnalysisReport`] whose JSON rendering is
//! byte-stable for identical input bytes, seed and tool version. Exit codes:
//! 0 when every check passed, 2 when checks ran with failures, 1 on input
//! errors.
//!
//! In `algebra`, the file lists a symmetry set `S` and the observables are
//! taken to be `O = S′`, the same convention as the permutation case study.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bargmann::{
    bargmann_cocycle_check, canonical_pair, dynamics_symmetry_check,
    extended_action_composition_check, extended_dynamics, mass_superselection_report,
    ray_compose_check, ExtendedElement, ExtendedPhasePoint, GalileiElement, Grid1D, Potential,
};
use crate::cocycles::{
    antisym_obstruction, associativity_defect, check_cocycle, coboundary_solve, lift_check,
    CocycleMode, Extended, FiniteGroup, GroupLaw, MultiplierTable,
};
use crate::error::{Error, Result};
use crate::fluxsectors::{
    kinematic_moments, total_charge, ChargeKinematics, FluxFormula, SphereQuadrature,
};
use crate::numkernel::{ComplexMatrix, ToleranceConfig};
use crate::opalgebra::{center, check_dirac, commutant_report, generated_algebra, OperatorSet};
use crate::parastat::{parastat_truncation, permutation_unitaries};

pub const TOOL_VERSION: &str = concat!("sectorkit ", env!("CARGO_PKG_VERSION"));
/// Overrides `--out-dir` when set.
pub const OUT_DIR_ENV: &str = "SECTORKIT_OUT_DIR";

/// A structured, deterministic analysis result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the input bytes, or of the canonical argument record for
    /// commands without an input file.
    pub input_digest: String,
    pub passed: bool,
    pub sections: BTreeMap<String, Value>,
}

impl AnalysisReport {
    fn new(command: &str, seed: u64, input: &[u8]) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            seed,
            input_digest: digest(input),
            passed: true,
            sections: BTreeMap::new(),
        }
    }

    fn section(&mut self, name: &str, value: Value) {
        self.sections.insert(name.to_string(), value);
    }

    /// Records a named check and folds it into `passed`.
    fn check(&mut self, name: &str, ok: bool) {
        self.passed &= ok;
        let checks = self
            .sections
            .entry("checks".to_string())
            .or_insert_with(|| json!({}));
        checks[name] = Value::Bool(ok);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are serializable");
        s.push('\n');
        s
    }

    /// Indented `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}\nseed: {}\ninput_digest: {}\npassed: {}\n",
            self.tool_version, self.command, self.seed, self.input_digest, self.passed
        );
        for (k, v) in &self.sections {
            render_text(&mut out, k, v, 0);
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

fn render_text(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in map {
                render_text(out, k, v, depth + 1);
            }
        }
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

// ---------------------------------------------------------------------------
// file formats

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct OperatorEntry {
    name: String,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct OperatorFile {
    dim: usize,
    operators: Vec<OperatorEntry>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// 1-based line and column of the first occurrence of `needle`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    let Some(at) = text.find(needle) else {
        return (1, 1);
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = at - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, column)
}

fn rows_to_flat(rows: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    let mut out = Vec::with_capacity(n * n);
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        out.extend_from_slice(r);
    }
    Ok(out)
}

/// Reads `{"dim": n, "operators": [{"name", "re", "im"}]}` with row-major n×n arrays.
pub fn parse_operator_set(text: &str) -> Result<OperatorSet> {
    let file: OperatorFile = serde_json::from_str(text).map_err(json_error)?;
    if file.operators.is_empty() {
        let (line, column) = locate(text, "\"operators\"");
        return Err(Error::ParseError {
            line,
            column,
            message: "operator list is empty".into(),
        });
    }
    if file.dim == 0 {
        let (line, column) = locate(text, "\"dim\"");
        return Err(Error::ParseError {
            line,
            column,
            message: "dim must be positive".into(),
        });
    }
    let n = file.dim;
    let mut members = Vec::with_capacity(file.operators.len());
    for op in &file.operators {
        let re = rows_to_flat(&op.re, n)?;
        let im = rows_to_flat(&op.im, n)?;
        members.push((op.name.clone(), ComplexMatrix::from_parts(n, &re, &im)?));
    }
    OperatorSet::new(n, members, false, &ToleranceConfig::default())
}

/// Writes an operator set in the same format; numbers use the shortest
/// representation that parses back to the same binary value.
pub fn write_operator_set(set: &OperatorSet) -> String {
    let n = set.dim();
    let operators = set
        .members()
        .iter()
        .map(|(name, m)| OperatorEntry {
            name: name.clone(),
            re: (0..n)
                .map(|r| (0..n).map(|c| m.matrix()[(r, c)].re).collect())
                .collect(),
            im: (0..n)
                .map(|r| (0..n).map(|c| m.matrix()[(r, c)].im).collect())
                .collect(),
        })
        .collect();
    let mut s =
        serde_json::to_string_pretty(&OperatorFile { dim: n, operators }).expect("finite values");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct MatrixEntry {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct GroupFile {
    order: usize,
    table: Vec<Vec<usize>>,
    xi: Vec<Vec<f64>>,
    /// Optional ray representation, one matrix per group element.
    #[serde(default)]
    rep: Option<Vec<MatrixEntry>>,
}

/// A multiplier table together with an optional representation.
#[derive(Clone, Debug)]
pub struct GroupInput {
    pub multiplier: MultiplierTable,
    pub rep: Option<Vec<ComplexMatrix>>,
}

/// Reads `{"order": k, "table": k×k indices, "xi": k×k radians}` plus an optional `"rep"`.
pub fn parse_group(text: &str) -> Result<GroupInput> {
    let file: GroupFile = serde_json::from_str(text).map_err(json_error)?;
    if file.table.len() != file.order {
        return Err(Error::DimensionMismatch {
            expected: file.order,
            found: file.table.len(),
        });
    }
    let group = FiniteGroup::from_table("file", file.table)?;
    let multiplier = MultiplierTable::new(group, file.xi)?;
    let rep = match file.rep {
        None => None,
        Some(list) => {
            if list.len() != file.order {
                return Err(Error::DimensionMismatch {
                    expected: file.order,
                    found: list.len(),
                });
            }
            let mut mats = Vec::with_capacity(list.len());
            for m in &list {
                let n = m.re.len();
                let re = rows_to_flat(&m.re, n)?;
                let im = rows_to_flat(&m.im, n)?;
                mats.push(ComplexMatrix::from_parts(n, &re, &im)?);
            }
            Some(mats)
        }
    };
    Ok(GroupInput { multiplier, rep })
}

/// Writes a multiplier table in the group file format.
pub fn write_group(xi: &MultiplierTable, rep: Option<&[ComplexMatrix]>) -> String {
    let g = xi.group();
    let rep = rep.map(|mats| {
        mats.iter()
            .map(|m| {
                let n = m.dim();
                MatrixEntry {
                    re: (0..n)
                        .map(|r| (0..n).map(|c| m.matrix()[(r, c)].re).collect())
                        .collect(),
                    im: (0..n)
                        .map(|r| (0..n).map(|c| m.matrix()[(r, c)].im).collect())
                        .collect(),
                }
            })
            .collect()
    });
    let file = GroupFile {
        order: g.order(),
        table: g.table().to_vec(),
        xi: xi.values().to_vec(),
        rep,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("finite values");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Free,
    HarmonicPair { k: f64, l: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    #[serde(default)]
    pub angle: f64,
    #[serde(default)]
    pub v: [f64; 3],
    #[serde(default)]
    pub a: [f64; 3],
    #[serde(default)]
    pub b: f64,
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Initial state, potential, integration settings and the symmetry element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub masses: Vec<f64>,
    pub x: Vec<[f64; 3]>,
    pub p: Vec<[f64; 3]>,
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    #[serde(default)]
    pub t: f64,
    pub potential: PotentialSpec,
    pub dt: f64,
    pub steps: usize,
    pub element: ElementSpec,
}

pub fn parse_dynamics(text: &str) -> Result<DynamicsConfig> {
    serde_json::from_str(text).map_err(json_error)
}

impl DynamicsConfig {
    fn initial(&self) -> Result<ExtendedPhasePoint> {
        let lambda = self
            .lambda
            .clone()
            .unwrap_or_else(|| vec![0.0; self.masses.len()]);
        ExtendedPhasePoint::new(
            self.x.iter().map(|v| Vector3::from(*v)).collect(),
            self.p.iter().map(|v| Vector3::from(*v)).collect(),
            self.masses.clone(),
            lambda,
            self.t,
        )
    }

    fn potential(&self) -> Potential {
        match self.potential {
            PotentialSpec::Free => Potential::Free,
            PotentialSpec::HarmonicPair { k, l } => Potential::HarmonicPair { k, l },
        }
    }

    fn element(&self) -> Result<ExtendedElement> {
        let e = &self.element;
        let rot = if e.angle == 0.0 {
            GalileiElement::identity()
        } else {
            GalileiElement::rotation(Vector3::from(e.axis), e.angle)?
        };
        let g = GalileiElement::new(*rot.r(), Vector3::from(e.v), Vector3::from(e.a), e.b)?;
        Ok(Extended::new(e.theta, g))
    }
}

// ---------------------------------------------------------------------------
// commands

/// Symmetry analysis of an operator-set file; the observables are `S′`.
pub fn cmd_algebra(text: &str, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let set = parse_operator_set(text)?;
    let mut report = AnalysisReport::new("algebra", tol.seed, text.as_bytes());
    let n = set.dim();
    let observables = commutant_report(&set, tol)?;
    let obs = &observables.algebra;
    let generated = generated_algebra(&set, tol)?;
    let z = center(obs, tol)?;
    let dirac = check_dirac(obs, tol)?;
    let table: Vec<[usize; 2]> = dirac
        .sectors
        .structure()
        .iter()
        .map(|&(d, m)| [d, m])
        .collect();
    let closure = obs.closure_residuals();
    let contained = set
        .matrices()
        .iter()
        .map(|m| generated.membership_residual(m))
        .fold(0.0, f64::max);
    let sum_dn: usize = table.iter().map(|r| r[0] * r[1]).sum();
    let sum_n2: usize = table.iter().map(|r| r[1] * r[1]).sum();
    let sum_d2: usize = table.iter().map(|r| r[0] * r[0]).sum();

    report.section(
        "dimensions",
        json!({
            "hilbert": n,
            "symmetry_generated": generated.dimension(),
            "observables": obs.dimension(),
            "observables_commutant": dirac.commutant_dim,
            "center": z.dimension(),
        }),
    );
    report.section(
        "dirac",
        json!({
            "v2_holds": dirac.v2_holds,
            "witness_dim": dirac.witness.as_ref().map(|w| w.dimension()),
            "commutant_max_commutator": dirac.commutant_max_commutator,
        }),
    );
    report.section(
        "sectors",
        json!({
            "table_d_ntilde": table,
            "block_dims": dirac.sectors.block_dims(),
            "projector_residual": dirac.sectors.projector_residual(),
        }),
    );
    report.section(
        "residuals",
        json!({
            "commutant": observables.max_residual,
            "orthonormality": closure.orthonormality,
            "adjoint": closure.adjoint,
            "product": closure.product,
            "set_in_generated": contained,
        }),
    );
    report.check("closure", closure.within(tol));
    report.check("set_in_generated", contained <= 1e-8);
    report.check(
        "dimension_accounting",
        sum_dn == n && sum_n2 == obs.dimension() && sum_d2 == dirac.commutant_dim,
    );
    report.check("projectors", dirac.sectors.projector_residual() <= 1e-8);
    report.check("witness_iff_v2", dirac.witness.is_some() == dirac.v2_holds);
    Ok(report)
}

/// Permutation symmetry on `(C^d)^{⊗n}`.
pub fn cmd_parastat(n: usize, d: usize, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let args = format!(
        "parastat n={n} d={d} tol_rank={:e} tol_cluster={:e}",
        tol.rank_tol, tol.cluster_tol
    );
    let rep = permutation_unitaries(n, d)?;
    let r = parastat_truncation(&rep, tol)?;
    let mut report = AnalysisReport::new("parastat", tol.seed, args.as_bytes());
    let table: Vec<[usize; 2]> = r
        .decomposition
        .structure()
        .iter()
        .map(|&(d, m)| [d, m])
        .collect();
    let oracle: Vec<Value> = r
        .oracle
        .iter()
        .map(|c| json!({"partition": c.partition, "irrep_dim": c.irrep_dim, "multiplicity": c.multiplicity}))
        .collect();
    report.section(
        "sectors",
        json!({"table_d_ntilde": table, "oracle": oracle, "present": r.present_sectors}),
    );
    report.section(
        "before",
        json!({
            "observables_dim": r.algebra_dim,
            "commutant_dim": r.commutant_dim,
            "commutant_abelian": r.commutant_abelian_before,
        }),
    );
    report.section(
        "after",
        json!({
            "truncated_dim": r.truncated_dim,
            "commutant_dim": r.truncated_commutant_dim,
            "commutant_abelian": r.truncated_commutant_abelian,
            "dirac_v2": r.truncation.dirac.v2_holds,
        }),
    );
    report.check("oracle_agrees", r.oracle_agrees);
    report.check("truncated_dim", r.truncated_dim_matches);
    report.check(
        "abelian_after",
        r.truncated_commutant_abelian && r.truncated_commutant_dim == r.present_sectors,
    );
    report.check(
        "non_abelian_before_iff_n_ge_3",
        r.commutant_abelian_before == (n < 3),
    );
    Ok(report)
}

/// Bargmann multiplier checks for two masses.
pub fn cmd_bargmann(m1: f64, m2: f64, samples: usize, seed: u64) -> Result<AnalysisReport> {
    let args = format!("bargmann m1={m1:e} m2={m2:e} samples={samples}");
    let mass = mass_superselection_report(m1, m2, samples, seed)?;
    let cocycle =
        bargmann_cocycle_check(m1, samples, seed)?.max(bargmann_cocycle_check(m2, samples, seed)?);
    let grid = Grid1D::new(-12.0, 0.05, 481)?;
    let psi = grid.sample(|x| num_complex::Complex64::from_polar((-x * x).exp(), 0.3 * x));
    let (boost, shift) = canonical_pair();
    let ray = ray_compose_check(m1, &grid, &boost, &shift, &psi)?;
    let action = extended_action_composition_check(&[m1, m2], samples, seed)?;

    let mut report = AnalysisReport::new("bargmann", seed, args.as_bytes());
    report.section(
        "cocycle",
        json!({"max_residual": cocycle, "samples": samples}),
    );
    report.section(
        "obstruction",
        json!({
            "canonical": [mass.canonical.0, mass.canonical.1, mass.canonical.2],
            "sampled_max": [mass.sampled.0, mass.sampled.1, mass.sampled.2],
            "inequivalent": mass.inequivalent,
            "consequence": mass.consequence,
        }),
    );
    report.section(
        "ray_compose",
        json!({"xi": ray.xi, "deviation": ray.deviation, "holds": ray.holds}),
    );
    report.section("extended_action", json!({"composition_residual": action}));
    let expected = (m1, m2, (m1 - m2).abs());
    let exact = (mass.canonical.0 - expected.0).abs() <= 1e-12
        && (mass.canonical.1 - expected.1).abs() <= 1e-12
        && (mass.canonical.2 - expected.2).abs() <= 1e-12;
    report.check("cocycle", cocycle <= 1e-9);
    report.check("canonical_obstruction", exact);
    report.check("inequivalent", mass.inequivalent);
    report.check("ray_compose", ray.holds);
    report.check("extended_action", action <= 1e-12);
    Ok(report)
}

/// Cocycle, coboundary, obstruction and lift checks for a group file.
pub fn cmd_extension(text: &str, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let input = parse_group(text)?;
    let xi = &input.multiplier;
    let g = xi.group();
    let k = g.order();
    let mut report = AnalysisReport::new("extension", tol.seed, text.as_bytes());
    let strict = check_cocycle(xi, CocycleMode::Strict);
    let circle = check_cocycle(xi, CocycleMode::Mod2Pi);

    let mut rng = tol.rng(0x6578_7465);
    let mut assoc = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                use rand::Rng;
                let mut t = |x| Extended::new(rng.random_range(-1.0..1.0), x);
                assoc = assoc.max(associativity_defect(
                    g,
                    |x, y| xi.get(*x, *y),
                    &t(a),
                    &t(b),
                    &t(c),
                ));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .filter(|&(a, b)| g.multiply(&a, &b) == g.multiply(&b, &a))
        .collect();
    let obstruction = antisym_obstruction(g, |x, y| xi.get(*x, *y), &pairs, 0.0)?;

    report.section(
        "group",
        json!({"order": k, "abelian": pairs.len() == k * k}),
    );
    report.section(
        "cocycle",
        json!({
            "strict": {"holds": strict.holds, "max_residual": strict.max_residual},
            "mod2pi": {"holds": circle.holds, "max_residual": circle.max_residual},
            "associativity_defect": assoc,
        }),
    );
    report.section(
        "obstruction",
        json!({"commuting_pairs": pairs.len(), "max_antisymmetry": obstruction}),
    );
    if strict.holds {
        let sol = coboundary_solve(&MultiplierTable::zero(g.clone()), xi)?;
        report.section(
            "coboundary",
            json!({"trivial": sol.gamma.is_some(), "gamma": sol.gamma, "max_residual": sol.max_residual}),
        );
    }
    if let Some(rep) = &input.rep {
        let mode = if strict.holds {
            CocycleMode::Strict
        } else {
            CocycleMode::Mod2Pi
        };
        let lift = lift_check(rep, xi, mode, &[0.0, 0.5, -1.25, 3.0])?;
        report.section(
            "lift",
            json!({"ray_residual": lift.ray_residual, "lift_residual": lift.lift_residual, "holds": lift.holds}),
        );
        report.check("lift", lift.holds);
    }
    report.check("cocycle", strict.holds || circle.holds);
    report.check("associativity_iff_strict", (assoc <= 1e-10) == strict.holds);
    Ok(report)
}

/// Multipole analysis of one flux formula.
#[allow(clippy::too_many_arguments)]
pub fn cmd_flux(
    e: f64,
    m: f64,
    p: [f64; 3],
    lmax: usize,
    n_theta: usize,
    n_phi: usize,
    formula: FluxFormula,
    seed: u64,
) -> Result<AnalysisReport> {
    let args = format!(
        "flux e={e:e} m={m:e} p=[{:e},{:e},{:e}] lmax={lmax} ntheta={n_theta} nphi={n_phi} formula={formula:?}",
        p[0], p[1], p[2]
    );
    let k = ChargeKinematics::new(e, m, Vector3::from(p))?;
    let q = SphereQuadrature::new(n_theta, n_phi)?;
    let fm = kinematic_moments(formula, &k, &q, lmax)?;
    let charge = total_charge(&fm);
    let table: Vec<Value> = fm.rows().iter().map(|(l, m, c)| json!([l, m, c])).collect();
    let axial = k.p.x == 0.0 && k.p.y == 0.0;
    let mut report = AnalysisReport::new("flux", seed, args.as_bytes());
    report.section("multipoles", json!({"lmax": lmax, "rows_l_m_f": table}));
    report.section(
        "summary",
        json!({
            "charge": charge,
            "odd_l_residual": fm.odd_residual(),
            "nonaxial_residual": fm.nonaxial_residual(),
            "f20": if lmax >= 2 { Some(fm.get(2, 0)) } else { None },
        }),
    );
    report.check("charge", (charge - e).abs() <= 1e-8);
    if formula == FluxFormula::Instantaneous {
        report.check("parity", fm.odd_residual() <= 1e-10);
    }
    if axial {
        report.check("axial", fm.nonaxial_residual() <= 1e-10);
    }
    Ok(report)
}

/// Extended dynamics and the solution-mapping check for a configuration file.
pub fn cmd_dynamics(text: &str, seed: u64) -> Result<AnalysisReport> {
    let cfg = parse_dynamics(text)?;
    let initial = cfg.initial()?;
    let potential = cfg.potential();
    let element = cfg.element()?;
    let traj = extended_dynamics(&initial, &potential, cfg.dt, cfg.steps)?;
    let sym = dynamics_symmetry_check(&initial, &potential, &element, cfg.dt, cfg.steps)?;
    let last = traj
        .states
        .last()
        .expect("trajectory holds the initial state");
    let masses_constant = traj.states.iter().all(|s| s.m == initial.m);
    let mut report = AnalysisReport::new("dynamics", seed, text.as_bytes());
    report.section(
        "trajectory",
        json!({
            "steps": cfg.steps,
            "dt": cfg.dt,
            "final_time": last.t,
            "final_lambda": last.lambda,
            "energy_drift": traj.energy_drift,
            "masses_constant": masses_constant,
        }),
    );
    report.section("symmetry", json!({"max_deviation": sym.max_deviation}));
    report.check("masses_constant", masses_constant);
    report.check("energy_drift", traj.energy_drift <= 1e-6);
    report.check("symmetry", sym.max_deviation <= 1e-5);
    Ok(report)
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Parser, Debug)]
#[command(
    name = "sectorkit",
    version,
    about = "Superselection structure analyses"
)]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    #[arg(long = "tol-cluster", global = true, default_value_t = 1e-8)]
    pub tol_cluster: f64,
    /// Also write `<command>.json` into this directory.
    #[arg(long = "out-dir", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Print the plain-text rendering instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Inst,
    Ret,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Commutant, center, sectors and Dirac check for an operator-set file.
    Algebra { file: PathBuf },
    /// Permutation symmetry on n copies of C^d.
    Parastat {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Bargmann multiplier checks for two masses.
    Bargmann {
        #[arg(long, default_value_t = 2.0)]
        m1: f64,
        #[arg(long, default_value_t = 1.0)]
        m2: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Cocycle and central-extension checks for a group file.
    Extension { file: PathBuf },
    /// Multipole moments of a moving charge's flux.
    Flux {
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, num_args = 1, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0], allow_negative_numbers = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        #[arg(long, default_value_t = 64)]
        ntheta: usize,
        #[arg(long, default_value_t = 128)]
        nphi: usize,
        #[arg(long, value_enum, default_value_t = FormulaArg::Inst)]
        formula: FormulaArg,
    },
    /// Extended dynamics and its symmetry check for a configuration file.
    Dynamics { file: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Runs one parsed invocation and returns its report.
pub fn execute(cli: &Cli) -> Result<AnalysisReport> {
    let tol = ToleranceConfig::new(cli.tol_rank, cli.tol_cluster, cli.seed)?;
    match &cli.command {
        Command::Algebra { file } => cmd_algebra(&read(file)?, &tol),
        Command::Parastat { n, d } => cmd_parastat(*n, *d, &tol),
        Command::Bargmann { m1, m2, samples } => cmd_bargmann(*m1, *m2, *samples, cli.seed),
        Command::Extension { file } => cmd_extension(&read(file)?, &tol),
        Command::Flux {
            e,
            m,
            p,
            lmax,
            ntheta,
            nphi,
            formula,
        } => {
            let p: [f64; 3] = p
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidArgument("--p needs three components".into()))?;
            let formula = match formula {
                FormulaArg::Inst => FluxFormula::Instantaneous,
                FormulaArg::Ret => FluxFormula::Retarded,
            };
            cmd_flux(*e, *m, p, *lmax, *ntheta, *nphi, formula, cli.seed)
        }
        Command::Dynamics { file } => cmd_dynamics(&read(file)?, cli.seed),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let out_dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| cli.out_dir.clone());
    if let Some(dir) = out_dir {
        let path = dir.join(format!("{}.json", report.command));
        if let Err(e) =
            std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, report.to_json()))
        {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    if cli.text {
        print!("{}", report.to_text());
    } else {
        print!("{}", report.to_json());
    }
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAG112: &str = r#"{"dim": 3, "operators": [
        {"name": "H", "re": [[1,0,0],[0,1,0],[0,0,2]], "im": [[0,0,0],[0,0,0],[0,0,0]]}
    ]}"#;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn algebra_of_diag112() {
        let r = cmd_algebra(DIAG112, &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(r.sections["dirac"]["v2_holds"], json!(true));
        let mut dims: Vec<u64> = r.sections["sectors"]["block_dims"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
        assert_eq!(r.sections["dimensions"]["center"], json!(2));
    }

    #[test]
    fn algebra_of_m2_tensor_one() {
        // X⊗1 and Z⊗1 generate M₂⊗1; the observables 1⊗M₂ have commutant M₂⊗1
        let text = r#"{"dim": 4, "operators": [
            {"name": "X1", "re": [[0,0,1,0],[0,0,0,1],[1,0,0,0],[0,1,0,0]], "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]},
            {"name": "Z1", "re": [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]], "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}
        ]}"#;
        let r = cmd_algebra(text, &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(r.sections["dirac"]["v2_holds"], json!(false));
    }

    #[test]
    fn parse_errors() {
        let e = parse_operator_set("{\"dim\": 2,\n \"operators\": []}").unwrap_err();
        assert!(matches!(e, Error::ParseError { line: 2, .. }), "{e:?}");
        let e = parse_operator_set("{\"dim\": 2, \"operators\": [ oops ]}").unwrap_err();
        assert!(matches!(e, Error::ParseError { line: 1, .. }));
        let bad = r#"{"dim": 2, "operators": [{"name": "A", "re": [[1,0]], "im": [[0,0],[0,0]]}]}"#;
        assert!(matches!(
            parse_operator_set(bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn operator_file_round_trip() {
        let set = parse_operator_set(DIAG112).unwrap();
        let text = write_operator_set(&set);
        let again = parse_operator_set(&text).unwrap();
        assert_eq!(set.matrices(), again.matrices());
        assert_eq!(text, write_operator_set(&again));
    }

    #[test]
    fn parastat_report() {
        let r = cmd_parastat(3, 2, &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(r.sections["before"]["commutant_abelian"], json!(false));
        assert_eq!(r.sections["after"]["truncated_dim"], json!(6));
        assert!(
            cmd_parastat(2, 2, &tol()).unwrap().sections["before"]["commutant_abelian"]
                .as_bool()
                .unwrap()
        );
        assert!(matches!(
            cmd_parastat(5, 2, &tol()),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn bargmann_report() {
        let r = cmd_bargmann(2.0, 1.0, 200, 4).unwrap();
        assert!(r.passed);
        assert_eq!(
            r.sections["obstruction"]["canonical"],
            json!([2.0, 1.0, 1.0])
        );
        assert!(cmd_bargmann(1.0, 1.0, 10, 0).is_err());
        let other = cmd_bargmann(2.0, 1.0, 200, 5).unwrap();
        assert_eq!(other.passed, r.passed);
        assert_ne!(other.sections["cocycle"], r.sections["cocycle"]);
    }

    #[test]
    fn extension_reports() {
        let pauli = write_group(
            &MultiplierTable::pauli(),
            Some(&crate::cocycles::pauli_rep()),
        );
        let r = cmd_extension(&pauli, &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(r.sections["cocycle"]["strict"]["holds"], json!(false));
        assert_eq!(r.sections["lift"]["holds"], json!(true));
        let zero = write_group(&MultiplierTable::zero(FiniteGroup::s3()), None);
        let r = cmd_extension(&zero, &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(r.sections["coboundary"]["trivial"], json!(true));
    }

    #[test]
    fn flux_reports() {
        let r = cmd_flux(
            1.0,
            1.0,
            [0.0, 0.0, 2.0],
            8,
            64,
            128,
            FluxFormula::Instantaneous,
            0,
        )
        .unwrap();
        assert!(r.passed);
        assert!(r.sections["summary"]["f20"].as_f64().unwrap().abs() > 1e-3);
        assert!(matches!(
            cmd_flux(1.0, 1.0, [0.0; 3], 8, 8, 128, FluxFormula::Instantaneous, 0),
            Err(Error::QuadratureTooCoarse(_))
        ));
    }

    #[test]
    fn dynamics_report() {
        let text = r#"{"masses": [1.0, 2.0], "x": [[0,0,0],[1.3,0.2,-0.1]], "p": [[0.1,0.3,0],[-0.2,0,0.4]],
            "potential": {"kind": "harmonic_pair", "k": 1.5, "l": 1.0}, "dt": 0.001, "steps": 1000,
            "element": {"theta": 0.4, "axis": [1,1,0], "angle": 0.7, "v": [0.2,0,-0.1], "a": [1,2,3], "b": 0.5}}"#;
        let r = cmd_dynamics(text, 0).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["sectorkit", "parastat", "--n", "5"]), 1);
        assert_eq!(run(["sectorkit", "flux", "--p", "0,0,1"]), 0);
        assert_eq!(run(["sectorkit", "bogus"]), 1);
    }
}
